use crate::error::{Error, Result};
use crate::gaussian::covariance::coherent_info_energy_shape;
use crate::math::ChannelParams;
use crate::scalar::Real;

/// `S2(r2) (rho (x) rho) S2(r2)^dagger` for a thermal `rho` with mean photon
/// number `N`, where `S2(r) = exp[r (a^dagger b^dagger - a b)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSqueezedThermalInput<T> {
    photons: T,
    r2: T,
    total_energy: T,
}

impl<T: Real> TwoModeSqueezedThermalInput<T> {
    pub fn new(photons: T, r2: T) -> Result<Self> {
        if !(photons.is_finite() && photons >= T::zero()) {
            return Err(Error::Domain(format!("photon number must be >= 0, got {photons}")));
        }
        if !(r2.is_finite() && r2 >= T::zero()) {
            return Err(Error::Domain(format!("squeezing must be finite and >= 0, got {r2}")));
        }
        let total_energy = T::lit(2.0) * (photons + T::lit(0.5)) * (T::lit(2.0) * r2).cosh();
        Ok(Self { photons, r2, total_energy })
    }

    /// Input with the given total energy of both modes (vacuum counted as 1/2
    /// per mode) and squeezing `r2`.
    pub fn with_total_energy(total_energy: T, r2: T) -> Result<Self> {
        if !(r2.is_finite() && r2 >= T::zero()) {
            return Err(Error::Domain(format!("squeezing must be finite and >= 0, got {r2}")));
        }
        let photons = total_energy / (T::lit(2.0) * (T::lit(2.0) * r2).cosh()) - T::lit(0.5);
        if !(photons >= -T::lit(1e-12)) {
            return Err(Error::Domain(format!(
                "total energy {total_energy} too small for squeezing {r2}"
            )));
        }
        Self::new(photons.max(T::zero()), r2)
    }

    pub fn photons(&self) -> T {
        self.photons
    }

    pub fn r2(&self) -> T {
        self.r2
    }

    pub fn total_energy(&self) -> T {
        self.total_energy
    }

    /// Shape parameter of each single-mode marginal, `1 / cosh^2(2 r2)`.
    pub fn shape(&self) -> T {
        (T::lit(2.0) * self.r2).cosh().powi(2).recip()
    }
}

/// Coherent information of the two-mode squeezed thermal input through two
/// uses of the channel, clamped at zero per mode pair:
/// `2 max{0, I(E/2, x)}`.
pub fn coherent_info_two_mode_squeezed<T: Real>(
    input: &TwoModeSqueezedThermalInput<T>,
    ch: &ChannelParams<T>,
) -> Result<T> {
    let per_mode = T::lit(0.5) * input.total_energy();
    let ic = coherent_info_energy_shape(per_mode, input.shape(), ch)?;
    Ok(T::lit(2.0) * ic.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::thermal::coherent_info_thermal;
    use approx::assert_relative_eq;

    fn ch(n: f64) -> ChannelParams<f64> {
        ChannelParams::new(n).unwrap()
    }

    #[test]
    fn unsqueezed_reduces_to_product_thermal() {
        let inp = TwoModeSqueezedThermalInput::new(1.0, 0.0).unwrap();
        assert_eq!(inp.shape(), 1.0);
        assert_relative_eq!(inp.total_energy(), 3.0);
        let ic = coherent_info_two_mode_squeezed(&inp, &ch(0.1)).unwrap();
        assert_relative_eq!(ic, 2.0 * coherent_info_thermal(1.0, &ch(0.1)).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn covariance_reference_values() {
        // total I_c from the symplectic spectrum of the 4-mode covariance
        // (Q1, Q2, R1, R2) at N = 1, N_n = 0.1
        for &(r2, expected) in &[(0.5, 1.631_99), (1.0, 1.106_72)] {
            let inp = TwoModeSqueezedThermalInput::new(1.0, r2).unwrap();
            let ic = coherent_info_two_mode_squeezed(&inp, &ch(0.1)).unwrap();
            assert!((ic - expected).abs() < 1e-5, "r2={r2}: {ic}");
        }
    }

    #[test]
    fn squeezing_costs_at_fixed_energy() {
        let at = |r2| {
            let inp = TwoModeSqueezedThermalInput::with_total_energy(200.0, r2).unwrap();
            coherent_info_two_mode_squeezed(&inp, &ch(0.1)).unwrap()
        };
        assert!(at(0.0) > at(0.5));
        assert!(at(0.0) > at(1.0));
    }

    #[test]
    fn total_energy_round_trip() {
        let inp = TwoModeSqueezedThermalInput::with_total_energy(200.0, 0.7).unwrap();
        let back = TwoModeSqueezedThermalInput::new(inp.photons(), 0.7).unwrap();
        assert_relative_eq!(back.total_energy(), 200.0, max_relative = 1e-14);
        assert!(TwoModeSqueezedThermalInput::with_total_energy(1.0, 1.0).is_err());
    }
}
