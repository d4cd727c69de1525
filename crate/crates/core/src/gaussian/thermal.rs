use crate::error::{Error, Result};
use crate::math::{bosonic_entropy_unchecked, ChannelParams};
use crate::scalar::Real;

/// Joint output/reference state of a purified thermal input written as
/// `S2(r) (rho_A (x) rho_B) S2(r)^dagger` with thermal `rho_A`, `rho_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalDecomposition<T> {
    pub r: T,
    pub na: T,
    pub nb: T,
    pub d: T,
}

impl<T: Real> ThermalDecomposition<T> {
    /// Mean photon number of the input implied by the decomposition:
    /// `N_B cosh^2 r + (N_A + 1) sinh^2 r`.
    pub fn reconstructed_photons(&self) -> T {
        let (s, c) = (self.r.sinh(), self.r.cosh());
        self.nb * c * c + (self.na + T::one()) * s * s
    }

    /// `A = N_A (N_A + 1) sinh^4 r`.
    pub fn a_coeff(&self) -> T {
        let s2 = self.r.sinh().powi(2);
        self.na * (self.na + T::one()) * s2 * s2
    }

    /// `B = N_B (N_B + 1) cosh^4 r`.
    pub fn b_coeff(&self) -> T {
        let c2 = self.r.cosh().powi(2);
        self.nb * (self.nb + T::one()) * c2 * c2
    }
}

fn check_photons<T: Real>(n: T) -> Result<()> {
    if n.is_finite() && n >= T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("photon number must be finite and >= 0, got {n}")))
    }
}

pub fn thermal_decomposition<T: Real>(
    n: T,
    ch: &ChannelParams<T>,
) -> Result<ThermalDecomposition<T>> {
    check_photons(n)?;
    let nn = ch.noise_photons();
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let d = (nn * nn + two * (two * n + one) * nn + one).sqrt();
    let na = half * (d + nn - one);
    let nb = (half * (d - nn - one)).max(T::zero());
    let tanh2r = two * (n * (n + one)).sqrt() / (two * n + nn + one);
    let r = half * tanh2r.atanh();
    Ok(ThermalDecomposition { r, na, nb, d })
}

/// `I_c = g(N + N_n) - g(N_A) - g(N_B)`, unclamped.
pub fn coherent_info_thermal<T: Real>(n: T, ch: &ChannelParams<T>) -> Result<T> {
    let td = thermal_decomposition(n, ch)?;
    Ok(bosonic_entropy_unchecked(n + ch.noise_photons())
        - bosonic_entropy_unchecked(td.na)
        - bosonic_entropy_unchecked(td.nb))
}
