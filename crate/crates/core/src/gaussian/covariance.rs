use crate::error::{Error, Result};
use crate::math::{bosonic_entropy_unchecked, ChannelParams};
use crate::scalar::Real;

/// Real symmetric 2x2 correlation matrix of a single-mode Gaussian state.
/// Vacuum is `a_qq = a_pp = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeCovariance<T> {
    a_qq: T,
    a_pp: T,
    a_qp: T,
}

impl<T: Real> SingleModeCovariance<T> {
    pub fn new(a_qq: T, a_pp: T, a_qp: T) -> Result<Self> {
        if !(a_qq.is_finite() && a_pp.is_finite() && a_qp.is_finite()) {
            return Err(Error::Physicality("non-finite covariance entry".into()));
        }
        if a_qq <= T::zero() || a_pp <= T::zero() {
            return Err(Error::Physicality(format!(
                "diagonal entries must be positive, got ({a_qq}, {a_pp})"
            )));
        }
        let det = a_qq * a_pp - a_qp * a_qp;
        if det < T::lit(0.25) - T::lit(1e-12) {
            return Err(Error::Physicality(format!(
                "det = {det} violates the uncertainty bound det >= 1/4"
            )));
        }
        Ok(Self { a_qq, a_pp, a_qp })
    }

    /// Thermal state with mean photon number `n`.
    pub fn thermal(n: T) -> Result<Self> {
        if !(n >= T::zero()) {
            return Err(Error::Domain(format!("thermal photon number must be >= 0, got {n}")));
        }
        let e = n + T::lit(0.5);
        Self::new(e, e, T::zero())
    }

    /// Phase-insensitive-energy parameterization: builds the covariance with
    /// energy `E` and shape `x`, squeezed along q.
    pub fn from_energy_shape(energy: T, x: T) -> Result<Self> {
        check_energy_shape(energy, x)?;
        // diag(E + s, E - s) with E^2 - s^2 = E^2 x
        let s = energy * (T::one() - x).max(T::zero()).sqrt();
        Self::new(energy + s, energy - s, T::zero())
    }

    pub fn a_qq(&self) -> T {
        self.a_qq
    }

    pub fn a_pp(&self) -> T {
        self.a_pp
    }

    pub fn a_qp(&self) -> T {
        self.a_qp
    }

    pub fn det(&self) -> T {
        self.a_qq * self.a_pp - self.a_qp * self.a_qp
    }

    /// `E = (a_qq + a_pp) / 2`.
    pub fn energy(&self) -> T {
        T::lit(0.5) * (self.a_qq + self.a_pp)
    }

    /// `x = det(alpha) / E^2`, clamped to `[1/(4E^2), 1]` against rounding.
    pub fn shape(&self) -> T {
        let e = self.energy();
        let lo = T::lit(0.25) / (e * e);
        (self.det() / (e * e)).max(lo).min(T::one())
    }
}

/// Additive noise: `alpha' = alpha + N_n I`.
pub fn channel_on_covariance<T: Real>(
    cov: &SingleModeCovariance<T>,
    ch: &ChannelParams<T>,
) -> SingleModeCovariance<T> {
    let n = ch.noise_photons();
    SingleModeCovariance {
        a_qq: cov.a_qq + n,
        a_pp: cov.a_pp + n,
        a_qp: cov.a_qp,
    }
}

/// Symplectic data of the channel output and of the joint output/reference state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticBreakdown<T> {
    pub d0: T,
    pub d1: T,
    pub d2: T,
    pub dg: T,
}

pub(crate) fn check_energy_shape<T: Real>(energy: T, x: T) -> Result<()> {
    if !(energy.is_finite() && energy >= T::lit(0.5) * (T::one() - T::lit(1e-12))) {
        return Err(Error::Domain(format!("energy must be finite and >= 1/2, got {energy}")));
    }
    let lo = T::lit(0.25) / (energy * energy);
    let tol = T::lit(1e-12);
    if !(x.is_finite() && x >= lo * (T::one() - tol) - tol && x <= T::one() + tol) {
        return Err(Error::Domain(format!(
            "shape x = {x} outside [{lo}, 1] at energy {energy}"
        )));
    }
    Ok(())
}

fn checked_sqrt<T: Real>(radicand: T, what: &str) -> Result<T> {
    if radicand >= T::zero() {
        Ok(radicand.sqrt())
    } else if radicand > -T::lit(1e-12) {
        Ok(T::zero())
    } else {
        Err(Error::Physicality(format!("negative radicand {radicand} in {what}")))
    }
}

/// `d0`, `d1 >= d2` and `D_G` at energy `E` and shape `x`.
pub fn symplectic_from_energy_shape<T: Real>(
    energy: T,
    x: T,
    ch: &ChannelParams<T>,
) -> Result<SymplecticBreakdown<T>> {
    check_energy_shape(energy, x)?;
    let nn = ch.noise_photons();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let d0 = checked_sqrt(nn * nn + two * nn * energy + energy * energy * x, "d0")?;
    // (N_n + 2E)^2 + 1 - (2E)^2 x, expanded so the (2E)^2 terms cancel exactly at x = 1
    let two_e = two * energy;
    let dg2 = nn * nn + T::lit(4.0) * nn * energy + T::one() + two_e * two_e * (T::one() - x);
    let dg = checked_sqrt(dg2, "D_G")?;
    let base = nn * nn + two * nn * energy + half;
    let d1 = checked_sqrt(half * (base + nn * dg), "d1")?;
    let d2 = checked_sqrt(half * (base - nn * dg), "d2")?;
    Ok(SymplecticBreakdown { d0, d1, d2, dg })
}

pub fn symplectic_breakdown<T: Real>(
    cov: &SingleModeCovariance<T>,
    ch: &ChannelParams<T>,
) -> Result<SymplecticBreakdown<T>> {
    symplectic_from_energy_shape(cov.energy(), cov.shape(), ch)
}

/// Unclamped coherent information at energy `E` and shape `x`.
pub fn coherent_info_energy_shape<T: Real>(energy: T, x: T, ch: &ChannelParams<T>) -> Result<T> {
    let sb = symplectic_from_energy_shape(energy, x, ch)?;
    let h = T::lit(0.5);
    Ok(bosonic_entropy_unchecked(sb.d0 - h)
        - bosonic_entropy_unchecked(sb.d1 - h)
        - bosonic_entropy_unchecked(sb.d2 - h))
}

/// Unclamped coherent information of a single-mode Gaussian input.
pub fn coherent_info_gaussian<T: Real>(
    cov: &SingleModeCovariance<T>,
    ch: &ChannelParams<T>,
) -> Result<T> {
    coherent_info_energy_shape(cov.energy(), cov.shape(), ch)
}
