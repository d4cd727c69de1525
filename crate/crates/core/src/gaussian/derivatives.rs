use crate::error::{Error, Result};
use crate::gaussian::covariance::{check_energy_shape, coherent_info_energy_shape};
use crate::math::ChannelParams;
use crate::scalar::Real;

/// Base step of the finite-difference probe in `x`.
const DEFAULT_STEP: f64 = 1e-3;

/// Finite-difference `dI_c/dx` at fixed energy with one Richardson step
/// (steps `h` and `h/2`).
///
/// Central where `x +- h` fits in the domain, otherwise one-sided toward the
/// interior. At `x = 1` the backward difference is used.
pub fn dic_dx_numeric<T: Real>(energy: T, x: T, ch: &ChannelParams<T>) -> Result<T> {
    dic_dx_numeric_with_step(energy, x, T::lit(DEFAULT_STEP), ch)
}

pub fn dic_dx_numeric_with_step<T: Real>(
    energy: T,
    x: T,
    h: T,
    ch: &ChannelParams<T>,
) -> Result<T> {
    check_energy_shape(energy, x)?;
    let x = x.min(T::one());
    let lo = T::lit(0.25) / (energy * energy);
    if !(h > T::zero()) {
        return Err(Error::StepSize(format!("step must be positive, got {h}")));
    }
    let f = |xx: T| coherent_info_energy_shape(energy, xx, ch);
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    if x - h >= lo && x + h <= T::one() {
        let central = |s: T| -> Result<T> { Ok((f(x + s)? - f(x - s)?) / (two * s)) };
        let (d1, d2) = (central(h)?, central(h * half)?);
        return Ok((T::lit(4.0) * d2 - d1) / T::lit(3.0));
    }
    let one_sided = |s: T| -> Result<T> {
        if x - s >= lo {
            Ok((f(x)? - f(x - s)?) / s)
        } else {
            Ok((f(x + s)? - f(x)?) / s)
        }
    };
    if x - h < lo && x + h > T::one() {
        return Err(Error::StepSize(format!(
            "no room for step {h} around x = {x} in [{lo}, 1]"
        )));
    }
    let (d1, d2) = (one_sided(h)?, one_sided(h * half)?);
    Ok(two * d2 - d1)
}

/// Leading large-energy term `(1/(2 E x^2)) (1/(3 N_n) - 2 N_n) / ln 2`.
///
/// The bracket comes from a natural-log expansion; dividing by ln 2 puts it
/// in bits like every other entropy here.
pub fn asymptotic_dic_dx<T: Real>(energy: T, x: T, ch: &ChannelParams<T>) -> T {
    let nn = ch.noise_photons();
    let bracket = (T::lit(3.0) * nn).recip() - T::lit(2.0) * nn;
    bracket / (T::lit(2.0) * energy * x * x) * T::LOG2_E()
}
