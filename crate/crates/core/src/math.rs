//! Scalar special functions and capacity formulas shared by every layer.
//!
//! All entropies are in bits.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The additive classical-noise channel, parameterized by the mean photon
/// number `N_n` of the random displacement it applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    noise_photons: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(noise_photons: T) -> Result<Self> {
        if !noise_photons.is_finite() || noise_photons < T::zero() {
            return Err(Error::Domain(format!(
                "noise photon number must be finite and non-negative, got {noise_photons}"
            )));
        }
        if noise_photons == T::zero() {
            return Err(Error::ZeroNoise);
        }
        Ok(Self { noise_photons })
    }

    #[inline]
    pub fn noise_photons(&self) -> T {
        self.noise_photons
    }

    /// `v_n = N_n / (N_n + 1)`.
    #[inline]
    pub fn v(&self) -> T {
        self.noise_photons / (self.noise_photons + T::one())
    }

    /// True when `N_n < 1/e`, the regime with a positive conjectured capacity.
    pub fn below_threshold(&self) -> bool {
        self.noise_photons < T::E().recip()
    }
}

/// Bosonic entropy `g(s) = (s+1) log2(s+1) - s log2 s`, the entropy of a
/// thermal state with mean photon number `s`.
pub fn bosonic_entropy<T: Real>(s: T) -> Result<T> {
    if !s.is_finite() || s < T::zero() {
        return Err(Error::Domain(format!(
            "bosonic entropy needs a finite s >= 0, got {s}"
        )));
    }
    Ok(bosonic_entropy_unchecked(s))
}

/// `g(s)` without argument validation. Negative inputs are treated as zero.
#[inline]
pub(crate) fn bosonic_entropy_unchecked<T: Real>(s: T) -> T {
    if s <= T::lit(1e-300) || s.is_nan() {
        // s log2 s -> 0 and (s+1) log2 (s+1) ~ s / ln 2
        return if s > T::zero() { s * T::LOG2_E() } else { T::zero() };
    }
    // log2(s+1) + s log2(1 + 1/s): same function, no cancellation at large s
    ((s.ln_1p() + s * s.recip().ln_1p()) * T::LOG2_E()).max(T::zero())
}

/// `g'(s) = log2((s+1)/s)`.
#[inline]
pub(crate) fn bosonic_entropy_derivative<T: Real>(s: T) -> T {
    s.recip().ln_1p() * T::LOG2_E()
}

/// Conjectured quantum capacity `max{0, -log2(e N_n)}`.
pub fn conjectured_capacity<T: Real>(ch: &ChannelParams<T>) -> T {
    if !ch.below_threshold() {
        return T::zero();
    }
    (-(T::E() * ch.noise_photons()).log2()).max(T::zero())
}

pub(crate) fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(acc.round())
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    T::lit(ln_factorial(n).exp().round())
}
