use crate::error::{Error, Result};
use crate::gaussian::thermal_decomposition;
use crate::math::{binomial, factorial, ln_factorial, ChannelParams};
use crate::scalar::Real;

/// Characteristic-function factor `1 + epsilon |mu|^{2n}` around a thermal
/// state. Order `n = 1` keeps the state Gaussian to first order and is
/// flagged as such.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type1Perturbation<T> {
    n: usize,
    epsilon: T,
}

impl<T: Real> Type1Perturbation<T> {
    pub fn new(n: usize, epsilon: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPerturbation("order n must be at least 1".into()));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidPerturbation(format!("epsilon must be finite, got {epsilon}")));
        }
        Ok(Self { n, epsilon })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        Self::new(self.n, epsilon)
    }

    pub fn is_gaussian_type(&self) -> bool {
        self.n == 1
    }
}

pub(crate) fn check_positive_photons<T: Real>(n: T) -> Result<()> {
    if n > T::zero() && n.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("thermal photon number must be positive, got {n}")))
    }
}

/// Relative eigenvalue shifts `xi_k`, `k = 0..=k_max`: the perturbed input
/// has eigenvalues `lambda_k (1 + epsilon xi_k)` with
/// `xi_k = (1-v)^n sum_j (-1)^j n! C(n,j) C(k,j) N^{-j}`.
pub fn xi_eigenvalues<T: Real>(n: usize, photons: T, k_max: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidPerturbation("order n must be at least 1".into()));
    }
    check_positive_photons(photons)?;
    let one = T::one();
    let pref = (one / (photons + one)).powi(n as i32);
    let nf: T = factorial(n);
    let terms: Vec<T> = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { one } else { -one };
            sign * nf * binomial::<T>(n, j) * photons.powi(-(j as i32))
        })
        .collect();
    Ok((0..=k_max)
        .map(|k| {
            let s = terms
                .iter()
                .enumerate()
                .take(k.min(n) + 1)
                .fold(T::zero(), |acc, (j, &t)| acc + t * binomial::<T>(k, j));
            pref * s
        })
        .collect())
}

/// Second-order entropy coefficients of a type-1 perturbation, each per unit
/// `epsilon^2` before the `-1/2` and base-2 factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionBreakdown<T> {
    /// `sum_k phi_k^2 / lambda_k = (n!)^2 / [N(N+1)]^n`.
    pub input_coeff: T,
    /// `(n!)^2 / [N'(N'+1)]^n` with `N' = N + N_n`.
    pub output_coeff: T,
    /// `(n!)^2 [N(N+1)]^{-2n} sum_j C(n,j)^2 B^j A^{n-j}`.
    pub joint_coeff: T,
    /// `-(output_coeff - joint_coeff) / (2 ln 2)`, bits per unit `epsilon^2`.
    pub delta_ic_second_order: T,
    /// `A = N_A (N_A + 1) sinh^4 r`.
    pub a_coeff: T,
    /// `B = N_B (N_B + 1) cosh^4 r`.
    pub b_coeff: T,
}

/// `sum_j C(m,j)^2 b^j a^{m-j}`.
pub(crate) fn mixed_binomial_sum<T: Real>(m: usize, a: T, b: T) -> T {
    (0..=m).fold(T::zero(), |acc, j| {
        let c: T = binomial(m, j);
        acc + c * c * b.powi(j as i32) * a.powi((m - j) as i32)
    })
}

pub fn correction_breakdown<T: Real>(
    pert: &Type1Perturbation<T>,
    photons: T,
    ch: &ChannelParams<T>,
) -> Result<CorrectionBreakdown<T>> {
    check_positive_photons(photons)?;
    let n = pert.order();
    let one = T::one();
    let f2 = {
        let f: T = factorial(n);
        f * f
    };
    let var = photons * (photons + one);
    let out_n = photons + ch.noise_photons();
    let input_coeff = f2 / var.powi(n as i32);
    let output_coeff = f2 / (out_n * (out_n + one)).powi(n as i32);
    let d = thermal_decomposition(photons, ch)?;
    let (a, b) = (d.a_coeff(), d.b_coeff());
    // A and B grow like [N(N+1)]^2; scale before raising to the n-th power
    let v2 = var * var;
    let joint_coeff = f2 * mixed_binomial_sum(n, a / v2, b / v2);
    let delta_ic_second_order = -(output_coeff - joint_coeff) / (T::lit(2.0) * T::LN_2());
    Ok(CorrectionBreakdown {
        input_coeff,
        output_coeff,
        joint_coeff,
        delta_ic_second_order,
        a_coeff: a,
        b_coeff: b,
    })
}

/// `1 - 2^{-2n} C(2n, n)`, via log-factorials.
pub fn bracket<T: Real>(n: usize) -> T {
    let ln_central = ln_factorial(2 * n) - 2.0 * ln_factorial(n) - 2.0 * n as f64 * std::f64::consts::LN_2;
    T::lit(-(ln_central.exp_m1()))
}

/// Large-`N` limit of the coherent-information change per unit
/// `epsilon^2`: `-(n!)^2 N^{-2n} [1 - 2^{-2n} C(2n,n)] / (2 ln 2)`.
pub fn delta_ic_limit<T: Real>(n: usize, photons: T) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidPerturbation("order n must be at least 1".into()));
    }
    check_positive_photons(photons)?;
    let f: T = factorial(n);
    Ok(-f * f * photons.powi(-2 * n as i32) * bracket::<T>(n) / (T::lit(2.0) * T::LN_2()))
}
