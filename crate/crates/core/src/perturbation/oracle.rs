//! Fock-space builders for perturbed states and the end-to-end oracle
//! comparison. `f64` only.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::multimode::MultiModePerturbation;
use super::single::{xi_eigenvalues, Type1Perturbation};
use crate::error::{Error, Result};
use crate::fock::displacement::diagonal_into;
use crate::fock::laguerre::gauss_laguerre;
use crate::fock::oracle::schmidt_entropies;
use crate::fock::state::{thermal_ratio, thermal_weights};
use crate::fock::{thermal_cutoff, thermal_fock, FockDensityMatrix, QuadratureScheme, THERMAL_TAIL_TOL};
use crate::math::ChannelParams;

/// Builders stay at this fraction of the positivity bound on `epsilon`.
const EPSILON_SAFETY: f64 = 0.5;
const MAX_MULTIMODE_ORDER: usize = 3;
const OPERATOR_DOUBLING_TOL: f64 = 1e-12;
/// Largest neglected tail in moment and interference sums.
pub const POLY_TAIL_TOL: f64 = 1e-12;

/// Largest `|epsilon|` (with the sign of `pert.epsilon()`) the builders
/// accept at this cutoff: half of `min_k -1/(epsilon-sign * xi_k)` over the
/// `xi_k` that push eigenvalues down. Infinite if none do.
pub fn max_admissible_epsilon(pert: &Type1Perturbation<f64>, photons: f64, cutoff: usize) -> Result<f64> {
    let sign = if pert.epsilon() < 0.0 { -1.0 } else { 1.0 };
    let xi = xi_eigenvalues(pert.order(), photons, cutoff)?;
    let bound = xi
        .iter()
        .map(|x| sign * x)
        .filter(|&x| x < 0.0)
        .map(|x| -1.0 / x)
        .fold(f64::INFINITY, f64::min);
    Ok(EPSILON_SAFETY * bound)
}

fn perturbed_weights(pert: &Type1Perturbation<f64>, photons: f64, cutoff: usize) -> Result<(Vec<f64>, f64)> {
    let thermal = thermal_fock(photons, cutoff)?;
    let max = max_admissible_epsilon(pert, photons, cutoff)?;
    let eps = pert.epsilon();
    if eps.abs() > max {
        return Err(Error::EpsilonTooLarge { epsilon: eps, max_admissible: max });
    }
    let xi = xi_eigenvalues(pert.order(), photons, cutoff)?;
    let lam = thermal_weights(photons, cutoff);
    let w: Vec<f64> = lam.iter().zip(&xi).map(|(l, x)| l * (1.0 + eps * x)).collect();
    let shift: f64 = lam.iter().zip(&xi).map(|(l, x)| l * x).sum::<f64>() * eps;
    Ok((w, thermal.tail_mass() + shift.abs()))
}

/// Diagonal state `lambda_k (1 + epsilon xi_k)`.
pub fn build_perturbed_input_fock(
    pert: &Type1Perturbation<f64>,
    photons: f64,
    cutoff: usize,
) -> Result<FockDensityMatrix> {
    let (w, tail) = perturbed_weights(pert, photons, cutoff)?;
    let m = DMatrix::from_diagonal(&DVector::from_iterator(
        cutoff + 1,
        w.into_iter().map(|x| Complex64::new(x, 0.0)),
    ));
    FockDensityMatrix::single_mode(m, tail)
}

/// `I_c(rho_epsilon) - I_c(rho)` from the Fock oracle, bits.
///
/// Eigenvalues enter the entropies whenever they are strictly positive: the
/// differences here are far below the usual entropy floor.
pub fn oracle_delta_ic(
    pert: &Type1Perturbation<f64>,
    photons: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
) -> Result<f64> {
    let fit = oracle_delta_ics(pert.order(), photons, ch, cutoff, quad, &[pert.epsilon()])?;
    Ok(fit[0])
}

fn oracle_delta_ics(
    n: usize,
    photons: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
    epsilons: &[f64],
) -> Result<Vec<f64>> {
    quad.ensure_converged(cutoff, ch)?;
    let mut inputs = vec![thermal_weights(photons, cutoff)];
    for &eps in epsilons {
        inputs.push(perturbed_weights(&Type1Perturbation::new(n, eps)?, photons, cutoff)?.0);
    }
    let ent = schmidt_entropies(cutoff, ch, quad.radial_nodes(), &inputs, 0.0);
    let ic: Vec<f64> = ent.iter().map(|(out, joint)| out - joint).collect();
    Ok(ic[1..].iter().map(|x| x - ic[0]).collect())
}

/// Least-squares fit `delta(epsilon) = linear * epsilon + quadratic * epsilon^2`
/// of oracle values.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonFit {
    pub quadratic: f64,
    pub linear: f64,
    /// `(epsilon, I_c(rho_epsilon) - I_c(rho))`.
    pub points: Vec<(f64, f64)>,
}

pub fn oracle_epsilon_fit(
    n: usize,
    photons: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
    epsilons: &[f64],
) -> Result<EpsilonFit> {
    if epsilons.len() < 2 || epsilons.iter().any(|&e| e == 0.0) {
        return Err(Error::Domain("the fit needs at least two non-zero epsilons".into()));
    }
    let d = oracle_delta_ics(n, photons, ch, cutoff, quad, epsilons)?;
    // normal equations for the basis (e, e^2)
    let (mut s2, mut s3, mut s4, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&e, &y) in epsilons.iter().zip(&d) {
        s2 += e * e;
        s3 += e * e * e;
        s4 += e * e * e * e;
        y1 += e * y;
        y2 += e * e * y;
    }
    let det = s2 * s4 - s3 * s3;
    if det.abs() <= 1e-300 {
        return Err(Error::Domain("epsilons do not determine a quadratic fit".into()));
    }
    Ok(EpsilonFit {
        quadratic: (s2 * y2 - s3 * y1) / det,
        linear: (s4 * y1 - s3 * y2) / det,
        points: epsilons.iter().copied().zip(d).collect(),
    })
}

fn check_thermal_cutoff(photons: f64, cutoff: usize) -> Result<()> {
    thermal_fock(photons, cutoff).map(|_| ())
}

/// Sums `term(k)` for `k <= cutoff`. The summands carry polynomial growth on
/// top of the thermal decay, so the part above the cutoff is measured on an
/// extended range and must stay below [`POLY_TAIL_TOL`].
fn truncated_sum(photons: f64, cutoff: usize, term: impl Fn(usize) -> f64) -> Result<f64> {
    check_thermal_cutoff(photons, cutoff)?;
    let ext = 2 * cutoff + 64;
    let terms: Vec<f64> = (0..=ext).map(&term).collect();
    // suffix[k] = sum of |terms| from k on
    let mut suffix = vec![0.0; ext + 2];
    for k in (0..=ext).rev() {
        suffix[k] = suffix[k + 1] + terms[k].abs();
    }
    let tail = suffix[cutoff + 1];
    if tail > POLY_TAIL_TOL {
        let suggested = (cutoff + 1..=ext).find(|&k| suffix[k + 1] <= 0.01 * POLY_TAIL_TOL).unwrap_or(ext);
        return Err(Error::Cutoff {
            cutoff,
            suggested,
            reason: format!("terms above the cutoff add up to {tail:.3e}"),
        });
    }
    Ok(terms[..=cutoff].iter().sum())
}

/// `Tr(a^dagger^l a^l phi) = sum_k k!/(k-l)! lambda_k xi_k` for the type-1
/// perturbation of order `n`.
pub fn type1_moment(n: usize, photons: f64, l: usize, cutoff: usize) -> Result<f64> {
    let xi = xi_eigenvalues(n, photons, 2 * cutoff + 64)?;
    let lam = thermal_weights(photons, 2 * cutoff + 64);
    truncated_sum(photons, cutoff, |k| {
        let falling: f64 = (0..l).map(|i| k.saturating_sub(i) as f64).product();
        falling * lam[k] * xi[k]
    })
}

/// `sum_k phi1_k phi2_k / lambda_k` for type-1 perturbations of orders `n1`, `n2`.
pub fn type1_interference(n1: usize, n2: usize, photons: f64, cutoff: usize) -> Result<f64> {
    let ext = 2 * cutoff + 64;
    let a = xi_eigenvalues(n1, photons, ext)?;
    let b = xi_eigenvalues(n2, photons, ext)?;
    let lam = thermal_weights(photons, ext);
    truncated_sum(photons, cutoff, |k| lam[k] * a[k] * b[k])
}

fn mode_operator_with(k: usize, l: usize, photons: f64, cutoff: usize, nodes: usize) -> DMatrix<f64> {
    let a = k.abs_diff(l);
    let len = cutoff + 1 - a.min(cutoff + 1);
    let mut sum = vec![0.0; len];
    let mut buf = vec![0.0; len];
    let rule = gauss_laguerre(nodes);
    let p = (k + l) as f64 / 2.0;
    for (&u, &lw) in rule.nodes.iter().zip(&rule.log_weights) {
        let t = u / (photons + 1.0);
        // e^{-(N + 1/2) t} t^p d(sqrt t) = e^{-u} [e^{t/2} t^p d(sqrt t)] / (N + 1) in u
        let log_scale = lw + 0.5 * t + p * t.ln() - (photons + 1.0).ln();
        diagonal_into(a, t.sqrt(), log_scale, &mut buf);
        for (s, b) in sum.iter_mut().zip(&buf) {
            *s += b;
        }
    }
    let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
    for (j, s) in sum.into_iter().enumerate() {
        if l >= k {
            m[(j + a, j)] = sign * s;
        } else {
            m[(j, j + a)] = s;
        }
    }
    m
}

/// Single-mode operator whose characteristic function is
/// `mu^k mu*^l chi_thermal(mu)`:
/// `A[m, n] = (-1)^{m-n} int dt e^{-(N+1/2) t} t^{(k+l)/2} d_{mn}(sqrt t)`,
/// non-zero only for `m - n = l - k`. `A_{00}` is the thermal state and
/// `A_{nn}` has diagonal `lambda_k xi_k`.
///
/// The integrand is a polynomial times `e^{-(N+1) t}`, so a Gauss–Laguerre
/// rule with enough nodes is exact; a doubled rule confirms it.
pub fn mode_operator(k: usize, l: usize, photons: f64, cutoff: usize) -> Result<DMatrix<f64>> {
    if !(photons > 0.0 && photons.is_finite()) {
        return Err(Error::Domain(format!("thermal photon number must be positive, got {photons}")));
    }
    let nodes = cutoff + k.max(l) + 2;
    let m = mode_operator_with(k, l, photons, cutoff, nodes);
    let check = mode_operator_with(k, l, photons, cutoff, 2 * nodes);
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let diff = (&m - check).amax();
    if diff > OPERATOR_DOUBLING_TOL * scale.max(1.0) {
        return Err(Error::Convergence(format!(
            "mode operator ({k}, {l}) moved by {diff:.3e} when the rule was doubled"
        )));
    }
    Ok(m)
}

/// Two-mode operator stored by total photon number `J`; block `J` has basis
/// `|n, J - n>` for `n` from `max(0, J - K)` to `min(J, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOperator {
    cutoff: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl PairOperator {
    fn range(cutoff: usize, total: usize) -> (usize, usize) {
        (total.saturating_sub(cutoff), total.min(cutoff))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn block(&self, total: usize) -> &DMatrix<Complex64> {
        &self.blocks[total]
    }

    /// `<m_a m_b| phi |n_a n_b>`; zero across different totals.
    pub fn get(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        let total = row.0 + row.1;
        let k = self.cutoff;
        if col.0 + col.1 != total || row.0.max(row.1).max(col.0).max(col.1) > k {
            return Complex64::new(0.0, 0.0);
        }
        let lo = Self::range(k, total).0;
        self.blocks[total][(row.0 - lo, col.0 - lo)]
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b - b.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// `Tr(phi^2 / (rho_N (x) rho_N))` over totals `J <= max_total`; the
    /// thermal product is `(1-v)^2 v^J` on block `J`.
    pub fn weighted_norm(&self, photons: f64, max_total: usize) -> f64 {
        let v = thermal_ratio(photons);
        self.blocks
            .iter()
            .enumerate()
            .take(max_total + 1)
            .map(|(j, b)| b.norm_squared() / ((1.0 - v).powi(2) * v.powi(j as i32)))
            .sum()
    }
}

/// `phi = c A_{k1 l1} (x) A_{k2 l2} + c* A_{l1 k1} (x) A_{l2 k2}` on two
/// thermal modes. Photon exchange keeps the total `J`, so only the diagonal
/// blocks of [`PairOperator`] are filled.
pub fn build_multimode_phi_fock(
    pert: &MultiModePerturbation<f64>,
    photons: f64,
    cutoff: usize,
) -> Result<PairOperator> {
    if pert.modes() != 2 {
        return Err(Error::Unsupported(format!(
            "the Fock builder handles two modes, got {}",
            pert.modes()
        )));
    }
    let m = pert.order();
    if m > MAX_MULTIMODE_ORDER {
        return Err(Error::Unsupported(format!("order {m} above {MAX_MULTIMODE_ORDER}")));
    }
    let margin = m + 4;
    if cutoff <= margin || thermal_ratio(photons).powi((cutoff - margin) as i32 + 1) >= THERMAL_TAIL_TOL {
        return Err(Error::Cutoff {
            cutoff,
            suggested: thermal_cutoff(photons) + margin,
            reason: format!("thermal tail above {THERMAL_TAIL_TOL:e} below the margin {margin}"),
        });
    }
    let (k, l, c) = (pert.k(), pert.l(), pert.c());
    let a1 = mode_operator(k[0], l[0], photons, cutoff)?;
    let a2 = mode_operator(k[1], l[1], photons, cutoff)?;
    let b1 = mode_operator(l[0], k[0], photons, cutoff)?;
    let b2 = mode_operator(l[1], k[1], photons, cutoff)?;
    let blocks = (0..=2 * cutoff)
        .map(|total| {
            let (lo, hi) = PairOperator::range(cutoff, total);
            let dim = hi + 1 - lo;
            DMatrix::from_fn(dim, dim, |i, j| {
                let (m1, n1) = (lo + i, lo + j);
                let (m2, n2) = (total - m1, total - n1);
                c * (a1[(m1, n1)] * a2[(m2, n2)]) + c.conj() * (b1[(m1, n1)] * b2[(m2, n2)])
            })
        })
        .collect();
    Ok(PairOperator { cutoff, blocks })
}

/// Single-mode `c mu^n (-mu*)^l` perturbation with its Hermitian partner,
/// `n != l`. It has no diagonal, so the eigenvalues of the thermal state do
/// not move at first order.
///
/// The partner is `c* (-1)^n mu^l mu*^n`, which is the plain complex
/// conjugate whenever `n - l` is even.
pub fn build_type2_phi_fock(
    n: usize,
    l: usize,
    c: Complex64,
    photons: f64,
    cutoff: usize,
) -> Result<DMatrix<Complex64>> {
    if n == l {
        return Err(Error::InvalidPerturbation("type-2 perturbations need n != l".into()));
    }
    check_thermal_cutoff(photons, cutoff)?;
    let sign = |p: usize| if p % 2 == 0 { 1.0 } else { -1.0 };
    let fwd = mode_operator(n, l, photons, cutoff)?;
    let back = mode_operator(l, n, photons, cutoff)?;
    Ok(fwd.map(|x| c * (sign(l) * x)) + back.map(|x| c.conj() * (sign(n) * x)))
}
