//! Two-mode squeezing, the 50:50 beam splitter and thermal purification.
//!
//! Both unitaries are exponentials of a real antisymmetric tridiagonal
//! generator on an invariant chain of Fock states: photon-number difference
//! sectors for `S_2(r) = exp[r(a^dagger b^dagger - ab)]` and total-number
//! sectors for the beam splitter.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::{
    check_photons, sector_dim, sector_state, thermal_cutoff, thermal_product, thermal_ratio,
    thermal_weights,
    FockDensityMatrix, SectorMatrix, THERMAL_TAIL_TOL,
};
use crate::error::{Error, Result};

/// Norm lost above the cutoff that a squeeze may report without failing.
pub const LEAKAGE_BUDGET: f64 = 1e-8;
pub const MAX_SQUEEZING: f64 = 3.0;

const BOUNDARY_ROWS: usize = 8;
const BOUNDARY_TOL: f64 = 1e-22;

/// Two-mode pure state supported on a single difference sector.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    cutoff: usize,
    sector: i64,
    amplitudes: DVector<f64>,
}

impl TwoModeVector {
    pub fn new(cutoff: usize, sector: i64, amplitudes: DVector<f64>) -> Result<Self> {
        let dim = sector_dim(cutoff, sector);
        if dim == 0 || amplitudes.len() != dim {
            return Err(Error::Domain(format!(
                "sector {sector} at cutoff {cutoff} has dimension {dim}, got {} amplitudes",
                amplitudes.len()
            )));
        }
        Ok(Self { cutoff, sector, amplitudes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn sector(&self) -> i64 {
        self.sector
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    /// Amplitude of `|n_a, n_b>`.
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a as i64 - n_b as i64 != self.sector || n_a.max(n_b) > self.cutoff {
            return 0.0;
        }
        self.amplitudes[n_a.min(n_b)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `|psi><psi|` as a two-mode density matrix; the missing norm becomes
    /// the tail mass.
    pub fn projector(&self) -> FockDensityMatrix {
        let mut s = SectorMatrix::zeros(self.cutoff, 0);
        let a = self.amplitudes.map(|x| Complex64::new(x, 0.0));
        *s.block_mut(self.sector) = &a * a.transpose();
        FockDensityMatrix::from_parts(
            self.cutoff,
            super::state::FockData::TwoMode(s),
            (1.0 - self.norm_squared()).abs(),
        )
    }
}

/// `sum_k sqrt(lambda_k) |k, k>` for the thermal state with `N` photons.
pub fn purify_thermal(n: f64, cutoff: usize) -> Result<TwoModeVector> {
    check_photons(n)?;
    let tail = thermal_ratio(n).powi(cutoff as i32 + 1);
    if cutoff < 1 || tail >= THERMAL_TAIL_TOL {
        return Err(Error::Cutoff {
            cutoff,
            suggested: thermal_cutoff(n),
            reason: format!("thermal tail {tail:.3e} above {THERMAL_TAIL_TOL:e}"),
        });
    }
    let amps = thermal_weights(n, cutoff).into_iter().map(f64::sqrt);
    TwoModeVector::new(cutoff, 0, DVector::from_iterator(cutoff + 1, amps))
}

/// Mean photon number of each mode of `S_2(r)(thermal(N) (x) thermal(N))S_2^dagger`.
pub fn squeezed_pair_photons(n: f64, r: f64) -> f64 {
    n * (2.0 * r).cosh() + r.sinh().powi(2)
}

/// Automatic cutoff for [`squeezed_thermal_pair`]: each mode is thermal with
/// [`squeezed_pair_photons`] photons.
pub fn squeezed_pair_cutoff(n: f64, r: f64) -> usize {
    thermal_cutoff(squeezed_pair_photons(n, r))
}

/// Two-mode squeezed thermal state `S_2(r)(thermal(N) (x) thermal(N))S_2^dagger`.
pub fn squeezed_thermal_pair(n: f64, r: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    let prod = thermal_product(n, n, cutoff)?;
    let out = two_mode_squeeze_state(&prod, r)?.state;
    let tail = thermal_ratio(squeezed_pair_photons(n, r)).powi(cutoff as i32 + 1);
    if tail >= THERMAL_TAIL_TOL {
        return Err(Error::Cutoff {
            cutoff,
            suggested: squeezed_pair_cutoff(n, r),
            reason: format!("marginal tail {tail:.3e} above {THERMAL_TAIL_TOL:e}"),
        });
    }
    Ok(out)
}

/// Result of a truncated squeeze with the norm it pushed above the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct Squeezed<S> {
    pub state: S,
    pub leakage: f64,
}

pub trait TwoModeSqueeze: Sized {
    fn two_mode_squeeze(&self, r: f64) -> Result<Squeezed<Self>>;
}

/// Applies `S_2(r)`; errors if more than [`LEAKAGE_BUDGET`] of the norm
/// leaves the truncated space.
pub fn two_mode_squeeze_state<S: TwoModeSqueeze>(state: &S, r: f64) -> Result<Squeezed<S>> {
    state.two_mode_squeeze(r)
}

fn check_squeezing(r: f64) -> Result<()> {
    if !r.is_finite() || r.abs() > MAX_SQUEEZING {
        return Err(Error::Domain(format!("|r| must be at most {MAX_SQUEEZING}, got {r}")));
    }
    Ok(())
}

fn check_leakage(cutoff: usize, r: f64, leakage: f64) -> Result<()> {
    if leakage > LEAKAGE_BUDGET {
        return Err(Error::Cutoff {
            cutoff,
            suggested: ((cutoff as f64) * (2.0 * r).cosh()).ceil() as usize + 1,
            reason: format!("squeezing leaked {leakage:.3e} of the norm above the cutoff"),
        });
    }
    Ok(())
}

impl TwoModeSqueeze for TwoModeVector {
    fn two_mode_squeeze(&self, r: f64) -> Result<Squeezed<Self>> {
        check_squeezing(r)?;
        let weights: Vec<f64> = self.amplitudes.iter().map(|a| a * a).collect();
        let u = sector_squeezer(self.cutoff, self.sector, r, &weights);
        let amplitudes = &u * &self.amplitudes;
        let leakage = (self.norm_squared() - amplitudes.norm_squared()).max(0.0);
        check_leakage(self.cutoff, r, leakage)?;
        Ok(Squeezed { state: Self { amplitudes, ..self.clone() }, leakage })
    }
}

impl TwoModeSqueeze for FockDensityMatrix {
    fn two_mode_squeeze(&self, r: f64) -> Result<Squeezed<Self>> {
        check_squeezing(r)?;
        let s = self
            .sectors()
            .ok_or_else(|| Error::Domain("two-mode squeezing needs a two-mode state".into()))?;
        let k = s.cutoff();
        let mut out = SectorMatrix::zeros(k, 0);
        for d in s.deltas() {
            let b = s.block(d);
            if b.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let weights: Vec<f64> = b.diagonal().iter().map(|z| z.re.abs()).collect();
            let u = sector_squeezer(k, d, r, &weights).map(|x| Complex64::new(x, 0.0));
            *out.block_mut(d) = &u * b * u.transpose();
        }
        let state = FockDensityMatrix::from_parts(k, super::state::FockData::TwoMode(out), 0.0);
        let leakage = (self.trace() - state.trace()).max(0.0);
        check_leakage(k, r, leakage)?;
        let state = FockDensityMatrix::from_parts(
            k,
            state.data().clone(),
            self.tail_mass() + leakage,
        );
        Ok(Squeezed { state, leakage })
    }
}

/// `exp(t G)` for the `L x L` generator with `G[j+1, j] = c_j`,
/// `G[j, j+1] = -c_j`.
///
/// With `D = diag(i^j)` one has `G = i D^-1 T D` for the symmetric `T`
/// carrying the same off-diagonal, so `exp(tG) = D^-1 exp(itT) D` and the
/// entries are cosine or sine sums over the spectrum of `T` depending on the
/// parity of `j - k`.
pub(crate) fn chain_exponential(c: &[f64], t: f64) -> DMatrix<f64> {
    let l = c.len() + 1;
    if t == 0.0 || l == 1 {
        return DMatrix::identity(l, l);
    }
    let mut tri = DMatrix::<f64>::zeros(l, l);
    for (j, &cj) in c.iter().enumerate() {
        tri[(j + 1, j)] = cj;
        tri[(j, j + 1)] = cj;
    }
    let eig = tri.symmetric_eigen();
    let v = &eig.eigenvectors;
    let cos = v * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| (t * x).cos())) * v.transpose();
    let sin = v * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| (t * x).sin())) * v.transpose();
    DMatrix::from_fn(l, l, |j, k| {
        let p = j as i64 - k as i64;
        let sign = if p.div_euclid(2) % 2 == 0 { 1.0 } else { -1.0 };
        if p % 2 == 0 {
            sign * cos[(j, k)]
        } else {
            sign * sin[(j, k)]
        }
    })
}

/// Truncated `S_2(r)` on difference sector `delta`, `len x len`.
///
/// The chain is infinite; it is cut at a padded length that grows until the
/// columns weighted by `weights` (probabilities, so the bound is absolute)
/// put no more than `BOUNDARY_TOL` near the artificial end.
pub(crate) fn sector_squeezer(cutoff: usize, delta: i64, r: f64, weights: &[f64]) -> DMatrix<f64> {
    let len = sector_dim(cutoff, delta);
    if r == 0.0 {
        return DMatrix::identity(len, len);
    }
    let (pa, pb) = sector_state(delta, 0);
    let coupling = |j: usize| (((j + pa + 1) * (j + pb + 1)) as f64).sqrt();
    let cap = 8 * len + 64;
    let mut l = len + (len / 2).max(16);
    loop {
        let c: Vec<f64> = (0..l - 1).map(coupling).collect();
        let u = chain_exponential(&c, r);
        let boundary: f64 = weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * (l - BOUNDARY_ROWS..l).map(|i| u[(i, k)].powi(2)).sum::<f64>())
            .sum();
        if boundary <= BOUNDARY_TOL || l >= cap {
            return u.view((0, 0), (len, len)).into_owned();
        }
        l = (2 * l).min(cap);
    }
}

/// 50:50 beam splitter `exp[(pi/4)(a^dagger b - a b^dagger)]` on the
/// total-number sector `J`, basis `|n, J - n>` indexed by `n`.
pub(crate) fn beam_splitter_sector(total: usize) -> DMatrix<f64> {
    let c: Vec<f64> = (0..total).map(|n| (((n + 1) * (total - n)) as f64).sqrt()).collect();
    chain_exponential(&c, std::f64::consts::FRAC_PI_4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squeezed_vacuum_coefficients() {
        let vac = TwoModeVector::new(40, 0, DVector::from_fn(41, |i, _| if i == 0 { 1.0 } else { 0.0 }))
            .unwrap();
        let r = 0.7;
        let out = two_mode_squeeze_state(&vac, r).unwrap();
        for k in 0..20 {
            let want = r.tanh().powi(k as i32) / r.cosh();
            assert!((out.state.amplitude(k, k) - want).abs() < 1e-13, "k={k}");
        }
        assert!(out.leakage < 1e-8);
    }

    #[test]
    fn inverse_on_safe_subspace() {
        // columns up to 12 keep their weight well inside K = 60
        let k = 60;
        for delta in [-3i64, 0, 2] {
            let len = sector_dim(k, delta);
            let w: Vec<f64> = (0..len).map(|j| if j <= 12 { 1.0 } else { 0.0 }).collect();
            let prod = sector_squeezer(k, delta, -0.4, &w) * sector_squeezer(k, delta, 0.4, &w);
            for i in 0..=12 {
                for j in 0..=12 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)] - want).abs() < 1e-10, "{delta} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn zero_is_identity() {
        let psi = purify_thermal(0.5, 40).unwrap();
        let out = two_mode_squeeze_state(&psi, 0.0).unwrap();
        assert_eq!(out.state, psi);
        assert_eq!(out.leakage, 0.0);
    }

    #[test]
    fn too_much_squeezing() {
        let psi = purify_thermal(0.5, 40).unwrap();
        assert!(matches!(two_mode_squeeze_state(&psi, 3.5), Err(Error::Domain(_))));
        assert!(matches!(two_mode_squeeze_state(&psi, 2.5), Err(Error::Cutoff { .. })));
    }

    #[test]
    fn purification_marginals() {
        let psi = purify_thermal(1.0, 40).unwrap();
        assert!(1.0 - psi.norm_squared() < 1e-12);
        let rho = psi.projector();
        for mode in 0..2 {
            let p = rho.photon_distribution(mode).unwrap();
            for (k, pk) in p.iter().enumerate() {
                assert!((pk / 0.5f64.powi(k as i32 + 1) - 1.0).abs() < 1e-14);
            }
        }
        assert_eq!(purify_thermal(0.0, 3).unwrap().amplitude(0, 0), 1.0);
    }

    #[test]
    fn beam_splitter_splits_one_photon() {
        let u = beam_splitter_sector(1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(0, 0)] - h).abs() < 1e-15);
        assert!((u[(1, 0)] - h).abs() < 1e-15);
        assert!((u[(0, 1)] + h).abs() < 1e-15);
        // |1,1> leaves both photons in the same port
        let u = beam_splitter_sector(2);
        assert!(u[(1, 1)].abs() < 1e-14);
        assert!((u[(2, 1)].abs() - h).abs() < 1e-14);
        assert!((u[(0, 1)].abs() - h).abs() < 1e-14);
        assert!((&u * u.transpose() - DMatrix::identity(3, 3)).norm() < 1e-13);
    }
}
