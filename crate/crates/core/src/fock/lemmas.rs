//! Numerical checks of the ladder-operator identities behind the
//! perturbation expansion.

use num_complex::Complex64;

use super::channel::on_first_mode;
use super::quadrature::{channel_kernel, QuadratureScheme};
use super::squeeze::purify_thermal;
use super::state::{sector_dim, sector_state, thermal_ratio, SectorMatrix};
use crate::error::{Error, Result};
use crate::math::ChannelParams;

const MAX_LADDER_POWER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    /// `(E (x) I)(a^dagger^k rho a^m) = v^{-(k+m)/2} b^k rho' b^dagger^m`
    Raising,
    /// `(E (x) I)(a^k rho a^dagger^m) = v^{(k+m)/2} b^dagger^k rho' b^m`
    Lowering,
}

impl Lemma {
    pub fn from_index(which: u32) -> Result<Self> {
        match which {
            1 => Ok(Lemma::Raising),
            2 => Ok(Lemma::Lowering),
            _ => Err(Error::Domain(format!("lemma must be 1 or 2, got {which}"))),
        }
    }
}

fn falling(n: usize, k: usize) -> f64 {
    // n! / (n-k)!
    (0..k).map(|i| (n - i) as f64).product()
}

/// `c^k |psi>` for the thermal purification, `c` acting on mode Q.
/// Returns the sector and amplitudes.
fn ladder_on_purification(amps: &[f64], k: usize, raise: bool, cutoff: usize) -> (i64, Vec<f64>) {
    let sector = if raise { k as i64 } else { -(k as i64) };
    let len = sector_dim(cutoff, sector);
    let v = (0..len)
        .map(|j| {
            // sector element j is |j + k, j> (raise) or |j, j + k> (lower)
            if raise {
                amps[j] * falling(j + k, k).sqrt()
            } else {
                amps[j + k] * falling(j + k, k).sqrt()
            }
        })
        .collect();
    (sector, v)
}

fn outer(cutoff: usize, (s1, u): (i64, Vec<f64>), (s2, w): (i64, Vec<f64>)) -> SectorMatrix {
    let mut x = SectorMatrix::zeros(cutoff, s1 - s2);
    let blk = x.block_mut(s1);
    for (i, a) in u.iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            blk[(i, j)] = Complex64::new(a * b, 0.0);
        }
    }
    x
}

/// `b^k X b^dagger^m` (raise = false) or `b^dagger^k X b^m` (raise = true).
fn ladder_on_reference(x: &SectorMatrix, k: usize, m: usize, raise: bool) -> SectorMatrix {
    let kc = x.cutoff();
    let shift = if raise { x.shift() - k as i64 + m as i64 } else { x.shift() + k as i64 - m as i64 };
    let mut out = SectorMatrix::zeros(kc, shift);
    for d in out.deltas() {
        let (rows, cols) = (sector_dim(kc, d), sector_dim(kc, d - shift));
        for i in 0..rows {
            let (q, r) = sector_state(d, i);
            for j in 0..cols {
                let (q2, r2) = sector_state(d - shift, j);
                let z = if raise {
                    if r < k || r2 < m {
                        continue;
                    }
                    x.get((q, r - k), (q2, r2 - m)) * (falling(r, k) * falling(r2, m)).sqrt()
                } else {
                    x.get((q, r + k), (q2, r2 + m)) * (falling(r + k, k) * falling(r2 + m, m)).sqrt()
                };
                out.block_mut(d)[(i, j)] = z;
            }
        }
    }
    out
}

/// Largest entrywise deviation between the two sides of Lemma 1 or 2 on
/// states with at most `cutoff - margin` photons in total.
pub fn verify_lemma_with_margin(
    which: Lemma,
    k: usize,
    m: usize,
    n: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    margin: usize,
    quad: &QuadratureScheme,
) -> Result<f64> {
    if k > MAX_LADDER_POWER || m > MAX_LADDER_POWER {
        return Err(Error::Domain(format!("ladder powers must be at most {MAX_LADDER_POWER}")));
    }
    if margin < k + m + 4 || margin >= cutoff {
        return Err(Error::Domain(format!(
            "margin {margin} must be at least k + m + 4 = {} and below the cutoff",
            k + m + 4
        )));
    }
    if n <= 0.0 {
        return Err(Error::Domain(format!("thermal photon number must be positive, got {n}")));
    }
    quad.ensure_converged(cutoff, ch)?;
    let kernel = channel_kernel(cutoff, ch, quad.radial_nodes());
    let amps: Vec<f64> = purify_thermal(n, cutoff)?.amplitudes().iter().copied().collect();
    let raise = which == Lemma::Raising;

    let x = outer(
        cutoff,
        ladder_on_purification(&amps, k, raise, cutoff),
        ladder_on_purification(&amps, m, raise, cutoff),
    );
    let lhs = on_first_mode(&kernel, &x);

    let joint = on_first_mode(&kernel, &outer(cutoff, (0, amps.clone()), (0, amps)));
    let mut rhs = ladder_on_reference(&joint, k, m, !raise);
    let v = thermal_ratio(n);
    let power = (k + m) as f64 / 2.0;
    rhs.scale(if raise { v.powf(-power) } else { v.powf(power) });
    Ok(lhs.max_abs_diff_within(&rhs, cutoff - margin))
}

/// [`verify_lemma_with_margin`] with margin `max(10, k + m + 4)`.
pub fn verify_lemma(
    which: u32,
    k: usize,
    m: usize,
    n: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
) -> Result<f64> {
    let margin = (k + m + 4).max(10);
    verify_lemma_with_margin(Lemma::from_index(which)?, k, m, n, ch, cutoff, margin, quad)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `d^i lambda_k / dN^i` for `lambda_k = N^k (N+1)^{-k-1}` by Leibniz on the
/// two factors.
fn thermal_derivative(k: usize, i: usize, n: f64) -> f64 {
    let lam = n.powi(k as i32) * (n + 1.0).powi(-(k as i32) - 1);
    (0..=i.min(k))
        .map(|l| {
            let from_power = falling(k, l) * n.powi(-(l as i32));
            let rest = i - l;
            let rising: f64 = (0..rest).map(|t| (k + 1 + t) as f64).product();
            let sign = if rest % 2 == 0 { 1.0 } else { -1.0 };
            binomial(i, l) * from_power * sign * rising * (n + 1.0).powi(-(rest as i32))
        })
        .sum::<f64>()
        * lam
}

/// Largest deviation over the thermal diagonal (up to `cutoff - j - 4`) in
/// `a^dagger^j a^j rho = N^j sum_i (j!/i!) C(j,i) (N+1)^i d^i rho / dN^i`
/// and its companion `a^j a^dagger^j rho = (N+1)^j sum_i (j!/i!) C(j,i) N^i d^i rho / dN^i`.
pub fn verify_lemma3(j: usize, n: f64, cutoff: usize) -> Result<f64> {
    if j > MAX_LADDER_POWER {
        return Err(Error::Domain(format!("j must be at most {MAX_LADDER_POWER}")));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain(format!("thermal photon number must be positive, got {n}")));
    }
    if cutoff < j + 5 {
        return Err(Error::Cutoff {
            cutoff,
            suggested: j + 5,
            reason: "no diagonal entries left after the margin".into(),
        });
    }
    let jf = falling(j, j);
    let mut worst = 0.0f64;
    for k in 0..=cutoff - j - 4 {
        let lam = n.powi(k as i32) * (n + 1.0).powi(-(k as i32) - 1);
        let lhs1 = if k >= j { falling(k, j) * lam } else { 0.0 };
        let lhs2 = falling(k + j, j) * lam;
        let (mut rhs1, mut rhs2) = (0.0, 0.0);
        for i in 0..=j {
            let c = jf / falling(i, i) * binomial(j, i) * thermal_derivative(k, i, n);
            rhs1 += c * (n + 1.0).powi(i as i32);
            rhs2 += c * n.powi(i as i32);
        }
        rhs1 *= n.powi(j as i32);
        rhs2 *= (n + 1.0).powi(j as i32);
        worst = worst.max((lhs1 - rhs1).abs()).max((lhs2 - rhs2).abs());
    }
    Ok(worst)
}
