//! Polar quadrature of the random-displacement integral and the channel
//! kernels built from it.
//!
//! With `alpha = s e^{i theta}` the channel output is
//! `rho'_{qq'} = sum_{nn'} rho_{nn'} E[d_{qn}(s) d_{q'n'}(s) e^{i((q-n)-(q'-n'))theta}]`
//! where `|alpha|^2` is exponential with mean `N_n`. The radial expectation
//! is a Gauss–Laguerre sum in `u = (1 + N_n) |alpha|^2 / N_n`, exact once the
//! rule has `K + 1` nodes; the phase average is an `M`-point trapezoid, exact
//! once `M > 2K`.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use super::displacement;
use super::laguerre::gauss_laguerre;
use crate::error::{Error, Result};
use crate::math::ChannelParams;

/// Certificate tolerance: trace-norm change of the probe output when both
/// node counts are doubled.
pub const CERTIFICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub cutoff: usize,
    pub noise_photons: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureScheme {
    radial_nodes: usize,
    angular_nodes: usize,
    certificate: Option<Certificate>,
}

impl QuadratureScheme {
    pub fn new(radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if radial_nodes == 0 || angular_nodes == 0 {
            return Err(Error::Domain("quadrature needs at least one node per axis".into()));
        }
        Ok(Self { radial_nodes, angular_nodes, certificate: None })
    }

    /// `K + 2` radial and `2K + 1` angular nodes, uncertified.
    pub fn for_cutoff(cutoff: usize) -> Self {
        Self { radial_nodes: cutoff + 2, angular_nodes: 2 * cutoff + 1, certificate: None }
    }

    /// [`QuadratureScheme::for_cutoff`] with its doubling certificate.
    pub fn certified(cutoff: usize, ch: &ChannelParams<f64>) -> Result<Self> {
        Self::for_cutoff(cutoff).certify(cutoff, ch)
    }

    /// Runs the doubling probe at this cutoff and records the residual.
    pub fn certify(self, cutoff: usize, ch: &ChannelParams<f64>) -> Result<Self> {
        let residual = doubling_residual(&self, cutoff, ch);
        if !(residual < CERTIFICATE_TOL) {
            return Err(Error::Convergence(format!(
                "doubling ({}, {}) nodes moved the probe by {residual:.3e} in trace norm at cutoff {cutoff}",
                self.radial_nodes, self.angular_nodes
            )));
        }
        Ok(Self {
            certificate: Some(Certificate { cutoff, noise_photons: ch.noise_photons(), residual }),
            ..self
        })
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    /// Errors unless the scheme is usable on the fast (alias-free) path at
    /// this cutoff. Uncertified schemes are certified on the spot.
    pub(crate) fn ensure_converged(&self, cutoff: usize, ch: &ChannelParams<f64>) -> Result<()> {
        if self.angular_nodes <= 2 * cutoff {
            return Err(Error::Convergence(format!(
                "{} phase nodes alias coherences at cutoff {cutoff}; need more than {}",
                self.angular_nodes,
                2 * cutoff
            )));
        }
        match self.certificate {
            Some(c) if c.cutoff >= cutoff && c.noise_photons == ch.noise_photons() => Ok(()),
            _ => self.certify(cutoff, ch).map(|_| ()),
        }
    }
}

/// Radial nodes for the channel with noise `N_n`: `(s_i, ln W_i)` where
/// `W_i` already carries the `e^{|alpha|^2}` that undoes the Gaussian
/// factor inside the displacement matrix elements.
pub(crate) fn radial_nodes(n: usize, ch: &ChannelParams<f64>) -> Vec<(f64, f64)> {
    radial_nodes_for_width(n, ch.noise_photons())
}

/// Same as [`radial_nodes`] for an exponential weight `e^{-t/width}/width`
/// in `t = |alpha|^2`.
pub(crate) fn radial_nodes_for_width(n: usize, width: f64) -> Vec<(f64, f64)> {
    let rule = gauss_laguerre(n);
    let scale = width / (1.0 + width);
    rule.nodes
        .iter()
        .zip(&rule.log_weights)
        .map(|(&u, &lw)| {
            let t = scale * u;
            (t.sqrt(), lw + t - (1.0 + width).ln())
        })
        .collect()
}

/// Output of the channel on the superposition of `|0>`, `|K/2>` and `|K>`
/// under `(radial, angular)` nodes, with the trapezoid aliasing kept.
fn probe_output(cutoff: usize, radial: usize, angular: usize, ch: &ChannelParams<f64>) -> DMatrix<f64> {
    let dim = cutoff + 1;
    let support = [0, cutoff / 2, cutoff];
    let amp = 1.0 / 3f64.sqrt();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    let m = angular as i64;
    for (s, lw) in radial_nodes(radial, ch) {
        let d = displacement::matrix(cutoff, s, 0.5 * lw);
        for &n in &support {
            for &n2 in &support {
                for q in 0..dim {
                    let a = d[q * dim + n] * amp * amp;
                    if a == 0.0 {
                        continue;
                    }
                    for q2 in 0..dim {
                        let phase = (q as i64 - n as i64) - (q2 as i64 - n2 as i64);
                        if phase.rem_euclid(m) == 0 {
                            out[(q, q2)] += a * d[q2 * dim + n2];
                        }
                    }
                }
            }
        }
    }
    out
}

fn doubling_residual(scheme: &QuadratureScheme, cutoff: usize, ch: &ChannelParams<f64>) -> f64 {
    let a = probe_output(cutoff, scheme.radial_nodes, scheme.angular_nodes, ch);
    let b = probe_output(cutoff, 2 * scheme.radial_nodes, 2 * scheme.angular_nodes, ch);
    let diff = a - b;
    let diff = 0.5 * (&diff + diff.transpose());
    diff.symmetric_eigenvalues().iter().map(|v| v.abs()).sum()
}

/// Channel restricted to one coherence order: `rho'_{q, q-D} =
/// sum_n K_D[q, n] rho_{n, n-D}`.
#[derive(Debug)]
pub(crate) struct ChannelKernel {
    cutoff: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl ChannelKernel {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Kernel for coherence order `delta`. Rows index `q - max(delta, 0)`,
    /// columns index `n - max(delta, 0)`.
    pub fn block(&self, delta: i64) -> &DMatrix<f64> {
        &self.blocks[(delta + self.cutoff as i64) as usize]
    }

    fn build(cutoff: usize, ch: &ChannelParams<f64>, radial: usize) -> Self {
        let dim = cutoff + 1;
        let k = cutoff as i64;
        let mut acc: Vec<Vec<f64>> = (-k..=k)
            .map(|d| {
                let len = dim - d.unsigned_abs() as usize;
                vec![0.0; len * len]
            })
            .collect();
        for (s, lw) in radial_nodes(radial, ch) {
            let m = displacement::matrix(cutoff, s, 0.5 * lw);
            for delta in -k..=k {
                let len = dim - delta.unsigned_abs() as usize;
                let off = delta.max(0) as usize;
                let back = (-delta).max(0) as usize;
                let blk = &mut acc[(delta + k) as usize];
                for qi in 0..len {
                    let row_a = &m[(qi + off) * dim + off..(qi + off) * dim + off + len];
                    let row_b = &m[(qi + back) * dim + back..(qi + back) * dim + back + len];
                    let out = &mut blk[qi * len..(qi + 1) * len];
                    for ((o, &x), &y) in out.iter_mut().zip(row_a).zip(row_b) {
                        *o += x * y;
                    }
                }
            }
        }
        let blocks = acc
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let len = dim - (i as i64 - k).unsigned_abs() as usize;
                DMatrix::from_row_slice(len, len, &v)
            })
            .collect();
        Self { cutoff, blocks }
    }
}

type KernelKey = (usize, u64, usize);

/// Kernels are the expensive part of every channel application; a few recent
/// ones are kept around.
pub(crate) fn channel_kernel(cutoff: usize, ch: &ChannelParams<f64>, radial: usize) -> Arc<ChannelKernel> {
    static CACHE: OnceLock<Mutex<VecDeque<(KernelKey, Arc<ChannelKernel>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(VecDeque::new()));
    let key = (cutoff, ch.noise_photons().to_bits(), radial);
    if let Some((_, k)) = cache.lock().unwrap().iter().find(|(kk, _)| *kk == key) {
        return k.clone();
    }
    let kernel = Arc::new(ChannelKernel::build(cutoff, ch, radial));
    let mut guard = cache.lock().unwrap();
    guard.push_front((key, kernel.clone()));
    guard.truncate(3);
    kernel
}

/// `U[j, i] = sqrt(W_i) d_{j+a, j}(s_i)` for `j = 0..=K-a`.
pub(crate) fn diagonal_kernel_vectors(
    cutoff: usize,
    a: usize,
    nodes: &[(f64, f64)],
) -> DMatrix<f64> {
    let len = cutoff + 1 - a;
    let mut u = DMatrix::<f64>::zeros(len, nodes.len());
    let mut buf = vec![0.0; len];
    for (i, &(s, lw)) in nodes.iter().enumerate() {
        displacement::diagonal_into(a, s, 0.5 * lw, &mut buf);
        u.set_column(i, &DVector::from_column_slice(&buf));
    }
    u
}
