use nalgebra::DMatrix;
use num_complex::Complex64;

use super::quadrature::{channel_kernel, ChannelKernel, QuadratureScheme};
use super::state::{FockData, FockDensityMatrix, SectorMatrix};
use crate::error::Result;
use crate::math::ChannelParams;

/// Applies the additive Gaussian noise channel to a one-mode state, or to
/// mode Q (the first mode) of a two-mode state.
pub fn apply_channel_fock(
    rho: &FockDensityMatrix,
    ch: &ChannelParams<f64>,
    quad: &QuadratureScheme,
) -> Result<FockDensityMatrix> {
    let k = rho.cutoff();
    quad.ensure_converged(k, ch)?;
    let kernel = channel_kernel(k, ch, quad.radial_nodes());
    let data = match rho.data() {
        FockData::SingleMode(m) => FockData::SingleMode(single_mode(&kernel, m)),
        FockData::TwoMode(s) => FockData::TwoMode(on_first_mode(&kernel, s)),
    };
    let trace_in = rho.trace();
    let out = FockDensityMatrix::from_parts(k, data, 0.0);
    let lost = (trace_in - out.trace()).max(0.0);
    Ok(FockDensityMatrix::from_parts(k, out.data().clone(), rho.tail_mass() + lost))
}

pub(crate) fn single_mode(kernel: &ChannelKernel, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let k = kernel.cutoff() as i64;
    let dim = m.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    let mut src = Vec::with_capacity(dim);
    for delta in -k..=k {
        let off = delta.max(0) as usize;
        let back = (-delta).max(0) as usize;
        let len = dim - delta.unsigned_abs() as usize;
        src.clear();
        src.extend((0..len).map(|i| m[(i + off, i + back)]));
        if src.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let kb = kernel.block(delta);
        for qi in 0..len {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ni, z) in src.iter().enumerate() {
                acc += z * kb[(qi, ni)];
            }
            out[(qi + off, qi + back)] = acc;
        }
    }
    out
}

/// `out[(q,r),(q',r')] = sum_n K_{q-q'}[q,n] X[(n,r),(n-q+q',r')]`.
pub(crate) fn on_first_mode(kernel: &ChannelKernel, x: &SectorMatrix) -> SectorMatrix {
    let kc = x.cutoff();
    let shift = x.shift();
    let mut out = SectorMatrix::zeros(kc, shift);
    let mut src = Vec::with_capacity(kc + 1);
    for r in 0..=kc {
        for r2 in 0..=kc {
            let delta = r as i64 - r2 as i64 + shift;
            if delta.unsigned_abs() as usize > kc {
                continue;
            }
            let off = delta.max(0) as usize;
            let back = (-delta).max(0) as usize;
            let len = kc + 1 - delta.unsigned_abs() as usize;
            src.clear();
            src.extend((0..len).map(|i| x.get((i + off, r), (i + back, r2))));
            if src.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let kb = kernel.block(delta);
            for qi in 0..len {
                let (q, q2) = (qi + off, qi + back);
                let mut acc = Complex64::new(0.0, 0.0);
                for (ni, z) in src.iter().enumerate() {
                    acc += z * kb[(qi, ni)];
                }
                let d_row = q as i64 - r as i64;
                out.block_mut(d_row)[(q.min(r), q2.min(r2))] = acc;
            }
        }
    }
    out
}
