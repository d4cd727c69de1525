//! Coherent information by brute force: purify, send the system half
//! through the channel, diagonalize.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::channel::single_mode;
use super::entropy::{entropy_bits, von_neumann_entropy, EIGENVALUE_FLOOR};
use super::quadrature::{
    channel_kernel, diagonal_kernel_vectors, radial_nodes, ChannelKernel, QuadratureScheme,
};
use super::squeeze::{beam_splitter_sector, purify_thermal, two_mode_squeeze_state};
use super::state::{
    hermitian_eigenvalues, sector_state, thermal_product, FockData, FockDensityMatrix, SectorMatrix,
};
use crate::error::{Error, Result};
use crate::gaussian::thermal_decomposition;
use crate::math::{bosonic_entropy, ChannelParams};

/// Trace distance allowed between the two joint-state constructions, and
/// between their entropy and the symplectic value.
pub const JOINT_AGREEMENT_TOL: f64 = 1e-6;
/// Largest input trace deficit the oracle accepts.
pub const TRACE_DEFICIT_TOL: f64 = 1e-10;

/// Purification weight dropped from a non-diagonal single-mode input.
const ENSEMBLE_TAIL: f64 = 1e-7;
/// Two-mode eigen-weight dropped before the beam splitter.
const PAIR_ENSEMBLE_TAIL: f64 = 1e-10;
/// Marginal tail allowed above the cutoff of a decoupled mode.
const DECOUPLED_TAIL: f64 = 1e-10;
const PRODUCT_TOL: f64 = 1e-6;
const STRUCTURAL_ZERO: f64 = 1e-13;
const CHUNK: usize = 16;

/// Both constructions of the joint output state: the channel applied to the
/// purification, and `S_2(r)(rho_A (x) rho_B)S_2^dagger` from the thermal
/// decomposition.
pub fn joint_output_constructions(
    n: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
) -> Result<(FockDensityMatrix, FockDensityMatrix)> {
    let via_channel = super::apply_channel_fock(&purify_thermal(n, cutoff)?.projector(), ch, quad)?;

    let d = thermal_decomposition(n, ch)?;
    let prod = thermal_product(d.na, d.nb, cutoff)?;
    let direct = two_mode_squeeze_state(&prod, d.r)?.state;
    Ok((via_channel, direct))
}

/// Joint state of channel output and reference for a thermal input.
///
/// Errors with [`Error::Inconsistency`] when the two constructions differ by
/// more than [`JOINT_AGREEMENT_TOL`] in trace distance, or when the entropy
/// misses `g(N_A) + g(N_B)` by more than the same amount.
pub fn joint_output_state(
    n: f64,
    ch: &ChannelParams<f64>,
    cutoff: usize,
    quad: &QuadratureScheme,
) -> Result<FockDensityMatrix> {
    let (a, b) = joint_output_constructions(n, ch, cutoff, quad)?;
    let dist = a.trace_distance(&b)?;
    if dist > JOINT_AGREEMENT_TOL {
        return Err(Error::Inconsistency(format!(
            "joint-state constructions differ by {dist:.3e} in trace distance at cutoff {cutoff}"
        )));
    }
    let d = thermal_decomposition(n, ch)?;
    let want = bosonic_entropy(d.na)? + bosonic_entropy(d.nb)?;
    let got = von_neumann_entropy(&a);
    if (got - want).abs() > JOINT_AGREEMENT_TOL {
        return Err(Error::Inconsistency(format!(
            "joint entropy {got} differs from g(N_A) + g(N_B) = {want}"
        )));
    }
    Ok(a)
}

/// `I_c = S(E(rho)) - S((E (x) I)(psi))` for a one- or two-mode input.
///
/// Diagonal single-mode inputs use their Schmidt purification directly.
/// Other single-mode inputs are purified through their eigen-ensemble.
/// Two-mode inputs (the channel acting on each mode) must become a product
/// under a 50:50 beam splitter, which commutes with two identical copies of
/// the channel; the two halves are then handled as single modes.
pub fn coherent_info_oracle(
    rho: &FockDensityMatrix,
    ch: &ChannelParams<f64>,
    quad: &QuadratureScheme,
) -> Result<f64> {
    let deficit = (1.0 - rho.trace()).abs();
    if deficit >= TRACE_DEFICIT_TOL {
        return Err(Error::Domain(format!(
            "input trace deficit {deficit:.3e} is not below {TRACE_DEFICIT_TOL:e}"
        )));
    }
    match rho.data() {
        FockData::SingleMode(m) => single_mode_ic(m, ch, quad),
        FockData::TwoMode(s) => two_mode_ic(s, ch, quad),
    }
}

fn single_mode_ic(m: &DMatrix<Complex64>, ch: &ChannelParams<f64>, quad: &QuadratureScheme) -> Result<f64> {
    let k = m.nrows() - 1;
    quad.ensure_converged(k, ch)?;
    match coherence_period(m) {
        None => {
            let lam: Vec<f64> = m.diagonal().iter().map(|z| z.re.max(0.0)).collect();
            let (out, joint) =
                schmidt_entropies(k, ch, quad.radial_nodes(), &[lam], EIGENVALUE_FLOOR).remove(0);
            Ok(out - joint)
        }
        Some(p) => {
            let kernel = channel_kernel(k, ch, quad.radial_nodes());
            Ok(ensemble_ic(m, p, &kernel))
        }
    }
}

/// gcd of the coherence orders present, or `None` for a diagonal matrix.
fn coherence_period(m: &DMatrix<Complex64>) -> Option<usize> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut p = 0usize;
    for i in 0..m.nrows() {
        for j in 0..i {
            if m[(i, j)].norm() > STRUCTURAL_ZERO * scale {
                p = gcd(p, i - j);
                if p == 1 {
                    return Some(1);
                }
            }
        }
    }
    (p > 0).then_some(p)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Output and joint entropies (bits) for diagonal inputs `lambda`, sharing
/// the kernel work across inputs.
///
/// With `|psi> = sum_r sqrt(lambda_r) |r, r>` the joint output is block
/// diagonal in `q - r`; block `+a` is `B_a` with `B_a = U_a U_a^T`,
/// `U_a[j, i] = sqrt(W_i) d_{j+a, j}(s_i)`, scaled by `sqrt(lambda_r lambda_r')`,
/// and block `-a` reuses `B_a` with the weights shifted by `a`.
pub(crate) fn schmidt_entropies(
    cutoff: usize,
    ch: &ChannelParams<f64>,
    radial: usize,
    inputs: &[Vec<f64>],
    floor: f64,
) -> Vec<(f64, f64)> {
    let nodes = radial_nodes(radial, ch);
    let roots: Vec<Vec<f64>> = inputs.iter().map(|l| l.iter().map(|x| x.max(0.0).sqrt()).collect()).collect();
    let mut joint = vec![0.0; inputs.len()];
    let mut out_diag = vec![vec![0.0; cutoff + 1]; inputs.len()];
    for a in 0..=cutoff {
        let u = diagonal_kernel_vectors(cutoff, a, &nodes);
        let b = &u * u.transpose();
        let len = b.nrows();
        for (idx, sq) in roots.iter().enumerate() {
            let plus = DMatrix::from_fn(len, len, |r, s| b[(r, s)] * sq[r] * sq[s]);
            for r in 0..len {
                out_diag[idx][r + a] += plus[(r, r)];
            }
            joint[idx] += entropy_bits(plus.symmetric_eigenvalues().iter().copied(), floor);
            if a > 0 {
                let minus = DMatrix::from_fn(len, len, |r, s| b[(r, s)] * sq[r + a] * sq[s + a]);
                for r in 0..len {
                    out_diag[idx][r] += minus[(r, r)];
                }
                joint[idx] += entropy_bits(minus.symmetric_eigenvalues().iter().copied(), floor);
            }
        }
    }
    out_diag
        .into_iter()
        .zip(joint)
        .map(|(d, j)| (entropy_bits(d, floor), j))
        .collect()
}

/// General single-mode path: purify through the eigen-ensemble of `m`.
///
/// Coherences of `m` only connect Fock states congruent mod `p`, so the
/// eigenvectors split into residue classes and the joint output splits into
/// `p` blocks labelled by `(q - class) mod p`.
fn ensemble_ic(m: &DMatrix<Complex64>, p: usize, kernel: &ChannelKernel) -> f64 {
    let k = m.nrows() - 1;
    let dim = k + 1;
    let out = single_mode(kernel, m);
    let s_out = entropy_bits(hermitian_eigenvalues(&out), EIGENVALUE_FLOOR);

    // (weight, class, vector scaled by sqrt(weight))
    let mut ensemble: Vec<(f64, usize, DVector<Complex64>)> = Vec::new();
    for class in 0..p {
        let idx: Vec<usize> = (class..dim).step_by(p).collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        let sub = (&sub + sub.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sub.symmetric_eigen();
        for (c, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let col = eig.eigenvectors.column(c);
            let lead = col.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(Complex64::new(1.0, 0.0));
            let phase = lead.conj() / lead.norm();
            let mut v = DVector::zeros(dim);
            for (i, &n) in idx.iter().enumerate() {
                v[n] = col[i] * phase * lam.sqrt();
            }
            ensemble.push((lam, class, v));
        }
    }
    ensemble.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let total: f64 = ensemble.iter().map(|e| e.0).sum();
    let mut kept = 0.0;
    let mut keep = 0;
    while keep < ensemble.len() && total - kept > ENSEMBLE_TAIL {
        kept += ensemble[keep].0;
        keep += 1;
    }
    ensemble.truncate(keep.max(1));
    let nj = ensemble.len();
    let real = m.iter().all(|z| z.im == 0.0);

    // joint basis (q, j) grouped by block (q - class_j) mod p
    let mut slot = vec![(0usize, 0usize); dim * nj];
    let mut sizes = vec![0usize; p];
    for (j, e) in ensemble.iter().enumerate() {
        for q in 0..dim {
            let blk = (q + p - e.1 % p) % p;
            slot[q * nj + j] = (blk, sizes[blk]);
            sizes[blk] += 1;
        }
    }
    let mut blocks: Vec<DMatrix<Complex64>> = sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();

    let kk = k as i64;
    for delta in -kk..=kk {
        let pairs: Vec<(usize, usize)> = (0..nj)
            .flat_map(|j| (0..nj).map(move |j2| (j, j2)))
            .filter(|&(j, j2)| {
                (delta - ensemble[j].1 as i64 + ensemble[j2].1 as i64).rem_euclid(p as i64) == 0
            })
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let off = delta.max(0) as usize;
        let back = (-delta).max(0) as usize;
        let len = dim - delta.unsigned_abs() as usize;
        let kb = kernel.block(delta);
        let mut w_re = DMatrix::<f64>::zeros(len, pairs.len());
        let mut w_im = DMatrix::<f64>::zeros(len, pairs.len());
        for (c, &(j, j2)) in pairs.iter().enumerate() {
            let (u, v) = (&ensemble[j].2, &ensemble[j2].2);
            for ni in 0..len {
                let z = u[ni + off] * v[ni + back].conj();
                w_re[(ni, c)] = z.re;
                w_im[(ni, c)] = z.im;
            }
        }
        let o_re = kb * w_re;
        let o_im = if real { None } else { Some(kb * w_im) };
        for (c, &(j, j2)) in pairs.iter().enumerate() {
            for qi in 0..len {
                let (b1, i1) = slot[(qi + off) * nj + j];
                let (b2, i2) = slot[(qi + back) * nj + j2];
                debug_assert_eq!(b1, b2);
                let im = o_im.as_ref().map_or(0.0, |o| o[(qi, c)]);
                blocks[b1][(i1, i2)] = Complex64::new(o_re[(qi, c)], im);
            }
        }
    }
    let s_joint: f64 = blocks
        .iter()
        .map(|b| entropy_bits(hermitian_eigenvalues(b), EIGENVALUE_FLOOR))
        .sum();
    s_out - s_joint
}

/// Marginals of `BS rho BS^dagger` for a real sector-diagonal two-mode state,
/// with the entropy of `rho` itself.
fn decouple(s: &SectorMatrix) -> Result<(DMatrix<f64>, DMatrix<f64>, f64)> {
    if !s.is_real() {
        return Err(Error::Unsupported(
            "the two-mode oracle handles real density matrices only".into(),
        ));
    }
    let k = s.cutoff();
    let dim = 2 * k + 1;
    let mut ensemble: Vec<(f64, i64, DVector<f64>)> = Vec::new();
    let mut all = Vec::new();
    for d in s.deltas() {
        let b = s.block(d).map(|z| z.re);
        let b = 0.5 * (&b + b.transpose());
        let eig = b.symmetric_eigen();
        for (c, &mu) in eig.eigenvalues.iter().enumerate() {
            all.push(mu);
            if mu > 0.0 {
                ensemble.push((mu, d, eig.eigenvectors.column(c).into_owned()));
            }
        }
    }
    let s_pair = entropy_bits(all, EIGENVALUE_FLOOR);
    ensemble.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let total: f64 = ensemble.iter().map(|e| e.0).sum();
    let mut kept = 0.0;
    let mut keep = 0;
    while keep < ensemble.len() && total - kept > PAIR_ENSEMBLE_TAIL {
        kept += ensemble[keep].0;
        keep += 1;
    }
    ensemble.truncate(keep.max(1));

    let splitters: Vec<DMatrix<f64>> = (0..=2 * k).map(beam_splitter_sector).collect();
    let mut rho_c = DMatrix::<f64>::zeros(dim, dim);
    let mut rho_d = DMatrix::<f64>::zeros(dim, dim);
    for chunk in ensemble.chunks(CHUNK) {
        let mut wide = DMatrix::<f64>::zeros(dim, dim * chunk.len());
        let mut tall = DMatrix::<f64>::zeros(dim * chunk.len(), dim);
        for (c, (mu, d, v)) in chunk.iter().enumerate() {
            let w = mu.sqrt();
            for (j, &amp) in v.iter().enumerate() {
                if amp == 0.0 {
                    continue;
                }
                let (na, nb) = sector_state(*d, j);
                let total = na + nb;
                let u = &splitters[total];
                for mc in 0..=total {
                    let x = w * u[(mc, na)] * amp;
                    wide[(mc, c * dim + total - mc)] += x;
                    tall[(c * dim + mc, total - mc)] += x;
                }
            }
        }
        rho_c += &wide * wide.transpose();
        rho_d += tall.transpose() * &tall;
    }
    Ok((rho_c, rho_d, s_pair))
}

fn tail_cutoff(rho: &DMatrix<f64>) -> usize {
    let mut tail = 0.0;
    let mut k = rho.nrows() - 1;
    while k > 1 && tail + rho[(k, k)] < DECOUPLED_TAIL {
        tail += rho[(k, k)];
        k -= 1;
    }
    k
}

fn two_mode_ic(s: &SectorMatrix, ch: &ChannelParams<f64>, quad: &QuadratureScheme) -> Result<f64> {
    let (rho_c, rho_d, s_pair) = decouple(s)?;
    let ent = |m: &DMatrix<f64>| entropy_bits(m.clone().symmetric_eigenvalues().iter().copied(), EIGENVALUE_FLOOR);
    let mismatch = ent(&rho_c) + ent(&rho_d) - s_pair;
    if mismatch.abs() > PRODUCT_TOL {
        return Err(Error::Unsupported(format!(
            "input does not split into a product under the beam splitter (mutual information {mismatch:.3e})"
        )));
    }
    let kc = tail_cutoff(&rho_c).max(tail_cutoff(&rho_d));
    let scheme = QuadratureScheme::new(quad.radial_nodes().max(kc + 2), quad.angular_nodes().max(2 * kc + 1))?
        .certify(kc, ch)?;
    let mut total = 0.0;
    for rho in [rho_c, rho_d] {
        let m = rho.view((0, 0), (kc + 1, kc + 1)).map(|x| Complex64::new(x, 0.0));
        total += single_mode_ic(&m, ch, &scheme)?;
    }
    Ok(total)
}
