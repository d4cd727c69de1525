use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Thermal tail mass accepted by [`thermal_fock`].
pub const THERMAL_TAIL_TOL: f64 = 1e-12;
/// Safety margin added by the automatic cutoff rule.
pub const CUTOFF_MARGIN: usize = 10;

const HERMITIAN_TOL: f64 = 1e-12;
const NEGATIVITY_TOL: f64 = 1e-10;
const DUMP_MAGIC: &[u8; 8] = b"FOCKDM01";

/// Two-mode operator stored by photon-number-difference sectors.
///
/// Sector `delta = n_a - n_b` of cutoff `K` has basis
/// `|j + max(delta, 0), j + max(-delta, 0)>` for `j = 0..=K-|delta|`.
/// Block `delta` maps sector `delta - shift` to sector `delta`; every
/// operator the oracle meets has this form, so entries outside these blocks
/// are structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    cutoff: usize,
    shift: i64,
    blocks: Vec<DMatrix<Complex64>>,
}

pub(crate) fn sector_dim(cutoff: usize, delta: i64) -> usize {
    if delta.unsigned_abs() as usize > cutoff {
        0
    } else {
        cutoff + 1 - delta.unsigned_abs() as usize
    }
}

/// `(n_a, n_b)` of basis element `j` in sector `delta`.
#[inline]
pub(crate) fn sector_state(delta: i64, j: usize) -> (usize, usize) {
    (j + delta.max(0) as usize, j + (-delta).max(0) as usize)
}

impl SectorMatrix {
    pub fn zeros(cutoff: usize, shift: i64) -> Self {
        let k = cutoff as i64;
        let blocks = (-k..=k)
            .map(|d| DMatrix::zeros(sector_dim(cutoff, d), sector_dim(cutoff, d - shift)))
            .collect();
        Self { cutoff, shift, blocks }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn block(&self, delta: i64) -> &DMatrix<Complex64> {
        &self.blocks[(delta + self.cutoff as i64) as usize]
    }

    pub fn block_mut(&mut self, delta: i64) -> &mut DMatrix<Complex64> {
        &mut self.blocks[(delta + self.cutoff as i64) as usize]
    }

    pub fn deltas(&self) -> impl Iterator<Item = i64> {
        let k = self.cutoff as i64;
        -k..=k
    }

    /// Entry `<n_a n_b| X |m_a m_b>`.
    pub fn get(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        let k = self.cutoff;
        if row.0 > k || row.1 > k || col.0 > k || col.1 > k {
            return Complex64::new(0.0, 0.0);
        }
        let dr = row.0 as i64 - row.1 as i64;
        let dc = col.0 as i64 - col.1 as i64;
        if dr - dc != self.shift {
            return Complex64::new(0.0, 0.0);
        }
        self.block(dr)[(row.0.min(row.1), col.0.min(col.1))]
    }

    /// Dense matrix on `|n_a, n_b>` with index `n_a (K+1) + n_b`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.cutoff + 1;
        let mut out = DMatrix::zeros(dim * dim, dim * dim);
        for d in self.deltas() {
            let b = self.block(d);
            for i in 0..b.nrows() {
                let (ra, rb) = sector_state(d, i);
                for j in 0..b.ncols() {
                    let (ca, cb) = sector_state(d - self.shift, j);
                    out[(ra * dim + rb, ca * dim + cb)] = b[(i, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        if self.shift != 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Largest `|X_ij - Y_ij|` over entries whose row and column states both
    /// have total photon number at most `max_total`.
    pub fn max_abs_diff_within(&self, other: &SectorMatrix, max_total: usize) -> f64 {
        assert_eq!(self.cutoff, other.cutoff);
        assert_eq!(self.shift, other.shift);
        let mut worst = 0.0f64;
        for d in self.deltas() {
            let (a, b) = (self.block(d), other.block(d));
            for i in 0..a.nrows() {
                let (ra, rb) = sector_state(d, i);
                if ra + rb > max_total {
                    continue;
                }
                for j in 0..a.ncols() {
                    let (ca, cb) = sector_state(d - self.shift, j);
                    if ca + cb > max_total {
                        continue;
                    }
                    worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
                }
            }
        }
        worst
    }

    pub(crate) fn is_real(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| z.im == 0.0))
    }

    pub(crate) fn scale(&mut self, f: f64) {
        for b in self.blocks.iter_mut() {
            *b *= Complex64::new(f, 0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FockData {
    SingleMode(DMatrix<Complex64>),
    TwoMode(SectorMatrix),
}

/// Truncated density matrix of one or two bosonic modes.
///
/// `tail_mass` is the probability weight the construction certifies as lost
/// above the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: usize,
    data: FockData,
    tail_mass: f64,
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let re = 0.5 * (&re + re.transpose());
        re.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().collect()
    }
}

impl FockDensityMatrix {
    /// Single-mode state; `matrix` must be `(K+1) x (K+1)`, Hermitian and PSD.
    pub fn single_mode(matrix: DMatrix<Complex64>, tail_mass: f64) -> Result<Self> {
        if matrix.nrows() < 2 || matrix.nrows() != matrix.ncols() {
            return Err(Error::Domain(format!(
                "single-mode matrix must be square with cutoff >= 1, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let s = Self { cutoff: matrix.nrows() - 1, data: FockData::SingleMode(matrix), tail_mass };
        s.validate()?;
        Ok(s)
    }

    /// Two-mode state from its difference sectors.
    pub fn two_mode(sectors: SectorMatrix, tail_mass: f64) -> Result<Self> {
        if sectors.shift() != 0 {
            return Err(Error::Domain("a density matrix has sector shift 0".into()));
        }
        if sectors.cutoff() < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        let s = Self { cutoff: sectors.cutoff(), data: FockData::TwoMode(sectors), tail_mass };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_parts(cutoff: usize, data: FockData, tail_mass: f64) -> Self {
        Self { cutoff, data, tail_mass }
    }

    fn blocks(&self) -> Vec<&DMatrix<Complex64>> {
        match &self.data {
            FockData::SingleMode(m) => vec![m],
            FockData::TwoMode(s) => s.blocks.iter().collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        for b in self.blocks() {
            let defect = hermitian_defect(b);
            if defect > HERMITIAN_TOL {
                return Err(Error::Physicality(format!("not Hermitian (defect {defect:.3e})")));
            }
            if let Some(min) = hermitian_eigenvalues(b).into_iter().reduce(f64::min) {
                if min < -NEGATIVITY_TOL {
                    return Err(Error::Physicality(format!("negative eigenvalue {min:.3e}")));
                }
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > self.tail_mass + NEGATIVITY_TOL {
            return Err(Error::Physicality(format!(
                "trace {tr} differs from 1 by more than the tail mass {:.3e}",
                self.tail_mass
            )));
        }
        Ok(())
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        match self.data {
            FockData::SingleMode(_) => 1,
            FockData::TwoMode(_) => 2,
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn data(&self) -> &FockData {
        &self.data
    }

    pub fn single(&self) -> Option<&DMatrix<Complex64>> {
        match &self.data {
            FockData::SingleMode(m) => Some(m),
            FockData::TwoMode(_) => None,
        }
    }

    pub fn sectors(&self) -> Option<&SectorMatrix> {
        match &self.data {
            FockData::SingleMode(_) => None,
            FockData::TwoMode(s) => Some(s),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.data {
            FockData::SingleMode(m) => m.trace().re,
            FockData::TwoMode(s) => s.trace().re,
        }
    }

    /// Dense matrix of dimension `(K+1)^modes`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.data {
            FockData::SingleMode(m) => m.clone(),
            FockData::TwoMode(s) => s.to_dense(),
        }
    }

    /// Photon-number distribution of one mode.
    pub fn photon_distribution(&self, mode: usize) -> Result<Vec<f64>> {
        match (&self.data, mode) {
            (FockData::SingleMode(m), 0) => Ok(m.diagonal().iter().map(|z| z.re).collect()),
            (FockData::TwoMode(_), 0 | 1) => {
                let r = self.reduced(mode)?;
                r.photon_distribution(0)
            }
            _ => Err(Error::Domain(format!("no mode {mode} in a {}-mode state", self.modes()))),
        }
    }

    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        Ok(self
            .photon_distribution(mode)?
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum())
    }

    /// Reduced state of `mode` (0 or 1) of a two-mode state. Sector-diagonal
    /// states have diagonal marginals.
    pub fn reduced(&self, mode: usize) -> Result<FockDensityMatrix> {
        let s = self
            .sectors()
            .ok_or_else(|| Error::Domain("partial trace needs a two-mode state".into()))?;
        if mode > 1 {
            return Err(Error::Domain(format!("no mode {mode} in a two-mode state")));
        }
        let dim = self.cutoff + 1;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for d in s.deltas() {
            let b = s.block(d);
            for j in 0..b.nrows() {
                let (na, nb) = sector_state(d, j);
                let n = if mode == 0 { na } else { nb };
                m[(n, n)] += b[(j, j)];
            }
        }
        Ok(Self::from_parts(self.cutoff, FockData::SingleMode(m), self.tail_mass))
    }

    /// `(1/2) ||a - b||_1`.
    pub fn trace_distance(&self, other: &FockDensityMatrix) -> Result<f64> {
        if self.cutoff != other.cutoff || self.modes() != other.modes() {
            return Err(Error::Domain(format!(
                "trace distance between {}-mode K={} and {}-mode K={} states",
                self.modes(),
                self.cutoff,
                other.modes(),
                other.cutoff
            )));
        }
        let norm: f64 = self
            .blocks()
            .into_iter()
            .zip(other.blocks())
            .map(|(a, b)| hermitian_eigenvalues(&(a - b)).iter().map(|v| v.abs()).sum::<f64>())
            .sum();
        Ok(0.5 * norm)
    }

    /// Debug dump: 8-byte magic, `u32` modes, `u32` cutoff (little endian),
    /// then the dense matrix row-major as `(re, im)` `f64` pairs.
    pub fn write_dump(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.modes() as u32).to_le_bytes())?;
        w.write_all(&(self.cutoff as u32).to_le_bytes())?;
        let dense = self.to_dense();
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let z = dense[(i, j)];
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump back as a dense matrix: `(modes, cutoff, matrix)`.
    pub fn read_dump(mut r: impl Read) -> std::io::Result<(usize, usize, DMatrix<Complex64>)> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != DUMP_MAGIC {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "bad magic"));
        }
        let modes = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let cutoff = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let dim = (cutoff + 1).pow(modes as u32);
        let mut m = DMatrix::zeros(dim, dim);
        let mut buf = [0u8; 16];
        for i in 0..dim {
            for j in 0..dim {
                r.read_exact(&mut buf)?;
                let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
                let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        Ok((modes, cutoff, m))
    }
}

/// `v = N / (N + 1)`.
pub(crate) fn thermal_ratio(n: f64) -> f64 {
    n / (n + 1.0)
}

/// Smallest cutoff whose thermal tail `v^{K+1}` is below `tol`, plus `margin`.
pub fn thermal_cutoff_with(n: f64, tol: f64, margin: usize) -> usize {
    let v = thermal_ratio(n);
    let base = if v <= 0.0 {
        0
    } else {
        // v^{K+1} < tol  <=>  K + 1 > ln tol / ln v
        ((tol.ln() / v.ln()).floor() as usize).max(0)
    };
    (base + margin).max(1)
}

/// Automatic cutoff for a thermal state: tail below 1e-12 plus a margin of 10.
pub fn thermal_cutoff(n: f64) -> usize {
    thermal_cutoff_with(n, THERMAL_TAIL_TOL, CUTOFF_MARGIN)
}

/// Thermal eigenvalues `(1 - v) v^k`, `k = 0..=K`.
pub(crate) fn thermal_weights(n: f64, cutoff: usize) -> Vec<f64> {
    let v = thermal_ratio(n);
    let mut w = Vec::with_capacity(cutoff + 1);
    let mut p = 1.0 - v;
    for _ in 0..=cutoff {
        w.push(p);
        p *= v;
    }
    w
}

pub(crate) fn check_photons(n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("photon number must be finite and >= 0, got {n}")))
    }
}

/// Diagonal thermal state `(1 - v) v^{a^dagger a}` truncated at `cutoff`.
pub fn thermal_fock(n: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_photons(n)?;
    if cutoff < 1 {
        return Err(Error::Cutoff {
            cutoff,
            suggested: thermal_cutoff(n),
            reason: "cutoff must be at least 1".into(),
        });
    }
    let tail = thermal_ratio(n).powi(cutoff as i32 + 1);
    if tail >= THERMAL_TAIL_TOL {
        return Err(Error::Cutoff {
            cutoff,
            suggested: thermal_cutoff(n),
            reason: format!("thermal tail {tail:.3e} above {THERMAL_TAIL_TOL:e}"),
        });
    }
    let w = thermal_weights(n, cutoff);
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        cutoff + 1,
        w.iter().map(|&p| Complex64::new(p, 0.0)),
    ));
    Ok(FockDensityMatrix::from_parts(cutoff, FockData::SingleMode(m), tail))
}

/// `thermal(N_a) (x) thermal(N_b)`; the product of the two tails is not
/// checked against a tolerance, only recorded.
pub fn thermal_product(na: f64, nb: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_photons(na)?;
    check_photons(nb)?;
    let (wa, wb) = (thermal_weights(na, cutoff), thermal_weights(nb, cutoff));
    let mut s = SectorMatrix::zeros(cutoff, 0);
    let k = cutoff as i64;
    for delta in -k..=k {
        let blk = s.block_mut(delta);
        for j in 0..blk.nrows() {
            let (a, b) = sector_state(delta, j);
            blk[(j, j)] = Complex64::new(wa[a] * wb[b], 0.0);
        }
    }
    let rho = FockDensityMatrix::from_parts(cutoff, FockData::TwoMode(s), 0.0);
    let lost = (1.0 - rho.trace()).max(0.0);
    Ok(FockDensityMatrix::from_parts(cutoff, rho.data, lost))
}
