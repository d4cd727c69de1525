use super::state::{hermitian_eigenvalues, FockData, FockDensityMatrix};

/// Eigenvalues below this contribute nothing.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

pub(crate) fn entropy_bits(eigenvalues: impl IntoIterator<Item = f64>, floor: f64) -> f64 {
    let s: f64 = eigenvalues
        .into_iter()
        .filter(|&l| l > floor)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// `-Tr rho log2 rho` in bits.
pub fn von_neumann_entropy(rho: &FockDensityMatrix) -> f64 {
    let eig: Vec<f64> = match rho.data() {
        FockData::SingleMode(m) => hermitian_eigenvalues(m),
        FockData::TwoMode(s) => s.deltas().flat_map(|d| hermitian_eigenvalues(s.block(d))).collect(),
    };
    entropy_bits(eig, EIGENVALUE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::thermal_fock;
    use crate::math::bosonic_entropy;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn pure_and_thermal() {
        assert_eq!(von_neumann_entropy(&thermal_fock(0.0, 4).unwrap()), 0.0);
        let s = von_neumann_entropy(&thermal_fock(1.0, 60).unwrap());
        assert!((s - 2.0).abs() < 1e-12);
        let s = von_neumann_entropy(&thermal_fock(2.5, 120).unwrap());
        assert!((s - bosonic_entropy(2.5f64).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed() {
        let mut m = DMatrix::<Complex64>::zeros(6, 6);
        for i in 0..4 {
            m[(i, i)] = Complex64::new(0.25, 0.0);
        }
        let rho = FockDensityMatrix::single_mode(m, 0.0).unwrap();
        assert!((von_neumann_entropy(&rho) - 2.0).abs() < 1e-14);
    }
}
