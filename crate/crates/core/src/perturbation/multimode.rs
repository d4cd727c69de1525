use num_complex::Complex;

use super::single::{check_positive_photons, mixed_binomial_sum};
use crate::error::{Error, Result};
use crate::gaussian::thermal_decomposition;
use crate::math::{factorial, ChannelParams};
use crate::scalar::Real;

/// `c prod_i mu_i^{k_i} mu_i*^{l_i} + c.c.` on a product of thermal modes,
/// with `sum k_i = sum l_i = m` so the eigenvalues move at first order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModePerturbation<T> {
    k: Vec<usize>,
    l: Vec<usize>,
    c: Complex<T>,
}

impl<T: Real> MultiModePerturbation<T> {
    pub fn new(k: Vec<usize>, l: Vec<usize>, c: Complex<T>) -> Result<Self> {
        if k.is_empty() || k.len() != l.len() {
            return Err(Error::InvalidPerturbation(format!(
                "k and l need the same non-zero length, got {} and {}",
                k.len(),
                l.len()
            )));
        }
        let (sk, sl): (usize, usize) = (k.iter().sum(), l.iter().sum());
        if sk != sl {
            return Err(Error::InvalidPerturbation(format!(
                "first order needs sum k = sum l, got {sk} and {sl}"
            )));
        }
        if k == l {
            return Err(Error::InvalidPerturbation("k and l must differ".into()));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidPerturbation("c must be finite".into()));
        }
        Ok(Self { k, l, c })
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn l(&self) -> &[usize] {
        &self.l
    }

    pub fn c(&self) -> Complex<T> {
        self.c
    }

    pub fn modes(&self) -> usize {
        self.k.len()
    }

    /// `m = sum k_i`.
    pub fn order(&self) -> usize {
        self.k.iter().sum()
    }

    /// `prod_i k_i! l_i!`.
    pub fn factorial_product(&self) -> T {
        self.k
            .iter()
            .chain(&self.l)
            .fold(T::one(), |acc, &x| acc * factorial::<T>(x))
    }
}

/// `sum_{J} |phi_J|^2 / lambda_J = 2 |c|^2 prod(k_i! l_i!) / [N(N+1)]^m`.
pub fn multimode_phi_norm<T: Real>(pert: &MultiModePerturbation<T>, photons: T) -> Result<T> {
    check_positive_photons(photons)?;
    let var = photons * (photons + T::one());
    Ok(T::lit(2.0) * pert.c.norm_sqr() * pert.factorial_product() / var.powi(pert.order() as i32))
}

/// Cross term `sum phi_1 phi_2 / lambda` between two perturbations on the
/// same thermal modes. Distinct monomials are orthogonal, so this vanishes
/// unless the pairs coincide (`2 Re(c1 c2*)`) or are swapped (`2 Re(c1 c2)`).
pub fn multimode_interference<T: Real>(
    a: &MultiModePerturbation<T>,
    b: &MultiModePerturbation<T>,
    photons: T,
) -> Result<T> {
    check_positive_photons(photons)?;
    if a.modes() != b.modes() {
        return Err(Error::InvalidPerturbation("perturbations act on different mode counts".into()));
    }
    let overlap = if a.k == b.k && a.l == b.l {
        (a.c * b.c.conj()).re
    } else if a.k == b.l && a.l == b.k {
        (a.c * b.c).re
    } else {
        return Ok(T::zero());
    };
    let var = photons * (photons + T::one());
    Ok(T::lit(2.0) * overlap * a.factorial_product() / var.powi(a.order() as i32))
}

/// Joint-state analogue: `2 |c|^2 prod(k_i! l_i!) [N(N+1)]^{-2m} sum_j C(m,j)^2 B^j A^{m-j}`.
pub fn multimode_joint_norm<T: Real>(
    pert: &MultiModePerturbation<T>,
    photons: T,
    ch: &ChannelParams<T>,
) -> Result<T> {
    check_positive_photons(photons)?;
    let d = thermal_decomposition(photons, ch)?;
    let var = photons * (photons + T::one());
    let v2 = var * var;
    let m = pert.order();
    Ok(T::lit(2.0) * pert.c.norm_sqr() * pert.factorial_product()
        * mixed_binomial_sum(m, d.a_coeff() / v2, d.b_coeff() / v2))
}

/// Output-state analogue of [`multimode_phi_norm`] at `N' = N + N_n`.
pub fn multimode_output_norm<T: Real>(
    pert: &MultiModePerturbation<T>,
    photons: T,
    ch: &ChannelParams<T>,
) -> Result<T> {
    multimode_phi_norm(pert, photons + ch.noise_photons())
}

/// Coherent-information change per unit `epsilon^2`, bits.
pub fn multimode_delta_ic<T: Real>(
    pert: &MultiModePerturbation<T>,
    photons: T,
    ch: &ChannelParams<T>,
) -> Result<T> {
    let out = multimode_output_norm(pert, photons, ch)?;
    let joint = multimode_joint_norm(pert, photons, ch)?;
    Ok(-(out - joint) / (T::lit(2.0) * T::LN_2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pert(k: &[usize], l: &[usize], re: f64, im: f64) -> MultiModePerturbation<f64> {
        MultiModePerturbation::new(k.to_vec(), l.to_vec(), Complex::new(re, im)).unwrap()
    }

    #[test]
    fn validation() {
        let c = Complex::new(1.0, 0.0);
        assert!(MultiModePerturbation::new(vec![1, 0], vec![1, 0], c).is_err());
        assert!(MultiModePerturbation::new(vec![2, 0], vec![0, 1], c).is_err());
        assert!(MultiModePerturbation::new(vec![1], vec![0, 1], c).is_err());
        assert_eq!(pert(&[2, 0], &[1, 1], 1.0, 0.0).factorial_product(), 2.0);
    }

    #[test]
    fn phi_norm_examples() {
        let p = pert(&[1, 0], &[0, 1], 1.0, 0.0);
        assert!((multimode_phi_norm(&p, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let p3 = pert(&[1, 0], &[0, 1], 3.0, 0.0);
        assert!((multimode_phi_norm(&p3, 1.0).unwrap() - 9.0).abs() < 1e-13);
        let c0 = pert(&[1, 0], &[0, 1], 0.0, 0.0);
        let ch = ChannelParams::new(0.1).unwrap();
        assert_eq!(multimode_joint_norm(&c0, 1.0, &ch).unwrap(), 0.0);
    }

    #[test]
    fn joint_over_phi_tends_to_half() {
        // m = 1: A and B each approach N(N+1)/4
        let p = pert(&[1, 0], &[0, 1], 1.0, 0.0);
        let ch = ChannelParams::new(0.1).unwrap();
        let n = 1e6;
        let r = multimode_joint_norm(&p, n, &ch).unwrap() / multimode_phi_norm(&p, n).unwrap();
        assert!((r - 0.5).abs() < 1e-4, "{r}");
        assert!(multimode_delta_ic(&p, n, &ch).unwrap() < 0.0);
    }

    #[test]
    fn interference_predicate() {
        let a = pert(&[1, 0], &[0, 1], 1.0, 0.5);
        let b = pert(&[0, 1], &[1, 0], 2.0, 0.0);
        let c = pert(&[2, 0], &[1, 1], 1.0, 0.0);
        assert_eq!(multimode_interference(&a, &c, 1.0).unwrap(), 0.0);
        assert!((multimode_interference(&a, &a, 1.0).unwrap() - multimode_phi_norm(&a, 1.0).unwrap()).abs() < 1e-15);
        assert!((multimode_interference(&a, &b, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }
}
