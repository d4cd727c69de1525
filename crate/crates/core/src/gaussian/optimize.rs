use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::gaussian::covariance::coherent_info_energy_shape;
use crate::gaussian::thermal::{coherent_info_thermal, thermal_decomposition};
use crate::math::{bosonic_entropy_derivative, ChannelParams};
use crate::scalar::Real;

const X_TOL: f64 = 1e-8;
const SPLIT_SEED: u64 = 0x00C0_FFEE;
const SPLIT_RESTARTS: usize = 8;

/// Maximizer of `I_c(E, x)` over the shape `x in [1/(4E^2), 1]` at fixed energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOptimum<T> {
    pub x_star: T,
    pub ic_star: T,
}

/// Golden-section search over the shape at fixed energy. The interior
/// candidate only wins if it strictly beats the `x = 1` endpoint.
pub fn optimize_x<T: Real>(energy: T, ch: &ChannelParams<T>) -> Result<ShapeOptimum<T>> {
    optimize_by(energy, |x| coherent_info_energy_shape(energy, x, ch))
}

pub(crate) fn optimize_by<T: Real>(
    energy: T,
    f: impl Fn(T) -> Result<T>,
) -> Result<ShapeOptimum<T>> {
    if !(energy.is_finite() && energy >= T::lit(0.5)) {
        return Err(Error::Domain(format!("energy must be >= 1/2, got {energy}")));
    }
    let lo = (T::lit(0.25) / (energy * energy)).min(T::one());
    let f_one = f(T::one())?;
    if T::one() - lo <= T::lit(X_TOL) {
        return Ok(ShapeOptimum { x_star: T::one(), ic_star: f_one });
    }

    let inv_phi = T::lit(0.5) * (T::lit(5.0).sqrt() - T::one());
    let (mut a, mut b) = (lo, T::one());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > T::lit(X_TOL) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x_mid = T::lit(0.5) * (a + b);
    let f_mid = f(x_mid)?;
    if f_mid > f_one {
        Ok(ShapeOptimum { x_star: x_mid, ic_star: f_mid })
    } else {
        Ok(ShapeOptimum { x_star: T::one(), ic_star: f_one })
    }
}

/// Dense-grid maximizer used to cross-check [`optimize_x`]; ties go to the
/// larger `x`.
pub fn optimize_x_grid<T: Real>(
    energy: T,
    ch: &ChannelParams<T>,
    points: usize,
) -> Result<ShapeOptimum<T>> {
    if points < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    if !(energy.is_finite() && energy >= T::lit(0.5)) {
        return Err(Error::Domain(format!("energy must be >= 1/2, got {energy}")));
    }
    let lo = (T::lit(0.25) / (energy * energy)).min(T::one());
    let mut best = ShapeOptimum { x_star: T::nan(), ic_star: T::neg_infinity() };
    for i in 0..points {
        let t = T::from_usize_lossy(i) / T::from_usize_lossy(points - 1);
        let x = lo + (T::one() - lo) * t;
        let v = coherent_info_energy_shape(energy, x, ch)?;
        if v >= best.ic_star {
            best = ShapeOptimum { x_star: x, ic_star: v };
        }
    }
    Ok(best)
}

/// `dI_c/dN` for a thermal input.
pub(crate) fn thermal_ic_slope<T: Real>(n: T, ch: &ChannelParams<T>) -> T {
    let nn = ch.noise_photons();
    let td = thermal_decomposition(n.max(T::zero()), ch).expect("validated photon number");
    let tiny = T::min_positive_value();
    bosonic_entropy_derivative(n + nn)
        - (bosonic_entropy_derivative(td.na.max(tiny)) + bosonic_entropy_derivative(td.nb.max(tiny)))
            * nn
            / td.d
}

/// Euclidean projection onto `{y >= 0, sum y = total}`.
fn project_simplex<T: Real>(v: &[T], total: T) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (i, &ui) in u.iter().enumerate() {
        cum = cum + ui;
        let t = (cum - total) / T::from_usize_lossy(i + 1);
        if ui - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(T::zero())).collect()
}

fn total_ic<T: Real>(photons: &[T], ch: &ChannelParams<T>) -> T {
    photons
        .iter()
        .map(|&n| coherent_info_thermal(n, ch).expect("validated photon number"))
        .fold(T::zero(), |a, b| a + b)
}

/// KKT residual: spread of the gradient over the modes that carry photons,
/// plus any boundary mode whose gradient exceeds that level.
fn kkt_residual<T: Real>(photons: &[T], grad: &[T]) -> T {
    let free: Vec<T> = photons
        .iter()
        .zip(grad)
        .filter(|(&n, _)| n > T::zero())
        .map(|(_, &g)| g)
        .collect();
    if free.is_empty() {
        return T::zero();
    }
    let hi = free.iter().copied().fold(T::neg_infinity(), T::max);
    let lo = free.iter().copied().fold(T::infinity(), T::min);
    let boundary_excess = photons
        .iter()
        .zip(grad)
        .filter(|(&n, _)| n <= T::zero())
        .map(|(_, &g)| (g - lo).max(T::zero()))
        .fold(T::zero(), T::max);
    (hi - lo).max(boundary_excess)
}

/// Projected gradient ascent with backtracking; returns the photon numbers.
fn ascend<T: Real>(start: Vec<T>, total: T, ch: &ChannelParams<T>) -> (Vec<T>, T, T) {
    let mut p = start;
    let mut val = total_ic(&p, ch);
    let mut step = total.max(T::one());
    let mut res = T::infinity();
    for _ in 0..20_000 {
        let grad: Vec<T> = p.iter().map(|&n| thermal_ic_slope(n, ch)).collect();
        res = kkt_residual(&p, &grad);
        if res < T::lit(1e-10) {
            break;
        }
        let mut t = step * T::lit(4.0);
        let mut moved = false;
        for _ in 0..80 {
            let trial: Vec<T> = p.iter().zip(&grad).map(|(&n, &g)| n + t * g).collect();
            let q = project_simplex(&trial, total);
            let ascent: T = q
                .iter()
                .zip(&p)
                .zip(&grad)
                .map(|((&qi, &pi), &g)| g * (qi - pi))
                .fold(T::zero(), |a, b| a + b);
            let v = total_ic(&q, ch);
            if v >= val + T::lit(1e-4) * ascent && ascent > T::zero() {
                p = q;
                val = v;
                step = t;
                moved = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !moved {
            break;
        }
    }
    (p, val, res)
}

/// Allocation of a total energy budget over `n_modes` thermal inputs that
/// maximizes the summed coherent information. Returns per-mode energies
/// `E_i = N_i + 1/2`.
///
/// Runs from the equal split and from eight seeded Dirichlet starts; the
/// equal split wins ties.
pub fn optimal_energy_split<T: Real>(
    total_energy: T,
    n_modes: usize,
    ch: &ChannelParams<T>,
) -> Result<Vec<T>> {
    if n_modes < 2 {
        return Err(Error::Domain(format!("need at least two modes, got {n_modes}")));
    }
    let modes = T::from_usize_lossy(n_modes);
    let free = total_energy - T::lit(0.5) * modes;
    if !(total_energy.is_finite() && free >= -T::lit(1e-12) * total_energy.abs().max(T::one())) {
        return Err(Error::Domain(format!(
            "total energy {total_energy} below the vacuum floor {}",
            T::lit(0.5) * modes
        )));
    }
    let half = T::lit(0.5);
    if free <= T::zero() {
        return Ok(vec![half; n_modes]);
    }

    let equal = vec![free / modes; n_modes];
    let (eq_p, eq_val, eq_res) = ascend(equal, free, ch);
    let mut best = (eq_p, eq_val, eq_res);

    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    for _ in 0..SPLIT_RESTARTS {
        let w: Vec<f64> = (0..n_modes).map(|_| Exp1.sample(&mut rng)).collect();
        let s: f64 = w.iter().sum();
        let start: Vec<T> = w.iter().map(|&wi| free * T::lit(wi / s)).collect();
        let cand = ascend(start, free, ch);
        let margin = T::lit(1e-12) * best.1.abs().max(T::one());
        if cand.1 > best.1 + margin {
            best = cand;
        }
    }
    if best.2 > T::lit(1e-8) {
        return Err(Error::Convergence(format!(
            "energy split stalled with KKT residual {}",
            best.2
        )));
    }
    Ok(best.0.into_iter().map(|n| n + half).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ch(n: f64) -> ChannelParams<f64> {
        ChannelParams::new(n).unwrap()
    }

    #[test]
    fn thermal_shape_is_optimal() {
        for &(e, nn) in &[(100.0, 0.1), (10.0, 0.2), (1e3, 0.05)] {
            let opt = optimize_x(e, &ch(nn)).unwrap();
            assert_eq!(opt.x_star, 1.0, "E={e}");
            let grid = optimize_x_grid(e, &ch(nn), 1024).unwrap();
            assert_eq!(grid.x_star, 1.0);
        }
    }

    #[test]
    fn vacuum_energy_forces_unit_shape() {
        let opt = optimize_x(0.5, &ch(0.1)).unwrap();
        assert_eq!(opt.x_star, 1.0);
        assert!(opt.ic_star.abs() < 1e-14);
    }

    #[test]
    fn golden_section_finds_interior_maxima() {
        let opt = optimize_by(10.0, |x: f64| Ok(-(x - 0.3).powi(2))).unwrap();
        assert!((opt.x_star - 0.3).abs() < 1e-7);
        let shifted = optimize_by(10.0, |x: f64| Ok(3.0 * -(x - 0.3).powi(2) + 7.0)).unwrap();
        assert!((shifted.x_star - opt.x_star).abs() < 1e-7);
    }

    #[test]
    fn slope_matches_finite_difference() {
        for &n in &[0.5, 3.0, 80.0] {
            let h = 1e-5 * n;
            let fd = (coherent_info_thermal(n + h, &ch(0.1)).unwrap()
                - coherent_info_thermal(n - h, &ch(0.1)).unwrap())
                / (2.0 * h);
            assert_relative_eq!(thermal_ic_slope(n, &ch(0.1)), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[2.0, -1.0, 0.5], 1.0);
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p[0], 1.0);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn equal_split_at_large_energy() {
        let e = optimal_energy_split(200.0, 2, &ch(0.1)).unwrap();
        assert!((e[0] - 100.0).abs() < 1e-6 && (e[1] - 100.0).abs() < 1e-6);
        let e3 = optimal_energy_split(3.0 * 50.5, 3, &ch(0.2)).unwrap();
        for v in e3 {
            assert!((v - 50.5).abs() < 1e-6);
        }
    }

    #[test]
    fn no_free_energy() {
        assert_eq!(optimal_energy_split(1.0, 2, &ch(0.1)).unwrap(), vec![0.5, 0.5]);
        assert!(optimal_energy_split(0.9, 2, &ch(0.1)).is_err());
        assert!(optimal_energy_split(10.0, 1, &ch(0.1)).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn argmax_ignores_affine_rescaling(e in 1.0f64..1e4, nn in 0.01f64..0.36, a in 0.1f64..10.0, b in -5.0f64..5.0) {
            let c = ch(nn);
            let plain = optimize_x(e, &c).unwrap();
            let scaled = optimize_by(e, |x| Ok(a * coherent_info_energy_shape(e, x, &c)? + b)).unwrap();
            proptest::prop_assert_eq!(plain.x_star, scaled.x_star);
        }
    }
}
