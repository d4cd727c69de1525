//! Gauss–Laguerre rules for `int_0^inf e^{-u} f(u) du`.
//!
//! Nodes come from the Golub–Welsch eigenvalue problem and are then polished
//! by Newton steps on a rescaled three-term recurrence. Weights are kept in
//! log form since they underflow long before the nodes stop being useful.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
}

/// `L_n(x)` and `L_{n-1}(x)` scaled by a common factor `exp(-log_scale)`.
fn scaled_laguerre(n: usize, x: f64) -> (f64, f64, f64) {
    let (mut p0, mut p1) = (1.0, 1.0 - x);
    let mut log_scale = 0.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        let m = p1.abs();
        if m > 1e100 {
            p0 /= m;
            p1 /= m;
            log_scale += m.ln();
        }
    }
    (p1, p0, log_scale)
}

fn compute_rule(n: usize) -> LaguerreRule {
    assert!(n >= 1, "Gauss-Laguerre rule needs at least one node");
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            let off = (i + 1) as f64;
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let nf = n as f64;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (ln, ln1, _) = scaled_laguerre(n, *x);
            // x L_n' = n (L_n - L_{n-1}); the common scale cancels in the ratio
            let dp = nf * (ln - ln1) / *x;
            if dp != 0.0 && dp.is_finite() {
                *x -= ln / dp;
            }
        }
    }

    // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2)
    let mut log_weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (ln1, _, s) = scaled_laguerre(n + 1, x);
            x.ln() - 2.0 * (nf + 1.0).ln() - 2.0 * (ln1.abs().ln() + s)
        })
        .collect();
    // the weights must sum to 1; large rules drift by ~1e-11 otherwise
    let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = top + log_weights.iter().map(|w| (w - top).exp()).sum::<f64>().ln();
    log_weights.iter_mut().for_each(|w| *w -= norm);
    LaguerreRule { nodes, log_weights }
}

/// Cached `n`-point rule.
pub fn gauss_laguerre(n: usize) -> Arc<LaguerreRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LaguerreRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &LaguerreRule, f: impl Fn(f64) -> f64) -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.log_weights)
            .map(|(&x, &lw)| lw.exp() * f(x))
            .sum()
    }

    #[test]
    fn small_rule_matches_tables() {
        let r = gauss_laguerre(2);
        let s2 = 2f64.sqrt();
        assert!((r.nodes[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((r.nodes[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((r.log_weights[0].exp() - (2.0 + s2) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn exact_on_monomials() {
        for &n in &[5, 40, 200] {
            let r = gauss_laguerre(n);
            let mut fact = 1.0;
            for p in 0..8 {
                if p > 0 {
                    fact *= p as f64;
                }
                let got = integrate(&r, |x| x.powi(p));
                assert!((got / fact - 1.0).abs() < 1e-11, "n={n} p={p}: {got}");
            }
        }
    }

    #[test]
    fn large_rules_stay_finite() {
        let r = gauss_laguerre(700);
        assert!(r.nodes.iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(r.log_weights.iter().all(|w| w.is_finite()));
        let total: f64 = r.log_weights.iter().map(|w| w.exp()).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((integrate(&r, |x| x.powi(5)) / 120.0 - 1.0).abs() < 1e-10);
    }
}
