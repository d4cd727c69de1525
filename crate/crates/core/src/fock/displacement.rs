//! Real radial parts of displacement-operator matrix elements.
//!
//! `<m|D(s e^{i theta})|n> = d_{mn}(s) e^{i (m-n) theta}` with
//! `d_{n+a,n}(s) = sqrt(n!/(n+a)!) s^a e^{-s^2/2} L_n^{(a)}(s^2)` and
//! `d_{m,n} = (-1)^{n-m} d_{n,m}` for `m < n`.

fn ln_gamma_int(n: usize) -> f64 {
    // ln((n-1)!) for n >= 1
    (2..n).map(|k| (k as f64).ln()).sum()
}

/// Fills `out[r] = scale * d_{r+a, r}(s)` for `r = 0..out.len()`, where
/// `log_scale = ln(scale)`.
///
/// Uses the normalized three-term recurrence in `r` with a running log
/// scale, so neither the Gaussian prefactor nor the Laguerre growth leave
/// double range.
pub fn diagonal_into(a: usize, s: f64, log_scale: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let x = s * s;
    let af = a as f64;
    let lf0 = if s > 0.0 {
        af * s.ln() - 0.5 * x - 0.5 * ln_gamma_int(a + 1) + log_scale
    } else if a == 0 {
        log_scale
    } else {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    };
    // stored values times exp(ls) give the true ones
    let mut ls = lf0;
    let emit = |v: f64, ls: f64| if ls > -745.0 { v * ls.exp() } else { 0.0 };
    out[0] = emit(1.0, ls);
    if out.len() == 1 {
        return;
    }
    let mut f_prev = 1.0;
    let mut f = (1.0 + af - x) / (1.0 + af).sqrt();
    out[1] = emit(f, ls);
    for r in 1..out.len() - 1 {
        let rf = r as f64;
        let f_next = ((2.0 * rf + 1.0 + af - x) * f - (rf * (rf + af)).sqrt() * f_prev)
            / ((rf + 1.0) * (rf + 1.0 + af)).sqrt();
        f_prev = f;
        f = f_next;
        let m = f.abs().max(f_prev.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            f /= m;
            f_prev /= m;
            ls += m.ln();
        }
        out[r + 1] = emit(f, ls);
    }
}

/// Dense `(K+1) x (K+1)` matrix of `scale * d_{mn}(s)`, row-major by `m`.
pub fn matrix(cutoff: usize, s: f64, log_scale: f64) -> Vec<f64> {
    let dim = cutoff + 1;
    let mut m = vec![0.0; dim * dim];
    let mut buf = vec![0.0; dim];
    for a in 0..dim {
        let len = dim - a;
        diagonal_into(a, s, log_scale, &mut buf[..len]);
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        for r in 0..len {
            m[(r + a) * dim + r] = buf[r];
            if a > 0 {
                m[r * dim + r + a] = sign * buf[r];
            }
        }
    }
    m
}
