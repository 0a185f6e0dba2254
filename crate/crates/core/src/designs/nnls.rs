//! Lawson–Hanson active-set nonnegative least squares.
//!
//! Works on the Gram matrix `AᵀA` so the cost per iteration depends on the
//! number of columns only; the passive-set solution is polished with a QR
//! solve against `A` itself at the end.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn solve_passive(g: &DMatrix<f64>, h: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let k = passive.len();
    let gp = DMatrix::from_fn(k, k, |r, c| g[(passive[r], passive[c])]);
    let hp = DVector::from_fn(k, |r, _| h[passive[r]]);
    if let Some(ch) = gp.clone().cholesky() {
        return ch.solve(&hp);
    }
    gp.svd(true, true)
        .solve(&hp, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(k))
}

/// Least-squares solve restricted to the passive columns, directly on `A`.
fn polish(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> Option<DVector<f64>> {
    if passive.is_empty() {
        return None;
    }
    let ap = DMatrix::from_fn(a.nrows(), passive.len(), |r, c| a[(r, passive[c])]);
    let qr = ap.qr();
    let qtb = qr.q().transpose() * b;
    qr.r().solve_upper_triangular(&qtb)
}

/// `argmin_{x ≥ 0} ‖A x − b‖₂`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> NnlsSolution {
    let m = a.ncols();
    let g = a.transpose() * a;
    let h = a.transpose() * b;
    let scale = a.norm().max(1.0) * b.norm().max(1.0);
    let tol = 1e-13 * scale;
    let mut x = DVector::<f64>::zeros(m);
    let mut in_passive = vec![false; m];
    let mut passive: Vec<usize> = Vec::new();
    let max_iter = 3 * m + 10;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let w = &h - &g * &x;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..m {
            if !in_passive[j] && w[j] > tol && best.is_none_or(|(_, v)| w[j] > v) {
                best = Some((j, w[j]));
            }
        }
        let Some((t, _)) = best else { break };
        in_passive[t] = true;
        passive.push(t);

        loop {
            let s = solve_passive(&g, &h, &passive);
            if s.iter().all(|&v| v > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = s[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in passive.iter().enumerate() {
                if s[k] <= 0.0 {
                    let denom = x[j] - s[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in passive.iter().enumerate() {
                x[j] += alpha * (s[k] - x[j]);
            }
            let before = passive.len();
            passive.retain(|&j| {
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    in_passive[j] = false;
                    false
                } else {
                    true
                }
            });
            if passive.is_empty() || passive.len() == before {
                // stalled; drop the most negative direction and continue outer loop
                if passive.len() == before {
                    if let Some(pos) = (0..passive.len()).min_by(|&p, &q| {
                        s[p].partial_cmp(&s[q]).unwrap_or(std::cmp::Ordering::Equal)
                    }) {
                        let j = passive.remove(pos);
                        x[j] = 0.0;
                        in_passive[j] = false;
                    }
                }
                break;
            }
        }
    }

    if let Some(p) = polish(a, b, &passive) {
        if p.iter().all(|&v| v >= 0.0) {
            let mut xp = DVector::<f64>::zeros(m);
            for (k, &j) in passive.iter().enumerate() {
                xp[j] = p[k];
            }
            if (a * &xp - b).norm() <= (a * &x - b).norm() {
                x = xp;
            }
        }
    }
    let residual = (a * &x - b).norm();
    NnlsSolution {
        x,
        residual,
        iterations,
    }
}
