//! Explicitly restarted Arnoldi for the largest-modulus eigenvalue of a
//! real linear operator given as a closure.

use nalgebra::{DMatrix, DVector, Schur};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rng::seeded;

#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldiConfig {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Stop when `‖A y − θ y‖ ≤ tolerance` for the unit Ritz vector `y`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ArnoldiConfig {
    fn default() -> Self {
        Self {
            krylov_dim: 40,
            max_restarts: 400,
            tolerance: 1e-11,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DominantEigen {
    pub value: C64,
    /// Real part of the Ritz vector, unit norm.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Eigenvector of a small Hessenberg matrix for a known eigenvalue, by two
/// steps of inverse iteration.
fn ritz_coefficients(h: &DMatrix<f64>, theta: C64) -> DVector<C64> {
    let m = h.nrows();
    let scale = h.norm().max(1.0);
    let shift = theta + C64::new(scale * 1e-13, 0.0);
    let a = DMatrix::<C64>::from_fn(m, m, |r, c| {
        let v = C64::new(h[(r, c)], 0.0);
        if r == c {
            v - shift
        } else {
            v
        }
    });
    let lu = a.lu();
    let mut s = DVector::<C64>::from_element(m, C64::new(1.0, 0.0));
    for _ in 0..3 {
        if let Some(next) = lu.solve(&s) {
            let n = next.norm();
            if n > 0.0 && n.is_finite() {
                s = next.unscale(n);
            }
        }
    }
    s
}

/// Dominant eigenpair of `op` on `R^dim`.
pub fn arnoldi_dominant<F>(dim: usize, op: F, config: &ArnoldiConfig) -> Result<DominantEigen>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m_max = config.krylov_dim.min(dim).max(1);
    let mut rng = seeded(config.seed);
    let mut v0: Vec<f64> = (0..dim)
        .map(|_| rand::Rng::sample(&mut rng, StandardNormal))
        .collect();
    normalize(&mut v0);
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;

    for _ in 0..config.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut h = DMatrix::<f64>::zeros(m_max + 1, m_max);
        let mut m = m_max;
        for j in 0..m_max {
            let mut w = op(&basis[j]);
            matvecs += 1;
            // modified Gram–Schmidt with one reorthogonalization pass
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[(i, j)] += c;
                    for (wk, vk) in w.iter_mut().zip(v) {
                        *wk -= c * vk;
                    }
                }
            }
            let beta = normalize(&mut w);
            h[(j + 1, j)] = beta;
            if beta <= 1e-13 * h.column(j).norm() {
                m = j + 1;
                break;
            }
            basis.push(w);
        }
        let hm = h.view((0, 0), (m, m)).into_owned();
        let Some(schur) = [1e-15, 1e-14, 1e-13]
            .into_iter()
            .find_map(|eps| Schur::try_new(hm.clone(), eps, 1000 * m))
        else {
            break;
        };
        let eig = schur.complex_eigenvalues();
        let mut best = C64::new(0.0, 0.0);
        for &z in eig.iter() {
            let better = z.norm() > best.norm() + 1e-14
                || ((z.norm() - best.norm()).abs() <= 1e-14
                    && (z.re > best.re || (z.re == best.re && z.im > best.im)));
            if better {
                best = z;
            }
        }
        let s = ritz_coefficients(&hm, best);
        let residual = h[(m, m - 1)].abs() * s[m - 1].norm();
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for (k, v) in basis.iter().take(m).enumerate() {
            let c = s[k];
            for ((r, i), x) in re.iter_mut().zip(im.iter_mut()).zip(v) {
                *r += c.re * x;
                *i += c.im * x;
            }
        }
        last_residual = residual;
        if residual <= config.tolerance {
            normalize(&mut re);
            return Ok(DominantEigen {
                value: best,
                vector: re,
                residual,
                matvecs,
            });
        }
        let rn = dot(&re, &re);
        let in_ = dot(&im, &im);
        v0 = if rn >= in_ { re } else { im };
        if normalize(&mut v0) == 0.0 {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual: last_residual,
    })
}
