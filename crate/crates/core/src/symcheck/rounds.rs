//! The round protocol: each round one pair, chosen uniformly, applies `T`.
//! Averaged over the choice this is one application of `Φ`.

use rand::Rng;
use rayon::prelude::*;

use super::{from_flat, to_flat, PairMapSpec};
use crate::error::{Error, Result};
use crate::linalg::{binomial, C64};
use crate::rng::{seeded, substream};
use crate::scalar::CMat;
use crate::symspace::check_range;

/// `1 − tr(P_sym ρ)` for a flat operator on `n` qubits.
fn defect_flat(x: &[C64], n: usize) -> f64 {
    let dim = 1usize << n;
    let mut by_weight: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for s in 0..dim {
        by_weight[s.count_ones() as usize].push(s);
    }
    let mut inside = 0.0;
    for (a, idx) in by_weight.iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for &r in idx {
            for &c in idx {
                acc += x[r * dim + c];
            }
        }
        inside += acc.re / binomial(n, a);
    }
    let tr: f64 = (0..dim).map(|i| x[i * dim + i].re).sum();
    tr - inside
}

/// `tr ρ − tr(P_sym ρ)`: the weight of `ρ` outside the symmetric subspace.
pub fn symmetric_defect(rho: &CMat<f64>, n: usize) -> Result<f64> {
    let d = 1usize << n;
    if rho.nrows() != d {
        return Err(Error::Dimension {
            expected: d,
            got: rho.nrows(),
        });
    }
    Ok(defect_flat(&to_flat(rho), n))
}

fn check_input(rho0: &CMat<f64>, spec: &PairMapSpec) -> Result<Vec<C64>> {
    check_range(spec.n(), 2, 10)?;
    let d = spec.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: rho0.nrows(),
        });
    }
    Ok(to_flat(rho0))
}

fn one_pair(spec: &PairMapSpec, pair: (usize, usize), x: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); x.len()];
    spec.apply_pair(pair, x, 1.0, &mut out);
    out
}

/// Defect after each of `rounds` stochastic rounds (index 0 is `ρ₀`).
pub fn simulate_rounds(
    rho0: &CMat<f64>,
    spec: &PairMapSpec,
    rounds: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut x = check_input(rho0, spec)?;
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(defect_flat(&x, spec.n()));
    for _ in 0..rounds {
        let k = rng.random_range(0..spec.pairs().len());
        x = one_pair(spec, spec.pairs()[k], &x);
        out.push(defect_flat(&x, spec.n()));
    }
    Ok(out)
}

/// Defect of `Φ^R(ρ₀)` for `R = 0..=rounds`.
pub fn deterministic_defects(
    rho0: &CMat<f64>,
    spec: &PairMapSpec,
    rounds: usize,
) -> Result<Vec<f64>> {
    let mut x = check_input(rho0, spec)?;
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(defect_flat(&x, spec.n()));
    for _ in 0..rounds {
        x = spec.apply_flat(&x);
        out.push(defect_flat(&x, spec.n()));
    }
    Ok(out)
}

/// Final state of `Φ^R(ρ₀)`.
pub fn iterate_channel(rho0: &CMat<f64>, spec: &PairMapSpec, rounds: usize) -> Result<CMat<f64>> {
    let mut x = check_input(rho0, spec)?;
    for _ in 0..rounds {
        x = spec.apply_flat(&x);
    }
    Ok(from_flat(&x, spec.dim()))
}

/// Mean and standard error of the defect trajectory over independent runs.
#[derive(Clone, Debug)]
pub struct EnsembleRounds {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub samples: usize,
}

/// `samples` independent trajectories, run `i` seeded from substream `i`
/// of `seed`.
pub fn ensemble_rounds(
    rho0: &CMat<f64>,
    spec: &PairMapSpec,
    rounds: usize,
    samples: usize,
    seed: u64,
) -> Result<EnsembleRounds> {
    check_input(rho0, spec)?;
    let runs: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s: u64 = substream(seed, i).random();
            simulate_rounds(rho0, spec, rounds, s)
        })
        .collect::<Result<_>>()?;
    let m = samples.max(1) as f64;
    let mut mean = vec![0.0; rounds + 1];
    for r in &runs {
        for (k, v) in r.iter().enumerate() {
            mean[k] += v / m;
        }
    }
    let mut var = vec![0.0; rounds + 1];
    for r in &runs {
        for (k, v) in r.iter().enumerate() {
            var[k] += (v - mean[k]).powi(2);
        }
    }
    let std_err = var
        .iter()
        .map(|s| (s / ((m - 1.0).max(1.0) * m)).sqrt())
        .collect();
    Ok(EnsembleRounds {
        mean,
        std_err,
        samples,
    })
}
