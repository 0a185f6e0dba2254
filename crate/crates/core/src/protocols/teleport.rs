//! Teleportation of a state on the symmetric subspace from an authority
//! register `A1` into the participants, consuming `|Φ⟩_{A2 P}`.
//!
//! The authority measures `A1 A2` with the rotated maximally entangled
//! projectors `K_i = √ω_i (N+1) (π(U_i) ⊗ 𝟙)|Φ₂⟩⟨Φ₂|(π(U_i)† ⊗ 𝟙)`; after
//! outcome `i` the participants hold `π(U_i)† ρ π(U_i)` and each applies
//! `U_i` to its qubit.

use nalgebra::SymmetricEigen;
use rand::Rng;
use rayon::prelude::*;

use super::{BranchOutput, BranchRecord, KrausSet, BRANCH_FIDELITY, COMPLETENESS_TOLERANCE};
use crate::designs::{vec_row_major, WeightedUnitarySet};
use crate::error::{Error, Result};
use crate::linalg::{check_density, fidelity, hermitian_part};
use crate::mes::build_phi;
use crate::rng::seeded;
use crate::scalar::CMat;
use crate::symspace::irrep;

/// Measurement on `A1 ⊗ A2` (dimension `(N+1)²`), one rank-one operator
/// per design entry.
pub fn teleport_povm(n: usize, design: &WeightedUnitarySet) -> Result<KrausSet> {
    if design.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: design.n(),
        });
    }
    let d = (n + 1) as f64;
    let operators: Vec<CMat<f64>> = design
        .entries()
        .par_iter()
        .map(|e| {
            let p = irrep(&e.unitary, n)?.into_matrix();
            // ψ = (π ⊗ 𝟙)|Φ₂⟩ = vec(π)/√(N+1)
            let psi = nalgebra::DVector::from_vec(vec_row_major(&p)).unscale(d.sqrt());
            Ok((&psi * psi.adjoint()).scale(e.weight.sqrt() * d))
        })
        .collect::<Result<_>>()?;
    let set = KrausSet::new(
        operators,
        design.weights(),
        design.entries().iter().map(|e| e.unitary.clone()).collect(),
    );
    if set.completeness_residual() > COMPLETENESS_TOLERANCE {
        return Err(Error::IncompleteDesign {
            residual: set.completeness_residual(),
            tol: COMPLETENESS_TOLERANCE,
        });
    }
    Ok(set)
}

/// All branches of a teleportation run plus one outcome drawn from their
/// probabilities.
#[derive(Clone, Debug)]
pub struct TeleportRun {
    pub branches: Vec<BranchRecord>,
    pub sampled_outcome: usize,
}

/// Unnormalized participant state after outcome `E = K†K` on `A1 A2`,
/// with the joint input `Σ_r λ_r |v_r⟩⟨v_r| ⊗ |Φ⟩⟨Φ|`.
fn participant_state(e: &CMat<f64>, parts: &[(f64, CMat<f64>)]) -> CMat<f64> {
    let d = parts[0].1.ncols();
    let mut acc = CMat::<f64>::zeros(d, d);
    for (lambda, m) in parts {
        // ρ_P[p][q] = Σ_{y,z} E[z][y] M[y][p] M̄[z][q]
        let em = e * m;
        acc += (em.transpose() * m.map(|z| z.conj())).scale(*lambda);
    }
    acc
}

/// Teleport `input` (a density operator on the `(N+1)`-dimensional
/// symmetric subspace) for every measurement outcome, and sample one
/// outcome with `seed`.
pub fn run_teleportation(
    input: &CMat<f64>,
    design: &WeightedUnitarySet,
    seed: u64,
) -> Result<TeleportRun> {
    let n = design.n();
    let d = n + 1;
    if input.nrows() != d || input.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: input.nrows(),
        });
    }
    check_density(input, 1e-10)?;
    let povm = teleport_povm(n, design)?;
    let phi = build_phi::<f64>(n)?;
    let c = phi.amplitudes();

    let eig = SymmetricEigen::new(hermitian_part(input));
    let parts: Vec<(f64, CMat<f64>)> = (0..d)
        .filter(|&r| eig.eigenvalues[r] > 0.0)
        .map(|r| {
            let v = eig.eigenvectors.column(r);
            // amplitudes over ((a1, a2), p)
            let m = CMat::<f64>::from_fn(d * d, d, |y, p| v[y / d] * c[(y % d, p)]);
            (eig.eigenvalues[r], m)
        })
        .collect();

    let label = "participants: U on every qubit; authority: none".to_string();
    let branches: Vec<BranchRecord> = (0..povm.len())
        .into_par_iter()
        .map(|i| {
            let k = &povm.operators()[i];
            let e = k.adjoint() * k;
            let raw = participant_state(&e, &parts);
            let probability = raw.trace().re;
            let u = povm.unitaries()[i].clone();
            let p = irrep(&u, n)?.into_matrix();
            let out = hermitian_part(&(&p * raw.unscale(probability) * p.adjoint()));
            Ok(BranchRecord {
                outcome: i,
                probability,
                weight: povm.weights()[i],
                fidelity: fidelity(input, &out),
                output: BranchOutput::Participants(out),
                authority_correction: None,
                participant_correction: u,
                correction_applied: label.clone(),
            })
        })
        .collect::<Result<_>>()?;

    if let Some(bad) = branches.iter().find(|r| !(r.fidelity >= BRANCH_FIDELITY)) {
        return Err(Error::BranchFidelity {
            outcome: bad.outcome,
            fidelity: bad.fidelity,
            required: BRANCH_FIDELITY,
        });
    }
    let sampled_outcome = sample_outcome(&branches, seed);
    Ok(TeleportRun {
        branches,
        sampled_outcome,
    })
}

pub(crate) fn sample_outcome(branches: &[BranchRecord], seed: u64) -> usize {
    let x: f64 = seeded(seed).random();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let mut acc = 0.0;
    for b in branches {
        acc += b.probability / total;
        if x < acc {
            return b.outcome;
        }
    }
    branches.last().map_or(0, |b| b.outcome)
}
