//! Symmetric universal `1 → N` cloning by teleporting the cloner output
//! into the participants.
//!
//! The cloner is searched among covariant channels `C² → H_sym`. Their Choi
//! operators, after the `Y` twist on the input, lie in the span of the
//! projectors `P_+` (symmetric subspace of `N+1` qubits) and `P_−`
//! (its complement inside `C² ⊗ H_sym`); trace preservation fixes
//! `b = (2 − a(N+2))/N`. The output for input `|0⟩` is diagonal in the Dicke
//! basis and the single-qubit fidelity is affine in `a`, so the optimum sits
//! at an end of `[0, 2/(N+2)]`.

use nalgebra::Matrix2;

use crate::designs::WeightedUnitarySet;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::protocols::{run_teleportation, BranchOutput};
use crate::scalar::{CMat, CVec};
use crate::symspace::{check_range, irrep, Unitary2};

/// The optimal covariant cloner for a given `N`.
#[derive(Clone, Debug)]
pub struct IdealCloner {
    pub n: usize,
    /// Weight of `P_+` in the twisted Choi operator.
    pub a: f64,
    /// Weight of `P_−`.
    pub b: f64,
    /// Output for input `|0⟩`, in the Dicke basis.
    pub rho0: CMat<f64>,
    /// Single-qubit fidelity of every output copy.
    pub fidelity: f64,
}

/// Reduced state of one qubit of a symmetric `N`-qubit state.
pub fn single_qubit_marginal(rho: &CMat<f64>) -> CMat<f64> {
    let n = rho.nrows() - 1;
    let nf = n as f64;
    let mut out = CMat::<f64>::zeros(2, 2);
    for k in 0..=n {
        let kf = k as f64;
        out[(0, 0)] += rho[(k, k)] * ((nf - kf) / nf);
        out[(1, 1)] += rho[(k, k)] * (kf / nf);
        if k < n {
            let c = ((nf - kf) * (kf + 1.0)).sqrt() / nf;
            out[(0, 1)] += rho[(k, k + 1)] * c;
            out[(1, 0)] += rho[(k + 1, k)] * c;
        }
    }
    out
}

/// Diagonal of `⟨1|P_+|1⟩_in` on `H_sym(N)`: the overlap of `|1⟩|k⟩` with
/// the `(N+1)`-qubit Dicke state `|k+1⟩`, squared.
fn p_plus_block(n: usize) -> Vec<f64> {
    (0..=n).map(|k| (k + 1) as f64 / (n + 1) as f64).collect()
}

fn cloner_output(n: usize, a: f64) -> (f64, CMat<f64>) {
    let b = (2.0 - a * (n + 2) as f64) / n as f64;
    let plus = p_plus_block(n);
    let rho0 = CMat::<f64>::from_fn(n + 1, n + 1, |r, c| {
        if r == c {
            C64::new(a * plus[r] + b * (1.0 - plus[r]), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (b, rho0)
}

fn copy_fidelity(rho0: &CMat<f64>) -> f64 {
    single_qubit_marginal(rho0)[(0, 0)].re
}

/// Optimal covariant `1 → N` cloner with output on the symmetric subspace.
pub fn ideal_cloner(n: usize) -> Result<IdealCloner> {
    check_range(n, 1, crate::symspace::MAX_IRREP_QUBITS)?;
    let a_max = 2.0 / (n + 2) as f64;
    let (a, fid) = [0.0, a_max]
        .into_iter()
        .map(|a| (a, copy_fidelity(&cloner_output(n, a).1)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let (b, rho0) = cloner_output(n, a);
    Ok(IdealCloner {
        n,
        a,
        b,
        rho0,
        fidelity: fid,
    })
}

/// The unitary `V` with `V|0⟩ = ψ`.
fn preparing_unitary(psi: &CVec<f64>) -> Result<Unitary2<f64>> {
    if psi.len() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("input qubit has norm {norm}")));
    }
    let (p0, p1) = (psi[0], psi[1]);
    Unitary2::new(Matrix2::new(p0, -p1.conj(), p1, p0.conj()))
}

#[derive(Clone, Debug)]
pub struct CloneBranch {
    pub outcome: usize,
    pub probability: f64,
    /// Fidelity of the teleported state with the cloner output.
    pub teleport_fidelity: f64,
    /// Fidelity of a participant's qubit with the input.
    pub copy_fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct CloneReport {
    pub n: usize,
    pub ideal_fidelity: f64,
    pub cloner_a: f64,
    pub branches: Vec<CloneBranch>,
    pub sampled_outcome: usize,
    /// Largest Frobenius distance between two branch outputs.
    pub branch_spread: f64,
}

/// Clone `input` onto the `n` participants: compute the ideal cloner output,
/// teleport it with the channel design and report each branch.
pub fn clone_demo(
    n: usize,
    input: &CVec<f64>,
    design: &WeightedUnitarySet,
    seed: u64,
) -> Result<CloneReport> {
    if design.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: design.n(),
        });
    }
    let cloner = ideal_cloner(n)?;
    let v = preparing_unitary(input)?;
    let target = irrep(&v, n)?.conjugate(&cloner.rho0);
    let run = run_teleportation(&target, design, seed)?;
    let psi = input;
    let mut outputs = Vec::with_capacity(run.branches.len());
    let branches: Vec<CloneBranch> = run
        .branches
        .iter()
        .map(|b| {
            let BranchOutput::Participants(out) = &b.output else {
                unreachable!("teleportation yields participant states")
            };
            let m = single_qubit_marginal(out);
            let f = (psi.adjoint() * &m * psi)[(0, 0)].re;
            outputs.push(out.clone());
            CloneBranch {
                outcome: b.outcome,
                probability: b.probability,
                teleport_fidelity: b.fidelity,
                copy_fidelity: f,
            }
        })
        .collect();
    let mut spread = 0.0f64;
    for i in 0..outputs.len() {
        for j in (i + 1)..outputs.len() {
            spread = spread.max((&outputs[i] - &outputs[j]).norm());
        }
    }
    Ok(CloneReport {
        n,
        ideal_fidelity: cloner.fidelity,
        cloner_a: cloner.a,
        branches,
        sampled_outcome: run.sampled_outcome,
        branch_spread: spread,
    })
}
