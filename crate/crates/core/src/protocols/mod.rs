//! LOCC protocols starting from `|Φ⟩`: transformation into any symmetric
//! pure target, teleportation of symmetric states into the participants,
//! and the obstruction to doing the latter with a projective measurement.
//!
//! Every protocol is simulated branch by branch: each measurement outcome
//! is enumerated, its probability computed exactly and the corrected output
//! compared against the intended state.

mod teleport;
mod transform;

pub use teleport::{run_teleportation, teleport_povm, TeleportRun};
pub use transform::{
    design_state, participant_correction, run_transformation, transform_povm, CorrectionDirection,
};

use crate::linalg::C64;
use crate::mes::JointState;
use crate::scalar::CMat;
use crate::symspace::Unitary2;

/// Fidelity every branch must reach.
pub const BRANCH_FIDELITY: f64 = 1.0 - 1e-9;
/// Largest accepted completeness residual `‖Σ K†K − 𝟙‖_F`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-8;

/// Measurement operators on the authority side, one per design entry.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<CMat<f64>>,
    weights: Vec<f64>,
    unitaries: Vec<Unitary2<f64>>,
    dim: usize,
    completeness_residual: f64,
}

impl KrausSet {
    fn new(operators: Vec<CMat<f64>>, weights: Vec<f64>, unitaries: Vec<Unitary2<f64>>) -> Self {
        let dim = operators.first().map_or(0, |k| k.nrows());
        let mut acc = CMat::<f64>::zeros(dim, dim);
        for k in &operators {
            acc += k.adjoint() * k;
        }
        for i in 0..dim {
            acc[(i, i)] -= C64::new(1.0, 0.0);
        }
        Self {
            operators,
            weights,
            unitaries,
            dim,
            completeness_residual: acc.norm(),
        }
    }

    pub fn operators(&self) -> &[CMat<f64>] {
        &self.operators
    }

    /// Design weight attached to each operator.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[Unitary2<f64>] {
        &self.unitaries
    }

    /// Dimension of the measured register.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `‖Σ K†K − 𝟙‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }
}

/// What a branch leaves behind after corrections.
#[derive(Clone, Debug)]
pub enum BranchOutput {
    /// Joint authority/participant pure state.
    Joint(JointState<f64>),
    /// Participant density operator in the Dicke basis.
    Participants(CMat<f64>),
}

/// One measurement outcome of a protocol run.
#[derive(Clone, Debug)]
pub struct BranchRecord {
    pub outcome: usize,
    pub probability: f64,
    /// Weight of the design entry behind this outcome.
    pub weight: f64,
    /// Fidelity of the corrected output with the intended state.
    pub fidelity: f64,
    pub output: BranchOutput,
    /// Operator applied to the authority after the measurement.
    pub authority_correction: Option<CMat<f64>>,
    /// Single-qubit gate every participant applies.
    pub participant_correction: Unitary2<f64>,
    /// Human-readable account of the corrections.
    pub correction_applied: String,
}

/// `‖G − 𝟙‖_F` with `G_rs = tr(U_s† U_r)`.
///
/// A projective version of the teleportation measurement would need the
/// `U_r` orthonormal under the trace inner product; since `tr(U†U) = 2` for
/// every qubit unitary, the diagonal alone keeps the residual at least
/// `√|R|`. `n` is carried for reporting; the Gram matrix does not depend on
/// it.
pub fn projective_residual(unitaries: &[Unitary2<f64>], _n: usize) -> f64 {
    let k = unitaries.len();
    let mut acc = 0.0;
    for r in 0..k {
        for s in 0..k {
            let g = unitaries[s]
                .adjoint()
                .compose(&unitaries[r])
                .matrix()
                .trace();
            let target = if r == s { 1.0 } else { 0.0 };
            acc += (g - C64::new(target, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}
