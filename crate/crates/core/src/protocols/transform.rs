//! Transformation of `|Φ⟩` into a known symmetric pure state.
//!
//! Write the target as `D = A Σ B†` (singular value decomposition of its
//! amplitude matrix), `σ = B Σ B†` and `W₀ = A B†`, so `D = W₀ σ`. Outcome
//! `i` of the authority measurement `K_i = √(ω_i(N+1)) π(U_i) σ π(U_i)†`
//! leaves `π(U_i) σ π(U_i)†` (times a constant) as amplitude matrix; the
//! participants undo the right factor with a Y-conjugated gate and the
//! authority applies `W₀ π(U_i)†`.

use std::sync::OnceLock;

use rayon::prelude::*;

use super::{BranchOutput, BranchRecord, KrausSet, BRANCH_FIDELITY, COMPLETENESS_TOLERANCE};
use crate::designs::WeightedUnitarySet;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mes::{build_phi, random_joint_state, JointState};
use crate::rng::seeded;
use crate::scalar::CMat;
use crate::symspace::{haar_unitary2, irrep, Unitary2};

/// Which single-qubit gate the participants apply after outcome `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionDirection {
    /// `Y U Y`.
    Conjugated,
    /// `Y U† Y`.
    ConjugatedAdjoint,
}

impl CorrectionDirection {
    pub fn gate(self, u: &Unitary2<f64>) -> Unitary2<f64> {
        match self {
            CorrectionDirection::Conjugated => u.y_conjugated(),
            CorrectionDirection::ConjugatedAdjoint => u.adjoint().y_conjugated(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CorrectionDirection::Conjugated => "Y·U·Y",
            CorrectionDirection::ConjugatedAdjoint => "Y·U†·Y",
        }
    }
}

struct SchmidtForm {
    sigma: CMat<f64>,
    w0: CMat<f64>,
}

fn schmidt_form(target: &JointState<f64>) -> SchmidtForm {
    let svd = target.amplitudes().clone().svd(true, true);
    let a = svd.u.expect("requested");
    let b = svd.v_t.expect("requested").adjoint();
    let d = a.nrows();
    let mut s = CMat::<f64>::zeros(d, d);
    for (i, &l) in svd.singular_values.iter().enumerate() {
        s[(i, i)] = C64::new(l, 0.0);
    }
    SchmidtForm {
        sigma: &b * s * b.adjoint(),
        w0: a * b.adjoint(),
    }
}

/// `σ² = C†C`: the state a design must twirl exactly for `target`.
pub fn design_state(target: &JointState<f64>) -> CMat<f64> {
    let c = target.amplitudes();
    c.adjoint() * c
}

fn kraus_operator(
    n: usize,
    sigma: &CMat<f64>,
    u: &Unitary2<f64>,
    weight: f64,
) -> Result<CMat<f64>> {
    let p = irrep(u, n)?.into_matrix();
    let c = (weight * (n + 1) as f64).sqrt();
    Ok((&p * sigma * p.adjoint()).scale(c))
}

/// Measurement for turning `|Φ⟩` into `target`, one operator per design
/// entry. Fails when `Σ K†K` misses the identity by more than `1e-8`.
pub fn transform_povm(target: &JointState<f64>, design: &WeightedUnitarySet) -> Result<KrausSet> {
    let n = target.n();
    if design.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: design.n(),
        });
    }
    let form = schmidt_form(target);
    let operators: Vec<CMat<f64>> = design
        .entries()
        .par_iter()
        .map(|e| kraus_operator(n, &form.sigma, &e.unitary, e.weight))
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

struct Branch {
    probability: f64,
    state: JointState<f64>,
    authority: CMat<f64>,
    participant: Unitary2<f64>,
}

fn simulate_branch(
    phi: &JointState<f64>,
    form: &SchmidtForm,
    kraus: &CMat<f64>,
    u: &Unitary2<f64>,
    direction: CorrectionDirection,
) -> Result<Branch> {
    let n = phi.n();
    let m = kraus * phi.amplitudes();
    let probability = m.norm_squared();
    let (post, _) = JointState::from_unnormalized(n, m)?;
    let participant = direction.gate(u);
    let p = irrep(u, n)?.into_matrix();
    let authority = &form.w0 * p.adjoint();
    let state = post
        .apply_participants(&participant)?
        .apply_authority(&authority)?;
    Ok(Branch {
        probability,
        state,
        authority,
        participant,
    })
}

fn direction_works(direction: CorrectionDirection) -> bool {
    for (n, seed) in [(1usize, 11u64), (2, 12)] {
        let mut rng = seeded(seed);
        let target = random_joint_state(n, &mut rng);
        let u = haar_unitary2::<f64, _>(&mut rng);
        let (Ok(phi), form) = (build_phi::<f64>(n), schmidt_form(&target)) else {
            return false;
        };
        let Ok(k) = kraus_operator(n, &form.sigma, &u, 1.0) else {
            return false;
        };
        match simulate_branch(&phi, &form, &k, &u, direction) {
            Ok(b) if b.state.fidelity(&target) >= BRANCH_FIDELITY => {}
            _ => return false,
        }
    }
    true
}

/// The participant correction that makes a single branch exact at
/// `n = 1, 2` for a random target and a random outcome. Evaluated once per
/// process.
pub fn participant_correction() -> Result<CorrectionDirection> {
    static RESOLVED: OnceLock<Option<CorrectionDirection>> = OnceLock::new();
    RESOLVED
        .get_or_init(|| {
            [
                CorrectionDirection::ConjugatedAdjoint,
                CorrectionDirection::Conjugated,
            ]
            .into_iter()
            .find(|&d| direction_works(d))
        })
        .ok_or(Error::BranchFidelity {
            outcome: 0,
            fidelity: 0.0,
            required: BRANCH_FIDELITY,
        })
}

/// Run the transformation from `|Φ⟩` to `target` for every outcome, or only
/// for `forced_outcome`. Fails on the first branch whose corrected state
/// misses the target by more than `1e-9` in fidelity.
pub fn run_transformation(
    target: &JointState<f64>,
    design: &WeightedUnitarySet,
    forced_outcome: Option<usize>,
) -> Result<Vec<BranchRecord>> {
    let povm = transform_povm(target, design)?;
    let direction = participant_correction()?;
    let n = target.n();
    let phi = build_phi::<f64>(n)?;
    let form = schmidt_form(target);
    let outcomes: Vec<usize> = match forced_outcome {
        Some(i) if i < povm.len() => vec![i],
        Some(i) => {
            return Err(Error::Dimension {
                expected: povm.len(),
                got: i,
            })
        }
        None => (0..povm.len()).collect(),
    };
    let label = format!(
        "participants: {} on every qubit; authority: W0·π(U)† with W0 the Schmidt basis change",
        direction.label()
    );
    let records: Vec<BranchRecord> = outcomes
        .par_iter()
        .map(|&i| {
            let u = &povm.unitaries()[i];
            let b = simulate_branch(&phi, &form, &povm.operators()[i], u, direction)?;
            Ok(BranchRecord {
                outcome: i,
                probability: b.probability,
                weight: povm.weights()[i],
                fidelity: b.state.fidelity(target),
                output: BranchOutput::Joint(b.state),
                authority_correction: Some(b.authority),
                participant_correction: b.participant,
                correction_applied: label.clone(),
            })
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = records.iter().find(|r| !(r.fidelity >= BRANCH_FIDELITY)) {
        return Err(Error::BranchFidelity {
            outcome: bad.outcome,
            fidelity: bad.fidelity,
            required: BRANCH_FIDELITY,
        });
    }
    Ok(records)
}
