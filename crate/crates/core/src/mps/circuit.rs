//! Sequential generation circuit: one gate per site acting on that site and
//! an `(N+1)`-dimensional ancilla, applied from site `N` down to site 0.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{mps_tensors, MpsChain};
use crate::error::{Error, Result};
use crate::mes::{build_phi, JointState};
use crate::scalar::{cr, CMat, CVec, Cx, Real};
use crate::symspace::check_range;

pub const MAX_SEQUENTIAL_QUBITS: usize = 10;

/// Unitary on `site ⊗ ancilla`, basis index `phys·(N+1) + ancilla`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteGate<T: Real> {
    pub site: usize,
    pub phys_dim: usize,
    pub matrix: CMat<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequentialCircuit<T: Real> {
    pub n: usize,
    pub ancilla_dim: usize,
    pub gates: Vec<SiteGate<T>>,
}

impl<T: Real> SequentialCircuit<T> {
    pub fn max_unitarity_defect(&self) -> T {
        self.gates
            .iter()
            .map(|g| crate::linalg::unitarity_defect(&g.matrix))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOrder {
    /// `V_[N]` first, `V_[0]` last.
    Forward,
    /// `V_[0]` first; does not generate `|Φ⟩`.
    Reversed,
}

/// Complete a set of orthonormal columns to a unitary. At every step the
/// standard basis vector with the largest component orthogonal to the
/// current span is added (lowest index on ties).
fn complete_columns<T: Real>(dim: usize, cols: &[CVec<T>]) -> Vec<CVec<T>> {
    let mut basis: Vec<CVec<T>> = cols.to_vec();
    let mut extra = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(T, CVec<T>)> = None;
        for k in 0..dim {
            let mut v = CVec::<T>::zeros(dim);
            v[k] = cr(T::one());
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dotc(&v);
                    v -= b * p;
                }
            }
            let nv = v.norm();
            if best.as_ref().is_none_or(|(bn, _)| nv > *bn + T::lit(1e-12)) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("dim > 0");
        let v = v.unscale(nv);
        basis.push(v.clone());
        extra.push(v);
    }
    extra
}

/// Build `V_[j]` from the site tensors: on `|0⟩_j|r⟩_a` it acts as
/// `Σ_{i,s} ⟨s|A^[j]_i|r⟩ |i⟩_j|s⟩_a`; every other input column comes from
/// a deterministic orthonormal completion.
pub fn sequential_circuit<T: Real>(chain: &MpsChain<T>) -> Result<SequentialCircuit<T>> {
    let n = chain.n();
    let ad = n + 1;
    let tol = T::lit(1e-10).max(T::identity_tol() * T::lit(10.0));
    let mut gates = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let site = chain.site(j);
        let phys = site.len();
        let dim = phys * ad;
        let (rows, cols) = site[0].shape();
        if rows > ad || cols > ad {
            return Err(Error::Bond(j));
        }
        let defined: Vec<CVec<T>> = (0..cols)
            .map(|r| {
                let mut v = CVec::<T>::zeros(dim);
                for (i, a) in site.iter().enumerate() {
                    for s in 0..rows {
                        v[i * ad + s] = a[(s, r)];
                    }
                }
                v
            })
            .collect();
        let mut dev = T::zero();
        for (p, a) in defined.iter().enumerate() {
            for (q, b) in defined.iter().enumerate() {
                let want = if p == q { T::one() } else { T::zero() };
                let d = (a.dotc(b) - cr(want)).norm_sqr().sqrt();
                if d > dev {
                    dev = d;
                }
            }
        }
        if dev > tol {
            return Err(Error::Gauge {
                site: j,
                deviation: dev.as_f64(),
            });
        }
        let extra = complete_columns(dim, &defined);
        let mut matrix = CMat::<T>::zeros(dim, dim);
        let mut extra_iter = extra.into_iter();
        for input in 0..dim {
            let (p, r) = (input / ad, input % ad);
            let col = if p == 0 && r < cols {
                defined[r].clone()
            } else {
                extra_iter.next().expect("completion size")
            };
            matrix.set_column(input, &col);
        }
        gates.push(SiteGate {
            site: j,
            phys_dim: phys,
            matrix,
        });
    }
    Ok(SequentialCircuit {
        n,
        ancilla_dim: ad,
        gates,
    })
}

/// Register layout: authority ⊗ qubits `1..=N` (participant 1 most
/// significant) ⊗ ancilla, ancilla fastest.
fn apply_site_gate<T: Real>(n: usize, state: &mut CVec<T>, gate: &SiteGate<T>) {
    let ad = n + 1;
    let qubits = 1usize << n;
    let stride = if gate.site == 0 {
        qubits * ad
    } else {
        (1usize << (n - gate.site)) * ad
    };
    let phys = gate.phys_dim;
    let dim = phys * ad;
    let total = state.len();
    let mut buf = vec![Cx::<T>::zero(); dim];
    let mut out = vec![Cx::<T>::zero(); dim];
    let mut base = 0;
    while base < total {
        // base runs over indices with ancilla 0 and site digit 0
        if (base / stride) % phys == 0 {
            for p in 0..phys {
                for a in 0..ad {
                    buf[p * ad + a] = state[base + p * stride + a];
                }
            }
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = Cx::<T>::zero();
                for (c, b) in buf.iter().enumerate() {
                    acc += gate.matrix[(r, c)] * *b;
                }
                *o = acc;
            }
            for p in 0..phys {
                for a in 0..ad {
                    state[base + p * stride + a] = out[p * ad + a];
                }
            }
        }
        base += ad;
    }
}

/// Run the circuit on `|0⟩_A|0…0⟩_P|0⟩_a` and return the full register.
pub fn run_circuit<T: Real>(circuit: &SequentialCircuit<T>, order: GateOrder) -> Result<CVec<T>> {
    let n = circuit.n;
    check_range(n, 1, MAX_SEQUENTIAL_QUBITS)?;
    let len = (n + 1) * (1usize << n) * (n + 1);
    let mut state = CVec::<T>::zeros(len);
    state[0] = cr(T::one());
    let gates: Vec<&SiteGate<T>> = match order {
        GateOrder::Forward => circuit.gates.iter().rev().collect(),
        GateOrder::Reversed => circuit.gates.iter().collect(),
    };
    for g in gates {
        apply_site_gate(n, &mut state, g);
    }
    Ok(state)
}

/// Outcome of the sequential preparation.
#[derive(Clone, Debug)]
pub struct SequentialRun<T: Real> {
    pub state: JointState<T>,
    /// `1 − ‖(𝟙 ⊗ ⟨0|_a)ψ‖²`.
    pub ancilla_defect: T,
    /// `|⟨Φ|⊗⟨0|_a |ψ⟩|²`.
    pub fidelity: T,
    pub circuit: SequentialCircuit<T>,
}

/// Split off the ancilla: amplitudes with ancilla `|0⟩` and the weight
/// left elsewhere.
pub fn ancilla_zero_slice<T: Real>(n: usize, register: &CVec<T>) -> (CVec<T>, T) {
    let ad = n + 1;
    let slice = CVec::<T>::from_fn(register.len() / ad, |k, _| register[k * ad]);
    let defect = T::one() - slice.norm_squared();
    (slice, defect)
}

/// `|⟨Φ|⊗⟨0|_a|ψ⟩|²` for a full register.
pub fn phi_fidelity_of_register<T: Real>(n: usize, register: &CVec<T>) -> Result<T> {
    let (slice, _) = ancilla_zero_slice(n, register);
    let phi = build_phi::<T>(n)?.to_full()?;
    Ok(phi.dotc(&slice).norm_sqr())
}

/// Prepare `|Φ⟩` with the synthesized circuit and check the ancilla ends
/// in `|0⟩`.
pub fn simulate_sequential<T: Real>(n: usize) -> Result<SequentialRun<T>> {
    check_range(n, 1, MAX_SEQUENTIAL_QUBITS)?;
    let circuit = sequential_circuit(&mps_tensors::<T>(n)?)?;
    let register = run_circuit(&circuit, GateOrder::Forward)?;
    let (slice, defect) = ancilla_zero_slice(n, &register);
    let tol = T::lit(1e-10).max(T::identity_tol() * T::lit(100.0));
    if defect.abs() > tol {
        return Err(Error::AncillaEntangled(defect.as_f64()));
    }
    let state = JointState::from_full(n, &slice)?;
    let fidelity = state.fidelity(&build_phi::<T>(n)?);
    Ok(SequentialRun {
        state,
        ancilla_defect: defect,
        fidelity,
        circuit,
    })
}
