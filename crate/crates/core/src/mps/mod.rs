//! Matrix product state form of `|Φ⟩` and its sequential generation.
//!
//! Site 0 is the authority (physical dimension `N+1`, tensors are row
//! vectors `e_{α₀}ᵀ`); sites `1..=N` are the participants with
//! `A^[j]_i = Σ_α c_j(α, i) |α+i⟩⟨α|`, shapes `(N−j+2)×(N−j+1)`, where
//! `c_j(α, i) = √((N−j+1)C(N−j,α)) / √((N−j+2)C(N−j+1,α+i))`.

mod circuit;
pub mod cloning;

pub use circuit::{
    ancilla_zero_slice, phi_fidelity_of_register, run_circuit, sequential_circuit,
    simulate_sequential, GateOrder, SequentialCircuit, SequentialRun, SiteGate,
};
pub use cloning::{clone_demo, CloneBranch, CloneReport};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::binomial;
use crate::mes::JointState;
use crate::scalar::{cr, CMat, Cx, Real};
use crate::symspace::{check_range, MAX_EMBED_QUBITS, MAX_IRREP_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct MpsChain<T: Real> {
    n: usize,
    /// `tensors[j][i] = A^[j]_i`.
    tensors: Vec<Vec<CMat<T>>>,
}

impl<T: Real> MpsChain<T> {
    /// Wrap arbitrary tensors; bond dimensions are checked.
    pub fn from_tensors(n: usize, tensors: Vec<Vec<CMat<T>>>) -> Result<Self> {
        let chain = Self { n, tensors };
        chain.check_bonds()?;
        Ok(chain)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tensors(&self) -> &[Vec<CMat<T>>] {
        &self.tensors
    }

    pub fn site(&self, j: usize) -> &[CMat<T>] {
        &self.tensors[j]
    }

    pub fn physical_dim(&self, j: usize) -> usize {
        self.tensors[j].len()
    }

    fn check_bonds(&self) -> Result<()> {
        if self.tensors.len() != self.n + 1 {
            return Err(Error::Bond(self.tensors.len()));
        }
        let mut left = 1;
        for (j, site) in self.tensors.iter().enumerate() {
            let first = site.first().ok_or(Error::Bond(j))?;
            let (r, c) = first.shape();
            if r != left || site.iter().any(|a| a.shape() != (r, c)) {
                return Err(Error::Bond(j));
            }
            left = c;
        }
        if left != 1 {
            return Err(Error::Bond(self.n));
        }
        Ok(())
    }

    /// `‖Σ_i A^[j]†_i A^[j]_i − 𝟙‖_F`.
    pub fn gauge_residual(&self, j: usize) -> T {
        let site = &self.tensors[j];
        let c = site[0].ncols();
        let mut acc = CMat::<T>::zeros(c, c);
        for a in site {
            acc += a.adjoint() * a;
        }
        (acc - CMat::<T>::identity(c, c)).norm()
    }

    /// Largest gauge residual over the participant sites.
    pub fn max_gauge_residual(&self) -> T {
        (1..=self.n)
            .map(|j| self.gauge_residual(j))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// The closed-form tensors of `|Φ⟩`.
pub fn mps_tensors<T: Real>(n: usize) -> Result<MpsChain<T>> {
    check_range(n, 1, MAX_IRREP_QUBITS)?;
    let mut tensors = Vec::with_capacity(n + 1);
    tensors.push(
        (0..=n)
            .map(|a| {
                let mut row = CMat::<T>::zeros(1, n + 1);
                row[(0, a)] = cr(T::one());
                row
            })
            .collect(),
    );
    for j in 1..=n {
        let m = n - j;
        let site = (0..2)
            .map(|i| {
                let mut a = CMat::<T>::zeros(m + 2, m + 1);
                for alpha in 0..=m {
                    let num = ((m + 1) as f64) * binomial(m, alpha);
                    let den = ((m + 2) as f64) * binomial(m + 1, alpha + i);
                    a[(alpha + i, alpha)] = cr(T::lit((num / den).sqrt()));
                }
                a
            })
            .collect();
        tensors.push(site);
    }
    Ok(MpsChain { n, tensors })
}

type Sparse<T> = Vec<(usize, usize, Cx<T>)>;

fn sparsify<T: Real>(m: &CMat<T>) -> Sparse<T> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if !z.is_zero() {
                out.push((r, c, z));
            }
        }
    }
    out
}

struct Contraction<'a, T: Real> {
    n: usize,
    sparse: &'a [Vec<Sparse<T>>],
    rows: &'a [usize],
    /// Reference amplitude per (authority label, weight).
    reference: Vec<Vec<Option<Cx<T>>>>,
    deviation: T,
}

impl<T: Real> Contraction<'_, T> {
    fn descend(&mut self, site: usize, bits: usize, v: &[Cx<T>]) {
        if site == 0 {
            let weight = bits.count_ones() as usize;
            for (alpha, row) in self.sparse[0].iter().enumerate() {
                let amp = row
                    .iter()
                    .fold(Cx::<T>::zero(), |acc, &(_, c, z)| acc + z * v[c]);
                match self.reference[alpha][weight] {
                    None => self.reference[alpha][weight] = Some(amp),
                    Some(r) => {
                        let d = (amp - r).norm_sqr().sqrt();
                        if d > self.deviation {
                            self.deviation = d;
                        }
                    }
                }
            }
            return;
        }
        for i in 0..2 {
            let mut w = vec![Cx::<T>::zero(); self.rows[site]];
            for &(r, c, z) in &self.sparse[site][i] {
                w[r] += z * v[c];
            }
            self.descend(site - 1, bits | (i << (self.n - site)), &w);
        }
    }
}

/// Contract the chain over all `2^N` participant bitstrings and compress the
/// participant register to the Dicke basis. Amplitudes must depend only on
/// the Hamming weight of the bitstring.
pub fn mps_contract<T: Real>(chain: &MpsChain<T>) -> Result<JointState<T>> {
    let n = chain.n;
    check_range(n, 1, MAX_EMBED_QUBITS)?;
    chain.check_bonds()?;
    if chain.physical_dim(0) != n + 1 || (1..=n).any(|j| chain.physical_dim(j) != 2) {
        return Err(Error::Bond(0));
    }
    let sparse: Vec<Vec<Sparse<T>>> = chain
        .tensors
        .iter()
        .map(|site| site.iter().map(sparsify).collect())
        .collect();
    let rows: Vec<usize> = chain.tensors.iter().map(|s| s[0].nrows()).collect();
    let mut job = Contraction {
        n,
        sparse: &sparse,
        rows: &rows,
        reference: vec![vec![None; n + 1]; n + 1],
        deviation: T::zero(),
    };
    job.descend(n, 0, &[cr(T::one())]);
    let tol = T::identity_tol();
    if job.deviation > tol {
        return Err(Error::NotSymmetric(job.deviation.as_f64()));
    }
    let amps = CMat::<T>::from_fn(n + 1, n + 1, |a, b| {
        job.reference[a][b].unwrap_or_else(Cx::<T>::zero) * cr(T::lit(binomial(n, b).sqrt()))
    });
    JointState::from_unnormalized(n, amps).and_then(|(s, norm)| {
        if (norm - T::one()).abs() > tol * T::lit(1e3) {
            Err(Error::InvalidState(format!(
                "contraction has norm {}",
                norm.as_f64()
            )))
        } else {
            Ok(s)
        }
    })
}
