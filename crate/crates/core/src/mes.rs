//! The maximally entangled state `|Φ⟩` of an authority (dimension `N+1`)
//! and `N` qubit participants, stored symmetric-compressed.
//!
//! A pure joint state is an `(N+1)×(N+1)` amplitude matrix `C[α][β]`: row
//! `α` is the authority basis state, column `β` the Dicke state of the
//! participants. Authority operators act as `M C`, a collective participant
//! gate `V^{⊗N}` acts as `C π(V)ᵀ`.

use nalgebra::SymmetricEigen;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::binomial;
use crate::rng::seeded;
use crate::scalar::{cr, CMat, CVec, Cx, Real};
use crate::symspace::{
    check_range, dicke_embedding, haar_unitary2, irrep, Unitary2, MAX_FULL_QUBITS, MAX_IRREP_QUBITS,
};

#[derive(Clone, Debug, PartialEq)]
pub struct JointState<T: Real> {
    n: usize,
    amplitudes: CMat<T>,
}

fn norm_tol<T: Real>() -> T {
    T::identity_tol() * T::lit(1e3)
}

impl<T: Real> JointState<T> {
    /// Wrap a unit-norm amplitude matrix.
    pub fn new(n: usize, amplitudes: CMat<T>) -> Result<Self> {
        check_shape(n, &amplitudes)?;
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > norm_tol::<T>() {
            return Err(Error::InvalidState(format!(
                "norm {} differs from 1",
                norm.as_f64()
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// Normalize and return the original norm.
    pub fn from_unnormalized(n: usize, amplitudes: CMat<T>) -> Result<(Self, T)> {
        check_shape(n, &amplitudes)?;
        let norm = amplitudes.norm();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite norm".into()));
        }
        Ok((
            Self {
                n,
                amplitudes: amplitudes.unscale(norm),
            },
            norm,
        ))
    }

    /// Product state `|a⟩_A ⊗ |p⟩_P` with `p` given in the Dicke basis.
    pub fn product(authority: &CVec<T>, participants: &CVec<T>) -> Result<Self> {
        let n = participants.len().saturating_sub(1);
        if authority.len() != n + 1 {
            return Err(Error::Dimension {
                expected: n + 1,
                got: authority.len(),
            });
        }
        let m = authority * participants.transpose();
        Self::from_unnormalized(n, m).map(|(s, _)| s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn authority_dim(&self) -> usize {
        self.n + 1
    }

    pub fn amplitudes(&self) -> &CMat<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CMat<T> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Cx<T> {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(Cx::<T>::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.overlap(other).norm_sqr()
    }

    /// Schmidt coefficients across the authority/participant cut, descending.
    pub fn schmidt_coefficients(&self) -> Vec<T> {
        let mut s: Vec<T> = self
            .amplitudes
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        s
    }

    /// Entanglement entropy across the cut, in bits.
    pub fn entanglement_entropy(&self) -> T {
        let ln2 = T::lit(std::f64::consts::LN_2);
        self.schmidt_coefficients()
            .into_iter()
            .map(|s| s * s)
            .filter(|p| *p > T::zero())
            .fold(T::zero(), |acc, p| acc - p * p.ln() / ln2)
    }

    /// Apply a unitary on the authority.
    pub fn apply_authority(&self, op: &CMat<T>) -> Result<Self> {
        if op.nrows() != self.n + 1 || op.ncols() != self.n + 1 {
            return Err(Error::Dimension {
                expected: self.n + 1,
                got: op.nrows(),
            });
        }
        Self::new(self.n, op * &self.amplitudes)
    }

    /// Apply `u` to every participant qubit.
    pub fn apply_participants(&self, u: &Unitary2<T>) -> Result<Self> {
        let p = irrep(u, self.n)?;
        Self::new(self.n, &self.amplitudes * p.matrix().transpose())
    }

    /// `π(YUY)_A ⊗ (U^{⊗N})_P`, the symmetry that fixes `|Φ⟩`.
    pub fn apply_symmetry(&self, u: &Unitary2<T>) -> Result<Self> {
        let a = irrep(&u.y_conjugated(), self.n)?;
        self.apply_authority(a.matrix())?.apply_participants(u)
    }

    /// Reduced state of the participants in the Dicke basis.
    pub fn participant_density(&self) -> CMat<T> {
        self.amplitudes.transpose() * self.amplitudes.map(|z| z.conj())
    }

    /// Reduced state of the authority.
    pub fn authority_density(&self) -> CMat<T> {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Expansion into the full `(N+1)·2^N` register, authority index major.
    pub fn to_full(&self) -> Result<CVec<T>> {
        check_range(self.n, 1, MAX_FULL_QUBITS)?;
        let e = dicke_embedding(self.n)?;
        let d = e.full_dim();
        let mut out = CVec::<T>::zeros((self.n + 1) * d);
        for a in 0..=self.n {
            let row = CVec::<T>::from_fn(self.n + 1, |b, _| self.amplitudes[(a, b)]);
            let full = e.embed(&row)?;
            out.rows_mut(a * d, d).copy_from(&full);
        }
        Ok(out)
    }

    /// Compress a full-register state; fails if the participant part leaves
    /// the symmetric subspace.
    pub fn from_full(n: usize, full: &CVec<T>) -> Result<Self> {
        check_range(n, 1, MAX_FULL_QUBITS)?;
        let e = dicke_embedding(n)?;
        let d = e.full_dim();
        if full.len() != (n + 1) * d {
            return Err(Error::Dimension {
                expected: (n + 1) * d,
                got: full.len(),
            });
        }
        let mut amps = CMat::<T>::zeros(n + 1, n + 1);
        let mut defect = T::zero();
        for a in 0..=n {
            let block: CVec<T> = full.rows(a * d, d).into_owned();
            let d2 = e.symmetric_defect(&block)?;
            defect += d2 * d2;
            let c = e.project(&block)?;
            for b in 0..=n {
                amps[(a, b)] = c[b];
            }
        }
        let defect = defect.sqrt();
        if defect > norm_tol::<T>() {
            return Err(Error::NotSymmetric(defect.as_f64()));
        }
        Self::new(n, amps)
    }
}

fn check_shape<T: Real>(n: usize, m: &CMat<T>) -> Result<()> {
    check_range(n, 1, MAX_IRREP_QUBITS)?;
    if m.nrows() != n + 1 || m.ncols() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

/// Haar-random symmetric pure joint state.
pub fn random_joint_state<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> JointState<f64> {
    let d = n + 1;
    let v = crate::linalg::random_pure_state(d * d, rng);
    let m = CMat::<f64>::from_fn(d, d, |r, c| v[r * d + c]);
    JointState::from_unnormalized(n, m)
        .expect("random state has positive norm")
        .0
}

/// `|Φ⟩ = (N+1)^{-1/2} Σ_α |α⟩_A |α⟩_P`.
///
/// In the full register this is `Σ_α Σ_{wt(i)=α} ((N+1)C(N,α))^{-1/2}
/// |α⟩|i₁…i_N⟩`.
pub fn build_phi<T: Real>(n: usize) -> Result<JointState<T>> {
    check_range(n, 1, MAX_IRREP_QUBITS)?;
    let amp = T::one() / T::lit((n + 1) as f64).sqrt();
    JointState::new(n, CMat::<T>::identity(n + 1, n + 1) * cr(amp))
}

/// The projected-singlet state and the norm it had before normalization.
#[derive(Clone, Debug)]
pub struct SingletState<T: Real> {
    pub state: JointState<T>,
    pub norm_squared: T,
}

/// `(P_sym ⊗ 𝟙_P)(|01⟩ − |10⟩)^{⊗N}`, normalized.
///
/// Each participant shares an unnormalized singlet with one virtual qubit of
/// the authority; the virtual register is then projected onto its symmetric
/// subspace, whose Dicke basis labels the authority.
pub fn build_psi_singlet<T: Real>(n: usize) -> Result<SingletState<T>> {
    check_range(n, 1, MAX_FULL_QUBITS)?;
    let e = dicke_embedding(n)?;
    let d = e.full_dim();
    let mask = d - 1;
    // projected[α][y]: amplitude of Dicke |α⟩ on the virtual qubits and
    // bitstring y on the participants. A singlet pairs virtual bit v with
    // participant bit 1−v, sign −1 per virtual 1.
    let mut projected = CMat::<T>::zeros(n + 1, d);
    for x in 0..d {
        let alpha = x.count_ones() as usize;
        let sign = if alpha.is_multiple_of(2) {
            T::one()
        } else {
            -T::one()
        };
        let y = !x & mask;
        projected[(alpha, y)] += cr(sign * T::lit(e.entry(x, alpha)));
    }
    let norm_squared = projected.norm_squared();

    let mut amps = CMat::<T>::zeros(n + 1, n + 1);
    let mut defect = T::zero();
    for a in 0..=n {
        let row: CVec<T> = projected.row(a).transpose();
        let dd = e.symmetric_defect(&row)?;
        defect += dd * dd;
        let c = e.project(&row)?;
        for b in 0..=n {
            amps[(a, b)] = c[b];
        }
    }
    if defect.sqrt() > norm_tol::<T>() {
        return Err(Error::NotSymmetric(defect.sqrt().as_f64()));
    }
    let (state, _) = JointState::from_unnormalized(n, amps)?;
    Ok(SingletState {
        state,
        norm_squared,
    })
}

/// The numerically determined invariant subspace of `π(YUY) ⊗ U^{⊗N}`.
#[derive(Clone, Debug)]
pub struct FixedSubspace {
    pub dimension: usize,
    pub basis: Vec<JointState<f64>>,
    /// Leading eigenvalues of the averaged operator, descending.
    pub leading_eigenvalues: Vec<f64>,
}

pub const FIXED_EIGENVALUE_THRESHOLD: f64 = 1.0 - 1e-6;
const FIXED_GAP_REQUIRED: f64 = 1.0 - 1e-3;

/// Average the Hermitian part of `G(U) = π(YUY)_A ⊗ π(U)_P` over Haar
/// samples (taken in `SU(2)`, where the invariance is exact) and read off
/// the eigenvalue-one eigenspace.
pub fn fixed_subspace_dimension(n: usize, samples: usize, seed: u64) -> Result<FixedSubspace> {
    check_range(n, 1, 8)?;
    let d = n + 1;
    let mut rng = seeded(seed);
    let mut acc = CMat::<f64>::zeros(d * d, d * d);
    for _ in 0..samples {
        let u = haar_unitary2::<f64, _>(&mut rng).to_special();
        let a = irrep(&u.y_conjugated(), n)?;
        let p = irrep(&u, n)?;
        acc += a.matrix().kronecker(p.matrix());
    }
    let avg = acc.unscale(samples.max(1) as f64);
    let herm = (&avg + avg.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..d * d).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dimension = count_unit_eigenvalues(&values)?;
    let basis = order[..dimension]
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            let m = CMat::<f64>::from_fn(d, d, |a, b| v[a * d + b]);
            JointState::from_unnormalized(n, m).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedSubspace {
        dimension,
        basis,
        leading_eigenvalues: values.into_iter().take(dimension + 3).collect(),
    })
}

/// Number of leading eigenvalues (sorted descending) above the unit
/// threshold; errors when the next one is too close to tell apart.
pub(crate) fn count_unit_eigenvalues(values: &[f64]) -> Result<usize> {
    let dimension = values
        .iter()
        .take_while(|&&v| v > FIXED_EIGENVALUE_THRESHOLD)
        .count();
    match values.get(dimension) {
        Some(&next) if next > FIXED_GAP_REQUIRED => Err(Error::NoSpectralGap(next)),
        _ => Ok(dimension),
    }
}

/// Expected full-register amplitude of `|Φ⟩` on `|α⟩|i⟩`; used by tests.
pub fn phi_full_amplitude(n: usize, alpha: usize, bits: usize) -> f64 {
    if bits.count_ones() as usize == alpha {
        1.0 / ((n + 1) as f64 * binomial(n, alpha)).sqrt()
    } else {
        0.0
    }
}
