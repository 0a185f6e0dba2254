//! Linear algebra of the symmetric subspace of `N` qubits.
//!
//! The Dicke basis `|α⟩` (normalized sum over bitstrings of Hamming weight
//! `α`), the irreducible action `π(U) = U^{⊗N}|_{H_sym}`, Haar sampling on
//! `U(2)` and Monte-Carlo or weighted twirls.
//!
//! Full-register bitstrings are indexed with participant 1 as the most
//! significant bit.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{binomial, check_density, random_gaussian_complex, unitarity_defect};
use crate::rng::seeded;
use crate::scalar::{cr, cx, CMat, CVec, Cx, Real};

/// Largest participant count for which the Dicke embedding is materialized.
pub const MAX_EMBED_QUBITS: usize = 20;
/// Largest participant count for dense full-register operators.
pub const MAX_FULL_QUBITS: usize = 12;
/// Largest participant count accepted by [`irrep`].
pub const MAX_IRREP_QUBITS: usize = 60;

/// The symmetric subspace of `n` qubits, of dimension `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymSpace {
    n: usize,
}

impl SymSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_IRREP_QUBITS {
            return Err(Error::OutOfRange {
                n,
                min: 1,
                max: MAX_IRREP_QUBITS,
            });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Normalization `1/√C(N,α)` of the Dicke state `|α⟩`.
    pub fn dicke_norm(&self, alpha: usize) -> f64 {
        1.0 / binomial(self.n, alpha).sqrt()
    }
}

pub(crate) fn check_range(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        Err(Error::OutOfRange { n, min, max })
    } else {
        Ok(())
    }
}

/// A single-qubit unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary2<T: Real> {
    m: Matrix2<Cx<T>>,
}

impl<T: Real> Unitary2<T> {
    pub fn new(m: Matrix2<Cx<T>>) -> Result<Self> {
        let defect = (m.adjoint() * m - Matrix2::identity()).norm();
        if !(defect <= T::identity_tol()) {
            return Err(Error::NotUnitary(defect.as_f64()));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: [[Cx<T>; 2]; 2]) -> Result<Self> {
        Self::new(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    fn trusted(m: Matrix2<Cx<T>>) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::trusted(Matrix2::identity())
    }

    pub fn pauli_x() -> Self {
        Self::trusted(Matrix2::new(cx(0., 0.), cx(1., 0.), cx(1., 0.), cx(0., 0.)))
    }

    pub fn pauli_y() -> Self {
        Self::trusted(Matrix2::new(
            cx(0., 0.),
            cx(0., -1.),
            cx(0., 1.),
            cx(0., 0.),
        ))
    }

    pub fn pauli_z() -> Self {
        Self::trusted(Matrix2::new(
            cx(1., 0.),
            cx(0., 0.),
            cx(0., 0.),
            cx(-1., 0.),
        ))
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self::trusted(Matrix2::new(
            cx(1., 0.),
            cx(0., 0.),
            cx(0., 0.),
            cx(theta.cos(), theta.sin()),
        ))
    }

    /// The Pauli set `{𝟙, X, Y, Z}`.
    pub fn paulis() -> [Self; 4] {
        [
            Self::identity(),
            Self::pauli_x(),
            Self::pauli_y(),
            Self::pauli_z(),
        ]
    }

    pub fn matrix(&self) -> &Matrix2<Cx<T>> {
        &self.m
    }

    pub fn entry(&self, r: usize, c: usize) -> Cx<T> {
        self.m[(r, c)]
    }

    pub fn adjoint(&self) -> Self {
        Self::trusted(self.m.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self::trusted(self.m.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::trusted(self.m.transpose())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::trusted(self.m * other.m)
    }

    pub fn det(&self) -> Cx<T> {
        self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]
    }

    /// `Y U Y`.
    pub fn y_conjugated(&self) -> Self {
        let y = Self::pauli_y();
        y.compose(self).compose(&y)
    }

    /// The `SU(2)` representative `U / √det U`.
    pub fn to_special(&self) -> Self {
        let s = nalgebra::ComplexField::sqrt(self.det());
        Self::trusted(self.m.map(|z| z / s))
    }

    pub fn to_dmatrix(&self) -> CMat<T> {
        CMat::<T>::from_fn(2, 2, |r, c| self.m[(r, c)])
    }

    pub fn cast<S: Real>(&self) -> Unitary2<S> {
        Unitary2::trusted(
            self.m
                .map(|z| Complex::new(S::lit(z.re.as_f64()), S::lit(z.im.as_f64()))),
        )
    }
}

/// The isometry `E: H_sym → (C²)^{⊗N}` whose columns are the Dicke states.
///
/// Stored implicitly; [`DickeEmbedding::to_matrix`] materializes it for
/// small registers.
#[derive(Clone, Copy, Debug)]
pub struct DickeEmbedding {
    n: usize,
}

pub fn dicke_embedding(n: usize) -> Result<DickeEmbedding> {
    check_range(n, 1, MAX_EMBED_QUBITS)?;
    Ok(DickeEmbedding { n })
}

impl DickeEmbedding {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_dim(&self) -> usize {
        1 << self.n
    }

    pub fn sym_dim(&self) -> usize {
        self.n + 1
    }

    /// `⟨x|α⟩`.
    pub fn entry(&self, x: usize, alpha: usize) -> f64 {
        if x.count_ones() as usize == alpha {
            1.0 / binomial(self.n, alpha).sqrt()
        } else {
            0.0
        }
    }

    /// Dense `2^N × (N+1)` matrix; registers up to [`MAX_FULL_QUBITS`].
    pub fn to_matrix<T: Real>(&self) -> Result<CMat<T>> {
        check_range(self.n, 1, MAX_FULL_QUBITS)?;
        Ok(CMat::<T>::from_fn(
            self.full_dim(),
            self.sym_dim(),
            |x, a| cr(T::lit(self.entry(x, a))),
        ))
    }

    /// Real dense matrix, for the real-arithmetic channel code.
    pub fn to_real_matrix(&self) -> Result<DMatrix<f64>> {
        check_range(self.n, 1, MAX_FULL_QUBITS)?;
        Ok(DMatrix::from_fn(self.full_dim(), self.sym_dim(), |x, a| {
            self.entry(x, a)
        }))
    }

    /// `E v`.
    pub fn embed<T: Real>(&self, v: &CVec<T>) -> Result<CVec<T>> {
        if v.len() != self.sym_dim() {
            return Err(Error::Dimension {
                expected: self.sym_dim(),
                got: v.len(),
            });
        }
        let norms: Vec<T> = (0..=self.n)
            .map(|a| T::lit(1.0 / binomial(self.n, a).sqrt()))
            .collect();
        Ok(CVec::<T>::from_fn(self.full_dim(), |x, _| {
            let a = x.count_ones() as usize;
            v[a] * cr(norms[a])
        }))
    }

    /// `E† w`.
    pub fn project<T: Real>(&self, w: &CVec<T>) -> Result<CVec<T>> {
        if w.len() != self.full_dim() {
            return Err(Error::Dimension {
                expected: self.full_dim(),
                got: w.len(),
            });
        }
        let mut out = CVec::<T>::zeros(self.sym_dim());
        for (x, z) in w.iter().enumerate() {
            out[x.count_ones() as usize] += *z;
        }
        for a in 0..=self.n {
            out[a] *= cr(T::lit(1.0 / binomial(self.n, a).sqrt()));
        }
        Ok(out)
    }

    /// `‖w − E E† w‖`: the weight of `w` outside the symmetric subspace.
    pub fn symmetric_defect<T: Real>(&self, w: &CVec<T>) -> Result<T> {
        let back = self.embed(&self.project(w)?)?;
        Ok((w - back).norm())
    }
}

/// `π(U) = U^{⊗N}|_{H_sym}` in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepOp<T: Real> {
    n: usize,
    matrix: CMat<T>,
}

impl<T: Real> IrrepOp<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: CMat::<T>::identity(n + 1, n + 1),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `π(U) ρ π(U)†`.
    pub fn conjugate(&self, rho: &CMat<T>) -> CMat<T> {
        &self.matrix * rho * self.matrix.adjoint()
    }

    pub fn unitarity_defect(&self) -> T {
        unitarity_defect(&self.matrix)
    }
}

/// Binomial expansion of `(a x + b y)^m` as coefficients of `x^{m−k} y^k`.
fn binomial_row<T: Real>(a: Cx<T>, b: Cx<T>, m: usize) -> Vec<Cx<T>> {
    let mut apow = vec![cr(T::one()); m + 1];
    let mut bpow = vec![cr(T::one()); m + 1];
    for k in 1..=m {
        apow[k] = apow[k - 1] * a;
        bpow[k] = bpow[k - 1] * b;
    }
    (0..=m)
        .map(|k| apow[m - k] * bpow[k] * cr(T::lit(binomial(m, k))))
        .collect()
}

/// The irreducible action of `u` on the symmetric subspace of `n` qubits.
///
/// Symmetric tensors are identified with degree-`n` homogeneous polynomials
/// (`|0⟩ ↦ x`, `|1⟩ ↦ y`), so column `α` comes from expanding
/// `(u₀₀x + u₁₀y)^{n−α}(u₀₁x + u₁₁y)^α`: one binomial convolution per
/// column, `O(n³)` overall.
pub fn irrep<T: Real>(u: &Unitary2<T>, n: usize) -> Result<IrrepOp<T>> {
    check_range(n, 1, MAX_IRREP_QUBITS)?;
    let (u00, u01, u10, u11) = (u.entry(0, 0), u.entry(0, 1), u.entry(1, 0), u.entry(1, 1));
    let sqrt_binom: Vec<T> = (0..=n).map(|k| T::lit(binomial(n, k).sqrt())).collect();
    let mut matrix = CMat::<T>::zeros(n + 1, n + 1);
    for alpha in 0..=n {
        let left = binomial_row(u00, u10, n - alpha);
        let right = binomial_row(u01, u11, alpha);
        for (i, l) in left.iter().enumerate() {
            for (j, r) in right.iter().enumerate() {
                matrix[(i + j, alpha)] += *l * *r;
            }
        }
        for beta in 0..=n {
            matrix[(beta, alpha)] *= cr(sqrt_binom[alpha] / sqrt_binom[beta]);
        }
    }
    Ok(IrrepOp { n, matrix })
}

/// Haar-distributed element of `U(2)`: Gram–Schmidt on the columns of a
/// complex Gaussian matrix, which is QR with the phases of `R` fixed positive.
pub fn haar_unitary2<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Unitary2<T> {
    loop {
        let z00 = random_gaussian_complex(rng);
        let z10 = random_gaussian_complex(rng);
        let z01 = random_gaussian_complex(rng);
        let z11 = random_gaussian_complex(rng);
        let n1 = (z00.norm_sqr() + z10.norm_sqr()).sqrt();
        if n1 < 1e-12 {
            continue;
        }
        let (q00, q10) = (z00 / n1, z10 / n1);
        let proj = q00.conj() * z01 + q10.conj() * z11;
        let (w0, w1) = (z01 - proj * q00, z11 - proj * q10);
        let n2 = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
        if n2 < 1e-12 {
            continue;
        }
        let (q01, q11) = (w0 / n2, w1 / n2);
        let c = |z: num_complex::Complex64| Complex::new(T::lit(z.re), T::lit(z.im));
        return Unitary2::trusted(Matrix2::new(c(q00), c(q01), c(q10), c(q11)));
    }
}

/// Deterministic Haar sample from a seed.
pub fn haar_unitary2_seeded<T: Real>(seed: u64) -> Unitary2<T> {
    haar_unitary2(&mut seeded(seed))
}

/// A twirl estimate and its Frobenius distance to `tr(ρ)·𝟙/(N+1)`.
#[derive(Clone, Debug)]
pub struct TwirlEstimate {
    pub matrix: CMat<f64>,
    pub deviation: f64,
}

fn check_twirl_input(rho: &CMat<f64>, n: usize) -> Result<()> {
    check_range(n, 1, MAX_IRREP_QUBITS)?;
    if rho.nrows() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: rho.nrows(),
        });
    }
    check_density(rho, 1e-10)
}

fn twirl_deviation(est: &CMat<f64>, rho: &CMat<f64>) -> f64 {
    let d = rho.nrows();
    let target = CMat::<f64>::identity(d, d) * (rho.trace() / d as f64);
    (est - target).norm()
}

/// Monte-Carlo estimate of `∫ π(U) ρ π(U)† dU` over `samples` Haar draws.
pub fn twirl_mc(rho: &CMat<f64>, n: usize, samples: usize, seed: u64) -> Result<TwirlEstimate> {
    check_twirl_input(rho, n)?;
    let mut rng = seeded(seed);
    let mut acc = CMat::<f64>::zeros(n + 1, n + 1);
    for _ in 0..samples {
        let u = haar_unitary2::<f64, _>(&mut rng);
        acc += irrep(&u, n)?.conjugate(rho);
    }
    let matrix = acc.unscale(samples.max(1) as f64);
    let deviation = twirl_deviation(&matrix, rho);
    Ok(TwirlEstimate { matrix, deviation })
}

/// Weighted twirl `Σ ω_i π(U_i) ρ π(U_i)†` over an explicit set.
pub fn twirl_weighted(
    rho: &CMat<f64>,
    n: usize,
    set: &[(f64, Unitary2<f64>)],
) -> Result<TwirlEstimate> {
    check_twirl_input(rho, n)?;
    let mut acc = CMat::<f64>::zeros(n + 1, n + 1);
    for (w, u) in set {
        acc += irrep(u, n)?.conjugate(rho).scale(*w);
    }
    let deviation = twirl_deviation(&acc, rho);
    Ok(TwirlEstimate {
        matrix: acc,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use proptest::prelude::*;

    /// Oracle: Dicke vectors by enumeration and `U^{⊗N}` by repeated
    /// Kronecker products, then `E† U^{⊗N} E`.
    fn oracle_irrep(u: &Unitary2<f64>, n: usize) -> CMat<f64> {
        let d = 1usize << n;
        let mut e = CMat::<f64>::zeros(d, n + 1);
        for x in 0..d {
            let w = x.count_ones() as usize;
            let count = (0..d).filter(|y| y.count_ones() as usize == w).count();
            e[(x, w)] = C64::new(1.0 / (count as f64).sqrt(), 0.0);
        }
        let um = u.to_dmatrix();
        let mut big = CMat::<f64>::identity(1, 1);
        for _ in 0..n {
            big = big.kronecker(&um);
        }
        e.adjoint() * big * e
    }

    #[test]
    fn embedding_small_cases() {
        let e1 = dicke_embedding(1).unwrap().to_matrix::<f64>().unwrap();
        assert!((e1 - CMat::<f64>::identity(2, 2)).norm() < 1e-15);

        let e2 = dicke_embedding(2).unwrap().to_matrix::<f64>().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            [1.0, 0.0, 0.0],
            [0.0, s, 0.0],
            [0.0, s, 0.0],
            [0.0, 0.0, 1.0],
        ];
        for x in 0..4 {
            for a in 0..3 {
                assert!((e2[(x, a)].re - expect[x][a]).abs() < 1e-15);
            }
        }

        let e3 = dicke_embedding(3).unwrap().to_matrix::<f64>().unwrap();
        let t = 1.0 / 3f64.sqrt();
        for x in 0..8 {
            let want = if [1, 2, 4].contains(&x) { t } else { 0.0 };
            assert!((e3[(x, 1)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn embedding_is_isometry_onto_projector() {
        for n in 1..=8 {
            let e = dicke_embedding(n).unwrap().to_matrix::<f64>().unwrap();
            let ete = e.adjoint() * &e;
            assert!((ete - CMat::<f64>::identity(n + 1, n + 1)).norm() < 1e-12);
            let p = &e * e.adjoint();
            assert!((&p * &p - &p).norm() < 1e-12);
            assert!((&p - p.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn embedding_range_checks() {
        assert!(dicke_embedding(0).is_err());
        assert!(dicke_embedding(21).is_err());
        assert!(dicke_embedding(13).unwrap().to_matrix::<f64>().is_err());
    }

    #[test]
    fn embed_project_roundtrip() {
        let mut rng = seeded(1);
        let e = dicke_embedding(10).unwrap();
        let v = crate::linalg::random_pure_state(11, &mut rng);
        let w = e.embed(&v).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!((e.project(&w).unwrap() - &v).norm() < 1e-12);
        assert!(e.symmetric_defect(&w).unwrap() < 1e-12);
    }

    #[test]
    fn irrep_identity_and_phase() {
        for n in 1..=10 {
            let p = irrep(&Unitary2::<f64>::identity(), n).unwrap();
            assert!((p.matrix() - CMat::<f64>::identity(n + 1, n + 1)).norm() < 1e-14);
        }
        let theta = 0.37;
        for n in 1..=6 {
            let p = irrep(&Unitary2::<f64>::phase(theta), n).unwrap();
            let o = oracle_irrep(&Unitary2::phase(theta), n);
            assert!((p.matrix() - &o).norm() < 1e-12);
            for a in 0..=n {
                let want = C64::from_polar(1.0, theta * a as f64);
                assert!((p.matrix()[(a, a)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn irrep_of_x_reverses_dicke_labels() {
        let p = irrep(&Unitary2::<f64>::pauli_x(), 2).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r + c == 2 { 1.0 } else { 0.0 };
                assert!((p.matrix()[(r, c)] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
        assert!((p.matrix() - oracle_irrep(&Unitary2::pauli_x(), 2)).norm() < 1e-14);
    }

    #[test]
    fn irrep_matches_tensor_power_oracle() {
        let mut rng = seeded(42);
        for n in 1..=8 {
            for _ in 0..5 {
                let u = haar_unitary2::<f64, _>(&mut rng);
                let p = irrep(&u, n).unwrap();
                assert!((p.matrix() - oracle_irrep(&u, n)).norm() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn haar_is_reproducible_and_unitary() {
        let a = haar_unitary2_seeded::<f64>(17);
        let b = haar_unitary2_seeded::<f64>(17);
        assert_eq!(a, b);
        assert!(unitarity_defect(&a.to_dmatrix()) < 1e-14);
        assert!(
            Unitary2::<f64>::new(Matrix2::new(cx(1., 0.), cx(1., 0.), cx(0., 0.), cx(1., 0.)))
                .is_err()
        );
    }

    #[test]
    fn haar_twirl_of_defining_rep() {
        let samples = 100_000;
        let mut rng = seeded(2024);
        let mut rho = CMat::<f64>::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let mut acc = CMat::<f64>::zeros(2, 2);
        for _ in 0..samples {
            let u = haar_unitary2::<f64, _>(&mut rng).to_dmatrix();
            acc += &u * &rho * u.adjoint();
        }
        let est = acc.unscale(samples as f64);
        let dev = (est - CMat::<f64>::identity(2, 2).scale(0.5)).norm();
        assert!(dev < 3.0 / (samples as f64).sqrt(), "dev={dev}");
    }

    #[test]
    fn twirl_fixed_point_is_exact() {
        for n in 1..=5 {
            let rho = CMat::<f64>::identity(n + 1, n + 1).unscale((n + 1) as f64);
            let est = twirl_mc(&rho, n, 37, 5).unwrap();
            assert!(est.deviation < 1e-14);
        }
    }

    #[test]
    fn twirl_mc_pure_state() {
        let mut rho = CMat::<f64>::zeros(3, 3);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let est = twirl_mc(&rho, 2, 10_000, 11).unwrap();
        assert!(est.deviation < 0.05, "deviation {}", est.deviation);
        let est3 = twirl_mc(
            &CMat::<f64>::from_fn(4, 4, |r, c| {
                if r == 0 && c == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            3,
            20_000,
            12,
        )
        .unwrap();
        assert!(est3.deviation < 0.05);
    }

    #[test]
    fn pauli_twirl_is_exact_depolarizer() {
        let set: Vec<_> = Unitary2::<f64>::paulis()
            .into_iter()
            .map(|u| (0.25, u))
            .collect();
        let mut rho = CMat::<f64>::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let est = twirl_weighted(&rho, 1, &set).unwrap();
        assert!(est.deviation < 1e-15);
    }

    #[test]
    fn twirl_rejects_invalid_input() {
        let rho = CMat::<f64>::identity(3, 3);
        assert!(twirl_mc(&rho, 2, 10, 0).is_err());
        let rho = CMat::<f64>::identity(2, 2).scale(0.5);
        assert!(twirl_mc(&rho, 2, 10, 0).is_err());
    }

    #[test]
    fn single_precision_irrep() {
        let u = haar_unitary2_seeded::<f32>(8);
        let v = haar_unitary2_seeded::<f32>(9);
        let lhs = irrep(&u.compose(&v), 5).unwrap();
        let rhs = irrep(&u, 5).unwrap().compose(&irrep(&v, 5).unwrap());
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-4);
    }

    fn unitary_strategy() -> impl Strategy<Value = Unitary2<f64>> {
        any::<u64>().prop_map(haar_unitary2_seeded::<f64>)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn irrep_is_homomorphism(u in unitary_strategy(), v in unitary_strategy(), n in 1usize..=8) {
            let lhs = irrep(&u.compose(&v), n).unwrap();
            let rhs = irrep(&u, n).unwrap().compose(&irrep(&v, n).unwrap());
            prop_assert!((lhs.matrix() - rhs.matrix()).norm() <= 1e-10);
        }

        #[test]
        fn irrep_is_unitary(u in unitary_strategy(), n in 1usize..=8) {
            let p = irrep(&u, n).unwrap();
            prop_assert!(p.unitarity_defect() <= 1e-10);
            prop_assert!((p.matrix().determinant().norm() - 1.0).abs() <= 1e-10);
        }
    }
}
