//! The symmetry-checking channel on `N` participant qubits.
//!
//! `Φ = (1/|pairs|) Σ_{(i,j)} T_{ij} ⊗ 𝟙` with the two-qubit map
//! `T(ρ) = P ρ P + c ⟨Ψ⁻|ρ|Ψ⁻⟩ Q`, where `P = 𝟙 − |Ψ⁻⟩⟨Ψ⁻|`. The formula
//! variant uses `c = 1/4, Q = 𝟙`; the prose variant `c = 1/3, Q = P`.
//! Pairs are `(i, i+1 mod N)` on a ring or `(i, i+1)` on a line.
//!
//! The channel is applied matrix-free to operators on `(C²)^{⊗N}` stored
//! as flat arrays of length `4^N`, touching one 4×4 block per pair at a
//! time. All maps involved are real, so spectral computations run in real
//! arithmetic.

mod arnoldi;
mod rounds;

pub use arnoldi::{arnoldi_dominant, ArnoldiConfig, DominantEigen};
pub use rounds::{
    deterministic_defects, ensemble_rounds, iterate_channel, simulate_rounds, symmetric_defect,
    EnsembleRounds,
};

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{binomial, C64};
use crate::rng::seeded;
use crate::scalar::CMat;
use crate::symspace::check_range;

/// Largest qubit count for matrix-free channel application.
pub const MAX_CHANNEL_QUBITS: usize = 12;
/// Largest qubit count for the dense superoperator.
pub const MAX_DENSE_QUBITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Ring,
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `T(ρ) = PρP + ¼⟨Ψ⁻|ρ|Ψ⁻⟩ 𝟙`.
    Formula,
    /// `T(ρ) = PρP + ⅓⟨Ψ⁻|ρ|Ψ⁻⟩ P`.
    Prose,
}

impl std::str::FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ring" => Ok(Topology::Ring),
            "line" => Ok(Topology::Line),
            _ => Err(format!("unknown topology '{s}' (expected ring or line)")),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "formula" => Ok(Variant::Formula),
            "prose" => Ok(Variant::Prose),
            _ => Err(format!("unknown variant '{s}' (expected formula or prose)")),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Topology::Ring => "ring",
            Topology::Line => "line",
        })
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Formula => "formula",
            Variant::Prose => "prose",
        })
    }
}

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// `|Ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
const SINGLET: [f64; 4] = [0.0, S, -S, 0.0];

/// The channel on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMapSpec {
    n: usize,
    topology: Topology,
    variant: Variant,
    pairs: Vec<(usize, usize)>,
}

/// Entry type the channel can act on.
pub trait Entry:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
}

impl Entry for f64 {}
impl Entry for C64 {}

impl PairMapSpec {
    /// Builds the pair list and certifies the two-qubit map: its Choi
    /// matrix must be positive semidefinite to `1e-10` and it must preserve
    /// the trace.
    pub fn new(n: usize, topology: Topology, variant: Variant) -> Result<Self> {
        check_range(n, 2, MAX_CHANNEL_QUBITS)?;
        let pairs = match topology {
            Topology::Ring if n == 2 => vec![(0, 1), (1, 0)],
            Topology::Ring => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            Topology::Line => (0..n - 1).map(|i| (i, i + 1)).collect(),
        };
        let spec = Self {
            n,
            topology,
            variant,
            pairs,
        };
        spec.certify_pair_map()?;
        Ok(spec)
    }

    pub fn ring(n: usize) -> Result<Self> {
        Self::new(n, Topology::Ring, Variant::Formula)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Operator dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn coefficient(&self) -> f64 {
        match self.variant {
            Variant::Formula => 0.25,
            Variant::Prose => 1.0 / 3.0,
        }
    }

    /// `T` on a 4×4 block, row-major.
    pub fn pair_map<E: Entry>(&self, b: &[E; 16]) -> [E; 16] {
        let psi = SINGLET;
        let mut u = [E::zero(); 4];
        let mut v = [E::zero(); 4];
        for a in 0..4 {
            u[a] = (b[a * 4 + 1] - b[a * 4 + 2]) * S;
            v[a] = (b[4 + a] - b[8 + a]) * S;
        }
        let s = (u[1] - u[2]) * S;
        let c = self.coefficient();
        let mut out = [E::zero(); 16];
        for a in 0..4 {
            for k in 0..4 {
                let mut x = b[a * 4 + k] - v[k] * psi[a] - u[a] * psi[k] + s * (psi[a] * psi[k]);
                let q = match self.variant {
                    Variant::Formula => {
                        if a == k {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    Variant::Prose => (if a == k { 1.0 } else { 0.0 }) - psi[a] * psi[k],
                };
                if q != 0.0 {
                    x = x + s * (c * q);
                }
                out[a * 4 + k] = x;
            }
        }
        out
    }

    /// Choi matrix `Σ_{ab} |a⟩⟨b| ⊗ T(|a⟩⟨b|)` of the two-qubit map.
    pub fn choi(&self) -> DMatrix<f64> {
        let mut j = DMatrix::<f64>::zeros(16, 16);
        for a in 0..4 {
            for b in 0..4 {
                let mut e = [0.0; 16];
                e[a * 4 + b] = 1.0;
                let t = self.pair_map(&e);
                for r in 0..4 {
                    for c in 0..4 {
                        j[(a * 4 + r, b * 4 + c)] = t[r * 4 + c];
                    }
                }
            }
        }
        j
    }

    fn certify_pair_map(&self) -> Result<()> {
        let j = self.choi();
        let asym = (&j - j.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::InvalidChannel(format!(
                "Choi matrix not symmetric ({asym:e})"
            )));
        }
        let min = SymmetricEigen::new(j.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidChannel(format!("Choi eigenvalue {min:e}")));
        }
        for a in 0..4 {
            for b in 0..4 {
                let tr: f64 = (0..4).map(|r| j[(a * 4 + r, b * 4 + r)]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if (tr - want).abs() > 1e-12 {
                    return Err(Error::InvalidChannel("map is not trace preserving".into()));
                }
            }
        }
        Ok(())
    }

    /// `(T_{ij} ⊗ 𝟙)(X)` for a flat `2^N × 2^N` operator, added into `out`
    /// with weight `w`.
    fn apply_pair<E: Entry>(&self, pair: (usize, usize), x: &[E], w: f64, out: &mut [E]) {
        let n = self.n;
        let dim = self.dim();
        let mi = 1usize << (n - 1 - pair.0);
        let mj = 1usize << (n - 1 - pair.1);
        let offs = [0, mj, mi, mi | mj];
        let bases: Vec<usize> = (0..dim).filter(|r| r & (mi | mj) == 0).collect();
        let mut block = [E::zero(); 16];
        for &r0 in &bases {
            for &c0 in &bases {
                for a in 0..4 {
                    let row = (r0 | offs[a]) * dim;
                    for b in 0..4 {
                        block[a * 4 + b] = x[row + (c0 | offs[b])];
                    }
                }
                let t = self.pair_map(&block);
                for a in 0..4 {
                    let row = (r0 | offs[a]) * dim;
                    for b in 0..4 {
                        let idx = row + (c0 | offs[b]);
                        out[idx] = out[idx] + t[a * 4 + b] * w;
                    }
                }
            }
        }
    }

    /// `Φ(X)` on a flat operator of length `4^N`.
    pub fn apply_flat<E: Entry>(&self, x: &[E]) -> Vec<E> {
        let len = x.len();
        let w = 1.0 / self.pairs.len() as f64;
        let parts: Vec<Vec<E>> = self
            .pairs
            .par_iter()
            .map(|&p| {
                let mut out = vec![E::zero(); len];
                self.apply_pair(p, x, w, &mut out);
                out
            })
            .collect();
        let mut acc = vec![E::zero(); len];
        for part in parts {
            for (a, b) in acc.iter_mut().zip(part) {
                *a = *a + b;
            }
        }
        acc
    }

    /// Weights `C(N, |x|)^{-1/2}` of the Dicke basis per bitstring.
    fn dicke_weights(&self) -> (Vec<usize>, Vec<f64>) {
        let n = self.n;
        let dim = self.dim();
        let weight: Vec<usize> = (0..dim).map(|x| x.count_ones() as usize).collect();
        let inv: Vec<f64> = (0..=n).map(|a| 1.0 / binomial(n, a).sqrt()).collect();
        (weight, inv)
    }

    /// `P_sym X P_sym` for a flat real operator.
    pub fn project_symmetric(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let dim = self.dim();
        let (wt, inv) = self.dicke_weights();
        // Y = Eᵀ X E, an (N+1)×(N+1) matrix
        let mut rows = vec![0.0; (n + 1) * dim];
        for r in 0..dim {
            let a = wt[r];
            let src = &x[r * dim..(r + 1) * dim];
            let dst = &mut rows[a * dim..(a + 1) * dim];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * inv[a];
            }
        }
        let mut y = vec![0.0; (n + 1) * (n + 1)];
        for a in 0..=n {
            for c in 0..dim {
                y[a * (n + 1) + wt[c]] += rows[a * dim + c] * inv[wt[c]];
            }
        }
        let mut out = vec![0.0; dim * dim];
        for r in 0..dim {
            let a = wt[r];
            for c in 0..dim {
                let b = wt[c];
                out[r * dim + c] = y[a * (n + 1) + b] * inv[a] * inv[b];
            }
        }
        out
    }

    /// `X − P_sym X P_sym`.
    pub fn deflate(&self, x: &[f64]) -> Vec<f64> {
        let p = self.project_symmetric(x);
        x.iter().zip(p).map(|(a, b)| a - b).collect()
    }
}

fn to_flat(rho: &CMat<f64>) -> Vec<C64> {
    let d = rho.nrows();
    (0..d * d).map(|i| rho[(i / d, i % d)]).collect()
}

fn from_flat(x: &[C64], d: usize) -> CMat<f64> {
    CMat::<f64>::from_fn(d, d, |r, c| x[r * d + c])
}

/// `Φ(ρ)` for an operator on the full register.
pub fn channel_apply(rho: &CMat<f64>, spec: &PairMapSpec) -> Result<CMat<f64>> {
    let d = spec.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: rho.nrows(),
        });
    }
    Ok(from_flat(&spec.apply_flat(&to_flat(rho)), d))
}

/// The superoperator as a dense real `4^N × 4^N` matrix on flat operators.
pub fn dense_superoperator(spec: &PairMapSpec) -> Result<DMatrix<f64>> {
    check_range(spec.n, 2, MAX_DENSE_QUBITS)?;
    let len = spec.dim() * spec.dim();
    let cols: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|k| {
            let mut e = vec![0.0; len];
            e[k] = 1.0;
            spec.apply_flat(&e)
        })
        .collect();
    Ok(DMatrix::from_fn(len, len, |r, c| cols[c][r]))
}

/// Eigenvalues of the dense superoperator, by decreasing modulus.
pub fn dense_spectrum(spec: &PairMapSpec) -> Result<Vec<C64>> {
    let m = dense_superoperator(spec)?;
    let len = m.nrows();
    let schur = Schur::try_new(m, 1e-14, 1000 * len).ok_or(Error::NoConvergence {
        iterations: 1000 * len,
        residual: f64::NAN,
    })?;
    let mut ev: Vec<C64> = schur.complex_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ev)
}

/// Eigenvalue-one eigenspace of `Φ` and its distance from the operators
/// supported on the symmetric subspace.
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub multiplicity: usize,
    /// Largest `‖X − P X P‖_F` over an orthonormal basis of fixed points.
    pub defect: f64,
    /// Largest `‖Φ(X) − X‖_F` over that basis.
    pub residual: f64,
    pub iterations: usize,
}

fn orthonormalize(vs: &mut [Vec<f64>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = vs.split_at_mut(i);
                let h: f64 = head[j].iter().zip(tail[0].iter()).map(|(a, b)| a * b).sum();
                for (t, s) in tail[0].iter_mut().zip(&head[j]) {
                    *t -= h * s;
                }
            }
        }
        let norm = vs[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            vs[i].iter_mut().for_each(|x| *x /= norm);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fixed points of `Φ` by subspace iteration with Rayleigh–Ritz, on a block
/// a few vectors wider than the expected `(N+1)²`. Converged eigenvalue-one
/// vectors are those whose Ritz value is within `1e-10` of one.
pub fn fixed_point_support(
    spec: &PairMapSpec,
    seed: u64,
    max_iterations: usize,
) -> Result<FixedPointReport> {
    check_range(spec.n, 2, 10)?;
    let n = spec.n;
    let len = spec.dim() * spec.dim();
    let k = (n + 1) * (n + 1) + 4;
    let mut rng = seeded(seed);
    let normal = rand_distr::StandardNormal;
    let mut block: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            (0..len)
                .map(|_| rand::Rng::sample(&mut rng, normal))
                .collect()
        })
        .collect();
    orthonormalize(&mut block);
    let mut iterations = 0;
    let mut last_resid = f64::INFINITY;
    while iterations < max_iterations {
        for _ in 0..10 {
            block = block.par_iter().map(|v| spec.apply_flat(v)).collect();
            orthonormalize(&mut block);
            iterations += 1;
        }
        // Rayleigh–Ritz
        let images: Vec<Vec<f64>> = block.par_iter().map(|v| spec.apply_flat(v)).collect();
        let h = DMatrix::from_fn(k, k, |r, c| dot(&block[r], &images[c]));
        // null space of H − 𝟙 inside the block
        let shifted = &h - DMatrix::<f64>::identity(k, k);
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let mut basis = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s < 1e-9 {
                let coeffs = v_t.row(i);
                let mut x = vec![0.0; len];
                for (c, v) in coeffs.iter().zip(&block) {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += c * vi;
                    }
                }
                basis.push(x);
            }
        }
        orthonormalize(&mut basis);
        let mut residual = 0.0f64;
        let mut defect = 0.0f64;
        for x in &basis {
            let fx = spec.apply_flat(x);
            residual = residual.max(
                fx.iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
            );
            let dx = spec.deflate(x);
            defect = defect.max(dot(&dx, &dx).sqrt());
        }
        let expected = (n + 1) * (n + 1);
        if basis.len() >= expected && residual < 1e-10 {
            return Ok(FixedPointReport {
                multiplicity: basis.len(),
                defect,
                residual,
                iterations,
            });
        }
        last_resid = residual;
    }
    Err(Error::NoConvergence {
        iterations,
        residual: last_resid,
    })
}

/// Second eigenvalue of `Φ` and the gap.
#[derive(Clone, Debug, PartialEq)]
pub struct GapEstimate {
    pub n: usize,
    pub lambda2: f64,
    pub gap: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest-modulus eigenvalue of `Φ` below the eigenvalue-one block, by
/// Arnoldi on `X ↦ Q Φ(Q X)` with `Q(X) = X − P X P`. The fixed points are
/// exactly `P X P`, which `Q` removes.
pub fn spectral_gap(spec: &PairMapSpec, config: &ArnoldiConfig) -> Result<GapEstimate> {
    check_range(spec.n, 2, 10)?;
    let len = spec.dim() * spec.dim();
    let op = |x: &[f64]| spec.deflate(&spec.apply_flat(&spec.deflate(x)));
    let dom = arnoldi_dominant(len, op, config)?;
    let lambda2 = dom.value.norm();
    Ok(GapEstimate {
        n: spec.n,
        lambda2,
        gap: 1.0 - lambda2,
        iterations: dom.matvecs,
        residual: dom.residual,
    })
}

/// `log gap = log c + p log N` by unweighted least squares.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        r2,
    })
}

#[derive(Clone, Debug)]
pub struct GapScanResult {
    pub topology: Topology,
    pub variant: Variant,
    pub records: Vec<GapEstimate>,
    pub fit: Option<PowerLawFit>,
}

/// Gap for every `n` in `ns` (sorted ascending) and the power-law fit.
pub fn gap_scan(
    ns: &[usize],
    topology: Topology,
    variant: Variant,
    config: &ArnoldiConfig,
) -> Result<GapScanResult> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let records: Vec<GapEstimate> = ns
        .par_iter()
        .map(|&n| {
            let spec = PairMapSpec::new(n, topology, variant)?;
            spectral_gap(&spec, config)
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.gap)).collect();
    let fit = match fit_power_law(&pts) {
        Ok(f) => Some(f),
        Err(Error::TooFewPoints(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(GapScanResult {
        topology,
        variant,
        records,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_density;
    use crate::mes::build_phi;

    fn singlet_pair_density() -> CMat<f64> {
        let v = nalgebra::DVector::from_fn(4, |i, _| C64::new(SINGLET[i], 0.0));
        &v * v.adjoint()
    }

    #[test]
    fn choi_is_psd_and_trace_preserving_for_both_variants() {
        for v in [Variant::Formula, Variant::Prose] {
            assert!(PairMapSpec::new(3, Topology::Ring, v).is_ok());
        }
    }

    #[test]
    fn singlet_goes_to_maximally_mixed() {
        let spec = PairMapSpec::ring(2).unwrap();
        let out = channel_apply(&singlet_pair_density(), &spec).unwrap();
        let want = CMat::<f64>::identity(4, 4) * C64::new(0.25, 0.0);
        assert!((out - want).norm() < 1e-15);
    }

    #[test]
    fn prose_variant_sends_singlet_to_symmetric_mixture() {
        let spec = PairMapSpec::new(2, Topology::Ring, Variant::Prose).unwrap();
        let out = channel_apply(&singlet_pair_density(), &spec).unwrap();
        let p = CMat::<f64>::identity(4, 4) - singlet_pair_density();
        assert!((out - p.scale(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_preserved_on_random_inputs() {
        let mut rng = seeded(3);
        for n in 2..=5 {
            let spec = PairMapSpec::ring(n).unwrap();
            for _ in 0..20 {
                let rho = random_density(1 << n, 3, &mut rng);
                let out = channel_apply(&rho, &spec).unwrap();
                assert!((out.trace() - rho.trace()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_states_are_fixed() {
        for n in 2..=6 {
            let spec = PairMapSpec::ring(n).unwrap();
            let phi = build_phi::<f64>(n).unwrap();
            let e = crate::symspace::dicke_embedding(n)
                .unwrap()
                .to_matrix::<f64>()
                .unwrap();
            let rho = &e * phi.participant_density() * e.adjoint();
            let out = channel_apply(&rho, &spec).unwrap();
            assert!((out - &rho).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn dense_spectrum_n2() {
        let spec = PairMapSpec::ring(2).unwrap();
        let ev = dense_spectrum(&spec).unwrap();
        let mods: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
        for m in &mods[..9] {
            assert!((m - 1.0).abs() < 1e-12);
        }
        assert!((mods[9] - 0.25).abs() < 1e-12);
        for m in &mods[10..] {
            assert!(m.abs() < 1e-12);
        }
    }

    #[test]
    fn projection_matches_dense_projector() {
        let n = 3;
        let spec = PairMapSpec::ring(n).unwrap();
        let e = crate::symspace::dicke_embedding(n)
            .unwrap()
            .to_real_matrix()
            .unwrap();
        let p = &e * e.transpose();
        let mut rng = seeded(1);
        let x = DMatrix::from_fn(8, 8, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
        let flat: Vec<f64> = (0..64).map(|i| x[(i / 8, i % 8)]).collect();
        let got = spec.project_symmetric(&flat);
        let want = &p * &x * &p;
        for i in 0..64 {
            assert!((got[i] - want[(i / 8, i % 8)]).abs() < 1e-14);
        }
    }

    #[test]
    fn gap_n2_is_three_quarters() {
        let spec = PairMapSpec::ring(2).unwrap();
        let g = spectral_gap(&spec, &ArnoldiConfig::default()).unwrap();
        assert!((g.lambda2 - 0.25).abs() < 1e-10);
        assert!((g.gap - 0.75).abs() < 1e-10);
    }

    #[test]
    fn arnoldi_matches_dense_n3_both_topologies() {
        for top in [Topology::Ring, Topology::Line] {
            let spec = PairMapSpec::new(3, top, Variant::Formula).unwrap();
            let ev = dense_spectrum(&spec).unwrap();
            let dense = ev
                .iter()
                .map(|z| z.norm())
                .find(|m| *m < 1.0 - 1e-9)
                .unwrap();
            let g = spectral_gap(&spec, &ArnoldiConfig::default()).unwrap();
            assert!(
                (g.lambda2 - dense).abs() < 1e-8,
                "{top}: {} vs {dense}",
                g.lambda2
            );
        }
    }

    #[test]
    fn gap_is_seed_independent() {
        let spec = PairMapSpec::ring(4).unwrap();
        let a = spectral_gap(
            &spec,
            &ArnoldiConfig {
                seed: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let b = spectral_gap(
            &spec,
            &ArnoldiConfig {
                seed: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((a.lambda2 - b.lambda2).abs() < 1e-8);
    }

    #[test]
    fn fixed_points_n2_n3() {
        for n in [2usize, 3] {
            let spec = PairMapSpec::ring(n).unwrap();
            let r = fixed_point_support(&spec, 5, 2000).unwrap();
            assert_eq!(r.multiplicity, (n + 1) * (n + 1));
            assert!(r.defect <= 1e-8, "n={n}: {}", r.defect);
        }
    }

    #[test]
    fn fixed_points_prose_variant() {
        let spec = PairMapSpec::new(3, Topology::Ring, Variant::Prose).unwrap();
        let r = fixed_point_support(&spec, 5, 2000).unwrap();
        assert_eq!(r.multiplicity, 16);
        assert!(r.defect <= 1e-8);
    }

    #[test]
    fn power_law_recovers_synthetic_data() {
        let pts: Vec<(f64, f64)> = (2..10)
            .map(|n| (n as f64, 3.5 * (n as f64).powf(-2.7)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent + 2.7).abs() < 1e-10);
        assert!((f.prefactor - 3.5).abs() < 1e-10);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_needs_three_points() {
        assert!(matches!(
            fit_power_law(&[(2.0, 0.5), (3.0, 0.2)]),
            Err(Error::TooFewPoints(2))
        ));
    }

    #[test]
    fn gap_invariant_under_relabeling() {
        // ring pairs listed in reverse give the same channel
        let spec = PairMapSpec::ring(4).unwrap();
        let mut rev = spec.clone();
        rev.pairs = spec.pairs.iter().map(|&(i, j)| (3 - i, 3 - j)).collect();
        let a = spectral_gap(&spec, &ArnoldiConfig::default()).unwrap();
        let b = spectral_gap(&rev, &ArnoldiConfig::default()).unwrap();
        assert!((a.lambda2 - b.lambda2).abs() < 1e-9);
    }
}
