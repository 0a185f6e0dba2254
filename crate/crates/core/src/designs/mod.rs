//! Finite weighted unitary sets reproducing the twirl over `U(2)`.
//!
//! Two kinds are built. A state design reproduces `∫ π(U) ρ π(U)† dU =
//! 𝟙/(N+1)` for one fixed `ρ`; a channel design reproduces the twirl for
//! every operator on the symmetric subspace at once, which is what the
//! teleportation measurement needs.
//!
//! The construction samples a pool of Haar unitaries, solves a nonnegative
//! least-squares problem on vectorized atoms and then shrinks the support
//! with Carathéodory steps. The pool doubles until the residual is reached.

mod nnls;

pub use nnls::{nnls, NnlsSolution};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{check_density, herm_coords, C64};
use crate::rng::seeded;
use crate::scalar::CMat;
use crate::symspace::{check_range, haar_unitary2, irrep, Unitary2};

/// Residual required of every design returned by the search.
pub const DESIGN_TOLERANCE: f64 = 1e-8;

/// Which twirl a design reproduces.
#[derive(Clone, Debug, PartialEq)]
pub enum DesignKind {
    StateTwirl { rho: CMat<f64> },
    ChannelTwirl,
}

impl DesignKind {
    pub fn name(&self) -> &'static str {
        match self {
            DesignKind::StateTwirl { .. } => "state",
            DesignKind::ChannelTwirl => "channel",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignEntry {
    pub weight: f64,
    pub unitary: Unitary2<f64>,
}

/// A convex combination of single-qubit unitaries acting through `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedUnitarySet {
    n: usize,
    kind: DesignKind,
    entries: Vec<DesignEntry>,
}

/// Upper bound on the number of unitaries allowed for a design of this kind.
pub fn cardinality_bound(n: usize, channel: bool) -> usize {
    let d = n + 1;
    if channel {
        4 * d.pow(4) + 1
    } else {
        d * d + 1
    }
}

impl WeightedUnitarySet {
    /// Validates weights (nonnegative, summing to one within `1e-12`), the
    /// cardinality bound and the dimension of a state-kind `ρ`. The twirl
    /// residual itself is not checked here; see [`verify_design`].
    pub fn new(n: usize, kind: DesignKind, entries: Vec<DesignEntry>) -> Result<Self> {
        check_range(n, 1, crate::symspace::MAX_IRREP_QUBITS)?;
        if entries.is_empty() {
            return Err(Error::InvalidWeights("empty design".into()));
        }
        if let Some(e) = entries
            .iter()
            .find(|e| !(e.weight >= 0.0) || !e.weight.is_finite())
        {
            return Err(Error::InvalidWeights(format!(
                "weight {} is negative",
                e.weight
            )));
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        let channel = matches!(kind, DesignKind::ChannelTwirl);
        let bound = cardinality_bound(n, channel);
        if entries.len() > bound {
            return Err(Error::InvalidWeights(format!(
                "{} unitaries exceed the bound {bound}",
                entries.len()
            )));
        }
        if let DesignKind::StateTwirl { rho } = &kind {
            if rho.nrows() != n + 1 || rho.ncols() != n + 1 {
                return Err(Error::Dimension {
                    expected: n + 1,
                    got: rho.nrows(),
                });
            }
        }
        Ok(Self { n, kind, entries })
    }

    /// `{𝟙, X, Y, Z}` with weight `1/4` each.
    pub fn paulis(n: usize, kind: DesignKind) -> Result<Self> {
        let entries = Unitary2::paulis()
            .into_iter()
            .map(|unitary| DesignEntry {
                weight: 0.25,
                unitary,
            })
            .collect();
        Self::new(n, kind, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &DesignKind {
        &self.kind
    }

    pub fn is_channel(&self) -> bool {
        matches!(self.kind, DesignKind::ChannelTwirl)
    }

    pub fn entries(&self) -> &[DesignEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.weight).collect()
    }
}

/// `‖Σ ω_i π(U_i) ρ π(U_i)† − tr(ρ)·𝟙/(N+1)‖_F`.
pub fn state_residual(entries: &[DesignEntry], n: usize, rho: &CMat<f64>) -> Result<f64> {
    if rho.nrows() != n + 1 || rho.ncols() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: rho.nrows(),
        });
    }
    let d = n + 1;
    let mut acc = CMat::<f64>::zeros(d, d);
    for e in entries {
        acc += irrep(&e.unitary, n)?.conjugate(rho).scale(e.weight);
    }
    let target = CMat::<f64>::identity(d, d) * (rho.trace() / d as f64);
    Ok((acc - target).norm())
}

/// Largest residual `‖Σ ω_i π(U_i) E_jk π(U_i)† − δ_jk 𝟙/(N+1)‖_F` over the
/// matrix units `E_jk` of the symmetric subspace.
pub fn channel_residual(entries: &[DesignEntry], n: usize) -> Result<f64> {
    let d = n + 1;
    let reps: Vec<(f64, CMat<f64>)> = entries
        .iter()
        .map(|e| irrep(&e.unitary, n).map(|p| (e.weight, p.into_matrix())))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let mut acc = CMat::<f64>::zeros(d, d);
            for (w, p) in &reps {
                let cj = p.column(j);
                let ck = p.column(k);
                acc += (cj * ck.adjoint()).scale(*w);
            }
            if j == k {
                for i in 0..d {
                    acc[(i, i)] -= C64::new(1.0 / d as f64, 0.0);
                }
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst)
}

/// Twirl residual of a design.
///
/// A state design is checked against `rho` when given, else against the
/// `ρ` it was built for. A channel design takes no `rho`; use
/// [`state_residual`] to test it on a particular operator.
pub fn verify_design(d: &WeightedUnitarySet, rho: Option<&CMat<f64>>) -> Result<f64> {
    match (&d.kind, rho) {
        (DesignKind::StateTwirl { .. }, Some(r)) => state_residual(&d.entries, d.n, r),
        (DesignKind::StateTwirl { rho: own }, None) => state_residual(&d.entries, d.n, own),
        (DesignKind::ChannelTwirl, None) => channel_residual(&d.entries, d.n),
        (DesignKind::ChannelTwirl, Some(_)) => Err(Error::KindMismatch(
            "channel designs are verified on the full operator basis, not a single rho".into(),
        )),
    }
}

/// Pool sizes and tolerance for the design search.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignConfig {
    pub initial_pool: usize,
    pub max_pool: usize,
    pub tolerance: f64,
}

/// Real dimension of the span of `π(U) ⊗ π(U)*` over `U(2)`: `Σ_J (2J+1)²`
/// for `J = 0..N`.
pub fn channel_span_dimension(n: usize) -> usize {
    (0..=n).map(|j| (2 * j + 1) * (2 * j + 1)).sum()
}

impl DesignConfig {
    pub fn for_state(n: usize) -> Self {
        let d = (n + 1) * (n + 1);
        Self {
            initial_pool: (4 * d).max(16),
            max_pool: 64 * d,
            tolerance: DESIGN_TOLERANCE,
        }
    }

    pub fn for_channel(n: usize) -> Self {
        let s = channel_span_dimension(n);
        Self {
            initial_pool: 3 * s,
            max_pool: 48 * s,
            tolerance: DESIGN_TOLERANCE,
        }
    }
}

/// Outcome of a Carathéodory reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Surviving atom indices, ascending.
    pub indices: Vec<usize>,
    /// Their weights.
    pub weights: Vec<f64>,
    pub steps: usize,
    /// Distance of the reduced barycenter from the input barycenter.
    pub drift: f64,
    pub warning: Option<String>,
}

fn barycenter(a: &DMatrix<f64>, w: &[f64]) -> DVector<f64> {
    let mut acc = DVector::<f64>::zeros(a.nrows());
    for (j, &wj) in w.iter().enumerate() {
        if wj != 0.0 {
            acc.axpy(wj, &a.column(j), 1.0);
        }
    }
    acc
}

/// Carathéodory reduction on atoms given as the columns of `a`.
///
/// While the support is affinely dependent, a null vector `z` of the atoms
/// stacked over a row of ones is found and weights move along `−z` until the
/// first one reaches zero (ties broken by lowest index). Terminates with an
/// affinely independent support, hence at most `rows + 1` atoms.
pub fn reduce_columns(a: &DMatrix<f64>, weights: &[f64]) -> Reduction {
    let d = a.nrows();
    let mut w = weights.to_vec();
    let start = barycenter(a, &w);
    let total: f64 = w.iter().sum();
    let mut support: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
    let mut steps = 0;
    let mut warning = None;

    while support.len() > 1 {
        let cols: Vec<usize> = if support.len() > d + 1 {
            support[..d + 2].to_vec()
        } else {
            support.clone()
        };
        let k = cols.len();
        let rows = (d + 1).max(k);
        let mut m = DMatrix::<f64>::zeros(rows, k);
        for (c, &j) in cols.iter().enumerate() {
            m.view_mut((0, c), (d, 1)).copy_from(&a.column(j));
            m[(d, c)] = 1.0;
        }
        let svd = m.svd(false, true);
        let Some(v_t) = svd.v_t else {
            warning = Some("singular value decomposition failed".into());
            break;
        };
        let (imin, smin) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
                );
        let smax = svd.singular_values.max();
        if smin > 1e-11 * smax.max(1.0) {
            break;
        }
        let mut z: Vec<f64> = v_t.row(imin).iter().cloned().collect();
        let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if zmax < 1e-12 {
            warning = Some(format!("null direction of norm {zmax:e}"));
            break;
        }
        if !z.iter().any(|&v| v > 1e-12 * zmax) {
            z.iter_mut().for_each(|v| *v = -*v);
        }
        let mut step: Option<(usize, f64)> = None;
        for (c, &j) in cols.iter().enumerate() {
            if z[c] > 1e-12 * zmax {
                let t = w[j] / z[c];
                if step.is_none_or(|(_, best)| t < best) {
                    step = Some((c, t));
                }
            }
        }
        let Some((hit, t)) = step else {
            warning = Some("no admissible null direction".into());
            break;
        };
        for (c, &j) in cols.iter().enumerate() {
            w[j] -= t * z[c];
        }
        w[cols[hit]] = 0.0;
        for &j in &cols {
            if w[j] < 0.0 {
                debug_assert!(w[j] > -1e-9, "weight {} went negative", w[j]);
                w[j] = 0.0;
            }
        }
        let now: f64 = w.iter().sum();
        debug_assert!((now - total).abs() < 1e-9, "weights drifted to {now}");
        support.retain(|&j| w[j] > 0.0);
        steps += 1;
    }

    let now: f64 = w.iter().sum();
    if now > 0.0 && (now - total).abs() > 0.0 {
        w.iter_mut().for_each(|v| *v *= total / now);
    }
    let drift = (barycenter(a, &w) - start).norm();
    Reduction {
        weights: support.iter().map(|&j| w[j]).collect(),
        indices: support,
        steps,
        drift,
        warning,
    }
}

/// Carathéodory reduction of a convex combination of Hermitian atoms that
/// hits `target`. The ambient affine dimension is the length of the real
/// Hermitian coordinate vector, so the result has at most `d² + 1` atoms
/// for `d × d` matrices.
pub fn caratheodory_reduce(
    atoms: &[CMat<f64>],
    weights: &[f64],
    target: &CMat<f64>,
) -> Result<Reduction> {
    if atoms.len() != weights.len() {
        return Err(Error::Dimension {
            expected: atoms.len(),
            got: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidWeights("negative weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let dim = target.nrows();
    let coords: Vec<Vec<f64>> = atoms
        .iter()
        .map(|m| {
            if m.nrows() != dim || m.ncols() != dim {
                Err(Error::Dimension {
                    expected: dim,
                    got: m.nrows(),
                })
            } else {
                Ok(herm_coords(m))
            }
        })
        .collect::<Result<_>>()?;
    let a = DMatrix::from_fn(dim * dim, atoms.len(), |r, c| coords[c][r]);
    let b = DVector::from_vec(herm_coords(target));
    let miss = (barycenter(&a, weights) - &b).norm();
    if miss > 1e-9 {
        return Err(Error::InvalidWeights(format!(
            "combination misses the target by {miss:e}"
        )));
    }
    Ok(reduce_columns(&a, weights))
}

struct Search<'a> {
    n: usize,
    seed: u64,
    config: &'a DesignConfig,
}

impl Search<'_> {
    /// Sample, solve and reduce until the residual of the reduced and
    /// renormalized combination is within tolerance.
    fn run<F>(&self, atom: F, target: Vec<f64>) -> Result<Vec<DesignEntry>>
    where
        F: Fn(&CMat<f64>) -> Vec<f64> + Sync,
    {
        let n = self.n;
        let mut rng = seeded(self.seed);
        let mut pool: Vec<Unitary2<f64>> = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let rows = target.len();
        let mut b = DVector::<f64>::zeros(rows + 1);
        b.rows_mut(0, rows).copy_from_slice(&target);
        b[rows] = 1.0;
        let mut size = self.config.initial_pool.max(1);
        let mut best = f64::INFINITY;
        loop {
            while pool.len() < size {
                pool.push(haar_unitary2(&mut rng));
            }
            let fresh: Vec<Vec<f64>> = pool[cols.len()..]
                .par_iter()
                .map(|u| {
                    let p = irrep(u, n).expect("range checked").into_matrix();
                    atom(&p)
                })
                .collect();
            cols.extend(fresh);
            let a = DMatrix::from_fn(rows + 1, cols.len(), |r, c| {
                if r < rows {
                    cols[c][r]
                } else {
                    1.0
                }
            });
            let sol = nnls(&a, &b);
            let x: Vec<f64> = sol.x.iter().cloned().collect();
            let total: f64 = x.iter().sum();
            if total > 0.0 {
                let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0).collect();
                let sub = DMatrix::from_fn(rows, support.len(), |r, c| cols[support[c]][r]);
                let w: Vec<f64> = support.iter().map(|&j| x[j] / total).collect();
                let red = reduce_columns(&sub, &w);
                let wsum: f64 = red.weights.iter().sum();
                let entries: Vec<DesignEntry> = red
                    .indices
                    .iter()
                    .zip(&red.weights)
                    .map(|(&c, &wt)| DesignEntry {
                        weight: wt / wsum,
                        unitary: pool[support[c]].clone(),
                    })
                    .collect();
                let picked =
                    DMatrix::from_fn(rows, entries.len(), |r, c| cols[support[red.indices[c]]][r]);
                let ws: Vec<f64> = entries.iter().map(|e| e.weight).collect();
                let resid = (barycenter(&picked, &ws) - b.rows(0, rows)).norm();
                if resid <= self.config.tolerance * 1e-2 {
                    return Ok(entries);
                }
                best = best.min(resid);
            }
            if size >= self.config.max_pool {
                return Err(Error::DesignSearch { best, pool: size });
            }
            size = (2 * size).min(self.config.max_pool);
        }
    }
}

/// A state design for `ρ`: at most `(N+1)²+1` unitaries with
/// `Σ ω_i π(U_i) ρ π(U_i)† = 𝟙/(N+1)` to [`DESIGN_TOLERANCE`].
pub fn find_state_design(rho: &CMat<f64>, n: usize, seed: u64) -> Result<WeightedUnitarySet> {
    find_state_design_with(rho, n, seed, &DesignConfig::for_state(n))
}

pub fn find_state_design_with(
    rho: &CMat<f64>,
    n: usize,
    seed: u64,
    config: &DesignConfig,
) -> Result<WeightedUnitarySet> {
    check_range(n, 1, 12)?;
    if rho.nrows() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: rho.nrows(),
        });
    }
    check_density(rho, 1e-10)?;
    let d = n + 1;
    let target = herm_coords(&(CMat::<f64>::identity(d, d) / C64::new(d as f64, 0.0)));
    let search = Search { n, seed, config };
    let entries = search.run(|p| herm_coords(&(p * rho * p.adjoint())), target)?;
    let set = WeightedUnitarySet::new(n, DesignKind::StateTwirl { rho: rho.clone() }, entries)?;
    let residual = verify_design(&set, None)?;
    if residual > config.tolerance {
        return Err(Error::IncompleteDesign {
            residual,
            tol: config.tolerance,
        });
    }
    Ok(set)
}

/// Row-major vectorization of `π`, i.e. `(π ⊗ 𝟙) Σ_a |a⟩|a⟩`.
pub(crate) fn vec_row_major(p: &CMat<f64>) -> Vec<C64> {
    let d = p.nrows();
    (0..d * d).map(|i| p[(i / d, i % d)]).collect()
}

/// A channel design: `Σ ω_i π(U_i) X π(U_i)† = tr(X)·𝟙/(N+1)` for every
/// operator `X` on the symmetric subspace.
pub fn find_channel_design(n: usize, seed: u64) -> Result<WeightedUnitarySet> {
    find_channel_design_with(n, seed, &DesignConfig::for_channel(n))
}

pub fn find_channel_design_with(
    n: usize,
    seed: u64,
    config: &DesignConfig,
) -> Result<WeightedUnitarySet> {
    check_range(n, 1, 6)?;
    let d = n + 1;
    let dd = d * d;
    let target = herm_coords(&(CMat::<f64>::identity(dd, dd) / C64::new(dd as f64, 0.0)));
    let search = Search { n, seed, config };
    let inv = 1.0 / d as f64;
    let entries = search.run(
        |p| {
            let v = vec_row_major(p);
            let m = CMat::<f64>::from_fn(dd, dd, |r, c| v[r] * v[c].conj() * inv);
            herm_coords(&m)
        },
        target,
    )?;
    let set = WeightedUnitarySet::new(n, DesignKind::ChannelTwirl, entries)?;
    let residual = verify_design(&set, None)?;
    if residual > config.tolerance {
        return Err(Error::IncompleteDesign {
            residual,
            tol: config.tolerance,
        });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_density;
    use crate::rng::seeded;
    use crate::symspace::haar_unitary2_seeded;

    fn ket0_density(d: usize) -> CMat<f64> {
        let mut m = CMat::<f64>::zeros(d, d);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn pauli_set_is_an_exact_qubit_channel_design() {
        let d = WeightedUnitarySet::paulis(1, DesignKind::ChannelTwirl).unwrap();
        assert!(verify_design(&d, None).unwrap() < 1e-15);
    }

    #[test]
    fn single_identity_residual_matches_hand_value() {
        let rho = ket0_density(3);
        let d = WeightedUnitarySet::new(
            2,
            DesignKind::StateTwirl { rho: rho.clone() },
            vec![DesignEntry {
                weight: 1.0,
                unitary: Unitary2::identity(),
            }],
        )
        .unwrap();
        let r = verify_design(&d, None).unwrap();
        // diag(2/3, −1/3, −1/3)
        let expect = (4.0f64 / 9.0 + 1.0 / 9.0 + 1.0 / 9.0).sqrt();
        assert!((r - expect).abs() < 1e-14);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let d = WeightedUnitarySet::paulis(1, DesignKind::ChannelTwirl).unwrap();
        let rho = ket0_density(2);
        assert!(matches!(
            verify_design(&d, Some(&rho)),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn constructor_validates_weights_and_bound() {
        let e = |w: f64| DesignEntry {
            weight: w,
            unitary: Unitary2::identity(),
        };
        assert!(
            WeightedUnitarySet::new(1, DesignKind::ChannelTwirl, vec![e(0.5), e(0.6)]).is_err()
        );
        assert!(
            WeightedUnitarySet::new(1, DesignKind::ChannelTwirl, vec![e(-0.1), e(1.1)]).is_err()
        );
        let rho = ket0_density(2);
        let many = vec![e(1.0 / 6.0); 6];
        assert!(WeightedUnitarySet::new(1, DesignKind::StateTwirl { rho }, many).is_err());
    }

    #[test]
    fn state_design_n1_has_at_most_five_unitaries() {
        let rho = random_density(2, 2, &mut seeded(4));
        let d = find_state_design(&rho, 1, 11).unwrap();
        assert!(d.len() <= 5);
        assert!(verify_design(&d, None).unwrap() <= 1e-8);
    }

    #[test]
    fn state_design_n2_ket0() {
        let rho = ket0_density(3);
        let d = find_state_design(&rho, 2, 3).unwrap();
        assert!(d.len() <= 10, "{}", d.len());
        assert!(verify_design(&d, None).unwrap() <= 1e-8);
        let w: f64 = d.weights().iter().sum();
        assert!((w - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn state_design_is_deterministic_per_seed() {
        let rho = ket0_density(3);
        let a = find_state_design(&rho, 2, 9).unwrap();
        let b = find_state_design(&rho, 2, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn channel_design_n1_within_span_bound() {
        let d = find_channel_design(1, 5).unwrap();
        assert!(d.len() <= channel_span_dimension(1));
        assert!(verify_design(&d, None).unwrap() <= 1e-8);
    }

    #[test]
    fn channel_design_n2() {
        let d = find_channel_design(2, 2).unwrap();
        assert!(d.len() <= cardinality_bound(2, true));
        assert!(verify_design(&d, None).unwrap() <= 1e-8);
        // a channel design twirls any state as well
        let rho = random_density(3, 2, &mut seeded(1));
        assert!(state_residual(d.entries(), 2, &rho).unwrap() <= 1e-8);
    }

    #[test]
    fn span_dimension_closed_form() {
        for n in 1..10 {
            assert_eq!(
                channel_span_dimension(n),
                (n + 1) * (2 * n + 1) * (2 * n + 3) / 3
            );
        }
    }

    #[test]
    fn reduce_identical_atoms_to_one() {
        let a = ket0_density(2);
        let r = caratheodory_reduce(&[a.clone(), a.clone()], &[0.3, 0.7], &a).unwrap();
        assert_eq!(r.indices.len(), 1);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_six_qubit_atoms() {
        let rho0 = ket0_density(2);
        let mut rng = seeded(21);
        let atoms: Vec<CMat<f64>> = (0..6)
            .map(|_| {
                irrep(&haar_unitary2::<f64, _>(&mut rng), 1)
                    .unwrap()
                    .conjugate(&rho0)
            })
            .collect();
        let w = [0.2, 0.2, 0.1, 0.1, 0.15, 0.25];
        let mut target = CMat::<f64>::zeros(2, 2);
        for (a, wi) in atoms.iter().zip(&w) {
            target += a.scale(*wi);
        }
        let r = caratheodory_reduce(&atoms, &w, &target).unwrap();
        assert!(r.indices.len() <= 5);
        assert!(r.steps >= 1);
        assert!(r.drift <= 1e-12);
    }

    #[test]
    fn reduce_forty_atoms_n2() {
        let rho = ket0_density(3);
        let mut rng = seeded(8);
        let atoms: Vec<CMat<f64>> = (0..40)
            .map(|_| {
                irrep(&haar_unitary2::<f64, _>(&mut rng), 2)
                    .unwrap()
                    .conjugate(&rho)
            })
            .collect();
        let w = vec![1.0 / 40.0; 40];
        let mut target = CMat::<f64>::zeros(3, 3);
        for a in &atoms {
            target += a.scale(1.0 / 40.0);
        }
        let r = caratheodory_reduce(&atoms, &w, &target).unwrap();
        assert!(r.indices.len() <= 10);
        assert!(r.drift <= 1e-8);
        assert!(r.weights.iter().all(|&x| x > 0.0));
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_rejects_inconsistent_target() {
        let a = ket0_density(2);
        let t = CMat::<f64>::identity(2, 2);
        assert!(caratheodory_reduce(&[a], &[1.0], &t).is_err());
    }

    #[test]
    fn state_residual_is_rotation_covariant() {
        let rho = ket0_density(3);
        let u = haar_unitary2_seeded::<f64>(3);
        let e = vec![DesignEntry {
            weight: 1.0,
            unitary: u.clone(),
        }];
        let r1 = state_residual(&e, 2, &rho).unwrap();
        let r0 = state_residual(
            &[DesignEntry {
                weight: 1.0,
                unitary: Unitary2::identity(),
            }],
            2,
            &rho,
        )
        .unwrap();
        assert!((r1 - r0).abs() < 1e-12);
    }
}
