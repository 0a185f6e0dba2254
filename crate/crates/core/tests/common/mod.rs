//! Brute-force reference constructions on the full qubit register.
//!
//! Everything here works with plain `2^N`-dimensional vectors and matrices
//! and never calls into the symmetric-subspace machinery of the crate, so it
//! can serve as an independent oracle. Qubit 1 is the most significant bit.

#![allow(dead_code)]

use symmes::nalgebra::{DMatrix, DVector, Schur};
use symmes::C64;

pub type M = DMatrix<C64>;
pub type V = DVector<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalized Dicke state with `alpha` ones.
pub fn dicke(n: usize, alpha: usize) -> V {
    let w = 1.0 / binom(n, alpha).sqrt();
    V::from_fn(1 << n, |x, _| {
        if (x as u64).count_ones() as usize == alpha {
            c(w)
        } else {
            c(0.0)
        }
    })
}

/// Columns are the Dicke states `|0⟩..|N⟩`.
pub fn dicke_basis(n: usize) -> M {
    let mut m = M::zeros(1 << n, n + 1);
    for a in 0..=n {
        m.set_column(a, &dicke(n, a));
    }
    m
}

/// `Σ_α |α⟩_A |D_α⟩ / √(N+1)`, authority index major.
pub fn phi_full(n: usize) -> V {
    let d = 1usize << n;
    let mut v = V::zeros((n + 1) * d);
    let s = 1.0 / ((n + 1) as f64).sqrt();
    for a in 0..=n {
        let da = dicke(n, a);
        for x in 0..d {
            v[a * d + x] = da[x] * s;
        }
    }
    v
}

pub fn kron(a: &M, b: &M) -> M {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    M::from_fn(ar * br, ac * bc, |r, col| {
        a[(r / br, col / bc)] * b[(r % br, col % bc)]
    })
}

pub fn tensor_power(u: &M, n: usize) -> M {
    let mut out = M::identity(1, 1);
    for _ in 0..n {
        out = kron(&out, u);
    }
    out
}

/// `U^{⊗N}` restricted to the Dicke basis.
pub fn irrep(u: &M, n: usize) -> M {
    let d = dicke_basis(n);
    d.adjoint() * tensor_power(u, n) * d
}

pub fn pure_fidelity(a: &V, b: &V) -> f64 {
    a.dotc(b).norm_sqr()
}

pub fn psd_sqrt(m: &M) -> M {
    let h = (m + m.adjoint()) * c(0.5);
    let e = h.symmetric_eigen();
    let d = M::from_diagonal(&e.eigenvalues.map(|x| c(x.max(0.0).sqrt())));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn uhlmann(rho: &M, sigma: &M) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let h = (&inner + inner.adjoint()) * c(0.5);
    let t: f64 = h
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    t * t
}

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Singlet amplitudes over the pair basis `00, 01, 10, 11`.
const SINGLET: [f64; 4] = [0.0, S2, -S2, 0.0];

fn pair_bits(n: usize, i: usize, j: usize, x: usize) -> usize {
    let bi = (x >> (n - 1 - i)) & 1;
    let bj = (x >> (n - 1 - j)) & 1;
    (bi << 1) | bj
}

fn rest_bits(n: usize, i: usize, j: usize, x: usize) -> usize {
    x & !((1 << (n - 1 - i)) | (1 << (n - 1 - j)))
}

/// `(|k⟩⟨bra|)_{ij} ⊗ 𝟙` on the full register.
fn lifted(n: usize, i: usize, j: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let d = 1usize << n;
    DMatrix::from_fn(d, d, |x, y| {
        if rest_bits(n, i, j, x) == rest_bits(n, i, j, y) {
            f(pair_bits(n, i, j, x), pair_bits(n, i, j, y))
        } else {
            0.0
        }
    })
}

pub fn oracle_pairs(n: usize, line: bool) -> Vec<(usize, usize)> {
    if line {
        (0..n - 1).map(|i| (i, i + 1)).collect()
    } else if n == 2 {
        vec![(0, 1)]
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }
}

/// Row-major superoperator of the averaged pair channel with
/// `T(ρ) = P ρ P + ¼ ⟨Ψ⁻|ρ|Ψ⁻⟩ 𝟙`, written through the Kraus operators
/// `P = 𝟙 − |Ψ⁻⟩⟨Ψ⁻|` and `½ |k⟩⟨Ψ⁻|`.
pub fn superoperator(n: usize, line: bool) -> DMatrix<f64> {
    let d = 1usize << n;
    let pairs = oracle_pairs(n, line);
    let mut s = DMatrix::<f64>::zeros(d * d, d * d);
    for &(i, j) in &pairs {
        let p = lifted(n, i, j, |a, b| {
            (if a == b { 1.0 } else { 0.0 }) - SINGLET[a] * SINGLET[b]
        });
        s += p.kronecker(&p);
        for k in 0..4 {
            let l = lifted(n, i, j, |a, b| if a == k { 0.5 * SINGLET[b] } else { 0.0 });
            s += l.kronecker(&l);
        }
    }
    s / pairs.len() as f64
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<C64> {
    let len = m.nrows();
    for eps in [1e-14, 1e-13, 1e-12] {
        if let Some(s) = Schur::try_new(m.clone(), eps, 1000 * len) {
            return s.complex_eigenvalues().iter().copied().collect();
        }
    }
    panic!("oracle eigensolver did not converge");
}

/// Eigenvalue moduli, largest first.
pub fn moduli_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = eigenvalues(m).iter().map(|z| z.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Orthonormal basis of `ker(S − 𝟙)` as row-major operators.
pub fn fixed_operators(s: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let d = (s.nrows() as f64).sqrt().round() as usize;
    let a = s - DMatrix::<f64>::identity(s.nrows(), s.ncols());
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv < 1e-9)
        .map(|(k, _)| DMatrix::from_fn(d, d, |r, col| vt[(k, r * d + col)]))
        .collect()
}

pub fn sym_projector(n: usize) -> DMatrix<f64> {
    let d = dicke_basis(n).map(|z| z.re);
    &d * d.transpose()
}

fn pauli_y() -> M {
    M::from_row_slice(
        2,
        2,
        &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)],
    )
}

/// Best single-copy fidelity over covariant `1 → N` cloners
/// `J = (Y ⊗ 𝟙)(a P_+ + b P_−)(Y ⊗ 𝟙)`, scanned over `a` on a grid, for
/// input `psi`. `P_+` is the symmetric projector on `N+1` qubits and `P_−`
/// its complement inside `𝟙 ⊗ P_sym^{(N)}`.
pub fn cloner_fidelity(n: usize, psi: &V) -> f64 {
    let dn = 1usize << n;
    let dp = dicke_basis(n + 1);
    let p_plus = &dp * dp.adjoint();
    let dn_basis = dicke_basis(n);
    let p_sym = kron(&M::identity(2, 2), &(&dn_basis * dn_basis.adjoint()));
    let p_minus = p_sym - &p_plus;
    let y = kron(&pauli_y(), &M::identity(dn, dn));
    let rho = psi * psi.adjoint();
    let a_max = 2.0 / (n + 2) as f64;
    let mut best = f64::NEG_INFINITY;
    for step in 0..=400 {
        let a = a_max * step as f64 / 400.0;
        let b = (2.0 - a * (n + 2) as f64) / n as f64;
        let j = &y * (&p_plus * c(a) + &p_minus * c(b)) * &y;
        let mut out = M::zeros(dn, dn);
        for i in 0..2 {
            for k in 0..2 {
                out += j.view((i * dn, k * dn), (dn, dn)) * rho[(i, k)];
            }
        }
        // first output qubit
        let half = dn / 2;
        let marginal = M::from_fn(2, 2, |r, col| {
            (0..half).map(|t| out[(r * half + t, col * half + t)]).sum()
        });
        best = best.max((psi.adjoint() * marginal * psi)[(0, 0)].re);
    }
    best
}

/// Least-squares fit of `log y = log c + p log x`: `(p, c, r²)`.
pub fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let p = sxy / sxx;
    (p, (my - p * mx).exp(), sxy * sxy / (sxx * syy))
}

/// `‖Σ K†K − 𝟙‖_F`.
pub fn completeness(ops: &[M]) -> f64 {
    let d = ops[0].ncols();
    let mut acc = M::zeros(d, d);
    for k in ops {
        acc += k.adjoint() * k;
    }
    (acc - M::identity(d, d)).norm()
}

/// `½ Σ |p_i − q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
