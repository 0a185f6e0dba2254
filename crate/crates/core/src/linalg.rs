//! Small dense helpers shared across modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{CMat, CVec, Real};

pub type C64 = Complex64;

/// Binomial coefficient as a double; exact for every value used here (n ≤ 60).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

pub fn identity<T: Real>(d: usize) -> CMat<T> {
    CMat::<T>::identity(d, d)
}

/// `‖M†M − 𝟙‖_F`.
pub fn unitarity_defect<T: Real>(m: &CMat<T>) -> T {
    let d = m.ncols();
    (m.adjoint() * m - CMat::<T>::identity(d, d)).norm()
}

pub fn hermiticity_defect<T: Real>(m: &CMat<T>) -> T {
    (m - m.adjoint()).norm()
}

pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis: the
/// diagonal, then `√2·Re` and `√2·Im` of the strict upper triangle. The map
/// is an isometry from Hermitian matrices (Frobenius) to `R^{d²}`.
pub fn herm_coords(m: &CMat<f64>) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = m[(i, j)];
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

/// Inverse of [`herm_coords`].
pub fn herm_from_coords(coords: &[f64], d: usize) -> CMat<f64> {
    let mut m = CMat::<f64>::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(coords[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(s * coords[k], s * coords[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Reject anything that is not a trace-one positive semidefinite Hermitian
/// matrix, up to `tol`.
pub fn check_density(rho: &CMat<f64>, tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::InvalidDensity("matrix is not square".into()));
    }
    let herm = hermiticity_defect(rho);
    if herm > tol {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
    }
    let sym = hermitian_part(rho);
    let min = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

pub fn hermitian_part(m: &CMat<f64>) -> CMat<f64> {
    (m + m.adjoint()).scale(0.5)
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// slightly negative eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(m: &CMat<f64>) -> CMat<f64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let d = m.nrows();
    let mut diag = CMat::<f64>::zeros(d, d);
    for i in 0..d {
        diag[(i, i)] = C64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0);
    }
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²` between two density operators.
pub fn fidelity(rho: &CMat<f64>, sigma: &CMat<f64>) -> f64 {
    let sr = psd_sqrt(rho);
    let inner = &sr * sigma * &sr;
    let eig = SymmetricEigen::new(hermitian_part(&inner));
    // drop round-off eigenvalues of rank-deficient products
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-13 * top.max(f64::MIN_POSITIVE);
    let t: f64 = eig
        .eigenvalues
        .iter()
        .map(|&x| if x > floor { x.sqrt() } else { 0.0 })
        .sum();
    t * t
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn pure_fidelity<T: Real>(a: &CVec<T>, b: &CVec<T>) -> T {
    let ov = a.dotc(b);
    let na = a.norm_squared();
    let nb = b.norm_squared();
    ov.norm_sqr() / (na * nb)
}

pub fn outer(v: &CVec<f64>) -> CMat<f64> {
    v * v.adjoint()
}

pub fn random_gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec<f64> {
    let v = DVector::from_fn(d, |_, _| random_gaussian_complex(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Random density operator of the given rank (Ginibre construction).
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMat<f64> {
    let g = DMatrix::from_fn(d, rank, |_, _| random_gaussian_complex(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(20, 10), 184_756.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn herm_coords_isometry() {
        let mut rng = seeded(3);
        let g = DMatrix::from_fn(4, 4, |_, _| random_gaussian_complex(&mut rng));
        let h = hermitian_part(&g);
        let v = herm_coords(&h);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - h.norm()).abs() < 1e-12);
        let back = herm_from_coords(&v, 4);
        assert!((back - h).norm() < 1e-12);
    }

    #[test]
    fn density_checks() {
        let mut rng = seeded(5);
        let rho = random_density(3, 2, &mut rng);
        check_density(&rho, 1e-10).unwrap();
        let bad = rho.scale(2.0);
        assert!(check_density(&bad, 1e-10).is_err());
        let mut neg = CMat::<f64>::zeros(2, 2);
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(check_density(&neg, 1e-10).is_err());
    }

    #[test]
    fn fidelity_of_equal_states_is_one() {
        let mut rng = seeded(9);
        let rho = random_density(4, 3, &mut rng);
        assert!((fidelity(&rho, &rho) - 1.0).abs() < 1e-10);
        let v = random_pure_state(4, &mut rng);
        let w = random_pure_state(4, &mut rng);
        let f = fidelity(&outer(&v), &outer(&w));
        assert!((f - pure_fidelity(&v, &w)).abs() < 1e-10);
    }
}
