//! Scalar abstraction for the representation-theoretic core.
//!
//! The Dicke embedding, the irreducible action `π(U)`, the state
//! constructions and the MPS machinery are written against [`Real`], so they
//! run in single or double precision. Solvers (NNLS, Arnoldi, protocol
//! simulation) are double precision only.

use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field usable by the generic core.
pub trait Real:
    RealField + FromPrimitive + ToPrimitive + Copy + Debug + Display + Send + Sync + 'static
{
    /// Convert a double precision literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Loss-free enough view for error reporting and tolerances.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Identity tolerance appropriate for the precision: `1e-12` in double,
    /// a few ulps above machine epsilon otherwise.
    fn identity_tol() -> Self {
        let eps = Self::default_epsilon();
        let floor = Self::lit(1e-12);
        let scaled = eps * Self::lit(256.0);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
