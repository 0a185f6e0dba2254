//! Star-shaped maximally entangled states of an authority and `N`
//! permutation-symmetric qubit participants.
//!
//! The crate builds the state three ways (closed form, matrix product state,
//! projected singlets), synthesizes its sequential generation circuit,
//! simulates the LOCC transformation and teleportation protocols branch by
//! branch, constructs finite weighted unitary designs by nonnegative least
//! squares plus Carathéodory reduction, and studies the spectral gap of the
//! pairwise symmetry-checking channel.
//!
//! The representation-theoretic core ([`symspace`], [`mes`], [`mps`]) is
//! generic over [`Real`]; the aliases below fix double precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod designs;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mes;
pub mod mps;
pub mod protocols;
pub mod rng;
pub mod scalar;
pub mod symcheck;
pub mod symspace;
pub mod verify;

pub use nalgebra;
pub use num_complex;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex64;
pub type Matrix = scalar::CMat<f64>;
pub type Vector = scalar::CVec<f64>;

pub type Unitary = symspace::Unitary2<f64>;
pub type Unitary32 = symspace::Unitary2<f32>;
pub type Irrep = symspace::IrrepOp<f64>;
pub type Irrep32 = symspace::IrrepOp<f32>;
pub type State = mes::JointState<f64>;
pub type State32 = mes::JointState<f32>;
pub type Chain = mps::MpsChain<f64>;
pub type Chain32 = mps::MpsChain<f32>;
pub type Circuit = mps::SequentialCircuit<f64>;
