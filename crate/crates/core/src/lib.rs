//! Exact verification engine for the oriented associativity equations
//! `K^ν_{,αρ}K^ρ_{,βγ} = K^ρ_{,αβ}K^ν_{,ργ}` and their gradient (WDVV)
//! reduction.
//!
//! Everything here is `no_std` + `alloc` and runs in exact rational
//! arithmetic: every identity is decided by comparing polynomials to zero.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod flows;
pub mod homotopy;
pub mod matrix;
pub mod model;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod spectral;
pub mod symmetry;
pub mod transforms;

pub use error::{Error, NotClosed};
pub use matrix::{invert_matrix, RationalMatrix};
pub use model::{
    connection_from_displacement, gradient_reduce, residual_oae, residual_structure, residual_wdvv, ConnectionField,
    DisplacementField, Metric, Prepotential, ResidualTensor,
};
pub use parse::parse_polynomial;
pub use poly::{Chart, Monomial, Param, Polynomial};
pub use rational::Rational;
