//! Numerical toolkit for interpolation of matrix-weighted L^p spaces.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_interp;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod operators;
pub mod real_interp;

pub use error::{MwlError, Result};
