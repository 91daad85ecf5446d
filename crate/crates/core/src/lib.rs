#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod eval;
pub mod polyengine;
pub mod quadrature;
pub mod rational;
pub mod semigroup;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
