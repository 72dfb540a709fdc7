//! Bang norms, Bang degree, log-convex minorants, Remez-type bounds and
//! propagation-of-smallness estimates for Denjoy–Carleman classes on
//! `[0, 1]`, with a harness that checks the associated inequalities on
//! concrete function models.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bang;
pub mod error;
pub mod funcmodel;
pub mod harness;
pub mod quadrature;
pub mod remez;
pub mod sequences;

pub use error::{Error, Result};
