// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod copula;
pub mod divergence;
pub mod equilibrium;
pub mod error;
pub mod fitting;
pub mod links;
pub mod numerics;
pub mod subset_eval;

pub use error::{Error, Result};
