#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod homotopy;
pub mod incoherence;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod output;
pub mod rng;
pub mod selftest;
pub mod solvers;

pub use error::{Error, Result};
