//! Tabular solvers for extensive-form games: generalized mirror descent with a Newton-solved
//! dual and a zero-order meta-controller, the MMD and CFR baselines, exact evaluation
//! measures, and an experiment harness.

pub mod baselines;
pub mod bregman;
mod error;
pub mod eval;
pub mod game;
pub mod games;
pub mod gmd;
pub mod harness;
pub mod meta;

pub use error::{Error, Result};
