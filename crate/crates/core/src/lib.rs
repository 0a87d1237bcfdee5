//! Exact computations with Soergel bimodules, moment graphs and nil-Hecke
//! rings for Coxeter groups with rational realizations.

#![allow(clippy::needless_range_loop, clippy::type_complexity, clippy::should_implement_trait)]

pub mod coxeter;
pub mod hecke;
pub mod bimodule;
pub mod lightleaves;
pub mod linalg;
pub mod nilhecke;
pub mod poly;
pub mod sheaves;
pub mod smod;
pub mod suites;
pub mod ratfun;
pub mod structure;
pub mod rational;

pub use coxeter::{preset, CoxeterGroup, GroupElement};
pub use poly::Poly;
pub use rational::Q;
