//! Exact finite-level computation with groups acting on regular rooted
//! trees.
//!
//! The crate covers four layers:
//!
//! * [`tree`]: vertices, clopen cylinder sets and eventually periodic rays;
//! * [`autom`]: tree automorphisms given as finitary portraits or as words
//!   over a self-similar automaton family;
//! * [`groups`]: finitely generated groups, level quotients, Schreier balls
//!   and the constructive searches (rigid elements, support filling, `N_g`
//!   boosting, stabilizer witnesses, level centralizers);
//! * [`measure`] and [`rep`]: Bernoulli boundary measures, Koopman and
//!   quasi-regular matrices, exact radical inner products and brute-force
//!   verification.
//!
//! All measure-theoretic statements are checked in exact rational or
//! radical arithmetic; floating point is used only for kernel dimensions.

pub mod autom;
pub mod cli;
pub mod error;
pub mod groups;
pub mod measure;
pub mod perm;
pub mod report;
pub mod rep;
pub mod tree;

pub use error::{Error, Result};
