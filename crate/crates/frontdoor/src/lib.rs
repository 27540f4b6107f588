//! Causal effect estimation from observational data when the causal graph is unknown.
//!
//! The library centers on a testable *generalized front-door* criterion: given a
//! binary treatment `T`, an outcome `Y`, and the complete set `B` of the
//! treatment's children as structural side information, a set `Z` disjoint from
//! `{T, B, Y}` certifies identifiability of the causal effect whenever
//!
//! 1. `B ⊥ Y | T, Z`, and
//! 2. `Z` splits into `Z_i ⊎ Z_o` with `Z_i ⊥ T` and `Z_o ⊥ T | B, Z_i`.
//!
//! The three statements are conditional independencies, so they can be checked
//! either exactly on a semi-Markovian causal model ([`graph`], [`ensemble`]) or
//! from finite samples ([`citest`], [`search`]). When they hold, two equivalent
//! plug-in adjustment formulas estimate the average treatment effect
//! ([`adjust`], [`discrete`]).
//!
//! Modules:
//! - [`graph`]: mixed graphs (directed + bidirected edges), exact m-separation,
//!   mutilations, and regime nodes.
//! - [`ensemble`]: random SMCM generation and exhaustive/bounded witness scans.
//! - [`citest`]: finite-sample conditional independence tests (partial
//!   correlation, random-Fourier-feature kernel test, local permutation).
//! - [`sem`]: linear structural equation models over a graph, with analytic
//!   ground-truth ATE.
//! - [`adjust`]: ridge-regression plug-in estimators for the adjustment formulas.
//! - [`discrete`]: exact evaluation of the adjustment formulas on finite joints.
//! - [`search`]: the subset-search estimation algorithm and its bootstrap
//!   diagnostics.
//! - [`data`] / [`audit`]: column-oriented sample tables, CSV ingestion, and
//!   one-hot encoding for real-dataset audits.
//!
//! Each major capability has a runnable example under `examples/`; a thin CLI
//! (`frontdoor`) exposes the experiment drivers.

pub mod adjust;
pub mod audit;
pub mod citest;
pub mod data;
pub mod discrete;
pub mod ensemble;
pub mod fixtures;
pub mod graph;
pub mod rng;
pub mod search;
pub mod sem;
