//! Structural robustness and stochastic resilience analysis for uncertain
//! dynamical networks: reaction-network models, parameter-free structural
//! tests (sign patterns, BDC/EDF decompositions, deficiency, vertex
//! algorithms), equilibrium and bifurcation analysis, SDE simulation with
//! gated noise, Monte Carlo resilience estimators, early-warning indicators,
//! and weighted network dimension reduction.

pub mod dynamics;
pub mod error;
pub mod indicators;
pub mod model;
pub mod numeric;
pub mod reduction;
pub mod resilience;
pub mod sde;
pub mod structural;

pub use error::{Error, Result};
pub use model::{
    builtin, build_compartmental, parse_crn, CompartmentalSpec, NetworkModel, RateLaw, Sign,
    SignEntry, SignPattern, Species,
};
