//! Equilibrium finding and classification, degree-theory index, bifurcation
//! sweeps and fold-condition solving, normal forms, potential landscapes, and
//! the semi-discretized Turing-pattern system.

mod bifurcation;
mod equilibria;
mod normal_forms;
mod potential;
mod turing;

pub use bifurcation::{
    bifurcation_sweep, fold_condition_solve, BifurcationDiagram, FoldPoint, SweepSample,
};
pub use equilibria::{degree_index, find_equilibria, Equilibrium, Stability};
pub use normal_forms::{normal_form, NormalFormKind};
pub use potential::{potential_1d, Potential1D};
pub use turing::{
    integrate_semi_implicit, levin_segel_semidiscretize, pattern_seed, spatial_cv_u,
    turing_pattern_equilibrium, PatternCondition,
};
