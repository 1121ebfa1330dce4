//! Parameter-free structural analysis: complexes and deficiency, BDC/EDF
//! decompositions, vertex-enumeration sign tests and the structural
//! steady-state influence matrix, robust Hurwitz value-set certification,
//! cycle classification, cooperativity checks, dual networks, and the
//! positivity lint.

mod bdc;
mod complexes;
mod cycles;
mod dual;
mod hurwitz;
mod lint;
mod vertex;

pub use bdc::{bdc_decompose, delta_at, edf_decompose, BdcDecomposition, DeltaLabel, EdfDecomposition};
pub use complexes::{complexes_and_linkage, deficiency, ComplexDecomposition, Deficiency};
pub use cycles::{
    cooperativity_checks, cycle_classification, simple_cycles, CooperativityReport, CycleClass,
    CycleReport,
};
pub use dual::dual_network;
pub use hurwitz::{robust_hurwitz_valueset, HurwitzReport, HurwitzVerdict};
pub use lint::{positivity_lint, PositivityFinding, PositivityReport};
pub use vertex::{
    sampled_det_sign, sampled_influence_sign, ssim, steady_state_influence, structural_det_sign,
    DetSign, InfluenceSign, VERTEX_CAP,
};
