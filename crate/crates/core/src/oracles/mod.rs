//! Continuum-side reference computations, evaluated by quadrature.
//!
//! These are deliberately independent of the discrete pipeline: corner
//! capacity energies and L² defects of explicit radial test functions,
//! integral identities for compactly supported 1-forms on the square
//! annulus, and the quadrature rules themselves. The discrete modules are
//! tested *against* these oracles, never the other way around.

pub mod bochner;
pub mod capacity;
pub mod quadrature;

pub use bochner::{bochner_identity, BochnerReport, TestForm};
pub use capacity::{
    capacity_energy, capacity_energy_exact, capacity_schedule, defect_upper_bound, l2_defect,
    l2_defect_exact, ScheduleRow,
};
pub use quadrature::QuadratureRule;
