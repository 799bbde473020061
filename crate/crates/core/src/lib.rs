//! Efficiency of coupling SPDC photon pairs into single-mode fibers.
//!
//! * [`model`]: walk-off algebra and the closed-form efficiency.
//! * [`oracle`]: the same efficiency from direct numerical overlap integrals.
//! * [`dispersion`]: walk-offs and group delays from Sellmeier index data.
//! * [`sweep`]: efficiency curves and one-variable maximization.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    compute_alpha_beta, effective_to_raw, efficiency, eta_closed_form, magnification,
    mode_field_radius, pump_waist_from_diameter, raw_to_effective, shape_params, AlphaBeta,
    EfficiencyResult, ExperimentConfig, Imaging, ShapeParams, WalkOffSet,
};
pub use oracle::{eta_numeric, pair_overlap_density, OracleResult, QuadratureSpec};
pub use special::{erf, erf_over_sigma, erfc, sigma_over_erf};
pub use sweep::{
    ceiling_scan, efficiency_curve, maximize_eta, CeilingRow, OptResult, OptVariable, SweepResult,
    SweepRow, SweepSpec,
};
