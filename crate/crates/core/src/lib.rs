//! Pseudospectral simulation of the coupled generalized KdV system
//!
//! ```text
//! u_t + u_xxx + ∂x(u^p v^{p+1}) = 0
//! v_t + v_xxx + ∂x(u^{p+1} v^p) = 0
//! ```
//!
//! together with discrete analytic (Gevrey) and Bourgain norms, tracking of
//! the spatial analyticity radius, and a randomized laboratory that measures
//! the constants in the linear, Strichartz-type, multilinear and a-priori
//! estimates used in the well-posedness theory.

// `!(x > 0.0)` is written on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod estimate_lab;
pub mod evolution;
pub mod function_spaces;
pub mod spectral;

pub use diagnostics::{
    estimate_radius, evaluate_analytic_extension, fit_decay_exponent, invariants, track_radius,
    DecayFit, DiagnosticsConfig, FitConfig, InvariantSet, RadiusEstimate, RunInfo, Snapshot,
    Termination, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use estimate_lab::{
    EstimateId, EstimateReport, LabConfig, LabParams, LemmaGrid, StrichartzVariant,
};
pub use evolution::{
    free_propagate, nonlinear_rhs, picard_solve, simulate, step, CoupledState, PicardConfig,
    PicardOutcome, Scheme, SolverConfig,
};
pub use function_spaces::{
    bourgain_norm, gevrey_norm, mixed_norm, sobolev_norm, CutoffProfile, NormParams,
    SpaceTimeSample, SpaceTimeSpectrum,
};
pub use spectral::{
    dealiased_product, differentiate, forward_transform, inverse_transform, project_lowpass,
    Field, SpectralField, SpectralGrid,
};
