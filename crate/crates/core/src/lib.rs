//! Secure connection probability of a ground link under UAV eavesdropping
//! and UAV jamming.
//!
//! The crate provides the scenario description ([`scene`]), the air-to-ground
//! LoS models and their fitting ([`los`]), elliptic integrals ([`specfun`]),
//! the closed-form analysis ([`analytic`]), a Monte Carlo oracle ([`mc`]) and
//! an independent quadrature oracle for the closed forms ([`oracle`]).

// `!(x > 0.0)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod los;
pub mod mc;
pub mod oracle;
pub mod quad;
pub mod scene;
pub mod specfun;

pub use analytic::{
    classify_case, f_gamma1_cdf, f_gamma1_pdf, f_gamma2, f_gamma3, f_gamma4, f_gamma5, indicator_g, s1, s2, s3, scp,
    CaseGeometry, Regime, ScpResult,
};
pub use error::{Error, Result};
pub use los::{
    exact_los_probability, fit_piecewise, piecewise_los_probability, rmse, sigmoid_los_probability, Breakpoints,
    FitOptions, LinkState, PiecewiseLoS, SigmoidLoS,
};
pub use mc::{empirical_cdf_gamma2, sample_ueds, simulate_scp, LosMode, McEstimate, NoiseMode, TrialOutcome};
pub use scene::{distance_jd, noise_power, Environment, NetworkConfig};
pub use specfun::{ellint_e, ellint_e_inc, ellint_f, ellint_k, EllipticArgs};
