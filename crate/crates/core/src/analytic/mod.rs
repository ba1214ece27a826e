//! Closed-form evaluation of the secure connection probability.

mod cdf;
mod geometry;
mod moments;
mod scp;

pub use cdf::{f_gamma1_cdf, f_gamma1_pdf, f_gamma2, f_gamma3, f_gamma4, f_gamma5, gamma1_mixture, Regime};
pub use geometry::{classify_case, effective_l_tj, indicator_g, CaseGeometry, A_ZERO_TOL, EQ_TOL};
pub use moments::{moment_closed_form, moment_radial, s1, s2, s3, Moment};
pub use scp::{scp, scp_integral, ScpResult, FAIL_ERROR};
