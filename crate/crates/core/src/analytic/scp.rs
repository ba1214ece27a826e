//! Secure connection probability.

use serde::{Deserialize, Serialize};

use super::cdf::{f_gamma1_pdf, f_gamma2, gamma1_mixture, Regime};
use crate::error::{Error, Result};
use crate::los::PiecewiseLoS;
use crate::quad::{gauss_kronrod_points, Tolerance};
use crate::scene::NetworkConfig;

/// `exp(−TAIL) ≈ 1e−12`: the Γ1 density beyond `1 + TAIL/Λ` is negligible.
const TAIL: f64 = 27.631_021_115_928_547;

/// Error estimate above which the integral is reported as failed.
pub const FAIL_ERROR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScpResult {
    pub scp: f64,
    /// Upper limit of the Γ1 integral.
    pub gamma1_truncation: f64,
    pub quadrature_error_estimate: f64,
    pub regime: Regime,
    /// `true` when noise terms are present, so the value bounds the true SCP
    /// from below rather than approximating it.
    pub lower_bound: bool,
    pub subdivisions: usize,
}

/// `∫₁^Γmax F(γ/2^Rt)^n f_Γ1(γ) dγ` for the given eavesdropper CDF.
pub fn scp_integral<F: Fn(f64) -> f64>(cfg: &NetworkConfig, los: &PiecewiseLoS, cdf_gamma2: F) -> Result<ScpResult> {
    cfg.validate()?;
    let (ll, ln, _, _) = gamma1_mixture(cfg, los);
    let lambda_min = ll.min(ln);
    let regime = Regime::of(cfg, los);
    let lower_bound = cfg.n0_w > 0.0 || cfg.ne_w > 0.0;
    if !(lambda_min > 0.0) {
        return Err(Error::config("pj_w", "legitimate link has neither jamming nor noise; Γ1 is unbounded"));
    }
    let top = 1.0 + TAIL / lambda_min;
    let scale = 2f64.powf(cfg.rt_bps_hz);
    let n = cfg.n_eves as i32;

    let mut pts = vec![1.0, top];
    for lam in [ll, ln] {
        for t in [1.0, 5.0, 30.0] {
            pts.push(1.0 + t / lam);
        }
    }
    pts.push(scale);
    pts.retain(|&x| (1.0..=top).contains(&x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let integrand = |g: f64| {
        let f = cdf_gamma2(g / scale);
        if f <= 0.0 {
            return 0.0;
        }
        f.powi(n) * f_gamma1_pdf(g, cfg, los)
    };
    let tol = Tolerance::new(1e-9, 0.0).with_max_subdivisions(10_000);
    let r = gauss_kronrod_points(integrand, &pts, &tol);
    if !r.converged && r.error > FAIL_ERROR {
        return Err(Error::NonConvergence { error: r.error, subdivisions: r.subdivisions });
    }
    Ok(ScpResult {
        scp: r.value.clamp(0.0, 1.0),
        gamma1_truncation: top,
        quadrature_error_estimate: r.error,
        regime,
        lower_bound,
        subdivisions: r.subdivisions,
    })
}

/// Closed-form SCP (a lower bound whenever noise is present).
pub fn scp(cfg: &NetworkConfig, los: &PiecewiseLoS) -> Result<ScpResult> {
    if cfg.pj_eff() <= 0.0 {
        // Without jamming the eavesdropper SIR is unbounded, so F_Γ2 ≡ 0.
        cfg.validate()?;
        return Ok(ScpResult {
            scp: 0.0,
            gamma1_truncation: 1.0,
            quadrature_error_estimate: 0.0,
            regime: Regime::of(cfg, los),
            lower_bound: true,
            subdivisions: 0,
        });
    }
    scp_integral(cfg, los, |y| f_gamma2(y, cfg, los))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cdf::f_gamma1_cdf;

    #[test]
    fn degenerate_eavesdropper_gives_tail_of_gamma1() {
        let cfg = NetworkConfig { l_tj_m: 50.0, ..Default::default() };
        let los = PiecewiseLoS::table(&cfg.env).unwrap();
        let r = scp_integral(&cfg, &los, |y| if y > 1.0 { 1.0 } else { 0.0 }).unwrap();
        let expect = 1.0 - f_gamma1_cdf(2f64.powf(cfg.rt_bps_hz), &cfg, &los);
        assert!((r.scp - expect).abs() < 1e-8, "{} vs {expect}", r.scp);
        assert!(r.quadrature_error_estimate < 1e-6);
    }

    #[test]
    fn scp_is_a_probability() {
        let cfg = NetworkConfig::default();
        let los = PiecewiseLoS::table(&cfg.env).unwrap();
        let r = scp(&cfg, &los).unwrap();
        assert!((0.0..=1.0).contains(&r.scp));
        assert!(r.lower_bound);
        assert!(r.quadrature_error_estimate < 1e-6);
    }

    #[test]
    fn squared_cdf_for_two_eavesdroppers() {
        let cfg = NetworkConfig { l_tj_m: 120.0, pj_w: 0.05, ..Default::default() };
        let los = PiecewiseLoS::table(&cfg.env).unwrap();
        let two = NetworkConfig { n_eves: 2, ..cfg.clone() };
        let a = scp(&two, &los).unwrap().scp;
        let b = scp_integral(&cfg, &los, |y| f_gamma2(y, &cfg, &los).powi(2)).unwrap().scp;
        assert!((a - b).abs() < 1e-9);
        assert!(a <= scp(&cfg, &los).unwrap().scp);
    }
}
