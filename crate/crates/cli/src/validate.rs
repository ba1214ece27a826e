//! Self-consistency suite run by `jamsec validate`.

use std::f64::consts::{FRAC_PI_2, PI};

use jamsec_core::analytic::{moment_closed_form, Moment};
use jamsec_core::mc::{ks_distance_bound, sample_gamma2};
use jamsec_core::oracle::IndicatorOracle;
use jamsec_core::{
    ellint_e, ellint_k, f_gamma2, s1, s2, s3, scp, simulate_scp, CaseGeometry, LosMode, NetworkConfig, NoiseMode,
    PiecewiseLoS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64, detail: String) -> Self {
        Self { name, passed: value <= threshold, value, threshold, detail }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub random_geometries: usize,
    pub cdf_draws: u64,
    pub scp_trials: u64,
}

const MOMENT_TOL: f64 = 1e-5;

fn moment_error(cf: f64, reference: f64, r: f64, p: i32) -> f64 {
    let full = PI * r.powi(p) * if p == 2 { 0.5 } else { 1.0 };
    (cf - reference).abs() / reference.abs().max(1e-6 * full)
}

/// Closed-form moments against the quadrature oracle, at the configured
/// geometry over a spread of thresholds and then at random geometries.
fn closed_forms(cfg: &NetworkConfig, los: &PiecewiseLoS, budget: Budget, seed: u64) -> Check {
    let mut worst = (0.0f64, String::new());
    let oracle_cfg = |y: f64| IndicatorOracle::from_config(y, cfg);
    let bp = los.breakpoints(cfg.h_m);
    let radii: Vec<f64> =
        [cfg.r1_m, 0.5 * cfg.r1_m, bp.l1_m, bp.l2_m].into_iter().filter(|&r| r > 0.0 && r <= cfg.r1_m).collect();
    if cfg.pj_eff() > 0.0 {
        for i in 0..8 {
            let y = 1.0 + 10f64.powf(-3.0 + i as f64);
            for eta in [cfg.env.eta_los(), cfg.env.eta_nlos()] {
                let oracle = oracle_cfg(y);
                for &r in &radii {
                    for (p, cf) in [(2, s1(y, eta, r, cfg)), (1, s2(y, eta, r, cfg)), (3, s3(y, eta, r, cfg))] {
                        let e = moment_error(cf, oracle.moment(eta, r, p), r, p);
                        if e > worst.0 {
                            worst = (e, format!("config y={y} eta={eta} r={r} p={p}"));
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget.random_geometries {
        let h = 10f64.powf(rng.random_range(1.5..3.3));
        let l = h * 10f64.powf(rng.random_range(-1.5..1.0));
        let k = 10f64.powf(rng.random_range(-1.5..1.5));
        let r = l * 10f64.powf(rng.random_range(-1.0..1.2));
        let g = CaseGeometry::new(1.0 + k, 1.0, r, l, h, 1.0, 1.0);
        let oracle = IndicatorOracle::new(g.y, l, h, 1.0, 1.0);
        for (which, p) in [(Moment::Area, 2), (Moment::Arc, 1), (Moment::Cubic, 3)] {
            let e = moment_error(moment_closed_form(&g, which), oracle.moment(1.0, r, p), r, p);
            if e > worst.0 {
                worst = (e, format!("random k={k} L={l} H={h} r={r} p={p}"));
            }
        }
    }
    Check::at_most("closed_form_moments", worst.0, MOMENT_TOL, worst.1)
}

fn cdf_shape(cfg: &NetworkConfig, los: &PiecewiseLoS) -> Check {
    let mut prev = 0.0;
    let mut worst_drop: f64 = 0.0;
    let mut out_of_range = 0usize;
    for i in 0..400 {
        let y = 1.0 + 10f64.powf(-6.0 + 14.0 * i as f64 / 399.0);
        let f = f_gamma2(y, cfg, los);
        if !(0.0..=1.0).contains(&f) {
            out_of_range += 1;
        }
        worst_drop = worst_drop.max(prev - f);
        prev = f;
    }
    let v = if out_of_range > 0 { f64::INFINITY } else { worst_drop.max(0.0) };
    Check::at_most("gamma2_cdf_monotone", v, 1e-9, format!("{out_of_range} values outside [0, 1]"))
}

fn cdf_ks(cfg: &NetworkConfig, los: &PiecewiseLoS, budget: Budget, seed: u64) -> Check {
    let samples = sample_gamma2(cfg, &LosMode::Piecewise(*los), budget.cdf_draws, seed);
    let stride = (budget.cdf_draws as usize / 2000).max(1);
    let ks = ks_distance_bound(&samples, |y| f_gamma2(y, cfg, los), stride);
    // Three times the asymptotic 95% KS quantile, floored at 0.005.
    let limit = (3.0 * 1.36 / (budget.cdf_draws as f64).sqrt()).max(0.005);
    Check::at_most("gamma2_cdf_ks", ks, limit, format!("{} draws", budget.cdf_draws))
}

fn scp_checks(cfg: &NetworkConfig, los: &PiecewiseLoS, budget: Budget, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    // Agreement is only claimed once jamming dominates the legitimate link.
    let il = NetworkConfig { pj_w: cfg.pj_w.max(0.01), ..cfg.interference_limited() };
    let mode = LosMode::Piecewise(*los);
    match scp(&il, los) {
        Ok(a) => {
            let m = simulate_scp(&il, &mode, budget.scp_trials, NoiseMode::InterferenceLimited, seed);
            let d = (a.scp - m.estimate).abs();
            out.push(Check::at_most(
                "scp_interference_limited",
                d,
                0.02 + 3.0 * m.half_width() / 1.96,
                format!("analytic {:.6}, simulated {:.6}, Pj {}", a.scp, m.estimate, il.pj_w),
            ));
        }
        Err(e) => out.push(Check::at_most("scp_interference_limited", f64::INFINITY, 0.02, e.to_string())),
    }
    if cfg.pj_eff() > 0.0 && (cfg.n0_w > 0.0 || cfg.ne_w > 0.0) {
        match scp(cfg, los) {
            Ok(a) => {
                let m = simulate_scp(cfg, &mode, budget.scp_trials, NoiseMode::WithNoise, seed ^ 0x9e37_79b9);
                out.push(Check::at_most(
                    "scp_lower_bound",
                    a.scp - m.estimate,
                    0.01,
                    format!("analytic {:.6}, simulated {:.6}", a.scp, m.estimate),
                ));
            }
            Err(e) => out.push(Check::at_most("scp_lower_bound", f64::INFINITY, 0.01, e.to_string())),
        }
    }
    out
}

fn legendre() -> Check {
    let mut worst: f64 = 0.0;
    for i in 1..100 {
        let m = i as f64 / 100.0;
        let vals = (ellint_k(m), ellint_e(m), ellint_k(1.0 - m), ellint_e(1.0 - m));
        let (Ok(k), Ok(e), Ok(kc), Ok(ec)) = vals else {
            worst = f64::INFINITY;
            break;
        };
        worst = worst.max((e * kc + ec * k - k * kc - FRAC_PI_2).abs());
    }
    Check::at_most("elliptic_legendre_relation", worst, 1e-10, String::new())
}

pub fn run(cfg: &NetworkConfig, los: &PiecewiseLoS, budget: Budget, seed: u64) -> Vec<Check> {
    let mut checks = vec![legendre(), closed_forms(cfg, los, budget, seed), cdf_shape(cfg, los)];
    if cfg.pj_eff() > 0.0 {
        checks.push(cdf_ks(cfg, los, budget, seed.wrapping_add(1)));
    }
    checks.extend(scp_checks(cfg, los, budget, seed.wrapping_add(2)));
    checks
}
