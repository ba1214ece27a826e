//! Distributions of `Γ1` (legitimate link) and `Γ2` (one eavesdropper).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::moments::{s1, s2, s3};
use crate::los::PiecewiseLoS;
use crate::scene::{distance_jd, NetworkConfig};

/// Where the disk radius falls relative to the piecewise-LoS breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `R1 < ℓ1`: every eavesdropper link is LoS.
    PureLos,
    /// `ℓ1 ≤ R1 < ℓ2`.
    NearTransition,
    /// `ℓ2 ≤ R1 < ℓ3`.
    FarTransition,
    /// `R1 ≥ ℓ3`: the outer ring is pure NLoS.
    WithNlosRing,
}

impl Regime {
    pub fn of(cfg: &NetworkConfig, los: &PiecewiseLoS) -> Self {
        let bp = los.breakpoints(cfg.h_m);
        let r1 = cfg.r1_m;
        if r1 < bp.l1_m {
            Regime::PureLos
        } else if r1 < bp.l2_m {
            Regime::NearTransition
        } else if r1 < bp.l3_m {
            Regime::FarTransition
        } else {
            Regime::WithNlosRing
        }
    }
}

/// Probability mass inside radius `r` with `1 + SIR ≤ y` when every link
/// has gain `eta_linear`.
pub fn f_gamma3(y: f64, eta_linear: f64, r: f64, cfg: &NetworkConfig) -> f64 {
    let r1 = cfg.r1_m;
    s1(y, eta_linear, r, cfg) / (PI * r1 * r1 / 2.0)
}

/// Same mass when the LoS probability follows `c1·H/l + c2` on `[0, r]`.
pub fn f_gamma4(y: f64, eta_l: f64, eta_n: f64, r: f64, cfg: &NetworkConfig, los: &PiecewiseLoS) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    let (c1, c2, h) = (los.c1, los.c2, cfg.h_m);
    let v = c2 * s1(y, eta_l, r, cfg) + c1 * h * s2(y, eta_l, r, cfg) + (1.0 - c2) * s1(y, eta_n, r, cfg)
        - c1 * h * s2(y, eta_n, r, cfg);
    2.0 / (PI * cfg.r1_m * cfg.r1_m) * v
}

/// Same mass when the LoS probability follows `c3·l/H + c4` on `[0, r]`.
pub fn f_gamma5(y: f64, eta_l: f64, eta_n: f64, r: f64, cfg: &NetworkConfig, los: &PiecewiseLoS) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    let (c3, c4, h) = (los.c3, los.c4, cfg.h_m);
    let v = c4 * s1(y, eta_l, r, cfg) + c3 / (3.0 * h) * s3(y, eta_l, r, cfg) + (1.0 - c4) * s1(y, eta_n, r, cfg)
        - c3 / (3.0 * h) * s3(y, eta_n, r, cfg);
    2.0 / (PI * cfg.r1_m * cfg.r1_m) * v
}

/// CDF of `Γ2` for one eavesdropper uniform in the disk.
pub fn f_gamma2(y: f64, cfg: &NetworkConfig, los: &PiecewiseLoS) -> f64 {
    if !(y > 1.0) {
        return 0.0;
    }
    let (el, en) = (cfg.env.eta_los(), cfg.env.eta_nlos());
    let r1 = cfg.r1_m;
    let v = match los.forced {
        Some(crate::los::LinkState::Los) => f_gamma3(y, el, r1, cfg),
        Some(crate::los::LinkState::Nlos) => f_gamma3(y, en, r1, cfg),
        None => {
            let bp = los.breakpoints(cfg.h_m);
            let (l1, l2, l3) = (bp.l1_m, bp.l2_m, bp.l3_m);
            let f3 = |eta: f64, r: f64| f_gamma3(y, eta, r, cfg);
            let f4 = |r: f64| f_gamma4(y, el, en, r, cfg, los);
            let f5 = |r: f64| f_gamma5(y, el, en, r, cfg, los);
            match Regime::of(cfg, los) {
                Regime::PureLos => f3(el, r1),
                Regime::NearTransition => f3(el, l1) + f5(r1) - f5(l1),
                Regime::FarTransition => f3(el, l1) + f5(l2) - f5(l1) + f4(r1) - f4(l2),
                Regime::WithNlosRing => f3(el, l1) + f5(l2) - f5(l1) + f4(l3) - f4(l2) + f3(en, r1) - f3(en, l3),
            }
        }
    };
    v.clamp(0.0, 1.0)
}

/// Rate parameters of the legitimate-link mixture and its weights:
/// `(Λ_L, Λ_N, P_L, P_N)`.
///
/// `Λ(η) = l_sd^β/Ps·(η·Pj·l_jd^−2 + N0·(4π/λ)²)`; the free-space factor on
/// the noise term keeps both terms in the same units as the received powers.
pub fn gamma1_mixture(cfg: &NetworkConfig, los: &PiecewiseLoS) -> (f64, f64, f64, f64) {
    let ljd = distance_jd(cfg);
    let ground = cfg.ground_distance_jd();
    let pl = los.probability(cfg.h_m, ground);
    let noise = cfg.n0_w / cfg.friis_gain();
    let pre = cfg.l_sd_m.powf(cfg.beta) / cfg.ps_eff();
    let lambda = |eta: f64| pre * (eta * cfg.pj_eff() / (ljd * ljd) + noise);
    (lambda(cfg.env.eta_los()), lambda(cfg.env.eta_nlos()), pl, 1.0 - pl)
}

pub fn f_gamma1_cdf(g1: f64, cfg: &NetworkConfig, los: &PiecewiseLoS) -> f64 {
    if !(g1 > 1.0) {
        return 0.0;
    }
    let (ll, ln, pl, pn) = gamma1_mixture(cfg, los);
    let t = 1.0 - g1;
    // 1 − P_L·e^{tΛ_L} − P_N·e^{tΛ_N}, arranged to stay accurate near g1 = 1.
    -(pl * (t * ll).exp_m1() + pn * (t * ln).exp_m1())
}

pub fn f_gamma1_pdf(g1: f64, cfg: &NetworkConfig, los: &PiecewiseLoS) -> f64 {
    if g1 < 1.0 {
        return 0.0;
    }
    let (ll, ln, pl, pn) = gamma1_mixture(cfg, los);
    let t = 1.0 - g1;
    pl * ll * (t * ll).exp() + pn * ln * (t * ln).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::los::LinkState;
    use crate::quad::{gauss_kronrod, Tolerance};

    fn cfg() -> NetworkConfig {
        NetworkConfig { l_tj_m: 150.0, h_m: 500.0, ..Default::default() }
    }

    #[test]
    fn gamma3_limits() {
        let c = cfg();
        let eta = c.env.eta_los();
        assert_eq!(f_gamma3(1.0, eta, 300.0, &c), 0.0);
        assert!((f_gamma3(1e12, eta, 300.0, &c) - 0.36).abs() < 1e-9);
        let los = PiecewiseLoS::table(&c.env).unwrap();
        assert_eq!(f_gamma4(1.0, eta, 0.01, 300.0, &c, &los), 0.0);
        assert_eq!(f_gamma5(1.0, eta, 0.01, 300.0, &c, &los), 0.0);
    }

    #[test]
    fn gamma2_basics() {
        let c = cfg();
        let los = PiecewiseLoS::table(&c.env).unwrap();
        assert_eq!(f_gamma2(1.0, &c, &los), 0.0);
        assert!((f_gamma2(1e15, &c, &los) - 1.0).abs() < 1e-9);
        let mut prev = 0.0;
        for i in 0..200 {
            let y = 1.0 + 10f64.powf(-3.0 + 0.04 * i as f64);
            let v = f_gamma2(y, &c, &los);
            assert!(v >= prev - 1e-12, "y={y}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn pure_los_regime_is_gamma3() {
        let c = NetworkConfig { h_m: 2000.0, ..cfg() };
        let los = PiecewiseLoS::table(&c.env).unwrap();
        assert_eq!(Regime::of(&c, &los), Regime::PureLos);
        let y = 2.5;
        assert_eq!(f_gamma2(y, &c, &los), f_gamma3(y, c.env.eta_los(), c.r1_m, &c));
        let forced = PiecewiseLoS::always(LinkState::Los);
        assert_eq!(f_gamma2(y, &c, &forced), f_gamma3(y, c.env.eta_los(), c.r1_m, &c));
    }

    #[test]
    fn gamma1_cdf_and_pdf() {
        let c = cfg();
        let los = PiecewiseLoS::table(&c.env).unwrap();
        assert_eq!(f_gamma1_cdf(1.0, &c, &los), 0.0);
        assert!((f_gamma1_cdf(1e9, &c, &los) - 1.0).abs() < 1e-12);
        for &g in &[1.01, 1.5, 3.0, 10.0] {
            let h = 1e-5 * g;
            let fd = (f_gamma1_cdf(g + h, &c, &los) - f_gamma1_cdf(g - h, &c, &los)) / (2.0 * h);
            let pdf = f_gamma1_pdf(g, &c, &los);
            assert!((fd - pdf).abs() < 1e-8 * pdf.max(1.0), "{g}: {fd} vs {pdf}");
        }
        let (ll, ln, _, _) = gamma1_mixture(&c, &los);
        let top = 1.0 + 40.0 / ll.min(ln);
        let tol = Tolerance::new(1e-12, 1e-12);
        let mass = gauss_kronrod(|g| f_gamma1_pdf(g, &c, &los), 1.0, top, &tol).value;
        assert!((mass - 1.0).abs() < 1e-9, "{mass}");
    }

    #[test]
    fn gamma1_without_jammer() {
        let c = NetworkConfig { pj_w: 0.0, ..cfg() };
        let los = PiecewiseLoS::table(&c.env).unwrap();
        let rate = c.l_sd_m.powf(c.beta) * c.n0_w / (c.ps_w * c.friis_gain());
        for &g in &[1.1, 2.0, 5.0] {
            let expect = 1.0 - (-(g - 1.0) * rate).exp();
            assert!((f_gamma1_cdf(g, &c, &los) - expect).abs() < 1e-14);
        }
    }
}
