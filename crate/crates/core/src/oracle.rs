//! Brute-force quadrature of the indicator integrals.
//!
//! Used to check the closed forms. Nothing here touches the condition table
//! or the elliptic primitives: for each angle the set of radii satisfying the
//! SIR inequality is located numerically (extremum search plus bisection on
//! the raw margin), the weight is integrated over it, and the angle integral
//! is done adaptively.

use std::f64::consts::PI;

use crate::los::PiecewiseLoS;
use crate::quad::{gauss_kronrod_points, Tolerance};
use crate::scene::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorOracle {
    pub y: f64,
    pub l_tj: f64,
    pub h: f64,
    pub ps: f64,
    pub pj: f64,
    pub tol: Tolerance,
}

impl IndicatorOracle {
    pub fn new(y: f64, l_tj: f64, h: f64, ps: f64, pj: f64) -> Self {
        Self { y, l_tj, h, ps, pj, tol: Tolerance::new(1e-13, 1e-11).with_max_subdivisions(4000) }
    }

    pub fn from_config(y: f64, cfg: &NetworkConfig) -> Self {
        Self::new(y, cfg.l_tj_m, cfg.h_m, cfg.ps_eff(), cfg.pj_eff())
    }

    /// Jamming-weighted minus signal-weighted power; `≥ 0` exactly where the
    /// eavesdropper's `1 + SIR ≤ y`.
    fn margin(&self, eta: f64, l: f64, cos_phi: f64) -> f64 {
        let d_je2 = self.l_tj * self.l_tj + l * l - 2.0 * self.l_tj * l * cos_phi;
        (self.y - 1.0) * self.pj * (self.h * self.h + l * l) - eta * self.ps * d_je2
    }

    /// Sub-intervals of `[0, r]` where the indicator holds.
    pub fn true_intervals(&self, eta: f64, phi: f64, r: f64) -> Vec<(f64, f64)> {
        if !(self.y > 1.0) || self.pj <= 0.0 || !(r > 0.0) {
            return Vec::new();
        }
        let c = phi.cos();
        let f = |l: f64| self.margin(eta, l, c);
        // The margin is a quadratic in l, so between its extremum and either
        // end it is monotone. Locate the extremum on [0, r] by golden section
        // (searching both for a maximum and a minimum) and bracket.
        let mut cuts = vec![0.0, golden(&f, 0.0, r, true), golden(&f, 0.0, r, false), r];
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut roots = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (f(a), f(b));
            if (fa >= 0.0) != (fb >= 0.0) {
                roots.push(bisect(&f, a, b, fa));
            }
        }
        let mut points = vec![0.0];
        points.extend(roots);
        points.push(r);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b > a && f(0.5 * (a + b)) >= 0.0 {
                match out.last_mut() {
                    Some(last) if last.1 == a => last.1 = b,
                    _ => out.push((a, b)),
                }
            }
        }
        out
    }

    /// `∫₀^π ∫₀^r g·l^(p−1) dl dφ` scaled to the S-moment convention
    /// (`p = 2` → S1, `p = 1` → S2, `p = 3` → S3).
    pub fn moment(&self, eta: f64, r: f64, p: i32) -> f64 {
        let scale = match p {
            3 => 3.0,
            _ => 1.0,
        };
        let inner = |phi: f64| -> f64 {
            self.true_intervals(eta, phi, r).iter().map(|&(a, b)| (b.powi(p) - a.powi(p)) / p as f64).sum()
        };
        let full = PI * r.powi(p) / p as f64;
        let tol = Tolerance { abs: self.tol.abs * full.max(1.0), ..self.tol };
        let pts = self.angle_breaks(&[eta], r);
        scale * gauss_kronrod_points(inner, &pts, &tol).value
    }

    /// Angles in `[0, π]` where the shape of the indicator set changes
    /// (an interval appears, vanishes, or starts touching `0` or `r`).
    /// The angle integrand has square-root edges there, so they are handed
    /// to the integrator as breakpoints. Found by scanning and bisection.
    fn angle_breaks(&self, etas: &[f64], r: f64) -> Vec<f64> {
        const SCAN: usize = 512;
        let shape = |phi: f64| -> Vec<(usize, bool, bool)> {
            etas.iter()
                .map(|&eta| {
                    let iv = self.true_intervals(eta, phi, r);
                    let at_zero = iv.first().is_some_and(|v| v.0 == 0.0);
                    let at_r = iv.last().is_some_and(|v| v.1 == r);
                    (iv.len(), at_zero, at_r)
                })
                .collect()
        };
        // Every change of shape inside a bracket is found by splitting it
        // wherever its two ends disagree.
        fn locate<S: Fn(f64) -> T, T: PartialEq>(shape: &S, a: f64, sa: &T, b: f64, sb: &T, out: &mut Vec<f64>) {
            let m = 0.5 * (a + b);
            if b - a <= 1e-13 || m <= a || m >= b {
                out.push(m);
                return;
            }
            let sm = shape(m);
            if sm != *sa {
                locate(shape, a, sa, m, &sm, out);
            }
            if sm != *sb {
                locate(shape, m, &sm, b, sb, out);
            }
        }
        let mut pts = vec![0.0, PI];
        let mut prev = (0.0, shape(0.0));
        for i in 1..=SCAN {
            let phi = PI * i as f64 / SCAN as f64;
            let cur = shape(phi);
            if cur != prev.1 {
                locate(&shape, prev.0, &prev.1, phi, &cur, &mut pts);
            }
            prev = (phi, cur);
        }
        pts.sort_by(f64::total_cmp);
        pts
    }

    pub fn s1(&self, eta: f64, r: f64) -> f64 {
        self.moment(eta, r, 2)
    }

    pub fn s2(&self, eta: f64, r: f64) -> f64 {
        self.moment(eta, r, 1)
    }

    pub fn s3(&self, eta: f64, r: f64) -> f64 {
        self.moment(eta, r, 3)
    }

    /// Probability that a uniform eavesdropper in the disk of radius `r1`
    /// lies in the annulus `[r_lo, r_hi]` and has `1 + SIR ≤ y`, with the
    /// link state drawn from `los`.
    #[allow(clippy::too_many_arguments)]
    pub fn cdf_gamma2_annulus(&self, eta_l: f64, eta_n: f64, los: &PiecewiseLoS, r1: f64, r_lo: f64, r_hi: f64) -> f64 {
        if !(r_hi > r_lo) {
            return 0.0;
        }
        let bp = los.breakpoints(self.h);
        let inner_tol = Tolerance::new(1e-14 * r_hi * r_hi, 1e-13);
        let inner = |phi: f64| -> f64 {
            let mut pts = vec![r_lo, r_hi];
            for &(a, b) in self.true_intervals(eta_l, phi, r_hi).iter().chain(&self.true_intervals(eta_n, phi, r_hi)) {
                pts.push(a);
                pts.push(b);
            }
            for l in [bp.l1_m, bp.l2_m, bp.l3_m] {
                pts.push(l);
            }
            pts.retain(|&x| x >= r_lo && x <= r_hi && x.is_finite());
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let c = phi.cos();
            let integrand = |l: f64| {
                let pl = los.probability(self.h, l);
                let gl = if self.margin(eta_l, l, c) >= 0.0 { 1.0 } else { 0.0 };
                let gn = if self.margin(eta_n, l, c) >= 0.0 { 1.0 } else { 0.0 };
                (gl * pl + gn * (1.0 - pl)) * l
            };
            gauss_kronrod_points(integrand, &pts, &inner_tol).value
        };
        let tol = Tolerance { abs: self.tol.abs * r1 * r1, ..self.tol };
        let pts = self.angle_breaks(&[eta_l, eta_n], r_hi);
        2.0 / (PI * r1 * r1) * gauss_kronrod_points(inner, &pts, &tol).value
    }
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sign = if maximize { 1.0 } else { -1.0 };
    let g = |x: f64| sign * f(x);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa >= 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) >= 0.0) == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_disk_when_threshold_is_huge() {
        let o = IndicatorOracle::new(1e12, 100.0, 300.0, 0.1, 0.01);
        let r: f64 = 250.0;
        assert!((o.s1(1.0, r) - PI * r * r / 2.0).abs() < 1e-6);
        assert!((o.s2(1.0, r) - PI * r).abs() < 1e-9);
        assert!((o.s3(1.0, r) - PI * r.powi(3)).abs() < 1e-2);
    }

    #[test]
    fn centred_jammer_is_radial() {
        // k = 4: A = −3, B = −4H² < 0, so the whole disk qualifies.
        let o = IndicatorOracle::new(5.0, 0.0, 300.0, 1.0, 1.0);
        assert!((o.s2(1.0, 200.0) - PI * 200.0).abs() < 1e-9);
        // k = 0.5: A = 0.5, B = −H²/2: inside l ≤ H.
        let o = IndicatorOracle::new(1.5, 0.0, 300.0, 1.0, 1.0);
        assert!((o.s1(1.0, 500.0) - PI * 300.0 * 300.0 / 2.0).abs() < 1e-5);
    }
}
