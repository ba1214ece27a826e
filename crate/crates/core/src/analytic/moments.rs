//! Closed forms of the half-disk moments of the SIR indicator
//!
//! ```text
//! S1 = ∫₀^π ∫₀^r g·l dl dφ        (full disk: πr²/2)
//! S2 = ∫₀^π ∫₀^r g dl dφ          (full disk: πr)
//! S3 = 3∫₀^π ∫₀^r g·l² dl dφ      (full disk: πr³)
//! ```
//!
//! For fixed φ the indicator is an interval (or the complement of one) in
//! `l` bounded by the roots `u± = (L cos φ ± √Q)/A`, `Q = L²cos²φ − AB`. Each
//! moment is therefore a combination of `∫ r^p dφ` and `∫ u±^p dφ` over the
//! angular sub-ranges fixed by the row of the condition table. The `∫ u±^p`
//! primitives reduce to elementary functions and incomplete elliptic
//! integrals with parameter `L²/Δ`, `Δ = L² − AB`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::geometry::{classify_case, CaseGeometry};
use crate::quad::{gauss_kronrod_points, Tolerance};
use crate::scene::NetworkConfig;
use crate::specfun::{ellint_d_inc, ellint_e_inc, ellint_ed_reciprocal};

/// Which moment: the power of `l` after the inner integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    /// `S2`, weight 1.
    Arc = 1,
    /// `S1`, weight `l`.
    Area = 2,
    /// `S3`, weight `3l²`.
    Cubic = 3,
}

impl Moment {
    fn power(self) -> i32 {
        self as i32
    }

    /// Factor turning `∫(hi^p − lo^p) dφ` into the moment.
    fn factor(self) -> f64 {
        match self {
            Moment::Area => 0.5,
            _ => 1.0,
        }
    }
}

/// Primitives of `u±^p` split into the part even and odd in the root sign:
/// `∫₀^ψ u_σ^p = even(ψ) + σ·odd(ψ)` for `ψ ∈ [0, π/2]`.
struct Primitives {
    l: f64,
    a: f64,
    ab: f64,
    delta: f64,
    m: f64,
    /// Largest ψ with real roots.
    psi_max: f64,
}

impl Primitives {
    fn new(g: &CaseGeometry) -> Self {
        let (l, a) = (g.l_tj, g.a_coef);
        let ab = a * g.b_coef;
        let delta = g.delta.max(0.0);
        let psi_max = if delta >= l * l { FRAC_PI_2 } else { (delta.sqrt() / l).asin() };
        Self { l, a, ab, delta, m: l * l / delta, psi_max }
    }

    /// `Q(ψ) = L²cos²ψ − AB = Δ − L²sin²ψ`. When the roots meet at
    /// `ψ* = psi_max < π/2` it is factored around `ψ*` so that it stays
    /// accurate as ψ approaches the tangent.
    fn q2(&self, psi: f64) -> f64 {
        let l2 = self.l * self.l;
        if self.ab > 0.0 && self.psi_max < FRAC_PI_2 {
            let star = self.psi_max;
            let v = 2.0 * l2 * (0.5 * (star + psi)).sin() * (0.5 * (star - psi)).sin() * (psi.cos() + star.cos());
            return v.max(0.0);
        }
        (l2 * psi.cos().powi(2) - self.ab).max(0.0)
    }

    /// `(E(ψ|m), D(ψ|m))`; D is skipped (zero) when `skip_d`.
    fn elliptic(&self, psi: f64, skip_d: bool) -> (f64, f64) {
        if self.m > 1.0 {
            let q = self.q2(psi);
            let ls = self.l * psi.sin();
            let d = q + ls * ls;
            let (e, dd) = ellint_ed_reciprocal(ls / d.sqrt(), q / d, psi.cos().powi(2), self.m);
            return (e, if skip_d { 0.0 } else { dd });
        }
        let e = ellint_e_inc(psi, self.m).unwrap_or(f64::NAN);
        let d = if skip_d { 0.0 } else { ellint_d_inc(psi, self.m).unwrap_or(f64::NAN) };
        (e, d)
    }

    /// `∫₀^ψ √(Δ − L² sin²t) dt`.
    fn j0(&self, psi: f64) -> f64 {
        if psi == 0.0 || self.delta == 0.0 {
            return 0.0;
        }
        self.delta.sqrt() * self.elliptic(psi, true).0
    }

    /// `∫₀^ψ cos t·√(Δ − L² sin²t) dt`.
    fn j1(&self, psi: f64) -> f64 {
        if self.delta == 0.0 {
            return 0.0;
        }
        let s = psi.sin();
        let q = self.q2(psi).sqrt();
        // asin(L·s/√Δ), written through the discriminant.
        0.5 * s * q + self.delta / (2.0 * self.l) * (self.l * s).atan2(q)
    }

    /// `∫₀^ψ cos²t·√(Δ − L² sin²t) dt`.
    fn j2(&self, psi: f64) -> f64 {
        if psi == 0.0 || self.delta == 0.0 {
            return 0.0;
        }
        let (s, c) = psi.sin_cos();
        let sd = self.delta.sqrt();
        // (1 − m) = −AB/Δ; skip D entirely when AB = 0 (it may be infinite).
        let (e, d) = self.elliptic(psi, self.ab == 0.0);
        let tail = if self.ab == 0.0 { 0.0 } else { (self.ab / self.delta) * d };
        sd * (2.0 * e + tail) / 3.0 + s * c * self.q2(psi).sqrt() / 3.0
    }

    fn parts(&self, p: i32, psi: f64) -> (f64, f64) {
        let psi = psi.clamp(0.0, self.psi_max.max(0.0));
        let (l, a, ab) = (self.l, self.a, self.ab);
        let (s, c) = psi.sin_cos();
        match p {
            1 => (l * s / a, self.j0(psi) / a),
            2 => {
                let ic2 = 0.5 * psi + 0.5 * s * c;
                ((2.0 * l * l * ic2 - ab * psi) / (a * a), 2.0 * l * self.j1(psi) / (a * a))
            }
            3 => {
                let ic3 = s - s * s * s / 3.0;
                let a3 = a * a * a;
                ((4.0 * l * l * l * ic3 - 3.0 * ab * l * s) / a3, (4.0 * l * l * self.j2(psi) - ab * self.j0(psi)) / a3)
            }
            _ => unreachable!("moment power is 1, 2 or 3"),
        }
    }

    /// `(E, O)` with `∫_lo^hi u_σ^p dφ = E + σ·O` for `0 ≤ lo ≤ hi ≤ π`.
    fn interval(&self, p: i32, lo: f64, hi: f64) -> (f64, f64) {
        let (lo, hi) = (lo.clamp(0.0, PI), hi.clamp(0.0, PI));
        if !(hi > lo) {
            return (0.0, 0.0);
        }
        let (mut e, mut o) = (0.0, 0.0);
        if lo < FRAC_PI_2 {
            let top = hi.min(FRAC_PI_2);
            let (e1, o1) = self.parts(p, top);
            let (e0, o0) = self.parts(p, lo);
            e += e1 - e0;
            o += o1 - o0;
        }
        if hi > FRAC_PI_2 {
            // u_σ(π − ψ) = −u_{−σ}(ψ).
            let bot = lo.max(FRAC_PI_2);
            let (e1, o1) = self.parts(p, PI - bot);
            let (e0, o0) = self.parts(p, PI - hi);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            e += sign * (e1 - e0);
            o -= sign * (o1 - o0);
        }
        (e, o)
    }
}

/// Closed-form moment for an explicit geometry.
pub fn moment_closed_form(g: &CaseGeometry, which: Moment) -> f64 {
    let r = g.r;
    if !(r > 0.0) || !(g.k > 0.0) {
        return 0.0;
    }
    let p = which.power();
    let fp = which.factor();
    let rp = r.powi(p);
    let full = fp * PI * rp;
    let case = match g.case_index.or_else(|| classify_case(g)) {
        Some(c) => c,
        None => return 0.0,
    };
    if (16..=19).contains(&case) {
        return fp * half_plane(r, g.b_coef / (2.0 * g.l_tj), p);
    }
    let prim = Primitives::new(g);
    // R(a, b): the whole radius; X: the root primitives, whose largest
    // magnitude is tracked to detect cancellation.
    let rr = |a: f64, b: f64| rp * (b - a);
    let scale = std::cell::Cell::new(0.0f64);
    let x = |lo: f64, hi: f64| {
        let (e, o) = prim.interval(p, lo, hi);
        scale.set(scale.get().max(e.abs()).max(o.abs()));
        (e, o)
    };
    let f1 = g.f1.unwrap_or(PI);
    let f2 = g.f2.unwrap_or(0.0);
    let v = match case {
        1 | 2 => {
            let (_, o12) = x(f1, f2);
            let (e2p, o2p) = x(f2, PI);
            // Excluded band (u+, u−) on [F1, F2], (u+, r) on [F2, π].
            let excluded = -2.0 * o12 + rr(f2, PI) - (e2p + o2p);
            PI * rp - excluded
        }
        3 => {
            let (_, o) = x(f1, PI);
            PI * rp + 2.0 * o
        }
        4 => {
            let (e, o) = x(f2, PI);
            PI * rp - (rr(f2, PI) - (e + o))
        }
        5 | 13 => PI * rp,
        6 | 7 => {
            let tan = PI - f1;
            let (e0, o0) = x(0.0, f2);
            let (_, o1) = x(f2, tan);
            rr(0.0, f2) - (e0 - o0) + 2.0 * o1
        }
        8 => {
            let (_, o) = x(0.0, PI - f1);
            2.0 * o
        }
        9 | 10 => {
            let (e, o) = x(0.0, f2);
            rr(0.0, f2) - (e - o)
        }
        11 => {
            let (e, o) = x(0.0, PI);
            PI * rp - (e - o)
        }
        // The disk lies inside the boundary circle while the region is its
        // outside: nothing qualifies.
        12 => 0.0,
        14 => {
            let (e, o) = x(f2, PI);
            rr(0.0, f2) + e + o
        }
        15 => {
            let (e, o) = x(0.0, PI);
            e + o
        }
        _ => 0.0,
    };
    // Near A = 0 the far root runs off to infinity and the root primitives
    // grow like A^−p while the moment stays bounded. Once more than about
    // six digits would cancel, integrate the exact radial part over angle.
    if scale.get() > CANCELLATION_LIMIT * v.abs().max(1e-6 * PI * rp) || !v.is_finite() {
        return (fp * moment_by_angle(g, &prim, p)).clamp(0.0, full);
    }
    (fp * v).clamp(0.0, full)
}

const CANCELLATION_LIMIT: f64 = 1e6;

/// `∫₀^π (hi^p − lo^p) dφ` over the indicator set, with the radial limits
/// from cancellation-free root formulas and the angle integral done by
/// adaptive quadrature split at every angle where the set changes shape.
fn moment_by_angle(g: &CaseGeometry, prim: &Primitives, p: i32) -> f64 {
    let (a, b, l, r) = (g.a_coef, g.b_coef, g.l_tj, g.r);
    let rp = r.powi(p);
    let inner = |phi: f64| -> f64 {
        let c = phi.cos();
        let q = prim.q2(phi.min(PI - phi));
        let disc = l * l * c * c - a * b;
        if disc < 0.0 && q == 0.0 {
            return if a < 0.0 { rp } else { 0.0 };
        }
        let sq = q.sqrt();
        let t = if c >= 0.0 { l * c + sq } else { l * c - sq };
        let (x_big, x_small) = (t / a, if t != 0.0 { b / t } else { 0.0 });
        let (lo, hi) = if x_big < x_small { (x_big, x_small) } else { (x_small, x_big) };
        let span = |u: f64, v: f64| {
            let (u, v) = (u.clamp(0.0, r), v.clamp(0.0, r));
            if v > u {
                v.powi(p) - u.powi(p)
            } else {
                0.0
            }
        };
        if a > 0.0 {
            span(lo, hi)
        } else {
            span(0.0, lo) + span(hi, r)
        }
    };
    let mut pts = vec![0.0, PI, prim.psi_max, PI - prim.psi_max];
    pts.extend([g.f1, g.f2, g.f3].into_iter().flatten());
    pts.retain(|x| (0.0..=PI).contains(x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let tol = Tolerance::new(1e-13 * PI * rp, 1e-12).with_max_subdivisions(5000);
    gauss_kronrod_points(inner, &pts, &tol).value
}

/// `∫₀^π (hi^p − lo^p) dφ` over `{x ≥ h}` within the disk of radius `r`.
fn half_plane(r: f64, h: f64, p: i32) -> f64 {
    if h >= r {
        return 0.0;
    }
    if h <= -r {
        return PI * r.powi(p);
    }
    let theta0 = (h / r).acos();
    let w = (r * r - h * h).sqrt();
    let ln_t = if h == 0.0 { 0.0 } else { ((r + w) / h.abs()).ln() };
    match p {
        1 => r * theta0 - h * ln_t,
        2 => r * r * theta0 - h * w,
        3 => r * r * r * theta0 - 0.5 * h * r * w - 0.5 * h * h * h * ln_t,
        _ => unreachable!(),
    }
}

/// Moment for a jammer exactly at the centre, where the indicator depends
/// on `l` only: `A·l² + B ≤ 0`.
pub fn moment_radial(g: &CaseGeometry, which: Moment) -> f64 {
    let (a, b, r) = (g.a_coef, g.b_coef, g.r);
    let p = which.power();
    let fp = which.factor();
    if !(r > 0.0) || !(g.k > 0.0) {
        return 0.0;
    }
    let span = |lo: f64, hi: f64| fp * PI * (hi.powi(p) - lo.powi(p));
    if g.a_is_zero() {
        return if b <= 0.0 { span(0.0, r) } else { 0.0 };
    }
    if a > 0.0 {
        if b >= 0.0 {
            0.0
        } else {
            span(0.0, r.min((-b / a).sqrt()))
        }
    } else if b <= 0.0 {
        span(0.0, r)
    } else {
        let lo = (b / -a).sqrt();
        if lo >= r {
            0.0
        } else {
            span(lo, r)
        }
    }
}

fn eval(y: f64, eta: f64, r: f64, cfg: &NetworkConfig, which: Moment) -> f64 {
    if !(y > 1.0) || !(r > 0.0) || cfg.pj_eff() <= 0.0 {
        return 0.0;
    }
    let g = CaseGeometry::from_config(y, eta, r, cfg);
    moment_closed_form(&g, which)
}

/// `∫₀^π ∫₀^r g·l dl dφ`.
pub fn s1(y: f64, eta_linear: f64, r: f64, cfg: &NetworkConfig) -> f64 {
    eval(y, eta_linear, r, cfg, Moment::Area)
}

/// `∫₀^π ∫₀^r g dl dφ`.
pub fn s2(y: f64, eta_linear: f64, r: f64, cfg: &NetworkConfig) -> f64 {
    eval(y, eta_linear, r, cfg, Moment::Arc)
}

/// `3∫₀^π ∫₀^r g·l² dl dφ`.
pub fn s3(y: f64, eta_linear: f64, r: f64, cfg: &NetworkConfig) -> f64 {
    eval(y, eta_linear, r, cfg, Moment::Cubic)
}
