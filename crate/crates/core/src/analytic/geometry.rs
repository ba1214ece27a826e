//! Region where an eavesdropper's SIR stays below a threshold.
//!
//! With α = 2 the condition `g = 1` reduces to the quadratic inequality
//! `A·l² − 2L·l·cos φ + B ≤ 0` in the polar coordinates `(l, φ)` of the
//! eavesdropper relative to the jammer direction, where `L` is the jammer
//! offset, `k = (y − 1)·Pj/(η·Ps)`, `A = 1 − k` and `B = L² − k·H²`.
//! The boundary is the circle `A(x² + y²) − 2Lx + B = 0` (a line when A = 0).

use serde::{Deserialize, Serialize};

use crate::scene::NetworkConfig;

/// Relative tolerance that decides the equality rows of the condition table.
pub const EQ_TOL: f64 = 1e-10;

/// `A` is treated as zero below `A_ZERO_TOL·(1 + L²/H²)`.
pub const A_ZERO_TOL: f64 = 1e-9;

/// Intermediates of one closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseGeometry {
    pub y: f64,
    pub eta_linear: f64,
    /// `(y − 1)·Pj/(η·Ps)`.
    pub k: f64,
    pub a_coef: f64,
    pub b_coef: f64,
    /// `A·r² + B`.
    pub a1: f64,
    pub r: f64,
    pub l_tj: f64,
    pub h: f64,
    /// `L² − A·B`; the boundary circle has radius `√Δ/|A|`.
    pub delta: f64,
    /// Elliptic parameter `L²/Δ`.
    pub modulus: f64,
    /// `acos(−√(AB)/L)`; defined when `A·B ≥ 0` and the argument is real.
    pub f1: Option<f64>,
    /// `acos((r²A + B)/(2rL))`.
    pub f2: Option<f64>,
    /// `acos(rA/L)`.
    pub f3: Option<f64>,
    pub case_index: Option<u8>,
}

fn acos_checked(x: f64) -> Option<f64> {
    if x.is_finite() && (-1.0..=1.0).contains(&x) {
        Some(x.acos())
    } else {
        None
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl CaseGeometry {
    /// Builds the geometry from raw inputs. `l_tj` must be positive; callers
    /// clamp a centred jammer to a tiny offset.
    pub fn new(y: f64, eta_linear: f64, r: f64, l_tj: f64, h: f64, ps: f64, pj: f64) -> Self {
        let k = ((y - 1.0) * pj / (eta_linear * ps)).max(0.0);
        let a = 1.0 - k;
        let l = l_tj;
        let b = l * l - k * h * h;
        // Δ = L² − AB = k(L² + A·H²), written without the cancellation.
        let delta = k * (l * l + a * h * h);
        let mut g = Self {
            y,
            eta_linear,
            k,
            a_coef: a,
            b_coef: b,
            a1: a * r * r + b,
            r,
            l_tj: l,
            h,
            delta,
            modulus: if delta != 0.0 { l * l / delta } else { f64::INFINITY },
            f1: if a * b >= 0.0 { acos_checked(-(a * b).sqrt() / l) } else { None },
            f2: acos_checked((r * r * a + b) / (2.0 * r * l)),
            f3: acos_checked(r * a / l),
            case_index: None,
        };
        g.case_index = classify_case(&g);
        g
    }

    pub fn from_config(y: f64, eta_linear: f64, r: f64, cfg: &NetworkConfig) -> Self {
        Self::new(y, eta_linear, r, effective_l_tj(cfg), cfg.h_m, cfg.ps_eff(), cfg.pj_eff())
    }

    pub fn a_is_zero(&self) -> bool {
        self.a_coef.abs() < A_ZERO_TOL * (1.0 + self.l_tj * self.l_tj / (self.h * self.h))
    }

    /// Roots `(x1, x2)` of `A·l² − 2L·l·cos φ + B = 0`, with `x1` taking the
    /// `+√` branch. `None` when they are complex or `A = 0`.
    pub fn roots(&self, phi: f64) -> Option<(f64, f64)> {
        let (a, l) = (self.a_coef, self.l_tj);
        let c = phi.cos();
        let q = l * l * c * c - a * self.b_coef;
        if q < 0.0 || a == 0.0 {
            return None;
        }
        let s = q.sqrt();
        Some(((l * c + s) / a, (l * c - s) / a))
    }
}

/// Jammer offset used by the closed forms: a centred jammer makes every
/// boundary angle divide by zero, so it is nudged off-centre.
pub fn effective_l_tj(cfg: &NetworkConfig) -> f64 {
    cfg.l_tj_m.max(1e-6 * cfg.r1_m)
}

/// Row of the condition table matching `g`, evaluated in table order.
///
/// Rows 1–15 need `A ≠ 0`; rows 16–19 handle `A = 0`. `None` marks the
/// configurations where the region misses the disk entirely.
pub fn classify_case(g: &CaseGeometry) -> Option<u8> {
    let (a, b, r, l, h) = (g.a_coef, g.b_coef, g.r, g.l_tj, g.h);
    if !(r > 0.0) {
        return None;
    }
    if g.a_is_zero() {
        if approx_eq(l, h) {
            return Some(18);
        }
        if l > h && (l * l - h * h) / (2.0 * r) <= l {
            return Some(16);
        }
        if l < h && (h * h - l * l) / (2.0 * r) <= l {
            return Some(17);
        }
        if l < (h * h - l * l) / (2.0 * r) {
            return Some(19);
        }
        return None;
    }
    let ra = r * r * a;
    let sab = if a * b >= 0.0 { (a * b).sqrt() } else { f64::NAN };
    let eq = approx_eq(ra, b);
    let ne_sab = !approx_eq(l, sab);
    if a < 0.0 && b <= 0.0 {
        let lim = (-ra - b) / (2.0 * r);
        if ra < b && !eq && lim <= l && ne_sab {
            return Some(1);
        }
        if eq && lim <= l && ne_sab {
            return Some(2);
        }
        if ra < b && sab < l && l < lim {
            return Some(3);
        }
        if ra > b && lim <= l {
            return Some(4);
        }
        return Some(5);
    }
    if a > 0.0 && b >= 0.0 {
        let lim = (ra + b) / (2.0 * r);
        if ra > b && !eq && lim <= l && ne_sab {
            return Some(6);
        }
        if eq && lim <= l && ne_sab {
            return Some(7);
        }
        if ra > b && sab < l && l < lim {
            return Some(8);
        }
        if ra < b && lim <= l {
            return Some(9);
        }
        return None;
    }
    if a < 0.0 {
        // B > 0.
        if l >= (ra + b).abs() / (2.0 * r) {
            return Some(10);
        }
        if -ra > b && l < (-ra - b) / (2.0 * r) {
            return Some(11);
        }
        return Some(12);
    }
    // A > 0, B < 0.
    if -ra > b && l < (-ra - b) / (2.0 * r) {
        return Some(13);
    }
    if l >= (ra + b).abs() / (2.0 * r) {
        return Some(14);
    }
    if -ra < b && l < (ra + b) / (2.0 * r) {
        return Some(15);
    }
    None
}

/// The SIR indicator: `true` iff the eavesdropper at `(l, φ)` sees
/// `1 + SIR ≤ y`. `φ` is measured from the jammer's direction.
pub fn indicator_g(y: f64, eta_linear: f64, l: f64, phi: f64, cfg: &NetworkConfig) -> bool {
    indicator_raw(y, eta_linear, l, phi, cfg.l_tj_m, cfg.h_m, cfg.ps_eff(), cfg.pj_eff())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn indicator_raw(y: f64, eta: f64, l: f64, phi: f64, l_tj: f64, h: f64, ps: f64, pj: f64) -> bool {
    if !(y > 1.0) || pj <= 0.0 {
        return false;
    }
    let d_je2 = l_tj * l_tj + l * l - 2.0 * l_tj * l * phi.cos();
    if d_je2 <= 0.0 {
        return true;
    }
    let signal = eta * ps / (h * h + l * l);
    let jamming = pj / d_je2;
    1.0 + signal / jamming <= y
}
