//! Real elliptic integrals of the first and second kind.
//!
//! Parameter convention follows DLMF chapter 19:
//!
//! ```text
//! F(φ|m) = ∫₀^φ (1 − m sin²t)^(−1/2) dt      K(m) = F(π/2|m)
//! E(φ|m) = ∫₀^φ (1 − m sin²t)^(1/2) dt       E(m) = E(π/2|m)
//! ```
//!
//! Everything is evaluated through Carlson's symmetric integrals `R_F` and
//! `R_D` using the duplication theorem. Negative parameters need no special
//! treatment. For `m > 1` the incomplete integrals are real only on the first
//! branch `|φ| ≤ asin(1/√m)`; they are mapped to parameter `1/m` there, and a
//! domain error is returned outside it.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const RF_TOL: f64 = 8.0e-4;
const RD_TOL: f64 = 6.0e-4;

/// Arguments of an incomplete elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArgs {
    pub phi_rad: f64,
    pub m: f64,
}

impl EllipticArgs {
    pub fn new(phi_rad: f64, m: f64) -> Self {
        Self { phi_rad, m }
    }

    /// `true` when the integrand stays real on `[0, φ]`.
    pub fn is_real(&self) -> bool {
        if !self.phi_rad.is_finite() || !self.m.is_finite() {
            return false;
        }
        if self.m <= 1.0 {
            return self.m < 1.0 || self.phi_rad.abs() <= FRAC_PI_2;
        }
        self.phi_rad.abs() <= (1.0 / self.m.sqrt()).asin() * (1.0 + 4.0 * f64::EPSILON)
    }
}

/// Carlson's symmetric integral of the first kind,
/// `R_F(x,y,z) = ½∫₀^∞ [(t+x)(t+y)(t+z)]^(−1/2) dt`.
///
/// Requires non-negative arguments with at most one zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    debug_assert!(x >= 0.0 && y >= 0.0 && z >= 0.0);
    if (x == 0.0 && y == 0.0) || (x == 0.0 && z == 0.0) || (y == 0.0 && z == 0.0) {
        return f64::INFINITY;
    }
    let (mut xt, mut yt, mut zt) = (x, y, z);
    let (mut ave, mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (xt.sqrt(), yt.sqrt(), zt.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lambda);
        yt = 0.25 * (yt + lambda);
        zt = 0.25 * (zt + lambda);
        ave = (xt + yt + zt) / 3.0;
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= RF_TOL {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 / 44.0 * e3) * e2 + e3 / 14.0) / ave.sqrt()
}

/// Carlson's degenerate integral of the second kind,
/// `R_D(x,y,z) = (3/2)∫₀^∞ [(t+x)(t+y)]^(−1/2) (t+z)^(−3/2) dt`.
///
/// Requires `x, y ≥ 0` with `x + y > 0` and `z > 0`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    debug_assert!(x >= 0.0 && y >= 0.0 && z > 0.0);
    if x == 0.0 && y == 0.0 {
        return f64::INFINITY;
    }
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;

    let (mut xt, mut yt, mut zt) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let (mut ave, mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (xt.sqrt(), yt.sqrt(), zt.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lambda));
        fac *= 0.25;
        xt = 0.25 * (xt + lambda);
        yt = 0.25 * (yt + lambda);
        zt = 0.25 * (zt + lambda);
        ave = 0.2 * (xt + yt + 3.0 * zt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= RD_TOL {
            break;
        }
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    3.0 * sum
        + fac * (1.0 + ed * (-C1 + C5 * ed - C6 * dz * ee) + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
            / (ave * ave.sqrt())
}

/// Complete integral of the first kind `K(m)`, defined for `m < 1`.
pub fn ellint_k(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(Error::EllipticDomain { phi: FRAC_PI_2, m });
    }
    Ok(carlson_rf(0.0, 1.0 - m, 1.0))
}

/// Complete integral of the second kind `E(m)`, defined for `m ≤ 1`.
pub fn ellint_e(m: f64) -> Result<f64> {
    if m == 1.0 {
        return Ok(1.0);
    }
    if !(m < 1.0) {
        return Err(Error::EllipticDomain { phi: FRAC_PI_2, m });
    }
    let y = 1.0 - m;
    Ok(carlson_rf(0.0, y, 1.0) - m / 3.0 * carlson_rd(0.0, y, 1.0))
}

/// Splits `φ` into `n·π + r` with `r ∈ [−π/2, π/2]`.
fn reduce(phi: f64) -> (f64, f64) {
    let n = (phi / PI).round();
    (n, phi - n * PI)
}

/// `(sin φ, cos² φ, 1 − m sin² φ)` for `|φ| ≤ π/2`, with the last term
/// floored at zero against rounding at the branch edge.
fn carlson_args(phi: f64, m: f64) -> (f64, f64, f64) {
    let s = phi.sin();
    let c = phi.cos();
    let delta = (1.0 - m * s * s).max(0.0);
    (s, c * c, delta)
}

/// Reciprocal-parameter amplitude: `sin β = √m·sin φ`, parameter `1/m`.
fn reciprocal(phi: f64, m: f64) -> (f64, f64) {
    let x = (m.sqrt() * phi.sin()).clamp(-1.0, 1.0);
    (x.asin(), 1.0 / m)
}

fn check(phi: f64, m: f64) -> Result<()> {
    if EllipticArgs::new(phi, m).is_real() {
        Ok(())
    } else {
        Err(Error::EllipticDomain { phi, m })
    }
}

/// Incomplete integral of the first kind `F(φ|m)`.
pub fn ellint_f(phi: f64, m: f64) -> Result<f64> {
    check(phi, m)?;
    if m >= 1.0 {
        if m == 1.0 {
            return Ok(phi.sin().atanh());
        }
        let (beta, rm) = reciprocal(phi, m);
        let (s, c2, d) = carlson_args(beta, rm);
        return Ok(s * carlson_rf(c2, d, 1.0) / m.sqrt());
    }
    let (n, r) = reduce(phi);
    let (s, c2, d) = carlson_args(r, m);
    let base = s * carlson_rf(c2, d, 1.0);
    if n == 0.0 {
        Ok(base)
    } else {
        Ok(base + 2.0 * n * ellint_k(m)?)
    }
}

/// Incomplete integral of the second kind `E(φ|m)`.
pub fn ellint_e_inc(phi: f64, m: f64) -> Result<f64> {
    check(phi, m)?;
    if m >= 1.0 {
        if m == 1.0 {
            return Ok(phi.sin());
        }
        // E(φ|m) = √m·E(β|1/m) − (√m − 1/√m)·F(β|1/m). Both terms stay bounded
        // at the branch edge, where the direct form cancels.
        let (beta, rm) = reciprocal(phi, m);
        let (s, c2, d) = carlson_args(beta, rm);
        let rf = carlson_rf(c2, d, 1.0);
        let e = s * rf - rm / 3.0 * s * s * s * carlson_rd(c2, d, 1.0);
        let sm = m.sqrt();
        return Ok(sm * e - (sm - 1.0 / sm) * s * rf);
    }
    let (n, r) = reduce(phi);
    let (s, c2, d) = carlson_args(r, m);
    let base = s * carlson_rf(c2, d, 1.0) - m / 3.0 * s * s * s * carlson_rd(c2, d, 1.0);
    if n == 0.0 {
        Ok(base)
    } else {
        Ok(base + 2.0 * n * ellint_e(m)?)
    }
}

/// `D(φ|m) = (F(φ|m) − E(φ|m))/m = ∫₀^φ sin²t (1 − m sin²t)^(−1/2) dt`,
/// evaluated without the cancellation of the difference form. Only the
/// principal range `0 ≤ φ ≤ π/2` is supported.
pub fn ellint_d_inc(phi: f64, m: f64) -> Result<f64> {
    check(phi, m)?;
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::EllipticDomain { phi, m });
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    if m > 1.0 {
        // D(φ|m) = D(β|1/m)/m^(3/2).
        let (beta, rm) = reciprocal(phi, m);
        let (s, c2, d) = carlson_args(beta, rm);
        return Ok(s * s * s / 3.0 * carlson_rd(c2, d, 1.0) / (m * m.sqrt()));
    }
    let (s, c2, d) = carlson_args(phi, m);
    Ok(s * s * s / 3.0 * carlson_rd(c2, d, 1.0))
}

/// `(E(φ|m), D(φ|m))` for `m > 1` from the reciprocal amplitude `β`
/// (`sin β = √m·sin φ`), supplied as `sin β`, `cos² β` and `cos² φ`.
///
/// Near the branch edge `cos² β` is a small difference; callers that can
/// form it without cancellation keep full accuracy there, which
/// `asin(√m·sin φ)` cannot.
pub fn ellint_ed_reciprocal(sin_b: f64, cos2_b: f64, cos2_phi: f64, m: f64) -> (f64, f64) {
    let rm = 1.0 / m;
    let s = sin_b;
    let rf = carlson_rf(cos2_b, cos2_phi, 1.0);
    let rd = carlson_rd(cos2_b, cos2_phi, 1.0);
    let sm = m.sqrt();
    let e_b = s * rf - rm / 3.0 * s * s * s * rd;
    (sm * e_b - (sm - 1.0 / sm) * s * rf, s * s * s / 3.0 * rd / (m * sm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_kronrod, Tolerance};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn quad_e(phi: f64, m: f64) -> f64 {
        let tol = Tolerance::new(0.0, 1e-14);
        gauss_kronrod(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, &tol).value
    }

    fn quad_f(phi: f64, m: f64) -> f64 {
        let tol = Tolerance::new(0.0, 1e-14);
        gauss_kronrod(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, &tol).value
    }

    #[test]
    fn reciprocal_amplitude_entry_agrees() {
        for &(phi, m) in &[(0.3f64, 2.0f64), (0.5, 3.5), (0.2, 20.0)] {
            let sb: f64 = m.sqrt() * f64::sin(phi);
            let (e, d) = ellint_ed_reciprocal(sb, 1.0 - sb * sb, f64::cos(phi).powi(2), m);
            assert!(rel(e, ellint_e_inc(phi, m).unwrap()) < 1e-14);
            assert!(rel(d, ellint_d_inc(phi, m).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn zero_parameter() {
        assert!(rel(ellint_k(0.0).unwrap(), FRAC_PI_2) < 1e-15);
        assert!(rel(ellint_e(0.0).unwrap(), FRAC_PI_2) < 1e-15);
        for phi in [0.1, 0.7, 1.3, 2.9, -0.4] {
            assert!((ellint_f(phi, 0.0).unwrap() - phi).abs() < 1e-14);
            assert!((ellint_e_inc(phi, 0.0).unwrap() - phi).abs() < 1e-14);
        }
    }

    #[test]
    fn e_at_one() {
        assert_eq!(ellint_e(1.0).unwrap(), 1.0);
        assert!(ellint_k(1.0).is_err());
        assert!(ellint_e(1.5).is_err());
    }

    #[test]
    fn quadrature_agreement() {
        let e = ellint_e(-2.5).unwrap();
        assert!(rel(e, quad_e(FRAC_PI_2, -2.5)) < 1e-12, "E(-2.5) = {e}");
        let k = ellint_k(-4.0).unwrap();
        assert!(rel(k, quad_f(FRAC_PI_2, -4.0)) < 1e-12, "K(-4) = {k}");
        let f = ellint_f(1.1, -0.7).unwrap();
        assert!(rel(f, quad_f(1.1, -0.7)) < 1e-12, "F(1.1|-0.7) = {f}");
        for &(phi, m) in &[(0.3, 0.9), (1.2, 0.999), (2.4, 0.5), (0.5, 3.0), (0.2, 20.0), (1.5, -30.0)] {
            assert!(rel(ellint_f(phi, m).unwrap(), quad_f(phi, m)) < 1e-12, "F({phi}|{m})");
            assert!(rel(ellint_e_inc(phi, m).unwrap(), quad_e(phi, m)) < 1e-12, "E({phi}|{m})");
        }
    }

    #[test]
    fn legendre_relation() {
        for i in 1..40 {
            let m = i as f64 / 40.0;
            let lhs = ellint_e(m).unwrap() * ellint_k(1.0 - m).unwrap()
                + ellint_e(1.0 - m).unwrap() * ellint_k(m).unwrap()
                - ellint_k(m).unwrap() * ellint_k(1.0 - m).unwrap();
            assert!((lhs - FRAC_PI_2).abs() < 1e-10, "m = {m}: {lhs}");
        }
    }

    #[test]
    fn range_reduction() {
        let m = 0.6;
        let k = ellint_k(m).unwrap();
        assert!(rel(ellint_f(FRAC_PI_2, m).unwrap(), k) < 1e-12);
        assert!(rel(ellint_f(0.4 + PI, m).unwrap(), ellint_f(0.4, m).unwrap() + 2.0 * k) < 1e-12);
        assert!(rel(ellint_f(-0.4, m).unwrap(), -ellint_f(0.4, m).unwrap()) < 1e-14);
        let e = ellint_e(m).unwrap();
        assert!(rel(ellint_e_inc(2.5, m).unwrap(), 2.0 * e - ellint_e_inc(PI - 2.5, m).unwrap()) < 1e-12);
    }

    #[test]
    fn beyond_real_branch_is_rejected() {
        assert!(ellint_f(1.0, 2.0).is_err());
        assert!(ellint_e_inc(1.0, 2.0).is_err());
        assert!(ellint_f(0.5, 2.0).is_ok());
        assert!(ellint_f(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn branch_edge_for_large_parameter() {
        // At the edge of the real branch E(φ|m) → 1 and D stays finite as m → 1⁺.
        for &m in &[1.0 + 1e-12, 1.0 + 1e-6, 1.5, 40.0] {
            let edge = (1.0 / f64::sqrt(m)).asin();
            let e = ellint_e_inc(edge, m).unwrap();
            let q = quad_e(edge, m);
            assert!((e - q).abs() < 1e-10, "m = {m}: {e} vs {q}");
            assert!(ellint_d_inc(edge, m).unwrap().is_finite());
        }
    }

    #[test]
    fn d_matches_difference() {
        for &(phi, m) in &[(0.3, 0.2), (1.2, -3.0), (0.6, 2.5), (1.5, 0.99)] {
            let d = ellint_d_inc(phi, m).unwrap();
            let diff = (ellint_f(phi, m).unwrap() - ellint_e_inc(phi, m).unwrap()) / m;
            assert!(rel(d, diff) < 1e-9, "D({phi}|{m}) {d} vs {diff}");
        }
    }
}
