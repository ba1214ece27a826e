//! Line-of-sight probability models for air-to-ground links.
//!
//! Three models are provided: the exact building-obstruction product, the
//! two-parameter sigmoid in elevation angle, and the four-branch piecewise
//! model whose middle branches are linear in `tan θ` and `cot θ`. The
//! piecewise model is what makes the closed-form SCP tractable.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Environment;

/// Exact LoS probability for a ground node at horizontal distance
/// `r_horiz_m` from a UAV at height `h_m`.
///
/// With `f = ⌊r·√(ρ1·ρ2·10⁻⁶) − 1⌋` this is
/// `Π_{l=0}^{f} [1 − exp(−(H − (l+½)H/(f+1))² / 2σ²)]`, and 1 when `f < 0`.
pub fn exact_los_probability(env: &Environment, h_m: f64, r_horiz_m: f64) -> f64 {
    if !r_horiz_m.is_finite() {
        return 0.0;
    }
    let f = (r_horiz_m * (env.rho1 * env.rho2 * 1e-6).sqrt() - 1.0).floor();
    if f < 0.0 {
        return 1.0;
    }
    let terms = f + 1.0;
    let step = h_m / terms;
    let two_sigma2 = 2.0 * env.sigma * env.sigma;
    // Walk from the lowest building-height term upwards; the factors climb
    // monotonically to exactly 1.0, after which nothing changes.
    let mut p = 1.0;
    let mut j = 0.0;
    while j < terms {
        let h = (j + 0.5) * step;
        let factor = 1.0 - (-h * h / two_sigma2).exp();
        if factor == 1.0 {
            break;
        }
        p *= factor;
        if p < 1e-300 {
            return 0.0;
        }
        j += 1.0;
    }
    p
}

/// Exact LoS probability expressed through the elevation angle, for a UAV at
/// height `h_m`.
pub fn exact_los_probability_angle(env: &Environment, h_m: f64, theta_rad: f64) -> f64 {
    if theta_rad <= 0.0 {
        return 0.0;
    }
    exact_los_probability(env, h_m, h_m / theta_rad.tan())
}

/// `1 / (1 + C·exp(−B(θ − C)))`, θ in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidLoS {
    pub b_coef: f64,
    pub c_coef: f64,
}

impl SigmoidLoS {
    pub fn probability(&self, theta_rad: f64) -> f64 {
        1.0 / (1.0 + self.c_coef * (-self.b_coef * (theta_rad - self.c_coef)).exp())
    }
}

pub fn sigmoid_los_probability(s: &SigmoidLoS, theta_rad: f64) -> f64 {
    s.probability(theta_rad)
}

/// Forces every link into one state regardless of distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkState {
    Los,
    Nlos,
}

/// Which root of `c1·t² + (c2 − c4)·t − c3 = 0` (with `t = tan θ`) marks the
/// junction of the two transitional branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InflectionRoot {
    #[default]
    Minus,
    Plus,
}

/// Horizontal distances at which the piecewise model changes branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    pub l1_m: f64,
    pub l2_m: f64,
    pub l3_m: f64,
}

/// Four-branch LoS model: 1 below ℓ1, `c3·r/H + c4` up to ℓ2,
/// `c1·H/r + c2` up to ℓ3, and 0 beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLoS {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    #[serde(default)]
    pub root: InflectionRoot,
    /// Overrides the coefficients; used for the pure-LoS analysis regime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced: Option<LinkState>,
}

impl PiecewiseLoS {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c1, c2, c3, c4, root: InflectionRoot::Minus, forced: None }
    }

    /// Published coefficients for the four preset environments.
    pub fn table(env: &Environment) -> Option<Self> {
        let c = match env.name.as_str() {
            "suburban" => (4.215, -0.2007, -0.1341, 1.331),
            "urban" => (1.581, -0.1991, -0.3618, 1.341),
            "dense_urban" => (1.201, -0.2051, -0.4864, 1.346),
            "highrise_urban" => (0.4717, -0.1972, -1.223, 1.351),
            _ => return None,
        };
        Some(Self::new(c.0, c.1, c.2, c.3))
    }

    pub fn always(state: LinkState) -> Self {
        Self { forced: Some(state), ..Self::new(0.0, 0.0, 0.0, 1.0) }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    /// `tan θ` at the junction of the transitional branches, or `None` when
    /// the branches never meet at a positive angle.
    pub fn inflection_tan(&self, root: InflectionRoot) -> Option<f64> {
        let b = self.c4 - self.c2;
        let disc = b * b + 4.0 * self.c1 * self.c3;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        // Written to avoid cancellation: t = (b ∓ s)/(2c1) = −2c3/(b ± s).
        let t = match root {
            InflectionRoot::Minus => {
                if b > 0.0 {
                    -2.0 * self.c3 / (b + s)
                } else {
                    (b - s) / (2.0 * self.c1)
                }
            }
            InflectionRoot::Plus => {
                if b < 0.0 {
                    -2.0 * self.c3 / (b - s)
                } else {
                    (b + s) / (2.0 * self.c1)
                }
            }
        };
        (t > 0.0 && t.is_finite()).then_some(t)
    }

    pub fn breakpoints(&self, h_m: f64) -> Breakpoints {
        match self.forced {
            Some(LinkState::Los) => {
                return Breakpoints { l1_m: f64::INFINITY, l2_m: f64::INFINITY, l3_m: f64::INFINITY }
            }
            Some(LinkState::Nlos) => return Breakpoints { l1_m: 0.0, l2_m: 0.0, l3_m: 0.0 },
            None => {}
        }
        let l1 = h_m * (1.0 - self.c4) / self.c3;
        let l3 = -h_m * self.c1 / self.c2;
        let l2 = match self.inflection_tan(self.root) {
            Some(t) => h_m / t,
            // No junction: split the transition halfway between the ends.
            None => 0.5 * (l1 + l3),
        };
        Breakpoints { l1_m: l1, l2_m: l2.clamp(l1.min(l3), l3.max(l1)), l3_m: l3 }
    }

    /// Probability at horizontal distance `r_horiz_m` for UAV height `h_m`.
    pub fn probability(&self, h_m: f64, r_horiz_m: f64) -> f64 {
        match self.forced {
            Some(LinkState::Los) => return 1.0,
            Some(LinkState::Nlos) => return 0.0,
            None => {}
        }
        let bp = self.breakpoints(h_m);
        self.branch_value(&bp, h_m, r_horiz_m)
    }

    pub(crate) fn branch_value(&self, bp: &Breakpoints, h_m: f64, r: f64) -> f64 {
        let p = if r < bp.l1_m {
            1.0
        } else if r < bp.l2_m {
            self.c3 * r / h_m + self.c4
        } else if r < bp.l3_m {
            self.c1 * h_m / r + self.c2
        } else {
            0.0
        };
        p.clamp(0.0, 1.0)
    }

    /// Same model in terms of elevation angle (height-free).
    pub fn probability_angle(&self, theta_rad: f64) -> f64 {
        if theta_rad <= 0.0 {
            return self.probability(1.0, f64::INFINITY);
        }
        self.probability(1.0, 1.0 / theta_rad.tan())
    }
}

pub fn piecewise_los_probability(p: &PiecewiseLoS, h_m: f64, r_horiz_m: f64) -> f64 {
    p.probability(h_m, r_horiz_m)
}

/// Root-mean-square difference of two equally long sample vectors.
pub fn rmse(model: &[f64], exact: &[f64]) -> Result<f64> {
    if model.len() != exact.len() {
        return Err(Error::LengthMismatch { left: model.len(), right: exact.len() });
    }
    if model.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ss: f64 = model.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / model.len() as f64).sqrt())
}

/// Knobs of the fitting procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub sample_count: usize,
    /// UAV height at which the exact product is sampled. The product only
    /// becomes a smooth function of elevation angle as the height grows.
    pub reference_height_m: f64,
    pub c_low: f64,
    pub c_mid: f64,
    pub c_high: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { sample_count: 10_000, reference_height_m: 1e5, c_low: 0.005, c_mid: 0.5, c_high: 0.995 }
    }
}

/// Evenly spaced elevation angles on `[0, π/2]` and the exact probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub theta: Vec<f64>,
    pub exact: Vec<f64>,
}

impl SampleGrid {
    pub fn new(env: &Environment, sample_count: usize, h_ref_m: f64) -> Self {
        let n = sample_count.max(2);
        let theta: Vec<f64> = (0..n).map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64).collect();
        let exact = theta.iter().map(|&t| exact_los_probability_angle(env, h_ref_m, t)).collect();
        Self { theta, exact }
    }

    pub fn evaluate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.theta.iter().map(|&t| f(t)).collect()
    }
}

/// Everything the fitting procedure produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFit {
    pub model: PiecewiseLoS,
    /// RMSE of the model on the sample grid for each junction root; `None`
    /// when that root is not a positive angle.
    pub rmse_minus_root: Option<f64>,
    pub rmse_plus_root: Option<f64>,
    pub rmse: f64,
    /// Sizes of the two transitional datasets.
    pub n_low: usize,
    pub n_high: usize,
}

/// Ordinary least squares for `y ≈ a·x + b`.
fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fits the piecewise model with the default options.
pub fn fit_piecewise(env: &Environment, sample_count: usize) -> Result<PiecewiseLoS> {
    let opts = FitOptions { sample_count, ..FitOptions::default() };
    let grid = SampleGrid::new(env, opts.sample_count, opts.reference_height_m);
    Ok(fit_piecewise_on(&grid, &opts)?.model)
}

/// Fits both transitional branches by least squares on the threshold-filtered
/// samples, then picks the junction root that best reproduces the samples.
pub fn fit_piecewise_on(grid: &SampleGrid, opts: &FitOptions) -> Result<PiecewiseFit> {
    let (mut x1, mut y1, mut x2, mut y2) = (vec![], vec![], vec![], vec![]);
    for (&t, &p) in grid.theta.iter().zip(&grid.exact) {
        if p > opts.c_low && p < opts.c_mid {
            x1.push(t.tan());
            y1.push(p);
        } else if p > opts.c_mid && p < opts.c_high {
            x2.push(1.0 / t.tan());
            y2.push(p);
        }
    }
    if x1.len() < 2 || x2.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "transitional datasets hold {} and {} samples; at least 2 each are needed",
            x1.len(),
            x2.len()
        )));
    }
    let (c1, c2) = line_fit(&x1, &y1).ok_or_else(|| Error::DegenerateFit("low branch is singular".into()))?;
    let (c3, c4) = line_fit(&x2, &y2).ok_or_else(|| Error::DegenerateFit("high branch is singular".into()))?;

    let score = |root: InflectionRoot| -> Option<f64> {
        let m = PiecewiseLoS { root, ..PiecewiseLoS::new(c1, c2, c3, c4) };
        m.inflection_tan(root)?;
        rmse(&grid.evaluate(|t| m.probability_angle(t)), &grid.exact).ok()
    };
    let rm = score(InflectionRoot::Minus);
    let rp = score(InflectionRoot::Plus);
    let (root, best) = match (rm, rp) {
        (Some(a), Some(b)) if b < a => (InflectionRoot::Plus, b),
        (Some(a), _) => (InflectionRoot::Minus, a),
        (None, Some(b)) => (InflectionRoot::Plus, b),
        (None, None) => return Err(Error::DegenerateFit("transitional branches never intersect".into())),
    };
    Ok(PiecewiseFit {
        model: PiecewiseLoS { root, ..PiecewiseLoS::new(c1, c2, c3, c4) },
        rmse_minus_root: rm,
        rmse_plus_root: rp,
        rmse: best,
        n_low: x1.len(),
        n_high: x2.len(),
    })
}

/// Least-squares sigmoid fit by damped Gauss–Newton started at `B = 10, C = 0.1`.
pub fn fit_sigmoid_on(grid: &SampleGrid) -> Result<SigmoidLoS> {
    let sse = |b: f64, c: f64| -> f64 {
        let s = SigmoidLoS { b_coef: b, c_coef: c };
        grid.theta.iter().zip(&grid.exact).map(|(&t, &p)| (s.probability(t) - p).powi(2)).sum()
    };
    let (mut b, mut c) = (10.0, 0.1);
    let mut cur = sse(b, c);
    for _ in 0..200 {
        // Normal equations J'J δ = −J'r for the two parameters.
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&t, &p) in grid.theta.iter().zip(&grid.exact) {
            let e = (-b * (t - c)).exp();
            let den = 1.0 + c * e;
            let f = 1.0 / den;
            let inv2 = f * f;
            // ∂f/∂B and ∂f/∂C.
            let db = c * e * (t - c) * inv2;
            let dc = -(e + c * e * b) * inv2;
            let r = f - p;
            a11 += db * db;
            a12 += db * dc;
            a22 += dc * dc;
            g1 += db * r;
            g2 += dc * r;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 0.0) {
            break;
        }
        let step_b = -(a22 * g1 - a12 * g2) / det;
        let step_c = -(a11 * g2 - a12 * g1) / det;
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-10 {
            let (nb, nc) = (b + lambda * step_b, c + lambda * step_c);
            if nb > 0.0 && nc > 0.0 {
                let trial = sse(nb, nc);
                if trial < cur {
                    b = nb;
                    c = nc;
                    improved = (cur - trial) > 1e-15 * cur.max(1e-300);
                    cur = trial;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !(b > 0.0 && b.is_finite() && c.is_finite()) {
        return Err(Error::DegenerateFit(format!("sigmoid fit diverged (B = {b}, C = {c})")));
    }
    Ok(SigmoidLoS { b_coef: b, c_coef: c })
}

pub fn fit_sigmoid(env: &Environment, sample_count: usize) -> Result<SigmoidLoS> {
    let opts = FitOptions { sample_count, ..FitOptions::default() };
    fit_sigmoid_on(&SampleGrid::new(env, opts.sample_count, opts.reference_height_m))
}

/// Fit of both models for one environment plus their errors against the
/// exact product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosFitReport {
    pub environment: String,
    pub piecewise: PiecewiseFit,
    pub sigmoid: SigmoidLoS,
    pub rmse_piecewise: f64,
    pub rmse_sigmoid: f64,
    /// ℓ1, ℓ2, ℓ3 divided by H.
    pub breakpoints_per_height: Breakpoints,
}

pub fn fit_report(env: &Environment, opts: &FitOptions) -> Result<LosFitReport> {
    let grid = SampleGrid::new(env, opts.sample_count, opts.reference_height_m);
    let piecewise = fit_piecewise_on(&grid, opts)?;
    let sigmoid = fit_sigmoid_on(&grid)?;
    let rmse_sigmoid = rmse(&grid.evaluate(|t| sigmoid.probability(t)), &grid.exact)?;
    Ok(LosFitReport {
        environment: env.name.clone(),
        rmse_piecewise: piecewise.rmse,
        breakpoints_per_height: piecewise.model.breakpoints(1.0),
        piecewise,
        sigmoid,
        rmse_sigmoid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_trivial_limits() {
        let env = Environment::suburban();
        assert_eq!(exact_los_probability(&env, 500.0, 0.0), 1.0);
        assert_eq!(exact_los_probability(&env, 1e-9, 1000.0), 0.0);
        let p = exact_los_probability(&env, 500.0, 500.0);
        assert!(p > 0.0 && p < 1.0, "{p}");
    }

    #[test]
    fn exact_matches_direct_product() {
        // Direct evaluation with all factors, in the printed index order.
        let env = Environment::urban();
        for &(h, r) in &[(500.0, 500.0), (100.0, 900.0), (2000.0, 3000.0)] {
            let f = (r * (env.rho1 * env.rho2 * 1e-6f64).sqrt() - 1.0).floor() as i64;
            let mut direct = 1.0;
            for l in 0..=f {
                let hh = h - (l as f64 + 0.5) * h / (f as f64 + 1.0);
                direct *= 1.0 - (-hh * hh / (2.0 * env.sigma * env.sigma)).exp();
            }
            let p = exact_los_probability(&env, h, r);
            assert!((p - direct).abs() < 1e-14, "{p} vs {direct}");
        }
    }

    #[test]
    fn exact_non_increasing_in_distance() {
        let env = Environment::dense_urban();
        let mut prev = 1.0;
        for i in 0..3000 {
            let p = exact_los_probability(&env, 300.0, i as f64);
            assert!(p <= prev + 1e-15);
            prev = p;
        }
    }

    #[test]
    fn sigmoid_trivia() {
        let s = SigmoidLoS { b_coef: 7.0, c_coef: 0.3 };
        assert!((s.probability(0.3) - 1.0 / 1.3).abs() < 1e-15);
        let sharp = SigmoidLoS { b_coef: 1e6, c_coef: 0.3 };
        assert!((sharp.probability(0.4) - 1.0).abs() < 1e-15);
        assert!(s.probability(0.5) > s.probability(0.4));
    }

    #[test]
    fn breakpoints_are_ordered() {
        for env in Environment::presets() {
            let p = PiecewiseLoS::table(&env).unwrap();
            let bp = p.breakpoints(500.0);
            assert!(0.0 < bp.l1_m && bp.l1_m <= bp.l2_m && bp.l2_m <= bp.l3_m, "{}: {bp:?}", env.name);
            // The junction is where the two middle branches agree.
            let a = p.c3 * bp.l2_m / 500.0 + p.c4;
            let b = p.c1 * 500.0 / bp.l2_m + p.c2;
            assert!((a - b).abs() <= 1e-9, "{} {a} {b}", env.name);
            assert_eq!(p.probability(500.0, 0.5 * bp.l1_m), 1.0);
            assert_eq!(p.probability(500.0, bp.l3_m), 0.0);
            assert!((p.probability(500.0, bp.l1_m) - 1.0).abs() < 0.01);
            assert!(p.probability(500.0, bp.l3_m * (1.0 - 1e-9)) < 0.01);
        }
    }

    #[test]
    fn piecewise_is_monotone() {
        let p = PiecewiseLoS::table(&Environment::highrise_urban()).unwrap();
        let mut prev = 1.0;
        for i in 0..5000 {
            let v = p.probability(200.0, i as f64 * 0.5);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn forced_states() {
        let los = PiecewiseLoS::always(LinkState::Los);
        assert_eq!(los.probability(100.0, 1e9), 1.0);
        let nlos = PiecewiseLoS::always(LinkState::Nlos);
        assert_eq!(nlos.probability(100.0, 0.0), 0.0);
    }

    #[test]
    fn refit_is_a_fixed_point() {
        // Branches chosen to meet exactly at the mid threshold, so each dataset
        // sees a single branch.
        let truth = PiecewiseLoS::new(2.0, -0.2, -0.28, 1.3);
        assert!((truth.inflection_tan(InflectionRoot::Minus).unwrap() - 0.35).abs() < 1e-12);
        let mut grid = SampleGrid::new(&Environment::urban(), 2000, 1.0);
        grid.exact = grid.evaluate(|t| truth.probability_angle(t));
        let fit = fit_piecewise_on(&grid, &FitOptions::default()).unwrap();
        for (a, b) in fit.model.coefficients().iter().zip(truth.coefficients()) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
        assert_eq!(fit.model.root, InflectionRoot::Minus);
    }

    #[test]
    fn rmse_basics() {
        assert_eq!(rmse(&[0.1, 0.2], &[0.1, 0.2]).unwrap(), 0.0);
        assert!((rmse(&[0.3, 0.5, 0.9], &[0.25, 0.45, 0.85]).unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(rmse(&[], &[]), Err(Error::EmptyInput));
        assert!(matches!(rmse(&[1.0], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn degenerate_environment_is_rejected() {
        let mut grid = SampleGrid::new(&Environment::suburban(), 1000, 1.0);
        grid.exact.iter_mut().for_each(|p| *p = 1.0);
        assert!(matches!(fit_piecewise_on(&grid, &FitOptions::default()), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn fit_quality_picks_the_minus_root_in_built_up_areas() {
        // Suburban is a near tie (RMSE 0.00583 plus vs 0.00592 minus) and
        // goes the other way.
        for env in [Environment::urban(), Environment::dense_urban(), Environment::highrise_urban()] {
            let opts = FitOptions::default();
            let fit =
                fit_piecewise_on(&SampleGrid::new(&env, opts.sample_count, opts.reference_height_m), &opts).unwrap();
            assert_eq!(fit.model.root, InflectionRoot::Minus, "{}", env.name);
        }
    }
}
