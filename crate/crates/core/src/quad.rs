//! Adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Globally adaptive: the interval with the largest error estimate is bisected
//! until the summed estimate meets `max(abs, rel·|I|)` or the subdivision cap
//! is reached. Error scaling follows QUADPACK `qk15`.

#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`gauss_kronrod`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_subdivisions: 10_000 }
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n.max(1);
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-9, 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

/// One 15-point rule on `[a, b]`. Returns `(integral, error estimate)`.
pub fn qk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> QuadResult {
    gauss_kronrod_points(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the supplied
/// breakpoints so that known kinks or discontinuities sit on panel edges.
/// Points must be sorted ascending; duplicates are dropped.
pub fn gauss_kronrod_points<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: &Tolerance) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let (v, e) = qk15(&mut f, a, b);
        value += v;
        error += e;
        heap.push(Segment { a, b, value: v, error: e });
    }
    let mut subdivisions = heap.len();
    if heap.is_empty() {
        return QuadResult { value: 0.0, error: 0.0, subdivisions: 0, converged: true };
    }

    loop {
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return QuadResult { value, error, subdivisions, converged: true };
        }
        if subdivisions >= tol.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        // Intervals at machine resolution cannot be refined further.
        if !(mid > worst.a && mid < worst.b) {
            heap.push(Segment { error: 0.0, ..worst });
            error -= worst.error;
            continue;
        }
        let (v1, e1) = qk15(&mut f, worst.a, mid);
        let (v2, e2) = qk15(&mut f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }

    // Re-sum to shed drift from the running updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    let target = tol.abs.max(tol.rel * f64::abs(value));
    QuadResult { value, error, subdivisions, converged: error <= target }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = gauss_kronrod(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, &Tolerance::default());
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn smooth_functions() {
        let tol = Tolerance::new(0.0, 1e-13);
        let r = gauss_kronrod(f64::exp, 0.0, 1.0, &tol);
        assert!((r.value - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        let r = gauss_kronrod(|x| x.sqrt(), 0.0, 1.0, &tol);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12, "{:?}", r);
    }

    #[test]
    fn step_function_with_breakpoint() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let r = gauss_kronrod_points(step, &[0.0, 0.3, 1.0], &Tolerance::default());
        assert!((r.value - 1.7).abs() < 1e-14);
        assert_eq!(r.subdivisions, 2);
        let r = gauss_kronrod(step, 0.0, 1.0, &Tolerance::new(1e-10, 0.0));
        assert!((r.value - 1.7).abs() < 1e-9);
    }

    #[test]
    fn cap_reports_nonconvergence() {
        let tol = Tolerance::new(0.0, 1e-15).with_max_subdivisions(3);
        let r = gauss_kronrod(|x: f64| x.ln().abs().sqrt(), 0.0, 1.0, &tol);
        assert!(!r.converged);
        assert!(r.subdivisions <= 3);
    }

    #[test]
    fn reversed_or_empty_range() {
        let r = gauss_kronrod(|x| x, 1.0, 1.0, &Tolerance::default());
        assert_eq!(r.value, 0.0);
    }
}
