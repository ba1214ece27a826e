//! Monte Carlo oracle for the SCP and the eavesdropper SIR law.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream `c` of the user seed, so results are bit-identical for any thread
//! count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::los::{exact_los_probability, PiecewiseLoS};
use crate::scene::{distance_jd, NetworkConfig};

const CHUNK: u64 = 1024;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// LoS model used to draw link states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosMode {
    /// The building-obstruction product.
    Exact,
    Piecewise(PiecewiseLoS),
}

impl LosMode {
    fn probability(&self, cfg: &NetworkConfig, r_horiz: f64) -> f64 {
        match self {
            LosMode::Exact => exact_los_probability(&cfg.env, cfg.h_m, r_horiz),
            LosMode::Piecewise(p) => p.probability(cfg.h_m, r_horiz),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    WithNoise,
    /// Both noise powers set to zero.
    InterferenceLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub gamma1: f64,
    pub gamma2_max: f64,
    pub secrecy_capacity: f64,
    pub secure: bool,
}

/// Fraction of successes with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub successes: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(successes, trials);
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self { estimate, ci_low: lo, ci_high: hi, trials, successes }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// `n` points uniform in the disk of radius `r1_m`, as `(radius, angle)`.
pub fn sample_ueds<R: Rng + ?Sized>(n: usize, r1_m: f64, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n).map(|_| sample_point(r1_m, rng)).collect()
}

fn sample_point<R: Rng + ?Sized>(r1_m: f64, rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    (r1_m * u.sqrt(), 2.0 * PI * v)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Per-scenario constants shared by every trial.
struct Scene {
    g: f64,
    ps: f64,
    pj: f64,
    n0: f64,
    ne: f64,
    eta_l: f64,
    eta_n: f64,
    h2: f64,
    jx: f64,
    jy: f64,
    /// Mean received power at d before fading.
    sd_mean: f64,
    ljd2: f64,
    p_los_jd: f64,
    rt: f64,
    n_eves: usize,
}

impl Scene {
    fn new(cfg: &NetworkConfig, los: &LosMode, noise: NoiseMode) -> Self {
        let g = cfg.friis_gain();
        let (n0, ne) = match noise {
            NoiseMode::WithNoise => (cfg.n0_w, cfg.ne_w),
            NoiseMode::InterferenceLimited => (0.0, 0.0),
        };
        let (jx, jy) = cfg.jammer_xy();
        let ljd = distance_jd(cfg);
        Self {
            g,
            ps: cfg.ps_eff(),
            pj: cfg.pj_eff(),
            n0,
            ne,
            eta_l: cfg.env.eta_los(),
            eta_n: cfg.env.eta_nlos(),
            h2: cfg.h_m * cfg.h_m,
            jx,
            jy,
            sd_mean: cfg.ps_eff() * g * cfg.l_sd_m.powf(-cfg.beta),
            ljd2: ljd * ljd,
            p_los_jd: los.probability(cfg, cfg.ground_distance_jd()),
            rt: cfg.rt_bps_hz,
            n_eves: cfg.n_eves as usize,
        }
    }

    /// `1 + P_se/(P_je + Ne)` for an eavesdropper at polar `(l, φ)`.
    fn gamma2<R: Rng + ?Sized>(
        &self,
        cfg: &NetworkConfig,
        los: &LosMode,
        l: f64,
        phi: f64,
        ne: f64,
        rng: &mut R,
    ) -> f64 {
        let eta = if rng.random::<f64>() < los.probability(cfg, l) { self.eta_l } else { self.eta_n };
        let p_se = eta * self.ps * self.g / (self.h2 + l * l);
        let (ex, ey) = (l * phi.cos(), l * phi.sin());
        let dje2 = (ex - self.jx).powi(2) + (ey - self.jy).powi(2);
        let p_je = if dje2 > 0.0 { self.pj * self.g / dje2 } else { f64::INFINITY };
        1.0 + p_se / (p_je + ne)
    }

    fn trial<R: Rng + ?Sized>(&self, cfg: &NetworkConfig, los: &LosMode, rng: &mut R) -> TrialOutcome {
        let fading: f64 = Exp1.sample(rng);
        let eta_jd = if rng.random::<f64>() < self.p_los_jd { self.eta_l } else { self.eta_n };
        let p_jd = eta_jd * self.pj * self.g / self.ljd2;
        let gamma1 = 1.0 + self.sd_mean * fading / (p_jd + self.n0);
        let mut gamma2_max: f64 = 1.0;
        for _ in 0..self.n_eves {
            let (l, phi) = sample_point(cfg.r1_m, rng);
            gamma2_max = gamma2_max.max(self.gamma2(cfg, los, l, phi, self.ne, rng));
        }
        let cs = (gamma1 / gamma2_max).log2();
        let secrecy_capacity = if cs.is_nan() { 0.0 } else { cs.max(0.0) };
        TrialOutcome { gamma1, gamma2_max, secrecy_capacity, secure: secrecy_capacity > self.rt }
    }
}

fn chunks(trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n_chunks = trials.div_ceil(CHUNK);
    (0..n_chunks).into_par_iter().map(move |c| (c, CHUNK.min(trials - c * CHUNK)))
}

/// Runs one trial with the given generator (exposed for inspection).
pub fn run_trial<R: Rng + ?Sized>(cfg: &NetworkConfig, los: &LosMode, noise: NoiseMode, rng: &mut R) -> TrialOutcome {
    Scene::new(cfg, los, noise).trial(cfg, los, rng)
}

/// Fraction of trials in which the secrecy capacity exceeds the target rate.
pub fn simulate_scp(cfg: &NetworkConfig, los: &LosMode, trials: u64, noise: NoiseMode, seed: u64) -> McEstimate {
    let scene = Scene::new(cfg, los, noise);
    let successes: u64 = chunks(trials)
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            (0..len).filter(|_| scene.trial(cfg, los, &mut rng).secure).count() as u64
        })
        .sum();
    McEstimate::from_counts(successes, trials)
}

/// `1 + SIR` of one uniformly placed eavesdropper, `trials` times, sorted.
pub fn sample_gamma2(cfg: &NetworkConfig, los: &LosMode, trials: u64, seed: u64) -> Vec<f64> {
    let scene = Scene::new(cfg, los, NoiseMode::InterferenceLimited);
    let mut out: Vec<f64> = chunks(trials)
        .flat_map_iter(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let scene = &scene;
            (0..len)
                .map(move |_| {
                    let (l, phi) = sample_point(cfg.r1_m, &mut rng);
                    scene.gamma2(cfg, los, l, phi, 0.0, &mut rng)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Empirical `P(Γ2 ≤ y)` at each grid point.
pub fn empirical_cdf_gamma2(cfg: &NetworkConfig, los: &LosMode, trials: u64, y_grid: &[f64], seed: u64) -> Vec<f64> {
    let samples = sample_gamma2(cfg, los, trials, seed);
    y_grid.iter().map(|&y| ecdf(&samples, y)).collect()
}

/// Fraction of sorted samples `≤ y`.
pub fn ecdf(sorted: &[f64], y: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    sorted.partition_point(|&s| s <= y) as f64 / sorted.len() as f64
}

/// Upper bound on the Kolmogorov–Smirnov distance between the sorted
/// samples and a continuous non-decreasing CDF, evaluating the CDF only at
/// every `stride`-th order statistic. Between two probe points both
/// functions are monotone, so the gap cannot exceed the bracket mismatch.
pub fn ks_distance_bound<F: Fn(f64) -> f64 + Sync>(sorted: &[f64], cdf: F, stride: usize) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    let probes: Vec<(f64, f64)> = idx.par_iter().map(|&i| (sorted[i], cdf(sorted[i]))).collect();
    let nf = n as f64;
    let mut worst: f64 = 0.0;
    // Below the first probe: the empirical CDF is at most (first index)/n.
    let mut prev_y = f64::NEG_INFINITY;
    let mut prev_f = 0.0;
    let mut prev_emp = 0.0;
    for &(y, f) in &probes {
        let below = sorted.partition_point(|&s| s < y) as f64 / nf;
        let at = sorted.partition_point(|&s| s <= y) as f64 / nf;
        // On (prev_y, y): emp ∈ [prev_emp, below], model ∈ [prev_f, f].
        if prev_y < y {
            worst = worst.max((below - prev_f).abs()).max((f - prev_emp).abs());
        }
        worst = worst.max((at - f).abs()).max((below - f).abs());
        prev_y = y;
        prev_f = f;
        prev_emp = at;
    }
    worst.max((1.0 - prev_f).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_sampling_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = sample_ueds(1_000_000, 500.0, &mut rng);
        let mean = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        assert!((mean / (2.0 / 3.0 * 500.0) - 1.0).abs() < 0.002, "{mean}");
        let mut radii: Vec<f64> = pts.iter().map(|p| p.0).collect();
        radii.sort_by(f64::total_cmp);
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = (r / 500.0).powi(2);
                ((i + 1) as f64 / radii.len() as f64 - f).abs().max((i as f64 / radii.len() as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "{ks}");
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = sample_ueds(1, 100.0, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_ueds(1, 100.0, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn wilson_is_sane() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && hi - lo < 0.2);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
    }

    #[test]
    fn simulation_is_reproducible_across_pools() {
        let cfg = NetworkConfig { l_tj_m: 100.0, ..Default::default() };
        let los = LosMode::Piecewise(PiecewiseLoS::table(&cfg.env).unwrap());
        let a = simulate_scp(&cfg, &los, 5000, NoiseMode::WithNoise, 11);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_scp(&cfg, &los, 5000, NoiseMode::WithNoise, 11));
        assert_eq!(a, b);
    }

    #[test]
    fn ks_bound_is_small_for_matching_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut xs: Vec<f64> = (0..200_000).map(|_| rng.random::<f64>()).collect();
        xs.sort_by(f64::total_cmp);
        let d = ks_distance_bound(&xs, |x| x.clamp(0.0, 1.0), 100);
        assert!(d < 0.006, "{d}");
        let shifted = ks_distance_bound(&xs, |x| (x - 0.05).clamp(0.0, 1.0), 100);
        assert!(shifted > 0.045);
    }

    #[test]
    fn ecdf_edges() {
        let cfg = NetworkConfig { l_tj_m: 100.0, ..Default::default() };
        let los = LosMode::Piecewise(PiecewiseLoS::table(&cfg.env).unwrap());
        let v = empirical_cdf_gamma2(&cfg, &los, 20_000, &[1.0, 1e30], 5);
        assert_eq!(v, vec![0.0, 1.0]);
    }
}
