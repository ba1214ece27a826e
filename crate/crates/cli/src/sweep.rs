//! Parameter sweeps.

use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use clap::ValueEnum;
use jamsec_core::{scp, simulate_scp, LosMode, McEstimate, NetworkConfig, NoiseMode, PiecewiseLoS, ScpResult};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Variable {
    Pj,
    PsOverPj,
    H,
    LTj,
    /// Jammer ground position over the square grid `values × values`.
    JammerXyGrid,
    R1,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outputs {
    Analytic,
    Mc,
    Both,
}

impl Outputs {
    fn analytic(self) -> bool {
        matches!(self, Outputs::Analytic | Outputs::Both)
    }

    fn mc(self) -> bool {
        matches!(self, Outputs::Mc | Outputs::Both)
    }
}

/// Grid values: `a,b,c`, `lin:START:STOP:N` or `log:START:STOP:N` (endpoints
/// are values, not exponents).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let ranged = |rest: &str, log: bool| -> Result<Vec<f64>, String> {
            let parts: Vec<&str> = rest.split(':').collect();
            let [a, b, n] = parts.as_slice() else {
                return Err(format!("expected START:STOP:N, got `{rest}`"));
            };
            let a: f64 = a.parse().map_err(|e| format!("bad start `{a}`: {e}"))?;
            let b: f64 = b.parse().map_err(|e| format!("bad stop `{b}`: {e}"))?;
            let n: usize = n.parse().map_err(|e| format!("bad count `{n}`: {e}"))?;
            if n == 0 {
                return Err("grid needs at least one point".into());
            }
            if log && !(a > 0.0 && b > 0.0) {
                return Err("log grid endpoints must be positive".into());
            }
            let (a, b) = if log { (a.log10(), b.log10()) } else { (a, b) };
            Ok((0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    let v = a + (b - a) * t;
                    if log {
                        10f64.powf(v)
                    } else {
                        v
                    }
                })
                .collect())
        };
        let values = if let Some(rest) = s.strip_prefix("lin:") {
            ranged(rest, false)?
        } else if let Some(rest) = s.strip_prefix("log:") {
            ranged(rest, true)?
        } else {
            s.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad grid value `{t}`: {e}")))
                .collect::<Result<_, _>>()?
        };
        Ok(Grid(values))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: Variable,
    pub grid: Vec<f64>,
    pub outputs: Outputs,
}

impl SweepSpec {
    pub fn new(variable: Variable, grid: Vec<f64>, outputs: Outputs) -> Result<Self> {
        if grid.is_empty() {
            bail!("sweep grid is empty");
        }
        if grid.iter().any(|v| !v.is_finite()) {
            bail!("sweep grid contains a non-finite value");
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            bail!("sweep grid must be strictly monotone");
        }
        if variable == Variable::N && grid.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            bail!("eavesdropper counts must be positive integers");
        }
        Ok(Self { variable, grid, outputs })
    }

    /// Grid points in output order, each with its configuration.
    pub fn points(&self, base: &NetworkConfig) -> Result<Vec<Point>> {
        let mut pts = Vec::new();
        if self.variable == Variable::JammerXyGrid {
            for &x in &self.grid {
                for &y in &self.grid {
                    let l = x.hypot(y);
                    let cfg = NetworkConfig { l_tj_m: l, phi_jp: y.atan2(x), ..base.clone() };
                    // Positions outside the disk are reported, not evaluated.
                    let inside = l <= base.r1_m;
                    pts.push(Point { index: pts.len(), value: f64::NAN, xy: Some((x, y)), cfg, inside });
                }
            }
            return Ok(pts);
        }
        for (index, &v) in self.grid.iter().enumerate() {
            let mut cfg = base.clone();
            match self.variable {
                Variable::Pj => cfg.pj_w = v,
                Variable::PsOverPj => cfg.pj_w = cfg.ps_w / v,
                Variable::H => cfg.h_m = v,
                Variable::LTj => cfg.l_tj_m = v,
                Variable::R1 => cfg.r1_m = v,
                Variable::N => cfg.n_eves = v as u32,
                Variable::JammerXyGrid => unreachable!(),
            }
            cfg.validate().map_err(|e| anyhow!("grid point {index} ({v}): {e}"))?;
            pts.push(Point { index, value: v, xy: None, cfg, inside: true });
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub value: f64,
    pub xy: Option<(f64, f64)>,
    pub cfg: NetworkConfig,
    pub inside: bool,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub point: Point,
    pub analytic: Option<ScpResult>,
    pub mc: Option<McEstimate>,
}

#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub noise: NoiseMode,
    pub exact_los: bool,
}

/// Evaluates every grid point in parallel. Rows come back in grid order; the
/// first failing point aborts the sweep with its index in the message.
pub fn run(spec: &SweepSpec, base: &NetworkConfig, los: &PiecewiseLoS, mc: McSettings) -> Result<Vec<Row>> {
    let points = spec.points(base)?;
    points
        .into_par_iter()
        .map(|point| {
            if !point.inside {
                return Ok(Row { point, analytic: None, mc: None });
            }
            let cfg = match mc.noise {
                NoiseMode::WithNoise => point.cfg.clone(),
                NoiseMode::InterferenceLimited => point.cfg.interference_limited(),
            };
            let analytic = if spec.outputs.analytic() {
                Some(scp(&cfg, los).map_err(|e| anyhow!("grid point {} ({}): {e}", point.index, describe(&point)))?)
            } else {
                None
            };
            let est = spec.outputs.mc().then(|| {
                let mode = if mc.exact_los { LosMode::Exact } else { LosMode::Piecewise(*los) };
                // Each point gets its own stream family so rows do not share draws.
                simulate_scp(&cfg, &mode, mc.trials, mc.noise, mc.seed.wrapping_add(point.index as u64))
            });
            Ok(Row { point, analytic, mc: est })
        })
        .collect()
}

fn describe(p: &Point) -> String {
    match p.xy {
        Some((x, y)) => format!("x={x}, y={y}"),
        None => format!("{}", p.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!("1,2,3".parse::<Grid>().unwrap().0, vec![1.0, 2.0, 3.0]);
        assert_eq!("lin:0:500:6".parse::<Grid>().unwrap().0, vec![0.0, 100.0, 200.0, 300.0, 400.0, 500.0]);
        let g = "log:1e-5:1:6".parse::<Grid>().unwrap().0;
        assert_eq!(g.len(), 6);
        assert!((g[0] - 1e-5).abs() < 1e-20 && (g[5] - 1.0).abs() < 1e-15);
        assert!((g[2] - 1e-3).abs() < 1e-15);
        assert!("log:0:1:3".parse::<Grid>().is_err());
        assert!("lin:0:1".parse::<Grid>().is_err());
        assert!("1,x".parse::<Grid>().is_err());
    }

    #[test]
    fn spec_rejects_bad_grids() {
        assert!(SweepSpec::new(Variable::Pj, vec![], Outputs::Analytic).is_err());
        assert!(SweepSpec::new(Variable::Pj, vec![1.0, 1.0], Outputs::Analytic).is_err());
        assert!(SweepSpec::new(Variable::Pj, vec![1.0, 3.0, 2.0], Outputs::Analytic).is_err());
        assert!(SweepSpec::new(Variable::N, vec![1.0, 2.5], Outputs::Analytic).is_err());
        assert!(SweepSpec::new(Variable::Pj, vec![3.0, 2.0], Outputs::Analytic).is_ok());
    }

    #[test]
    fn xy_grid_marks_outside_points() {
        let spec = SweepSpec::new(Variable::JammerXyGrid, vec![-400.0, 0.0, 400.0], Outputs::Analytic).unwrap();
        let pts = spec.points(&NetworkConfig::default()).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts.iter().filter(|p| !p.inside).count(), 4);
        assert!(pts[5].inside && (pts[5].cfg.phi_jp - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn ratio_sets_jamming_power() {
        let spec = SweepSpec::new(Variable::PsOverPj, vec![10.0], Outputs::Analytic).unwrap();
        let pts = spec.points(&NetworkConfig::default()).unwrap();
        assert!((pts[0].cfg.pj_w - 0.01).abs() < 1e-15);
    }
}
