//! `jamsec`: fitting, evaluation, sweeps and validation from the command line.

mod output;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jamsec_core::los::{fit_report, FitOptions};
use jamsec_core::mc::ecdf;
use jamsec_core::mc::sample_gamma2;
use jamsec_core::{scp, simulate_scp, Environment, LosMode, NetworkConfig, NoiseMode, PiecewiseLoS};
use serde_json::{json, Value};

use output::{num, Format, Sink, Table};
use sweep::{Grid, McSettings, Outputs, SweepSpec, Variable};

#[derive(Parser, Debug)]
#[command(name = "jamsec", version, about = "Secure connection probability under UAV eavesdropping and jamming")]
struct Cli {
    /// Worker threads (0 lets rayon decide).
    #[arg(long, global = true, env = "JAMSEC_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the piecewise and sigmoid LoS models to the building-obstruction product.
    FitLos(FitLosArgs),
    /// Closed-form SCP at one configuration, optionally checked by simulation.
    Scp(ScpArgs),
    /// Evaluate the SCP over a one-parameter grid.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the SCP.
    Simulate(SimulateArgs),
    /// Run the closed-form vs oracle suite; exits nonzero on failure.
    Validate(ValidateArgs),
    /// Print the resolved configuration as JSON.
    Config(ConfigArgs),
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension, JSON otherwise.
    #[arg(long)]
    format: Option<Format>,
}

impl OutArgs {
    fn sink(&self) -> Sink {
        Sink::new(self.out.clone(), self.format)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LosModel {
    /// Published coefficients; falls back to a fresh fit for custom environments.
    Table,
    /// Coefficients fitted at run time.
    Fit,
    /// Every air-to-ground link LoS.
    Los,
    /// Every air-to-ground link NLoS.
    Nlos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum McLos {
    /// Draw link states from the building-obstruction product.
    Exact,
    /// Draw link states from the same piecewise model as the closed form.
    Piecewise,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// JSON configuration; defaults to the standard system parameters.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one field, e.g. `--set h_m=1000` or `--set env=urban`.
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = LosModel::Table)]
    los_model: LosModel,
    /// Set both noise powers to zero.
    #[arg(long)]
    interference_limited: bool,
}

#[derive(Args, Debug, Clone)]
struct McArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = McLos::Piecewise)]
    mc_los: McLos,
}

#[derive(Args, Debug)]
struct FitLosArgs {
    /// Environments to fit; all four presets when omitted.
    envs: Vec<String>,
    #[arg(long, default_value_t = FitOptions::default().sample_count)]
    samples: usize,
    /// UAV height at which the exact product is sampled.
    #[arg(long, default_value_t = FitOptions::default().reference_height_m)]
    reference_height_m: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct ScpArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Monte Carlo trials for a cross-check; 0 skips it.
    #[arg(long, default_value_t = 0)]
    mc_trials: u64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum)]
    variable: Variable,
    /// `a,b,c`, `lin:START:STOP:N` or `log:START:STOP:N`.
    #[arg(long)]
    grid: Grid,
    #[arg(long, value_enum, default_value_t = Outputs::Analytic)]
    outputs: Outputs,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    mc: McArgs,
    /// Also report the empirical single-eavesdropper CDF of 1 + SIR on this grid.
    #[arg(long)]
    cdf_grid: Option<Grid>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = LosModel::Table)]
    los_model: LosModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smaller sample sizes, for smoke tests.
    #[arg(long)]
    quick: bool,
    #[command(flatten)]
    out: OutArgs,
}

fn load_config(args: &ConfigArgs) -> Result<NetworkConfig> {
    let base = match &args.config {
        Some(p) => NetworkConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => NetworkConfig::default(),
    };
    if args.overrides.is_empty() {
        return Ok(base);
    }
    let mut v: Value = serde_json::from_str(&base.to_json_string())?;
    for o in &args.overrides {
        let (k, raw) = o.split_once('=').ok_or_else(|| anyhow!("override `{o}` is not FIELD=VALUE"))?;
        let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        v[k.trim()] = val;
    }
    Ok(NetworkConfig::from_json_str(&v.to_string())?)
}

fn los_model(cfg: &NetworkConfig, model: LosModel) -> Result<PiecewiseLoS> {
    Ok(match model {
        LosModel::Los => PiecewiseLoS::always(jamsec_core::LinkState::Los),
        LosModel::Nlos => PiecewiseLoS::always(jamsec_core::LinkState::Nlos),
        LosModel::Table => match PiecewiseLoS::table(&cfg.env) {
            Some(p) => p,
            None => jamsec_core::fit_piecewise(&cfg.env, FitOptions::default().sample_count)?,
        },
        LosModel::Fit => jamsec_core::fit_piecewise(&cfg.env, FitOptions::default().sample_count)?,
    })
}

fn noise_mode(model: &ModelArgs) -> NoiseMode {
    if model.interference_limited {
        NoiseMode::InterferenceLimited
    } else {
        NoiseMode::WithNoise
    }
}

fn mc_mode(mc: &McArgs, los: &PiecewiseLoS) -> LosMode {
    match mc.mc_los {
        McLos::Exact => LosMode::Exact,
        McLos::Piecewise => LosMode::Piecewise(*los),
    }
}

fn config_json(cfg: &NetworkConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn cmd_fit_los(a: &FitLosArgs) -> Result<()> {
    let envs: Vec<Environment> = if a.envs.is_empty() {
        Environment::presets().to_vec()
    } else {
        a.envs
            .iter()
            .map(|n| Environment::by_name(n).ok_or_else(|| anyhow!("unknown environment `{n}`")))
            .collect::<Result<_>>()?
    };
    let opts = FitOptions { sample_count: a.samples, reference_height_m: a.reference_height_m, ..Default::default() };
    let mut table = Table::new(vec![
        "environment",
        "c1",
        "c2",
        "c3",
        "c4",
        "root",
        "l1_over_h",
        "l2_over_h",
        "l3_over_h",
        "rmse_piecewise",
        "rmse_sigmoid",
        "sigmoid_b",
        "sigmoid_c",
    ]);
    let mut reports = Vec::new();
    for env in &envs {
        let r = fit_report(env, &opts).with_context(|| format!("fitting {}", env.name))?;
        let m = &r.piecewise.model;
        let bp = &r.breakpoints_per_height;
        let root = serde_json::to_value(m.root)?;
        table.push(vec![
            Value::from(env.name.clone()),
            num(m.c1),
            num(m.c2),
            num(m.c3),
            num(m.c4),
            root,
            num(bp.l1_m),
            num(bp.l2_m),
            num(bp.l3_m),
            num(r.rmse_piecewise),
            num(r.rmse_sigmoid),
            num(r.sigmoid.b_coef),
            num(r.sigmoid.c_coef),
        ]);
        let mut v = serde_json::to_value(&r)?;
        v["published"] = serde_json::to_value(PiecewiseLoS::table(env))?;
        reports.push(v);
    }
    let json = json!({ "options": opts, "fits": reports });
    a.out.sink().emit(&json, &table)
}

fn mc_json(m: &jamsec_core::McEstimate) -> Value {
    serde_json::to_value(m).expect("estimate serializes")
}

fn cmd_scp(a: &ScpArgs) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    let noise = noise_mode(&a.model);
    if noise == NoiseMode::InterferenceLimited {
        cfg = cfg.interference_limited();
    }
    let los = los_model(&cfg, a.model.los_model)?;
    let r = scp(&cfg, &los)?;
    let mc = (a.mc_trials > 0).then(|| simulate_scp(&cfg, &mc_mode(&a.mc, &los), a.mc_trials, noise, a.mc.seed));
    let mut table = Table::new(vec![
        "analytic_scp",
        "lower_bound",
        "regime",
        "quadrature_error",
        "mc_scp",
        "mc_ci_low",
        "mc_ci_high",
        "mc_trials",
    ]);
    table.push(vec![
        num(r.scp),
        Value::from(r.lower_bound),
        serde_json::to_value(r.regime)?,
        num(r.quadrature_error_estimate),
        opt(mc.map(|m| m.estimate)),
        opt(mc.map(|m| m.ci_low)),
        opt(mc.map(|m| m.ci_high)),
        mc.map(|m| Value::from(m.trials)).unwrap_or(Value::Null),
    ]);
    let json = json!({
        "config": config_json(&cfg),
        "los_model": serde_json::to_value(los)?,
        "analytic": serde_json::to_value(r)?,
        "mc": mc.as_ref().map(mc_json),
        "seed": a.mc.seed,
    });
    a.out.sink().emit(&json, &table)
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let los = los_model(&cfg, a.model.los_model)?;
    let spec = SweepSpec::new(a.variable, a.grid.0.clone(), a.outputs)?;
    let settings = McSettings {
        trials: a.trials,
        seed: a.mc.seed,
        noise: noise_mode(&a.model),
        exact_los: a.mc.mc_los == McLos::Exact,
    };
    if spec.outputs != Outputs::Analytic && a.trials == 0 {
        bail!("--trials must be positive when simulating");
    }
    let rows = sweep::run(&spec, &cfg, &los, settings)?;
    let mut table = Table::new(vec![
        "index",
        "variable",
        "value",
        "jammer_x_m",
        "jammer_y_m",
        "analytic_scp",
        "lower_bound",
        "mc_scp",
        "mc_ci_low",
        "mc_ci_high",
        "mc_trials",
    ]);
    for row in &rows {
        let p = &row.point;
        table.push(vec![
            Value::from(p.index),
            serde_json::to_value(spec.variable)?,
            if p.xy.is_some() { Value::Null } else { num(p.value) },
            opt(p.xy.map(|xy| xy.0)),
            opt(p.xy.map(|xy| xy.1)),
            opt(row.analytic.map(|r| r.scp)),
            row.analytic.map(|r| Value::from(r.lower_bound)).unwrap_or(Value::Null),
            opt(row.mc.map(|m| m.estimate)),
            opt(row.mc.map(|m| m.ci_low)),
            opt(row.mc.map(|m| m.ci_high)),
            row.mc.map(|m| Value::from(m.trials)).unwrap_or(Value::Null),
        ]);
    }
    let json = json!({
        "config": config_json(&cfg),
        "sweep": serde_json::to_value(&spec)?,
        "seed": a.mc.seed,
        "interference_limited": a.model.interference_limited,
        "rows": table.to_json(),
    });
    a.out.sink().emit(&json, &table)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    if a.trials == 0 {
        bail!("--trials must be positive");
    }
    let los = los_model(&cfg, a.model.los_model)?;
    let mode = mc_mode(&a.mc, &los);
    let m = simulate_scp(&cfg, &mode, a.trials, noise_mode(&a.model), a.mc.seed);
    let mut json = json!({
        "config": config_json(&cfg),
        "seed": a.mc.seed,
        "mc_los": format!("{:?}", a.mc.mc_los).to_lowercase(),
        "interference_limited": a.model.interference_limited,
        "estimate": mc_json(&m),
    });
    let table = if let Some(grid) = &a.cdf_grid {
        let samples = sample_gamma2(&cfg, &mode, a.trials, a.mc.seed);
        let mut t = Table::new(vec!["y", "empirical_cdf"]);
        for &y in &grid.0 {
            t.push(vec![num(y), num(ecdf(&samples, y))]);
        }
        json["gamma2_cdf"] = t.to_json();
        t
    } else {
        let mut t = Table::new(vec!["mc_scp", "mc_ci_low", "mc_ci_high", "successes", "trials"]);
        t.push(vec![num(m.estimate), num(m.ci_low), num(m.ci_high), Value::from(m.successes), Value::from(m.trials)]);
        t
    };
    a.out.sink().emit(&json, &table)
}

fn cmd_validate(a: &ValidateArgs) -> Result<bool> {
    let cfg = load_config(&a.config)?;
    let los = los_model(&cfg, a.los_model)?;
    let budget = if a.quick {
        validate::Budget { random_geometries: 30, cdf_draws: 50_000, scp_trials: 20_000 }
    } else {
        validate::Budget { random_geometries: 300, cdf_draws: 1_000_000, scp_trials: 100_000 }
    };
    let checks = validate::run(&cfg, &los, budget, a.seed);
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(vec!["check", "passed", "value", "threshold", "detail"]);
    for c in &checks {
        table.push(vec![
            Value::from(c.name),
            Value::from(c.passed),
            num(c.value),
            num(c.threshold),
            Value::from(c.detail.clone()),
        ]);
        eprintln!("{}: {} ({:.3e} vs {:.3e})", c.name, if c.passed { "ok" } else { "FAILED" }, c.value, c.threshold);
    }
    let json = json!({ "config": config_json(&cfg), "seed": a.seed, "passed": passed, "checks": checks });
    a.out.sink().emit(&json, &table)?;
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    match &cli.command {
        Command::FitLos(a) => cmd_fit_los(a)?,
        Command::Scp(a) => cmd_scp(a)?,
        Command::Sweep(a) => cmd_sweep(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Validate(a) => return cmd_validate(a),
        Command::Config(a) => println!("{}", load_config(a)?.to_json_string()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
