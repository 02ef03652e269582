//! `coxbar` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a fit did not converge
//! (its result is still written).

mod grid;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coxbar::sim::report_csv;
use coxbar::{
    fit_bar, load_dataset, path_over, run_benchmark, save_dataset, simulate, sjs_coxbar, BarConfig,
    BenchOptions, DesignFormat, FitResult, LambdaRule, Method, MethodConfig, PathAxis, ScreenOptions,
    ScreenResult, SimScenario, StandardizeMode, SurvivalDataset,
};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(
    name = "coxbar",
    version,
    about = "Sparse Cox regression with the broken adaptive ridge penalty"
)]
struct Cli {
    /// Worker threads for replicate, grid and path fan-out.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit BAR (or screening followed by BAR) to a dataset and write a JSON report.
    Fit(FitArgs),
    /// Draw a dataset from a scenario file.
    Simulate(SimulateArgs),
    /// Run replicate benchmarks and write the report CSV.
    Bench(BenchArgs),
    /// Fit along a lambda or xi grid and write the path CSV.
    Path(PathArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Survival CSV (`id,time,status`).
    #[arg(long)]
    surv: PathBuf,
    /// Design file; `.csv` is read as dense CSV unless --format says otherwise.
    #[arg(long)]
    design: PathBuf,
    /// dense-csv or sparse-coord.
    #[arg(long)]
    format: Option<DesignFormat>,
    /// none, scale-only or center-and-scale.
    #[arg(long, default_value = "none")]
    standardize: StandardizeMode,
}

impl DataArgs {
    fn load(&self) -> coxbar::Result<SurvivalDataset> {
        let format = self
            .format
            .unwrap_or_else(|| DesignFormat::from_path(&self.design));
        load_dataset(&self.surv, &self.design, format)?.standardize(self.standardize)
    }
}

#[derive(Args, Debug, Clone)]
struct TuningArgs {
    /// Ridge penalty of the starting fit.
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Fixed lambda; implies --lambda-rule fixed.
    #[arg(long)]
    lambda: Option<f64>,
    /// bic, cbic, fixed or grid.
    #[arg(long, default_value = "bic")]
    lambda_rule: String,
    /// Grid for --lambda-rule grid: `a,b,c` or `lo:hi:logN`.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Exponent of the L_d penalty, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    d: f64,
    /// Cap on reweighted ridge iterations.
    #[arg(long, default_value_t = 200)]
    outer_max: usize,
}

impl TuningArgs {
    fn config(&self) -> Result<BarConfig, String> {
        let rule = match (self.lambda_rule.as_str(), self.lambda) {
            (_, Some(l)) if self.lambda_rule == "fixed" || self.lambda_rule == "bic" => LambdaRule::Fixed(l),
            ("fixed", None) => return Err("--lambda-rule fixed needs --lambda".into()),
            ("bic", None) => LambdaRule::Bic,
            ("cbic", None) => LambdaRule::Cbic,
            ("grid", None) => {
                let spec = self
                    .lambda_grid
                    .as_deref()
                    .ok_or("--lambda-rule grid needs --lambda-grid")?;
                LambdaRule::Grid(grid::parse(spec)?)
            }
            (rule, Some(_)) => return Err(format!("--lambda conflicts with --lambda-rule {rule}")),
            (rule, None) => return Err(format!("unknown lambda rule `{rule}`")),
        };
        Ok(BarConfig {
            xi: self.xi,
            lambda_rule: rule,
            d: self.d,
            outer_max: self.outer_max,
            ..BarConfig::default()
        })
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Screen to this many columns before fitting.
    #[arg(long)]
    screen_m: Option<usize>,
    /// Output JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Scenario file (`key=value` lines).
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    surv: PathBuf,
    #[arg(long)]
    design: PathBuf,
    /// Design format; sparse-coord when under half the entries are nonzero, else dense-csv.
    #[arg(long)]
    format: Option<DesignFormat>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated methods: bic-coxbar, cbic-coxbar, coxbar-bic, sjs-bic-coxbar, sjs-cbic-coxbar.
    #[arg(long, default_value = "bic-coxbar")]
    method: String,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Master seed; replicate seeds are derived from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long)]
    screen_m: Option<usize>,
    /// Grid for coxbar-bic: `a,b,c` or `lo:hi:logN`.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Write NA in the runtime column so the report is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PathArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    /// lambda or xi.
    #[arg(long)]
    axis: PathAxis,
    /// `a,b,c` or `lo:hi:logN`, ascending.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    NotConverged,
}

impl From<coxbar::CoxError> for Failure {
    fn from(e: coxbar::CoxError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Input(e)
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(e.to_string())),
    }
}

fn lambda_rule_json(rule: &LambdaRule) -> Value {
    match rule {
        LambdaRule::Fixed(l) => json!({ "rule": "fixed", "lambda": l }),
        LambdaRule::Bic => json!({ "rule": "bic" }),
        LambdaRule::Cbic => json!({ "rule": "cbic" }),
        LambdaRule::Grid(g) => json!({ "rule": "grid", "grid": g }),
    }
}

/// Fit report: 1-based sparse coefficient map on the input scale.
fn fit_json(
    ds: &SurvivalDataset,
    fit: &FitResult,
    config: &BarConfig,
    standardize: StandardizeMode,
    screen: Option<&ScreenResult>,
) -> Value {
    let beta = ds.to_original_scale(&fit.beta);
    let coefficients: Map<String, Value> = fit
        .support
        .iter()
        .map(|&j| ((j + 1).to_string(), json!(beta[j])))
        .collect();
    let ic = fit.criteria.expect("BAR fits carry information criteria");
    let mut report = json!({
        "version": coxbar::VERSION,
        "n": ds.n(),
        "p": ds.p(),
        "events": ds.event_count(),
        "coefficients": coefficients,
        "support": fit.support.iter().map(|j| j + 1).collect::<Vec<_>>(),
        "loglik": fit.loglik,
        "df": fit.df,
        "aic": ic.aic,
        "bic": ic.bic,
        "cbic": ic.cbic,
        "iterations": { "outer": fit.outer_iterations, "sweeps": fit.sweeps },
        "converged": fit.converged,
        "config": {
            "xi": config.xi,
            "lambda": lambda_rule_json(&config.lambda_rule),
            "d": config.d,
            "zero_threshold": config.zero_threshold,
            "outer_max": config.outer_max,
            "outer_tol": config.outer_tol,
            "standardize": standardize.to_string(),
        },
    });
    if let Some(s) = screen {
        report["screen"] = json!({
            "m": s.selected.len(),
            "selected": s.selected.iter().map(|j| j + 1).collect::<Vec<_>>(),
            "iterations": s.iterations,
            "converged": s.converged,
        });
    }
    report
}

fn cmd_fit(args: &FitArgs) -> Result<(), Failure> {
    let config = args.tuning.config()?;
    let ds = args.data.load()?;
    let (fit, screen) = match args.screen_m {
        Some(m) => {
            let opts = ScreenOptions {
                solver: config.solver.clone(),
                ..ScreenOptions::default()
            };
            let (fit, screen) = sjs_coxbar(&ds, m, &config, &opts)?;
            (fit, Some(screen))
        }
        None => (fit_bar(&ds, &config)?, None),
    };
    let report = fit_json(&ds, &fit, &config, args.data.standardize, screen.as_ref());
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Input(e.to_string()))? + "\n";
    write_output(args.out.as_deref(), &text)?;
    if fit.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn read_scenario(path: &Path) -> Result<SimScenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    SimScenario::from_config_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let mut scenario = read_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let ds = simulate(&scenario)?;
    let density = ds.nnz() as f64 / (ds.n() as f64 * ds.p() as f64);
    let format = args.format.unwrap_or(if density < 0.5 {
        DesignFormat::SparseCoord
    } else {
        DesignFormat::DenseCsv
    });
    save_dataset(&ds, &args.surv, &args.design, format)?;
    println!("realized censoring rate: {:.4}", ds.censoring_rate());
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.reps == 0 {
        return Err(Failure::Input("--reps must be at least 1".into()));
    }
    let scenario = read_scenario(&args.scenario)?;
    let grid = args.lambda_grid.as_deref().map(grid::parse).transpose()?;
    let methods: Vec<Method> = args
        .method
        .split(',')
        .map(|m| m.trim().parse::<Method>())
        .collect::<Result<_, _>>()?;
    let opts = BenchOptions {
        timing: !args.no_timing,
    };
    let mut rows = Vec::with_capacity(methods.len());
    for method in methods {
        let mut cfg = MethodConfig::new(method);
        cfg.bar.xi = args.xi;
        cfg.screen_m = args.screen_m;
        cfg.lambda_grid.clone_from(&grid);
        rows.push(run_benchmark(&scenario, &cfg, args.reps, args.seed, opts)?);
    }
    write_output(args.out.as_deref(), &report_csv(&rows))
}

fn cmd_path(args: &PathArgs) -> Result<(), Failure> {
    let config = args.tuning.config()?;
    let grid = grid::parse(&args.grid)?;
    let ds = args.data.load()?;
    let path = path_over(&ds, args.axis, &grid, &config)?;
    write_output(args.out.as_deref(), &path.to_csv(ds.p()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads as usize)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Path(a) => cmd_path(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged) => {
            eprintln!("warning: fit did not converge; result written");
            ExitCode::from(2)
        }
    }
}
