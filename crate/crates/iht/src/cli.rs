//! Command-line adapter over the library: loads instances and configs,
//! resolves defaults, calls the corresponding library entry point, and
//! renders results. Contains no numerics of its own.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical or
//! certificate failure, 4 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::engine::{
    run_iht, trajectory_csv_string, trajectory_json_string, write_trajectory_csv,
    write_trajectory_json, IHTConfig, Trajectory,
};
use crate::error::{IhtError, Result};
use crate::escape::{
    emit_plane_projections, run_escape_experiment, runs_csv_string, write_report_json,
    write_runs_csv, EscapeExperimentConfig, EscapeReport,
};
use crate::objective::{rss_constant, Objective, QuadraticInstance, RestrictedConstants};
use crate::stationary::{
    check_corollary4, check_fixed_point, classify, enumerate_stationary, stationary_json_string,
    stationary_table, write_stationary_json, Classification, StationaryPoint,
};
use crate::types::{DenseVector, SparsityBudget};

#[derive(Parser)]
#[command(
    name = "iht",
    version,
    about = "Sparsity-constrained minimization by iterative hard thresholding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print problem size and smoothness constants
    Constants(ConstantsArgs),
    /// Enumerate and classify all stationary points
    Stationary(StationaryArgs),
    /// Run the iteration and export the trajectory
    Run(RunArgs),
    /// Perturbation experiment around unstable stationary points
    Escape(EscapeArgs),
    /// Run the invariant suite against an instance
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Instance: "paper4x4", a JSON file, or "A.csv,y.csv"
    #[arg(long)]
    instance: Option<String>,
    /// Sparsity level
    #[arg(long)]
    s: Option<usize>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stdout rendering
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Directory for output files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow replacing existing output files
    #[arg(long)]
    overwrite: bool,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct StationaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stepsize, a number or "auto" (= 1/L_s)
    #[arg(long)]
    gamma: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stepsize, a number or "auto" (= 1/L_s)
    #[arg(long)]
    gamma: Option<String>,
    /// Start point: "zero", a comma list, or @file
    #[arg(long)]
    x0: Option<String>,
    /// Iteration cap
    #[arg(long)]
    max_iters: Option<usize>,
    /// Stop when the iterate moves by at most this much
    #[arg(long)]
    conv_tol: Option<f64>,
    /// Record every k-th iterate
    #[arg(long)]
    record_every: Option<usize>,
}

#[derive(Args)]
struct EscapeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stepsize, a number or "auto" (= 1/L_s)
    #[arg(long)]
    gamma: Option<String>,
    /// Perturbation standard deviation
    #[arg(long)]
    sigma: Option<f64>,
    /// Runs per unstable point
    #[arg(long)]
    runs: Option<usize>,
    /// Iteration steps per run
    #[arg(long)]
    steps: Option<usize>,
    /// Master seed for the run streams
    #[arg(long)]
    seed: Option<u64>,
    /// Attribution distance to stable points
    #[arg(long)]
    basin_tol: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stepsize, a number or "auto" (= 1/L_s)
    #[arg(long)]
    gamma: Option<String>,
}

/// Shared config-file schema. Every file must carry "version": 1; fields
/// irrelevant to a subcommand are ignored after validation.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    version: Option<u32>,
    instance: Option<String>,
    s: Option<usize>,
    gamma: Option<GammaSpec>,
    x0: Option<String>,
    max_iters: Option<usize>,
    conv_tol: Option<f64>,
    record_every: Option<usize>,
    sigma: Option<f64>,
    runs_per_point: Option<usize>,
    steps: Option<usize>,
    master_seed: Option<u64>,
    basin_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GammaSpec {
    Number(f64),
    Text(String),
}

#[derive(Clone, Copy)]
enum GammaChoice {
    Auto,
    Fixed(f64),
}

fn parse_gamma(raw: &str) -> Result<GammaChoice> {
    if raw == "auto" {
        return Ok(GammaChoice::Auto);
    }
    raw.parse::<f64>()
        .map(GammaChoice::Fixed)
        .map_err(|_| IhtError::Config(format!("gamma must be a number or \"auto\", got {raw:?}")))
}

impl GammaSpec {
    fn choice(&self) -> Result<GammaChoice> {
        match self {
            GammaSpec::Number(v) => Ok(GammaChoice::Fixed(*v)),
            GammaSpec::Text(t) => parse_gamma(t),
        }
    }
}

fn resolve_gamma(choice: GammaChoice, l_s: f64) -> Result<f64> {
    match choice {
        GammaChoice::Fixed(v) => Ok(v),
        GammaChoice::Auto => {
            if l_s > 0.0 {
                Ok(1.0 / l_s)
            } else {
                Err(IhtError::Config(
                    "gamma \"auto\" is undefined: the instance has L_s = 0".into(),
                ))
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let raw = std::fs::read_to_string(path).map_err(|e| IhtError::io(path, e))?;
    // A config file is command input, so parse failures are usage errors,
    // unlike instance files where they are I/O-class errors.
    let cfg: FileConfig = serde_json::from_str(&raw).map_err(|e| {
        IhtError::Config(format!("config {}: {e}", path.display()))
    })?;
    match cfg.version {
        Some(1) => Ok(cfg),
        Some(v) => Err(IhtError::Config(format!(
            "unsupported config version {v} in {}; expected 1",
            path.display()
        ))),
        None => Err(IhtError::Config(format!(
            "config {} is missing the required \"version\" field",
            path.display()
        ))),
    }
}

fn load_instance(spec: &str) -> Result<QuadraticInstance> {
    if spec == "paper4x4" {
        return Ok(QuadraticInstance::paper4x4());
    }
    if let Some((a, y)) = spec.split_once(',') {
        return QuadraticInstance::from_csv_files(Path::new(a.trim()), Path::new(y.trim()));
    }
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.exists() {
        return QuadraticInstance::from_json_file(path);
    }
    Err(IhtError::Config(format!(
        "unknown instance {spec:?}; expected \"paper4x4\", a .json file, or \"A.csv,y.csv\""
    )))
}

fn parse_x0(raw: &str, n: usize) -> Result<DenseVector> {
    if raw == "zero" {
        return Ok(DenseVector::zeros(n));
    }
    let text = if let Some(path) = raw.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| IhtError::io(Path::new(path), e))?
    } else {
        raw.to_string()
    };
    let mut vals = Vec::new();
    for tok in text.split([',', '\n']) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        vals.push(tok.parse::<f64>().map_err(|_| {
            IhtError::Config(format!("x0 entry {tok:?} is not a number"))
        })?);
    }
    if vals.len() != n {
        return Err(IhtError::DimensionMismatch { expected: n, got: vals.len() });
    }
    DenseVector::new(vals)
}

/// Merged common settings after defaults < config file < flags.
struct Resolved {
    instance: QuadraticInstance,
    budget: SparsityBudget,
    constants: RestrictedConstants,
    format: OutputFormat,
    out: Option<PathBuf>,
    overwrite: bool,
}

fn resolve_common(common: &CommonArgs, file: &FileConfig) -> Result<Resolved> {
    let spec = common
        .instance
        .clone()
        .or_else(|| file.instance.clone())
        .unwrap_or_else(|| "paper4x4".into());
    let instance = load_instance(&spec)?;
    let s = common.s.or(file.s).unwrap_or(2);
    let budget = SparsityBudget::new(s, instance.dim())?;
    let constants = rss_constant(&instance, budget)?;
    Ok(Resolved {
        instance,
        budget,
        constants,
        format: common.format.unwrap_or(OutputFormat::Table),
        out: common.out.clone(),
        overwrite: common.overwrite,
    })
}

fn gamma_of(flag: &Option<String>, file: &FileConfig, l_s: f64) -> Result<f64> {
    let choice = match flag {
        Some(raw) => parse_gamma(raw)?,
        None => match &file.gamma {
            Some(spec) => spec.choice()?,
            None => GammaChoice::Auto,
        },
    };
    resolve_gamma(choice, l_s)
}

/// Prepares the output directory and returns the checked path for one
/// output file. Refuses to replace existing files without --overwrite.
fn out_file(res: &Resolved, name: &str) -> Result<Option<PathBuf>> {
    let Some(dir) = &res.out else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).map_err(|e| IhtError::io(dir, e))?;
    let path = dir.join(name);
    if path.exists() && !res.overwrite {
        return Err(IhtError::WouldOverwrite(path));
    }
    Ok(Some(path))
}

#[derive(Serialize)]
struct ConstantsDoc {
    version: u32,
    m: usize,
    n: usize,
    s: usize,
    l_s: f64,
    inv_l_s: f64,
    s_effective: usize,
    l_s_restricted: Option<f64>,
    beta_s: Option<f64>,
}

fn constants_doc(res: &Resolved) -> ConstantsDoc {
    let c = &res.constants;
    ConstantsDoc {
        version: 1,
        m: res.instance.num_samples(),
        n: res.instance.dim(),
        s: res.budget.s(),
        l_s: c.l_s,
        inv_l_s: 1.0 / c.l_s,
        s_effective: c.s_effective,
        l_s_restricted: c.l_s_restricted,
        beta_s: c.beta_s,
    }
}

fn opt4(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

fn opt_raw(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn cmd_constants(args: &ConstantsArgs) -> Result<bool> {
    let file = load_config(args.common.config.as_deref())?;
    let res = resolve_common(&args.common, &file)?;
    let doc = constants_doc(&res);
    match res.format {
        OutputFormat::Table => {
            println!("m               {}", doc.m);
            println!("n               {}", doc.n);
            println!("s               {}", doc.s);
            println!("L_s             {:.4}", doc.l_s);
            println!("1/L_s           {:.4}", doc.inv_l_s);
            println!("s_effective     {}", doc.s_effective);
            println!("L_s (restricted) {}", opt4(doc.l_s_restricted));
            println!("beta_s          {}", opt4(doc.beta_s));
        }
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("serializes")),
        OutputFormat::Csv => {
            println!("key,value");
            println!("m,{}", doc.m);
            println!("n,{}", doc.n);
            println!("s,{}", doc.s);
            println!("l_s,{}", doc.l_s);
            println!("inv_l_s,{}", doc.inv_l_s);
            println!("s_effective,{}", doc.s_effective);
            println!("l_s_restricted,{}", opt_raw(doc.l_s_restricted));
            println!("beta_s,{}", opt_raw(doc.beta_s));
        }
    }
    if let Some(path) = out_file(&res, "constants.json")? {
        let raw = serde_json::to_string_pretty(&doc).expect("serializes");
        std::fs::write(&path, raw).map_err(|e| IhtError::io(&path, e))?;
    }
    Ok(true)
}

fn stationary_csv(points: &[StationaryPoint]) -> String {
    let n = points.first().map_or(0, |p| p.point.len());
    let mut out = String::from("no");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",g_{i}"));
    }
    out.push_str(",f_value,classification\n");
    for (no, p) in points.iter().enumerate() {
        out.push_str(&(no + 1).to_string());
        for v in p.point.iter() {
            out.push_str(&format!(",{v}"));
        }
        for v in p.grad.iter() {
            out.push_str(&format!(",{v}"));
        }
        let class = serde_json::to_value(p.classification).expect("serializes");
        out.push_str(&format!(",{},{}\n", p.f_value, class.as_str().expect("string")));
    }
    out
}

fn cmd_stationary(args: &StationaryArgs) -> Result<bool> {
    let file = load_config(args.common.config.as_deref())?;
    let res = resolve_common(&args.common, &file)?;
    let gamma = gamma_of(&args.gamma, &file, res.constants.l_s)?;
    let points = enumerate_stationary(&res.instance, res.budget, gamma)?;
    match res.format {
        OutputFormat::Table => print!("{}", stationary_table(&points)),
        OutputFormat::Json => {
            println!("{}", stationary_json_string(&points, gamma, res.budget))
        }
        OutputFormat::Csv => print!("{}", stationary_csv(&points)),
    }
    if let Some(path) = out_file(&res, "stationary.txt")? {
        std::fs::write(&path, stationary_table(&points)).map_err(|e| IhtError::io(&path, e))?;
    }
    if let Some(path) = out_file(&res, "stationary.json")? {
        write_stationary_json(&points, gamma, res.budget, &path)?;
    }
    Ok(true)
}

fn print_run_summary(traj: &Trajectory, obj: &QuadraticInstance) {
    let termination = serde_json::to_value(traj.termination).expect("serializes");
    println!("termination  {}", termination.as_str().expect("string"));
    println!("steps        {}", traj.steps_taken);
    println!("final_f      {:.4}", obj.value(&traj.final_point));
    let coords: Vec<String> = traj.final_point.iter().map(|v| format!("{v:.4}")).collect();
    println!("final_x      {}", coords.join(" "));
    let support: Vec<String> = traj
        .final_point
        .support()
        .one_based()
        .iter()
        .map(|i| i.to_string())
        .collect();
    println!("support      {}", support.join(";"));
    println!("tie_steps    {}", traj.tie_steps.len());
}

fn cmd_run(args: &RunArgs) -> Result<bool> {
    let file = load_config(args.common.config.as_deref())?;
    let res = resolve_common(&args.common, &file)?;
    let gamma = gamma_of(&args.gamma, &file, res.constants.l_s)?;
    let x0_raw = args
        .x0
        .clone()
        .or_else(|| file.x0.clone())
        .unwrap_or_else(|| "zero".into());
    let x0 = parse_x0(&x0_raw, res.instance.dim())?;
    let cfg = IHTConfig {
        gamma,
        max_iters: args.max_iters.or(file.max_iters).unwrap_or(10_000),
        conv_tol: args.conv_tol.or(file.conv_tol).unwrap_or(1e-10),
        record_every: args.record_every.or(file.record_every),
        enforce_gamma_bound: true,
    };
    let traj = run_iht(&res.instance, &x0, &cfg, res.budget, &res.constants)?;
    match res.format {
        OutputFormat::Table => print_run_summary(&traj, &res.instance),
        OutputFormat::Json => println!("{}", trajectory_json_string(&traj)),
        OutputFormat::Csv => print!("{}", trajectory_csv_string(&traj)),
    }
    if let Some(path) = out_file(&res, "trajectory.csv")? {
        write_trajectory_csv(&traj, &path)?;
    }
    if let Some(path) = out_file(&res, "trajectory.json")? {
        write_trajectory_json(&traj, &path)?;
    }
    Ok(true)
}

fn print_escape_summary(report: &EscapeReport) {
    println!("runs              {}", report.records.len());
    println!("fraction_escaped  {:.4}", report.fraction_escaped);
    println!("escape_radius     {:.4}", report.escape_radius);
    for row in &report.aggregates {
        let dest = row
            .dest_id
            .map_or_else(|| "unattributed".into(), |d| format!("point {d}"));
        println!("source {} -> {dest}: {}", row.source_id, row.count);
    }
}

fn cmd_escape(args: &EscapeArgs) -> Result<bool> {
    let file = load_config(args.common.config.as_deref())?;
    let res = resolve_common(&args.common, &file)?;
    let gamma = gamma_of(&args.gamma, &file, res.constants.l_s)?;
    let cfg = EscapeExperimentConfig {
        sigma: args.sigma.or(file.sigma).unwrap_or(0.5),
        runs_per_point: args.runs.or(file.runs_per_point).unwrap_or(1000),
        steps: args.steps.or(file.steps).unwrap_or(400),
        master_seed: args.seed.or(file.master_seed).unwrap_or(123),
        gamma,
        basin_tol: args.basin_tol.or(file.basin_tol).unwrap_or(1e-4),
    };
    let points = enumerate_stationary(&res.instance, res.budget, gamma)?;
    let report = run_escape_experiment(&res.instance, &points, &cfg, res.budget)?;
    match res.format {
        OutputFormat::Table => print_escape_summary(&report),
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"))
        }
        OutputFormat::Csv => print!("{}", runs_csv_string(&report)),
    }
    if let Some(path) = out_file(&res, "report.json")? {
        write_report_json(&report, &path)?;
    }
    if let Some(path) = out_file(&res, "runs.csv")? {
        write_runs_csv(&report, &path)?;
    }
    if let Some(dir) = &res.out {
        let n = res.instance.dim();
        for i in 0..n {
            for j in i + 1..n {
                let name = format!("plane_x{}_x{}.csv", i + 1, j + 1);
                out_file(&res, &name)?;
            }
        }
        emit_plane_projections(&report, &points, dir)?;
    }
    Ok(true)
}

struct CheckOutcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn central_difference(obj: &dyn Objective, x: &DenseVector, i: usize, h: f64) -> f64 {
    let mut up = x.as_slice().to_vec();
    let mut dn = up.clone();
    up[i] += h;
    dn[i] -= h;
    (obj.value(&DenseVector::new(up).expect("finite")) - obj.value(&DenseVector::new(dn).expect("finite")))
        / (2.0 * h)
}

fn run_checks(res: &Resolved, gamma: f64) -> Vec<CheckOutcome> {
    use rand::prelude::*;
    let mut outcomes = Vec::new();
    let inst = &res.instance;
    let c = &res.constants;

    let mut pass = c.l_s.is_finite() && c.l_s > 0.0;
    if let (Some(b), Some(lr)) = (c.beta_s, c.l_s_restricted) {
        pass = pass && b >= -1e-12 && b <= lr + 1e-12 && lr <= c.l_s + 1e-12;
    }
    outcomes.push(CheckOutcome {
        name: "constants_ordering",
        pass,
        detail: format!("L_s {:.6}, beta_s {}", c.l_s, opt4(c.beta_s)),
    });

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = DenseVector::new(
            (0..inst.dim()).map(|_| rng.random_range(-2.0..2.0)).collect(),
        )
        .expect("finite");
        let g = inst.gradient(&x);
        for i in 0..inst.dim() {
            let fd = central_difference(inst, &x, i, 1e-5);
            let rel = (g[i] - fd).abs() / g[i].abs().max(1.0);
            worst = worst.max(rel);
        }
    }
    outcomes.push(CheckOutcome {
        name: "gradient_consistency",
        pass: worst < 1e-6,
        detail: format!("worst relative deviation {worst:.2e}"),
    });

    match enumerate_stationary(inst, res.budget, gamma) {
        Err(IhtError::EnumerationTooLarge { count, .. }) => {
            outcomes.push(CheckOutcome {
                name: "stationary_enumeration",
                pass: true,
                detail: format!("skipped: {count} supports exceed the exhaustive bound"),
            });
        }
        Err(e) => {
            outcomes.push(CheckOutcome {
                name: "stationary_enumeration",
                pass: false,
                detail: format!("failed: {e}"),
            });
        }
        Ok(points) => {
            let consistent = points.iter().all(|p| {
                p.classification != Classification::NotStationary
                    && classify(inst, &p.point, gamma, res.budget)
                        .map(|again| again.classification == p.classification)
                        .unwrap_or(false)
            });
            outcomes.push(CheckOutcome {
                name: "stationary_enumeration",
                pass: consistent,
                detail: format!("{} points, classifications reproducible", points.len()),
            });

            let equiv = points.iter().all(|p| {
                let stable = matches!(
                    p.classification,
                    Classification::StrictlyStable | Classification::StableBoundary
                );
                check_fixed_point(inst, p, gamma, res.budget)
                    .map(|fixed| fixed == stable)
                    .unwrap_or(false)
            });
            outcomes.push(CheckOutcome {
                name: "fixed_point_equivalence",
                pass: equiv,
                detail: "stability matches projection-map membership".into(),
            });

            let ordering = check_corollary4(&points);
            outcomes.push(CheckOutcome {
                name: "descent_ordering",
                pass: ordering.holds,
                detail: format!(
                    "{} unstable points witnessed, {} counterexamples",
                    ordering.pairs.len(),
                    ordering.counterexamples.len()
                ),
            });
        }
    }

    let mut cfg = IHTConfig::new(gamma);
    cfg.max_iters = 500;
    match run_iht(inst, &DenseVector::zeros(inst.dim()), &cfg, res.budget, c) {
        Err(e) => outcomes.push(CheckOutcome {
            name: "certified_descent",
            pass: false,
            detail: format!("run failed: {e}"),
        }),
        Ok(traj) => {
            let monotone = traj.f_values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let slacks = traj.certificates.iter().all(|cert| {
                cert.eq5_slack >= -1e-10 && cert.eq6_slack >= -1e-10 && cert.eq7_slack >= -1e-10
            });
            let feasible = traj.iterates.iter().all(|(_, x)| x.l0_norm() <= res.budget.s());
            outcomes.push(CheckOutcome {
                name: "certified_descent",
                pass: monotone && slacks && feasible,
                detail: format!(
                    "{} steps from zero, monotone {monotone}, slacks nonnegative {slacks}",
                    traj.steps_taken
                ),
            });
        }
    }

    outcomes
}

fn cmd_check(args: &CheckArgs) -> Result<bool> {
    let file = load_config(args.common.config.as_deref())?;
    let res = resolve_common(&args.common, &file)?;
    let gamma = gamma_of(&args.gamma, &file, res.constants.l_s)?;
    let outcomes = run_checks(&res, gamma);
    let all_pass = outcomes.iter().all(|o| o.pass);
    match res.format {
        OutputFormat::Json => {
            let doc: Vec<serde_json::Value> = outcomes
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "name": o.name,
                        "pass": o.pass,
                        "detail": o.detail,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "version": 1,
                    "all_pass": all_pass,
                    "checks": doc,
                }))
                .expect("serializes")
            );
        }
        OutputFormat::Csv => {
            println!("name,pass,detail");
            for o in &outcomes {
                println!("{},{},{}", o.name, o.pass, o.detail.replace(',', ";"));
            }
        }
        OutputFormat::Table => {
            for o in &outcomes {
                let status = if o.pass { "PASS" } else { "FAIL" };
                println!("check {:<24} {status}  {}", o.name, o.detail);
            }
        }
    }
    Ok(all_pass)
}

/// Parses arguments and executes one subcommand, returning the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Constants(a) => cmd_constants(a),
        Command::Stationary(a) => cmd_stationary(a),
        Command::Run(a) => cmd_run(a),
        Command::Escape(a) => cmd_escape(a),
        Command::Check(a) => cmd_check(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 3,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
