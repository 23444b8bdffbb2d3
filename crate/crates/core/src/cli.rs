//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration
//! error, 3 candidate budget exceeded (partial output is kept, ending with
//! a `truncated` marker row). Candidate sets too large for the quadratic
//! greedy pass count as over budget.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dimension::{
    build_growth_table, classify_jump, dimension_estimate, pressure_curve, s_pressure, BuildOptions, GrowthTable,
    JumpLabel, JumpThresholds, DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::partition::{Estimator, GrowthSample, Scale, BRUTE_FORCE_LIMIT};
use crate::potentials::{AlmostAdditiveSeq, PointFn, PositiveMatrix};
use crate::systems::{SystemModel, DEFAULT_CANDIDATE_BUDGET};
use crate::theorems::{oracle_sandwich, run_suite, SUITES};

pub const CSV_HEADER: [&str; 9] = [
    "system",
    "potential",
    "estimator",
    "n",
    "scale",
    "s",
    "log_value",
    "pressure_estimate",
    "exact",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    FullShift { k: u8 },
    Sft { matrix: Vec<Vec<u8>> },
    Doubling,
    Rotation { theta: f64 },
    Contraction { c: f64, fixed: f64 },
}

impl SystemSpec {
    pub fn build(&self) -> Result<SystemModel> {
        match self {
            SystemSpec::FullShift { k } => SystemModel::full_shift(*k),
            SystemSpec::Sft { matrix } => SystemModel::sft(matrix.clone()),
            SystemSpec::Doubling => Ok(SystemModel::Doubling),
            SystemSpec::Rotation { theta } => SystemModel::rotation(*theta),
            SystemSpec::Contraction { c, fixed } => SystemModel::contraction(*c, *fixed),
        }
    }
}

/// Built-in pointwise functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    X,
    Cos2pi,
    Indicator { a: f64, b: f64 },
    SymbolWeights { reach: usize, table: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Drift {
        a: f64,
    },
    Birkhoff {
        f: FunctionSpec,
    },
    /// Row-major matrices, one per symbol.
    Cocycle {
        matrices: Vec<Vec<Vec<f64>>>,
    },
    Sum {
        terms: Vec<PotentialSpec>,
    },
    Scaled {
        lambda: f64,
        inner: Box<PotentialSpec>,
    },
}

impl PotentialSpec {
    pub fn build(&self, sys: &SystemModel) -> Result<AlmostAdditiveSeq> {
        match self {
            PotentialSpec::Zero => Ok(AlmostAdditiveSeq::zero(sys)),
            PotentialSpec::Drift { a } => Ok(AlmostAdditiveSeq::drift(sys, *a)),
            PotentialSpec::Birkhoff { f } => {
                let f = match f {
                    FunctionSpec::X => PointFn::Identity,
                    FunctionSpec::Cos2pi => PointFn::Cos2Pi,
                    FunctionSpec::Indicator { a, b } => PointFn::Indicator { a: *a, b: *b },
                    FunctionSpec::SymbolWeights { reach, table } => {
                        let k = sys
                            .alphabet_size()
                            .ok_or_else(|| Error::InvalidArgument("symbol weights need a shift".into()))?;
                        PointFn::symbol_weights(k, *reach, table.clone())?
                    }
                };
                AlmostAdditiveSeq::birkhoff(sys, f)
            }
            PotentialSpec::Cocycle { matrices } => {
                let mats = matrices
                    .iter()
                    .map(|m| PositiveMatrix::new(m.clone()))
                    .collect::<Result<Vec<_>>>()?;
                AlmostAdditiveSeq::cocycle(sys, mats)
            }
            PotentialSpec::Sum { terms } => {
                let (first, rest) = terms
                    .split_first()
                    .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
                rest.iter()
                    .try_fold(first.build(sys)?, |acc, t| acc.add(&t.build(sys)?))
            }
            PotentialSpec::Scaled { lambda, inner } => Ok(inner.build(sys)?.scale(*lambda)),
        }
    }
}

/// One entry of the scale ladder: `{"eps": e}`, `{"k": k}` or `{"cylinder": m}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSpec {
    Eps(f64),
    K(usize),
    Cylinder(usize),
}

impl From<ScaleSpec> for Scale {
    fn from(s: ScaleSpec) -> Scale {
        match s {
            ScaleSpec::Eps(e) => Scale::Eps(e),
            ScaleSpec::K(k) => Scale::Dyadic(k),
            ScaleSpec::Cylinder(m) => Scale::Cylinder(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NRange {
    pub min: usize,
    pub max: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

fn default_budget() -> usize {
    DEFAULT_CANDIDATE_BUDGET
}

fn default_s_grid() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub potential: PotentialSpec,
    pub estimators: Vec<u8>,
    pub n_range: NRange,
    pub scales: Vec<ScaleSpec>,
    #[serde(default = "default_s_grid")]
    pub s_grid: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: f64,
    /// Recorded in the summary; estimation itself draws no randomness.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub candidate_budget: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// A validated configuration.
pub struct Plan {
    pub phi: AlmostAdditiveSeq,
    pub ns: Vec<usize>,
    /// Compatible (estimator, scale) cells in configuration order.
    pub cells: Vec<(Estimator, Scale)>,
    pub s_grid: Vec<f64>,
    pub window: f64,
    pub opts: BuildOptions,
}

fn supports(sys: &SystemModel, e: Estimator, s: Scale) -> bool {
    match (sys.is_shift(), e, s) {
        (true, Estimator::Spanning | Estimator::Separated, Scale::Dyadic(_)) => true,
        (true, Estimator::LowerCover | Estimator::UpperCover, Scale::Cylinder(m)) => m >= 1,
        (false, Estimator::Spanning | Estimator::Separated, Scale::Eps(e)) => e > 0.0 && e < 1.0,
        _ => false,
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn plan(&self) -> Result<Plan> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        let NRange { min, max, step } = self.n_range;
        if min == 0 || max < min || step == 0 {
            return bad("n_range needs 1 <= min <= max and step >= 1");
        }
        if self.estimators.is_empty() {
            return bad("estimator set is empty");
        }
        if self.scales.is_empty() {
            return bad("scale ladder is empty");
        }
        if self.s_grid.is_empty() || self.s_grid.iter().any(|&s| !(s > 0.0)) {
            return bad("s grid must be nonempty and positive");
        }
        if self.candidate_budget == 0 {
            return bad("candidate budget must be positive");
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return bad("window must lie in (0, 1]");
        }
        let sys = self.system.build()?;
        let phi = self.potential.build(&sys)?;
        let mut cells = Vec::new();
        for &e in &self.estimators {
            let e = Estimator::try_from(e)?;
            let before = cells.len();
            for &s in &self.scales {
                if supports(&sys, e, s.into()) {
                    cells.push((e, s.into()));
                }
            }
            if cells.len() == before {
                return Err(Error::InvalidArgument(format!(
                    "estimator {e} has no supported scale on {}",
                    sys.label()
                )));
            }
        }
        Ok(Plan {
            phi,
            ns: (min..=max).step_by(step).collect(),
            cells,
            s_grid: self.s_grid.clone(),
            window: self.window,
            opts: BuildOptions {
                candidate_budget: self.candidate_budget,
            },
        })
    }
}

/// A growth table, possibly cut short by the candidate budget.
pub struct CellResult {
    pub estimator: Estimator,
    pub scale: Scale,
    pub samples: Vec<GrowthSample>,
    /// The first `n` whose candidate set exceeded the budget.
    pub truncated_at: Option<usize>,
    pub table: Option<GrowthTable>,
}

fn run_cell(plan: &Plan, estimator: Estimator, scale: Scale) -> Result<CellResult> {
    match build_growth_table(&plan.phi, estimator, scale, &plan.ns, plan.opts) {
        Ok(table) => Ok(CellResult {
            estimator,
            scale,
            samples: table.samples().to_vec(),
            truncated_at: None,
            table: Some(table),
        }),
        Err(Error::BudgetExceeded { .. } | Error::InstanceTooLarge { .. }) => {
            // recover the prefix that fits
            let mut samples = Vec::new();
            let mut truncated_at = None;
            for &n in &plan.ns {
                match build_growth_table(&plan.phi, estimator, scale, &[n], plan.opts) {
                    Ok(t) => samples.extend_from_slice(t.samples()),
                    Err(Error::BudgetExceeded { .. } | Error::InstanceTooLarge { .. }) => {
                        truncated_at = Some(n);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(CellResult {
                estimator,
                scale,
                samples,
                truncated_at,
                table: None,
            })
        }
        Err(e) => Err(e),
    }
}

fn csv_rows(plan: &Plan, cells: &[CellResult]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let system = plan.phi.time().label();
    let potential = plan.phi.label().to_string();
    for cell in cells {
        for x in &cell.samples {
            for &s in &plan.s_grid {
                w.write_record([
                    system.clone(),
                    potential.clone(),
                    cell.estimator.to_string(),
                    x.n.to_string(),
                    x.scale.to_string(),
                    s.to_string(),
                    x.log_value.to_string(),
                    (x.log_value / (x.n as f64).powf(s)).to_string(),
                    x.exact.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        if let Some(n) = cell.truncated_at {
            w.write_record([
                system.as_str(),
                potential.as_str(),
                &cell.estimator.to_string(),
                &n.to_string(),
                &cell.scale.to_string(),
                "",
                "",
                "",
                "truncated",
            ])
            .map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

fn summary(cfg: &RunConfig, plan: &Plan, cells: &[CellResult]) -> String {
    let mut out = format!(
        "system {}\npotential {} (C = {})\nn {}..={} step {}\nseed {}\n",
        plan.phi.time().label(),
        plan.phi.label(),
        plan.phi.constant(),
        cfg.n_range.min,
        cfg.n_range.max,
        cfg.n_range.step,
        cfg.seed
    );
    for cell in cells {
        out.push_str(&format!("\nestimator {} scale {}", cell.estimator, cell.scale));
        let table = match (&cell.table, cell.truncated_at) {
            (Some(t), _) => t,
            (None, at) => {
                out.push_str(&format!(
                    ": truncated at n = {} after {} samples\n",
                    at.map_or("?".into(), |n| n.to_string()),
                    cell.samples.len()
                ));
                continue;
            }
        };
        out.push_str(if table.is_exact() { " (exact)\n" } else { " (bounds)\n" });
        for &s in &plan.s_grid {
            match s_pressure(table, s, plan.window) {
                Ok(v) => out.push_str(&format!("  s = {s}: pressure_estimate = {v}\n")),
                Err(e) => out.push_str(&format!("  s = {s}: {e}\n")),
            }
        }
        match dimension_estimate(table, plan.window) {
            Ok(d) => out.push_str(&format!(
                "  dimension = {} ({}, window n = {}..={}, stderr {})\n",
                d.s0_hat, d.method, d.window.0, d.window.1, d.slope_stderr
            )),
            Err(e) => out.push_str(&format!("  dimension unavailable: {e}\n")),
        }
    }
    out
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } | Error::InstanceTooLarge { .. } => 3,
        _ => 2,
    }
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(name), bytes).map_err(io)
}

fn cmd_estimate(config: &Path, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let cfg = load(config)?;
    let plan = cfg.plan()?;
    let cells: Vec<CellResult> = plan
        .cells
        .iter()
        .map(|&(e, s)| run_cell(&plan, e, s))
        .collect::<Result<_>>()?;
    let csv = csv_rows(&plan, &cells)?;
    let text = summary(&cfg, &plan, &cells);
    match out_dir.or(cfg.out.as_deref()) {
        Some(dir) => {
            write_file(dir, "results.csv", &csv)?;
            write_file(dir, "summary.txt", text.as_bytes())?;
        }
        None => {
            let _ = out.write_all(&csv);
            let _ = writeln!(out);
        }
    }
    let _ = out.write_all(text.as_bytes());
    Ok(if cells.iter().any(|c| c.truncated_at.is_some()) {
        3
    } else {
        0
    })
}

fn cmd_verify(suite: &str, seed: u64, inject: f64, out: &mut dyn Write) -> Result<i32> {
    if suite != "all" && !SUITES.contains(&suite) {
        return Err(Error::InvalidArgument(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            SUITES.join(", ")
        )));
    }
    let reports = run_suite(suite, seed, inject)?;
    let mut ok = true;
    for r in &reports {
        ok &= r.passed();
        let _ = writeln!(
            out,
            "{} {} worst_violation={} tolerance={} digest={} # {}",
            r.check_id,
            r.status.as_str(),
            r.worst_violation,
            r.tolerance,
            r.config_digest,
            r.notes
        );
    }
    let _ = writeln!(
        out,
        "{} of {} checks passed",
        reports.iter().filter(|r| r.passed()).count(),
        reports.len()
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_sweep(
    config: &Path,
    s_min: f64,
    s_max: f64,
    steps: usize,
    out_dir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    if !(s_min > 0.0 && s_min < s_max) || steps < 2 {
        return Err(Error::InvalidArgument(
            "sweep needs 0 < s_min < s_max and steps >= 2".into(),
        ));
    }
    let cfg = load(config)?;
    let plan = cfg.plan()?;
    let grid: Vec<f64> = (0..steps)
        .map(|i| s_min + (s_max - s_min) * i as f64 / (steps - 1) as f64)
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record([
        "system",
        "potential",
        "estimator",
        "scale",
        "n_last",
        "s",
        "value",
        "trend",
        "label",
    ])
    .map_err(csv_err)?;
    let mut text = String::new();
    let mut code = 0;
    for &(e, scale) in &plan.cells {
        let cell = run_cell(&plan, e, scale)?;
        let Some(table) = cell.table else {
            text.push_str(&format!(
                "estimator {e} scale {scale}: truncated by the candidate budget\n"
            ));
            code = 3;
            continue;
        };
        let curve = pressure_curve(&table, &grid, plan.window)?;
        let jump = classify_jump(&curve, JumpThresholds::default())?;
        for i in 0..grid.len() {
            let label = match jump.labels[i] {
                JumpLabel::Diverging => "diverging",
                JumpLabel::Vanishing => "vanishing",
                JumpLabel::Indeterminate => "indeterminate",
            };
            w.write_record([
                table.meta().system.clone(),
                table.meta().potential.clone(),
                e.to_string(),
                scale.to_string(),
                curve.n_last.to_string(),
                grid[i].to_string(),
                curve.values[i].to_string(),
                curve.trends[i].to_string(),
                label.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let show = |v: Option<f64>| v.map_or("none".to_string(), |s| s.to_string());
        text.push_str(&format!(
            "estimator {e} scale {scale}: bracket ({}, {}){}\n",
            show(jump.s_lo),
            show(jump.s_hi),
            if jump.monotone { "" } else { " [labels not monotone]" }
        ));
    }
    let csv = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    match out_dir {
        Some(dir) => {
            write_file(dir, "sweep.csv", &csv)?;
            write_file(dir, "brackets.txt", text.as_bytes())?;
        }
        None => {
            let _ = out.write_all(&csv);
            let _ = writeln!(out);
        }
    }
    let _ = out.write_all(text.as_bytes());
    Ok(code)
}

fn cmd_oracle(max_points: usize, trials: usize, seed: u64, out: &mut dyn Write) -> Result<i32> {
    if max_points == 0 || max_points > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "max-points must lie in 1..={BRUTE_FORCE_LIMIT}"
        )));
    }
    let r = oracle_sandwich(max_points, trials, seed)?;
    let _ = writeln!(out, "trials {} max_points {} seed {seed}", r.trials, r.max_points);
    let _ = writeln!(out, "worst Q - P = {}", r.q_le_p);
    let _ = writeln!(out, "worst s - r = {}", r.s_le_r);
    let _ = writeln!(out, "worst r - s(eps/2) = {}", r.r_le_s_half);
    let _ = writeln!(out, "worst greedy P - exact = {}", r.greedy_p);
    let _ = writeln!(out, "worst exact Q - greedy = {}", r.greedy_q);
    let _ = writeln!(out, "mean gap P = {} mean gap Q = {}", r.mean_gap_p, r.mean_gap_q);
    let _ = writeln!(out, "greedy exact on {} of {} trials", r.greedy_exact, r.trials);
    let _ = writeln!(out, "{}", if r.passed() { "sandwich pass" } else { "sandwich FAIL" });
    Ok(if r.passed() { 0 } else { 1 })
}

#[derive(Parser, Debug)]
#[command(
    name = "pdim",
    version,
    about = "Topological pressure dimensions of almost additive potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Growth tables, s-pressures and dimension estimates for one config.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name (also accepted positionally).
        #[arg(long = "suite")]
        suite_flag: Option<String>,
        suite: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Offset added to every measured violation (fault injection).
        #[arg(long, default_value_t = 0.0, hide = true)]
        inject: f64,
    },
    /// Pressure curves and jump brackets over an s grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        s_min: f64,
        #[arg(long)]
        s_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive oracles against greedy bounds on random instances.
    Oracle {
        #[arg(long, default_value_t = 16)]
        max_points: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Estimate { config, out: dir } => cmd_estimate(&config, dir.as_deref(), out),
        Command::Verify {
            suite_flag,
            suite,
            seed,
            inject,
        } => {
            let name = suite_flag
                .or(suite)
                .ok_or_else(|| Error::InvalidArgument("no suite given".into()))?;
            cmd_verify(&name, seed, inject, out)
        }
        Command::Sweep {
            config,
            s_min,
            s_max,
            steps,
            out: dir,
        } => cmd_sweep(&config, s_min, s_max, steps, dir.as_deref(), out),
        Command::Oracle {
            max_points,
            trials,
            seed,
        } => cmd_oracle(max_points, trials, seed, out),
    }
}

/// Runs the CLI with `args` (program name first), writing reports to `out`
/// and diagnostics to stderr. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = std::env::var("PDIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let result = match threads.filter(|&t| t > 0) {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let r = pool.install(|| dispatch(cli, &mut buf));
                let _ = out.write_all(&buf);
                r
            }
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => dispatch(cli, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pdim: {e}");
            exit_code(&e)
        }
    }
}

/// [`run_with`] on stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_with(args, &mut lock)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DRIFT: &str = r#"{
        "system": {"type": "full_shift", "k": 2},
        "potential": {"type": "drift", "a": 0.5},
        "estimators": [2, 3],
        "n_range": {"min": 1, "max": 64},
        "scales": [{"k": 0}]
    }"#;

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig::parse(DRIFT).unwrap();
        let back = RunConfig::parse(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
        let plan = cfg.plan().unwrap();
        assert_eq!(plan.cells.len(), 2);
        assert_eq!(plan.ns.len(), 64);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = RunConfig::parse(DRIFT).unwrap();
        cfg.estimators.clear();
        assert!(cfg.plan().is_err());
        let mut cfg = RunConfig::parse(DRIFT).unwrap();
        cfg.estimators = vec![1];
        assert!(cfg.plan().is_err(), "no cylinder scale given");
        let mut cfg = RunConfig::parse(DRIFT).unwrap();
        cfg.n_range.min = 0;
        assert!(cfg.plan().is_err());
        assert!(RunConfig::parse(r#"{"system": {"type": "torus"}}"#).is_err());
    }

    #[test]
    fn nested_potentials_build() {
        let spec: PotentialSpec = serde_json::from_str(
            r#"{"type": "sum", "terms": [
                {"type": "birkhoff", "f": {"type": "cos2pi"}},
                {"type": "scaled", "lambda": 2, "inner": {"type": "birkhoff", "f": {"type": "indicator", "a": 0, "b": 0.5}}}
            ]}"#,
        )
        .unwrap();
        let phi = spec.build(&SystemModel::Doubling).unwrap();
        let v = phi.eval(1, &crate::systems::Point::real(0.25)).unwrap();
        assert!((v - (0.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut sink = Vec::new();
        assert_eq!(run_with(["pdim", "verify", "nosuch"], &mut sink), 2);
        assert_eq!(run_with(["pdim", "oracle", "--max-points", "21"], &mut sink), 2);
        assert_eq!(run_with(["pdim", "frobnicate"], &mut sink), 2);
    }
}
