//! `lossguard` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

pub mod config;
pub mod output;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    min_r_over_x, p_t_aggregate, resources, threshold_n, ReductionLevel, ResourceCount,
    TransponderParams,
};
use crate::chainsim::{
    compare_modes, predict, run_chain, run_loop, ChainConfig, ChainPrediction, ChainStats,
    LoopStats, ModeComparison, SimMode,
};
use crate::error::Error;
use crate::losscode::correction_tables;

use config::{ConfigFile, Overrides};
use output::{emit, fmt_f64, sibling, to_json, Csv};
use sweep::{Scale, SweepRange};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Lib(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lossguard",
    version,
    about = "Photon-loss code simulator and quantum transponder analysis"
)]
pub struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials (random input states for `verify`).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Transponder stages in a chain.
    #[arg(long, global = true)]
    pub stages: Option<u32>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat JSON file with parameter and run settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check codewords, correction tables and recovery of random inputs.
    Verify(VerifyArgs),
    /// Grid of the relative absorption coefficient r over (x, p_t).
    SweepR(SweepRArgs),
    /// Transponder success probability over ancilla count and detector efficiency.
    SweepPt(SweepPtArgs),
    /// Monte Carlo transponder chain against the analytic stage model.
    Chain(ChainArgs),
    /// Fiber-loop memory with an in-loop transponder.
    Loop(LoopArgs),
    /// Component counts per reduction level.
    Resources(ResourcesArgs),
    /// Smallest ancilla count at which a transponder helps.
    Threshold,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Report the correction for one lost data qubit (0-3); needs --outcome.
    #[arg(long, requires = "outcome")]
    pub qubit_loss: Option<usize>,
    /// Ancilla outcome bits, X ancilla first, e.g. 01.
    #[arg(long, requires = "qubit_loss")]
    pub outcome: Option<String>,
    /// Print the derived correction tables as JSON.
    #[arg(long, conflicts_with_all = ["qubit_loss", "outcome"])]
    pub list_tables: bool,
}

#[derive(Debug, Args)]
pub struct SweepRArgs {
    /// lo,hi,steps
    #[arg(long, default_value = sweep::DEFAULT_X_RANGE)]
    pub x_range: String,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub x_scale: Scale,
    /// lo,hi,steps
    #[arg(long, default_value = sweep::DEFAULT_PT_RANGE)]
    pub pt_range: String,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub pt_scale: Scale,
}

#[derive(Debug, Args)]
pub struct SweepPtArgs {
    /// lo,hi,steps, rounded to distinct integers.
    #[arg(long, default_value = sweep::DEFAULT_N_RANGE)]
    pub n_range: String,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub n_scale: Scale,
    /// Explicit ancilla counts; replaces --n-range.
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<u32>>,
    /// Detector efficiencies.
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,
    #[arg(long)]
    pub p_one: Option<f64>,
    #[arg(long)]
    pub p_spg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Fixed transponder success probability for the aggregate coin.
    #[arg(long)]
    pub p_t: Option<f64>,
    /// Also report the ancilla threshold.
    #[arg(long)]
    pub threshold: bool,
    /// Also run both gate-failure modes and compare them.
    #[arg(long)]
    pub compare_modes: bool,
}

#[derive(Debug, Args)]
pub struct LoopArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub p_t: Option<f64>,
    /// Censor trials that survive this many passes.
    #[arg(long)]
    pub max_cycles: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    /// Ancilla count per transponder gate.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// raw, i, ii or iii; all levels when omitted.
    #[arg(long)]
    pub level: Option<ReductionLevel>,
    /// All four levels (the default without --level).
    #[arg(long, conflicts_with = "level")]
    pub all: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    AggregatePt,
    PerGate,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AggregatePt => SimMode::AggregatePt,
            ModeArg::PerGate => SimMode::PerGate,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = Context {
        cli,
        file,
        stdout,
        stderr,
    };
    match &cli.command {
        Command::Verify(a) => cmd_verify(ctx, a),
        Command::SweepR(a) => cmd_sweep_r(ctx, a),
        Command::SweepPt(a) => cmd_sweep_pt(ctx, a),
        Command::Chain(a) => cmd_chain(ctx, a),
        Command::Loop(a) => cmd_loop(ctx, a),
        Command::Resources(a) => cmd_resources(ctx, a),
        Command::Threshold => cmd_threshold(ctx),
    }
}

struct Context<'a> {
    cli: &'a Cli,
    file: ConfigFile,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Context<'_> {
    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }

    fn emit(&mut self, text: &str) -> Result<(), CliError> {
        emit(self.cli.out.as_deref(), text, self.stdout)
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.stderr, "{line}");
    }

    fn overrides(
        &self,
        mode: Option<ModeArg>,
        p_t: Option<f64>,
        max_cycles: Option<u64>,
    ) -> Overrides {
        Overrides {
            seed: self.cli.seed,
            trials: self.cli.trials,
            stages: self.cli.stages,
            mode: mode.map(SimMode::from),
            p_t,
            max_cycles,
        }
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn cmd_verify(mut ctx: Context, args: &VerifyArgs) -> Result<(), CliError> {
    if args.list_tables {
        let records: Vec<_> = correction_tables()?
            .iter()
            .flat_map(|t| t.records())
            .collect();
        let text = to_json(&records)?;
        return ctx.emit(&text);
    }
    if let (Some(pos), Some(bits)) = (args.qubit_loss, &args.outcome) {
        let outcome = verify::parse_outcome(bits)
            .ok_or_else(|| CliError::Usage(format!("--outcome must be two bits, got {bits:?}")))?;
        let word = verify::lookup(pos, outcome).map_err(usage)?;
        let text = match ctx.format(Format::Csv) {
            Format::Csv => format!("loss position {pos}, outcome {bits}: correction {word}\n"),
            Format::Json => to_json(&serde_json::json!({
                "loss_position": pos,
                "outcome_bits": bits,
                "pauli_word": word,
            }))?,
        };
        return ctx.emit(&text);
    }

    let states = ctx
        .cli
        .trials
        .or(ctx.file.trials)
        .unwrap_or(verify::DEFAULT_STATES);
    let seed = ctx
        .cli
        .seed
        .or(ctx.file.seed)
        .unwrap_or(config::DEFAULT_SEED);
    let report = verify::run_suite(states, seed);
    let text = match ctx.format(Format::Csv) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::new();
            for p in &report.properties {
                let verdict = if p.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!(
                    "{verdict} {} ({} cases, worst deviation {:e})\n",
                    p.property, p.cases, p.worst_deviation
                ));
            }
            s
        }
    };
    ctx.emit(&text)?;
    match report.first_failure() {
        None => Ok(()),
        Some(cx) => {
            let json = serde_json::to_string(cx)
                .map_err(|e| CliError::Usage(format!("serializing counterexample: {e}")))?;
            ctx.note(&format!("counterexample: {json}"));
            Err(CliError::Verification(format!(
                "property {} failed",
                cx.property
            )))
        }
    }
}

fn parse_range(text: &str, scale: Scale, flag: &str) -> Result<SweepRange, CliError> {
    text.parse::<SweepRange>()
        .and_then(|r| r.with_scale(scale))
        .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

#[derive(Serialize)]
struct SweepRReport<'a> {
    x_range: SweepRange,
    p_t_range: SweepRange,
    contour_convex: bool,
    #[serde(flatten)]
    sweep: &'a sweep::RSweep,
}

const CONVEXITY_TOL: f64 = 1e-6;

fn cmd_sweep_r(mut ctx: Context, args: &SweepRArgs) -> Result<(), CliError> {
    let x = parse_range(&args.x_range, args.x_scale, "x-range")?;
    let pt = parse_range(&args.pt_range, args.pt_scale, "pt-range")?;
    let result = sweep::sweep_r(&x, &pt).map_err(usage)?;
    let convex = sweep::contour_is_convex(&result.contour, CONVEXITY_TOL);
    match result.contour_minimum {
        Some(m) => {
            let refined = result
                .contour_minimum_refined
                .map(|r| format!(" (refined: p_t = {:.6}, x = {:.6})", r.p_t, r.x))
                .unwrap_or_default();
            ctx.note(&format!(
                "r = 1 contour: {} points, minimum p_t = {:.6} at x = {:.6}{refined}, convex: {convex}",
                result.contour.len(),
                m.p_t,
                m.x
            ));
        }
        None => ctx.note("r = 1 contour: does not cross the grid"),
    }
    match ctx.format(Format::Csv) {
        Format::Json => {
            let text = to_json(&SweepRReport {
                x_range: x,
                p_t_range: pt,
                contour_convex: convex,
                sweep: &result,
            })?;
            ctx.emit(&text)
        }
        Format::Csv => {
            let mut csv = Csv::new(&["x", "p_t", "r"]);
            for row in &result.rows {
                csv.push(vec![fmt_f64(row.x), fmt_f64(row.p_t), fmt_f64(row.r)]);
            }
            ctx.emit(&csv.render())?;
            if let Some(out) = &ctx.cli.out {
                let mut contour = Csv::new(&["x", "p_t"]);
                for p in &result.contour {
                    contour.push(vec![fmt_f64(p.x), fmt_f64(p.p_t)]);
                }
                let path = sibling(out, "contour");
                emit(Some(&path), &contour.render(), ctx.stdout)?;
            }
            Ok(())
        }
    }
}

fn cmd_sweep_pt(mut ctx: Context, args: &SweepPtArgs) -> Result<(), CliError> {
    let ns = match &args.n_values {
        Some(ns) if ns.iter().all(|&n| n >= 1) => ns.clone(),
        Some(_) => return Err(CliError::Usage("--n-values must all be >= 1".into())),
        None => parse_range(&args.n_range, args.n_scale, "n-range")?.integer_points(),
    };
    let etas = args.eta.clone().unwrap_or_else(sweep::default_etas);
    let defaults = TransponderParams::default();
    let p_one = args.p_one.or(ctx.file.p_one).unwrap_or(defaults.p_one);
    let p_spg = args.p_spg.or(ctx.file.p_spg).unwrap_or(defaults.p_spg);
    let result = sweep::sweep_pt(&ns, &etas, p_one, p_spg).map_err(usage)?;
    for c in &result.curves {
        let above = c
            .first_n_above_reference
            .map_or_else(|| "never".to_string(), |n| format!("from n = {n}"));
        ctx.note(&format!(
            "eta = {}: max p_t = {:.6} at n = {}, above {} {above}",
            c.eta, c.max_p_t, c.n_at_max, result.reference_line
        ));
    }
    let text = match ctx.format(Format::Csv) {
        Format::Json => to_json(&result)?,
        Format::Csv => {
            let mut csv = Csv::new(&["n", "eta", "p_t_full"]);
            for row in &result.rows {
                csv.push(vec![
                    row.n.to_string(),
                    fmt_f64(row.eta),
                    fmt_f64(row.p_t_full),
                ]);
            }
            csv.render()
        }
    };
    ctx.emit(&text)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub params: TransponderParams<f64>,
    pub num_stages: u32,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    pub p_t: Option<f64>,
    pub max_cycles: u64,
    /// Logical input actually used, as `[re, im]` pairs.
    pub logical: Vec<[f64; 2]>,
}

impl ConfigEcho {
    fn new(c: &ChainConfig) -> Result<Self, CliError> {
        let logical = c.logical_state()?;
        Ok(Self {
            params: c.params,
            num_stages: c.num_stages,
            trials: c.trials,
            seed: c.seed,
            mode: c.mode,
            p_t: c.p_t,
            max_cycles: c.max_cycles,
            logical: logical.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub n: u32,
    pub ancilla_qubits: u32,
    pub p_t: f64,
    pub x_star: f64,
    pub r_star: f64,
    pub beats_bare_fiber: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub threshold: ThresholdRow,
    pub below: Option<ThresholdRow>,
}

fn threshold_row(n: u32) -> Result<ThresholdRow, CliError> {
    let p_t = p_t_aggregate::<f64>(n)?;
    let m = min_r_over_x(p_t)?;
    Ok(ThresholdRow {
        n,
        ancilla_qubits: 2 * n,
        p_t,
        x_star: m.x_star,
        r_star: m.r_star,
        beats_bare_fiber: m.r_star < 1.0,
    })
}

pub fn threshold_report() -> Result<ThresholdReport, CliError> {
    let n = threshold_n()?;
    Ok(ThresholdReport {
        threshold: threshold_row(n)?,
        below: if n > 1 {
            Some(threshold_row(n - 1)?)
        } else {
            None
        },
    })
}

fn threshold_line(t: &ThresholdRow) -> String {
    format!(
        "threshold n = {} ({} ancilla qubits)",
        t.n, t.ancilla_qubits
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub empirical: f64,
    pub std_err: f64,
    pub analytic: f64,
    pub z_score: f64,
    pub within_3_sigma: bool,
}

impl Comparison {
    fn new(e: crate::chainsim::Estimate, analytic: f64) -> Self {
        let z = e.z_score(analytic);
        Self {
            empirical: e.value,
            std_err: e.std_err,
            analytic,
            z_score: z,
            within_3_sigma: z.abs() <= 3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub config: ConfigEcho,
    pub per_stage_success: Comparison,
    pub end_to_end_success: Comparison,
    pub empirical: ChainStats,
    pub analytic: ChainPrediction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_comparison: Option<ModeComparison>,
}

fn cmd_chain(mut ctx: Context, args: &ChainArgs) -> Result<(), CliError> {
    let config = config::chain_config(&ctx.file, ctx.overrides(args.mode, args.p_t, None))?;
    let stats = run_chain(&config)?;
    let analytic = predict(&config)?;
    let threshold = if args.threshold {
        let t = threshold_report()?;
        ctx.note(&threshold_line(&t.threshold));
        Some(t)
    } else {
        None
    };
    let mode_comparison = if args.compare_modes {
        let m = compare_modes(&config)?;
        ctx.note(&format!(
            "per-gate vs aggregate per-stage success: z = {:.3} ({})",
            m.z_score,
            if m.agree { "agree" } else { "DISAGREE" }
        ));
        Some(m)
    } else {
        None
    };
    let report = ChainReport {
        config: ConfigEcho::new(&config)?,
        per_stage_success: Comparison::new(
            stats.per_stage_success_rate,
            analytic.per_stage_success,
        ),
        end_to_end_success: Comparison::new(stats.end_to_end_success, analytic.end_to_end_success),
        empirical: stats,
        analytic,
        threshold,
        mode_comparison,
    };
    let text = match ctx.format(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["quantity", "empirical", "std_err", "analytic", "z_score"]);
            for (name, c) in [
                ("per_stage_success", &report.per_stage_success),
                ("end_to_end_success", &report.end_to_end_success),
            ] {
                csv.push(vec![
                    name.to_string(),
                    fmt_f64(c.empirical),
                    fmt_f64(c.std_err),
                    fmt_f64(c.analytic),
                    fmt_f64(c.z_score),
                ]);
            }
            csv.render()
        }
    };
    ctx.emit(&text)
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub config: ConfigEcho,
    #[serde(rename = "loop")]
    pub stats: LoopStats,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn cmd_loop(mut ctx: Context, args: &LoopArgs) -> Result<(), CliError> {
    let config = config::chain_config(
        &ctx.file,
        ctx.overrides(args.mode, args.p_t, args.max_cycles),
    )?;
    let stats = run_loop(&config)?;
    ctx.note(&format!(
        "mean passes {:.4} ± {:.4}, storage time {:e} s (nu = {} km/s assumed)",
        stats.mean_cycles, stats.mean_cycles_std_err, stats.implied_storage_time, stats.nu_assumed
    ));
    let text = match ctx.format(Format::Json) {
        Format::Json => to_json(&LoopReport {
            config: ConfigEcho::new(&config)?,
            stats,
        })?,
        Format::Csv => {
            let mut csv = Csv::new(&["quantity", "value"]);
            let rows = [
                ("trials", stats.trials.to_string()),
                ("mean_cycles", fmt_f64(stats.mean_cycles)),
                ("mean_cycles_std_err", fmt_f64(stats.mean_cycles_std_err)),
                ("censored_fraction", fmt_f64(stats.censored_fraction)),
                ("max_cycles", stats.max_cycles.to_string()),
                ("stage_success", fmt_f64(stats.stage_success)),
                ("expected_cycles", opt(stats.expected_cycles)),
                ("implied_storage_time", fmt_f64(stats.implied_storage_time)),
                ("bare_storage_time", opt(stats.bare_storage_time)),
                ("analytic_storage_time", opt(stats.analytic_storage_time)),
                ("nu_assumed", fmt_f64(stats.nu_assumed)),
            ];
            for (k, v) in rows {
                csv.push(vec![k.to_string(), v]);
            }
            csv.render()
        }
    };
    ctx.emit(&text)
}

fn cmd_resources(mut ctx: Context, args: &ResourcesArgs) -> Result<(), CliError> {
    let levels: Vec<ReductionLevel> = match args.level {
        Some(l) if !args.all => vec![l],
        _ => ReductionLevel::ALL.to_vec(),
    };
    let rows: Vec<ResourceCount> = levels
        .into_iter()
        .map(|l| resources(args.n, l))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let text = match ctx.format(Format::Csv) {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut csv = Csv::new(&["level", "spg", "qnd", "cnot", "cz", "one_qubit", "pd"]);
            for r in &rows {
                csv.push(vec![
                    r.reduction_level.label().to_string(),
                    r.spg.to_string(),
                    r.qnd.to_string(),
                    r.cnot.to_string(),
                    r.cz.to_string(),
                    r.one_qubit.to_string(),
                    r.pd.to_string(),
                ]);
            }
            csv.render()
        }
    };
    ctx.emit(&text)
}

fn cmd_threshold(mut ctx: Context) -> Result<(), CliError> {
    let report = threshold_report()?;
    let text = match ctx.cli.format {
        Some(Format::Json) => to_json(&report)?,
        Some(Format::Csv) => {
            let mut csv = Csv::new(&["n", "ancilla_qubits", "p_t", "x_star", "r_star"]);
            for t in report.below.iter().chain([&report.threshold]) {
                csv.push(vec![
                    t.n.to_string(),
                    t.ancilla_qubits.to_string(),
                    fmt_f64(t.p_t),
                    fmt_f64(t.x_star),
                    fmt_f64(t.r_star),
                ]);
            }
            csv.render()
        }
        None => {
            let t = &report.threshold;
            let mut s = format!(
                "{}\n  p_t = {:.10}, min r = {:.10} at x = {:.10}\n",
                threshold_line(t),
                t.p_t,
                t.r_star,
                t.x_star
            );
            if let Some(b) = &report.below {
                s.push_str(&format!(
                    "  n = {}: p_t = {:.10}, min r = {:.10} (no gain over bare fiber)\n",
                    b.n, b.p_t, b.r_star
                ));
            }
            s
        }
    };
    ctx.emit(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("lossguard").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn bad_flag_is_usage_error() {
        assert_eq!(call(&["resources", "--bogus"]).0, 2);
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn raw_resources_row() {
        let (code, out, _) = call(&["resources", "--level", "raw"]);
        assert_eq!(code, 0);
        assert_eq!(out, "level,spg,qnd,cnot,cz,one_qubit,pd\nraw,2,4,4,4,6,2\n");
    }

    #[test]
    fn lookup_reports_correction() {
        let (code, out, _) = call(&["verify", "--qubit-loss", "3", "--outcome", "01"]);
        assert_eq!(code, 0);
        assert!(out.contains("correction X"), "{out}");
        assert_eq!(call(&["verify", "--qubit-loss", "3"]).0, 2);
        assert_eq!(
            call(&["verify", "--qubit-loss", "7", "--outcome", "01"]).0,
            2
        );
    }
}
