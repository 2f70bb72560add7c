//! The `ccnorms` command line.
//!
//! Exit codes: 0 on success (including infinite norms), 1 on bad input,
//! 2 when the requested case is unsupported, 3 when a verification fails.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constants::{best_constant, Direction, TwoOpQuery};
use crate::error::{NormError, WeightError};
use crate::formulas::{canonical_kind, norm_general, NormResult, TruncConfig};
use crate::operators::OpTag;
use crate::oracle::{
    consistency_suite, identity_suite, oracle_suite, ConsistencyReport, IdentityReport, VerifyReport,
};
use crate::power::PowerFamily;
use crate::sequences::{Cone, ExtReal, Weight};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Exponents swept by the power-consistency suite.
pub const CONSISTENCY_ALPHAS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.3, 0.7, 0.99];

#[derive(Debug, Parser)]
#[command(name = "ccnorms", version, about = "Weighted l-infinity norms of the Cesaro and Copson operators")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Norm of one operator on one cone.
    Norm(NormArgs),
    /// Best constant comparing the Cesaro and Copson operators.
    TwoOp(TwoOpArgs),
    /// CSV sweep of a power-weight closed form over a range of exponents.
    PowerTable(TableArgs),
    /// Cross-check the formulas against independent computations.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OpName {
    Cesaro,
    Copson,
    CesaroMinusIdentity,
    CopsonMinusIdentity,
    CMinusSstar,
    CstarSd,
}

impl OpName {
    fn tag(self) -> OpTag {
        match self {
            OpName::Cesaro => OpTag::C,
            OpName::Copson => OpTag::Cstar,
            OpName::CesaroMinusIdentity => OpTag::CminusI,
            OpName::CopsonMinusIdentity => OpTag::CstarMinusI,
            OpName::CMinusSstar => OpTag::CminusSstar,
            OpName::CstarSd => OpTag::CstarSD,
        }
    }

    /// The power family with a closed form for this operator, if any.
    fn family(self) -> Option<PowerFamily> {
        match self {
            OpName::Cesaro => Some(PowerFamily::Cesaro),
            OpName::Copson => Some(PowerFamily::Copson),
            OpName::CesaroMinusIdentity => Some(PowerFamily::CesaroMinusIdentity),
            OpName::CopsonMinusIdentity => Some(PowerFamily::CopsonMinusIdentity),
            OpName::CMinusSstar | OpName::CstarSd => None,
        }
    }

    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConeArg {
    All,
    Nonneg,
    Nonincr,
    Nondecr,
}

impl From<ConeArg> for Cone {
    fn from(c: ConeArg) -> Cone {
        match c {
            ConeArg::All => Cone::All,
            ConeArg::Nonneg => Cone::Nonneg,
            ConeArg::Nonincr => Cone::Nonincr,
            ConeArg::Nondecr => Cone::Nondecr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    #[value(name = "c-le-cstar")]
    CLeCstar,
    #[value(name = "cstar-le-c")]
    CstarLeC,
}

impl DirectionArg {
    fn direction(self) -> Direction {
        match self {
            DirectionArg::CLeCstar => Direction::CLeCstar,
            DirectionArg::CstarLeC => Direction::CstarLeC,
        }
    }

    fn family(self) -> PowerFamily {
        match self {
            DirectionArg::CLeCstar => PowerFamily::CLeCstar,
            DirectionArg::CstarLeC => PowerFamily::CstarLeC,
        }
    }
}

/// `power:<alpha>`, `powerpair:<alpha>` or `list:<path>`.
///
/// For `--u`, `power:a` is `u_k = k^(-a)`; for `--v` it is `v_n = n^a`, so
/// equal exponents on both sides form the matched pair.
#[derive(Clone, Debug, PartialEq)]
enum WeightSpec {
    Power(f64),
    PowerPair(f64),
    List(PathBuf),
}

fn parse_weight_spec(s: &str) -> Result<WeightSpec, String> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| format!("expected kind:value, got {s:?}"))?;
    let exponent = || arg.trim().parse::<f64>().map_err(|_| format!("bad exponent {arg:?}"));
    match kind {
        "power" => Ok(WeightSpec::Power(exponent()?)),
        "powerpair" => Ok(WeightSpec::PowerPair(exponent()?)),
        "list" if !arg.is_empty() => Ok(WeightSpec::List(PathBuf::from(arg))),
        "list" => Err("list: needs a path".into()),
        other => Err(format!("unknown weight kind {other:?}; use power, powerpair or list")),
    }
}

#[derive(Debug, Args)]
struct WeightArgs {
    /// Domain weight u.
    #[arg(long, value_parser = parse_weight_spec)]
    u: WeightSpec,
    /// Codomain weight v; may be omitted when u is a power pair.
    #[arg(long, value_parser = parse_weight_spec)]
    v: Option<WeightSpec>,
}

#[derive(Debug, Args)]
struct TruncArgs {
    /// Rows scanned for infinite weights.
    #[arg(long, default_value_t = 1_000_000)]
    n_max: usize,
    /// Stopping tolerance of the truncated scan.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Row values above this are reported as divergent.
    #[arg(long, default_value_t = 1e15)]
    divergence_threshold: f64,
}

impl TruncArgs {
    fn config(&self) -> TruncConfig {
        TruncConfig { n_max: self.n_max, tol: self.tol, divergence_threshold: self.divergence_threshold }
    }
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    op: OpName,
    #[arg(long, value_enum)]
    cone: ConeArg,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Debug, Args)]
struct TwoOpArgs {
    #[arg(long = "dir", value_enum)]
    direction: DirectionArg,
    #[arg(long, value_enum)]
    cone: ConeArg,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long = "theorem", value_parser = parse_family)]
    family: PowerFamily,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    step: f64,
}

fn parse_family(s: &str) -> Result<PowerFamily, String> {
    PowerFamily::from_name(s).ok_or_else(|| {
        let names: Vec<_> = PowerFamily::ALL.iter().map(|t| t.name()).collect();
        format!("unknown family {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    PowerConsistency,
    Oracle,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random inputs per oracle case.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Truncation of infinite weights in the oracle.
    #[arg(long = "n", default_value_t = 1000)]
    n: usize,
    /// Random list-weight pairs per operator and cone.
    #[arg(long, default_value_t = 20)]
    lists: usize,
    /// Random windows for the identity suite.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[command(flatten)]
    trunc: TruncArgs,
}

/// What went wrong, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Unsupported(String),
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Self {
        match e {
            NormError::Unsupported(msg) => Failure::Unsupported(msg),
            NormError::Config(msg) => Failure::Input(msg),
        }
    }
}

impl From<WeightError> for Failure {
    fn from(e: WeightError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load_list(path: &PathBuf) -> Result<Weight, Failure> {
    let file = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Weight::from_csv(file).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// The two weights and, for a matched power pair, its exponent.
fn resolve_weights(args: &WeightArgs) -> Result<(Weight, Weight, Option<f64>), Failure> {
    let u_alpha = match args.u {
        WeightSpec::Power(a) | WeightSpec::PowerPair(a) => Some(a),
        WeightSpec::List(_) => None,
    };
    let v_spec = match (&args.u, &args.v) {
        (_, Some(v)) => v.clone(),
        (WeightSpec::PowerPair(a), None) => WeightSpec::Power(*a),
        (_, None) => return Err(Failure::Input("--v is required unless --u is a powerpair".into())),
    };
    let v_alpha = match v_spec {
        WeightSpec::Power(a) | WeightSpec::PowerPair(a) => Some(a),
        WeightSpec::List(_) => None,
    };
    let u = match &args.u {
        WeightSpec::List(p) => load_list(p)?,
        _ => Weight::power(u_alpha.expect("power spec"))?,
    };
    let v = match &v_spec {
        WeightSpec::List(p) => load_list(p)?,
        _ => Weight::power(-v_alpha.expect("power spec"))?,
    };
    let matched = match (u_alpha, v_alpha) {
        (Some(a), Some(b)) if a == b => Some(a),
        _ => None,
    };
    Ok((u, v, matched))
}

#[derive(Serialize)]
struct NormJson {
    op: String,
    cone: Cone,
    value: ExtReal,
    status: &'static str,
    n_used: usize,
    residual: ExtReal,
}

#[derive(Serialize)]
struct TwoOpJson {
    direction: &'static str,
    cone: Cone,
    value: ExtReal,
    status: &'static str,
    n_used: usize,
    residual: ExtReal,
}

fn closed(family: PowerFamily, alpha: f64, cone: Cone) -> Result<NormResult, Failure> {
    Ok(NormResult::closed_form(family.closed_form(alpha, cone)?.value.value()))
}

fn cmd_norm(args: &NormArgs) -> Result<String, Failure> {
    let cone = Cone::from(args.cone);
    let cfg = args.trunc.config();
    cfg.validate()?;
    let (u, v, matched) = resolve_weights(&args.weights)?;
    let op = canonical_kind(args.op.tag(), cone)?;
    let result = match (matched, args.op.family()) {
        (Some(alpha), Some(family)) if family.cones().contains(&cone) => closed(family, alpha, cone)?,
        _ => norm_general(op, &u, &v, cone, &cfg)?,
    };
    let json = NormJson {
        op: args.op.name(),
        cone,
        value: result.value,
        status: result.status.name(),
        n_used: result.n_used,
        residual: ExtReal::new(result.residual_estimate),
    };
    Ok(to_json(&json))
}

fn cmd_two_op(args: &TwoOpArgs) -> Result<String, Failure> {
    let cone = Cone::from(args.cone);
    let cfg = args.trunc.config();
    cfg.validate()?;
    let (u, v, matched) = resolve_weights(&args.weights)?;
    let direction = args.direction.direction();
    let result = match matched {
        Some(alpha) => closed(args.direction.family(), alpha, cone)?,
        None => best_constant(&TwoOpQuery { direction, cone, u, v, cfg })?,
    };
    let json = TwoOpJson {
        direction: args.direction.family().name(),
        cone,
        value: result.value,
        status: result.status.name(),
        n_used: result.n_used,
        residual: ExtReal::new(result.residual_estimate),
    };
    Ok(to_json(&json))
}

/// Rows allowed in one table.
const MAX_TABLE_ROWS: usize = 1_000_000;

/// `from + i step` for `i = 0, 1, ..` up to `to`, rounded to 12 decimals so
/// the printed grid is clean.
fn alpha_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(Failure::Input("range bounds and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Failure::Input(format!("step must be positive, got {step}")));
    }
    if from > to {
        return Err(Failure::Input(format!("empty range: from {from} > to {to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > MAX_TABLE_ROWS {
        return Err(Failure::Input(format!("range has {count} points, limit is {MAX_TABLE_ROWS}")));
    }
    Ok((0..count)
        .map(|i| {
            let a = ((from + i as f64 * step) * 1e12).round() / 1e12;
            if a == 0.0 {
                0.0
            } else {
                a
            }
        })
        .collect())
}

fn cmd_power_table(args: &TableArgs) -> Result<String, Failure> {
    let alphas = alpha_grid(args.from, args.to, args.step)?;
    let cones = args.family.cones();
    let mut out = String::new();
    if cones.len() < Cone::ALL.len() {
        let note = match args.family {
            PowerFamily::CopsonMinusIdentity => {
                "nonincr omitted (open problem); nondecr omitted (no power closed form, the general formula gives 0)"
            }
            _ => "only the all and nonneg cones apply to two-operator constants",
        };
        out.push_str(&format!("# note: {note}\n"));
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Input(e.to_string());
    wtr.write_record(["alpha", "cone", "value", "case_label"]).map_err(io)?;
    for &alpha in &alphas {
        for &cone in cones {
            let r = args.family.closed_form(alpha, cone)?;
            wtr.write_record([alpha.to_string(), cone.name().to_string(), r.value.to_string(), r.case_label])
                .map_err(io)?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}

/// One line of the verify output.
#[derive(Serialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
enum SuiteEntry {
    Identities(IdentityReport),
    PowerConsistency(ConsistencyReport),
    Oracle(VerifyReport),
}

impl SuiteEntry {
    fn pass(&self) -> bool {
        match self {
            SuiteEntry::Identities(r) => r.pass,
            SuiteEntry::PowerConsistency(r) => r.pass,
            SuiteEntry::Oracle(r) => r.pass,
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), Failure> {
    let cfg = args.trunc.config();
    cfg.validate()?;
    if args.trials == 0 {
        return Err(Failure::Input("--trials must be at least 1".into()));
    }
    let wants = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut entries = Vec::new();
    if wants(Suite::Identities) {
        entries.extend(identity_suite(args.cases, 50, args.seed).into_iter().map(SuiteEntry::Identities));
    }
    if wants(Suite::PowerConsistency) {
        entries.extend(consistency_suite(&CONSISTENCY_ALPHAS, &cfg)?.into_iter().map(SuiteEntry::PowerConsistency));
    }
    if wants(Suite::Oracle) {
        let reports = oracle_suite(args.seed, args.trials, args.n, args.lists, &cfg);
        entries.extend(reports.into_iter().map(SuiteEntry::Oracle));
    }
    let pass = entries.iter().all(SuiteEntry::pass);
    Ok((to_json(&entries), pass))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Norm(a) => cmd_norm(a).map(|s| (s, true)),
        Command::TwoOp(a) => cmd_two_op(a).map(|s| (s, true)),
        Command::PowerTable(a) => cmd_power_table(a).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok((text, pass)) => {
            let _ = out.write_all(text.as_bytes());
            if pass {
                EXIT_OK
            } else {
                let _ = writeln!(err, "verification failed");
                EXIT_VERIFY_FAILED
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Unsupported(msg)) => {
            let _ = writeln!(err, "unsupported: {msg}");
            EXIT_UNSUPPORTED
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("ccnorms").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn value_of(json: &str) -> serde_json::Value {
        serde_json::from_str::<serde_json::Value>(json).unwrap()["value"].clone()
    }

    #[test]
    fn weight_specs() {
        assert_eq!(parse_weight_spec("power:0.5"), Ok(WeightSpec::Power(0.5)));
        assert_eq!(parse_weight_spec("powerpair:-1"), Ok(WeightSpec::PowerPair(-1.0)));
        assert_eq!(parse_weight_spec("list:a.csv"), Ok(WeightSpec::List("a.csv".into())));
        assert!(parse_weight_spec("list:").is_err());
        assert!(parse_weight_spec("power:x").is_err());
        assert!(parse_weight_spec("gauss:1").is_err());
    }

    #[test]
    fn norm_closed_form() {
        let (code, out, _) = run_args(&["norm", "--op", "cesaro", "--cone", "all", "--u", "power:0.5", "--v", "power:0.5"]);
        assert_eq!(code, 0);
        let json: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(json["value"], 2.0);
        assert_eq!(json["status"], "ClosedForm");
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn unmatched_powers_use_the_scan() {
        let (code, out, _) =
            run_args(&["norm", "--op", "cesaro", "--cone", "all", "--u", "power:0.5", "--v", "power:0.25", "--n-max", "1000"]);
        assert_eq!(code, 0);
        let json: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_ne!(json["status"], "ClosedForm");
    }

    #[test]
    fn infinite_is_a_string() {
        let (code, out, _) = run_args(&["norm", "--op", "copson", "--cone", "all", "--u", "powerpair:0"]);
        assert_eq!(code, 0);
        assert_eq!(value_of(&out), "inf");
    }

    #[test]
    fn open_problem_exit() {
        let (code, out, err) =
            run_args(&["norm", "--op", "copson-minus-identity", "--cone", "nonincr", "--u", "powerpair:1"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("open problem"), "{err}");
    }

    #[test]
    fn input_errors() {
        assert_eq!(run_args(&["norm", "--op", "cesaro", "--cone", "all", "--u", "power:1"]).0, 1);
        assert_eq!(run_args(&["norm", "--op", "nope"]).0, 1);
        assert_eq!(run_args(&["norm", "--op", "cesaro", "--cone", "all", "--u", "list:/does/not/exist"]).0, 1);
        assert_eq!(run_args(&["power-table", "--theorem", "cesaro", "--from", "1", "--to", "0", "--step", "0.1"]).0, 1);
        assert_eq!(run_args(&["power-table", "--theorem", "cesaro", "--from", "0", "--to", "1", "--step", "0"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn two_op_examples() {
        let (code, out, _) = run_args(&["two-op", "--dir", "c-le-cstar", "--cone", "all", "--u", "power:-1", "--v", "power:-1"]);
        assert_eq!(code, 0);
        assert!((value_of(&out).as_f64().unwrap() - 3.0).abs() < 1e-12);
        let (_, out, _) = run_args(&["two-op", "--dir", "cstar-le-c", "--cone", "nonneg", "--u", "power:2", "--v", "power:2"]);
        assert_eq!(value_of(&out).as_f64().unwrap(), 0.0);
        let (code, _, _) = run_args(&["two-op", "--dir", "cstar-le-c", "--cone", "nondecr", "--u", "powerpair:2"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn table_shape() {
        let (code, out, _) = run_args(&["power-table", "--theorem", "cesaro", "--from", "-1", "--to", "0.9", "--step", "0.1"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "alpha,cone,value,case_label");
        assert_eq!(lines.len(), 1 + 4 * 20);
        assert!(lines.contains(&"-0.9,all,1,alpha < 0"));
        let (_, out, _) = run_args(&["power-table", "--theorem", "copson", "--from", "0", "--to", "0", "--step", "1"]);
        assert_eq!(out.lines().count(), 1 + 4);
        assert!(out.contains("0,all,inf,alpha <= 0"));
        let (_, out, _) = run_args(&["power-table", "--theorem", "copson-minus-identity", "--from", "1", "--to", "2", "--step", "0.5"]);
        assert!(out.starts_with("# note:"));
        assert!(!out.contains("nonincr,"));
        assert_eq!(out.lines().count(), 2 + 2 * 3);
    }

    #[test]
    fn alpha_grid_is_clean() {
        let g = alpha_grid(-0.3, 0.3, 0.1).unwrap();
        assert_eq!(g, vec![-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3]);
        assert_eq!(alpha_grid(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
    }
}
