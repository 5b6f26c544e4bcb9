//! Command-line front end for the `bms` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bms::{format_table, run, TraceRecord, TraceRow};
use crate::codes::{decode, CodeConfig, Word};
use crate::ff::{Field, FieldConfig};
use crate::golden;
use crate::locator::{syndromes, AlphaPair, SyndromeFile};
use crate::oracle::{equivalence_sweep, exhaustive_uniqueness, Report};
use crate::order::{Point, SofT, TotalOrder};
use crate::poly::BivariatePolynomial;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Environment variable seeding the randomized sweeps.
pub const SEED_VAR: &str = "BMS_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "bms",
    about = "Groebner bases of doubly periodic arrays and abelian-code decoding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Field description file: {"p": .., "m": .., "poly": [c0, .., cm]}
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Array period as r1,r2
    #[arg(long, value_parser = parse_pair)]
    pub period: Option<(usize, usize)>,
    #[arg(long, default_value = "lex", value_parser = parse_order)]
    pub order: TotalOrder,
    /// Error-correcting capability
    #[arg(long)]
    pub t: usize,
    /// Input file; its content depends on the subcommand
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the per-step trace
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Syndrome table on S(t) of the error polynomial in --in
    Syndrome {
        #[command(flatten)]
        common: Common,
        /// Offset as i,j
        #[arg(long, value_parser = parse_point)]
        tau: Point,
    },
    /// Run the iteration on the syndrome file in --in
    Bms {
        #[command(flatten)]
        common: Common,
    },
    /// Decode the received word in --in for the code in --code
    Decode {
        #[command(flatten)]
        common: Common,
        /// Code description file; supplies field and period
        #[arg(long)]
        code: PathBuf,
        /// Offset as i,j; searched for when absent
        #[arg(long, value_parser = parse_point)]
        tau: Option<Point>,
    },
    /// Brute-force uniqueness and equivalence checks
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Base field size
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Random trials for the equivalence sweep
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Replay the bundled worked examples
    Selftest,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j but got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_point(s: &str) -> Result<Point, String> {
    parse_pair(s).map(|(a, b)| Point(a, b))
}

fn parse_order(s: &str) -> Result<TotalOrder, String> {
    s.parse()
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError {
        code: EXIT_CONFIG,
        message: e.to_string(),
    }
}

fn failure<E: std::fmt::Display>(e: E) -> CliError {
    CliError {
        code: EXIT_FAILURE,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| config(format!("--{flag} is required")))
}

fn load_field(common: &Common) -> Result<Field, CliError> {
    let path = require(&common.field, "field")?;
    let cfg: FieldConfig = serde_json::from_str(&read(path)?).map_err(config)?;
    cfg.build().map_err(config)
}

fn check_t(t: usize, period: (usize, usize)) -> Result<(), CliError> {
    if t == 0 || t > period.0 / 2 || t > period.1 / 2 {
        return Err(config(format!(
            "t = {t} must satisfy 1 <= t <= min(r1, r2) / 2 for period {period:?}"
        )));
    }
    Ok(())
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| config(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(failure),
    }
}

fn seed() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Renders a trace in either output form. The structured form is a JSON
/// array of `{l, F, G, delta}` records.
pub fn emit_trace(trace: &[TraceRecord], order: TotalOrder, format: Format) -> String {
    match format {
        Format::Table => format_table(trace, order),
        Format::Structured => {
            let rows: Vec<TraceRow> = trace.iter().map(|r| r.row(order)).collect();
            serde_json::to_string_pretty(&rows).expect("trace rows serialize") + "\n"
        }
    }
}

fn braced(items: &[String]) -> String {
    format!("{{{}}}", items.join(","))
}

/// Structured output of the `bms` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmsReport {
    pub basis: Vec<String>,
    pub delta: Vec<Point>,
    pub condition_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

/// Structured output of the `decode` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub tau: Point,
    pub error: String,
    pub corrected: Vec<Vec<String>>,
    pub condition_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

fn cmd_syndrome(common: &Common, tau: Point, stdout: &mut dyn Write) -> Result<(), CliError> {
    let field = load_field(common)?;
    let period = *require(&common.period, "period")?;
    check_t(common.t, period)?;
    let text = read(require(&common.input, "in")?)?;
    let e = BivariatePolynomial::parse(&field, text.trim()).map_err(config)?;
    let alpha = AlphaPair::for_period(&field, period).map_err(config)?;
    let s = SofT::new(common.t);
    let values = syndromes(
        &field,
        &e,
        tau,
        &alpha,
        s.schedule(TotalOrder::Lex).iter().copied(),
    );
    let file = SyndromeFile::new(tau, &values);
    emit(
        common,
        &(serde_json::to_string_pretty(&file).map_err(failure)? + "\n"),
        stdout,
    )
}

fn cmd_bms(common: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let field = load_field(common)?;
    let period = *require(&common.period, "period")?;
    check_t(common.t, period)?;
    let file: SyndromeFile = serde_json::from_str(&read(require(&common.input, "in")?)?).map_err(config)?;
    let values = file.values(&field).map_err(config)?;
    let order = common.order;
    let out = run(&field, &values, order, common.t, period).map_err(failure)?;
    let basis: Vec<String> = out.basis.iter().map(|f| f.to_text(order)).collect();
    let delta: Vec<Point> = out.delta.members().iter().copied().collect();
    let text = match common.format {
        Format::Table => {
            let mut s = String::new();
            if common.trace {
                s += &emit_trace(&out.trace, order, Format::Table);
            }
            let cells: Vec<String> = delta.iter().map(Point::to_string).collect();
            s += &format!("basis {}\ndelta {}\n", braced(&basis), braced(&cells));
            if !out.condition_holds {
                s += "warning: start condition fails for this order\n";
            }
            s
        }
        Format::Structured => {
            let report = BmsReport {
                basis,
                delta,
                condition_holds: out.condition_holds,
                trace: common
                    .trace
                    .then(|| out.trace.iter().map(|r| r.row(order)).collect()),
            };
            serde_json::to_string_pretty(&report).map_err(failure)? + "\n"
        }
    };
    emit(common, &text, stdout)
}

fn cmd_decode(
    common: &Common,
    code_path: &Path,
    tau: Option<Point>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg: CodeConfig = serde_json::from_str(&read(code_path)?).map_err(config)?;
    let (field, code) = cfg.build().map_err(config)?;
    check_t(common.t, code.period())?;
    let rows: Vec<Vec<String>> =
        serde_json::from_str(&read(require(&common.input, "in")?)?).map_err(config)?;
    let received = Word::from_rows(&field, &rows).map_err(config)?;
    let alpha = AlphaPair::for_period(&field, code.period()).map_err(config)?;
    let order = common.order;
    let out = decode(&field, &alpha, &code, &received, common.t, order, tau).map_err(failure)?;
    let error = out.error.poly().to_text(order);
    let text = match common.format {
        Format::Table => {
            let mut s = String::new();
            if common.trace {
                s += &emit_trace(&out.run.trace, order, Format::Table);
            }
            s += &format!("tau {}\nerror {error}\ncorrected\n", out.tau);
            for row in out.corrected.to_rows() {
                s += &row.join(" ");
                s.push('\n');
            }
            s
        }
        Format::Structured => {
            let report = DecodeReport {
                tau: out.tau,
                error,
                corrected: out.corrected.to_rows(),
                condition_holds: out.run.condition_holds,
                trace: common
                    .trace
                    .then(|| out.run.trace.iter().map(|r| r.row(order)).collect()),
            };
            serde_json::to_string_pretty(&report).map_err(failure)? + "\n"
        }
    };
    emit(common, &text, stdout)
}

/// Structured output of the `oracle` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub uniqueness: Option<Report>,
    pub equivalence: Report,
}

fn cmd_oracle(common: &Common, q: u32, trials: usize, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let field = load_field(common)?;
    let period = *require(&common.period, "period")?;
    check_t(common.t, period)?;
    if !field.is_subfield_size(q) {
        return Err(config(format!(
            "GF({q}) is not a subfield of GF({})",
            field.order()
        )));
    }
    let seed = seed();
    // the exhaustive sweep is skipped, not failed, when the space is too large
    let uniqueness = exhaustive_uniqueness(&field, period, q, common.t).ok();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let equivalence =
        equivalence_sweep(&field, period, q, common.t, trials, false, &mut rng).map_err(config)?;
    let passed = equivalence.passed() && uniqueness.as_ref().is_none_or(Report::passed);
    let report = OracleReport {
        seed,
        uniqueness,
        equivalence,
    };
    let text = match common.format {
        Format::Structured => serde_json::to_string_pretty(&report).map_err(failure)? + "\n",
        Format::Table => {
            let mut s = String::new();
            match &report.uniqueness {
                Some(u) => {
                    s += &format!(
                        "uniqueness: {} checked, {} failures\n",
                        u.checked,
                        u.failures.len()
                    )
                }
                None => s += "uniqueness: skipped, space too large\n",
            }
            let eq = &report.equivalence;
            s += &format!(
                "equivalence: {} checked, {} failures (seed {seed})\n",
                eq.checked,
                eq.failures.len()
            );
            for f in report
                .uniqueness
                .iter()
                .flat_map(|u| &u.failures)
                .chain(&eq.failures)
            {
                s += &format!("  {f}\n");
            }
            s
        }
    };
    emit(common, &text, stdout)?;
    Ok(passed)
}

fn cmd_selftest(stdout: &mut dyn Write) -> Result<bool, CliError> {
    let goldens = golden::load_all();
    let mut passed = 0;
    let mut lines = String::new();
    for g in &goldens {
        match golden::replay(g) {
            Ok(r) if r.passed() => {
                passed += 1;
                lines += &format!("ok   {}\n", r.name);
            }
            Ok(r) => {
                lines += &format!("FAIL {}\n", r.name);
                for m in &r.mismatches {
                    lines += &format!("  {m}\n");
                }
            }
            Err(e) => lines += &format!("FAIL {}: {e}\n", g.name),
        }
        if let Some(note) = &g.note {
            lines += &format!("  note: {note}\n");
        }
    }
    lines += &format!("{passed}/{} examples reproduced\n", goldens.len());
    stdout.write_all(lines.as_bytes()).map_err(failure)?;
    Ok(passed == goldens.len())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Syndrome { common, tau } => cmd_syndrome(common, *tau, stdout).map(|_| true),
        Command::Bms { common } => cmd_bms(common, stdout).map(|_| true),
        Command::Decode { common, code, tau } => cmd_decode(common, code, *tau, stdout).map(|_| true),
        Command::Oracle { common, q, trials } => cmd_oracle(common, *q, *trials, stdout),
        Command::Selftest => cmd_selftest(stdout),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
