//! Command-line front end: argument parsing, suite dispatch and report
//! rendering. `main` only forwards to [`run_from`].

use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::almostcontact::{build_ac_frame, kcontact_report, theorem_b_report, verify_theorem_b};
use crate::curvature::Space;
use crate::frames::{build_frame, validate_frame, FrameCase};
use crate::numeric_s6::{numeric_report, NumericConfig};
use crate::pointmodel::{build_model, identities_report, verify_identities};
use crate::report::{to_csv, Report};
use crate::tables::{reproduce_table, single_table_report, theorem_a_report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// `1..=max` or `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    All,
    One(usize),
}

impl Selector {
    fn parse(s: &str, max: usize) -> Result<Selector, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Selector::All);
        }
        match s.parse::<usize>() {
            Ok(k) if (1..=max).contains(&k) => Ok(Selector::One(k)),
            _ => Err(format!("expected 1..{max} or all, got {s:?}")),
        }
    }

    fn expand(self, max: usize) -> Vec<usize> {
        match self {
            Selector::All => (1..=max).collect(),
            Selector::One(k) => vec![k],
        }
    }
}

fn table_selector(s: &str) -> Result<Selector, String> {
    Selector::parse(s, 8)
}

fn case_selector(s: &str) -> Result<Selector, String> {
    Selector::parse(s, 4)
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "nkverify", version, about = "Exact verification of hypersurface identities in six-dimensional nearly Kaehler spaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Write the reports here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks (numeric oracle and frame cross-checks).
    #[arg(long, default_value_t = NumericConfig::default().seed, global = true)]
    pub seed: u64,
    /// Finite-difference step of the numeric oracle.
    #[arg(long, default_value_t = NumericConfig::default().step, global = true)]
    pub step: f64,
    /// Overrides every numeric tolerance; exact suites ignore it.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = table_selector, global = true)]
    pub table: Option<Selector>,
    #[arg(long, value_parser = case_selector, global = true)]
    pub case: Option<Selector>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure identities on every point model.
    VerifyIdentities,
    /// Reproduce the curvature tables.
    ReproduceTable {
        #[arg(value_parser = table_selector)]
        which: Option<Selector>,
    },
    /// Shape conclusions of every table and the six-sphere Gauss analysis.
    VerifyTheoremA,
    /// Replay the almost contact case scripts.
    VerifyTheoremB {
        #[arg(value_parser = case_selector)]
        which: Option<Selector>,
    },
    /// Finite-difference oracle on the octonionic six-sphere.
    NumericS6,
    /// Print a point model (s6, s3xs3, cp3, flagc3) or a hypersurface frame.
    DumpModel { space: String },
}

#[derive(Debug)]
pub enum Output {
    Reports(Vec<Report>),
    Dump { name: String, text: String },
}

fn merge(positional: Option<Selector>, flag: Option<Selector>, what: &str) -> Result<Selector, String> {
    match (positional, flag) {
        (Some(a), Some(b)) if a != b => Err(format!("conflicting {what} selectors")),
        (a, b) => Ok(a.or(b).unwrap_or(Selector::All)),
    }
}

/// Runs the configured suites. `Err` is a usage error.
pub fn execute(cfg: &RunConfig) -> Result<Output, String> {
    let reports = match &cfg.command {
        Command::VerifyIdentities => {
            let (models, frames) = rayon::join(
                || Space::ALL.par_iter().map(|&s| verify_identities(&build_model(s))).collect::<Vec<_>>(),
                || FrameCase::ALL.par_iter().map(|&c| validate_frame(&build_frame(c))).collect::<Vec<_>>(),
            );
            vec![identities_report(&models, &frames, cfg.seed)]
        }
        Command::ReproduceTable { which } => {
            let ks = merge(*which, cfg.table, "table")?.expand(8);
            ks.par_iter()
                .map(|&k| reproduce_table(k).map(|r| single_table_report(&r)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?
        }
        Command::VerifyTheoremA => {
            let tables = (1..=8usize)
                .into_par_iter()
                .map(reproduce_table)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            vec![theorem_a_report(&tables)]
        }
        Command::VerifyTheoremB { which } => {
            let sel = merge(*which, cfg.case, "case")?;
            let cases: Vec<u8> = sel.expand(4).into_iter().map(|k| k as u8).collect();
            let mut out = vec![theorem_b_report(&verify_theorem_b(&cases))];
            if sel == Selector::All {
                out.push(kcontact_report(&build_ac_frame()));
            }
            out
        }
        Command::NumericS6 => {
            let nc = NumericConfig {
                seed: cfg.seed,
                step: cfg.step,
                tol: cfg.tol,
                ..NumericConfig::default()
            };
            nc.validate()?;
            vec![numeric_report(&nc)]
        }
        Command::DumpModel { space } => {
            let (name, text) = if let Ok(s) = Space::from_str(space) {
                (s.name().to_string(), build_model(s).dump())
            } else if let Ok(c) = FrameCase::from_str(space) {
                (c.id().to_string(), build_frame(c).dump())
            } else {
                return Err(format!("unknown space or frame {space:?}"));
            };
            return Ok(Output::Dump { name, text });
        }
    };
    Ok(Output::Reports(reports))
}

/// Renders the output; JSON is always an array of reports.
pub fn render(out: &Output, format: Format) -> String {
    match (out, format) {
        (Output::Dump { name, text }, Format::Json) => {
            let v = serde_json::json!({ "model": name, "lines": text.lines().collect::<Vec<_>>() });
            serde_json::to_string_pretty(&v).expect("dump serializes") + "\n"
        }
        (Output::Dump { text, .. }, _) => text.clone(),
        (Output::Reports(rs), Format::Json) => serde_json::to_string_pretty(rs).expect("reports serialize") + "\n",
        (Output::Reports(rs), Format::Csv) => to_csv(rs),
        (Output::Reports(rs), Format::Text) => rs.iter().map(Report::to_text).collect::<Vec<_>>().join("\n"),
    }
}

pub fn exit_code(out: &Output) -> i32 {
    match out {
        Output::Reports(rs) if !rs.iter().all(Report::passed) => EXIT_FAIL,
        _ => EXIT_PASS,
    }
}

/// Full command-line entry: parses `args`, runs, writes output and returns
/// the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let text = render(&out, cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    exit_code(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, clap::Error> {
        RunConfig::try_parse_from(std::iter::once("nkverify").chain(args.iter().copied()))
    }

    #[test]
    fn selectors() {
        assert_eq!(Selector::parse("all", 8), Ok(Selector::All));
        assert_eq!(Selector::parse("3", 8), Ok(Selector::One(3)));
        assert!(Selector::parse("9", 8).is_err());
        assert!(Selector::parse("0", 4).is_err());
        assert!(Selector::parse("x", 4).is_err());
    }

    #[test]
    fn table_nine_is_a_usage_error() {
        let e = parse(&["reproduce-table", "9"]).unwrap_err();
        assert!(e.use_stderr());
        assert_eq!(run_from(["nkverify", "reproduce-table", "9"]), EXIT_USAGE);
        assert_eq!(run_from(["nkverify", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn flags_parse_after_subcommand() {
        let c = parse(&["numeric-s6", "--format", "json", "--seed", "9", "--step", "2e-4"]).unwrap();
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.seed, 9);
        assert_eq!(c.step, 2e-4);
        let c = parse(&["reproduce-table", "--table", "2"]).unwrap();
        assert_eq!(c.table, Some(Selector::One(2)));
    }

    #[test]
    fn conflicting_selectors_are_rejected() {
        let c = parse(&["reproduce-table", "2", "--table", "3"]).unwrap();
        assert!(execute(&c).is_err());
    }

    #[test]
    fn bad_step_is_a_usage_error() {
        let c = parse(&["numeric-s6", "--step", "0.5"]).unwrap();
        assert!(execute(&c).is_err());
    }

    #[test]
    fn dump_accepts_spaces_and_frames() {
        let c = parse(&["dump-model", "s6"]).unwrap();
        assert!(matches!(execute(&c), Ok(Output::Dump { .. })));
        let c = parse(&["dump-model", "cp3-mixed"]).unwrap();
        assert!(matches!(execute(&c), Ok(Output::Dump { .. })));
        let c = parse(&["dump-model", "torus"]).unwrap();
        assert!(execute(&c).is_err());
    }

    #[test]
    fn theorem_b_co_kahler_exits_zero() {
        let c = parse(&["verify-theorem-b", "2"]).unwrap();
        let out = execute(&c).unwrap();
        assert_eq!(exit_code(&out), EXIT_PASS);
        let text = render(&out, Format::Text);
        assert!(text.contains("contradiction"), "{text}");
    }
}
