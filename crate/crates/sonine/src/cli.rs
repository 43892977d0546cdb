//! Command-line interface.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 claim violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use sonine_core::pde::solve;
use sonine_core::tstep::bracket_blowup_closed_form;
use sonine_core::SolveStatus;

use crate::config::RunConfig;
use crate::output::{self, SolveSummary, SCHEMA_VERSION};
use crate::verify::{run_suites, SuiteName, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CLAIM: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sonine", version, about = "Nonlocal-in-time reaction-diffusion solver and verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem described by a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (`sonine`, `invariance`, `decay`, `blowup`,
    /// `quasilinear`, `convergence` or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// TOML file overriding suite settings.
        #[arg(long)]
        suite_config: Option<PathBuf>,
    },
    /// Print the closed-form blow-up time bracket as JSON.
    Bounds {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c0: f64,
    },
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    schema_version: u32,
    alpha: f64,
    c0: f64,
    lower: f64,
    upper: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Solve { config, out } => cmd_solve(&config, out.as_deref(), stdout, stderr),
        Command::Verify { suite, out, jobs, suite_config } => {
            cmd_verify(&suite, &out, jobs, suite_config.as_deref(), stdout, stderr)
        }
        Command::Bounds { alpha, c0 } => cmd_bounds(alpha, c0, stdout, stderr),
    }
}

pub fn cmd_solve(config: &Path, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (cfg, text) = match RunConfig::load(config) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let base = config.parent().unwrap_or(Path::new("."));
    let problem = match cfg.build(&text, base) {
        Ok(p) => p,
        Err(e) => {
            let e = crate::config::ConfigError { path: Some(config.to_path_buf()), ..e };
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let Some(dir) = out.map(Path::to_path_buf).or_else(|| cfg.output.dir.as_ref().map(|d| base.join(d))) else {
        let _ = writeln!(stderr, "error: no output directory (use --out or output.dir)");
        return EXIT_INVALID;
    };
    let report = match solve(&problem) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let summary = SolveSummary::new(&report, digest);
    let written = (|| -> std::io::Result<()> {
        output::write_report_csv(&report, &dir.join("report.csv"))?;
        if let Some(fields) = &report.fields {
            let mut header = vec!["t".to_string()];
            header.extend((0..problem.op.n_modes()).map(|i| format!("mode_{}", problem.op.wavenumbers()[i])));
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<f64>> = report
                .times
                .iter()
                .zip(fields)
                .map(|(&t, u)| std::iter::once(t).chain(u.iter().copied()).collect())
                .collect();
            output::write_table_csv(&dir.join("fields.csv"), &header_refs, &rows)?;
        }
        output::write_json(&summary, &dir.join("summary.json"))
    })();
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write to {}: {e}", dir.display());
        return EXIT_INVALID;
    }
    let _ = writeln!(stdout, "{}: {} steps, final time {}", summary.status, summary.steps, summary.final_time);
    match report.status {
        SolveStatus::Completed | SolveStatus::BlowUp { .. } => EXIT_OK,
        SolveStatus::Failed { .. } => EXIT_NUMERICAL,
    }
}

pub fn cmd_verify(
    suite: &str,
    out: &Path,
    jobs: usize,
    suite_config: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let names: Vec<SuiteName> = if suite == "all" {
        SuiteName::ALL.to_vec()
    } else {
        match suite.parse() {
            Ok(n) => vec![n],
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INVALID;
            }
        }
    };
    let cfg = match suite_config {
        None => VerifyConfig::default(),
        Some(path) => {
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: cannot read: {e}", path.display()))
                .and_then(|t| {
                    VerifyConfig::parse(&t).map_err(|e| {
                        crate::config::ConfigError { path: Some(path.to_path_buf()), ..e }.to_string()
                    })
                });
            match parsed {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_INVALID;
                }
            }
        }
    };
    let (summary, results) = match run_suites(&names, &cfg, Some(out), jobs) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write to {}: {e}", out.display());
            return EXIT_INVALID;
        }
    };
    for r in &results {
        let _ = writeln!(stdout, "{}: {:?} ({} passed, {} failed, {} errored)", r.suite, r.verdict, r.passed, r.failed, r.errored);
        for c in r.cases.iter().filter(|c| !c.pass()) {
            match &c.error {
                Some(e) => {
                    let _ = writeln!(stdout, "  {}: error: {e}", c.case);
                }
                None => {
                    for ch in c.checks.iter().filter(|ch| ch.counts() && !ch.pass) {
                        let _ = writeln!(stdout, "  {}: {} measured {} (expected {})", c.case, ch.claim, ch.measured, ch.expected);
                    }
                }
            }
        }
    }
    summary.verdict.exit_code()
}

pub fn cmd_bounds(alpha: f64, c0: f64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match bracket_blowup_closed_form(alpha, c0) {
        Ok((lower, upper)) => {
            let out = BoundsOutput { schema_version: SCHEMA_VERSION, alpha, c0, lower, upper };
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&out).expect("serializable"));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}
