//! Command-line front end shared by the `specnego` binary and the tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::experiments::{run_experiment, ExperimentId, ExperimentSpec};
use crate::io::{
    emit_plot, export_report, parse_matrix_csv, parse_scenario, write_metrics_table, write_topsis_csv, PlotKind,
    ScenarioError,
};
use crate::kernel::{run_with_cap, DEFAULT_EVENT_CAP};
use crate::topsis::topsis;

pub const EXIT_OK: i32 = 0;
/// clap's own code for bad flags.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;

pub const EVENT_CAP_ENV: &str = "SPECNEGO_EVENT_CAP";

#[derive(Debug, Parser)]
#[command(name = "specnego", version, about = "Coalition-based spectrum negotiation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run one scenario file and export its report.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "./out")]
        out: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a built-in study (exp_i, exp_ii, exp_iii, exp_iv or all).
    Experiment {
        id: String,
        #[arg(long, default_value = "./out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// SU counts for exp_iv, comma separated.
        #[arg(long, value_delimiter = ',')]
        su_sweep: Option<Vec<usize>>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Rank the alternatives of a decision-matrix CSV.
    Topsis { matrix: PathBuf },
    /// Check a scenario file and list every problem.
    Validate { scenario: PathBuf },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn event_cap() -> Result<u64, Failure> {
    match std::env::var(EVENT_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::new(EXIT_PARSE, format!("{EVENT_CAP_ENV}: `{v}` is not an event count"))),
        Err(_) => Ok(DEFAULT_EVENT_CAP),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<crate::model::Scenario, Failure> {
    parse_scenario(&read(path)?).map_err(|e| {
        let code = match e {
            ScenarioError::Parse { .. } => EXIT_PARSE,
            ScenarioError::Invalid(_) => EXIT_INVALID,
        };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

fn plot_kind(id: ExperimentId) -> PlotKind {
    match id {
        ExperimentId::ExpI => PlotKind::Line,
        _ => PlotKind::Bar,
    }
}

fn dispatch(command: CliCommand, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::new(EXIT_RUNTIME, e.to_string());
    match command {
        CliCommand::Run { scenario, out, seed } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let report = run_with_cap(&s, event_cap()?).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
            let files = export_report(&report, &out).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
            writeln!(
                stdout,
                "{} messages, run response {}, {} of {} SUs served",
                report.msg_counts.total,
                report.run_response.map_or_else(|| "none".into(), |t| t.to_string()),
                report.served(),
                report.per_su_response.len()
            )
            .map_err(io_err)?;
            for f in files {
                writeln!(stdout, "wrote {}", f.display()).map_err(io_err)?;
            }
        }
        CliCommand::Experiment {
            id,
            out,
            seed,
            su_sweep,
            no_plots,
        } => {
            let ids = if id == "all" {
                ExperimentId::ALL.to_vec()
            } else {
                vec![id.parse::<ExperimentId>().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?]
            };
            let cap = event_cap()?;
            fs::create_dir_all(&out).map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", out.display())))?;
            for id in ids {
                let mut spec = ExperimentSpec::new(id);
                spec.seed = seed;
                spec.event_cap = cap;
                if let Some(sweep) = &su_sweep {
                    if sweep.is_empty() || sweep.contains(&0) {
                        return Err(Failure::new(EXIT_PARSE, "--su-sweep needs positive SU counts"));
                    }
                    spec.su_sweep = sweep.clone();
                }
                let table = run_experiment(&spec).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
                let csv_path = out.join(format!("{id}.csv"));
                write_metrics_table(&table, &csv_path).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
                writeln!(stdout, "wrote {}", csv_path.display()).map_err(io_err)?;
                if !no_plots {
                    let svg_path = out.join(format!("{id}.svg"));
                    emit_plot(&table, plot_kind(id), &svg_path)
                        .map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
                    writeln!(stdout, "wrote {}", svg_path.display()).map_err(io_err)?;
                }
            }
        }
        CliCommand::Topsis { matrix } => {
            let m = parse_matrix_csv(&read(&matrix)?)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", matrix.display())))?;
            let result = topsis(&m).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;
            stdout
                .write_all(write_topsis_csv(&m, &result).as_bytes())
                .map_err(io_err)?;
        }
        CliCommand::Validate { scenario } => {
            load_scenario(&scenario)?;
            writeln!(stdout, "ok").map_err(io_err)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
