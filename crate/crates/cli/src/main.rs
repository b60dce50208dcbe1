use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use brpd_cli::config::PipelineConfig;
use brpd_cli::pipeline::{run_pipeline, RunError};
use brpd_cli::plots::emit_plots;
use brpd_cli::report::CohortReport;
use brpd_cli::synth_cmd::write_fixture;

/// EEG mental-effort analysis: inter-BRPD extraction and cohort
/// statistics over directories of EDF recordings.
#[derive(Parser)]
#[command(name = "brpd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline over a directory of EDF + marker pairs.
    Analyze {
        /// Directory containing <id>.edf and <id>.markers.json pairs.
        dir: PathBuf,
        /// TOML configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (env BRPD_OUT overrides).
        #[arg(long, default_value = "brpd_out")]
        out: PathBuf,
    },
    /// Generate a synthetic cohort fixture.
    Synth {
        /// Fixture name.
        #[arg(long, default_value = "default")]
        fixture: String,
        /// Override the fixture's subject count.
        #[arg(long)]
        subjects: Option<usize>,
        /// Override the fixture's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (env BRPD_OUT overrides).
        #[arg(long, default_value = "brpd_fixture")]
        out: PathBuf,
    },
    /// Emit plot-ready CSV grids from a cohort report.
    Plots {
        /// Path to cohort_report.json from an analyze run.
        report: PathBuf,
        /// Output directory (env BRPD_OUT overrides).
        #[arg(long, default_value = "brpd_plots")]
        out: PathBuf,
    },
}

fn resolve_out(cli_out: PathBuf) -> PathBuf {
    match std::env::var_os("BRPD_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cli_out,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep help/version on stdout with success, usage errors at 1.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match cli.command {
        Command::Analyze { dir, config, out } => {
            let out = resolve_out(out);
            let config = match config {
                Some(path) => match PipelineConfig::load(&path) {
                    Ok(cfg) => cfg,
                    Err(e) => {
                        eprintln!("config error: {e}");
                        return ExitCode::from(1);
                    }
                },
                None => PipelineConfig::default(),
            };
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("cannot create {}: {e}", out.display());
                return ExitCode::from(1);
            }
            match run_pipeline(&dir, &config, &out) {
                Ok(run) => {
                    println!(
                        "processed {}/{} recordings; report bundle in {}",
                        run.manifest.n_processed,
                        run.manifest.n_inputs,
                        out.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(RunError::Usage(m)) => {
                    eprintln!("error: {m}");
                    ExitCode::from(1)
                }
                Err(RunError::AllInputsFailed(m)) => {
                    eprintln!("error: {m}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Synth {
            fixture,
            subjects,
            seed,
            out,
        } => {
            let out = resolve_out(out);
            match write_fixture(&fixture, subjects, seed, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Plots { report, out } => {
            let out = resolve_out(out);
            let text = match std::fs::read_to_string(&report) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", report.display());
                    return ExitCode::from(1);
                }
            };
            let report: CohortReport = match serde_json::from_str(&text) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("malformed report: {e}");
                    return ExitCode::from(1);
                }
            };
            match emit_plots(&report, &out) {
                Ok(()) => {
                    println!("plot grids written to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
