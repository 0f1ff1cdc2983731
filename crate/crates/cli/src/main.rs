use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fock_wco_cli::config::{JobConfig, Overrides, Task};
use fock_wco_cli::sweep::{parse_jobs, sweep};
use fock_wco_cli::run;

#[derive(Parser)]
#[command(name = "fockwco", version, about = "Classify and verify weighted composition operators on Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Job config (JSON); `-` reads standard input.
    #[arg(long)]
    config: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation dimension.
    #[arg(short = 'N', value_name = "DIM")]
    dim: Option<usize>,
    /// Largest iterate index.
    #[arg(long)]
    nmax: Option<usize>,
    /// Classification tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn overrides(&self, tasks: Option<Vec<Task>>) -> Overrides {
        Overrides {
            dim: self.dim,
            nmax: self.nmax,
            tol: self.tol,
            seed: self.seed,
            timing: self.timing,
            tasks,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Boundedness, compactness, power boundedness, ergodicity and norms.
    Classify(Common),
    /// Spectrum descriptor.
    Spectrum(Common),
    /// Mean ergodicity with Cesàro evidence.
    Ergodic(Common),
    /// Oracle cross-checks of the closed forms.
    Verify(Common),
    /// CSV export of the truncated matrix.
    Matrix {
        #[command(flatten)]
        common: Common,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the tasks listed in the config.
    Run {
        #[command(flatten)]
        common: Common,
        /// Where to write the CSV of a `matrix` task.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Run a list of jobs in parallel into a directory.
    Sweep {
        /// JSON array of job configs, or {"jobs": [...]}; `-` reads standard input.
        #[arg(long)]
        config: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Truncation dimension for every job.
        #[arg(short = 'N', value_name = "DIM")]
        dim: Option<usize>,
        /// Largest iterate index for every job.
        #[arg(long)]
        nmax: Option<usize>,
        /// Classification tolerance for every job.
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for every job.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall-clock timings in each report.
        #[arg(long)]
        timing: bool,
    },
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn usage_exit(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("fockwco: {msg}");
    ExitCode::from(2)
}

fn io_exit(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("fockwco: {msg}");
    ExitCode::from(1)
}

fn load(common: &Common, tasks: Option<Vec<Task>>) -> Result<JobConfig, ExitCode> {
    let text = read_input(&common.config).map_err(|e| usage_exit(format!("cannot read {}: {e}", common.config)))?;
    let mut cfg = JobConfig::parse(&text).map_err(usage_exit)?;
    common.overrides(tasks).apply(&mut cfg);
    cfg.validate().map_err(usage_exit)?;
    Ok(cfg)
}

fn single(common: &Common, task: Task) -> ExitCode {
    let cfg = match load(common, Some(vec![task])) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let outcome = run(&cfg);
    if let Err(e) = emit(common.out.as_ref(), &outcome.report_json()) {
        return io_exit(e);
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify(c) => single(&c, Task::Classify),
        Command::Spectrum(c) => single(&c, Task::Spectrum),
        Command::Ergodic(c) => single(&c, Task::Ergodic),
        Command::Verify(c) => single(&c, Task::Verify),
        Command::Matrix { common, report } => {
            let cfg = match load(&common, Some(vec![Task::Matrix])) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let outcome = run(&cfg);
            if let Some(path) = report {
                if let Err(e) = fs::write(path, outcome.report_json()) {
                    return io_exit(e);
                }
            }
            if let Some(csv) = &outcome.matrix_csv {
                if let Err(e) = emit(common.out.as_ref(), csv) {
                    return io_exit(e);
                }
            } else {
                eprint!("{}", outcome.report_json());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Run { common, matrix_out } => {
            let cfg = match load(&common, None) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let outcome = run(&cfg);
            if let (Some(path), Some(csv)) = (matrix_out, &outcome.matrix_csv) {
                if let Err(e) = fs::write(path, csv) {
                    return io_exit(e);
                }
            }
            if let Err(e) = emit(common.out.as_ref(), &outcome.report_json()) {
                return io_exit(e);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Sweep {
            config,
            out,
            dim,
            nmax,
            tol,
            seed,
            timing,
        } => {
            let text = match read_input(&config) {
                Ok(t) => t,
                Err(e) => return usage_exit(format!("cannot read {config}: {e}")),
            };
            let jobs = match parse_jobs(&text) {
                Ok(j) => j,
                Err(e) => return usage_exit(e),
            };
            let overrides = Overrides {
                dim,
                nmax,
                tol,
                seed,
                timing,
                tasks: None,
            };
            match sweep(&jobs, &out, &overrides) {
                Ok(summary) => {
                    for r in &summary.rows {
                        eprintln!("job {:03} exit {} {}", r.job, r.exit_code, r.error);
                    }
                    println!("{}", summary.summary_file.display());
                    ExitCode::from(summary.exit_code as u8)
                }
                Err(e) => io_exit(e),
            }
        }
    }
}
