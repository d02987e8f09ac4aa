mod report;
mod runner;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::Format;

/// Declarative checker for firmly nonexpansive maps and maximally monotone
/// operators.
#[derive(Parser)]
#[command(name = "minty", version, disable_version_flag = false)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a JSON experiment spec, in declaration order.
    Run {
        /// Path to the experiment spec file.
        spec: PathBuf,
        /// Output path, overriding the spec's output section ("-" for stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format, overriding the spec's output section.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Worker threads for sampling sweeps inside each check.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
        jobs: u64,
    },
    /// List every available check id with what it targets and measures.
    ListChecks,
    /// Print the tool version.
    Version,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

/// Writes to stdout; a closed pipe (reader stopped, e.g. `minty list-checks | head`)
/// is a silent success, any other write failure is a runtime error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    let status = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    if let Err(e) = status {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(5);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out, format, jobs } => {
            configure_threads(jobs as usize);
            match runner::run_spec_file(&spec, out.as_deref(), format.map(Into::into)) {
                Ok(outcome) => {
                    match &outcome.out_path {
                        Some(path) => emit(&format!(
                            "report written to {} ({} checks, {} expectation failures)\n",
                            path.display(),
                            outcome.checks_run,
                            outcome.expectations_failed
                        )),
                        None => emit(&outcome.rendered),
                    }
                    if outcome.expectations_failed > 0 {
                        eprintln!(
                            "error: {} declared expectation(s) not met",
                            outcome.expectations_failed
                        );
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Command::ListChecks => {
            let mut listing = String::new();
            for info in runner::check_registry() {
                listing.push_str(&format!(
                    "{:<22} [{}] {}\n",
                    info.id,
                    info.target_label(),
                    info.describe
                ));
            }
            emit(&listing);
            ExitCode::SUCCESS
        }
        Command::Version => {
            emit(&format!("minty {}\n", env!("CARGO_PKG_VERSION")));
            ExitCode::SUCCESS
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(jobs: usize) {
    // Ignores failure: the global pool can only be installed once.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_jobs: usize) {}
