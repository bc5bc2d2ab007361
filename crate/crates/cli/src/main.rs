use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "chorus",
    version,
    about = "Procedural choreographies: check, project, run, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a .pc file and run every checker.
    Check { file: PathBuf },
    /// Write the projected network of a .pc file as .pp text.
    Project {
        file: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        /// Keep parameters the projected bodies never use.
        #[arg(long)]
        no_prune: bool,
        #[arg(short = 'o', value_name = "OUT")]
        out: Option<PathBuf>,
    },
    /// Execute a choreography.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Execute a .pp network.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a choreography and its projection and compare final states.
    Compare {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
        #[arg(long)]
        no_prune: bool,
    },
    /// Run the example programs on random instances against their oracles.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per example.
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Also write each example's source and default state here.
        #[arg(short = 'o', value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Seq,
    Random,
    Exhaustive,
}

#[derive(Args, Debug)]
struct RunOpts {
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Random)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step budget; the depth bound in exhaustive mode.
    #[arg(long, default_value_t = chorus_core::engine::DEFAULT_FUEL)]
    max_steps: u64,
    /// Print one line per step.
    #[arg(long)]
    trace: bool,
}

/// Exit statuses.
pub mod status {
    pub const OK: u8 = 0;
    pub const DIAGNOSTICS: u8 = 1;
    pub const STUCK: u8 = 2;
    pub const FUEL_OR_MISMATCH: u8 = 3;
}

/// Collected output of a command.
#[derive(Default)]
pub struct Io {
    pub out: String,
    pub err: String,
    color: bool,
}

impl Io {
    pub fn error(&mut self, msg: impl AsRef<str>) {
        let tag = if self.color {
            "\x1b[31merror\x1b[0m"
        } else {
            "error"
        };
        self.err.push_str(&format!("{tag}: {}\n", msg.as_ref()));
    }

    pub fn diagnostic(&mut self, file: &Path, d: &chorus_core::diag::Diagnostic) {
        let line = d.render(&file.display().to_string());
        let line = if self.color {
            let sev = d.severity.to_string();
            let code = if d.is_error() { 31 } else { 33 };
            line.replacen(&sev, &format!("\x1b[{code}m{sev}\x1b[0m"), 1)
        } else {
            line
        };
        self.err.push_str(&line);
        self.err.push('\n');
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                status::DIAGNOSTICS
            } else {
                status::OK
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut io = Io {
        color: std::env::var("CHORUS_COLOR").is_ok_and(|v| v == "1"),
        ..Default::default()
    };
    let code = match cli.command {
        Command::Check { file } => commands::check(&mut io, &file),
        Command::Project {
            file,
            state,
            no_prune,
            out,
        } => commands::project(&mut io, &file, state.as_deref(), !no_prune, out.as_deref()),
        Command::Run { file, opts } => commands::run(&mut io, &file, &opts),
        Command::Simulate { file, opts } => commands::simulate(&mut io, &file, &opts),
        Command::Compare {
            file,
            opts,
            no_prune,
        } => commands::compare(&mut io, &file, &opts, !no_prune),
        Command::Corpus { seed, count, out } => {
            commands::corpus(&mut io, seed, count, out.as_deref())
        }
    };
    let _ = std::io::stdout().write_all(io.out.as_bytes());
    let _ = std::io::stderr().write_all(io.err.as_bytes());
    ExitCode::from(code)
}
