use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use entropic_cli::certificate::Input;
use entropic_cli::commands::{
    auto_scale_cmd, generate_cmd, parse_elements, parse_family, read_file, read_spec, realize_cmd,
    sim_cmd, verify_cmd, Format, Outcome, SimRequest,
};
use entropic_cli::error::{CliError, Result};
use entropic_cli::verify::{Stage, VerifyOptions};
use entropic_core::concretize::{DEFAULT_CAP, DEFAULT_TOLERANCE};

#[derive(Parser)]
#[command(
    name = "entropic",
    version,
    about = "Entropic realizations of submodular functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a realization certificate for a spec.
    Realize {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a spec or a certificate.
    Verify {
        path: PathBuf,
        /// Comma-separated subset of tabulate,polymatroid,realize,symbolic,concretize,sim.
        #[arg(long)]
        stages: Option<String>,
        /// Shorthand for adding the concretize stage.
        #[arg(long)]
        concretize: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        /// Adds the sim stage; checks every disjoint triple when there are at most this many.
        #[arg(long)]
        sim_samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the submodular information measures for disjoint A, B, C.
    Sim {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
        #[arg(long)]
        concretize: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Rescale rational weights to integers.
    AutoScale {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a seeded random spec.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        small: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn emit(outcome: Outcome, output: Option<&Path>) -> Result<i32> {
    match output {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{}", outcome.output),
    }
    Ok(outcome.exit_code)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Realize { spec, output } => {
            emit(realize_cmd(&read_spec(&spec)?)?, output.as_deref())
        }
        Command::Verify {
            path,
            stages,
            concretize,
            cap,
            sim_samples,
            seed,
            tolerance,
            format,
            output,
        } => {
            let mut opts = VerifyOptions {
                cap,
                seed,
                tolerance,
                ..VerifyOptions::default()
            };
            if let Some(list) = stages {
                opts.stages = Stage::parse_list(&list)?;
            }
            if concretize {
                opts.stages.insert(Stage::Concretize);
            }
            if let Some(k) = sim_samples {
                opts.sim_samples = k;
                opts.stages.insert(Stage::Sim);
            }
            let input = Input::parse(&read_file(&path)?, &path.display().to_string())?;
            emit(verify_cmd(&input, &opts, format.into())?, output.as_deref())
        }
        Command::Sim {
            spec,
            a,
            b,
            c,
            concretize,
            cap,
            format,
        } => {
            let (a, b, c) = (
                parse_elements(&a)?,
                parse_elements(&b)?,
                parse_elements(&c)?,
            );
            let req = SimRequest {
                a: &a,
                b: &b,
                c: &c,
                concretize,
                cap,
            };
            emit(sim_cmd(&read_spec(&spec)?, &req, format.into())?, None)
        }
        Command::AutoScale { spec, output } => {
            emit(auto_scale_cmd(&read_spec(&spec)?)?, output.as_deref())
        }
        Command::Generate {
            family,
            seed,
            small,
            output,
        } => emit(
            generate_cmd(parse_family(&family)?, seed, small)?,
            output.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("entropic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
