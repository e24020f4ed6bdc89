use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use scottrank::space::corpus::CorpusSpec;
use scottrank::{Clock, Player, TuplePair};
use scottrank_cli::commands::{self, read_space, Format, GenCommand};
use scottrank_cli::server::{serve, ServeOptions};
use scottrank_cli::CliError;

#[derive(Parser)]
#[command(name = "scottrank", version, about = "Scott ranks and EF games on finite rational metric spaces")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
}

#[derive(Subcommand)]
enum Command {
    /// Scott rank, stabilization level, group order and ultrahomogeneity.
    Rank {
        file: PathBuf,
        /// List every map of finite rank.
        #[arg(long)]
        pairs: bool,
        /// Also print the supremum over all tuple pairs.
        #[arg(long)]
        literal_sup: bool,
    },
    /// Cross-check refinement, game tree and autoisometry extension.
    Check {
        #[arg(required_unless_present = "corpus")]
        file: Option<PathBuf>,
        /// Exhaustive corpus such as `n<=4,distances={1,2,3}`.
        #[arg(long, conflicts_with = "file")]
        corpus: Option<CorpusSpec>,
    },
    /// Solve or play an EF game.
    Game {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
        /// A natural number or `inf`.
        #[arg(long)]
        clock: Clock,
        /// Your side in interactive play.
        #[arg(long, value_enum, default_value = "I")]
        role: Role,
        #[arg(long)]
        interactive: bool,
    },
    /// Print a generated space in the text format.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Orbits of injective k-tuples under the autoisometry group.
    Orbits {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Ultrahomogeneity, with a non-extendable map when it fails.
    Hom { file: PathBuf },
    /// HTTP service for interactive play.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Seconds a session may sit idle before it is dropped.
        #[arg(long, default_value_t = 3600)]
        idle_timeout: u64,
        /// Directory for a session snapshot written on shutdown.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Option<String>, CliError> {
    let format = cli.format;
    let out = match cli.command {
        Command::Rank { file, pairs, literal_sup } => commands::rank(&read_space(&file)?, pairs, literal_sup, format)?,
        Command::Check { file: Some(file), .. } => commands::check(&read_space(&file)?, format)?,
        Command::Check { corpus: Some(spec), .. } => commands::check_corpus(&spec, format)?,
        Command::Check { .. } => unreachable!("clap requires a file or a corpus"),
        Command::Game { file, a, b, clock, role, interactive } => {
            let space = read_space(&file)?;
            let tuples = TuplePair::new(a, b)?;
            if interactive {
                let human = match role {
                    Role::One => Player::I,
                    Role::Two => Player::II,
                };
                let stdin = std::io::stdin();
                commands::interactive(&space, tuples, clock, human, &mut stdin.lock(), &mut std::io::stdout())?;
                return Ok(None);
            }
            commands::game(&space, tuples, clock, format)?
        }
        Command::Gen { kind } => commands::gen(&kind)?,
        Command::Orbits { file, k } => commands::orbit_list(&read_space(&file)?, k, format)?,
        Command::Hom { file } => commands::hom(&read_space(&file)?, format)?,
        Command::Serve { port, static_dir, idle_timeout, dump } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: "runtime".into(),
                source,
            })?;
            let opts = ServeOptions {
                port,
                static_dir,
                idle: Duration::from_secs(idle_timeout),
                dump,
            };
            runtime.block_on(serve(opts)).map_err(|source| CliError::Io {
                path: format!("port {port}"),
                source,
            })?;
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            if let Some(out) = out {
                print!("{out}");
                let _ = std::io::stdout().flush();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
