use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbiclust::explore::DEFAULT_CAP;
use orbiclust_cli::commands::{self, EnumerateOptions, Output};
use orbiclust_cli::error::CliError;
use orbiclust_cli::server;
use orbiclust_cli::session::{State, PROTOCOL};
use orbiclust_cli::workspace::WorkspaceFile;

#[derive(Parser)]
#[command(name = "orbiclust", version, about = "Cluster algebras of surfaces, orbifolds and group actions")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a workspace file.
    Validate { path: PathBuf },
    /// Apply a mutation sequence (1-based arc ids) and print the cluster.
    Mutate {
        path: PathBuf,
        /// Arc ids, or orbit ids with --orbits.
        #[arg(required = true, value_delimiter = ',')]
        sequence: Vec<usize>,
        /// Treat the sequence as orbit mutations of the workspace's action.
        #[arg(long)]
        orbits: bool,
    },
    /// Write the quotient orbifold as a workspace file.
    Quotient {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the exchange graph.
    Enumerate {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Key seeds by g-vectors, keeping exact variables within this depth.
        #[arg(long)]
        gvectors: Option<usize>,
        /// Census file: one canonical variable per line.
        #[arg(long)]
        census: Option<PathBuf>,
        /// Census of images under the orbit specialization.
        #[arg(long)]
        specialized_census: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value = "dot", value_parser = ["dot", "json"])]
        format: String,
    },
    /// Serve mutation sessions over HTTP on localhost.
    Serve {
        path: PathBuf,
        #[arg(long, default_value_t = 8765)]
        port: u16,
    },
    #[command(hide = true)]
    ExportFixtures { dir: PathBuf },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate { path } => commands::cmd_validate(path),
        Command::Mutate { path, sequence, orbits } => commands::cmd_mutate(path, sequence, *orbits),
        Command::Quotient { path, out } => commands::cmd_quotient(path, out.as_deref()),
        Command::Enumerate { path, cap, gvectors, census, specialized_census, graph, format } => {
            let opts = EnumerateOptions {
                cap: *cap,
                gvectors: *gvectors,
                census: census.clone(),
                specialized_census: specialized_census.clone(),
                graph: graph.clone(),
                format: format.clone(),
            };
            commands::cmd_enumerate(path, &opts)
        }
        Command::Serve { path, port } => {
            let state = State::from_workspace(&WorkspaceFile::load(path)?)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
            rt.block_on(async {
                let listener = server::bind(*port).await?;
                eprintln!("serving {} on http://{}", path.display(), listener.local_addr().expect("bound"));
                server::serve(listener, state).await
            })?;
            Ok(Output { text: String::new(), json: serde_json::Value::Null })
        }
        Command::ExportFixtures { dir } => commands::cmd_export_fixtures(dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) if cli.json => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            ExitCode::SUCCESS
        }
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                let body = serde_json::json!({
                    "protocol": PROTOCOL,
                    "exit_code": e.exit_code(),
                    "diagnostics": e.diagnostics(),
                });
                println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
