use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgraph::spectrum::ModeChoice;
use qgraph::{fixtures, ParameterBinding};
use qgraph_cli::commands::{self, CliError, SpectrumRequest};
use qgraph_cli::{parse_k, parse_k_range};

#[derive(Parser)]
#[command(name = "qgraph", version, about = "Spectra of quantum graphs and spectrum-driven graph evolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Scan,
    Rational,
}

impl From<Mode> for ModeChoice {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => ModeChoice::Auto,
            Mode::Scan => ModeChoice::Scan,
            Mode::Rational => ModeChoice::Rational,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of a graph as CSV `k,multiplicity,lambda` (or JSON).
    Spectrum {
        /// Graph file, or `fixture:<name>`.
        graph: String,
        /// Upper end of the k range, e.g. `40` or `12pi`.
        #[arg(long, value_parser = parse_k)]
        k_max: Option<f64>,
        /// Number of eigenvalues (counted with multiplicity, including 0).
        #[arg(long, conflicts_with = "k_max")]
        count: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        /// Parameter values, e.g. `c1=3.14159265,c2=0.5`.
        #[arg(long, default_value = "")]
        bind: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples sigma_min and det of the secular matrix as CSV.
    PlotDk {
        graph: String,
        #[arg(long, default_value = "")]
        bind: String,
        /// `k0:k1:n`, e.g. `0:4pi:1000`.
        #[arg(long, value_parser = parse_k_range)]
        k_range: (f64, f64, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs an evolution config and writes the log into a directory.
    Evolve {
        config: PathBuf,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Runs built-in experiments (exp1 ... exp5, exp4-mixed, fig9).
    Experiments {
        /// Experiment names; all when empty.
        names: Vec<String>,
        #[arg(long, default_value = "experiment-runs")]
        out: PathBuf,
        /// Write the built-in configs as JSON into this directory and exit.
        #[arg(long)]
        export_configs: Option<PathBuf>,
    },
    /// Prints a named fixture as a graph file.
    Fixture { name: String },
    /// Serves the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Initial session graph (file or `fixture:<name>`).
        #[arg(long, default_value = "fixture:fig1")]
        graph: String,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => commands::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Spectrum { graph, k_max, count, mode, bind, json, out } => {
            let g = commands::load_graph(&graph)?;
            let req = SpectrumRequest { binding: ParameterBinding::parse(&bind)?, k_max, count, mode: mode.into() };
            let spec = commands::spectrum(&g, &req)?;
            emit(&commands::format_spectrum(&spec, json), out.as_ref())
        }
        Command::PlotDk { graph, bind, k_range: (k0, k1, n), out } => {
            let g = commands::load_graph(&graph)?;
            let csv = commands::plot_dk(&g, &ParameterBinding::parse(&bind)?, k0, k1, n)?;
            emit(&csv, out.as_ref())
        }
        Command::Evolve { config, out } => {
            let cfg = commands::load_config(&config)?;
            let name = cfg.name.clone().unwrap_or_else(|| config.display().to_string());
            let log = commands::evolve(cfg, &out)?;
            println!("{}", commands::run_summary(&name, &log));
            Ok(())
        }
        Command::Experiments { names, out, export_configs } => {
            if let Some(dir) = export_configs {
                for path in commands::export_configs(&dir)? {
                    println!("{}", path.display());
                }
                return Ok(());
            }
            let names: Vec<String> = if names.is_empty() {
                qgraph::evolution::experiments::NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                names
            };
            for name in &names {
                let cfg = commands::experiment_config(name)?;
                let label = cfg.name.clone().unwrap_or_else(|| name.clone());
                let log = commands::evolve(cfg, &out.join(&label))?;
                println!("{}", commands::run_summary(&label, &log));
            }
            Ok(())
        }
        Command::Fixture { name } => {
            let g = fixtures::by_name(&name).ok_or_else(|| CliError::Invalid(format!("unknown fixture {name:?}")))?;
            println!("{}", qgraph::io::graph_to_json_pretty(&g));
            Ok(())
        }
        Command::Serve { host, port, graph } => {
            let g = commands::load_graph(&graph)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Failed(e.to_string()))?;
            let session = qgraph_cli::server::new_session(g);
            rt.block_on(qgraph_cli::server::serve(&host, port, session)).map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    qgraph_cli::init_threads();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
