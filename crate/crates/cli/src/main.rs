//! `gridkg`: ingest sources, relate them to the grid, export, query,
//! validate and serve the resulting graph.
//!
//! Exit codes: 0 ok, 1 usage, 2 data error, 3 validation failure.

use std::io::{Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridkg_core::fixture;
use gridkg_core::ingest::{base_graph, build_graph, load_run, relate_graph, RunConfig};
use gridkg_core::kgmodel::{ns, serialize_ntriples, serialize_turtle, Triple};
use gridkg_core::query::run_query;
use gridkg_core::store::Store;
use gridkg_core::validate::{report_json, report_text, validate, ShapeSpec};
use gridkg_service::{AppState, GraphSource, LoadError};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0} violation(s)")]
    Invalid(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => CliError::Usage(e.to_string()),
            other => data(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gridkg", version, about = "Grid-aligned knowledge graph pipeline and briefing service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Nt,
    Ttl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Results {
    Tsv,
    Json,
}

/// Where a command reads its graph from.
#[derive(Debug, Args)]
struct GraphArgs {
    /// N-Triples graph file.
    #[arg(long, env = "GRIDKG_GRAPH")]
    graph: Option<PathBuf>,
    /// Run config; the graph is built from its sources.
    #[arg(long, env = "GRIDKG_CONFIG")]
    config: Option<PathBuf>,
    /// Integration level, overriding the config and each dataset.
    #[arg(long, env = "GRIDKG_LEVEL")]
    level: Option<u8>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file, `-` for stdout. Defaults to stdout, except that `export
    /// --config` falls back to the config's `output`.
    #[arg(long, env = "GRIDKG_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "GRIDKG_FORMAT", value_enum, default_value = "nt")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest every source of a run config, without spatial relations.
    /// Writes to --out or stdout; the config's `output` names the final graph.
    Ingest {
        #[arg(long, env = "GRIDKG_CONFIG")]
        config: PathBuf,
        #[arg(long, env = "GRIDKG_LEVEL")]
        level: Option<u8>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Add grid alignment and feature relations to an ingested graph.
    Relate {
        /// Ingested N-Triples graph.
        #[arg(long, env = "GRIDKG_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "GRIDKG_LEVEL", default_value_t = fixture::LEVEL)]
        level: u8,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a graph as N-Triples or Turtle.
    Export {
        #[command(flatten)]
        input: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Load a graph and print a summary.
    Load {
        #[command(flatten)]
        input: GraphArgs,
    },
    /// Run a query read from a file, or stdin when the file is `-` or absent.
    Query {
        #[command(flatten)]
        input: GraphArgs,
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "tsv")]
        results: Results,
    },
    /// Check a graph against shapes; exits 3 on violations.
    Validate {
        #[command(flatten)]
        input: GraphArgs,
        /// Shape document; defaults to the bundled shapes.
        #[arg(long)]
        shapes: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP endpoint.
    Serve {
        #[command(flatten)]
        input: GraphArgs,
        /// Serve the built-in fixture.
        #[arg(long, conflicts_with_all = ["graph", "config"])]
        demo: bool,
        #[arg(long, env = "GRIDKG_PORT")]
        port: Option<u16>,
        #[arg(long, env = "GRIDKG_HOST", default_value = "127.0.0.1")]
        host: IpAddr,
        /// Allowed browser origin; any origin when unset.
        #[arg(long, env = "GRIDKG_CORS_ORIGIN")]
        cors_origin: Option<String>,
    },
    /// Run the example query on the built-in fixture.
    Demo {
        /// Write the fixture's source files and run config to this directory.
        #[arg(long)]
        write_fixture: Option<PathBuf>,
    },
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run_config(path: &Path) -> Result<RunConfig, CliError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource, CliError> {
        match (&self.graph, &self.config) {
            (Some(g), _) => {
                if g.extension().is_some_and(|e| e == "ttl") {
                    return Err(CliError::Usage("only N-Triples graphs can be loaded; export with --format nt".into()));
                }
                Ok(GraphSource::NTriples(g.clone()))
            }
            (None, Some(c)) => {
                run_config(c)?;
                Ok(GraphSource::Run { config: c.clone(), level: self.level })
            }
            (None, None) => Err(CliError::Usage("give --graph or --config (or GRIDKG_GRAPH / GRIDKG_CONFIG)".into())),
        }
    }

    fn store(&self) -> Result<Store, CliError> {
        Ok(self.source()?.load()?)
    }

    /// The config's `output` and `port` entries, when reading from a config.
    fn config_file(&self) -> Result<Option<RunConfig>, CliError> {
        self.config.as_deref().map(run_config).transpose()
    }
}

fn render(triples: &[Triple], format: Format) -> String {
    match format {
        Format::Nt => serialize_ntriples(triples),
        Format::Ttl => serialize_turtle(triples, &ns::PREFIXES),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out.filter(|p| *p != Path::new("-")) {
        Some(path) => std::fs::write(path, text).map_err(|e| data(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(data),
    }
}

fn output_path(flag: &Option<PathBuf>, cfg: Option<&RunConfig>, base: &Path) -> Option<PathBuf> {
    flag.clone().or_else(|| cfg.and_then(|c| c.output.as_ref()).map(|o| base.join(o)))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { config, level, out } => {
            let cfg = run_config(&config)?;
            let base = base_dir(&config);
            let outputs = load_run(&cfg, &base, level).map_err(data)?;
            let triples = base_graph(&outputs, &cfg.themes).map_err(data)?;
            emit(&render(&triples, out.format), out.out.as_deref())
        }
        Command::Relate { graph, level, out } => {
            let store = GraphSource::NTriples(graph).load()?;
            let triples = relate_graph(&store, level).map_err(data)?;
            emit(&render(&triples, out.format), out.out.as_deref())
        }
        Command::Export { input, out } => {
            let triples: Vec<Triple> = match (&input.graph, &input.config) {
                (None, Some(c)) => {
                    let cfg = run_config(c)?;
                    let outputs = load_run(&cfg, &base_dir(c), input.level).map_err(data)?;
                    build_graph(&outputs, &cfg.themes).map_err(data)?
                }
                _ => input.store()?.iter().collect(),
            };
            let cfg = input.config_file()?;
            let base = input.config.as_deref().map(base_dir).unwrap_or_default();
            emit(&render(&triples, out.format), output_path(&out.out, cfg.as_ref(), &base).as_deref())
        }
        Command::Load { input } => {
            let store = input.store()?;
            let summary = serde_json::json!({
                "triples": store.len(),
                "terms": store.dictionary().len(),
                "datasets": gridkg_core::briefing::datasets(&store).iter().map(|d| &d.iri).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&summary).map_err(data)?);
            Ok(())
        }
        Command::Query { input, file, results } => {
            let text = match file.as_deref() {
                Some(p) if p != Path::new("-") => read_file(p)?,
                _ => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(e.to_string()))?;
                    s
                }
            };
            let store = input.store()?;
            let r = run_query(&text, &store).map_err(|e| CliError::Usage(format!("query: {e}")))?;
            let body = match results {
                Results::Tsv => r.to_tsv(),
                Results::Json => format!("{}\n", serde_json::to_string_pretty(&r.to_json()).map_err(data)?),
            };
            emit(&body, None)
        }
        Command::Validate { input, shapes, json } => {
            let shapes = match shapes {
                Some(p) => ShapeSpec::parse_document(&read_file(&p)?).map_err(data)?,
                None => ShapeSpec::bundled(),
            };
            let violations = validate(&input.store()?, &shapes);
            if json {
                println!("{}", serde_json::to_string_pretty(&report_json(&violations)).map_err(data)?);
            } else {
                print!("{}", report_text(&violations));
            }
            match violations.len() {
                0 => Ok(()),
                n => Err(CliError::Invalid(n)),
            }
        }
        Command::Serve { input, demo, port, host, cors_origin } => {
            let source = if demo { GraphSource::Fixture } else { input.source()? };
            let port = port.or(input.config_file()?.and_then(|c| c.port)).unwrap_or(8080);
            let state = AppState::from_source(source)?;
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .init();
            let rt = tokio::runtime::Runtime::new().map_err(data)?;
            rt.block_on(gridkg_service::serve(state, SocketAddr::new(host, port), cors_origin.as_deref())).map_err(data)
        }
        Command::Demo { write_fixture } => {
            if let Some(dir) = write_fixture {
                let run = fixture::write(&dir).map_err(data)?;
                println!("{}", run.display());
                return Ok(());
            }
            let store = fixture::store().map_err(data)?;
            let r = run_query(fixture::EXAMPLE_QUERY, &store).map_err(data)?;
            emit(&r.to_tsv(), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gridkg: {e}");
            ExitCode::from(e.code())
        }
    }
}
