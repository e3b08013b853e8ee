//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 on a domain error, 2 on a usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use lexgraph_core::extract::AuthoritySet;
use lexgraph_core::graph::{ExportFormat, Stage};
use lexgraph_core::index::SearchMode;
use lexgraph_core::model::{Collection, ConnectionType};
use lexgraph_core::store::{backfill, ingest, Repository, SourceFixture, DEFAULT_PASS_LIMIT};
use serde::Serialize;

use crate::service::{parse_list, ApiConfig, GraphParams, SearchParams, Service};

#[derive(Debug, Parser)]
#[command(
    name = "lexgraph",
    version,
    about = "Legal document repository, search and citation graph"
)]
pub struct Cli {
    /// Repository directory (or a source fixture, for read commands).
    #[arg(long, global = true, env = "LEXGRAPH_CORPUS", default_value = ".")]
    pub corpus: PathBuf,
    /// Pseudo-Celex registry file [default: <corpus>/registry.tsv].
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    /// Lead-connection priority table, one type per line.
    #[arg(long, global = true)]
    pub priority: Option<PathBuf>,
    /// Synonym groups [default: <corpus>/synonyms.tsv].
    #[arg(long, global = true)]
    pub synonym_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest every document listed in a fixture manifest.
    Ingest { fixture: PathBuf },
    /// Fetch referenced documents missing from the repository.
    Backfill {
        #[arg(required = true)]
        fixtures: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PASS_LIMIT)]
        passes: usize,
    },
    /// Re-run extraction and resolution on stored documents (all by default).
    Extract {
        /// Authority lists [default: <corpus>/authorities].
        #[arg(long)]
        authorities: Option<PathBuf>,
        celex: Vec<String>,
    },
    /// Print a stored document as JSON.
    Show { celex: String },
    /// Print the reference table of a document as JSON.
    References { celex: String },
    /// Full-text search; terms, or one expression in expert mode.
    Search {
        /// exact-phrase, all-words, any-word, proximity or expert.
        #[arg(long, default_value = "all-words", value_parser = parse_value::<SearchMode>)]
        mode: SearchMode,
        /// Expand terms with their synonym groups.
        #[arg(long)]
        synonyms: bool,
        /// Largest token distance for proximity search.
        #[arg(long)]
        window: Option<usize>,
        #[arg(required = true)]
        terms: Vec<String>,
    },
    /// Citation network around a document's dossier.
    Graph {
        celex: String,
        /// star, cross or second.
        #[arg(long, default_value = "star", value_parser = parse_value::<Stage>)]
        stage: Stage,
        /// Comma-separated collections to keep.
        #[arg(long, value_parser = parse_set::<Collection>)]
        collections: Option<BTreeSet<Collection>>,
        /// Comma-separated lead connection types to keep.
        #[arg(long, value_parser = parse_set::<ConnectionType>)]
        edge_types: Option<BTreeSet<ConnectionType>>,
        /// json or dot.
        #[arg(long, default_value = "json", value_parser = parse_value::<ExportFormat>)]
        format: ExportFormat,
    },
    /// Print a document body with references marked up.
    Decorate { celex: String },
    /// Dossiers with the most incoming connections.
    Rank {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        top: u64,
        #[arg(long)]
        json: bool,
    },
    /// Serve the read-only HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: String,
        /// Append one line per request to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

fn parse_value<T: std::str::FromStr<Err = lexgraph_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: lexgraph_core::Error| e.to_string())
}

fn parse_set<T: std::str::FromStr<Err = lexgraph_core::Error> + Ord>(
    s: &str,
) -> Result<BTreeSet<T>, String> {
    parse_list(s).map_err(|e| e.to_string())
}

impl Cli {
    pub fn config(&self) -> ApiConfig {
        let mut cfg = ApiConfig::new(&self.corpus);
        if let Some(r) = &self.registry {
            cfg.registry_path = r.clone();
        }
        cfg.priority_table_path = self.priority.clone();
        cfg.synonyms_path = self.synonym_table.clone();
        cfg
    }

    fn open_repository(&self) -> lexgraph_core::Result<Repository> {
        Repository::open_with_registry(&self.corpus, self.config().registry_path)
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serializes")
}

#[derive(Serialize)]
struct ExtractReport {
    extracted: usize,
    resolved: usize,
    references: usize,
}

fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let line = |out: &mut dyn Write, s: &str| -> anyhow::Result<()> {
        out.write_all(s.as_bytes())?;
        if !s.ends_with('\n') {
            out.write_all(b"\n")?;
        }
        Ok(())
    };
    match &cli.command {
        Command::Ingest { fixture } => {
            let fixture = SourceFixture::open(fixture)?;
            let mut repo = cli.open_repository()?;
            let report = ingest(&fixture, &mut repo)?;
            line(out, &json(&report))
        }
        Command::Backfill { fixtures, passes } => {
            let sources = fixtures
                .iter()
                .map(SourceFixture::open)
                .collect::<Result<Vec<_>, _>>()?;
            let mut repo = cli.open_repository()?;
            let report = backfill(&mut repo, &sources, *passes)?;
            line(out, &json(&report))
        }
        Command::Extract { authorities, celex } => {
            let dir = authorities
                .clone()
                .unwrap_or_else(|| cli.corpus.join("authorities"));
            let auth = AuthoritySet::load(&dir)?;
            let mut repo = cli.open_repository()?;
            let targets: BTreeSet<String> = if celex.is_empty() {
                repo.documents().map(|d| d.celex().to_string()).collect()
            } else {
                for c in celex {
                    if repo.get(c).is_none() {
                        return Err(lexgraph_core::Error::UnknownDocument(c.clone()).into());
                    }
                }
                celex.iter().cloned().collect()
            };
            repo.extract(&targets, &auth);
            repo.resolve_all();
            repo.commit()?;
            let (resolved, references) = repo.snapshot().reference_counts();
            line(
                out,
                &json(&ExtractReport {
                    extracted: targets.len(),
                    resolved,
                    references,
                }),
            )
        }
        Command::Serve { listen, log } => {
            let mut cfg = cli.config();
            cfg.listen_address = listen.clone();
            cfg.log_path = log.clone();
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()?;
            rt.block_on(crate::server::serve(&cfg))
        }
        read => {
            let service = Service::load(&cli.config())?;
            let text = match read {
                Command::Show { celex } => service.document(celex)?,
                Command::References { celex } => service.references(celex)?,
                Command::Decorate { celex } => service.decorated(celex)?,
                Command::Search {
                    mode,
                    synonyms,
                    window,
                    terms,
                } => service.search(&SearchParams {
                    q: terms.join(" "),
                    mode: *mode,
                    synonyms: *synonyms,
                    window: *window,
                })?,
                Command::Graph {
                    celex,
                    stage,
                    collections,
                    edge_types,
                    format,
                } => service.graph(
                    celex,
                    &GraphParams {
                        stage: Some(*stage),
                        collections: collections.clone(),
                        edge_types: edge_types.clone(),
                    },
                    *format,
                )?,
                Command::Rank { top, json: true } => service.rank_json(*top as usize),
                Command::Rank { top, json: false } => service
                    .rank(*top as usize)
                    .iter()
                    .map(|(c, n)| format!("{c}\t{n}\n"))
                    .collect(),
                _ => unreachable!("write commands handled above"),
            };
            if text.is_empty() {
                return Ok(());
            }
            line(out, &text)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        // The reader went away, e.g. `lexgraph search ... | head`.
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
