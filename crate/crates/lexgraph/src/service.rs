//! Read operations over one loaded repository. Both the CLI and the HTTP
//! handlers render their output through these methods, so the two always
//! produce the same bytes for the same parameters.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lexgraph_core::decorate::decorate;
use lexgraph_core::graph::{
    export_view, filter_view, CitationGraph, ExportFormat, PriorityTable, Stage,
};
use lexgraph_core::index::{parse_expression, Index, IndexHandle, Query, SearchMode, SynonymSet};
use lexgraph_core::model::{Collection, ConnectionType, DocRef};
use lexgraph_core::store::{ingest, ReadSnapshot, Repository, SourceFixture};
use lexgraph_core::textnorm::{SuffixStemmer, SuffixTable};
use lexgraph_core::{Error, Result};
use serde::Serialize;

/// Where the service reads its data from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiConfig {
    pub listen_address: String,
    /// A repository directory, or a source fixture with a `manifest.tsv`
    /// that is ingested in memory at startup.
    pub corpus_dir: PathBuf,
    pub registry_path: PathBuf,
    pub priority_table_path: Option<PathBuf>,
    pub log_path: Option<PathBuf>,
    /// Defaults to `synonyms.tsv` inside `corpus_dir` when present.
    pub synonyms_path: Option<PathBuf>,
}

impl ApiConfig {
    pub fn new(corpus_dir: impl Into<PathBuf>) -> Self {
        let corpus_dir = corpus_dir.into();
        ApiConfig {
            listen_address: "127.0.0.1:8080".into(),
            registry_path: corpus_dir.join("registry.tsv"),
            corpus_dir,
            priority_table_path: None,
            log_path: None,
            synonyms_path: None,
        }
    }
}

pub fn is_repository(dir: &Path) -> bool {
    dir.join("index.tsv").is_file()
}

/// Opens the repository at `cfg.corpus_dir`, or ingests the fixture found
/// there into memory.
pub fn load_repository(cfg: &ApiConfig) -> Result<Repository> {
    let dir = &cfg.corpus_dir;
    if is_repository(dir) {
        return Repository::open_with_registry(dir, &cfg.registry_path);
    }
    if dir.join("manifest.tsv").is_file() {
        let fixture = SourceFixture::open(dir)?;
        let mut repo = Repository::in_memory();
        ingest(&fixture, &mut repo)?;
        return Ok(repo);
    }
    Err(Error::Fixture {
        path: dir.clone(),
        line: 0,
        message: "neither a repository (index.tsv) nor a source fixture (manifest.tsv)".into(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphParams {
    pub stage: Option<Stage>,
    pub collections: Option<BTreeSet<Collection>>,
    pub edge_types: Option<BTreeSet<ConnectionType>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    pub q: String,
    pub mode: SearchMode,
    pub synonyms: bool,
    pub window: Option<usize>,
}

/// Comma-separated list of values; empty items are skipped, so an empty
/// string is the empty set.
pub fn parse_list<T: std::str::FromStr<Err = Error> + Ord>(s: &str) -> Result<BTreeSet<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Serialize)]
struct ReferenceTable<'a> {
    celex: &'a str,
    references: &'a [DocRef],
}

#[derive(Serialize)]
struct SearchOutput<'a> {
    mode: SearchMode,
    total: usize,
    hits: &'a [lexgraph_core::index::Hit],
}

#[derive(Serialize)]
struct RankRow<'a> {
    celex: &'a str,
    indegree: usize,
}

pub struct Service {
    snapshot: ReadSnapshot,
    graph: CitationGraph,
    index: IndexHandle,
    synonyms: SynonymSet,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("payload serializes")
}

impl Service {
    pub fn new(snapshot: ReadSnapshot, priority: &PriorityTable, synonyms: SynonymSet) -> Self {
        let graph = CitationGraph::build(&snapshot, priority);
        let stemmer = Arc::new(SuffixStemmer::new(SuffixTable::default()));
        let index = IndexHandle::new(Index::build(snapshot.documents(), stemmer));
        Service {
            snapshot,
            graph,
            index,
            synonyms,
        }
    }

    pub fn load(cfg: &ApiConfig) -> Result<Self> {
        let repo = load_repository(cfg)?;
        let priority = match &cfg.priority_table_path {
            Some(p) => PriorityTable::load(p)?,
            None => PriorityTable::default(),
        };
        let synonyms_path = cfg
            .synonyms_path
            .clone()
            .unwrap_or_else(|| cfg.corpus_dir.join("synonyms.tsv"));
        let synonyms = SynonymSet::load(&synonyms_path)?;
        Ok(Self::new(repo.snapshot(), &priority, synonyms))
    }

    pub fn snapshot(&self) -> &ReadSnapshot {
        &self.snapshot
    }

    pub fn graph_model(&self) -> &CitationGraph {
        &self.graph
    }

    fn doc(&self, celex: &str) -> Result<&lexgraph_core::model::DocumentRecord> {
        self.snapshot
            .get(celex)
            .ok_or_else(|| Error::UnknownDocument(celex.to_string()))
    }

    pub fn document(&self, celex: &str) -> Result<String> {
        Ok(to_json(self.doc(celex)?))
    }

    pub fn decorated(&self, celex: &str) -> Result<String> {
        Ok(decorate(self.doc(celex)?, &self.snapshot, &self.graph).markup)
    }

    pub fn references(&self, celex: &str) -> Result<String> {
        let d = self.doc(celex)?;
        Ok(to_json(&ReferenceTable {
            celex: d.celex(),
            references: &d.references,
        }))
    }

    pub fn graph(&self, celex: &str, p: &GraphParams, format: ExportFormat) -> Result<String> {
        let mut view = self
            .graph
            .neighborhood(celex, p.stage.unwrap_or(Stage::Star))?;
        if p.collections.is_some() || p.edge_types.is_some() {
            let all_c = Collection::ALL.into_iter().collect();
            let all_t = ConnectionType::ALL.into_iter().collect();
            view = filter_view(
                &view,
                p.collections.as_ref().unwrap_or(&all_c),
                p.edge_types.as_ref().unwrap_or(&all_t),
            );
        }
        Ok(export_view(&view, format))
    }

    pub fn query(p: &SearchParams) -> Result<Query> {
        if p.q.trim().is_empty() {
            return Err(Error::EmptyQuery);
        }
        let mut q = if p.mode == SearchMode::Expert {
            Query::expert(parse_expression(&p.q)?)
        } else {
            let terms: Vec<&str> = p.q.split_whitespace().collect();
            Query::new(p.mode, &terms)
        };
        q.use_synonyms = p.synonyms;
        q.proximity_window = p.window;
        Ok(q)
    }

    pub fn search(&self, p: &SearchParams) -> Result<String> {
        let q = Self::query(p)?;
        let hits = self.index.current().search(&q, &self.synonyms)?;
        Ok(to_json(&SearchOutput {
            mode: p.mode,
            total: hits.len(),
            hits: &hits,
        }))
    }

    pub fn rank(&self, top: usize) -> Vec<(String, usize)> {
        self.graph.indegree_ranking(top)
    }

    pub fn rank_json(&self, top: usize) -> String {
        let ranking = self.rank(top);
        let rows: Vec<RankRow> = ranking
            .iter()
            .map(|(c, n)| RankRow {
                celex: c,
                indegree: *n,
            })
            .collect();
        to_json(&rows)
    }
}
