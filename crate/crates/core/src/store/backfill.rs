//! Fetching referenced-but-missing documents from the source directories.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use chrono::Datelike;
use serde::Serialize;

use super::source::{read_source_file, scan_sources, RawDocument, Source};
use super::{IngestFailure, Repository, SourceFixture, Upsert};
use crate::error::Result;
use crate::extract::{is_resolvable, AuthoritySet};
use crate::identifiers::{
    canonical_ab_number, canonical_hu_decision, celex_for_case_document, parse_celex, parse_ecli,
    CaseDocType, EuCaseNumber,
};
use crate::model::RefKey;

/// Passes over the repository before backfill gives up on transitive
/// references.
pub const DEFAULT_PASS_LIMIT: usize = 3;

/// Identifiers waiting to be searched for. An identifier is queued at most
/// once per run.
#[derive(Debug, Default, Clone)]
pub struct BackfillQueue {
    pending: BTreeSet<RefKey>,
    attempted: HashSet<RefKey>,
}

impl BackfillQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Queues `key` unless it is pending or was already tried.
    pub fn push(&mut self, key: RefKey) -> bool {
        !self.attempted.contains(&key) && self.pending.insert(key)
    }

    /// Takes the next identifier and marks it attempted.
    pub fn pop(&mut self) -> Option<RefKey> {
        let key = self.pending.pop_first()?;
        self.attempted.insert(key.clone());
        Some(key)
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn pending(&self) -> impl Iterator<Item = &RefKey> {
        self.pending.iter()
    }

    pub fn was_attempted(&self, key: &RefKey) -> bool {
        self.attempted.contains(key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackfillReport {
    pub passes: usize,
    pub before_ratio: f64,
    pub after_ratio: f64,
    pub resolved_before: usize,
    pub resolved_after: usize,
    pub total_before: usize,
    pub total_after: usize,
    /// Celex of every document fetched, in fetch order.
    pub fetched: Vec<String>,
    /// Distinct identifiers still unresolved.
    pub unresolved: Vec<RefKey>,
    /// True when the pass limit stopped the run with identifiers left to try.
    pub exhausted: bool,
    pub failures: Vec<IngestFailure>,
}

/// Every source file of the fixtures, indexed by the identifiers it could
/// satisfy.
struct Catalog {
    files: Vec<(Source, PathBuf)>,
    by_key: HashMap<RefKey, Vec<usize>>,
}

impl Catalog {
    fn build(sources: &[SourceFixture], auth: &AuthoritySet) -> Result<Self> {
        let mut files = Vec::new();
        let mut by_key: HashMap<RefKey, Vec<usize>> = HashMap::new();
        for fixture in sources {
            for (source, path) in scan_sources(&fixture.root)? {
                // Unreadable files are reported when (and if) they are needed.
                let Ok(raw) = read_source_file(source, &path) else {
                    continue;
                };
                let i = files.len();
                files.push((source, path));
                for key in keys_of(&raw, auth) {
                    by_key.entry(key).or_default().push(i);
                }
            }
        }
        Ok(Catalog { files, by_key })
    }

    fn lookup(&self, key: &RefKey) -> &[usize] {
        self.by_key.get(key).map_or(&[], Vec::as_slice)
    }
}

fn keys_of(raw: &RawDocument, auth: &AuthoritySet) -> Vec<RefKey> {
    let mut keys = Vec::new();
    if let Some(c) = raw.celex.as_deref().and_then(|c| parse_celex(c).ok()) {
        keys.push(RefKey::Celex {
            celex: c.to_string(),
        });
    }
    if let Some(e) = raw.ecli.as_deref().and_then(|e| parse_ecli(e).ok()) {
        keys.push(RefKey::Ecli {
            ecli: e.to_string().to_ascii_uppercase(),
        });
    }
    let Some(number) = raw.case_number.as_deref() else {
        return keys;
    };
    match raw.source {
        Source::Eurlex | Source::Curia => {
            if let Ok(lead) = EuCaseNumber::parse_joined(number) {
                if raw.celex.is_none() {
                    if let Some(date) = raw.date {
                        let doc_type = raw
                            .doc_type
                            .as_deref()
                            .and_then(|t| t.parse().ok())
                            .unwrap_or(CaseDocType::Judgment);
                        let celex = celex_for_case_document(&lead, date.year() as u16, doc_type);
                        keys.push(RefKey::Celex {
                            celex: celex.to_string(),
                        });
                    }
                }
                keys.push(RefKey::EuCase {
                    case_number: lead.to_string(),
                });
                keys.extend(lead.joined_with.iter().map(|n| RefKey::EuCase {
                    case_number: n.to_string(),
                }));
            }
        }
        Source::Ab => {
            if let Some(n) = canonical_ab_number(number) {
                keys.push(RefKey::AbDecision { number: n });
            }
        }
        Source::Obh => {
            if let (Some(n), Some(court)) = (canonical_hu_decision(number), raw.court.as_deref()) {
                let court = auth
                    .normalize_court(court)
                    .map_or_else(|| court.trim().to_string(), |c| c.name);
                keys.push(RefKey::HuDecision {
                    court: Some(court),
                    number: n,
                });
            }
        }
    }
    keys
}

fn unresolved_keys(repo: &Repository) -> BTreeSet<RefKey> {
    repo.documents()
        .flat_map(|d| &d.references)
        .filter(|r| !r.resolved && is_resolvable(r))
        .map(|r| r.key.clone())
        .collect()
}

/// Searches the source directories for every unresolved reference target,
/// ingests and extracts what it finds, and repeats for references the new
/// documents introduce, up to `pass_limit` passes. Extraction uses the
/// authority lists of the first fixture.
pub fn backfill(
    repo: &mut Repository,
    sources: &[SourceFixture],
    pass_limit: usize,
) -> Result<BackfillReport> {
    let auth = sources
        .first()
        .map(|s| s.authorities.clone())
        .unwrap_or_default();
    let before = repo.snapshot();
    let (resolved_before, total_before) = before.reference_counts();
    let before_ratio = before.resolved_ratio();
    drop(before);

    let catalog = Catalog::build(sources, &auth)?;
    let mut queue = BackfillQueue::new();
    let mut loaded: HashSet<usize> = HashSet::new();
    let mut fetched = Vec::new();
    let mut failures = Vec::new();
    let mut passes = 0;

    while passes < pass_limit {
        for key in unresolved_keys(repo) {
            queue.push(key);
        }
        if queue.is_empty() {
            break;
        }
        passes += 1;
        let mut changed = BTreeSet::new();
        while let Some(key) = queue.pop() {
            for &i in catalog.lookup(&key) {
                if !loaded.insert(i) {
                    continue;
                }
                let (source, path) = &catalog.files[i];
                match repo.ingest_file(*source, path, None, &auth) {
                    Ok((celex, Upsert::Added | Upsert::Updated)) => {
                        fetched.push(celex.clone());
                        changed.insert(celex);
                    }
                    Ok((_, Upsert::Unchanged)) => {}
                    Err(e) => failures.push(IngestFailure {
                        path: path.clone(),
                        message: e.to_string(),
                    }),
                }
            }
        }
        repo.extract(&changed, &auth);
        repo.resolve_all();
    }

    let remaining = unresolved_keys(repo);
    let exhausted = remaining.iter().any(|k| !queue.was_attempted(k));
    repo.commit()?;
    let after = repo.snapshot();
    let (resolved_after, total_after) = after.reference_counts();
    Ok(BackfillReport {
        passes,
        before_ratio,
        after_ratio: after.resolved_ratio(),
        resolved_before,
        resolved_after,
        total_before,
        total_after,
        fetched,
        unresolved: remaining.into_iter().collect(),
        exhausted,
        failures,
    })
}
