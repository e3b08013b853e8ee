//! File-backed document repository: ingestion of source fixtures, identifier
//! assignment, persistence, read snapshots and missing-reference backfill.

mod backfill;
pub mod source;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Datelike;
use serde::Serialize;

pub use backfill::{backfill, BackfillQueue, BackfillReport, DEFAULT_PASS_LIMIT};
pub use source::{ManifestEntry, RawDocument, Source};

use crate::error::{Error, Result};
use crate::extract::{self, AuthoritySet, Resolver};
use crate::identifiers::{
    canonical_ab_number, canonical_hu_decision, celex_for_case_document, parse_celex, pseudo_celex,
    CaseDocType, CelexParts, EuCaseNumber, SerialRegistry,
};
use crate::model::{Collection, DocId, DocRef, DocumentRecord, RefKey, RefKind};

/// Metadata key listing every case number of a joined case, `;`-separated.
pub const JOINED_CASES: &str = "joined_cases";
/// Metadata key naming the act a legislative document belongs to.
pub const BASE_ACT: &str = "base_act";
/// Metadata key for the Curia document type.
pub const DOC_TYPE: &str = "doc_type";

/// A fixture directory: `manifest.tsv`, source files, and an `authorities/`
/// directory with the name lists used by extraction.
#[derive(Debug, Clone)]
pub struct SourceFixture {
    pub root: PathBuf,
    pub manifest: Vec<ManifestEntry>,
    pub authorities: AuthoritySet,
}

impl SourceFixture {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        if !root.is_dir() {
            return Err(Error::io(
                &root,
                std::io::Error::new(std::io::ErrorKind::NotFound, "fixture directory not found"),
            ));
        }
        let manifest_path = root.join("manifest.tsv");
        let manifest = match std::fs::read_to_string(&manifest_path) {
            Ok(text) => source::parse_manifest(&text, &manifest_path)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(&manifest_path, e)),
        };
        for entry in &manifest {
            let path = root.join(&entry.relative_path);
            if !path.is_file() {
                return Err(Error::Fixture {
                    path: manifest_path.clone(),
                    line: 0,
                    message: format!(
                        "listed file {} does not exist",
                        entry.relative_path.display()
                    ),
                });
            }
        }
        let authorities = AuthoritySet::load(&root.join("authorities"))?;
        Ok(SourceFixture {
            root,
            manifest,
            authorities,
        })
    }
}

fn collection_from_celex(celex: &str) -> Option<Collection> {
    match parse_celex(celex).ok()?.sector {
        1 => Some(Collection::EuTreaty),
        3 => Some(Collection::EuLegislation),
        6 => Some(Collection::EuCaselaw),
        _ => None,
    }
}

fn fixture_error(raw: &RawDocument, message: impl Into<String>) -> Error {
    Error::Fixture {
        path: raw.path.clone(),
        line: 0,
        message: message.into(),
    }
}

/// Normalizes a parsed source document and assigns its identifiers: the
/// source Celex when present, a generated case Celex for Curia documents,
/// or a registered pseudo-Celex for Hungarian documents.
pub fn build_record(
    raw: RawDocument,
    entry: Option<&ManifestEntry>,
    auth: &AuthoritySet,
    registry: &mut SerialRegistry,
) -> Result<DocumentRecord> {
    let celex = raw
        .celex
        .as_deref()
        .map(|c| parse_celex(c).map(|p| p.to_string()))
        .transpose()?;
    let collection = entry
        .and_then(|e| e.collection)
        .or(raw.collection)
        .or_else(|| celex.as_deref().and_then(collection_from_celex))
        .unwrap_or_else(|| raw.source.default_collection());
    let language = entry
        .and_then(|e| e.language.clone())
        .or_else(|| raw.language.clone())
        .unwrap_or_else(|| {
            if matches!(raw.source, Source::Ab | Source::Obh) {
                "hu"
            } else {
                "en"
            }
            .to_string()
        })
        .to_ascii_lowercase();
    let date = entry
        .and_then(|e| e.date)
        .or(raw.date)
        .ok_or_else(|| fixture_error(&raw, "no publication date"))?;
    if raw.body.trim().is_empty() {
        return Err(fixture_error(&raw, "empty body"));
    }
    let court = raw.court.as_deref().map(|c| {
        auth.normalize_court(c)
            .map_or_else(|| c.trim().to_string(), |c| c.name)
    });

    let mut metadata = raw.metadata.clone();
    let mut case_lead = None;
    let case_number = match (collection, raw.case_number.as_deref()) {
        (_, None) => None,
        (Collection::EuCaselaw, Some(n)) => {
            let lead = EuCaseNumber::parse_joined(n)?;
            if !lead.joined_with.is_empty() {
                let mut all = vec![lead.to_string()];
                all.extend(lead.joined_with.iter().map(ToString::to_string));
                metadata.insert(JOINED_CASES.to_string(), all.join(";"));
            }
            case_lead = Some(lead.clone());
            Some(lead.to_string())
        }
        (Collection::HuObh, Some(n)) => {
            Some(canonical_hu_decision(n).ok_or_else(|| Error::malformed("hu decision", n))?)
        }
        (Collection::HuAb, Some(n)) => {
            Some(canonical_ab_number(n).ok_or_else(|| Error::malformed("ab decision", n))?)
        }
        (_, Some(n)) => Some(n.trim().to_string()),
    };
    if let Some(t) = &raw.doc_type {
        metadata.insert(DOC_TYPE.to_string(), t.to_ascii_lowercase());
    }

    let derived_native = match (collection, &court, &case_number) {
        (Collection::HuObh, Some(court), Some(number)) => Some(format!("{court}|{number}")),
        (Collection::HuAb, _, Some(number)) => Some(number.clone()),
        (Collection::EuCaselaw, _, Some(number)) if celex.is_none() => Some(match &raw.ecli {
            Some(e) => e.clone(),
            None => format!(
                "{number}|{}|{date}",
                raw.doc_type.as_deref().unwrap_or("judgment")
            ),
        }),
        _ => None,
    };
    let native_id = derived_native
        .or_else(|| raw.native_id.clone())
        .or_else(|| entry.and_then(|e| e.native_id.clone()));

    let mut doc = DocumentRecord {
        id: DocId {
            celex: celex.clone().unwrap_or_default(),
            ecli: raw
                .ecli
                .as_deref()
                .map(|e| crate::identifiers::parse_ecli(e).map(|x| x.to_string()))
                .transpose()?,
            native_id,
            source_guid: raw.guid.clone(),
        },
        collection,
        language,
        title: raw.title.clone(),
        body: raw.body.clone(),
        publication_date: date,
        case_number,
        court,
        metadata,
        references: Vec::new(),
        entities: Vec::new(),
        aliases: Vec::new(),
        acronyms: Vec::new(),
    };
    if doc.id.celex.is_empty() {
        let parts: CelexParts = match collection {
            Collection::EuCaselaw => {
                let lead = case_lead.ok_or_else(|| {
                    fixture_error(&raw, "case-law document without Celex or case number")
                })?;
                let doc_type = raw
                    .doc_type
                    .as_deref()
                    .map(str::parse)
                    .transpose()?
                    .unwrap_or(CaseDocType::Judgment);
                celex_for_case_document(&lead, date.year() as u16, doc_type)
            }
            Collection::HuAb | Collection::HuObh => pseudo_celex(&doc, registry)?,
            _ => return Err(fixture_error(&raw, "no Celex and none can be generated")),
        };
        doc.id.celex = parts.to_string();
    }
    if doc.title.is_empty() {
        doc.title = doc
            .case_number
            .clone()
            .unwrap_or_else(|| doc.id.celex.clone());
    }
    Ok(doc)
}

/// A file that could not be ingested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestFailure {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub ingested: usize,
    pub updated: usize,
    pub unchanged: usize,
    pub failed: usize,
    pub failures: Vec<IngestFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upsert {
    Added,
    Updated,
    Unchanged,
}

/// Lookup tables over one immutable set of documents.
#[derive(Debug)]
struct SnapshotData {
    docs: BTreeMap<String, DocumentRecord>,
    by_ecli: HashMap<String, String>,
    by_hu_decision: HashMap<(String, String), String>,
    by_case: BTreeMap<String, Vec<String>>,
    by_ab: BTreeMap<String, Vec<String>>,
}

/// Immutable point-in-time view of the repository. Cheap to clone.
#[derive(Debug, Clone)]
pub struct ReadSnapshot {
    data: Arc<SnapshotData>,
}

impl PartialEq for ReadSnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.data.docs == other.data.docs
    }
}

impl ReadSnapshot {
    pub fn new(docs: BTreeMap<String, DocumentRecord>) -> Self {
        let mut by_ecli = HashMap::new();
        let mut by_hu_decision = HashMap::new();
        let mut by_case: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut by_ab: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (celex, d) in &docs {
            if let Some(e) = &d.id.ecli {
                by_ecli.insert(e.to_ascii_uppercase(), celex.clone());
            }
            let Some(number) = &d.case_number else {
                continue;
            };
            match d.collection {
                Collection::HuObh => {
                    if let Some(court) = &d.court {
                        by_hu_decision.insert((court.clone(), number.clone()), celex.clone());
                    }
                }
                Collection::HuAb => by_ab.entry(number.clone()).or_default().push(celex.clone()),
                Collection::EuCaselaw => {
                    let mut numbers = vec![number.clone()];
                    if let Some(joined) = d.metadata.get(JOINED_CASES) {
                        numbers.extend(joined.split(';').map(|s| s.trim().to_string()));
                    }
                    numbers.sort();
                    numbers.dedup();
                    for n in numbers {
                        by_case.entry(n).or_default().push(celex.clone());
                    }
                }
                _ => {}
            }
        }
        ReadSnapshot {
            data: Arc::new(SnapshotData {
                docs,
                by_ecli,
                by_hu_decision,
                by_case,
                by_ab,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.data.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.docs.is_empty()
    }

    pub fn get(&self, celex: &str) -> Option<&DocumentRecord> {
        self.data.docs.get(celex)
    }

    pub fn contains(&self, celex: &str) -> bool {
        self.data.docs.contains_key(celex)
    }

    /// All documents in Celex order.
    pub fn documents(&self) -> impl Iterator<Item = &DocumentRecord> {
        self.data.docs.values()
    }

    pub fn by_ecli(&self, ecli: &str) -> Option<&DocumentRecord> {
        self.data
            .by_ecli
            .get(&ecli.to_ascii_uppercase())
            .and_then(|c| self.get(c))
    }

    pub fn by_hu_decision(&self, court: &str, number: &str) -> Option<&DocumentRecord> {
        self.data
            .by_hu_decision
            .get(&(court.to_string(), number.to_string()))
            .and_then(|c| self.get(c))
    }

    /// Documents of an EU case, including joined cases listing it.
    pub fn by_case_number(&self, case_number: &str) -> Vec<&DocumentRecord> {
        self.data
            .by_case
            .get(case_number)
            .map(|v| v.iter().filter_map(|c| self.get(c)).collect())
            .unwrap_or_default()
    }

    pub fn by_ab_number(&self, number: &str) -> Vec<&DocumentRecord> {
        self.data
            .by_ab
            .get(number)
            .map(|v| v.iter().filter_map(|c| self.get(c)).collect())
            .unwrap_or_default()
    }

    /// (resolved, total) over every reference in the repository.
    pub fn reference_counts(&self) -> (usize, usize) {
        self.documents()
            .flat_map(|d| &d.references)
            .fold((0, 0), |(r, t), x| (r + x.resolved as usize, t + 1))
    }

    pub fn resolved_ratio(&self) -> f64 {
        let (resolved, total) = self.reference_counts();
        if total == 0 {
            1.0
        } else {
            resolved as f64 / total as f64
        }
    }

    fn latest<'a>(
        docs: impl IntoIterator<Item = &'a DocumentRecord>,
    ) -> Option<&'a DocumentRecord> {
        docs.into_iter().max_by(|a, b| {
            a.publication_date
                .cmp(&b.publication_date)
                .then_with(|| b.id.celex.cmp(&a.id.celex))
        })
    }

    /// Stored Celex for a treaty article: the article's own document in any
    /// version, else the whole treaty.
    fn treaty_article(&self, treaty: &str, article: Option<u32>) -> Option<String> {
        let parts = parse_celex(treaty).ok()?;
        if let Some(a) = article {
            let versions = self.documents().filter(|d| {
                parse_celex(d.celex()).is_ok_and(|p| {
                    p.sector == parts.sector && p.descriptor == parts.descriptor && p.serial == a
                })
            });
            if let Some(d) = Self::latest(versions) {
                return Some(d.id.celex.clone());
            }
        }
        self.contains(treaty).then(|| treaty.to_string())
    }
}

impl Resolver for ReadSnapshot {
    fn resolve(&self, r: &DocRef) -> Option<String> {
        match &r.key {
            RefKey::Celex { celex } if r.kind == RefKind::EuTreatyArticle => {
                self.treaty_article(celex, r.article)
            }
            RefKey::Celex { celex } => self.contains(celex).then(|| celex.clone()),
            RefKey::EuCase { case_number } => {
                Self::latest(self.by_case_number(case_number)).map(|d| d.id.celex.clone())
            }
            RefKey::Ecli { ecli } => self.by_ecli(ecli).map(|d| d.id.celex.clone()),
            RefKey::HuDecision {
                court: Some(court),
                number,
            } => self
                .by_hu_decision(court, number)
                .map(|d| d.id.celex.clone()),
            RefKey::AbDecision { number } => {
                Self::latest(self.by_ab_number(number)).map(|d| d.id.celex.clone())
            }
            RefKey::HuDecision { court: None, .. }
            | RefKey::InstitutionDoc { .. }
            | RefKey::Unknown { .. } => None,
        }
    }
}

/// The document store. Mutations go through `&mut self`, so there is one
/// writer at a time; readers work on [`ReadSnapshot`]s.
#[derive(Debug)]
pub struct Repository {
    root: Option<PathBuf>,
    docs: BTreeMap<String, DocumentRecord>,
    registry: SerialRegistry,
    dirty: BTreeSet<String>,
}

const INDEX_FILE: &str = "index.tsv";
const DOCS_DIR: &str = "docs";
const REGISTRY_FILE: &str = "registry.tsv";

impl Repository {
    pub fn in_memory() -> Self {
        Repository {
            root: None,
            docs: BTreeMap::new(),
            registry: SerialRegistry::in_memory(),
            dirty: BTreeSet::new(),
        }
    }

    /// Opens (or creates) a repository directory with its registry inside.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        Self::open_with_registry(dir, dir.join(REGISTRY_FILE))
    }

    pub fn open_with_registry(dir: impl AsRef<Path>, registry: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let docs_dir = dir.join(DOCS_DIR);
        std::fs::create_dir_all(&docs_dir).map_err(|e| Error::io(&docs_dir, e))?;
        let registry = SerialRegistry::open(registry)?;
        let mut docs = BTreeMap::new();
        let index_path = dir.join(INDEX_FILE);
        let index = match std::fs::read_to_string(&index_path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(Error::io(&index_path, e)),
        };
        for line in index.lines().filter(|l| !l.trim().is_empty()) {
            let celex = line.split('\t').next().unwrap_or_default();
            let path = docs_dir.join(format!("{celex}.json"));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let doc: DocumentRecord =
                serde_json::from_str(&text).map_err(|source| Error::Corrupt {
                    path: path.clone(),
                    source,
                })?;
            docs.insert(celex.to_string(), doc);
        }
        Ok(Repository {
            root: Some(dir),
            docs,
            registry,
            dirty: BTreeSet::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, celex: &str) -> Option<&DocumentRecord> {
        self.docs.get(celex)
    }

    pub fn documents(&self) -> impl Iterator<Item = &DocumentRecord> {
        self.docs.values()
    }

    pub fn registry_mut(&mut self) -> &mut SerialRegistry {
        &mut self.registry
    }

    pub fn snapshot(&self) -> ReadSnapshot {
        ReadSnapshot::new(self.docs.clone())
    }

    /// Stores `doc` unless a different document already holds its Celex.
    /// Extraction results of an unchanged document are kept.
    pub fn upsert(&mut self, doc: DocumentRecord) -> Result<Upsert> {
        let celex = doc.id.celex.clone();
        let outcome = match self.docs.get(&celex) {
            None => Upsert::Added,
            Some(old) => {
                if let (Some(a), Some(b)) = (&old.id.native_id, &doc.id.native_id) {
                    if a != b {
                        return Err(Error::Fixture {
                            path: PathBuf::from(&celex),
                            line: 0,
                            message: format!("Celex {celex} already belongs to {a}, not {b}"),
                        });
                    }
                }
                let mut bare = old.clone();
                bare.clear_extraction();
                if bare == doc {
                    return Ok(Upsert::Unchanged);
                }
                Upsert::Updated
            }
        };
        self.docs.insert(celex.clone(), doc);
        self.dirty.insert(celex);
        Ok(outcome)
    }

    /// Re-runs extraction on the given documents.
    pub fn extract(&mut self, celexes: &BTreeSet<String>, auth: &AuthoritySet) {
        for celex in celexes {
            if let Some(doc) = self.docs.get_mut(celex) {
                let ex = extract::extract(&doc.body, auth);
                extract::apply(doc, ex);
                self.dirty.insert(celex.clone());
            }
        }
    }

    /// Re-resolves every reference against the current contents.
    pub fn resolve_all(&mut self) {
        let snap = self.snapshot();
        for (celex, doc) in self.docs.iter_mut() {
            let before = doc.references.clone();
            extract::resolve_references(&mut doc.references, &snap);
            if doc.references != before {
                self.dirty.insert(celex.clone());
            }
        }
    }

    /// Writes changed documents and the index. A no-op in memory.
    pub fn commit(&mut self) -> Result<()> {
        let Some(root) = &self.root else {
            self.dirty.clear();
            return Ok(());
        };
        let docs_dir = root.join(DOCS_DIR);
        for celex in &self.dirty {
            let path = docs_dir.join(format!("{celex}.json"));
            match self.docs.get(celex) {
                Some(doc) => {
                    let json =
                        serde_json::to_string_pretty(doc).map_err(|source| Error::Corrupt {
                            path: path.clone(),
                            source,
                        })?;
                    write_atomic(&path, json.as_bytes())?;
                }
                None => {
                    let _ = std::fs::remove_file(&path);
                }
            }
        }
        let mut index = String::new();
        for d in self.docs.values() {
            index.push_str(&format!(
                "{}\t{}\t{}\n",
                d.id.celex,
                d.collection,
                d.id.native_id.as_deref().unwrap_or("-")
            ));
        }
        write_atomic(&root.join(INDEX_FILE), index.as_bytes())?;
        self.dirty.clear();
        Ok(())
    }

    /// Reads, normalizes and stores one source file.
    pub fn ingest_file(
        &mut self,
        source: Source,
        path: &Path,
        entry: Option<&ManifestEntry>,
        auth: &AuthoritySet,
    ) -> Result<(String, Upsert)> {
        let raw = source::read_source_file(source, path)?;
        let doc = build_record(raw, entry, auth, &mut self.registry)?;
        let celex = doc.id.celex.clone();
        let outcome = self.upsert(doc)?;
        Ok((celex, outcome))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Ingests every manifest entry of `fixture`, then extracts the new and
/// changed documents and re-resolves all references. Per-document failures
/// are reported, never fatal.
pub fn ingest(fixture: &SourceFixture, repo: &mut Repository) -> Result<IngestReport> {
    let mut report = IngestReport::default();
    let mut changed = BTreeSet::new();
    for entry in &fixture.manifest {
        let path = fixture.root.join(&entry.relative_path);
        match repo.ingest_file(entry.source, &path, Some(entry), &fixture.authorities) {
            Ok((celex, outcome)) => {
                match outcome {
                    Upsert::Added => report.ingested += 1,
                    Upsert::Updated => report.updated += 1,
                    Upsert::Unchanged => {
                        report.unchanged += 1;
                        continue;
                    }
                }
                changed.insert(celex);
            }
            Err(e) => {
                report.failed += 1;
                report.failures.push(IngestFailure {
                    path: entry.relative_path.clone(),
                    message: e.to_string(),
                });
            }
        }
    }
    repo.extract(&changed, &fixture.authorities);
    repo.resolve_all();
    repo.commit()?;
    Ok(report)
}
