//! Shared domain vocabulary: collections, connection types, identifiers and
//! the document record every other module works on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The repository partition a document is stored in. Dossier grouping rules
/// differ per collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Collection {
    EuTreaty,
    EuLegislation,
    EuCaselaw,
    HuAb,
    HuObh,
}

impl Collection {
    pub const ALL: [Collection; 5] = [
        Collection::EuTreaty,
        Collection::EuLegislation,
        Collection::EuCaselaw,
        Collection::HuAb,
        Collection::HuObh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Collection::EuTreaty => "EU_TREATY",
            Collection::EuLegislation => "EU_LEGISLATION",
            Collection::EuCaselaw => "EU_CASELAW",
            Collection::HuAb => "HU_AB",
            Collection::HuObh => "HU_OBH",
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Collection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Collection::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownValue {
                what: "collection",
                value: s.to_string(),
            })
    }
}

/// Typed connection between two documents. All types except `Related` come
/// in (active, passive) pairs recording the same legal relation from both
/// ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConnectionType {
    Annuls,
    AnnulledBy,
    Modifies,
    ModifiedBy,
    Suspends,
    SuspendedBy,
    Confirms,
    ConfirmedBy,
    LegalBasis,
    BasisFor,
    Cites,
    CitedBy,
    Precedes,
    Follows,
    Related,
}

const PAIRS: [(ConnectionType, ConnectionType); 7] = [
    (ConnectionType::Annuls, ConnectionType::AnnulledBy),
    (ConnectionType::Modifies, ConnectionType::ModifiedBy),
    (ConnectionType::Suspends, ConnectionType::SuspendedBy),
    (ConnectionType::Confirms, ConnectionType::ConfirmedBy),
    (ConnectionType::LegalBasis, ConnectionType::BasisFor),
    (ConnectionType::Cites, ConnectionType::CitedBy),
    (ConnectionType::Precedes, ConnectionType::Follows),
];

impl ConnectionType {
    pub const ALL: [ConnectionType; 15] = [
        ConnectionType::Annuls,
        ConnectionType::AnnulledBy,
        ConnectionType::Modifies,
        ConnectionType::ModifiedBy,
        ConnectionType::Suspends,
        ConnectionType::SuspendedBy,
        ConnectionType::Confirms,
        ConnectionType::ConfirmedBy,
        ConnectionType::LegalBasis,
        ConnectionType::BasisFor,
        ConnectionType::Cites,
        ConnectionType::CitedBy,
        ConnectionType::Precedes,
        ConnectionType::Follows,
        ConnectionType::Related,
    ];

    /// The (active, passive) pair containing this type, or `None` for
    /// `Related`.
    pub fn pair_of(self) -> Option<(ConnectionType, ConnectionType)> {
        PAIRS
            .iter()
            .copied()
            .find(|&(active, passive)| active == self || passive == self)
    }

    /// True iff this is the first element of its pair.
    pub fn is_active(self) -> bool {
        matches!(self.pair_of(), Some((active, _)) if active == self)
    }

    /// The other member of the pair; `Related` is its own partner.
    pub fn partner(self) -> ConnectionType {
        match self.pair_of() {
            Some((active, passive)) if active == self => passive,
            Some((active, _)) => active,
            None => self,
        }
    }

    pub fn is_directed(self) -> bool {
        self != ConnectionType::Related
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConnectionType::Annuls => "ANNULS",
            ConnectionType::AnnulledBy => "ANNULLED_BY",
            ConnectionType::Modifies => "MODIFIES",
            ConnectionType::ModifiedBy => "MODIFIED_BY",
            ConnectionType::Suspends => "SUSPENDS",
            ConnectionType::SuspendedBy => "SUSPENDED_BY",
            ConnectionType::Confirms => "CONFIRMS",
            ConnectionType::ConfirmedBy => "CONFIRMED_BY",
            ConnectionType::LegalBasis => "LEGAL_BASIS",
            ConnectionType::BasisFor => "BASIS_FOR",
            ConnectionType::Cites => "CITES",
            ConnectionType::CitedBy => "CITED_BY",
            ConnectionType::Precedes => "PRECEDES",
            ConnectionType::Follows => "FOLLOWS",
            ConnectionType::Related => "RELATED",
        }
    }
}

impl fmt::Display for ConnectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConnectionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConnectionType::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownValue {
                what: "connection type",
                value: s.to_string(),
            })
    }
}

/// Identifier bundle of a document. `celex` is the repository primary key;
/// documents without a source Celex receive a generated one at ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DocId {
    pub celex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecli: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub native_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_guid: Option<String>,
}

impl DocId {
    pub fn new(celex: impl Into<String>) -> Self {
        DocId {
            celex: celex.into(),
            ecli: None,
            native_id: None,
            source_guid: None,
        }
    }
}

/// Byte offsets into a document body, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

impl From<std::ops::Range<usize>> for Span {
    fn from(r: std::ops::Range<usize>) -> Self {
        Span::new(r.start, r.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefKind {
    EuCase,
    EuRegulation,
    EuDirective,
    EuTreatyArticle,
    AbDecision,
    HuDecision,
    Alias,
    AcronymDoc,
}

/// What a reference denotes, independent of whether the repository holds
/// it. Backfill searches the sources by this key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RefKey {
    Celex {
        celex: String,
    },
    EuCase {
        case_number: String,
    },
    Ecli {
        ecli: String,
    },
    HuDecision {
        court: Option<String>,
        number: String,
    },
    AbDecision {
        number: String,
    },
    InstitutionDoc {
        institution: String,
        form: String,
    },
    Unknown {
        raw: String,
    },
}

/// Non-fatal conditions recorded on a reference instead of being thrown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefIssue {
    AmbiguousReference,
    UnresolvedTreaty,
    MissingCourt,
}

/// One recognized in-text reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocRef {
    pub span: Span,
    pub kind: RefKind,
    pub raw: String,
    pub key: RefKey,
    /// Celex of the referenced document. May be set while `resolved` is
    /// false when the Celex is computable from the reference itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paragraphs: Option<(u32, u32)>,
    pub context: String,
    pub resolved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue: Option<RefIssue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityKind {
    Judge,
    Applicant,
    Defendant,
    Representative,
    Subject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedEntity {
    pub kind: EntityKind,
    pub span: Span,
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BindingKind {
    DocAlias,
    Acronym,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BindingTarget {
    /// A document reference; mirrors the defining reference.
    Document {
        key: RefKey,
        target: Option<String>,
        kind: RefKind,
    },
    /// An institution or other named entity, identified by its full form.
    Entity { full_form: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasBinding {
    pub alias_text: String,
    pub target: BindingTarget,
    pub kind: BindingKind,
    pub defined_at: Span,
}

/// A standalone acronym occurrence, presented with its expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcronymOccurrence {
    pub span: Span,
    pub acronym: String,
    pub full_form: String,
}

/// One legal document with its extraction results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: DocId,
    pub collection: Collection,
    pub language: String,
    pub title: String,
    pub body: String,
    pub publication_date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_number: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub court: Option<String>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    #[serde(default)]
    pub references: Vec<DocRef>,
    #[serde(default)]
    pub entities: Vec<NamedEntity>,
    #[serde(default)]
    pub aliases: Vec<AliasBinding>,
    #[serde(default)]
    pub acronyms: Vec<AcronymOccurrence>,
}

/// Metadata key prefix for typed connections recorded by the source, e.g.
/// `rel.ANNULS = 32016L2284`.
pub const RELATION_PREFIX: &str = "rel.";

impl DocumentRecord {
    pub fn celex(&self) -> &str {
        &self.id.celex
    }

    pub fn is_hungarian(&self) -> bool {
        self.language.eq_ignore_ascii_case("hu")
    }

    /// Typed connections recorded in metadata as `(type, target identifier)`.
    pub fn metadata_relations(&self) -> Vec<(ConnectionType, String, String)> {
        let mut out = Vec::new();
        for (key, value) in &self.metadata {
            let Some(name) = key.strip_prefix(RELATION_PREFIX) else {
                continue;
            };
            let Ok(kind) = name.parse::<ConnectionType>() else {
                continue;
            };
            for target in value.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                out.push((kind, target.to_string(), key.clone()));
            }
        }
        out
    }

    /// Clears everything derived by extraction.
    pub fn clear_extraction(&mut self) {
        self.references.clear();
        self.entities.clear();
        self.aliases.clear();
        self.acronyms.clear();
    }
}
