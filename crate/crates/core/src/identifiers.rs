//! Identifier grammars: Celex, generated Celex for case law and Hungarian
//! documents, ECLI, EU case numbers and Hungarian court decision numbers.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Collection, DocumentRecord};

static CELEX_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([1-9])(\d{4})([A-Z]{1,2})(\d{4})$").unwrap());
static EU_CASE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([CTF])-(\d+)/(\d{2})$").unwrap());
static HU_DECISION_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d+)\.([A-Z]{1,2})\.(\d+(?:\.\d+)*)/(\d{4})/(\d+)\.?$").unwrap()
});

/// Unanchored patterns used when scanning running text.
pub mod scan {
    use super::*;

    pub static HU_DECISION: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"\b\d{1,3}\.[A-Z]{1,2}\.\d+(?:\.\d+)*/\d{4}/\d+").unwrap());
    pub static EU_CASE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"\b[CTF]-\d{1,4}/\d{2}\b").unwrap());
    pub static ECLI: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(r"(?i)\bECLI:[A-Z]{2}:[A-Z0-9]{1,7}:\d{4}:[A-Z0-9.]*[A-Z0-9]").unwrap()
    });
    /// `N/YYYY` or `YYYY/N`, optionally followed by an EU/EC/EEC style tag.
    pub static NUMBER_YEAR: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(r"\b(\d{1,4})/(\d{1,4})(?:/(?:EU|EK|EGK|EC|EEC|KK|KBVB|IB))?\b").unwrap()
    });
}

/// Parts of a Celex number: sector, year, descriptor letters and serial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CelexParts {
    pub sector: u8,
    pub year: u16,
    pub descriptor: String,
    pub serial: u32,
}

impl CelexParts {
    pub fn new(sector: u8, year: u16, descriptor: &str, serial: u32) -> Self {
        CelexParts {
            sector,
            year,
            descriptor: descriptor.to_string(),
            serial,
        }
    }

    /// True when all fields fit the fixed-width grammar.
    pub fn is_valid(&self) -> bool {
        (1..=9).contains(&self.sector)
            && (1000..=9999).contains(&self.year)
            && (1..=2).contains(&self.descriptor.len())
            && self.descriptor.bytes().all(|b| b.is_ascii_uppercase())
            && self.serial <= 9999
    }
}

impl fmt::Display for CelexParts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:04}{}{:04}",
            self.sector, self.year, self.descriptor, self.serial
        )
    }
}

impl FromStr for CelexParts {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_celex(s)
    }
}

pub fn parse_celex(s: &str) -> Result<CelexParts> {
    let canonical = s.trim().to_ascii_uppercase();
    let caps = CELEX_RE
        .captures(&canonical)
        .ok_or_else(|| Error::malformed("celex", s))?;
    let parts = CelexParts {
        sector: caps[1].parse().unwrap(),
        year: caps[2].parse().unwrap(),
        descriptor: caps[3].to_string(),
        serial: caps[4].parse().unwrap(),
    };
    if parts.year < 1000 {
        return Err(Error::malformed("celex", s));
    }
    Ok(parts)
}

/// Two-digit docket years pivot at 53: the Court's docket starts in 1953.
pub fn expand_year2(yy: u8) -> u16 {
    debug_assert!(yy <= 99);
    if yy >= 53 {
        1900 + yy as u16
    } else {
        2000 + yy as u16
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CourtPrefix {
    C,
    T,
    F,
}

impl CourtPrefix {
    fn letter(self) -> char {
        match self {
            CourtPrefix::C => 'C',
            CourtPrefix::T => 'T',
            CourtPrefix::F => 'F',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'C' => Some(CourtPrefix::C),
            'T' => Some(CourtPrefix::T),
            'F' => Some(CourtPrefix::F),
            _ => None,
        }
    }
}

/// EU court case number, e.g. `C-18/16`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EuCaseNumber {
    pub court: CourtPrefix,
    pub serial: u32,
    pub year2: u8,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joined_with: Vec<EuCaseNumber>,
}

impl EuCaseNumber {
    pub fn new(court: CourtPrefix, serial: u32, year2: u8) -> Self {
        EuCaseNumber {
            court,
            serial,
            year2,
            joined_with: Vec::new(),
        }
    }

    /// Parses a list of joined case numbers (`C-18/16, C-19/16 and C-20/16`).
    /// The lexicographically smallest rendering becomes the lead number and
    /// the rest are kept in `joined_with`.
    pub fn parse_joined(s: &str) -> Result<EuCaseNumber> {
        let mut numbers = s
            .split([',', ';'])
            .flat_map(|part| part.split(" and ").flat_map(|p| p.split(" és ")))
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(EuCaseNumber::from_str)
            .collect::<Result<Vec<_>>>()?;
        if numbers.is_empty() {
            return Err(Error::malformed("eu case", s));
        }
        numbers.sort_by_key(|n| n.to_string());
        numbers.dedup();
        let mut lead = numbers.remove(0);
        lead.joined_with = numbers;
        Ok(lead)
    }
}

impl fmt::Display for EuCaseNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}/{:02}",
            self.court.letter(),
            self.serial,
            self.year2
        )
    }
}

impl FromStr for EuCaseNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let caps = EU_CASE_RE
            .captures(trimmed)
            .ok_or_else(|| Error::malformed("eu case", s))?;
        let serial: u32 = caps[2]
            .parse()
            .map_err(|_| Error::malformed("eu case", s))?;
        if serial == 0 {
            return Err(Error::malformed("eu case", s));
        }
        Ok(EuCaseNumber::new(
            CourtPrefix::from_letter(caps[1].chars().next().unwrap()).unwrap(),
            serial,
            caps[3].parse().unwrap(),
        ))
    }
}

/// Curia document types; the second descriptor letter of a generated Celex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseDocType {
    #[default]
    Judgment,
    Order,
    Opinion,
    Application,
    Summary,
    Information,
}

impl CaseDocType {
    fn letter(self) -> char {
        match self {
            CaseDocType::Judgment => 'J',
            CaseDocType::Order => 'O',
            CaseDocType::Opinion => 'C',
            CaseDocType::Application => 'N',
            CaseDocType::Summary => 'S',
            CaseDocType::Information => 'I',
        }
    }
}

impl FromStr for CaseDocType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "judgment" | "judgement" => CaseDocType::Judgment,
            "order" => CaseDocType::Order,
            "opinion" => CaseDocType::Opinion,
            "application" => CaseDocType::Application,
            "summary" => CaseDocType::Summary,
            "information" | "judicial information" => CaseDocType::Information,
            _ => {
                return Err(Error::UnknownValue {
                    what: "case document type",
                    value: s.to_string(),
                })
            }
        })
    }
}

/// Generated Celex for a judgment in case `n`.
pub fn celex_for_case(n: &EuCaseNumber, doc_year: u16) -> CelexParts {
    celex_for_case_document(n, doc_year, CaseDocType::Judgment)
}

/// Generated Celex for any Curia document of case `n`. A case cannot be
/// lodged after a document about it was issued, so an expanded year later
/// than `doc_year` falls back one century.
pub fn celex_for_case_document(
    n: &EuCaseNumber,
    doc_year: u16,
    doc_type: CaseDocType,
) -> CelexParts {
    let mut year = expand_year2(n.year2);
    if year > doc_year && year >= 2000 {
        year -= 100;
    }
    let descriptor: String = [n.court.letter(), doc_type.letter()].iter().collect();
    CelexParts {
        sector: 6,
        year,
        descriptor,
        serial: n.serial,
    }
}

/// Hungarian court decision number, e.g. `4.K.27.207/2015/12.`. Only unique
/// together with the court.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HuDecisionNumber {
    pub council: u32,
    pub case_type: String,
    pub registry: Vec<u32>,
    pub year: u16,
    pub doc_serial: u32,
    pub court: String,
}

impl HuDecisionNumber {
    pub fn parse(s: &str, court: &str) -> Result<Self> {
        let trimmed = s.trim();
        let caps = HU_DECISION_RE
            .captures(trimmed)
            .ok_or_else(|| Error::malformed("hu decision", s))?;
        let positive = |v: &str| -> Result<u32> {
            match v.parse::<u32>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(Error::malformed("hu decision", s)),
            }
        };
        let registry = caps[3]
            .split('.')
            .map(positive)
            .collect::<Result<Vec<_>>>()?;
        Ok(HuDecisionNumber {
            council: positive(&caps[1])?,
            case_type: caps[2].to_string(),
            registry,
            year: caps[4].parse().unwrap(),
            doc_serial: positive(&caps[5])?,
            court: court.to_string(),
        })
    }

    /// Canonical form without the court, trailing period included.
    pub fn render(&self) -> String {
        let registry: Vec<String> = self.registry.iter().map(u32::to_string).collect();
        format!(
            "{}.{}.{}/{}/{}.",
            self.council,
            self.case_type,
            registry.join("."),
            self.year,
            self.doc_serial
        )
    }
}

impl fmt::Display for HuDecisionNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Canonical rendering of a decision number string, or `None` if it does not
/// follow the grammar.
pub fn canonical_hu_decision(s: &str) -> Option<String> {
    HuDecisionNumber::parse(s, "").ok().map(|n| n.render())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ecli {
    pub country: String,
    pub court: String,
    pub year: String,
    pub number: String,
}

impl fmt::Display for Ecli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ECLI:{}:{}:{}:{}",
            self.country, self.court, self.year, self.number
        )
    }
}

impl FromStr for Ecli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ecli(s)
    }
}

pub fn parse_ecli(s: &str) -> Result<Ecli> {
    let fields: Vec<&str> = s.trim().split(':').collect();
    if fields.len() != 5 || !fields[0].eq_ignore_ascii_case("ECLI") {
        return Err(Error::malformed("ecli", s));
    }
    if fields[1..]
        .iter()
        .any(|f| f.is_empty() || f.chars().any(char::is_whitespace))
    {
        return Err(Error::malformed("ecli", s));
    }
    Ok(Ecli {
        country: fields[1].to_string(),
        court: fields[2].to_string(),
        year: fields[3].to_string(),
        number: fields[4].to_string(),
    })
}

/// Canonical AB decision number `N/YYYY`.
pub fn canonical_ab_number(s: &str) -> Option<String> {
    let (n, y) = s.trim().trim_end_matches('.').split_once('/')?;
    let n: u32 = n.trim().parse().ok()?;
    let y: u16 = y.trim().parse().ok()?;
    (n > 0 && (1000..=9999).contains(&y)).then(|| format!("{n}/{y}"))
}

/// Persistent assignment of pseudo-Celex serials, one monotonic counter per
/// (descriptor, year). Lookups by native identifier make assignment
/// idempotent.
#[derive(Debug, Default)]
pub struct SerialRegistry {
    path: Option<PathBuf>,
    assigned: HashMap<(String, String), (u16, u32)>,
    next: HashMap<(String, u16), u32>,
}

impl SerialRegistry {
    pub fn in_memory() -> Self {
        SerialRegistry::default()
    }

    /// Opens (or starts) the registry file at `path`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let unavailable = |source| Error::RegistryUnavailable {
            path: path.clone(),
            source,
        };
        let mut registry = SerialRegistry {
            path: Some(path.clone()),
            ..Default::default()
        };
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(unavailable(e)),
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, '\t').collect();
            let bad = || {
                unavailable(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("line {}: {line:?}", i + 1),
                ))
            };
            if fields.len() != 4 {
                return Err(bad());
            }
            let year: u16 = fields[1].parse().map_err(|_| bad())?;
            let serial: u32 = fields[2].parse().map_err(|_| bad())?;
            registry.record(fields[0], year, serial, fields[3]);
        }
        Ok(registry)
    }

    fn record(&mut self, descriptor: &str, year: u16, serial: u32, native_id: &str) {
        self.assigned.insert(
            (descriptor.to_string(), native_id.to_string()),
            (year, serial),
        );
        let next = self.next.entry((descriptor.to_string(), year)).or_insert(1);
        *next = (*next).max(serial + 1);
    }

    pub fn lookup(&self, descriptor: &str, native_id: &str) -> Option<(u16, u32)> {
        self.assigned
            .get(&(descriptor.to_string(), native_id.to_string()))
            .copied()
    }

    /// Returns the existing assignment for `native_id`, or assigns and
    /// persists the next serial for `(descriptor, year)`.
    pub fn assign(&mut self, descriptor: &str, year: u16, native_id: &str) -> Result<(u16, u32)> {
        if let Some(found) = self.lookup(descriptor, native_id) {
            return Ok(found);
        }
        let serial = self
            .next
            .get(&(descriptor.to_string(), year))
            .copied()
            .unwrap_or(1);
        if serial > 9999 {
            return Err(Error::malformed("celex serial", &serial.to_string()));
        }
        if let Some(path) = &self.path {
            let line = format!("{descriptor}\t{year}\t{serial}\t{native_id}\n");
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .and_then(|mut f| f.write_all(line.as_bytes()))
                .map_err(|source| Error::RegistryUnavailable {
                    path: path.clone(),
                    source,
                })?;
        }
        self.record(descriptor, year, serial, native_id);
        Ok((year, serial))
    }

    pub fn len(&self) -> usize {
        self.assigned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assigned.is_empty()
    }
}

/// Celex-like identifier for a Hungarian document lacking one: sector 8,
/// descriptor `HA` (Constitutional Court) or `HB` (ordinary courts).
pub fn pseudo_celex(doc: &DocumentRecord, registry: &mut SerialRegistry) -> Result<CelexParts> {
    use chrono::Datelike;

    let descriptor = match doc.collection {
        Collection::HuAb => "HA",
        Collection::HuObh => "HB",
        other => {
            return Err(Error::UnknownValue {
                what: "collection for pseudo-celex",
                value: other.to_string(),
            })
        }
    };
    let native = doc
        .id
        .native_id
        .as_deref()
        .filter(|n| !n.is_empty())
        .ok_or_else(|| Error::MissingNativeId(doc.title.clone()))?;
    let (year, serial) = registry.assign(descriptor, doc.publication_date.year() as u16, native)?;
    Ok(CelexParts::new(8, year, descriptor, serial))
}
