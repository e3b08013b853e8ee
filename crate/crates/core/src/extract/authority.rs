//! Authority (normalized name) lists: courts, judges, treaties, curated
//! subjects and institution documents.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textnorm::{compact_fold, fold_str};

#[derive(Debug, Clone)]
struct NameEntry {
    compact: String,
    /// Acronym-like names (`TEU`, `EUMSZ`) must end on a word boundary.
    strict_end: bool,
    value: usize,
}

/// Finds authority names in text, tolerant to accents, case, and to the
/// name being written with or without spaces and hyphens.
#[derive(Debug, Clone, Default)]
pub struct NameMatcher {
    entries: Vec<NameEntry>,
}

impl NameMatcher {
    pub fn new<'a>(names: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        let mut entries: Vec<NameEntry> = names
            .into_iter()
            .filter_map(|(name, value)| {
                let compact = compact_fold(name).folded;
                if compact.is_empty() {
                    return None;
                }
                let strict_end = !name.contains(' ')
                    && name
                        .chars()
                        .filter(|c| c.is_alphabetic())
                        .all(char::is_uppercase);
                Some(NameEntry {
                    compact,
                    strict_end,
                    value,
                })
            })
            .collect();
        entries.sort_by(|a, b| {
            b.compact
                .len()
                .cmp(&a.compact.len())
                .then(a.value.cmp(&b.value))
        });
        NameMatcher { entries }
    }

    /// Non-overlapping matches, leftmost first, longest name at a position.
    pub fn find(&self, text: &str) -> Vec<(Range<usize>, usize)> {
        if self.entries.is_empty() {
            return Vec::new();
        }
        let compact = compact_fold(text);
        let mut candidates: Vec<(Range<usize>, usize)> = Vec::new();
        for entry in &self.entries {
            let mut from = 0;
            while let Some(pos) = compact.folded[from..].find(&entry.compact) {
                let at = from + pos;
                from = at + entry.compact.len();
                let span = compact.source_span(at..at + entry.compact.len());
                let before_ok = text[..span.start]
                    .chars()
                    .next_back()
                    .is_none_or(|c| !c.is_alphanumeric());
                let after_ok = !entry.strict_end
                    || text[span.end..]
                        .chars()
                        .next()
                        .is_none_or(|c| !c.is_alphanumeric());
                if before_ok && after_ok {
                    candidates.push((span, entry.value));
                }
            }
        }
        candidates.sort_by(|a, b| {
            a.0.start
                .cmp(&b.0.start)
                .then(b.0.end.cmp(&a.0.end))
                .then(a.1.cmp(&b.1))
        });
        let mut out: Vec<(Range<usize>, usize)> = Vec::new();
        for (span, value) in candidates {
            if out.last().is_none_or(|(last, _)| last.end <= span.start) {
                out.push((span, value));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Court {
    pub id: u32,
    /// The first name listed for this id.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Treaty {
    pub name: String,
    pub celex: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstitutionDoc {
    pub institution: String,
    pub form: String,
    pub celex: String,
}

/// All authority lists used by extraction and ingestion normalization.
#[derive(Debug, Clone, Default)]
pub struct AuthoritySet {
    court_variants: Vec<(String, u32)>,
    courts: BTreeMap<u32, String>,
    pub judges: Vec<String>,
    pub treaties: Vec<Treaty>,
    subjects: BTreeMap<String, String>,
    pub institution_docs: Vec<InstitutionDoc>,
    court_matcher: NameMatcher,
    treaty_matcher: NameMatcher,
}

fn tsv_rows<'a>(
    text: &'a str,
    path: &'a Path,
    min_fields: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    text.lines().enumerate().filter_map(move |(i, line)| {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            return None;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < min_fields || fields[..min_fields].iter().any(|f| f.is_empty()) {
            return Some(Err(Error::Fixture {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected {min_fields} tab-separated fields"),
            }));
        }
        Some(Ok((i + 1, fields)))
    })
}

fn read_optional(path: &Path) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
        Err(e) => Err(Error::io(path, e)),
    }
}

impl AuthoritySet {
    /// Loads `courts.tsv`, `judges.tsv`, `treaties.tsv`, `subjects.tsv` and
    /// `institution_docs.tsv` from `dir`; missing files are empty lists.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut set = AuthoritySet::default();

        let path = dir.join("courts.tsv");
        let text = read_optional(&path)?;
        for row in tsv_rows(&text, &path, 2) {
            let (line, f) = row?;
            let id = f[1].parse().map_err(|_| Error::Fixture {
                path: path.clone(),
                line,
                message: "court id is not an integer".into(),
            })?;
            set.add_court(f[0], id);
        }

        let path = dir.join("judges.tsv");
        let text = read_optional(&path)?;
        for row in tsv_rows(&text, &path, 1) {
            set.judges.push(row?.1[0].to_string());
        }

        let path = dir.join("treaties.tsv");
        let text = read_optional(&path)?;
        for row in tsv_rows(&text, &path, 2) {
            let f = row?.1;
            set.add_treaty(f[0], f[1]);
        }

        let path = dir.join("subjects.tsv");
        let text = read_optional(&path)?;
        for row in tsv_rows(&text, &path, 2) {
            let f = row?.1;
            set.add_subject(f[0], f[1]);
        }

        let path = dir.join("institution_docs.tsv");
        let text = read_optional(&path)?;
        for row in tsv_rows(&text, &path, 3) {
            let f = row?.1;
            set.add_institution_doc(f[0], f[1], f[2]);
        }
        set.rebuild();
        Ok(set)
    }

    pub fn add_court(&mut self, name: &str, id: u32) {
        self.courts.entry(id).or_insert_with(|| name.to_string());
        self.court_variants.push((name.to_string(), id));
        self.rebuild();
    }

    pub fn add_judge(&mut self, name: &str) {
        self.judges.push(name.to_string());
    }

    pub fn add_treaty(&mut self, name: &str, celex: &str) {
        self.treaties.push(Treaty {
            name: name.to_string(),
            celex: celex.to_string(),
        });
        self.rebuild();
    }

    pub fn add_subject(&mut self, raw: &str, normalized: &str) {
        self.subjects
            .insert(fold_str(raw.trim()), normalized.to_string());
    }

    pub fn add_institution_doc(&mut self, institution: &str, form: &str, celex: &str) {
        self.institution_docs.push(InstitutionDoc {
            institution: institution.to_string(),
            form: form.to_ascii_uppercase(),
            celex: celex.to_string(),
        });
    }

    fn rebuild(&mut self) {
        self.court_matcher = NameMatcher::new(
            self.court_variants
                .iter()
                .enumerate()
                .map(|(i, (name, _))| (name.as_str(), i)),
        );
        self.treaty_matcher = NameMatcher::new(
            self.treaties
                .iter()
                .enumerate()
                .map(|(i, t)| (t.name.as_str(), i)),
        );
    }

    /// Court mentions in `text`, as (span, court id).
    pub fn find_courts(&self, text: &str) -> Vec<(Range<usize>, u32)> {
        self.court_matcher
            .find(text)
            .into_iter()
            .map(|(r, i)| (r, self.court_variants[i].1))
            .collect()
    }

    /// Treaty mentions in `text`, as (span, treaty).
    pub fn find_treaties(&self, text: &str) -> Vec<(Range<usize>, &Treaty)> {
        self.treaty_matcher
            .find(text)
            .into_iter()
            .map(|(r, i)| (r, &self.treaties[i]))
            .collect()
    }

    pub fn court_name(&self, id: u32) -> Option<&str> {
        self.courts.get(&id).map(String::as_str)
    }

    /// Canonical court for any listed variant of its name.
    pub fn normalize_court(&self, name: &str) -> Option<Court> {
        let key = compact_fold(name).folded;
        self.court_variants
            .iter()
            .find(|(variant, _)| compact_fold(variant).folded == key)
            .map(|&(_, id)| Court {
                id,
                name: self.courts[&id].clone(),
            })
    }

    pub fn normalize_subject(&self, raw: &str) -> Option<&str> {
        self.subjects.get(&fold_str(raw.trim())).map(String::as_str)
    }

    pub fn institution_doc(&self, institution: &str, form: &str) -> Option<&InstitutionDoc> {
        let key = compact_fold(institution).folded;
        self.institution_docs
            .iter()
            .find(|d| d.form == form && compact_fold(&d.institution).folded == key)
    }
}
