//! Per-source fixture readers and the corpus manifest.
//!
//! EUR-Lex documents are an XML metadata file plus an HTML body with the
//! same stem; Curia and AB documents are single HTML files carrying their
//! metadata in `<meta>` tags; OBH rulings are plain text with a `.meta`
//! sidecar of `key: value` lines.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;

use crate::error::{Error, Result};
use crate::model::{Collection, RELATION_PREFIX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Eurlex,
    Curia,
    Ab,
    Obh,
}

impl Source {
    pub const ALL: [Source; 4] = [Source::Eurlex, Source::Curia, Source::Ab, Source::Obh];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Eurlex => "EURLEX",
            Source::Curia => "CURIA",
            Source::Ab => "AB",
            Source::Obh => "OBH",
        }
    }

    /// Collection a document from this source lands in when nothing more
    /// specific is known.
    pub fn default_collection(self) -> Collection {
        match self {
            Source::Eurlex => Collection::EuLegislation,
            Source::Curia => Collection::EuCaselaw,
            Source::Ab => Collection::HuAb,
            Source::Obh => Collection::HuObh,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownValue {
                what: "source",
                value: s.to_string(),
            })
    }
}

/// One manifest line. Empty or `-` fields are taken from the file itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub source: Source,
    pub relative_path: PathBuf,
    pub native_id: Option<String>,
    pub collection: Option<Collection>,
    pub language: Option<String>,
    pub date: Option<NaiveDate>,
}

fn optional(field: Option<&str>) -> Option<&str> {
    field.map(str::trim).filter(|f| !f.is_empty() && *f != "-")
}

/// Parses `source ∥ relative_path ∥ native_id ∥ collection ∥ language ∥ date`
/// lines; `#` starts a comment line.
pub fn parse_manifest(text: &str, origin: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Fixture {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() < 2 || f[1].trim().is_empty() {
            return Err(bad("expected at least source and relative path".into()));
        }
        let source = f[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        let collection = optional(f.get(3).copied())
            .map(str::parse)
            .transpose()
            .map_err(|e: Error| bad(e.to_string()))?;
        let date = optional(f.get(5).copied())
            .map(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d"))
            .transpose()
            .map_err(|e| bad(format!("bad date: {e}")))?;
        out.push(ManifestEntry {
            source,
            relative_path: PathBuf::from(f[1].trim()),
            native_id: optional(f.get(2).copied()).map(str::to_string),
            collection,
            language: optional(f.get(4).copied()).map(str::to_string),
            date,
        });
    }
    Ok(out)
}

pub fn render_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::from("# source\trelative_path\tnative_id\tcollection\tlanguage\tdate\n");
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            e.source,
            e.relative_path.display(),
            e.native_id.as_deref().unwrap_or("-"),
            e.collection.map_or("-", Collection::as_str),
            e.language.as_deref().unwrap_or("-"),
            e.date.map_or("-".to_string(), |d| d.to_string()),
        ));
    }
    out
}

/// A parsed source file before identifier assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub source: Source,
    pub path: PathBuf,
    pub celex: Option<String>,
    pub ecli: Option<String>,
    pub native_id: Option<String>,
    pub guid: Option<String>,
    pub collection: Option<Collection>,
    pub language: Option<String>,
    pub date: Option<NaiveDate>,
    pub title: String,
    pub body: String,
    pub case_number: Option<String>,
    pub court: Option<String>,
    pub doc_type: Option<String>,
    /// Everything else, including `rel.<TYPE>` relations.
    pub metadata: BTreeMap<String, String>,
}

impl RawDocument {
    pub(crate) fn new(source: Source, path: &Path) -> Self {
        RawDocument {
            source,
            path: path.to_path_buf(),
            celex: None,
            ecli: None,
            native_id: None,
            guid: None,
            collection: None,
            language: None,
            date: None,
            title: String::new(),
            body: String::new(),
            case_number: None,
            court: None,
            doc_type: None,
            metadata: BTreeMap::new(),
        }
    }

    /// Routes one metadata field to its typed slot or the open map.
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if value.is_empty() {
            return Ok(());
        }
        let bad = |message: String| Error::Fixture {
            path: self.path.clone(),
            line: 0,
            message,
        };
        match key.trim().to_ascii_lowercase().as_str() {
            "celex" => self.celex = Some(value.to_string()),
            "ecli" => self.ecli = Some(value.to_string()),
            "native_id" => self.native_id = Some(value.to_string()),
            "guid" => self.guid = Some(value.to_string()),
            "collection" => {
                self.collection = Some(value.parse().map_err(|e: Error| bad(e.to_string()))?)
            }
            "language" => self.language = Some(value.to_string()),
            "date" => {
                self.date = Some(
                    NaiveDate::parse_from_str(value, "%Y-%m-%d")
                        .map_err(|e| bad(format!("bad date {value:?}: {e}")))?,
                )
            }
            "title" => self.title = value.to_string(),
            "case_number" | "number" => self.case_number = Some(value.to_string()),
            "court" => self.court = Some(value.to_string()),
            "doc_type" => self.doc_type = Some(value.to_string()),
            "source" => {}
            _ => {
                let key = key.trim();
                // Relation types are case-insensitive in files.
                let key = match key.split_once('.') {
                    Some((p, t)) if format!("{p}.").eq_ignore_ascii_case(RELATION_PREFIX) => {
                        format!("{RELATION_PREFIX}{}", t.to_ascii_uppercase())
                    }
                    _ => key.to_string(),
                };
                self.metadata
                    .entry(key)
                    .and_modify(|v| {
                        v.push(';');
                        v.push_str(value)
                    })
                    .or_insert_with(|| value.to_string());
            }
        }
        Ok(())
    }
}

const BLOCK_TAGS: &[&str] = &[
    "p",
    "div",
    "br",
    "li",
    "ul",
    "ol",
    "tr",
    "table",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "section",
    "article",
    "blockquote",
    "dd",
    "dt",
    "hr",
];
const HIDDEN_TAGS: &[&str] = &["script", "style", "head"];

fn tag_name(tag: &str) -> String {
    tag.trim_start_matches(['/', '!', '?'])
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Text content of an HTML fragment: tags dropped, block elements turned
/// into line breaks, entities decoded. A `<` that does not open a tag is
/// kept as text, as some sources do not escape it.
pub fn html_to_text(html: &str) -> String {
    let mut text = String::with_capacity(html.len());
    let mut hidden: Option<String> = None;
    let mut rest = html;
    while let Some(lt) = rest.find('<') {
        let (before, after) = rest.split_at(lt);
        if hidden.is_none() {
            text.push_str(before);
        }
        let opens_tag = after[1..]
            .starts_with(|c: char| c.is_ascii_alphabetic() || matches!(c, '/' | '!' | '?'));
        let close = after.find('>');
        match (opens_tag, close) {
            (true, Some(gt)) => {
                let tag = &after[1..gt];
                let name = tag_name(tag);
                if let Some(h) = &hidden {
                    if tag.starts_with('/') && *h == name {
                        hidden = None;
                    }
                } else if HIDDEN_TAGS.contains(&name.as_str())
                    && !tag.starts_with('/')
                    && !tag.ends_with('/')
                {
                    hidden = Some(name);
                } else if BLOCK_TAGS.contains(&name.as_str()) {
                    text.push('\n');
                }
                rest = &after[gt + 1..];
            }
            _ => {
                if hidden.is_none() {
                    text.push('<');
                }
                rest = &after[1..];
            }
        }
    }
    if hidden.is_none() {
        text.push_str(rest);
    }
    html_escape::decode_html_entities(&text).into_owned()
}

/// Whitespace and encoding cleanup shared by all sources: CRLF and no-break
/// spaces become plain, runs of blanks collapse, blank lines disappear, and
/// in Hungarian text the Latin-1 look-alikes õ/û become ő/ű.
pub fn normalize_text(text: &str, hungarian: bool) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let mut cleaned = String::with_capacity(line.len());
        let mut blank = false;
        for c in line.chars() {
            let c = match c {
                '\u{a0}' | '\t' | '\u{2007}' | '\u{202f}' => ' ',
                'õ' if hungarian => 'ő',
                'Õ' if hungarian => 'Ő',
                'û' if hungarian => 'ű',
                'Û' if hungarian => 'Ű',
                c => c,
            };
            if c == ' ' {
                if !blank && !cleaned.is_empty() {
                    cleaned.push(' ');
                }
                blank = true;
            } else if !c.is_control() {
                cleaned.push(c);
                blank = false;
            }
        }
        let cleaned = cleaned.trim_end();
        if !cleaned.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(cleaned);
        }
    }
    out
}

static META_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?is)<meta\b[^>]*>").unwrap());
static ATTR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?is)([a-z_-]+)\s*=\s*"([^"]*)""#).unwrap());
static TITLE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?is)<title>(.*?)</title>").unwrap());

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_html_document(source: Source, path: &Path) -> Result<RawDocument> {
    let html = read(path)?;
    let mut doc = RawDocument::new(source, path);
    for tag in META_TAG.find_iter(&html) {
        let attrs: BTreeMap<String, String> = ATTR
            .captures_iter(tag.as_str())
            .map(|c| {
                (
                    c[1].to_ascii_lowercase(),
                    html_escape::decode_html_entities(&c[2]).into_owned(),
                )
            })
            .collect();
        if let (Some(name), Some(content)) = (attrs.get("name"), attrs.get("content")) {
            doc.set(name, content)?;
        }
    }
    if doc.title.is_empty() {
        if let Some(t) = TITLE.captures(&html) {
            doc.title = html_to_text(&t[1]).trim().to_string();
        }
    }
    doc.body = html_to_text(&html);
    Ok(doc)
}

fn read_eurlex(path: &Path) -> Result<RawDocument> {
    let xml = read(path)?;
    let tree = roxmltree::Document::parse(&xml).map_err(|e| Error::Fixture {
        path: path.to_path_buf(),
        line: 0,
        message: format!("metadata is not well-formed XML: {e}"),
    })?;
    let mut doc = RawDocument::new(Source::Eurlex, path);
    for node in tree
        .root_element()
        .children()
        .filter(roxmltree::Node::is_element)
    {
        let text = node.text().unwrap_or("");
        match node.tag_name().name() {
            "relation" => {
                let (Some(kind), Some(target)) = (node.attribute("type"), node.attribute("target"))
                else {
                    continue;
                };
                doc.set(&format!("{RELATION_PREFIX}{kind}"), target)?;
            }
            "meta" => {
                if let Some(key) = node.attribute("key") {
                    doc.set(key, text)?;
                }
            }
            name => doc.set(name, text)?,
        }
    }
    let body_path = path.with_extension("html");
    doc.body = html_to_text(&read(&body_path)?);
    Ok(doc)
}

fn read_obh(path: &Path) -> Result<RawDocument> {
    let mut doc = RawDocument::new(Source::Obh, path);
    doc.body = read(path)?;
    let meta_path = path.with_extension("meta");
    let meta = read(&meta_path)?;
    for (i, line) in meta.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once(':') else {
            return Err(Error::Fixture {
                path: meta_path,
                line: i + 1,
                message: "expected `key: value`".into(),
            });
        };
        doc.set(k, v)?;
    }
    Ok(doc)
}

/// Reads one source file. The path is the XML metadata file for EUR-Lex,
/// the HTML file for Curia and AB, the text body for OBH.
pub fn read_source_file(source: Source, path: &Path) -> Result<RawDocument> {
    let mut doc = match source {
        Source::Eurlex => read_eurlex(path)?,
        Source::Curia | Source::Ab => read_html_document(source, path)?,
        Source::Obh => read_obh(path)?,
    };
    let hungarian = doc
        .language
        .as_deref()
        .map_or(matches!(source, Source::Ab | Source::Obh), |l| {
            l.eq_ignore_ascii_case("hu")
        });
    doc.body = normalize_text(&doc.body, hungarian);
    doc.title = normalize_text(&doc.title, hungarian);
    Ok(doc)
}

/// Guesses a file's source from its location and contents: EUR-Lex metadata
/// is `.xml`, OBH bodies are `.txt` with a sidecar, HTML files declare
/// their source in a meta tag.
pub fn detect_source(path: &Path) -> Option<Source> {
    match path.extension()?.to_str()? {
        "xml" => Some(Source::Eurlex),
        "txt" if path.with_extension("meta").exists() => Some(Source::Obh),
        "html" | "htm" => {
            if path.with_extension("xml").exists() {
                return None; // EUR-Lex body
            }
            let html = std::fs::read_to_string(path).ok()?;
            META_TAG.find_iter(&html).find_map(|tag| {
                let attrs: BTreeMap<String, String> = ATTR
                    .captures_iter(tag.as_str())
                    .map(|c| (c[1].to_ascii_lowercase(), c[2].to_string()))
                    .collect();
                (attrs.get("name").map(String::as_str) == Some("source"))
                    .then(|| attrs.get("content")?.parse().ok())
                    .flatten()
            })
        }
        _ => None,
    }
}

/// All source files under `root`, recursively, in path order.
pub fn scan_sources(root: &Path) -> Result<Vec<(Source, PathBuf)>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Some(source) = detect_source(&path) {
                out.push((source, path));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}
