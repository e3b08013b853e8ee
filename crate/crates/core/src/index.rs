//! Inverted index with pluggable stemming, synonym expansion, five search
//! modes and hit highlighting.
//!
//! Hungarian bodies are indexed folded and stemmed; other languages folded
//! only. A query term is normalized per document language in the same way,
//! so "bíróság" finds "bíróságnak" in Hungarian text but only exact
//! (accent- and case-insensitive) forms elsewhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DocumentRecord, Span};
use crate::textnorm::{fold_str, tokenize, Stemmer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchMode {
    ExactPhrase,
    AllWords,
    AnyWord,
    Proximity,
    Expert,
}

impl SearchMode {
    pub const ALL: [SearchMode; 5] = [
        SearchMode::ExactPhrase,
        SearchMode::AllWords,
        SearchMode::AnyWord,
        SearchMode::Proximity,
        SearchMode::Expert,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::ExactPhrase => "EXACT_PHRASE",
            SearchMode::AllWords => "ALL_WORDS",
            SearchMode::AnyWord => "ANY_WORD",
            SearchMode::Proximity => "PROXIMITY",
            SearchMode::Expert => "EXPERT",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    /// Accepts the canonical names in any case, with `-` or `_`, plus the
    /// short forms `phrase`, `all`, `any`, `near`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let mode = match norm.as_str() {
            "EXACT_PHRASE" | "PHRASE" | "EXACT" => SearchMode::ExactPhrase,
            "ALL_WORDS" | "ALL" => SearchMode::AllWords,
            "ANY_WORD" | "ANY" => SearchMode::AnyWord,
            "PROXIMITY" | "NEAR" => SearchMode::Proximity,
            "EXPERT" => SearchMode::Expert,
            _ => {
                return Err(Error::UnknownValue {
                    what: "search mode",
                    value: s.to_string(),
                })
            }
        };
        Ok(mode)
    }
}

/// Boolean expression over query terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expr {
    Term(String),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    /// Terms appearing in the expression, in order of first appearance.
    pub fn terms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        let mut seen = BTreeSet::new();
        out.retain(|t| seen.insert(*t));
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Term(t) => out.push(t),
            Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
            Expr::Not(x) => x.collect(out),
        }
    }

    /// Terms that can make the expression true by being present.
    fn positive_terms<'a>(&'a self, negated: bool, out: &mut Vec<&'a str>) {
        match self {
            Expr::Term(t) if !negated => out.push(t),
            Expr::Term(_) => {}
            Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| x.positive_terms(negated, out)),
            Expr::Not(x) => x.positive_terms(!negated, out),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Expr::Term(t) if t.trim().is_empty() => {
                Err(Error::MalformedExpression("empty term".into()))
            }
            Expr::Term(_) => Ok(()),
            Expr::And(xs) | Expr::Or(xs) if xs.is_empty() => Err(Error::MalformedExpression(
                "operator without operands".into(),
            )),
            Expr::And(xs) | Expr::Or(xs) => xs.iter().try_for_each(Expr::validate),
            Expr::Not(x) => x.validate(),
        }
    }

    fn eval(&self, present: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Expr::Term(t) => present(t),
            Expr::And(xs) => xs.iter().all(|x| x.eval(present)),
            Expr::Or(xs) => xs.iter().any(|x| x.eval(present)),
            Expr::Not(x) => !x.eval(present),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Expr], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            Expr::Term(t) if t.contains(char::is_whitespace) => write!(f, "\"{t}\""),
            Expr::Term(t) => f.write_str(t),
            Expr::And(xs) => join(f, xs, "AND"),
            Expr::Or(xs) => join(f, xs, "OR"),
            Expr::Not(x) => write!(f, "NOT {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    And,
    Or,
    Not,
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push(Tok::Open);
        } else if c == ')' {
            chars.next();
            out.push(Tok::Close);
        } else if c == '"' {
            chars.next();
            let mut w = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(c) => w.push(c),
                    None => return Err(Error::MalformedExpression("unterminated quote".into())),
                }
            }
            out.push(Tok::Word(w));
        } else {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                    break;
                }
                w.push(c);
                chars.next();
            }
            out.push(match w.as_str() {
                "AND" | "&&" => Tok::And,
                "OR" | "||" => Tok::Or,
                "NOT" | "!" => Tok::Not,
                _ => Tok::Word(w),
            });
        }
    }
    Ok(out)
}

/// Parses `a AND (b OR NOT c)`. Adjacent operands without an operator are
/// joined with AND; NOT binds tighter than AND, AND tighter than OR.
pub fn parse_expression(s: &str) -> Result<Expr> {
    struct P {
        toks: Vec<Tok>,
        pos: usize,
    }
    impl P {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }
        fn or(&mut self) -> Result<Expr> {
            let mut xs = vec![self.and()?];
            while self.peek() == Some(&Tok::Or) {
                self.pos += 1;
                xs.push(self.and()?);
            }
            Ok(if xs.len() == 1 {
                xs.pop().unwrap()
            } else {
                Expr::Or(xs)
            })
        }
        fn and(&mut self) -> Result<Expr> {
            let mut xs = vec![self.unary()?];
            loop {
                match self.peek() {
                    Some(Tok::And) => {
                        self.pos += 1;
                        xs.push(self.unary()?);
                    }
                    Some(Tok::Word(_) | Tok::Not | Tok::Open) => xs.push(self.unary()?),
                    _ => break,
                }
            }
            Ok(if xs.len() == 1 {
                xs.pop().unwrap()
            } else {
                Expr::And(xs)
            })
        }
        fn unary(&mut self) -> Result<Expr> {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Not) => {
                    self.pos += 1;
                    Ok(Expr::Not(Box::new(self.unary()?)))
                }
                Some(Tok::Open) => {
                    self.pos += 1;
                    let e = self.or()?;
                    if self.peek() != Some(&Tok::Close) {
                        return Err(Error::MalformedExpression("missing `)`".into()));
                    }
                    self.pos += 1;
                    Ok(e)
                }
                Some(Tok::Word(w)) => {
                    self.pos += 1;
                    Ok(Expr::Term(w))
                }
                Some(t) => Err(Error::MalformedExpression(format!("unexpected {t:?}"))),
                None => Err(Error::MalformedExpression(
                    "unexpected end of expression".into(),
                )),
            }
        }
    }
    let mut p = P {
        toks: lex(s)?,
        pos: 0,
    };
    if p.toks.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(Error::MalformedExpression(format!(
            "unexpected {:?}",
            p.toks[p.pos]
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub mode: SearchMode,
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximity_window: Option<usize>,
    #[serde(default)]
    pub use_synonyms: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert_expression: Option<Expr>,
}

impl Query {
    pub fn new(mode: SearchMode, terms: &[&str]) -> Self {
        Query {
            mode,
            terms: terms.iter().map(|t| t.to_string()).collect(),
            proximity_window: None,
            use_synonyms: false,
            expert_expression: None,
        }
    }

    pub fn window(mut self, w: usize) -> Self {
        self.proximity_window = Some(w);
        self
    }

    pub fn synonyms(mut self, on: bool) -> Self {
        self.use_synonyms = on;
        self
    }

    pub fn expert(expr: Expr) -> Self {
        Query {
            mode: SearchMode::Expert,
            terms: expr.terms().into_iter().map(str::to_string).collect(),
            proximity_window: None,
            use_synonyms: false,
            expert_expression: Some(expr),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mode == SearchMode::Expert {
            let e = self.expert_expression.as_ref().ok_or_else(|| {
                Error::MalformedExpression("expert search needs an expression".into())
            })?;
            e.validate()?;
            let mut positive = Vec::new();
            e.positive_terms(false, &mut positive);
            if positive.is_empty() {
                return Err(Error::MalformedExpression(
                    "expression has no positive term".into(),
                ));
            }
            return Ok(());
        }
        if self.terms.iter().all(|t| tokenize(t).is_empty()) {
            return Err(Error::EmptyQuery);
        }
        if self.mode == SearchMode::Proximity && self.proximity_window.is_none_or(|w| w == 0) {
            return Err(Error::MalformedExpression(
                "proximity search needs a positive window".into(),
            ));
        }
        Ok(())
    }
}

/// Synonym groups, one per line of a tab-separated file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymSet {
    groups: Vec<Vec<String>>,
}

impl SynonymSet {
    pub fn new(groups: Vec<Vec<String>>) -> Self {
        SynonymSet { groups }
    }

    pub fn parse(text: &str) -> Self {
        let groups = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|l| {
                l.split('\t')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .filter(|g| g.len() > 1)
            .collect();
        SynonymSet { groups }
    }

    /// Loads the file at `path`; a missing file is an empty set.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(t) => Ok(Self::parse(&t)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    /// `term` and every member of each group containing it, where members
    /// are compared after `normalize`.
    pub fn expand(&self, term: &str, normalize: &dyn Fn(&str) -> String) -> Vec<String> {
        let key = normalize(term);
        let mut out = vec![term.to_string()];
        for g in &self.groups {
            if g.iter().any(|m| normalize(m) == key) {
                for m in g {
                    if !out.iter().any(|o| normalize(o) == normalize(m)) {
                        out.push(m.clone());
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Posting {
    pub doc: String,
    pub positions: Vec<u32>,
    /// Byte spans of the tokens in the original body.
    pub offsets: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub doc: String,
    pub score: usize,
    pub highlights: Vec<Span>,
}

#[derive(Debug, Clone)]
struct IndexedDoc {
    hungarian: bool,
    keys: Vec<String>,
    offsets: Vec<(usize, usize)>,
}

/// Folded (and for Hungarian, stemmed) form of one token.
pub fn token_key(token: &str, hungarian: bool, stemmer: &dyn Stemmer) -> String {
    let folded = fold_str(token);
    if hungarian {
        stemmer.stem(&folded)
    } else {
        folded
    }
}

/// An occurrence of a query slot: first and last token position.
type Occ = (u32, u32);

pub struct Index {
    stemmer: Arc<dyn Stemmer>,
    postings: BTreeMap<String, BTreeMap<String, Posting>>,
    docs: BTreeMap<String, IndexedDoc>,
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Index")
            .field("terms", &self.postings.len())
            .field("docs", &self.docs.len())
            .finish()
    }
}

impl Index {
    pub fn new(stemmer: Arc<dyn Stemmer>) -> Self {
        Index {
            stemmer,
            postings: BTreeMap::new(),
            docs: BTreeMap::new(),
        }
    }

    pub fn build<'a>(
        docs: impl IntoIterator<Item = &'a DocumentRecord>,
        stemmer: Arc<dyn Stemmer>,
    ) -> Self {
        let mut idx = Index::new(stemmer);
        for d in docs {
            idx.index_document(d);
        }
        idx
    }

    pub fn stemmer(&self) -> &dyn Stemmer {
        self.stemmer.as_ref()
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    /// (Re)indexes `doc`, replacing any earlier postings for it.
    pub fn index_document(&mut self, doc: &DocumentRecord) {
        let celex = doc.celex().to_string();
        self.remove_document(&celex);
        let hungarian = doc.is_hungarian();
        let mut keys = Vec::new();
        let mut offsets = Vec::new();
        for (pos, (range, tok)) in tokenize(&doc.body).into_iter().enumerate() {
            let key = token_key(tok, hungarian, self.stemmer.as_ref());
            let p = self
                .postings
                .entry(key.clone())
                .or_default()
                .entry(celex.clone())
                .or_insert_with(|| Posting {
                    doc: celex.clone(),
                    positions: Vec::new(),
                    offsets: Vec::new(),
                });
            p.positions.push(pos as u32);
            p.offsets.push((range.start, range.end));
            keys.push(key);
            offsets.push((range.start, range.end));
        }
        self.docs.insert(
            celex,
            IndexedDoc {
                hungarian,
                keys,
                offsets,
            },
        );
    }

    pub fn remove_document(&mut self, celex: &str) {
        let Some(old) = self.docs.remove(celex) else {
            return;
        };
        for key in old.keys.iter().collect::<BTreeSet<_>>() {
            if let Some(m) = self.postings.get_mut(key) {
                m.remove(celex);
                if m.is_empty() {
                    self.postings.remove(key);
                }
            }
        }
    }

    /// Distinct index terms with their postings.
    pub fn terms(&self) -> impl Iterator<Item = (&str, Vec<&Posting>)> {
        self.postings
            .iter()
            .map(|(k, m)| (k.as_str(), m.values().collect()))
    }

    pub fn postings(&self, key: &str) -> Vec<&Posting> {
        self.postings
            .get(key)
            .map(|m| m.values().collect())
            .unwrap_or_default()
    }

    /// Normalized form used to compare synonym group members with a term.
    pub fn normalize_term(&self, term: &str) -> String {
        tokenize(term)
            .into_iter()
            .map(|(_, t)| token_key(t, true, self.stemmer.as_ref()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Alternatives of one query term: the term itself and, when enabled,
    /// its synonyms; each alternative is a token sequence.
    fn slot(&self, term: &str, synonyms: Option<&SynonymSet>) -> Vec<Vec<String>> {
        let alternatives = match synonyms {
            Some(s) => s.expand(term, &|t| self.normalize_term(t)),
            None => vec![term.to_string()],
        };
        alternatives
            .into_iter()
            .map(|a| {
                tokenize(&a)
                    .into_iter()
                    .map(|(_, t)| t.to_string())
                    .collect::<Vec<_>>()
            })
            .filter(|a| !a.is_empty())
            .collect()
    }

    /// Occurrences of a slot in every document containing it.
    fn occurrences(&self, slot: &[Vec<String>]) -> BTreeMap<String, Vec<Occ>> {
        let mut out: BTreeMap<String, BTreeSet<Occ>> = BTreeMap::new();
        for alt in slot {
            let stemmed: Vec<String> = alt
                .iter()
                .map(|t| token_key(t, true, self.stemmer.as_ref()))
                .collect();
            let folded: Vec<String> = alt
                .iter()
                .map(|t| token_key(t, false, self.stemmer.as_ref()))
                .collect();
            for (keys, hungarian) in [(&stemmed, true), (&folded, false)] {
                let Some(first) = self.postings.get(&keys[0]) else {
                    continue;
                };
                for (celex, posting) in first {
                    let doc = &self.docs[celex];
                    if doc.hungarian != hungarian {
                        continue;
                    }
                    for &p in &posting.positions {
                        let p = p as usize;
                        let fits = keys
                            .iter()
                            .enumerate()
                            .all(|(i, k)| doc.keys.get(p + i) == Some(k));
                        if fits {
                            out.entry(celex.clone())
                                .or_default()
                                .insert((p as u32, (p + keys.len() - 1) as u32));
                        }
                    }
                }
            }
        }
        out.into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect()
    }

    pub fn search(&self, q: &Query, thesaurus: &SynonymSet) -> Result<Vec<Hit>> {
        q.validate()?;
        let synonyms = q.use_synonyms.then_some(thesaurus);
        let terms: Vec<String> = match (&q.mode, &q.expert_expression) {
            (SearchMode::Expert, Some(e)) => e.terms().into_iter().map(str::to_string).collect(),
            _ => q
                .terms
                .iter()
                .filter(|t| !tokenize(t).is_empty())
                .cloned()
                .collect(),
        };
        let slots: Vec<BTreeMap<String, Vec<Occ>>> = terms
            .iter()
            .map(|t| self.occurrences(&self.slot(t, synonyms)))
            .collect();

        // A negated term can match documents that contain no query term.
        let candidates: BTreeSet<&String> = if q.mode == SearchMode::Expert {
            self.docs.keys().collect()
        } else {
            slots.iter().flat_map(|s| s.keys()).collect()
        };
        let mut hits = Vec::new();
        for celex in candidates {
            let per_slot: Vec<&[Occ]> = slots
                .iter()
                .map(|s| s.get(celex).map_or(&[][..], Vec::as_slice))
                .collect();
            let Some(matched) = match_mode(q, &terms, &per_slot) else {
                continue;
            };
            let doc = &self.docs[celex];
            let mut spans = BTreeSet::new();
            for (a, b) in matched {
                for p in a..=b {
                    let (s, e) = doc.offsets[p as usize];
                    spans.insert((s, e));
                }
            }
            hits.push(Hit {
                doc: celex.clone(),
                score: spans.len(),
                highlights: spans.into_iter().map(|(s, e)| Span::new(s, e)).collect(),
            });
        }
        hits.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.doc.cmp(&b.doc)));
        Ok(hits)
    }
}

/// Decides whether one document matches and returns the occurrences to
/// highlight. Shared by the index and by full-scan evaluation so both apply
/// identical mode semantics.
pub fn match_mode(q: &Query, terms: &[String], per_slot: &[&[Occ]]) -> Option<Vec<Occ>> {
    let all: Vec<Occ> = per_slot.iter().flat_map(|s| s.iter().copied()).collect();
    match q.mode {
        SearchMode::AnyWord => (!all.is_empty()).then_some(all),
        SearchMode::AllWords => per_slot.iter().all(|s| !s.is_empty()).then_some(all),
        SearchMode::ExactPhrase => {
            // Alternatives of different lengths can start at the same token,
            // so keep every occurrence that lies on some complete chain.
            let n = per_slot.len();
            let mut tail: Vec<Vec<Occ>> = vec![Vec::new(); n];
            tail[n - 1] = per_slot[n - 1].to_vec();
            for i in (0..n - 1).rev() {
                tail[i] = per_slot[i]
                    .iter()
                    .filter(|o| tail[i + 1].iter().any(|x| x.0 == o.1 + 1))
                    .copied()
                    .collect();
            }
            let mut reach = tail[0].clone();
            let mut out = reach.clone();
            for slot in &tail[1..] {
                reach = slot
                    .iter()
                    .filter(|o| reach.iter().any(|p| p.1 + 1 == o.0))
                    .copied()
                    .collect();
                out.extend(reach.iter().copied());
            }
            (!out.is_empty()).then_some(out)
        }
        SearchMode::Proximity => {
            let w = q.proximity_window.unwrap_or(0) as u32;
            if per_slot.iter().any(|s| s.is_empty()) {
                return None;
            }
            let mut marked = BTreeSet::new();
            for &(s, _) in &all {
                let inside = |o: &&Occ| o.0 >= s && o.1 <= s + w;
                if per_slot.iter().all(|slot| slot.iter().any(|o| inside(&o))) {
                    for slot in per_slot {
                        marked.extend(slot.iter().filter(|o| inside(o)).copied());
                    }
                }
            }
            (!marked.is_empty()).then(|| marked.into_iter().collect())
        }
        SearchMode::Expert => {
            let e = q.expert_expression.as_ref()?;
            let present = |t: &str| {
                terms
                    .iter()
                    .position(|x| x == t)
                    .is_some_and(|i| !per_slot[i].is_empty())
            };
            if !e.eval(&present) {
                return None;
            }
            let mut positive = Vec::new();
            e.positive_terms(false, &mut positive);
            let mut out = Vec::new();
            for t in positive {
                if let Some(i) = terms.iter().position(|x| x == t) {
                    out.extend(per_slot[i].iter().copied());
                }
            }
            Some(out)
        }
    }
}

/// Highlight spans of `hit` in `doc`.
pub fn highlight(doc: &DocumentRecord, hit: &Hit) -> Result<Vec<Span>> {
    if hit.doc != doc.celex() {
        return Err(Error::NotAHit(doc.celex().to_string()));
    }
    Ok(hit.highlights.clone())
}

/// The currently published index generation. Searches take a cheap handle
/// to one generation; publishing swaps in a new one for later searches.
#[derive(Debug)]
pub struct IndexHandle {
    current: RwLock<Arc<Index>>,
}

impl IndexHandle {
    pub fn new(index: Index) -> Self {
        IndexHandle {
            current: RwLock::new(Arc::new(index)),
        }
    }

    pub fn current(&self) -> Arc<Index> {
        self.current
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    pub fn publish(&self, index: Index) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(index);
    }
}
