//! Alias and acronym definitions, found on a body whose references are
//! replaced by opaque tokens, and their later occurrences.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

use crate::extract::authority::AuthoritySet;
use crate::model::{
    AcronymOccurrence, AliasBinding, BindingKind, BindingTarget, DocRef, RefKey, RefKind, Span,
};
use crate::textnorm::{fold, fold_str};

const TOKEN_OPEN: char = '⟦';
const TOKEN_CLOSE: char = '⟧';

/// Parenthesized names that follow a reference without naming it.
const ALIAS_STOPLIST: &[&str] = &["eu", "ec", "ek", "eek", "eec", "egk", "euratom", "hl", "oj"];

/// Words skipped when matching an acronym's letters against the words
/// before it.
const ACRONYM_STOPWORDS: &[&str] = &[
    "of", "for", "and", "the", "on", "in", "to", "a", "an", "az", "es", "szolo", "de", "des", "du",
    "la", "le",
];

const MAX_ALIAS_WORDS: usize = 6;
const MAX_ACRONYM_WORDS: usize = 12;

static DOC_ALIAS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"⟦R(\d+)⟧\s*\((?:(?:hereinafter(?:\s+referred\s+to\s+as)?|a\s+továbbiakban)[:,]?\s*)?(?:the\s+)?["„“”'‘’]?([^()"„“”'‘’⟦⟧]{1,80}?)["„“”'‘’]?\)"#,
    )
    .unwrap()
});
static ACRONYM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\(([A-ZÁÉÍÓÖŐÚÜŰ][A-ZÁÉÍÓÖŐÚÜŰ0-9]{1,9})\)").unwrap());
static DOC_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^-(\w+)").unwrap());

/// A body with every non-empty reference span replaced by `⟦R<i>⟧`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedBody {
    pub text: String,
    /// (masked range, original range, reference index), in order.
    tokens: Vec<(Range<usize>, Range<usize>, usize)>,
}

impl MaskedBody {
    pub fn new(body: &str, refs: &[DocRef]) -> Self {
        let mut order: Vec<usize> = (0..refs.len())
            .filter(|&i| !refs[i].span.is_empty())
            .collect();
        order.sort_by_key(|&i| refs[i].span.start);
        let mut text = String::with_capacity(body.len());
        let mut tokens = Vec::new();
        let mut pos = 0;
        for i in order {
            let span = refs[i].span.range();
            if span.start < pos {
                continue;
            }
            text.push_str(&body[pos..span.start]);
            let start = text.len();
            text.push_str(&format!("{TOKEN_OPEN}R{i}{TOKEN_CLOSE}"));
            tokens.push((start..text.len(), span.clone(), i));
            pos = span.end;
        }
        text.push_str(&body[pos..]);
        MaskedBody { text, tokens }
    }

    /// Original byte offset of a masked offset lying outside any token.
    pub fn to_original(&self, masked: usize) -> usize {
        let mut shift: isize = 0;
        for (m, o, _) in &self.tokens {
            if m.start >= masked {
                break;
            }
            if masked < m.end {
                return o.start;
            }
            shift += o.len() as isize - m.len() as isize;
        }
        (masked as isize + shift) as usize
    }

    pub fn range_to_original(&self, r: Range<usize>) -> Range<usize> {
        self.to_original(r.start)..self.to_original(r.end)
    }

    fn is_token_char(&self, masked: usize) -> bool {
        self.tokens
            .iter()
            .any(|(m, _, _)| m.start <= masked && masked < m.end)
    }
}

fn is_stopword(word: &str) -> bool {
    ACRONYM_STOPWORDS.contains(&fold_str(word).as_str())
}

/// Matches acronym letters against words, back to front. Each content word
/// consumes the first 1 to 3 letters it starts with; stopwords are skipped.
/// Returns the index of the first word used.
fn match_initials(letters: &[char], words: &[&str]) -> Option<usize> {
    fn go(letters: &[char], words: &[&str], last_used: Option<usize>) -> Option<usize> {
        if letters.is_empty() {
            return last_used;
        }
        let (word, rest) = words.split_last()?;
        if is_stopword(word) {
            return go(letters, rest, last_used);
        }
        let folded: Vec<char> = fold_str(word).chars().collect();
        for k in 1..=3.min(letters.len()) {
            let tail = &letters[letters.len() - k..];
            if folded.len() >= k && folded[..k] == *tail {
                if let Some(i) = go(&letters[..letters.len() - k], rest, Some(rest.len())) {
                    return Some(i);
                }
            }
        }
        None
    }
    let letters: Vec<char> = letters
        .iter()
        .map(|c| fold_str(&c.to_string()).chars().next().unwrap())
        .collect();
    // The word right before the parenthesis must take part.
    if words.last().is_none_or(|w| is_stopword(w)) {
        return None;
    }
    go(&letters, words, None)
}

/// Word spans (within `text[..end]`) back to the nearest clause break.
fn words_before(text: &str, end: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut cursor = end;
    let head = &text[..end];
    for (i, c) in head.char_indices().rev() {
        if c.is_whitespace() {
            if i + c.len_utf8() < cursor {
                out.push(i + c.len_utf8()..cursor);
            }
            cursor = i;
        } else if matches!(
            c,
            ',' | ';' | ':' | '.' | '(' | ')' | TOKEN_CLOSE | '"' | '„' | '”'
        ) {
            break;
        }
        if out.len() >= MAX_ACRONYM_WORDS {
            return out.into_iter().rev().collect();
        }
    }
    let stop = head[..cursor]
        .char_indices()
        .rev()
        .find(|(_, c)| !c.is_alphanumeric() && *c != '-')
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    if stop < cursor {
        out.push(stop..cursor);
    }
    out.into_iter().rev().collect()
}

/// Replaces references by tokens and collects alias and acronym
/// definitions. The first definition of a (folded) alias text wins.
pub fn mask_and_bind_aliases(body: &str, refs: &[DocRef]) -> (MaskedBody, Vec<AliasBinding>) {
    let masked = MaskedBody::new(body, refs);
    let text = &masked.text;
    let mut bindings: Vec<AliasBinding> = Vec::new();
    let push = |b: AliasBinding, bindings: &mut Vec<AliasBinding>| {
        let key = fold_str(&b.alias_text);
        if !bindings.iter().any(|x| fold_str(&x.alias_text) == key) {
            bindings.push(b);
        }
    };

    let mut alias_parens = Vec::new();
    for c in DOC_ALIAS.captures_iter(text) {
        let alias = c.get(2).unwrap();
        let alias_text = alias.as_str().trim();
        let idx: usize = c[1].parse().unwrap();
        if alias_text.is_empty()
            || !alias_text.starts_with(char::is_alphabetic)
            || alias_text.split_whitespace().count() > MAX_ALIAS_WORDS
            || ALIAS_STOPLIST.contains(&fold_str(alias_text).as_str())
        {
            continue;
        }
        let r = &refs[idx];
        let lead = alias.as_str().len() - alias.as_str().trim_start().len();
        let start = alias.start() + lead;
        alias_parens.push(c.get(0).unwrap().range());
        push(
            AliasBinding {
                alias_text: alias_text.to_string(),
                target: BindingTarget::Document {
                    key: r.key.clone(),
                    target: r.target.clone(),
                    kind: r.kind,
                },
                kind: BindingKind::DocAlias,
                defined_at: Span::from(masked.range_to_original(start..start + alias_text.len())),
            },
            &mut bindings,
        );
    }

    for c in ACRONYM.captures_iter(text) {
        let whole = c.get(0).unwrap();
        if alias_parens
            .iter()
            .any(|p| p.start <= whole.start() && whole.end() <= p.end)
        {
            continue;
        }
        let acronym = c.get(1).unwrap();
        let before = text[..whole.start()].trim_end();
        let words = words_before(text, before.len());
        let word_strs: Vec<&str> = words.iter().map(|r| &text[r.clone()]).collect();
        let letters: Vec<char> = acronym
            .as_str()
            .chars()
            .filter(|c| c.is_alphabetic())
            .collect();
        let Some(first) = match_initials(&letters, &word_strs) else {
            continue;
        };
        let full = words[first].start..words.last().unwrap().end;
        if masked.is_token_char(full.start) {
            continue;
        }
        push(
            AliasBinding {
                alias_text: acronym.as_str().to_string(),
                target: BindingTarget::Entity {
                    full_form: text[full].to_string(),
                },
                kind: BindingKind::Acronym,
                defined_at: Span::from(masked.range_to_original(acronym.range())),
            },
            &mut bindings,
        );
    }
    bindings.sort_by_key(|b| b.defined_at.start);
    (masked, bindings)
}

/// Form letter used for institution documents named `ACRO-<word>`.
fn doc_form(word: &str) -> Option<&'static str> {
    let w = fold_str(word);
    if w.starts_with("directive") || w.starts_with("iranyelv") {
        Some("DIRECTIVE")
    } else if w.starts_with("regulation") || w.starts_with("rendelet") {
        Some("REGULATION")
    } else if w.starts_with("decision") || w.starts_with("hatarozat") {
        Some("DECISION")
    } else {
        None
    }
}

fn boundary_ok(text: &str, r: &Range<usize>) -> bool {
    let before = text[..r.start].chars().next_back();
    let after = text[r.end..].chars().next();
    before.is_none_or(|c| !c.is_alphanumeric() && c != '-')
        && after.is_none_or(|c| !c.is_alphanumeric())
}

/// Later occurrences of bound aliases: document aliases become references,
/// `ACRO-<doc word>` compounds become institution-document references, and
/// bare acronyms become acronym occurrences.
pub fn link_alias_occurrences(
    body: &str,
    masked: &MaskedBody,
    bindings: &[AliasBinding],
    auth: &AuthoritySet,
) -> (Vec<DocRef>, Vec<AcronymOccurrence>) {
    let text = &masked.text;
    let folded = fold(text);
    let mut claimed: Vec<Range<usize>> = Vec::new();
    let mut refs = Vec::new();
    let mut acronyms = Vec::new();

    let mut order: Vec<&AliasBinding> = bindings.iter().collect();
    order.sort_by_key(|b| std::cmp::Reverse(b.alias_text.len()));
    for b in order {
        let needle = fold_str(&b.alias_text);
        if needle.is_empty() {
            continue;
        }
        let mut from = 0;
        while let Some(pos) = folded.folded[from..].find(&needle) {
            let at = from + pos;
            from = at + needle.len();
            let mr = folded.source_span(at..at + needle.len());
            let orig = masked.range_to_original(mr.clone());
            if orig.start <= b.defined_at.start || !boundary_ok(text, &mr) {
                continue;
            }
            if text[..mr.start].ends_with('(') && text[mr.end..].starts_with(')') {
                // A repeated definition.
                continue;
            }
            if claimed.iter().any(|c| c.start < mr.end && mr.start < c.end) {
                continue;
            }
            match &b.target {
                BindingTarget::Document { key, target, .. } => {
                    claimed.push(mr.clone());
                    refs.push(DocRef {
                        span: Span::from(orig.clone()),
                        kind: RefKind::Alias,
                        raw: body[orig].to_string(),
                        key: key.clone(),
                        target: target.clone(),
                        article: None,
                        paragraphs: None,
                        context: String::new(),
                        resolved: false,
                        issue: None,
                    });
                }
                BindingTarget::Entity { full_form } => {
                    if let Some(c) = DOC_WORD.captures(&text[mr.end..]) {
                        let Some(form) = doc_form(&c[1]) else {
                            continue;
                        };
                        let whole = mr.start..mr.end + c.get(0).unwrap().end();
                        let orig = masked.range_to_original(whole.clone());
                        let (key, target) = match auth.institution_doc(full_form, form) {
                            Some(d) => (
                                RefKey::Celex {
                                    celex: d.celex.clone(),
                                },
                                Some(d.celex.clone()),
                            ),
                            None => (
                                RefKey::InstitutionDoc {
                                    institution: full_form.clone(),
                                    form: form.to_string(),
                                },
                                None,
                            ),
                        };
                        claimed.push(whole);
                        refs.push(DocRef {
                            span: Span::from(orig.clone()),
                            kind: RefKind::AcronymDoc,
                            raw: body[orig].to_string(),
                            key,
                            target,
                            article: None,
                            paragraphs: None,
                            context: String::new(),
                            resolved: false,
                            issue: None,
                        });
                    } else {
                        claimed.push(mr.clone());
                        acronyms.push(AcronymOccurrence {
                            span: Span::from(orig),
                            acronym: b.alias_text.clone(),
                            full_form: full_form.clone(),
                        });
                    }
                }
            }
        }
    }
    refs.sort_by_key(|r| r.span.start);
    acronyms.sort_by_key(|a| a.span.start);
    (refs, acronyms)
}
