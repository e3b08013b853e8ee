//! Treaty article lists: "Articles 13 to 19, Article 48(2) to (5) and
//! Articles 49 and 50 of the Treaty on European Union", and the Hungarian
//! "EUMSZ 107. és 108. cikk (1) bekezdése" order.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

use crate::extract::authority::AuthoritySet;
use crate::extract::grammar::{new_ref, sentence_at, Accepted};
use crate::model::{DocRef, RefIssue, RefKey, RefKind};

/// Longest article range expanded; longer ranges keep only their endpoints'
/// first article.
const MAX_RANGE: u32 = 200;

/// How far past "of" an already recognized document may start for the list
/// to be read as pointing into that document.
const OF_DOC_REACH: usize = 40;

static EN_START: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bArticles?\s+\d").unwrap());
static EN_ITEM: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:Articles?\s+)?(\d{1,4})(?:\((\d{1,3})\))?(?:\s+to\s+(?:(\d{1,4})\b|\((\d{1,3})\)))?",
    )
    .unwrap()
});
static EN_SEP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\s*,\s*(?:and\s+)?|\s+and\s+)").unwrap());
static EN_OF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s+of\s+(?:the\s+)?").unwrap());

static HU_ITEM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,4})(?:\.?\s*[–-]\s*(\d{1,4}))?\.").unwrap());
static HU_SEP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\s*,\s*(?:és\s+)?|\s+és\s+)").unwrap());
static HU_CIKK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*cikk\w*").unwrap());
static HU_PARAGRAPH: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*\((\d{1,3})\)(?:\s*[–-]\s*\((\d{1,3})\))?\s*bekezd\w*").unwrap()
});

/// One parsed list entry: the articles it names and its text span.
#[derive(Debug, Clone, PartialEq)]
struct Item {
    span: Range<usize>,
    first: u32,
    last: u32,
    paragraphs: Option<(u32, u32)>,
}

fn parse_en_list(body: &str, start: usize, limit: usize) -> (Vec<Item>, usize) {
    let mut items = Vec::new();
    let mut pos = start;
    while let Some(c) = EN_ITEM.captures(&body[pos..limit]) {
        let m = c.get(0).unwrap();
        let n: u32 = c[1].parse().unwrap();
        let p: Option<u32> = c.get(2).map(|g| g.as_str().parse().unwrap());
        let to_article: Option<u32> = c.get(3).map(|g| g.as_str().parse().unwrap());
        let to_par: Option<u32> = c.get(4).map(|g| g.as_str().parse().unwrap());
        let mut span = pos..pos + m.end();
        let (last, paragraphs) = match (p, to_article, to_par) {
            (Some(p), None, Some(q)) if q >= p => (n, Some((p, q))),
            (Some(p), _, _) => {
                // A paragraph followed by an article range is not a shape
                // the lists use; keep the article and its paragraph only.
                span.end = pos + c.get(2).unwrap().end() + 1;
                (n, Some((p, p)))
            }
            (None, Some(m), _) if m >= n && m - n <= MAX_RANGE => (m, None),
            (None, None, None) => (n, None),
            _ => {
                span.end = pos + c.get(1).unwrap().end();
                (n, None)
            }
        };
        if n == 0 {
            break;
        }
        items.push(Item {
            span: span.clone(),
            first: n,
            last,
            paragraphs,
        });
        pos = span.end;
        match EN_SEP.find(&body[pos..limit]) {
            Some(sep) if EN_ITEM.is_match(&body[pos + sep.end()..limit]) => pos += sep.end(),
            _ => break,
        }
    }
    (items, pos)
}

fn item_refs(body: &str, item: &Item, key: &RefKey) -> Vec<DocRef> {
    let mut out = Vec::new();
    for article in item.first..=item.last {
        let span = if article == item.first {
            item.span.clone()
        } else {
            item.span.end..item.span.end
        };
        let mut r = new_ref(body, span, RefKind::EuTreatyArticle, key.clone());
        r.article = Some(article);
        r.paragraphs = item.paragraphs;
        out.push(r);
    }
    out
}

fn emit(body: &str, items: &[Item], treaty: Option<&str>, acc: &mut Accepted) {
    for item in items {
        if !acc.is_free(&item.span) {
            continue;
        }
        let key = match treaty {
            Some(celex) => RefKey::Celex {
                celex: celex.to_string(),
            },
            None => RefKey::Unknown {
                raw: body[item.span.clone()].to_string(),
            },
        };
        for mut r in item_refs(body, item, &key) {
            r.target = treaty.map(str::to_string);
            if treaty.is_none() {
                r.issue = Some(RefIssue::UnresolvedTreaty);
            }
            acc.push(r);
        }
    }
}

/// English lists: "Article(s) ... [of [the] <treaty>]".
fn english(body: &str, sentences: &[Range<usize>], auth: &AuthoritySet, acc: &mut Accepted) {
    let mut from = 0;
    while let Some(m) = EN_START.find_at(body, from) {
        from = m.end();
        if !acc.is_free(&(m.start()..m.end())) {
            continue;
        }
        let limit = sentence_at(sentences, m.start())
            .map(|i| sentences[i].end.max(m.end()))
            .unwrap_or(body.len());
        let (items, end) = parse_en_list(body, m.start(), limit);
        if items.is_empty() {
            continue;
        }
        from = end;

        let after_of = EN_OF.find(&body[end..limit]).map(|of| end + of.end());
        if let Some(at) = after_of {
            let rest = &body[at..limit];
            if let Some((span, treaty)) = auth
                .find_treaties(rest)
                .into_iter()
                .next()
                .filter(|(s, _)| s.start == 0)
            {
                let celex = treaty.celex.clone();
                acc.consume(at + span.start..at + span.end);
                emit(body, &items, Some(&celex), acc);
                from = at + span.end;
                continue;
            }
            // "Article 9 of Directive 2016/2284": the article annotates the
            // reference to that document.
            let reach = (at + OF_DOC_REACH).min(limit);
            if let Some(doc) = acc
                .refs
                .iter_mut()
                .filter(|r| {
                    r.span.start >= at && r.span.start < reach && r.kind != RefKind::EuTreatyArticle
                })
                .min_by_key(|r| r.span.start)
            {
                if items.len() == 1 && items[0].first == items[0].last && doc.article.is_none() {
                    doc.article = Some(items[0].first);
                    doc.paragraphs = items[0].paragraphs;
                }
                continue;
            }
        }
        emit(body, &items, None, acc);
    }
}

/// Hungarian lists follow the treaty name: "EUMSZ 107. és 108. cikk".
fn hungarian(body: &str, sentences: &[Range<usize>], auth: &AuthoritySet, acc: &mut Accepted) {
    for (name, treaty) in auth.find_treaties(body) {
        if !acc.is_free(&name) {
            continue;
        }
        let limit = sentence_at(sentences, name.start)
            .map(|i| sentences[i].end.max(name.end))
            .unwrap_or(body.len());
        let mut pos = name.end;
        let mut items: Vec<Item> = Vec::new();
        loop {
            let ws = body[pos..limit].len() - body[pos..limit].trim_start().len();
            let Some(c) = HU_ITEM.captures(&body[pos + ws..limit]) else {
                break;
            };
            let start = pos + ws;
            let first: u32 = c[1].parse().unwrap();
            let last: u32 = c.get(2).map_or(first, |g| g.as_str().parse().unwrap());
            if first == 0 || last < first || last - first > MAX_RANGE {
                break;
            }
            let end = start + c.get(0).unwrap().end();
            items.push(Item {
                span: start..end,
                first,
                last,
                paragraphs: None,
            });
            pos = end;
            match HU_SEP.find(&body[pos..limit]) {
                Some(sep) if HU_ITEM.is_match(&body[pos + sep.end()..limit]) => pos += sep.end(),
                _ => break,
            }
        }
        let Some(cikk) = HU_CIKK.find(&body[pos..limit]) else {
            continue;
        };
        let Some(last) = items.last_mut() else {
            continue;
        };
        last.span.end = pos + cikk.end();
        if let Some(p) = HU_PARAGRAPH.captures(&body[last.span.end..limit]) {
            let from: u32 = p[1].parse().unwrap();
            let to: u32 = p.get(2).map_or(from, |g| g.as_str().parse().unwrap());
            if to >= from && last.first == last.last {
                last.paragraphs = Some((from, to));
                last.span.end += p.get(0).unwrap().end();
            }
        }
        acc.consume(name);
        emit(body, &items, Some(&treaty.celex), acc);
    }
}

pub(crate) fn article_lists(
    body: &str,
    sentences: &[Range<usize>],
    auth: &AuthoritySet,
    acc: &mut Accepted,
) {
    english(body, sentences, auth, acc);
    hungarian(body, sentences, auth, acc);
}

/// Expands the article lists in one sentence into one reference per article.
pub fn expand_article_list(sentence: &str, auth: &AuthoritySet) -> Vec<DocRef> {
    let whole = 0..sentence.len();
    let mut acc = Accepted::default();
    article_lists(sentence, std::slice::from_ref(&whole), auth, &mut acc);
    let mut refs = acc.refs;
    refs.sort_by_key(|r| (r.span.start, r.span.end, r.article));
    refs
}
