//! Named entities: judges matched against the authority list, parties,
//! representatives and case subjects taken from labeled cue lines.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

use crate::extract::authority::AuthoritySet;
use crate::model::{EntityKind, NamedEntity, Span};
use crate::textnorm::{compact_fold, word_match};

static CUE_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?mi)^[ \t]*(a per tárgya|tárgy|subject matter|subject|felperes képviselője|alperes képviselője|jogi képviselő|képviselő|representative|felperes|kérelmező|indítványozó|applicant|alperes|defendant)[ \t]*:[ \t]*([^\r\n]*?)[ \t]*$",
    )
    .unwrap()
});

fn cue_kind(label: &str) -> EntityKind {
    let l = label.to_lowercase();
    if l.contains("tárgy") || l.starts_with("subject") {
        EntityKind::Subject
    } else if l.contains("képvisel") || l == "representative" {
        EntityKind::Representative
    } else if l == "alperes" || l == "defendant" {
        EntityKind::Defendant
    } else {
        EntityKind::Applicant
    }
}

/// Whitespace-separated words that start with an uppercase letter, with
/// surrounding punctuation trimmed.
fn name_words(body: &str) -> Vec<(Range<usize>, bool)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body
        .char_indices()
        .chain(std::iter::once((body.len(), ' ')))
    {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                let word = &body[s..i];
                let lead = word.len()
                    - word
                        .trim_start_matches(|c: char| !c.is_alphanumeric())
                        .len();
                let trimmed = word.trim_matches(|c: char| !c.is_alphanumeric());
                if !trimmed.is_empty() {
                    let r = s + lead..s + lead + trimmed.len();
                    let capital = trimmed.starts_with(char::is_uppercase);
                    out.push((r, capital));
                }
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn judges(body: &str, auth: &AuthoritySet) -> Vec<NamedEntity> {
    let words = name_words(body);
    let mut authority: Vec<(usize, &str, String)> = auth
        .judges
        .iter()
        .map(|j| {
            (
                j.split_whitespace().count(),
                j.as_str(),
                compact_fold(j).folded,
            )
        })
        .collect();
    // Longer names first so "Kovács János Péter" beats "Kovács János".
    authority.sort_by_key(|a| std::cmp::Reverse(a.0));

    let mut out = Vec::new();
    let mut i = 0;
    'words: while i < words.len() {
        if !words[i].1 {
            i += 1;
            continue;
        }
        for (n, name, compact) in &authority {
            let n = *n;
            if i + n <= words.len() && words[i..i + n].iter().all(|w| w.1) {
                let span = words[i].0.start..words[i + n - 1].0.end;
                let candidate: Vec<&str> =
                    words[i..i + n].iter().map(|w| &body[w.0.clone()]).collect();
                if word_match(&candidate.join(" "), name) {
                    out.push(entity(body, EntityKind::Judge, span, Some(name)));
                    i += n;
                    continue 'words;
                }
            }
            // The name written as one word, e.g. hyphenated.
            if n > 1 {
                let token = &body[words[i].0.clone()];
                let joined = compact_fold(token).folded;
                if !joined.is_empty() && strsim::osa_distance(&joined, compact) <= 1 {
                    out.push(entity(
                        body,
                        EntityKind::Judge,
                        words[i].0.clone(),
                        Some(name),
                    ));
                    i += 1;
                    continue 'words;
                }
            }
        }
        i += 1;
    }
    out
}

fn entity(
    body: &str,
    kind: EntityKind,
    span: Range<usize>,
    normalized: Option<&str>,
) -> NamedEntity {
    NamedEntity {
        kind,
        surface: body[span.clone()].to_string(),
        span: Span::from(span),
        normalized: normalized.map(str::to_string),
    }
}

/// Judges, parties, representatives and subjects mentioned in `body`,
/// ordered by position.
pub fn extract_named_entities(body: &str, auth: &AuthoritySet) -> Vec<NamedEntity> {
    let mut out = judges(body, auth);
    for c in CUE_LINE.captures_iter(body) {
        let value = c.get(2).unwrap();
        if value.as_str().is_empty() {
            continue;
        }
        let kind = cue_kind(&c[1]);
        let normalized = match kind {
            EntityKind::Subject => Some(
                auth.normalize_subject(value.as_str())
                    .unwrap_or(value.as_str()),
            ),
            _ => None,
        };
        out.push(entity(body, kind, value.range(), normalized));
    }
    out.sort_by_key(|e| (e.span.start, e.span.end, e.kind));
    out
}
