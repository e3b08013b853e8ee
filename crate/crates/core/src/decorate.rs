//! Presentation markup for a document body: references become links or
//! `missing` markers and acronyms carry their expansion.

use serde::Serialize;

use crate::graph::CitationGraph;
use crate::model::{DocId, DocumentRecord};
use crate::store::ReadSnapshot;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecoratedDocument {
    pub doc: DocId,
    pub markup: String,
    pub link_count: usize,
    pub missing_count: usize,
}

fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            _ => out.push(c),
        }
    }
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("&quot;"),
            _ => escape_text(c.encode_utf8(&mut [0; 4]), &mut out),
        }
    }
    out
}

enum Wrap {
    Link(String),
    Missing(Option<String>),
    Abbr(String),
}

/// Wraps every reference and acronym occurrence of `doc`. Resolved
/// references link to the lead document of the target's dossier; a
/// reference whose target is absent from the snapshot is marked missing.
pub fn decorate(
    doc: &DocumentRecord,
    snapshot: &ReadSnapshot,
    graph: &CitationGraph,
) -> DecoratedDocument {
    let mut wraps: Vec<(usize, usize, Wrap)> = Vec::new();
    let (mut link_count, mut missing_count) = (0, 0);
    for r in &doc.references {
        let target = r.target.as_deref().filter(|t| snapshot.contains(t));
        let wrap = match (r.resolved, target) {
            (true, Some(t)) => {
                link_count += 1;
                let lead = graph.dossier_of(t).map_or(t, |d| d.lead.as_str());
                Wrap::Link(lead.to_string())
            }
            _ => {
                missing_count += 1;
                let absent = r.target.as_deref().filter(|t| !snapshot.contains(t));
                Wrap::Missing(absent.map(str::to_string))
            }
        };
        wraps.push((r.span.start, r.span.end, wrap));
    }
    for a in &doc.acronyms {
        wraps.push((a.span.start, a.span.end, Wrap::Abbr(a.full_form.clone())));
    }
    // Zero-width markers at a position come before a wrap starting there.
    wraps.sort_by_key(|w| (w.0, w.1));

    let body = &doc.body;
    let mut out = String::with_capacity(body.len() + wraps.len() * 40);
    let mut pos = 0;
    for (start, end, wrap) in wraps {
        if start < pos
            || end > body.len()
            || !body.is_char_boundary(start)
            || !body.is_char_boundary(end)
        {
            // Extraction never produces overlapping spans; a corrupt record
            // keeps its text rather than nesting markup.
            match wrap {
                Wrap::Link(_) => link_count -= 1,
                Wrap::Missing(_) => missing_count -= 1,
                Wrap::Abbr(_) => {}
            }
            continue;
        }
        escape_text(&body[pos..start], &mut out);
        let inner = &body[start..end];
        match wrap {
            Wrap::Link(t) => {
                out.push_str(&format!("<a href=\"/documents/{}\">", escape_attr(&t)));
                escape_text(inner, &mut out);
                out.push_str("</a>");
            }
            Wrap::Missing(t) => {
                match t {
                    Some(t) => out.push_str(&format!(
                        "<span class=\"missing\" data-target=\"{}\">",
                        escape_attr(&t)
                    )),
                    None => out.push_str("<span class=\"missing\">"),
                }
                escape_text(inner, &mut out);
                out.push_str("</span>");
            }
            Wrap::Abbr(full) => {
                out.push_str(&format!("<abbr title=\"{}\">", escape_attr(&full)));
                escape_text(inner, &mut out);
                out.push_str("</abbr>");
            }
        }
        pos = end;
    }
    escape_text(&body[pos..], &mut out);
    DecoratedDocument {
        doc: doc.id.clone(),
        markup: out,
        link_count,
        missing_count,
    }
}

/// Text content of decorated markup: tags removed, entities decoded.
pub fn strip_tags(markup: &str) -> String {
    let mut text = String::with_capacity(markup.len());
    let mut rest = markup;
    while let Some(i) = rest.find('<') {
        text.push_str(&rest[..i]);
        match rest[i..].find('>') {
            Some(j) => rest = &rest[i + j + 1..],
            None => {
                rest = &rest[i..];
                break;
            }
        }
    }
    text.push_str(rest);
    html_escape::decode_html_entities(&text).into_owned()
}
