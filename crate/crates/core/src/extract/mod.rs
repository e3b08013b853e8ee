//! Reference, alias, acronym and named-entity extraction.
//!
//! The pipeline runs per document: sentence split, reference grammars,
//! masking of references, alias and acronym definitions, occurrence linking,
//! named entities, and finally context snippets.

mod aliases;
mod articles;
pub mod authority;
mod entities;
mod grammar;
mod snippet;

use std::ops::Range;

pub use aliases::{link_alias_occurrences, mask_and_bind_aliases, MaskedBody};
pub use articles::expand_article_list;
pub use authority::{AuthoritySet, Court, InstitutionDoc, NameMatcher, Treaty};
pub use entities::extract_named_entities;
pub use grammar::KEYWORD_WINDOW;
pub use snippet::{context_snippet, SNIPPET_BUDGET};

use crate::identifiers::parse_celex;
use crate::model::{
    AcronymOccurrence, AliasBinding, DocRef, DocumentRecord, NamedEntity, RefIssue,
};
use crate::textnorm::split_sentences;

/// Everything extraction derives from one body.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub references: Vec<DocRef>,
    pub entities: Vec<NamedEntity>,
    pub aliases: Vec<AliasBinding>,
    pub acronyms: Vec<AcronymOccurrence>,
}

/// Sentence range around `span`, widened when the span crosses a boundary.
fn enclosing_sentence(
    sentences: &[Range<usize>],
    span: Range<usize>,
    body_len: usize,
) -> Range<usize> {
    let first = grammar::sentence_at(sentences, span.start);
    let last = grammar::sentence_at(sentences, span.end.saturating_sub(1).max(span.start));
    match (first, last) {
        (Some(a), Some(b)) => {
            let s = &sentences[a];
            let e = &sentences[b];
            s.start.min(span.start)..e.end.max(span.end)
        }
        _ => 0..body_len,
    }
}

fn attach_snippets(body: &str, sentences: &[Range<usize>], refs: &mut [DocRef]) {
    for r in refs {
        let sentence = enclosing_sentence(sentences, r.span.range(), body.len());
        r.context = context_snippet(body, sentence, r.span.range());
    }
}

/// Document references in `body`, with context snippets, unresolved.
pub fn extract_references(body: &str, auth: &AuthoritySet) -> Vec<DocRef> {
    let sentences = split_sentences(body);
    let mut refs = grammar::recognize(body, &sentences, auth);
    attach_snippets(body, &sentences, &mut refs);
    refs
}

/// Runs the full pipeline over `body`. References come back unresolved; see
/// [`resolve_references`].
pub fn extract(body: &str, auth: &AuthoritySet) -> Extraction {
    let sentences = split_sentences(body);
    let mut refs = grammar::recognize(body, &sentences, auth);
    let (masked, bindings) = mask_and_bind_aliases(body, &refs);
    let (linked, acronyms) = link_alias_occurrences(body, &masked, &bindings, auth);
    refs.extend(linked);
    refs.sort_by_key(|r| (r.span.start, r.span.end, r.article));
    attach_snippets(body, &sentences, &mut refs);
    Extraction {
        references: refs,
        entities: extract_named_entities(body, auth),
        aliases: bindings,
        acronyms,
    }
}

/// Replaces the extraction results stored on `doc`.
pub fn apply(doc: &mut DocumentRecord, ex: Extraction) {
    doc.references = ex.references;
    doc.entities = ex.entities;
    doc.aliases = ex.aliases;
    doc.acronyms = ex.acronyms;
}

/// Looks referenced documents up in a repository.
pub trait Resolver {
    /// Celex of the stored document `r` points to, if any.
    fn resolve(&self, r: &DocRef) -> Option<String>;
}

/// Whether a reference is specific enough to be looked up at all.
pub fn is_resolvable(r: &DocRef) -> bool {
    !matches!(
        r.issue,
        Some(RefIssue::AmbiguousReference | RefIssue::UnresolvedTreaty | RefIssue::MissingCourt)
    )
}

/// Sets `target` and `resolved` on every reference. A Celex computed from
/// the reference text is kept as the target even when the repository
/// lacks that document.
pub fn resolve_references(refs: &mut [DocRef], resolver: &dyn Resolver) {
    for r in refs {
        if !is_resolvable(r) {
            r.resolved = false;
            continue;
        }
        match resolver.resolve(r) {
            Some(celex) => {
                r.target = Some(celex);
                r.resolved = true;
            }
            None => {
                r.resolved = false;
                if r.target.as_deref().is_some_and(|t| parse_celex(t).is_err()) {
                    r.target = None;
                }
            }
        }
    }
}
