//! Document-reference grammars over running text.

use std::ops::Range;

use crate::extract::articles;
use crate::extract::authority::AuthoritySet;
use crate::identifiers::{
    canonical_ab_number, canonical_hu_decision, parse_ecli, scan, CelexParts, EuCaseNumber,
};
use crate::model::{DocRef, RefIssue, RefKey, RefKind, Span};
use crate::textnorm::fold_str;

/// Tokens of context on each side inspected for disambiguating keywords.
pub const KEYWORD_WINDOW: usize = 3;

const REGULATION_WORDS: &[&str] = &["rendelet", "regulation"];
const DIRECTIVE_WORDS: &[&str] = &["iranyelv", "directive"];

/// Accepted references plus spans consumed without producing a reference
/// (e.g. the treaty name closing an article list).
#[derive(Debug, Default)]
pub(crate) struct Accepted {
    pub refs: Vec<DocRef>,
    pub taken: Vec<Range<usize>>,
}

impl Accepted {
    pub fn is_free(&self, r: &Range<usize>) -> bool {
        self.taken
            .iter()
            .all(|t| r.end <= t.start || t.end <= r.start)
    }

    pub fn push(&mut self, r: DocRef) -> bool {
        let range = r.span.range();
        if !range.is_empty() && !self.is_free(&range) {
            return false;
        }
        if !range.is_empty() {
            self.taken.push(range);
        }
        self.refs.push(r);
        true
    }

    pub fn consume(&mut self, r: Range<usize>) {
        self.taken.push(r);
    }
}

pub(crate) fn new_ref(body: &str, span: Range<usize>, kind: RefKind, key: RefKey) -> DocRef {
    DocRef {
        raw: body[span.clone()].to_string(),
        span: Span::from(span),
        kind,
        key,
        target: None,
        article: None,
        paragraphs: None,
        context: String::new(),
        resolved: false,
        issue: None,
    }
}

/// Index of the sentence containing byte `pos`, or the last one starting
/// before it.
pub(crate) fn sentence_at(sentences: &[Range<usize>], pos: usize) -> Option<usize> {
    let idx = sentences.partition_point(|s| s.start <= pos);
    idx.checked_sub(1)
}

fn window_tokens(before: &str, after: &str) -> (Vec<String>, Vec<String>) {
    let split = |s: &str| -> Vec<String> {
        s.split(|c: char| c.is_whitespace() || c == '-')
            .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let b = split(before);
    let a = split(after);
    let b = b[b.len().saturating_sub(KEYWORD_WINDOW)..].to_vec();
    let a = a.into_iter().take(KEYWORD_WINDOW).collect();
    (b, a)
}

fn has_keyword(tokens: &[String], words: &[&str]) -> bool {
    tokens
        .iter()
        .any(|t| words.iter().any(|w| fold_str(t).starts_with(w)))
}

fn plausible_year(s: &str) -> bool {
    s.len() == 4 && s.parse::<u16>().is_ok_and(|y| (1950..=2099).contains(&y))
}

fn legislation_celex(year: &str, descriptor: &str, number: &str) -> Option<String> {
    let year: u16 = year.parse().ok()?;
    let serial: u32 = number.parse().ok()?;
    let parts = CelexParts::new(3, year, descriptor, serial);
    (serial > 0 && parts.is_valid()).then(|| parts.to_string())
}

pub(crate) fn hu_decisions(
    body: &str,
    sentences: &[Range<usize>],
    auth: &AuthoritySet,
    acc: &mut Accepted,
) {
    for m in scan::HU_DECISION.find_iter(body) {
        let mut end = m.end();
        let rest = &body[end..];
        if rest.starts_with('.') && !rest[1..].starts_with(|c: char| c.is_alphanumeric()) {
            end += 1;
        }
        let Some(number) = canonical_hu_decision(&body[m.start()..end]) else {
            continue;
        };
        let sentence = sentence_at(sentences, m.start())
            .map(|i| sentences[i].clone())
            .unwrap_or(0..body.len());
        let before = &body[sentence.start..m.start()];
        let court = auth
            .find_courts(before)
            .last()
            .and_then(|(_, id)| auth.court_name(*id))
            .map(str::to_string);
        let mut r = new_ref(
            body,
            m.start()..end,
            RefKind::HuDecision,
            RefKey::HuDecision {
                court: court.clone(),
                number,
            },
        );
        if court.is_none() {
            r.issue = Some(RefIssue::MissingCourt);
        }
        acc.push(r);
    }
}

pub(crate) fn eclis(body: &str, acc: &mut Accepted) {
    for m in scan::ECLI.find_iter(body) {
        let Ok(ecli) = parse_ecli(m.as_str()) else {
            continue;
        };
        let kind = match ecli.country.to_ascii_uppercase().as_str() {
            "EU" => RefKind::EuCase,
            "HU" => RefKind::HuDecision,
            _ => continue,
        };
        let canonical = format!(
            "ECLI:{}:{}:{}:{}",
            ecli.country.to_ascii_uppercase(),
            ecli.court.to_ascii_uppercase(),
            ecli.year,
            ecli.number.to_ascii_uppercase()
        );
        acc.push(new_ref(
            body,
            m.range(),
            kind,
            RefKey::Ecli { ecli: canonical },
        ));
    }
}

pub(crate) fn eu_cases(body: &str, acc: &mut Accepted) {
    for m in scan::EU_CASE.find_iter(body) {
        let Ok(n) = m.as_str().parse::<EuCaseNumber>() else {
            continue;
        };
        acc.push(new_ref(
            body,
            m.range(),
            RefKind::EuCase,
            RefKey::EuCase {
                case_number: n.to_string(),
            },
        ));
    }
}

/// `N/YYYY` and `YYYY/N` numbers: regulations, directives and AB decisions,
/// told apart by orientation and by keywords in a small token window.
pub(crate) fn number_years(body: &str, sentences: &[Range<usize>], acc: &mut Accepted) {
    for caps in scan::NUMBER_YEAR.captures_iter(body) {
        let m = caps.get(0).unwrap();
        if !acc.is_free(&m.range()) {
            continue;
        }
        // Part of a longer slash-separated number.
        if body[..m.start()].ends_with('/')
            || body[m.end()..].starts_with(|c: char| c == '/' || c.is_alphanumeric())
        {
            continue;
        }
        let (a, b) = (&caps[1], &caps[2]);
        let (a_year, b_year) = (plausible_year(a), plausible_year(b));
        if !a_year && !b_year {
            continue;
        }
        let sentence = sentence_at(sentences, m.start())
            .map(|i| sentences[i].clone())
            .unwrap_or(0..body.len());
        let (before, after) = window_tokens(
            &body[sentence.start..m.start()],
            &body[m.end()..sentence.end.max(m.end())],
        );
        let regulation =
            has_keyword(&before, REGULATION_WORDS) || has_keyword(&after, REGULATION_WORDS);
        let directive =
            has_keyword(&before, DIRECTIVE_WORDS) || has_keyword(&after, DIRECTIVE_WORDS);
        let ab = after.iter().any(|t| t == "AB");

        // Orientation: YYYY/N unless only the second part is a year, or both
        // are and the cues point to the N/YYYY families.
        let year_first = match (a_year, b_year) {
            (true, false) => true,
            (false, true) => false,
            _ => directive || !(regulation || ab),
        };
        let (kind, key, target, issue) = if year_first {
            let (year, number) = (a, b);
            if directive || !regulation {
                let celex = legislation_celex(year, "L", number);
                let issue = (!directive).then_some(RefIssue::AmbiguousReference);
                (
                    RefKind::EuDirective,
                    celex.clone(),
                    celex.filter(|_| directive),
                    issue,
                )
            } else {
                let celex = legislation_celex(year, "R", number);
                (RefKind::EuRegulation, celex.clone(), celex, None)
            }
        } else {
            let (number, year) = (a, b);
            if ab && regulation {
                (
                    RefKind::AbDecision,
                    None,
                    None,
                    Some(RefIssue::AmbiguousReference),
                )
            } else if ab {
                (RefKind::AbDecision, None, None, None)
            } else if regulation {
                let celex = legislation_celex(year, "R", number);
                (RefKind::EuRegulation, celex.clone(), celex, None)
            } else if directive {
                let celex = legislation_celex(year, "L", number);
                (RefKind::EuDirective, celex.clone(), celex, None)
            } else {
                (
                    RefKind::EuRegulation,
                    None,
                    None,
                    Some(RefIssue::AmbiguousReference),
                )
            }
        };
        let key = match (kind, key) {
            (RefKind::AbDecision, _) => RefKey::AbDecision {
                number: canonical_ab_number(&format!("{}/{}", &caps[1], &caps[2]))
                    .unwrap_or_else(|| m.as_str().to_string()),
            },
            (_, Some(celex)) if issue.is_none() => RefKey::Celex { celex },
            _ => RefKey::Unknown {
                raw: m.as_str().to_string(),
            },
        };
        let mut r = new_ref(body, m.range(), kind, key);
        r.target = target.filter(|_| issue.is_none());
        r.issue = issue;
        acc.push(r);
    }
}

/// Treaty names not consumed by an article list.
pub(crate) fn standalone_treaties(body: &str, auth: &AuthoritySet, acc: &mut Accepted) {
    for (span, treaty) in auth.find_treaties(body) {
        if !acc.is_free(&span) {
            continue;
        }
        let mut r = new_ref(
            body,
            span,
            RefKind::EuTreatyArticle,
            RefKey::Celex {
                celex: treaty.celex.clone(),
            },
        );
        r.target = Some(treaty.celex.clone());
        acc.push(r);
    }
}

/// Recognizes all document references in `body`, without resolution or
/// context snippets. Grammars run most specific first; later grammars never
/// claim text an earlier one matched.
pub fn recognize(body: &str, sentences: &[Range<usize>], auth: &AuthoritySet) -> Vec<DocRef> {
    let mut acc = Accepted::default();
    hu_decisions(body, sentences, auth, &mut acc);
    eclis(body, &mut acc);
    eu_cases(body, &mut acc);
    number_years(body, sentences, &mut acc);
    articles::article_lists(body, sentences, auth, &mut acc);
    standalone_treaties(body, auth, &mut acc);
    let mut refs = acc.refs;
    refs.sort_by_key(|r| (r.span.start, r.span.end));
    refs
}
