//! Random search corpora and queries, and a full-scan evaluator that
//! re-tokenizes every document for every query.

use std::collections::BTreeSet;

use lexgraph_core::index::{parse_expression, Expr, Hit, Query, SearchMode, SynonymSet};
use lexgraph_core::model::{Collection, DocumentRecord, Span};
use lexgraph_core::textnorm::Stemmer;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

use super::{date, record};

const HU_WORDS: &[&str] = &[
    "adó",
    "adót",
    "adónak",
    "Adó",
    "járulék",
    "járulékot",
    "bíróság",
    "bíróságnak",
    "bíróságot",
    "Bíróság",
    "törvényszék",
    "törvényszéken",
    "ítélőtábla",
    "ítélőtáblán",
    "határozat",
    "határozatot",
    "európai",
    "unió",
    "uniós",
    "mérték",
    "mértékét",
    "támogatás",
    "támogatást",
    "irányelv",
    "irányelvet",
    "kereset",
    "keresetet",
];
const EN_WORDS: &[&str] = &[
    "court",
    "courts",
    "Court",
    "tax",
    "taxes",
    "directive",
    "Directive",
    "european",
    "European",
    "union",
    "Union",
    "aid",
    "member",
    "state",
    "states",
    "appeal",
    "judgment",
    "rate",
    "the",
    "of",
];
const ABSENT: &[&str] = &["semmi", "nothing", "zebra"];
const MULTI: &[&str] = &[
    "european union",
    "európai unió",
    "adó mérték",
    "member state",
];

pub const SYNONYMS: &str = "bíróság\ttörvényszék\títélőtábla\n\
adó\tjárulék\ttax\n\
directive\tirányelv\n\
european union\tunió\n\
court\tbíróság\n";

pub fn random_corpus(rng: &mut StdRng, n: usize) -> Vec<DocumentRecord> {
    (0..n)
        .map(|i| {
            let hungarian = rng.random_bool(0.6);
            let words = if hungarian { HU_WORDS } else { EN_WORDS };
            let mut body = String::new();
            for k in 0..rng.random_range(1..40) {
                if k > 0 {
                    body.push_str([" ", " ", " ", ", ", ". ", "; ", "\n"].choose(rng).unwrap());
                }
                // A few words from the other language.
                let pool = if rng.random_bool(0.1) {
                    if hungarian {
                        EN_WORDS
                    } else {
                        HU_WORDS
                    }
                } else {
                    words
                };
                body.push_str(pool.choose(rng).unwrap());
            }
            body.push('.');
            let lang = if hungarian { "hu" } else { "en" };
            record(
                &format!("3{}L{:04}", 2000 + i % 20, i + 1),
                Collection::EuLegislation,
                lang,
                &body,
                date(2020, 1, 1),
            )
        })
        .collect()
}

fn random_term(rng: &mut StdRng) -> &'static str {
    match rng.random_range(0..20) {
        0 => ABSENT.choose(rng).unwrap(),
        1 | 2 => MULTI.choose(rng).unwrap(),
        3..=11 => HU_WORDS.choose(rng).unwrap(),
        _ => EN_WORDS.choose(rng).unwrap(),
    }
}

fn single_term(rng: &mut StdRng) -> &'static str {
    loop {
        let t = random_term(rng);
        if !t.contains(' ') {
            return t;
        }
    }
}

fn random_expr(rng: &mut StdRng, depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.35) {
        return single_term(rng).to_string();
    }
    match rng.random_range(0..3) {
        0 => format!("NOT {}", random_expr(rng, depth - 1)),
        1 => format!(
            "({} AND {})",
            random_expr(rng, depth - 1),
            random_expr(rng, depth - 1)
        ),
        _ => format!(
            "({} OR {})",
            random_expr(rng, depth - 1),
            random_expr(rng, depth - 1)
        ),
    }
}

/// A valid query of `mode`; expert expressions are written out as text and
/// parsed back.
pub fn random_query(rng: &mut StdRng, mode: SearchMode) -> Query {
    let synonyms = rng.random_bool(0.5);
    if mode == SearchMode::Expert {
        loop {
            let text = random_expr(rng, 3);
            let q = Query::expert(parse_expression(&text).unwrap()).synonyms(synonyms);
            if has_positive(q.expert_expression.as_ref().unwrap(), false) {
                return q;
            }
        }
    }
    let n = rng.random_range(1..=3);
    let terms: Vec<&str> = (0..n).map(|_| random_term(rng)).collect();
    let mut q = Query::new(mode, &terms).synonyms(synonyms);
    if mode == SearchMode::Proximity {
        q = q.window(rng.random_range(1..=6));
    }
    q
}

fn has_positive(e: &Expr, negated: bool) -> bool {
    match e {
        Expr::Term(_) => !negated,
        Expr::And(xs) | Expr::Or(xs) => xs.iter().any(|x| has_positive(x, negated)),
        Expr::Not(x) => has_positive(x, !negated),
    }
}

fn fold(s: &str) -> String {
    s.chars()
        .flat_map(char::to_lowercase)
        .map(|c| match c {
            'á' => 'a',
            'é' => 'e',
            'í' => 'i',
            'ó' | 'ö' | 'ő' => 'o',
            'ú' | 'ü' | 'ű' => 'u',
            c => c,
        })
        .collect()
}

fn words(s: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(b)) => {
                out.push((b, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b, s.len()));
    }
    out
}

/// Full-scan search with the same normalization rules as the index:
/// folded tokens, stemmed in Hungarian documents, synonyms compared after
/// stemming.
pub struct Scan<'a> {
    pub docs: &'a [DocumentRecord],
    pub synonyms: &'a SynonymSet,
    pub stemmer: &'a dyn Stemmer,
}

type Occ = (usize, usize);

impl Scan<'_> {
    fn key(&self, token: &str, hungarian: bool) -> String {
        let f = fold(token);
        if hungarian {
            self.stemmer.stem(&f)
        } else {
            f
        }
    }

    fn normalize(&self, term: &str) -> String {
        words(term)
            .iter()
            .map(|&(a, b)| self.key(&term[a..b], true))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn alternatives(&self, term: &str, synonyms: bool) -> Vec<Vec<String>> {
        let mut alts = vec![term.to_string()];
        if synonyms {
            let key = self.normalize(term);
            for g in self.synonyms.groups() {
                if g.iter().any(|m| self.normalize(m) == key) {
                    for m in g {
                        if !alts.iter().any(|a| self.normalize(a) == self.normalize(m)) {
                            alts.push(m.clone());
                        }
                    }
                }
            }
        }
        alts.iter()
            .map(|a| {
                words(a)
                    .iter()
                    .map(|&(x, y)| a[x..y].to_string())
                    .collect::<Vec<_>>()
            })
            .filter(|a| !a.is_empty())
            .collect()
    }

    fn occurrences(&self, keys: &[String], hungarian: bool, alts: &[Vec<String>]) -> Vec<Occ> {
        let mut out = BTreeSet::new();
        for alt in alts {
            let want: Vec<String> = alt.iter().map(|t| self.key(t, hungarian)).collect();
            for p in 0..keys.len() {
                if p + want.len() <= keys.len() && keys[p..p + want.len()] == want[..] {
                    out.insert((p, p + want.len() - 1));
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn search(&self, q: &Query) -> Vec<Hit> {
        let terms: Vec<String> = match &q.expert_expression {
            Some(e) if q.mode == SearchMode::Expert => {
                let mut t = Vec::new();
                collect_terms(e, &mut t);
                t
            }
            _ => q
                .terms
                .iter()
                .filter(|t| !words(t).is_empty())
                .cloned()
                .collect(),
        };
        let alts: Vec<Vec<Vec<String>>> = terms
            .iter()
            .map(|t| self.alternatives(t, q.use_synonyms))
            .collect();
        let mut hits = Vec::new();
        for doc in self.docs {
            let hungarian = doc.language == "hu";
            let toks = words(&doc.body);
            let keys: Vec<String> = toks
                .iter()
                .map(|&(a, b)| self.key(&doc.body[a..b], hungarian))
                .collect();
            let occ: Vec<Vec<Occ>> = alts
                .iter()
                .map(|a| self.occurrences(&keys, hungarian, a))
                .collect();
            let Some(marked) = evaluate(q, &terms, &occ) else {
                continue;
            };
            let positions: BTreeSet<usize> = marked.iter().flat_map(|&(a, b)| a..=b).collect();
            hits.push(Hit {
                doc: doc.id.celex.clone(),
                score: positions.len(),
                highlights: positions
                    .iter()
                    .map(|&p| Span::new(toks[p].0, toks[p].1))
                    .collect(),
            });
        }
        hits.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.doc.cmp(&b.doc)));
        hits
    }
}

fn collect_terms(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Term(t) => {
            if !out.contains(t) {
                out.push(t.clone())
            }
        }
        Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| collect_terms(x, out)),
        Expr::Not(x) => collect_terms(x, out),
    }
}

fn eval(e: &Expr, present: &dyn Fn(&str) -> bool) -> bool {
    match e {
        Expr::Term(t) => present(t),
        Expr::And(xs) => xs.iter().all(|x| eval(x, present)),
        Expr::Or(xs) => xs.iter().any(|x| eval(x, present)),
        Expr::Not(x) => !eval(x, present),
    }
}

fn positive(e: &Expr, negated: bool, out: &mut BTreeSet<String>) {
    match e {
        Expr::Term(t) if !negated => {
            out.insert(t.clone());
        }
        Expr::Term(_) => {}
        Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| positive(x, negated, out)),
        Expr::Not(x) => positive(x, !negated, out),
    }
}

/// Every way of picking one occurrence per slot.
fn combinations(occ: &[Vec<Occ>]) -> Vec<Vec<Occ>> {
    let mut out = vec![vec![]];
    for slot in occ {
        out = out
            .into_iter()
            .flat_map(|c| {
                slot.iter().map(move |o| {
                    let mut c = c.clone();
                    c.push(*o);
                    c
                })
            })
            .collect();
    }
    out
}

fn evaluate(q: &Query, terms: &[String], occ: &[Vec<Occ>]) -> Option<Vec<Occ>> {
    let all: Vec<Occ> = occ.iter().flatten().copied().collect();
    match q.mode {
        SearchMode::AnyWord => (!all.is_empty()).then_some(all),
        SearchMode::AllWords => occ.iter().all(|s| !s.is_empty()).then_some(all),
        SearchMode::ExactPhrase => {
            let chains: Vec<Vec<Occ>> = combinations(occ)
                .into_iter()
                .filter(|c| c.windows(2).all(|w| w[1].0 == w[0].1 + 1))
                .collect();
            (!chains.is_empty()).then(|| chains.concat())
        }
        SearchMode::Proximity => {
            let w = q.proximity_window.unwrap();
            let close: Vec<Vec<Occ>> = combinations(occ)
                .into_iter()
                .filter(|c| {
                    let lo = c.iter().map(|o| o.0).min().unwrap();
                    let hi = c.iter().map(|o| o.1).max().unwrap();
                    hi - lo <= w
                })
                .collect();
            (!close.is_empty()).then(|| close.concat())
        }
        SearchMode::Expert => {
            let e = q.expert_expression.as_ref().unwrap();
            let present = |t: &str| {
                terms
                    .iter()
                    .position(|x| x == t)
                    .is_some_and(|i| !occ[i].is_empty())
            };
            if !eval(e, &present) {
                return None;
            }
            let mut pos = BTreeSet::new();
            positive(e, false, &mut pos);
            Some(
                terms
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| pos.contains(*t))
                    .flat_map(|(i, _)| occ[i].clone())
                    .collect(),
            )
        }
    }
}
