//! Hungarian-aware text normalization: accent folding with position
//! restoration, per-word fuzzy matching, compound-tolerant matching,
//! sentence segmentation and a rule-based suffix stripper.

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::Path;

use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};
use crate::identifiers::scan;

fn fold_char(c: char) -> char {
    match c {
        'á' | 'Á' => 'a',
        'é' | 'É' => 'e',
        'í' | 'Í' => 'i',
        'ó' | 'Ó' | 'ö' | 'Ö' | 'ő' | 'Ő' => 'o',
        'ú' | 'Ú' | 'ü' | 'Ü' | 'ű' | 'Ű' => 'u',
        // Latin-1 stand-ins for ő and ű left behind by bad encodings.
        'õ' | 'Õ' | 'ô' | 'Ô' => 'o',
        'û' | 'Û' => 'u',
        _ => {
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        }
    }
}

/// Accent-free lowercase text with a map from every folded byte back to the
/// byte offset of the source character it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedText {
    pub folded: String,
    pub origin_map: Vec<usize>,
    origin_end: Vec<usize>,
    source_len: usize,
}

impl FoldedText {
    /// Maps a byte range of the folded text to the source byte range.
    pub fn source_span(&self, r: Range<usize>) -> Range<usize> {
        let start = self
            .origin_map
            .get(r.start)
            .copied()
            .unwrap_or(self.source_len);
        if r.end <= r.start {
            return start..start;
        }
        start..self.origin_end[r.end - 1]
    }
}

pub fn fold(s: &str) -> FoldedText {
    fold_filtered(s, |_| true)
}

/// Folded text with spaces and hyphens removed, for matching compounds that
/// may be written joined, hyphenated or spaced.
pub fn compact_fold(s: &str) -> FoldedText {
    fold_filtered(s, |c| !c.is_whitespace() && c != '-')
}

fn fold_filtered(s: &str, keep: impl Fn(char) -> bool) -> FoldedText {
    let mut folded = String::with_capacity(s.len());
    let mut origin_map = Vec::with_capacity(s.len());
    let mut origin_end = Vec::with_capacity(s.len());
    for (i, c) in s.char_indices() {
        if !keep(c) {
            continue;
        }
        let f = fold_char(c);
        folded.push(f);
        origin_map.extend(std::iter::repeat_n(i, f.len_utf8()));
        origin_end.extend(std::iter::repeat_n(i + c.len_utf8(), f.len_utf8()));
    }
    FoldedText {
        folded,
        origin_map,
        origin_end,
        source_len: s.len(),
    }
}

pub fn fold_str(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

/// True iff both texts have the same number of words and every aligned pair
/// of folded words is within one edit (substitution, insertion, deletion or
/// adjacent transposition).
pub fn word_match(candidate: &str, authority: &str) -> bool {
    let a = fold_str(candidate);
    let b = fold_str(authority);
    let aw: Vec<&str> = a.split_whitespace().collect();
    let bw: Vec<&str> = b.split_whitespace().collect();
    !aw.is_empty()
        && aw.len() == bw.len()
        && aw
            .iter()
            .zip(&bw)
            .all(|(x, y)| strsim::osa_distance(x, y) <= 1)
}

/// `[s, s without hyphens, s without spaces and hyphens]`, deduplicated.
pub fn concat_variants(s: &str) -> Vec<String> {
    let no_hyphen = s.replace('-', "");
    let compact: String = no_hyphen.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out: Vec<String> = Vec::with_capacity(3);
    for v in [s.to_string(), no_hyphen, compact] {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

const ABBREVIATIONS: &[&str] = &[
    "dr", "sz", "szám", "pl", "ill", "stb", "vö", "ún", "kft", "zrt", "nyrt", "bt", "tv", "ptk",
    "btk", "pp", "art", "no", "nr", "mr", "mrs", "ms", "prof", "jr", "st", "vs", "cf", "ie", "eg",
    "par", "para", "ibid", "op", "cit", "et", "al",
];

/// Byte positions of periods that terminate an identifier and therefore can
/// not end a sentence.
fn identifier_periods(s: &str) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let regexes = [
        &scan::HU_DECISION,
        &scan::EU_CASE,
        &scan::ECLI,
        &scan::NUMBER_YEAR,
    ];
    for re in regexes {
        for m in re.find_iter(s) {
            for (i, c) in s[m.range()].char_indices() {
                if c == '.' {
                    out.insert(m.start() + i);
                }
            }
            if s[m.end()..].starts_with('.') {
                out.insert(m.end());
            }
        }
    }
    out
}

fn word_before(s: &str, end: usize) -> &str {
    let start = s[..end]
        .char_indices()
        .rev()
        .find(|(_, c)| !c.is_alphanumeric())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    &s[start..end]
}

/// Sentence spans (trimmed of surrounding whitespace) in order. Boundaries
/// are line breaks, and `.`/`!`/`?` followed by whitespace and an uppercase
/// letter, except after abbreviations, ordinals and identifiers.
pub fn split_sentences(s: &str) -> Vec<Range<usize>> {
    let protected = identifier_periods(s);
    let mut cuts = Vec::new();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if c == '\n' {
            cuts.push(i);
            continue;
        }
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut j = k + 1;
        let mut saw_space = false;
        while j < chars.len() && chars[j].1.is_whitespace() && chars[j].1 != '\n' {
            saw_space = true;
            j += 1;
        }
        if !saw_space || j >= chars.len() || !chars[j].1.is_uppercase() {
            continue;
        }
        if c == '.' {
            if protected.contains(&i) {
                continue;
            }
            let prev = word_before(s, i);
            if !prev.is_empty()
                && (prev.chars().all(|ch| ch.is_ascii_digit())
                    || ABBREVIATIONS.contains(&fold_str(prev).as_str())
                    || (prev.chars().count() == 1 && prev.chars().all(char::is_uppercase)))
            {
                continue;
            }
        }
        cuts.push(i + c.len_utf8());
    }
    cuts.push(s.len());

    let mut spans = Vec::new();
    let mut start = 0;
    for cut in cuts {
        let segment = &s[start..cut];
        let lead = segment.len() - segment.trim_start().len();
        let trimmed = segment.trim();
        if !trimmed.is_empty() {
            spans.push(start + lead..start + lead + trimmed.len());
        }
        start = cut;
    }
    spans
}

/// Word tokens (Unicode word boundaries) containing at least one
/// alphanumeric character, with byte ranges.
pub fn tokenize(s: &str) -> Vec<(Range<usize>, &str)> {
    s.split_word_bound_indices()
        .filter(|(_, w)| w.chars().any(char::is_alphanumeric))
        .map(|(i, w)| (i..i + w.len(), w))
        .collect()
}

/// Suffixes with minimum remaining stem lengths, longest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixTable {
    entries: Vec<(String, usize)>,
}

impl SuffixTable {
    pub fn new(entries: impl IntoIterator<Item = (String, usize)>) -> Self {
        let mut entries: Vec<(String, usize)> = entries
            .into_iter()
            .map(|(s, n)| (fold_str(&s), n))
            .filter(|(s, _)| !s.is_empty())
            .collect();
        entries.sort_by(|a, b| {
            b.0.chars()
                .count()
                .cmp(&a.0.chars().count())
                .then_with(|| a.0.cmp(&b.0))
        });
        entries.dedup_by(|a, b| a.0 == b.0);
        SuffixTable { entries }
    }

    /// Parses `suffix<TAB>min_stem_length` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: &str| Error::Fixture {
                path: origin.to_path_buf(),
                line: i + 1,
                message: message.to_string(),
            };
            let (suffix, min) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected suffix<TAB>min_stem_length"))?;
            let min: usize = min
                .trim()
                .parse()
                .map_err(|_| bad("min_stem_length is not a number"))?;
            if min == 0 {
                return Err(bad("min_stem_length must be positive"));
            }
            entries.push((suffix.trim().to_string(), min));
        }
        Ok(SuffixTable::new(entries))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SuffixTable::parse(&text, path)
    }

    pub fn entries(&self) -> &[(String, usize)] {
        &self.entries
    }
}

impl Default for SuffixTable {
    fn default() -> Self {
        SuffixTable::parse(
            include_str!("../data/suffixes.tsv"),
            Path::new("suffixes.tsv"),
        )
        .expect("shipped suffix table parses")
    }
}

const MAX_STRIPS: usize = 3;

/// Stem and number of suffixes stripped.
pub fn stem_counted(word: &str, table: &SuffixTable) -> (String, usize) {
    let mut current: Vec<char> = word.chars().collect();
    let mut strips = 0;
    while strips < MAX_STRIPS {
        let folded: String = current.iter().copied().map(fold_char).collect();
        let len = current.len();
        let hit = table.entries.iter().find(|(suffix, min)| {
            let n = suffix.chars().count();
            folded.ends_with(suffix.as_str()) && len >= n + *min
        });
        match hit {
            Some((suffix, _)) => {
                current.truncate(len - suffix.chars().count());
                strips += 1;
            }
            None => break,
        }
    }
    (current.into_iter().collect(), strips)
}

/// Strips up to three suffixes, longest match first, keeping at least the
/// entry's minimum stem length. The untouched prefix keeps its casing.
pub fn stem(word: &str, table: &SuffixTable) -> String {
    stem_counted(word, table).0
}

/// Pluggable stemming for the index.
pub trait Stemmer: Send + Sync {
    fn stem(&self, word: &str) -> String;
}

#[derive(Debug, Clone, Default)]
pub struct SuffixStemmer {
    pub table: SuffixTable,
}

impl SuffixStemmer {
    pub fn new(table: SuffixTable) -> Self {
        SuffixStemmer { table }
    }
}

impl Stemmer for SuffixStemmer {
    fn stem(&self, word: &str) -> String {
        stem(word, &self.table)
    }
}

/// Identity stemmer, for fold-only indexing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoStemmer;

impl Stemmer for NoStemmer {
    fn stem(&self, word: &str) -> String {
        word.to_string()
    }
}
