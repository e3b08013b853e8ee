//! Synthetic corpus whose references are written out from the identifier
//! grammars, together with the exact extraction result each citing
//! document must produce.

use std::collections::{BTreeMap, BTreeSet};

use lexgraph_core::extract::AuthoritySet;
use lexgraph_core::model::{Collection, DocRef, DocumentRecord, RefKind};
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

use super::{date, record};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpectedRef {
    pub span: (usize, usize),
    pub kind: RefKind,
    pub target: Option<String>,
    pub resolved: bool,
    pub article: Option<u32>,
    pub paragraphs: Option<(u32, u32)>,
}

impl ExpectedRef {
    pub fn of(r: &DocRef) -> Self {
        ExpectedRef {
            span: (r.span.start, r.span.end),
            kind: r.kind,
            target: r.target.clone(),
            resolved: r.resolved,
            article: r.article,
            paragraphs: r.paragraphs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpectedAcronym {
    pub span: (usize, usize),
    pub full_form: String,
}

pub struct CitingDoc {
    pub record: DocumentRecord,
    pub refs: Vec<ExpectedRef>,
    pub acronyms: Vec<ExpectedAcronym>,
}

pub struct PlantedCorpus {
    pub authorities: AuthoritySet,
    pub targets: Vec<DocumentRecord>,
    pub citing: Vec<CitingDoc>,
}

const COURTS: &[(u32, &str, &str)] = &[
    (1, "Kúria", "Supreme Court"),
    (12, "Fővárosi Törvényszék", "Budapest Court"),
    (13, "Fővárosi Ítélőtábla", "Budapest Court of Appeal"),
    (20, "Szegedi Törvényszék", "Szeged Court"),
];

const TEU: &str = "12016M0000";
const TFEU: &str = "12016E0000";
const TEU_NAMES: &[&str] = &["Treaty on European Union", "TEU"];
const TFEU_NAMES: &[&str] = &["Treaty on the Functioning of the European Union", "TFEU"];
const TEU_ARTICLES: &[u32] = &[2, 3, 4, 6, 7, 13, 19, 48, 49, 50];
const TFEU_ARTICLES: &[u32] = &[18, 34, 101, 102, 107, 108, 263, 267];
/// Article documents held besides the two whole treaties, with dates.
const ARTICLE_DOCS: &[(&str, i32)] = &[
    ("12016E0101", 2016),
    ("12016E0107", 2016),
    ("12016M0048", 2016),
    ("12012M0048", 2012),
];

const INSTITUTIONS: &[(&str, &str)] = &[
    ("European Food Safety Authority", "EFSA"),
    ("European Medicines Agency", "EMA"),
    ("European Banking Authority", "EBA"),
    ("European Chemicals Agency", "ECHA"),
    ("European Securities and Markets Authority", "ESMA"),
];
/// Registered institution documents: (acronym, form, celex).
const INSTITUTION_DOCS: &[(&str, &str, &str)] = &[
    ("EFSA", "REGULATION", "32002R0178"),
    ("EMA", "DIRECTIVE", "32001L0083"),
];

const ALIAS_WORDS: &[&str] = &[
    "Waste",
    "Habitats",
    "Nitrates",
    "Landfill",
    "Packaging",
    "Seveso",
    "Birds",
    "Bathing Water",
];

const FILLER_EN: &[&str] = &[
    "The parties submitted written observations.",
    "Costs are reserved.",
    "The action is dismissed as unfounded.",
    "The referring court seeks guidance on the interpretation.",
    "That provision must be read in its context.",
];
const FILLER_HU: &[&str] = &[
    "A felek észrevételeket tettek.",
    "A keresetet elutasította.",
    "Az eljárás költségeit a felperes viseli.",
    "Az indítvány nem megalapozott.",
];

struct Case {
    number: String,
    ecli: String,
    judgment: String,
}

struct Decision {
    court: usize,
    number: String,
    celex: String,
}

/// Documents the citing corpus can point at, and the lookups needed to
/// predict how each reference resolves.
struct World {
    cases: Vec<Case>,
    directives: Vec<(u16, u32)>,
    regulations: Vec<(u32, u16)>,
    ab: Vec<(String, String)>,
    decisions: Vec<Decision>,
    present: BTreeSet<String>,
    docs: Vec<DocumentRecord>,
}

fn treaty_target(treaty: &str, article: u32) -> String {
    let descriptor = &treaty[5..6];
    // The article document in its latest version, else the whole treaty.
    ARTICLE_DOCS
        .iter()
        .filter(|(c, _)| &c[5..6] == descriptor && c[6..].parse::<u32>().unwrap() == article)
        .max_by_key(|(_, y)| *y)
        .map_or(treaty.to_string(), |(c, _)| c.to_string())
}

fn hu_number(rng: &mut StdRng, councils: std::ops::Range<u32>) -> String {
    let kind = ["K", "P", "G", "KF", "B", "PF"].choose(rng).unwrap();
    let registry = if rng.random_bool(0.5) {
        format!(
            "{}.{}",
            rng.random_range(1..100),
            rng.random_range(100..1000)
        )
    } else {
        rng.random_range(1..100_000).to_string()
    };
    format!(
        "{}.{kind}.{registry}/{}/{}",
        rng.random_range(councils),
        rng.random_range(2000..2024),
        rng.random_range(1..40)
    )
}

impl World {
    fn generate(rng: &mut StdRng) -> World {
        let mut w = World {
            cases: vec![],
            directives: vec![],
            regulations: vec![],
            ab: vec![],
            decisions: vec![],
            present: BTreeSet::new(),
            docs: vec![],
        };
        let text = "Text of the act.";

        for (celex, y) in [(TEU, 2016), (TFEU, 2016)]
            .into_iter()
            .chain(ARTICLE_DOCS.iter().copied())
        {
            w.docs.push(record(
                celex,
                Collection::EuTreaty,
                "en",
                text,
                date(y, 6, 7),
            ));
        }

        let mut seen = BTreeSet::new();
        while w.cases.len() < 40 {
            let (serial, yy) = (rng.random_range(1..1000u32), rng.random_range(0..21u16));
            if !seen.insert((serial, yy)) {
                continue;
            }
            let year = 2000 + yy;
            let number = format!("C-{serial}/{yy:02}");
            let ecli = format!("ECLI:EU:C:{}:{serial}", year + 1);
            let judgment = format!("6{year}CJ{serial:04}");
            let mut app = record(
                &format!("6{year}CN{serial:04}"),
                Collection::EuCaselaw,
                "en",
                text,
                date(year as i32, 2, 1),
            );
            app.case_number = Some(number.clone());
            let mut j = record(
                &judgment,
                Collection::EuCaselaw,
                "en",
                text,
                date(year as i32 + 1, 5, 1),
            );
            j.case_number = Some(number.clone());
            j.id.ecli = Some(ecli.clone());
            w.docs.extend([app, j]);
            w.cases.push(Case {
                number,
                ecli,
                judgment,
            });
        }

        let mut seen = BTreeSet::new();
        while w.directives.len() < 30 {
            let d = (rng.random_range(1995..2021u16), rng.random_range(1..121u32));
            if seen.insert(d) {
                w.directives.push(d);
                let celex = format!("3{}L{:04}", d.0, d.1);
                w.docs.push(record(
                    &celex,
                    Collection::EuLegislation,
                    "en",
                    text,
                    date(d.0 as i32, 3, 1),
                ));
            }
        }
        let mut seen = BTreeSet::new();
        while w.regulations.len() < 30 {
            let r = (
                rng.random_range(1..1201u32),
                rng.random_range(1995..2021u16),
            );
            if seen.insert(r) {
                w.regulations.push(r);
                let celex = format!("3{}R{:04}", r.1, r.0);
                w.docs.push(record(
                    &celex,
                    Collection::EuLegislation,
                    "en",
                    text,
                    date(r.1 as i32, 4, 1),
                ));
            }
        }
        // EFSA's regulation is held; EMA's directive is not.
        w.docs.push(record(
            "32002R0178",
            Collection::EuLegislation,
            "en",
            text,
            date(2002, 1, 28),
        ));

        let mut seen = BTreeSet::new();
        while w.ab.len() < 20 {
            let number = format!(
                "{}/{}",
                rng.random_range(1..61),
                rng.random_range(1995..2024)
            );
            if seen.insert(number.clone()) {
                let celex = format!("82017HA{:04}", w.ab.len() + 1);
                let mut d = record(
                    &celex,
                    Collection::HuAb,
                    "hu",
                    "Az Alkotmánybíróság határozata.",
                    date(2017, 1, 1),
                );
                d.case_number = Some(number.clone());
                w.docs.push(d);
                w.ab.push((number, celex));
            }
        }

        let mut seen = BTreeSet::new();
        while w.decisions.len() < 30 {
            let court = rng.random_range(0..COURTS.len());
            let number = format!("{}.", hu_number(rng, 1..50));
            if seen.insert(number.clone()) {
                let celex = format!("82018HB{:04}", w.decisions.len() + 1);
                let mut d = record(
                    &celex,
                    Collection::HuObh,
                    "hu",
                    "A bíróság ítélete.",
                    date(2018, 1, 1),
                );
                d.court = Some(COURTS[court].1.to_string());
                d.case_number = Some(number.clone());
                w.docs.push(d);
                w.decisions.push(Decision {
                    court,
                    number,
                    celex,
                });
            }
        }

        w.present = w.docs.iter().map(|d| d.id.celex.clone()).collect();
        w
    }

    fn authorities(&self) -> AuthoritySet {
        let mut auth = AuthoritySet::default();
        for &(id, hu, en) in COURTS {
            auth.add_court(hu, id);
            auth.add_court(en, id);
        }
        for n in TEU_NAMES.iter().chain(&["EUSZ"]) {
            auth.add_treaty(n, TEU);
        }
        for n in TFEU_NAMES.iter().chain(&["EUMSZ"]) {
            auth.add_treaty(n, TFEU);
        }
        for &(acr, form, celex) in INSTITUTION_DOCS {
            let full = INSTITUTIONS.iter().find(|i| i.1 == acr).unwrap().0;
            auth.add_institution_doc(full, form, celex);
        }
        auth
    }
}

/// Body text under construction with the references planted so far.
#[derive(Default)]
struct Writer {
    text: String,
    refs: Vec<ExpectedRef>,
    acronyms: Vec<ExpectedAcronym>,
}

impl Writer {
    fn put(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self
    }

    fn plant(
        &mut self,
        s: &str,
        kind: RefKind,
        target: Option<String>,
        resolved: bool,
    ) -> &mut ExpectedRef {
        let start = self.text.len();
        self.text.push_str(s);
        self.refs.push(ExpectedRef {
            span: (start, self.text.len()),
            kind,
            target,
            resolved,
            article: None,
            paragraphs: None,
        });
        self.refs.last_mut().unwrap()
    }

    fn article(&mut self, s: &str, treaty: &str, article: u32) -> &mut ExpectedRef {
        let r = self.plant(
            s,
            RefKind::EuTreatyArticle,
            Some(treaty_target(treaty, article)),
            true,
        );
        r.article = Some(article);
        r
    }

    /// Articles implied by a range, anchored at the end of the range item.
    fn implied(&mut self, treaty: &str, articles: impl IntoIterator<Item = u32>) {
        for a in articles {
            self.article("", treaty, a);
        }
    }

    fn acronym(&mut self, s: &str, full: &str) {
        let start = self.text.len();
        self.text.push_str(s);
        self.acronyms.push(ExpectedAcronym {
            span: (start, self.text.len()),
            full_form: full.to_string(),
        });
    }
}

struct Gen<'a> {
    rng: StdRng,
    world: &'a World,
}

impl Gen<'_> {
    fn present(&mut self) -> bool {
        self.rng.random_bool(0.75)
    }

    fn eu_case(&mut self, w: &mut Writer) {
        let (number, target) = if self.present() {
            let c = self.world.cases.choose(&mut self.rng).unwrap();
            (c.number.clone(), Some(c.judgment.clone()))
        } else {
            (
                format!(
                    "C-{}/{:02}",
                    self.rng.random_range(1000..5000),
                    self.rng.random_range(0..21)
                ),
                None,
            )
        };
        let resolved = target.is_some();
        if self.rng.random_bool(0.5) {
            w.put("The judgment in Case ");
            w.plant(&number, RefKind::EuCase, target, resolved);
            w.put(" is final.");
        } else {
            w.put("A Bíróság a ");
            w.plant(&number, RefKind::EuCase, target, resolved);
            w.put(". sz. ügyben hozott ítéletében ezt kimondta.");
        }
    }

    fn ecli(&mut self, w: &mut Writer) {
        let (ecli, target) = if self.present() {
            let c = self.world.cases.choose(&mut self.rng).unwrap();
            (c.ecli.clone(), Some(c.judgment.clone()))
        } else {
            (
                format!(
                    "ECLI:EU:C:{}:{}",
                    self.rng.random_range(2001..2022),
                    self.rng.random_range(1000..2000)
                ),
                None,
            )
        };
        let resolved = target.is_some();
        w.put("See ");
        w.plant(&ecli, RefKind::EuCase, target, resolved);
        w.put(" for the reasoning.");
    }

    fn directive_number(&mut self) -> (u16, u32) {
        if self.present() {
            *self.world.directives.choose(&mut self.rng).unwrap()
        } else {
            (
                self.rng.random_range(1995..2021),
                self.rng.random_range(500..900),
            )
        }
    }

    fn directive(&mut self, w: &mut Writer) {
        let (y, n) = self.directive_number();
        let celex = format!("3{y}L{n:04}");
        let resolved = self.world.present.contains(&celex);
        let tag = if y < 2010 { "EC" } else { "EU" };
        let s = format!("{y}/{n}/{tag}");
        if self.rng.random_bool(0.5) {
            w.put("This measure implements Directive ");
            w.plant(&s, RefKind::EuDirective, Some(celex), resolved);
            w.put(" in full.");
        } else {
            w.put("Ezt a ");
            w.plant(&s, RefKind::EuDirective, Some(celex), resolved);
            w.put(" irányelv szabályozza.");
        }
    }

    fn regulation(&mut self, w: &mut Writer) {
        let (n, y) = if self.present() {
            *self.world.regulations.choose(&mut self.rng).unwrap()
        } else {
            (
                self.rng.random_range(1300..1900),
                self.rng.random_range(1995..2021),
            )
        };
        let celex = format!("3{y}R{n:04}");
        let resolved = self.world.present.contains(&celex);
        if self.rng.random_bool(0.5) {
            w.put(if y < 2010 {
                "Regulation (EC) No "
            } else {
                "Regulation (EU) No "
            });
            w.plant(
                &format!("{n}/{y}"),
                RefKind::EuRegulation,
                Some(celex),
                resolved,
            );
            w.put(" applies to the aid.");
        } else {
            w.put("Az ");
            w.plant(
                &format!("{n}/{y}/EU"),
                RefKind::EuRegulation,
                Some(celex),
                resolved,
            );
            w.put(" rendelet alkalmazandó.");
        }
    }

    fn ab(&mut self, w: &mut Writer) {
        let (number, target) = if self.present() {
            let (n, c) = self.world.ab.choose(&mut self.rng).unwrap();
            (n.clone(), Some(c.clone()))
        } else {
            (
                format!(
                    "{}/{}",
                    self.rng.random_range(100..200),
                    self.rng.random_range(1995..2024)
                ),
                None,
            )
        };
        let resolved = target.is_some();
        w.put("Az Alkotmánybíróság ");
        w.plant(&number, RefKind::AbDecision, target, resolved);
        w.put(". AB határozata szerint ez tilos.");
    }

    /// A decision number and the document it resolves to, given the court
    /// that will precede it.
    fn decision(&mut self) -> (usize, String, Option<String>) {
        if self.present() {
            let d = self.world.decisions.choose(&mut self.rng).unwrap();
            (d.court, d.number.clone(), Some(d.celex.clone()))
        } else {
            let court = self.rng.random_range(0..COURTS.len());
            (
                court,
                format!("{}.", hu_number(&mut self.rng, 50..100)),
                None,
            )
        }
    }

    fn hu_decision(&mut self, w: &mut Writer) {
        match self.rng.random_range(0..4) {
            0 => {
                let (court, number, target) = self.decision();
                let resolved = target.is_some();
                w.put(&format!("A {} ", COURTS[court].1));
                w.plant(&number, RefKind::HuDecision, target, resolved);
                w.put(" számú ítéletét helybenhagyta.");
            }
            1 => {
                // Two courts and two numbers: each number binds to the court
                // right before it.
                let (c1, n1, t1) = self.decision();
                let (c2, n2, t2) = self.decision();
                let (r1, r2) = (t1.is_some(), t2.is_some());
                w.put(&format!("A {} ", COURTS[c1].1));
                w.plant(&n1, RefKind::HuDecision, t1, r1);
                w.put(&format!(" számú és a {} ", COURTS[c2].1));
                w.plant(&n2, RefKind::HuDecision, t2, r2);
                w.put(" számú ítéletét idézte.");
            }
            2 => {
                let (court, number, target) = self.decision();
                let resolved = target.is_some();
                let other = (court + self.rng.random_range(1..COURTS.len())) % COURTS.len();
                w.put(&format!(
                    "The {} approves the {}'s ",
                    COURTS[other].2, COURTS[court].2
                ));
                w.plant(
                    number.trim_end_matches('.'),
                    RefKind::HuDecision,
                    target,
                    resolved,
                );
                w.put(" judgement.");
            }
            _ => {
                let number = format!("{}.", hu_number(&mut self.rng, 1..100));
                w.put("A bíróság ");
                w.plant(&number, RefKind::HuDecision, None, false);
                w.put(" számú végzése jogerős.");
            }
        }
    }

    fn pick_treaty(&mut self) -> (&'static str, &'static [u32], &'static str, &'static str) {
        if self.rng.random_bool(0.5) {
            (
                TEU,
                TEU_ARTICLES,
                TEU_NAMES.choose(&mut self.rng).unwrap(),
                "EUSZ",
            )
        } else {
            (
                TFEU,
                TFEU_ARTICLES,
                TFEU_NAMES.choose(&mut self.rng).unwrap(),
                "EUMSZ",
            )
        }
    }

    fn distinct(&mut self, pool: &[u32], k: usize) -> Vec<u32> {
        let mut v: Vec<u32> = pool.choose_multiple(&mut self.rng, k).copied().collect();
        v.sort();
        v
    }

    fn treaty(&mut self, w: &mut Writer) {
        let (treaty, pool, name, hu) = self.pick_treaty();
        let a = *pool.choose(&mut self.rng).unwrap();
        match self.rng.random_range(0..7) {
            0 => {
                w.article(&format!("Article {a}"), treaty, a);
                w.put(&format!(" of the {name} applies."));
            }
            1 => {
                let p = self.rng.random_range(1..9);
                w.article(&format!("Article {a}({p})"), treaty, a)
                    .paragraphs = Some((p, p));
                w.put(&format!(" of the {name} applies."));
            }
            2 => {
                let k = self.rng.random_range(2..4);
                let items = self.distinct(pool, k);
                w.article(&format!("Articles {}", items[0]), treaty, items[0]);
                if items.len() == 3 {
                    w.put(", ");
                    w.article(&items[1].to_string(), treaty, items[1]);
                }
                w.put(" and ");
                let last = *items.last().unwrap();
                w.article(&last.to_string(), treaty, last);
                w.put(&format!(" of the {name} shall apply."));
            }
            3 => {
                let b = a + self.rng.random_range(1..4);
                w.article(&format!("Articles {a} to {b}"), treaty, a);
                w.implied(treaty, a + 1..=b);
                w.put(&format!(" of the {name} are relevant."));
            }
            4 => {
                w.put(&format!("Az {hu} "));
                w.article(&format!("{a}. cikke"), treaty, a);
                w.put(" alapján ez tilos.");
            }
            5 => {
                let p = self.rng.random_range(1..9);
                w.put(&format!("Az {hu} "));
                w.article(&format!("{a}. cikk ({p}) bekezdése"), treaty, a)
                    .paragraphs = Some((p, p));
                w.put(" alapján ez tilos.");
            }
            _ => {
                // a., b–c. és d. cikke, with a < b < c < d.
                let a = self.rng.random_range(1..50);
                let b = a + self.rng.random_range(1..5);
                let c = b + self.rng.random_range(1..4);
                let d = c + self.rng.random_range(1..10);
                w.put(&format!("Az {hu} "));
                w.article(&format!("{a}."), treaty, a);
                w.put(", ");
                w.article(&format!("{b}–{c}."), treaty, b);
                w.implied(treaty, b + 1..=c);
                w.put(" és ");
                w.article(&format!("{d}. cikke"), treaty, d);
                w.put(" is releváns.");
            }
        }
    }

    fn alias(&mut self, w: &mut Writer, word: &str) {
        let (y, n) = self.directive_number();
        let celex = format!("3{y}L{n:04}");
        let resolved = self.world.present.contains(&celex);
        w.put("Directive ");
        w.plant(
            &format!("{y}/{n}/EU"),
            RefKind::EuDirective,
            Some(celex.clone()),
            resolved,
        );
        w.put(&format!(
            " (hereinafter the {word} Directive) lays down rules. "
        ));
        self.filler(w);
        w.put(" Member States shall apply the ");
        w.plant(
            &format!("{word} Directive"),
            RefKind::Alias,
            Some(celex),
            resolved,
        );
        w.put(".");
    }

    fn acronym(&mut self, w: &mut Writer, full: &str, acr: &str) {
        w.put(&format!("The {full} ({acr}) was consulted. "));
        if self.rng.random_bool(0.7) {
            w.put("The ");
            w.acronym(acr, full);
            w.put(" adopted an opinion. ");
        }
        let registered = INSTITUTION_DOCS.iter().find(|d| d.0 == acr);
        let (word, form) = if self.rng.random_bool(0.5) {
            ("regulation", "REGULATION")
        } else {
            ("irányelv", "DIRECTIVE")
        };
        let target = registered.filter(|d| d.1 == form).map(|d| d.2.to_string());
        let resolved = target
            .as_ref()
            .is_some_and(|t| self.world.present.contains(t));
        w.put("The ");
        w.plant(
            &format!("{acr}-{word}"),
            RefKind::AcronymDoc,
            target,
            resolved,
        );
        w.put(" applies.");
    }

    fn filler(&mut self, w: &mut Writer) {
        let pool = if self.rng.random_bool(0.5) {
            FILLER_EN
        } else {
            FILLER_HU
        };
        w.put(pool.choose(&mut self.rng).unwrap());
    }

    fn document(&mut self) -> Writer {
        let mut w = Writer::default();
        let mut words: Vec<&str> = ALIAS_WORDS.to_vec();
        words.shuffle(&mut self.rng);
        let mut institutions: Vec<(&str, &str)> = INSTITUTIONS.to_vec();
        institutions.shuffle(&mut self.rng);
        let n = self.rng.random_range(4..10);
        for i in 0..n {
            if i > 0 {
                w.put(if self.rng.random_bool(0.2) { "\n" } else { " " });
            }
            match self.rng.random_range(0..12) {
                0 => self.eu_case(&mut w),
                1 => self.ecli(&mut w),
                2 => self.directive(&mut w),
                3 => self.regulation(&mut w),
                4 => self.ab(&mut w),
                5 | 6 => self.hu_decision(&mut w),
                7 | 8 => self.treaty(&mut w),
                9 if !words.is_empty() => {
                    let word = words.pop().unwrap();
                    self.alias(&mut w, word)
                }
                10 if !institutions.is_empty() => {
                    let (full, acr) = institutions.pop().unwrap();
                    self.acronym(&mut w, full, acr)
                }
                _ => self.filler(&mut w),
            }
        }
        w
    }
}

/// `n` citing documents over a fixed pool of held targets.
pub fn generate(seed: u64, n: usize) -> PlantedCorpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let world = World::generate(&mut rng);
    let authorities = world.authorities();
    let mut g = Gen { rng, world: &world };
    let mut citing = Vec::with_capacity(n);
    for k in 0..n {
        let w = g.document();
        let celex = format!("52020PC{:04}", k + 1);
        let mut refs = w.refs;
        refs.sort();
        let mut acronyms = w.acronyms;
        acronyms.sort();
        citing.push(CitingDoc {
            record: record(
                &celex,
                Collection::EuLegislation,
                "en",
                &w.text,
                date(2021, 1, 1),
            ),
            refs,
            acronyms,
        });
    }
    PlantedCorpus {
        authorities,
        targets: world.docs,
        citing,
    }
}

/// Counts of (matched, expected, produced) over multisets of `T`.
pub fn multiset_match<T: Ord + Clone>(expected: &[T], produced: &[T]) -> (usize, usize, usize) {
    let mut bag: BTreeMap<T, usize> = BTreeMap::new();
    for e in expected {
        *bag.entry(e.clone()).or_default() += 1;
    }
    let mut matched = 0;
    for p in produced {
        if let Some(n) = bag.get_mut(p).filter(|n| **n > 0) {
            *n -= 1;
            matched += 1;
        }
    }
    (matched, expected.len(), produced.len())
}
