//! On-disk source fixtures written in the EUR-Lex, Curia, AB and OBH file
//! formats.

use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::sample_fixture;

fn write(root: &Path, rel: &str, content: &str) {
    let path = root.join(rel);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, content).unwrap();
}

pub fn write_eurlex(root: &Path, celex: &str, date: &str, title: &str, body: &str) -> String {
    write(
        root,
        &format!("eurlex/{celex}.xml"),
        &format!(
            "<document>\n  <celex>{celex}</celex>\n  <language>en</language>\n  <date>{date}</date>\n  <title>{title}</title>\n</document>\n"
        ),
    );
    write(
        root,
        &format!("eurlex/{celex}.html"),
        &format!("<html><body>\n<p>{body}</p>\n</body></html>\n"),
    );
    format!("EURLEX\teurlex/{celex}.xml\t-\t-\t-\t-")
}

pub fn write_curia(
    root: &Path,
    name: &str,
    case: &str,
    doc_type: &str,
    date: &str,
    body: &str,
) -> String {
    write(
        root,
        &format!("curia/{name}.html"),
        &format!(
            "<html><head><meta name=\"source\" content=\"CURIA\"><meta name=\"case_number\" content=\"{case}\"><meta name=\"doc_type\" content=\"{doc_type}\"><meta name=\"date\" content=\"{date}\"><meta name=\"language\" content=\"en\"><title>Case {case}</title></head><body>\n<p>{body}</p>\n</body></html>\n"
        ),
    );
    format!("CURIA\tcuria/{name}.html\t-\t-\t-\t-")
}

pub fn write_ab(root: &Path, name: &str, number: &str, date: &str, body: &str) -> String {
    write(
        root,
        &format!("ab/{name}.html"),
        &format!(
            "<html><head><meta name=\"source\" content=\"AB\"><meta name=\"case_number\" content=\"{number}\"><meta name=\"date\" content=\"{date}\"><meta name=\"language\" content=\"hu\"><title>{number}. AB határozat</title></head><body>\n<p>{body}</p>\n</body></html>\n"
        ),
    );
    format!("AB\tab/{name}.html\t-\tHU_AB\thu\t-")
}

pub fn write_obh(
    root: &Path,
    name: &str,
    court: &str,
    number: &str,
    date: &str,
    body: &str,
) -> String {
    write(root, &format!("obh/{name}.txt"), body);
    write(
        root,
        &format!("obh/{name}.meta"),
        &format!("court: {court}\nnumber: {number}\ndate: {date}\ntitle: {court} {number}\n"),
    );
    format!("OBH\tobh/{name}.txt\t-\tHU_OBH\thu\t-")
}

pub fn write_manifest(root: &Path, lines: &[String]) {
    let mut text = String::from("# source\trelative_path\tnative_id\tcollection\tlanguage\tdate\n");
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    write(root, "manifest.tsv", &text);
}

pub fn copy_authorities(root: &Path) {
    let from = sample_fixture().join("authorities");
    for entry in fs::read_dir(&from).unwrap() {
        let entry = entry.unwrap();
        write(
            root,
            &format!("authorities/{}", entry.file_name().to_string_lossy()),
            &fs::read_to_string(entry.path()).unwrap(),
        );
    }
}

pub struct BackfillPlan {
    pub referenced: usize,
    pub withheld: Vec<String>,
}

const OBH_COURTS: &[&str] = &["Fővárosi Törvényszék", "Fővárosi Ítélőtábla", "Kúria"];

/// One reference to each of 100 target documents of all four sources,
/// spread over 20 citing rulings; exactly 10 targets are left out of the
/// manifest but kept in the source directories.
pub fn write_backfill_fixture(root: &Path, seed: u64) -> BackfillPlan {
    let mut rng = StdRng::seed_from_u64(seed);
    copy_authorities(root);
    // (manifest line, citing sentence, label)
    let mut targets: Vec<(String, String, String)> = Vec::new();
    for i in 0..40u32 {
        let (y, n) = (1990 + i % 30, 100 + i);
        let celex = format!("3{y}L{n:04}");
        let line = write_eurlex(
            root,
            &celex,
            &format!("{y}-05-01"),
            &format!("Directive {y}/{n}"),
            "Text of the act.",
        );
        targets.push((
            line,
            format!("Ezt a {y}/{n}/EK irányelv szabályozza."),
            celex,
        ));
    }
    for i in 0..20u32 {
        let case = format!("C-{}/{:02}", 200 + i, 10 + i % 10);
        let line = write_curia(
            root,
            &format!("c{i}"),
            &case,
            "judgment",
            &format!("{}-03-01", 2011 + i % 10),
            "The Court dismisses the action.",
        );
        targets.push((
            line,
            format!("A Bíróság a {case}. sz. ügyben hozott ítéletében ezt kimondta."),
            case,
        ));
    }
    for i in 0..20u32 {
        let number = format!("{}/{}", 10 + i, 2000 + i);
        let line = write_ab(
            root,
            &format!("ab{i}"),
            &number,
            &format!("{}-06-01", 2000 + i),
            "Az Alkotmánybíróság az indítványt elutasítja.",
        );
        targets.push((
            line,
            format!("Az Alkotmánybíróság {number}. AB határozata szerint ez tilos."),
            number,
        ));
    }
    for i in 0..20u32 {
        let court = OBH_COURTS[i as usize % OBH_COURTS.len()];
        let number = format!("{}.K.{}.{}/{}/3.", 1 + i, 30 + i, 400 + i, 2010 + i % 10);
        let line = write_obh(
            root,
            &format!("t{i}"),
            court,
            &number,
            &format!("{}-09-01", 2010 + i % 10),
            "A bíróság a keresetet elutasította.\n",
        );
        targets.push((
            line,
            format!("A {court} {number} számú ítéletét helybenhagyta."),
            number,
        ));
    }
    targets.shuffle(&mut rng);

    // Withhold 4 directives, 2 cases, 2 AB and 2 OBH rulings.
    let mut withheld = Vec::new();
    let mut quota = [("EURLEX", 4), ("CURIA", 2), ("AB", 2), ("OBH", 2)];
    let mut manifest = Vec::new();
    for (line, _, label) in &targets {
        let q = quota.iter_mut().find(|q| line.starts_with(q.0)).unwrap();
        if q.1 > 0 && rng.random_bool(0.3) {
            q.1 -= 1;
            withheld.push(label.clone());
        } else {
            manifest.push(line.clone());
        }
    }
    // Top up any quota the coin flips left unfilled.
    for (line, _, label) in &targets {
        let q = quota.iter_mut().find(|q| line.starts_with(q.0)).unwrap();
        if q.1 > 0 && !withheld.contains(label) {
            q.1 -= 1;
            withheld.push(label.clone());
            manifest.retain(|l| l != line);
        }
    }

    for (k, chunk) in targets.chunks(5).enumerate() {
        let body: Vec<&str> = chunk.iter().map(|t| t.1.as_str()).collect();
        let number = format!("9.K.{}/2021/1.", 700 + k);
        manifest.push(write_obh(
            root,
            &format!("citing{k}"),
            "Kúria",
            &number,
            "2021-06-01",
            &(body.join("\n") + "\n"),
        ));
    }
    write_manifest(root, &manifest);
    BackfillPlan {
        referenced: targets.len(),
        withheld,
    }
}

/// Directive family, case family, one AB decision and a three-ruling OBH
/// appeal chain, copied from the sample fixture.
pub fn write_dossier_fixture(root: &Path) {
    copy_authorities(root);
    let sample = sample_fixture();
    let files = [
        "eurlex/32016L2284.xml",
        "eurlex/32016L2284.html",
        "eurlex/32017L9001.xml",
        "eurlex/32017L9001.html",
        "eurlex/32020L9284.xml",
        "eurlex/32020L9284.html",
        "curia/c-18-16-application.html",
        "curia/c-18-16-judgment.html",
        "curia/c-18-16-summary.html",
        "ab/3-2017.html",
        "obh/ft-2015.txt",
        "obh/ft-2015.meta",
        "obh/fit-2016.txt",
        "obh/fit-2016.meta",
        "obh/kuria-2016.txt",
        "obh/kuria-2016.meta",
    ];
    for f in files {
        write(root, f, &fs::read_to_string(sample.join(f)).unwrap());
    }
    let manifest: Vec<String> = [
        "EURLEX\teurlex/32016L2284.xml\t-\t-\t-\t-",
        "EURLEX\teurlex/32017L9001.xml\t-\t-\t-\t-",
        "EURLEX\teurlex/32020L9284.xml\t-\t-\t-\t-",
        "CURIA\tcuria/c-18-16-application.html\t-\t-\t-\t-",
        "CURIA\tcuria/c-18-16-judgment.html\t-\t-\t-\t-",
        "CURIA\tcuria/c-18-16-summary.html\t-\t-\t-\t-",
        "AB\tab/3-2017.html\t-\tHU_AB\thu\t-",
        "OBH\tobh/ft-2015.txt\t-\tHU_OBH\thu\t-",
        "OBH\tobh/fit-2016.txt\t-\tHU_OBH\thu\t-",
        "OBH\tobh/kuria-2016.txt\t-\tHU_OBH\thu\t-",
    ]
    .map(String::from)
    .to_vec();
    write_manifest(root, &manifest);
}
