//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

pub mod fixtures;
pub mod graphs;
pub mod planted;
pub mod search;

use std::path::PathBuf;

use chrono::NaiveDate;
use lexgraph_core::model::{Collection, DocId, DocumentRecord};

pub fn sample_fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/sample")
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

pub fn record(
    celex: &str,
    collection: Collection,
    language: &str,
    body: &str,
    published: NaiveDate,
) -> DocumentRecord {
    DocumentRecord {
        id: DocId::new(celex),
        collection,
        language: language.into(),
        title: String::new(),
        body: body.into(),
        publication_date: published,
        case_number: None,
        court: None,
        metadata: Default::default(),
        references: vec![],
        entities: vec![],
        aliases: vec![],
        acronyms: vec![],
    }
}
