//! Citation network: dossier grouping, edge merging with lead-connection
//! choice, staged neighborhoods, filtering, in-degree ranking and export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identifiers::parse_celex;
use crate::model::{Collection, ConnectionType, DocumentRecord};
use crate::store::{ReadSnapshot, BASE_ACT, JOINED_CASES};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dossier {
    pub id: String,
    pub lead: String,
    pub members: BTreeSet<String>,
    pub collection: Collection,
    pub label: String,
}

/// One recorded connection between two documents, lifted to their dossiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Constituent {
    pub kind: ConnectionType,
    pub from: String,
    pub to: String,
    /// Where the connection was recorded: `ref:<celex>#<n>` for the n-th
    /// in-text reference, `meta:<celex>:<key>` for source metadata.
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub lead_type: ConnectionType,
    pub directed: bool,
    pub constituents: Vec<Constituent>,
}

impl Edge {
    fn touches(&self, id: &str) -> bool {
        self.from == id || self.to == id
    }
}

/// Lead-connection priority, highest first. Passive types never appear:
/// they are flipped to their active partner before ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityTable {
    order: Vec<ConnectionType>,
}

impl Default for PriorityTable {
    fn default() -> Self {
        use ConnectionType::*;
        PriorityTable {
            order: vec![
                Annuls, Suspends, Modifies, Confirms, Precedes, LegalBasis, Cites, Related,
            ],
        }
    }
}

impl PriorityTable {
    pub fn new(order: Vec<ConnectionType>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &order {
            if !(t.is_active() || *t == ConnectionType::Related) {
                return Err(Error::UnknownValue {
                    what: "active connection type",
                    value: t.to_string(),
                });
            }
            if !seen.insert(*t) {
                return Err(Error::UnknownValue {
                    what: "duplicate connection type",
                    value: t.to_string(),
                });
            }
        }
        Ok(PriorityTable { order })
    }

    /// One type name per line, highest priority first. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut order = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t = line.parse::<ConnectionType>().map_err(|e| Error::Fixture {
                path: origin.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            order.push(t);
        }
        Self::new(order).map_err(|e| Error::Fixture {
            path: origin.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Lower is more important; unlisted types rank after every listed one.
    pub fn rank(&self, t: ConnectionType) -> usize {
        self.order
            .iter()
            .position(|x| *x == t)
            .unwrap_or(self.order.len())
    }
}

/// Picks the lead connection of one dossier pair. Passive constituents are
/// read as their active partner with endpoints swapped; the highest-priority
/// active type wins. Among equal-priority candidates pointing both ways the
/// smaller `from` wins. Returns `(lead_type, from, to, directed)`; undirected
/// edges are reported with `from <= to`.
pub fn resolve_edge(
    constituents: &[Constituent],
    priority: &PriorityTable,
) -> (ConnectionType, String, String, bool) {
    assert!(
        !constituents.is_empty(),
        "an edge needs at least one constituent"
    );
    let (kind, from, to) = constituents
        .iter()
        .map(|c| {
            if c.kind.is_directed() && !c.kind.is_active() {
                (c.kind.partner(), &c.to, &c.from)
            } else {
                (c.kind, &c.from, &c.to)
            }
        })
        .min_by(|a, b| {
            priority
                .rank(a.0)
                .cmp(&priority.rank(b.0))
                .then_with(|| (a.1, a.2).cmp(&(b.1, b.2)))
        })
        .expect("non-empty");
    let directed = kind.is_directed();
    let (from, to) = if !directed && from > to {
        (to, from)
    } else {
        (from, to)
    };
    (kind, from.clone(), to.clone(), directed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Star,
    Cross,
    Second,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Star, Stage::Cross, Stage::Second];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Star => "STAR",
            Stage::Cross => "CROSS",
            Stage::Second => "SECOND",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownValue {
                what: "stage",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphView {
    pub center: String,
    pub stage: Stage,
    pub nodes: BTreeMap<String, Dossier>,
    /// Keyed by the unordered endpoint pair, smaller id first.
    pub edges: BTreeMap<(String, String), Edge>,
    pub node_filter: BTreeSet<Collection>,
    pub edge_filter: BTreeSet<ConnectionType>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphJson,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" | "graph_json" => Ok(ExportFormat::GraphJson),
            _ => Err(Error::UnknownValue {
                what: "export format",
                value: s.to_string(),
            }),
        }
    }
}

/// Dossiers and merged edges of one snapshot. Immutable once built.
#[derive(Debug, Clone)]
pub struct CitationGraph {
    dossiers: BTreeMap<String, Dossier>,
    member_of: BTreeMap<String, String>,
    edges: BTreeMap<(String, String), Edge>,
    adjacency: BTreeMap<String, BTreeSet<String>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

fn date_order(a: &DocumentRecord, b: &DocumentRecord) -> std::cmp::Ordering {
    a.publication_date
        .cmp(&b.publication_date)
        .then_with(|| a.celex().cmp(b.celex()))
}

/// Grouping key within a collection; documents sharing it form a dossier.
/// Case law and AB decisions are grouped afterwards through their case
/// numbers, so they key on the Celex here.
fn grouping_key(d: &DocumentRecord) -> String {
    match d.collection {
        Collection::EuTreaty => match parse_celex(d.celex()) {
            Ok(p) => format!("{}{}{:04}", p.sector, p.descriptor, p.serial),
            Err(_) => d.celex().to_string(),
        },
        Collection::EuLegislation => d
            .metadata
            .get(BASE_ACT)
            .map(|b| b.trim().to_string())
            .filter(|b| !b.is_empty())
            .unwrap_or_else(|| d.celex().to_string()),
        _ => d.celex().to_string(),
    }
}

fn case_numbers(d: &DocumentRecord) -> Vec<String> {
    let mut out: Vec<String> = d.case_number.iter().cloned().collect();
    if let Some(j) = d.metadata.get(JOINED_CASES) {
        out.extend(
            j.split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        );
    }
    out
}

/// Groups every document of the snapshot into dossiers.
pub fn build_dossiers(snapshot: &ReadSnapshot) -> Vec<Dossier> {
    let docs: Vec<&DocumentRecord> = snapshot.documents().collect();
    let mut uf = UnionFind::new(docs.len());
    let mut first_with: BTreeMap<(Collection, String), usize> = BTreeMap::new();
    let mut link =
        |uf: &mut UnionFind, key: (Collection, String), i: usize| match first_with.get(&key) {
            Some(&j) => uf.union(i, j),
            None => {
                first_with.insert(key, i);
            }
        };
    for (i, d) in docs.iter().enumerate() {
        match d.collection {
            Collection::HuObh => {}
            Collection::EuCaselaw | Collection::HuAb => {
                for n in case_numbers(d) {
                    link(&mut uf, (d.collection, format!("case:{n}")), i);
                }
            }
            Collection::EuTreaty | Collection::EuLegislation => {
                link(&mut uf, (d.collection, grouping_key(d)), i)
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<&DocumentRecord>> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(d);
    }
    let mut out: Vec<Dossier> = groups
        .into_values()
        .map(|members| {
            let collection = members[0].collection;
            let lead = match collection {
                Collection::EuLegislation => {
                    members.iter().copied().min_by(|a, b| date_order(a, b))
                }
                _ => members.iter().copied().max_by(|a, b| {
                    a.publication_date
                        .cmp(&b.publication_date)
                        .then_with(|| b.celex().cmp(a.celex()))
                }),
            }
            .expect("non-empty group");
            let label = if lead.title.trim().is_empty() {
                lead.case_number
                    .clone()
                    .unwrap_or_else(|| lead.celex().to_string())
            } else {
                lead.title.trim().to_string()
            };
            Dossier {
                id: lead.celex().to_string(),
                lead: lead.celex().to_string(),
                members: members.iter().map(|d| d.celex().to_string()).collect(),
                collection,
                label,
            }
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Celex of the document a metadata relation target names.
fn metadata_target(snapshot: &ReadSnapshot, target: &str) -> Option<String> {
    if snapshot.contains(target) {
        return Some(target.to_string());
    }
    if let Some(d) = snapshot.by_ecli(target) {
        return Some(d.celex().to_string());
    }
    let latest = |v: Vec<&DocumentRecord>| {
        v.into_iter()
            .max_by(|a, b| date_order(a, b))
            .map(|d| d.celex().to_string())
    };
    latest(snapshot.by_case_number(target)).or_else(|| latest(snapshot.by_ab_number(target)))
}

/// Connections recorded in the snapshot, at document level: resolved
/// in-text references count as CITES, metadata relations keep their type.
pub fn document_connections(snapshot: &ReadSnapshot) -> Vec<Constituent> {
    let mut out = Vec::new();
    for d in snapshot.documents() {
        for (i, r) in d.references.iter().enumerate() {
            if let (true, Some(t)) = (r.resolved, &r.target) {
                out.push(Constituent {
                    kind: ConnectionType::Cites,
                    from: d.celex().to_string(),
                    to: t.clone(),
                    origin: format!("ref:{}#{i}", d.celex()),
                });
            }
        }
        for (kind, target, key) in d.metadata_relations() {
            if let Some(t) = metadata_target(snapshot, &target) {
                out.push(Constituent {
                    kind,
                    from: d.celex().to_string(),
                    to: t,
                    origin: format!("meta:{}:{}", d.celex(), key),
                });
            }
        }
    }
    out
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CitationGraph {
    pub fn build(snapshot: &ReadSnapshot, priority: &PriorityTable) -> Self {
        Self::from_parts(
            build_dossiers(snapshot),
            document_connections(snapshot),
            priority,
        )
    }

    /// Assembles a graph from dossiers and document-level connections.
    /// Connection endpoints may name any member; connections inside one
    /// dossier or to unknown documents are dropped.
    pub fn from_parts(
        dossiers: Vec<Dossier>,
        connections: Vec<Constituent>,
        priority: &PriorityTable,
    ) -> Self {
        let mut member_of = BTreeMap::new();
        for d in &dossiers {
            for m in &d.members {
                member_of.insert(m.clone(), d.id.clone());
            }
        }
        let mut grouped: BTreeMap<(String, String), Vec<Constituent>> = BTreeMap::new();
        for c in connections {
            let (Some(f), Some(t)) = (member_of.get(&c.from), member_of.get(&c.to)) else {
                continue;
            };
            if f == t {
                continue;
            }
            grouped
                .entry(unordered(f, t))
                .or_default()
                .push(Constituent {
                    kind: c.kind,
                    from: f.clone(),
                    to: t.clone(),
                    origin: c.origin,
                });
        }
        let mut adjacency: BTreeMap<String, BTreeSet<String>> = dossiers
            .iter()
            .map(|d| (d.id.clone(), BTreeSet::new()))
            .collect();
        let mut edges = BTreeMap::new();
        for (pair, mut constituents) in grouped {
            constituents.sort();
            constituents.dedup();
            let (lead_type, from, to, directed) = resolve_edge(&constituents, priority);
            adjacency
                .entry(pair.0.clone())
                .or_default()
                .insert(pair.1.clone());
            adjacency
                .entry(pair.1.clone())
                .or_default()
                .insert(pair.0.clone());
            edges.insert(
                pair,
                Edge {
                    from,
                    to,
                    lead_type,
                    directed,
                    constituents,
                },
            );
        }
        CitationGraph {
            dossiers: dossiers.into_iter().map(|d| (d.id.clone(), d)).collect(),
            member_of,
            edges,
            adjacency,
        }
    }

    pub fn dossiers(&self) -> impl Iterator<Item = &Dossier> {
        self.dossiers.values()
    }

    pub fn dossier(&self, id: &str) -> Option<&Dossier> {
        self.dossiers.get(id)
    }

    /// Dossier containing the document `celex`.
    pub fn dossier_of(&self, celex: &str) -> Option<&Dossier> {
        self.member_of
            .get(celex)
            .and_then(|id| self.dossiers.get(id))
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&Edge> {
        self.edges.get(&unordered(a, b))
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &String> {
        self.adjacency.get(id).into_iter().flatten()
    }

    /// Staged view around `center`, which may name a dossier or any of its
    /// members.
    pub fn neighborhood(&self, center: &str, stage: Stage) -> Result<GraphView> {
        let center = self
            .dossier_of(center)
            .ok_or_else(|| Error::UnknownDossier(center.to_string()))?
            .id
            .clone();
        let first: BTreeSet<String> = self.neighbors(&center).cloned().collect();
        let mut nodes: BTreeSet<String> = first.clone();
        nodes.insert(center.clone());
        if stage == Stage::Second {
            for n in &first {
                nodes.extend(self.neighbors(n).cloned());
            }
        }
        let keep_edge = |e: &Edge| match stage {
            Stage::Star => e.touches(&center),
            Stage::Cross | Stage::Second => nodes.contains(&e.from) && nodes.contains(&e.to),
        };
        let mut edges = BTreeMap::new();
        for n in &nodes {
            for m in self.neighbors(n) {
                if n < m {
                    let e = &self.edges[&(n.clone(), m.clone())];
                    if keep_edge(e) {
                        edges.insert((n.clone(), m.clone()), e.clone());
                    }
                }
            }
        }
        Ok(GraphView {
            center,
            stage,
            nodes: nodes
                .iter()
                .map(|n| (n.clone(), self.dossiers[n].clone()))
                .collect(),
            edges,
            node_filter: Collection::ALL.into_iter().collect(),
            edge_filter: ConnectionType::ALL.into_iter().collect(),
        })
    }

    /// Top `k` dossiers by incoming directed edges, ties by ascending id.
    pub fn indegree_ranking(&self, k: usize) -> Vec<(String, usize)> {
        let mut counts: BTreeMap<&str, usize> =
            self.dossiers.keys().map(|k| (k.as_str(), 0)).collect();
        for e in self.edges.values().filter(|e| e.directed) {
            *counts.entry(e.to.as_str()).or_default() += 1;
        }
        let mut ranked: Vec<(String, usize)> = counts
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        ranked
    }
}

/// Restricts `v` to the center plus nodes of the listed collections, and to
/// edges of the listed lead types whose endpoints both survive.
pub fn filter_view(
    v: &GraphView,
    node_filter: &BTreeSet<Collection>,
    edge_filter: &BTreeSet<ConnectionType>,
) -> GraphView {
    let nodes: BTreeMap<String, Dossier> = v
        .nodes
        .iter()
        .filter(|(id, d)| **id == v.center || node_filter.contains(&d.collection))
        .map(|(id, d)| (id.clone(), d.clone()))
        .collect();
    let edges = v
        .edges
        .iter()
        .filter(|(_, e)| {
            nodes.contains_key(&e.from)
                && nodes.contains_key(&e.to)
                && edge_filter.contains(&e.lead_type)
        })
        .map(|(k, e)| (k.clone(), e.clone()))
        .collect();
    GraphView {
        center: v.center.clone(),
        stage: v.stage,
        nodes,
        edges,
        node_filter: v.node_filter.intersection(node_filter).copied().collect(),
        edge_filter: v.edge_filter.intersection(edge_filter).copied().collect(),
    }
}

#[derive(Serialize)]
struct JsonView<'a> {
    center: &'a str,
    stage: &'static str,
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: &'a str,
    label: &'a str,
    collection: &'static str,
    lead: &'a str,
    members: Vec<&'a str>,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    from: &'a str,
    to: &'a str,
    lead_type: &'static str,
    directed: bool,
    constituents: Vec<JsonConstituent>,
}

#[derive(Serialize)]
struct JsonConstituent {
    #[serde(rename = "type")]
    kind: &'static str,
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' | '\r' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

pub fn export_view(v: &GraphView, format: ExportFormat) -> String {
    let mut edges: Vec<&Edge> = v.edges.values().collect();
    edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    match format {
        ExportFormat::GraphJson => {
            let view = JsonView {
                center: &v.center,
                stage: v.stage.as_str(),
                nodes: v
                    .nodes
                    .values()
                    .map(|d| JsonNode {
                        id: &d.id,
                        label: &d.label,
                        collection: d.collection.as_str(),
                        lead: &d.lead,
                        members: d.members.iter().map(String::as_str).collect(),
                    })
                    .collect(),
                edges: edges
                    .iter()
                    .map(|e| JsonEdge {
                        from: &e.from,
                        to: &e.to,
                        lead_type: e.lead_type.as_str(),
                        directed: e.directed,
                        constituents: e
                            .constituents
                            .iter()
                            .map(|c| JsonConstituent {
                                kind: c.kind.as_str(),
                            })
                            .collect(),
                    })
                    .collect(),
            };
            serde_json::to_string(&view).expect("view serializes")
        }
        ExportFormat::Dot => {
            let mut out = String::from("digraph lexgraph {\n");
            out.push_str(&format!(
                "  graph [center=\"{}\", stage=\"{}\"];\n",
                dot_escape(&v.center),
                v.stage
            ));
            for d in v.nodes.values() {
                out.push_str(&format!(
                    "  \"{}\" [label=\"{}\", class=\"{}\"];\n",
                    dot_escape(&d.id),
                    dot_escape(&d.label),
                    d.collection
                ));
            }
            for e in edges {
                let dir = if e.directed { "" } else { ", dir=none" };
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [lead_type=\"{}\"{}];\n",
                    dot_escape(&e.from),
                    dot_escape(&e.to),
                    e.lead_type,
                    dir
                ));
            }
            out.push_str("}\n");
            out
        }
    }
}
