//! Random dossier graphs and a brute-force model of their staged views.

use std::collections::{BTreeMap, BTreeSet};

use lexgraph_core::graph::Constituent;
use lexgraph_core::graph::{Dossier, GraphView, Stage};
use lexgraph_core::model::{Collection, ConnectionType};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

pub struct RandomGraph {
    pub dossiers: Vec<Dossier>,
    pub connections: Vec<Constituent>,
    pub member_of: BTreeMap<String, String>,
}

/// `n` dossiers of one to three members and about `2n` connections of
/// random types. A few connections stay inside one dossier or point at
/// unknown documents.
pub fn random_graph(rng: &mut StdRng, n: usize) -> RandomGraph {
    let mut dossiers = Vec::with_capacity(n);
    let mut member_of = BTreeMap::new();
    let mut docs = Vec::new();
    for i in 0..n {
        let size = rng.random_range(1..=3);
        let members: BTreeSet<String> = (0..size).map(|j| format!("d{i:04}m{j}")).collect();
        let lead = members.iter().next().unwrap().clone();
        for m in &members {
            member_of.insert(m.clone(), lead.clone());
            docs.push(m.clone());
        }
        dossiers.push(Dossier {
            id: lead.clone(),
            lead: lead.clone(),
            members,
            collection: *Collection::ALL.choose(rng).unwrap(),
            label: format!("dossier {i}"),
        });
    }
    let mut connections = Vec::new();
    let m = rng.random_range(0..=2 * n);
    for k in 0..m {
        let from = docs.choose(rng).unwrap().clone();
        let to = if rng.random_bool(0.02) {
            "unknown".to_string()
        } else {
            docs.choose(rng).unwrap().clone()
        };
        connections.push(Constituent {
            kind: *ConnectionType::ALL.choose(rng).unwrap(),
            from,
            to,
            origin: format!("meta:{k}"),
        });
    }
    RandomGraph {
        dossiers,
        connections,
        member_of,
    }
}

const PAIRS: [(&str, &str); 7] = [
    ("ANNULS", "ANNULLED_BY"),
    ("MODIFIES", "MODIFIED_BY"),
    ("SUSPENDS", "SUSPENDED_BY"),
    ("CONFIRMS", "CONFIRMED_BY"),
    ("LEGAL_BASIS", "BASIS_FOR"),
    ("CITES", "CITED_BY"),
    ("PRECEDES", "FOLLOWS"),
];
const PRIORITY: [&str; 8] = [
    "ANNULS",
    "SUSPENDS",
    "MODIFIES",
    "CONFIRMS",
    "PRECEDES",
    "LEGAL_BASIS",
    "CITES",
    "RELATED",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelEdge {
    pub lead: String,
    pub from: String,
    pub to: String,
    pub directed: bool,
    pub constituents: usize,
}

/// (type, from, to) with the type read on its active side.
type Directed = (String, String, String);

/// Reads a connection as its active type with endpoints in active order.
fn active(kind: &str, from: &str, to: &str) -> Directed {
    match PAIRS.iter().find(|p| p.1 == kind) {
        Some(p) => (p.0.to_string(), to.to_string(), from.to_string()),
        None => (kind.to_string(), from.to_string(), to.to_string()),
    }
}

pub struct GraphModel {
    pub adjacency: BTreeMap<String, BTreeSet<String>>,
    pub edges: BTreeMap<(String, String), ModelEdge>,
    pub collection: BTreeMap<String, Collection>,
}

fn pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl GraphModel {
    pub fn new(g: &RandomGraph) -> Self {
        let mut grouped: BTreeMap<(String, String), Vec<Directed>> = BTreeMap::new();
        for c in &g.connections {
            let (Some(f), Some(t)) = (g.member_of.get(&c.from), g.member_of.get(&c.to)) else {
                continue;
            };
            if f != t {
                grouped
                    .entry(pair(f, t))
                    .or_default()
                    .push(active(c.kind.as_str(), f, t));
            }
        }
        let mut adjacency: BTreeMap<String, BTreeSet<String>> = g
            .dossiers
            .iter()
            .map(|d| (d.id.clone(), BTreeSet::new()))
            .collect();
        let mut edges = BTreeMap::new();
        for (key, list) in grouped {
            adjacency.get_mut(&key.0).unwrap().insert(key.1.clone());
            adjacency.get_mut(&key.1).unwrap().insert(key.0.clone());
            let best = list
                .iter()
                .min_by_key(|(k, f, t)| {
                    (
                        PRIORITY.iter().position(|p| p == k).unwrap(),
                        f.clone(),
                        t.clone(),
                    )
                })
                .unwrap()
                .clone();
            let directed = best.0 != "RELATED";
            let (from, to) = if directed {
                (best.1, best.2)
            } else {
                pair(&best.1, &best.2)
            };
            edges.insert(
                key,
                ModelEdge {
                    lead: best.0,
                    from,
                    to,
                    directed,
                    constituents: list.len(),
                },
            );
        }
        GraphModel {
            adjacency,
            edges,
            collection: g
                .dossiers
                .iter()
                .map(|d| (d.id.clone(), d.collection))
                .collect(),
        }
    }

    /// Dossiers within `depth` hops of `center`.
    pub fn bfs(&self, center: &str, depth: usize) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([center.to_string()]);
        let mut frontier = vec![center.to_string()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for n in &frontier {
                for m in &self.adjacency[n] {
                    if seen.insert(m.clone()) {
                        next.push(m.clone());
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    pub fn induced(&self, nodes: &BTreeSet<String>) -> BTreeSet<(String, String)> {
        self.edges
            .keys()
            .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
            .cloned()
            .collect()
    }

    pub fn stage(
        &self,
        center: &str,
        stage: Stage,
    ) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
        match stage {
            Stage::Star => {
                let nodes = self.bfs(center, 1);
                let edges = self
                    .edges
                    .keys()
                    .filter(|(a, b)| a == center || b == center)
                    .cloned()
                    .collect();
                (nodes, edges)
            }
            Stage::Cross => {
                let nodes = self.bfs(center, 1);
                let edges = self.induced(&nodes);
                (nodes, edges)
            }
            Stage::Second => {
                let nodes = self.bfs(center, 2);
                let edges = self.induced(&nodes);
                (nodes, edges)
            }
        }
    }

    /// The staged view restricted to the center plus nodes of the allowed
    /// collections, and to edges of allowed lead types between kept nodes.
    pub fn filtered(
        &self,
        center: &str,
        stage: Stage,
        collections: &BTreeSet<Collection>,
        types: &BTreeSet<ConnectionType>,
    ) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
        let (nodes, edges) = self.stage(center, stage);
        let nodes: BTreeSet<String> = nodes
            .into_iter()
            .filter(|n| n == center || collections.contains(&self.collection[n]))
            .collect();
        let type_names: BTreeSet<&str> = types.iter().map(|t| t.as_str()).collect();
        let edges = edges
            .into_iter()
            .filter(|(a, b)| {
                nodes.contains(a)
                    && nodes.contains(b)
                    && type_names.contains(self.edges[&(a.clone(), b.clone())].lead.as_str())
            })
            .collect();
        (nodes, edges)
    }
}

pub fn view_sets(v: &GraphView) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
    (
        v.nodes.keys().cloned().collect(),
        v.edges.keys().cloned().collect(),
    )
}

/// Differences between the view's edges and the model's, as messages.
pub fn edge_mismatches(v: &GraphView, model: &GraphModel) -> Vec<String> {
    let mut out = Vec::new();
    for (key, e) in &v.edges {
        let Some(m) = model.edges.get(key) else {
            out.push(format!("unexpected edge {key:?}"));
            continue;
        };
        let got = ModelEdge {
            lead: e.lead_type.as_str().to_string(),
            from: e.from.clone(),
            to: e.to.clone(),
            directed: e.directed,
            constituents: e.constituents.len(),
        };
        if &got != m {
            out.push(format!("edge {key:?}: got {got:?}, expected {m:?}"));
        }
    }
    out
}
