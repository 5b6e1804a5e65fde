use std::collections::BTreeMap;

use crate::ingest::{InteractionEvent, TimeWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub source: u32,
    pub target: u32,
    pub multiplicity: u64,
}

/// Directed retweeter -> retweeted multigraph for one window.
///
/// Nodes are kept sorted by user id and edges sorted by `(source, target)`,
/// so two graphs built from the same events in any order are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndorsementGraph {
    pub window: Option<TimeWindow>,
    nodes: Vec<String>,
    edges: Vec<Edge>,
    event_count: u64,
    self_loops_dropped: u64,
}

impl EndorsementGraph {
    /// Builds a graph from `(retweeter, retweeted, multiplicity)` triples.
    /// Self-loops and zero multiplicities are dropped.
    pub fn from_weighted_edges<'a, I>(window: Option<TimeWindow>, triples: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut counts: BTreeMap<(&str, &str), u64> = BTreeMap::new();
        let mut self_loops = 0;
        for (src, dst, m) in triples {
            if m == 0 {
                continue;
            }
            if src == dst {
                self_loops += m;
                continue;
            }
            *counts.entry((src, dst)).or_default() += m;
        }
        let mut nodes: Vec<&str> = counts.keys().flat_map(|&(a, b)| [a, b]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let index = |u: &str| nodes.binary_search(&u).expect("node") as u32;
        let mut edges: Vec<Edge> =
            counts.iter().map(|(&(a, b), &m)| Edge { source: index(a), target: index(b), multiplicity: m }).collect();
        edges.sort_unstable();
        let event_count = edges.iter().map(|e| e.multiplicity).sum();
        Self {
            window,
            nodes: nodes.into_iter().map(str::to_owned).collect(),
            edges,
            event_count,
            self_loops_dropped: self_loops,
        }
    }

    pub fn from_edges<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        Self::from_weighted_edges(None, pairs.into_iter().map(|(a, b)| (a, b, 1)))
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, user: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(user)).ok()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Total edge multiplicity, i.e. the number of endorsement events.
    pub fn event_count(&self) -> u64 {
        self.event_count
    }

    pub fn self_loops_dropped(&self) -> u64 {
        self.self_loops_dropped
    }

    pub fn multiplicity(&self, source: &str, target: &str) -> u64 {
        match (self.node_index(source), self.node_index(target)) {
            (Some(s), Some(t)) => self
                .edges
                .binary_search_by(|e| (e.source, e.target).cmp(&(s as u32, t as u32)))
                .map(|i| self.edges[i].multiplicity)
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Same graph with every multiplicity set to one.
    pub fn binarized(&self) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.multiplicity = 1;
        }
        g.event_count = g.edges.len() as u64;
        g
    }

    /// Merges graphs, e.g. all windows of a period.
    pub fn union<'a, I: IntoIterator<Item = &'a EndorsementGraph>>(graphs: I) -> Self {
        let graphs: Vec<&EndorsementGraph> = graphs.into_iter().collect();
        let triples = graphs.iter().flat_map(|g| {
            g.edges.iter().map(move |e| {
                (g.nodes[e.source as usize].as_str(), g.nodes[e.target as usize].as_str(), e.multiplicity)
            })
        });
        let mut merged = Self::from_weighted_edges(None, triples);
        merged.self_loops_dropped = graphs.iter().map(|g| g.self_loops_dropped).sum();
        merged
    }
}

/// Retweets become `author -> retweeted author` edges; originals are ignored.
pub fn build_endorsement_graph<'a, I>(events: I, window: Option<TimeWindow>) -> EndorsementGraph
where
    I: IntoIterator<Item = &'a InteractionEvent>,
{
    let triples = events
        .into_iter()
        .filter(|e| e.is_retweet())
        .filter_map(|e| e.retweeted_author_id.as_deref().map(|target| (e.author_id.as_str(), target, 1)));
    EndorsementGraph::from_weighted_edges(window, triples)
}
