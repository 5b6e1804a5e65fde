use std::collections::BTreeMap;

use super::endorsement::EndorsementGraph;
use crate::groups::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct Participation {
    /// Active users per group index; every group of the partition is present.
    pub per_group: BTreeMap<usize, usize>,
    pub nonpartisan_count: usize,
    pub active_total: usize,
    pub nonpartisan_share: f64,
}

/// Counts active users (incident to at least one edge) per group.
pub fn participation(graph: &EndorsementGraph, partition: &Partition) -> Participation {
    let mut per_group: BTreeMap<usize, usize> = (0..partition.num_groups()).map(|g| (g, 0)).collect();
    let mut nonpartisan_count = 0;
    // Graph nodes are exactly the users incident to an edge.
    for user in graph.nodes() {
        match partition.group_of(user) {
            Some(g) => *per_group.entry(g).or_default() += 1,
            None => nonpartisan_count += 1,
        }
    }
    let active_total = graph.node_count();
    let nonpartisan_share = if active_total == 0 { 0.0 } else { nonpartisan_count as f64 / active_total as f64 };
    Participation { per_group, nonpartisan_count, active_total, nonpartisan_share }
}
