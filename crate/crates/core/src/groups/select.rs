use std::collections::BTreeMap;

use super::partition::Partition;
use super::search::{infer_partition, InferenceOptions};
use crate::error::{Error, Result};
use crate::graphs::EndorsementGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelectionResult {
    /// Best partition per feasible `B` (those with `B <= node count`).
    pub per_b: BTreeMap<usize, Partition>,
    pub chosen_b: usize,
    /// Score of the chosen `B` minus the best other `B`; 0 if only one was tried.
    pub evidence_margin: f64,
}

impl ModelSelectionResult {
    pub fn chosen(&self) -> &Partition {
        &self.per_b[&self.chosen_b]
    }

    /// `true` when the data supports more than one group.
    pub fn has_structure(&self) -> bool {
        self.chosen_b > 1
    }
}

/// Scores `B = 1..=b_max` and keeps the best penalized score. Ties go to the
/// smaller `B`.
pub fn select_model(
    graph: &EndorsementGraph,
    b_max: usize,
    seed: u64,
    restarts: usize,
    options: &InferenceOptions,
) -> Result<ModelSelectionResult> {
    if b_max == 0 {
        return Err(Error::InvalidInput("B_max must be at least 1".into()));
    }
    let n = graph.node_count();
    let mut per_b = BTreeMap::new();
    for b in 1..=b_max {
        if b > 1 && b > n {
            break;
        }
        per_b.insert(b, infer_partition(graph, b, seed, restarts, options)?);
    }
    let mut ranked: Vec<(usize, f64)> = per_b.iter().map(|(&b, p)| (b, p.score())).collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let chosen_b = ranked[0].0;
    let evidence_margin = ranked.get(1).map_or(0.0, |r| ranked[0].1 - r.1);
    Ok(ModelSelectionResult { per_b, chosen_b, evidence_margin })
}

/// Institutional (B = 2) and ideological (B = 3) fits of one aggregated
/// party-topic graph.
pub fn fit_reference_partitions(
    parties_graph: &EndorsementGraph,
    seed: u64,
    restarts: usize,
    options: &InferenceOptions,
) -> Result<(Partition, Partition)> {
    let n = parties_graph.node_count();
    if n < 6 {
        return Err(Error::TooFewNodes { nodes: n, groups: 3 });
    }
    let institutional = infer_partition(parties_graph, 2, seed, restarts, options)?;
    let ideological = infer_partition(parties_graph, 3, seed, restarts, options)?;
    Ok((institutional, ideological))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_has_no_structure() {
        let r = select_model(&EndorsementGraph::from_edges([]), 3, 0, 2, &InferenceOptions::default()).unwrap();
        assert_eq!(r.chosen_b, 1);
        assert_eq!(r.per_b.len(), 1);
        assert_eq!(r.evidence_margin, 0.0);
    }

    #[test]
    fn reference_fit_needs_enough_nodes() {
        let g = EndorsementGraph::from_edges([("a", "b"), ("c", "d")]);
        assert!(fit_reference_partitions(&g, 0, 1, &InferenceOptions::default()).is_err());
    }
}
