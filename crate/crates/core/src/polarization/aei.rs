use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::EndorsementGraph;
use crate::groups::Partition;
use crate::ingest::TimeWindow;

/// AEI of one group pair in one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAei {
    pub window: Option<TimeWindow>,
    pub group_x: String,
    pub group_y: String,
    pub aei: Option<f64>,
    pub m_in: u64,
    pub m_out: u64,
    /// Active members of each group (nodes of the graph).
    pub n_x: usize,
    pub n_y: usize,
}

impl PairAei {
    pub fn pair_name(&self) -> String {
        format!("{}|{}", self.group_x, self.group_y)
    }
}

/// `(d_in - d_out) / (d_in + d_out)` with ordered-pair densities.
///
/// `d_in = m_in / (n_x(n_x-1) + n_y(n_y-1))`, `d_out = m_out / (2 n_x n_y)`.
/// A zero internal denominator means `d_in = 0`. `None` when there are no
/// edges or either group is empty.
pub fn aei_from_counts(m_in: u64, m_out: u64, n_x: usize, n_y: usize) -> Option<f64> {
    if m_in + m_out == 0 || n_x == 0 || n_y == 0 {
        return None;
    }
    let (nx, ny) = (n_x as f64, n_y as f64);
    let internal_pairs = nx * (nx - 1.0) + ny * (ny - 1.0);
    let d_in = if internal_pairs > 0.0 { m_in as f64 / internal_pairs } else { 0.0 };
    let d_out = m_out as f64 / (2.0 * nx * ny);
    if d_in + d_out == 0.0 {
        return None;
    }
    if d_out == 0.0 {
        return Some(1.0);
    }
    if d_in == 0.0 {
        return Some(-1.0);
    }
    Some(((d_in - d_out) / (d_in + d_out)).clamp(-1.0, 1.0))
}

/// AEI between groups `x` and `y` on the sub-multigraph induced by their
/// active members. Third groups and unassigned users are ignored.
pub fn aei(graph: &EndorsementGraph, partition: &Partition, x: usize, y: usize) -> Result<PairAei> {
    let b = partition.num_groups();
    if x == y || x >= b || y >= b {
        return Err(Error::InvalidInput(format!("AEI needs two distinct groups in 0..{b}, got {x} and {y}")));
    }
    let side: Vec<Option<usize>> =
        graph.nodes().iter().map(|u| partition.group_of(u).filter(|&g| g == x || g == y)).collect();
    let n_x = side.iter().filter(|s| **s == Some(x)).count();
    let n_y = side.iter().filter(|s| **s == Some(y)).count();
    let (mut m_in, mut m_out) = (0u64, 0u64);
    for e in graph.edges() {
        if let (Some(a), Some(c)) = (side[e.source as usize], side[e.target as usize]) {
            if a == c {
                m_in += e.multiplicity;
            } else {
                m_out += e.multiplicity;
            }
        }
    }
    Ok(PairAei {
        window: graph.window.clone(),
        group_x: partition.label(x),
        group_y: partition.label(y),
        aei: aei_from_counts(m_in, m_out, n_x, n_y),
        m_in,
        m_out,
        n_x,
        n_y,
    })
}

/// AEI for every unordered pair `x < y`, in pair order.
pub fn all_pairs_aei(graph: &EndorsementGraph, partition: &Partition) -> Vec<PairAei> {
    let b = partition.num_groups();
    let mut out = Vec::with_capacity(b * b.saturating_sub(1) / 2);
    for x in 0..b {
        for y in x + 1..b {
            out.push(aei(graph, partition, x, y).expect("valid pair"));
        }
    }
    out
}
