use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::omega::{log_omega_with, OmegaConfig, OmegaMethod};
use crate::groups::{ModelSelectionResult, Partition};

/// Normalized reduced mutual information with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rmi {
    pub value: f64,
    pub common_users: usize,
    /// Some table count came from the large-table approximation.
    pub approximate: bool,
}

/// Group pairs `(a, b)` for users in both partitions (and in `universe`).
fn common_pairs(a: &Partition, b: &Partition, universe: Option<&BTreeSet<String>>) -> Vec<(usize, usize)> {
    // Both assignments iterate in user order, so a merge join suffices.
    let mut out = Vec::new();
    let mut ib = b.assignment().iter().peekable();
    for (user, &ga) in a.assignment() {
        while ib.peek().is_some_and(|(u, _)| u.as_str() < user.as_str()) {
            ib.next();
        }
        if let Some((u, &gb)) = ib.peek() {
            if *u == user && universe.is_none_or(|s| s.contains(user)) {
                out.push((ga, gb));
            }
        }
    }
    out
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// `n I(A;B) - ln Omega(a, b)` for a contingency table given as cells.
fn reduced_information(cells: &BTreeMap<(usize, usize), u64>, n: u64, config: &OmegaConfig) -> (f64, bool) {
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&(r, s), &c) in cells {
        *rows.entry(r).or_default() += c;
        *cols.entry(s).or_default() += c;
    }
    let nf = n as f64;
    let info = sorted_sum(
        cells
            .iter()
            .map(|(&(r, s), &c)| {
                let c = c as f64;
                c * (nf * c / (rows[&r] as f64 * cols[&s] as f64)).ln()
            })
            .collect(),
    );
    let r: Vec<u64> = rows.into_values().collect();
    let s: Vec<u64> = cols.into_values().collect();
    let omega = log_omega_with(&r, &s, config).expect("margins of one table agree");
    (info - omega.value, omega.method == OmegaMethod::Approximate)
}

fn diagonal(groups: impl Iterator<Item = usize>) -> BTreeMap<(usize, usize), u64> {
    let mut cells = BTreeMap::new();
    for g in groups {
        *cells.entry((g, g)).or_default() += 1;
    }
    cells
}

/// RMI between two partitions over their common users, normalized as
/// `2 M(A;B) / (M(A;A) + M(B;B))` and clamped to `[0, 1]`.
///
/// `None` when fewer than two users are shared. A non-positive denominator
/// (for example, both partitions trivial on the common users) gives 0.
pub fn rmi_with(
    a: &Partition,
    b: &Partition,
    universe: Option<&BTreeSet<String>>,
    config: &OmegaConfig,
) -> Option<Rmi> {
    let pairs = common_pairs(a, b, universe);
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &p in &pairs {
        *cells.entry(p).or_default() += 1;
    }
    let (m_ab, x_ab) = reduced_information(&cells, n as u64, config);
    let (m_aa, x_aa) = reduced_information(&diagonal(pairs.iter().map(|p| p.0)), n as u64, config);
    let (m_bb, x_bb) = reduced_information(&diagonal(pairs.iter().map(|p| p.1)), n as u64, config);
    let denominator = m_aa + m_bb;
    let value = if denominator > 0.0 { (2.0 * m_ab / denominator).clamp(0.0, 1.0) } else { 0.0 };
    Some(Rmi { value, common_users: n, approximate: x_ab || x_aa || x_bb })
}

pub fn rmi(a: &Partition, b: &Partition, universe: Option<&BTreeSet<String>>) -> Option<f64> {
    rmi_with(a, b, universe, &OmegaConfig::default()).map(|r| r.value)
}

/// Per-window RMI of the chosen weekly partition against a reference;
/// `None` for windows without evidence of structure.
pub fn partisan_sorting_series(weekly: &[ModelSelectionResult], reference: &Partition) -> Vec<Option<f64>> {
    weekly.iter().map(|w| if w.has_structure() { rmi(w.chosen(), reference, None) } else { None }).collect()
}
