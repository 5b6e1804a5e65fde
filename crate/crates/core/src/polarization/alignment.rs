use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::omega::OmegaConfig;
use super::rmi::rmi_with;
use crate::groups::Partition;

pub const DEFAULT_MIN_OVERLAP: usize = 20;

/// One weekly clustering of one topic.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentEntry {
    pub topic: String,
    /// Window label, e.g. the window start date.
    pub week: String,
    pub chosen_b: usize,
    /// Chosen partition over the week's active users.
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentCell {
    pub topic_a: String,
    pub week_a: String,
    pub topic_b: String,
    pub week_b: String,
    pub value: Option<f64>,
    pub overlap: usize,
    pub approximate: bool,
}

/// RMI between every ordered pair of entries, row-major in entry order.
///
/// A cell is undefined when either week found no structure or fewer than
/// `min_overlap` users appear in both. Values are computed once per
/// unordered pair, so the matrix is exactly symmetric.
pub fn alignment_matrix(entries: &[AlignmentEntry], min_overlap: usize, config: &OmegaConfig) -> Vec<AlignmentCell> {
    let k = entries.len();
    let upper: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let computed: Vec<(Option<f64>, usize, bool)> = upper
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&entries[i], &entries[j]);
            let structured = a.chosen_b > 1 && b.chosen_b > 1;
            let r = if structured { rmi_with(&a.partition, &b.partition, None, config) } else { None };
            let overlap = r.map_or_else(|| overlap_count(&a.partition, &b.partition), |r| r.common_users);
            let defined = structured && overlap >= min_overlap;
            match r {
                Some(r) if defined => (Some(r.value), overlap, r.approximate),
                _ => (None, overlap, false),
            }
        })
        .collect();
    let mut grid = vec![(None, 0, false); k * k];
    for (&(i, j), &v) in upper.iter().zip(&computed) {
        grid[i * k + j] = v;
        grid[j * k + i] = v;
    }
    let mut cells = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (value, overlap, approximate) = grid[i * k + j];
            cells.push(AlignmentCell {
                topic_a: entries[i].topic.clone(),
                week_a: entries[i].week.clone(),
                topic_b: entries[j].topic.clone(),
                week_b: entries[j].week.clone(),
                value,
                overlap,
                approximate,
            });
        }
    }
    cells
}

fn overlap_count(a: &Partition, b: &Partition) -> usize {
    a.users().filter(|u| b.contains(u)).count()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn entry(topic: &str, week: &str, users: std::ops::Range<usize>, b: usize) -> AlignmentEntry {
        let map: BTreeMap<String, usize> = users.map(|u| (format!("u{u:04}"), u % b)).collect();
        AlignmentEntry {
            topic: topic.into(),
            week: week.into(),
            chosen_b: b,
            partition: Partition::new(map, b, 0.0).unwrap(),
        }
    }

    #[test]
    fn diagonal_symmetry_and_rules() {
        let entries = vec![
            entry("t", "w1", 0..40, 2),
            entry("t", "w2", 10..50, 2),
            entry("u", "w1", 100..140, 2),
            entry("u", "w2", 0..40, 1),
        ];
        let cells = alignment_matrix(&entries, 20, &OmegaConfig::default());
        assert_eq!(cells.len(), 16);
        let at = |i: usize, j: usize| &cells[i * 4 + j];
        assert_eq!(at(0, 0).value, Some(1.0));
        assert_eq!(at(0, 1).value, Some(1.0));
        assert_eq!(at(0, 1).overlap, 30);
        assert_eq!(at(0, 2).value, None);
        assert_eq!(at(0, 2).overlap, 0);
        assert_eq!(at(3, 3).value, None);
        assert_eq!(at(0, 3).value, None);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(at(i, j).value, at(j, i).value);
            }
        }
    }

    #[test]
    fn overlap_threshold() {
        let entries = vec![entry("t", "w1", 0..40, 2), entry("t", "w2", 30..70, 2)];
        let cells = alignment_matrix(&entries, 20, &OmegaConfig::default());
        assert_eq!(cells[1].overlap, 10);
        assert_eq!(cells[1].value, None);
        let cells = alignment_matrix(&entries, 10, &OmegaConfig::default());
        assert_eq!(cells[1].value, Some(1.0));
    }
}
