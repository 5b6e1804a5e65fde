//! Penalized planted-partition objective.
//!
//! With `m_in` the internal edge multiplicity, `T_in` the number of ordered
//! internal node pairs and `m`, `T` the totals, the fitted log-likelihood is
//!
//! ```text
//! fit = m_in ln(m_in / T_in) + m_out ln(m_out / T_out)
//! ```
//!
//! (zero-count terms contribute 0). The description-length penalty is
//! `n ln B + ln C(n-1, B-1) + k ln(m+1)` with `k = 2` rate parameters for
//! `B >= 2` and `k = 1` for `B = 1`. The score is `fit - penalty`.
//!
//! The degree-corrected variant replaces pair counts with products of
//! out- and in-degree sums: `T_in = sum_r Kout_r * Kin_r`, `T = m^2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    #[default]
    PlantedPartition,
    DegreeCorrected,
}

impl Objective {
    /// Version tag written into partition files and caches.
    pub fn tag(self) -> &'static str {
        match self {
            Objective::PlantedPartition => "planted-partition-mdl/1",
            Objective::DegreeCorrected => "degree-corrected-planted-partition-mdl/1",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::PlantedPartition => "planted-partition",
            Objective::DegreeCorrected => "degree-corrected",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planted-partition" => Ok(Objective::PlantedPartition),
            "degree-corrected" => Ok(Objective::DegreeCorrected),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

#[inline]
fn xlogx_over(count: f64, pairs: f64) -> f64 {
    if count <= 0.0 || pairs <= 0.0 {
        0.0
    } else {
        count * (count / pairs).ln()
    }
}

/// Profile log-likelihood given internal counts and totals.
#[inline]
pub fn fit_value(m_in: f64, t_in: f64, m_total: f64, t_total: f64) -> f64 {
    xlogx_over(m_in, t_in) + xlogx_over(m_total - m_in, t_total - t_in)
}

/// `ln C(n, k)` as a sum of logs; exact enough for the small `k` used here.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

pub fn penalty(nodes: usize, groups: usize, edges: u64) -> f64 {
    let n = nodes as u64;
    let b = groups as u64;
    let rates = if groups >= 2 { 2.0 } else { 1.0 };
    let assignment = if n == 0 { 0.0 } else { n as f64 * (b as f64).ln() + ln_choose(n - 1, b - 1) };
    assignment + rates * ((edges + 1) as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_terms_vanish() {
        assert_eq!(fit_value(0.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(fit_value(0.0, 10.0, 5.0, 20.0), 5.0 * (5.0f64 / 10.0).ln());
    }

    #[test]
    fn ln_choose_small_values() {
        assert!((ln_choose(5, 2) - 10f64.ln()).abs() < 1e-12);
        assert_eq!(ln_choose(7, 0), 0.0);
        assert!((ln_choose(199, 1) - 199f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn penalty_grows_with_groups() {
        let p1 = penalty(100, 1, 500);
        let p2 = penalty(100, 2, 500);
        let p3 = penalty(100, 3, 500);
        assert!(p1 < p2 && p2 < p3);
        assert!((p1 - 501f64.ln()).abs() < 1e-12);
    }
}
