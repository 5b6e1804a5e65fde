//! Number of non-negative integer matrices with fixed margins, in log space.
//!
//! Small tables are counted exactly by dynamic programming over columns with
//! exact integer arithmetic (`u128` when the count provably fits, big
//! integers otherwise). Large tables use the maximum-entropy estimate
//!
//! ```text
//! ln Omega ~ g(Z) - (R+S-1)/2 ln(2 pi) - 1/2 ln det Q
//! ```
//!
//! where `Z` is the matrix of geometric means matching the margins,
//! `g(Z) = sum (z+1) ln(z+1) - z ln z`, and `Q` is the covariance of the
//! first `R + S - 1` margins under independent geometric cells with those
//! means. An Edgeworth term from the third and fourth cell cumulants is
//! added, which removes most of the constant bias on small tables. Results
//! carry a [`OmegaMethod`] flag so callers can record which
//! path produced them.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::ln_choose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct OmegaConfig {
    /// Largest table total counted exactly when one side has two entries.
    pub two_row_exact_max_n: u64,
    /// Largest table total counted exactly when one side has three entries.
    pub three_row_exact_max_n: u64,
    /// Largest total for the general exact recursion (four or more rows).
    pub general_exact_max_n: u64,
    /// State-space cap for the general exact recursion.
    pub general_exact_max_states: u64,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self {
            two_row_exact_max_n: 100_000,
            three_row_exact_max_n: 2_000,
            general_exact_max_n: 64,
            general_exact_max_states: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaMethod {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogOmega {
    pub value: f64,
    pub method: OmegaMethod,
}

/// `ln` of the number of tables with the given margins.
pub fn log_omega(row_sums: &[u64], col_sums: &[u64]) -> Result<f64> {
    log_omega_with(row_sums, col_sums, &OmegaConfig::default()).map(|r| r.value)
}

pub fn log_omega_with(row_sums: &[u64], col_sums: &[u64], config: &OmegaConfig) -> Result<LogOmega> {
    let rs: u64 = row_sums.iter().sum();
    let cs: u64 = col_sums.iter().sum();
    if rs != cs {
        return Err(Error::MarginMismatch { rows: rs, cols: cs });
    }
    let mut rows: Vec<u64> = row_sums.iter().copied().filter(|&x| x > 0).collect();
    let mut cols: Vec<u64> = col_sums.iter().copied().filter(|&x| x > 0).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    // Orientation is canonical so transposed inputs take the identical path.
    if (rows.len(), &rows) > (cols.len(), &cols) {
        std::mem::swap(&mut rows, &mut cols);
    }
    // Ascending rows: the largest row is the implicit one in the recursions.
    cols.reverse();
    let n = rs;
    let exact = |value: f64| Ok(LogOmega { value, method: OmegaMethod::Exact });

    let big = count_bound_bits(&rows, &cols) >= 120.0;
    let count =
        |kind: Kind| if big { kind.ln_count::<BigUint>(&rows, &cols) } else { kind.ln_count::<u128>(&rows, &cols) };
    match rows.len() {
        0 | 1 => return exact(0.0),
        2 if n <= config.two_row_exact_max_n => return exact(count(Kind::TwoRows)),
        3 if n <= config.three_row_exact_max_n => return exact(count(Kind::ThreeRows)),
        r if r >= 4 && n <= config.general_exact_max_n => {
            let states: f64 = rows[..r - 1].iter().map(|&x| (x + 1) as f64).product();
            if states <= config.general_exact_max_states as f64 {
                return exact(count(Kind::General));
            }
        }
        _ => {}
    }
    Ok(LogOmega { value: max_entropy_estimate(&rows, &cols), method: OmegaMethod::Approximate })
}

/// log2 of the count ignoring row constraints; an upper bound on the answer
/// and on every intermediate state count.
fn count_bound_bits(rows: &[u64], cols: &[u64]) -> f64 {
    let r = rows.len().max(1) as u64;
    cols.iter().map(|&c| ln_choose(c + r - 1, r - 1)).sum::<f64>() / std::f64::consts::LN_2
}

#[derive(Clone, Copy)]
enum Kind {
    TwoRows,
    ThreeRows,
    General,
}

impl Kind {
    fn ln_count<C: Count>(self, rows: &[u64], cols: &[u64]) -> f64 {
        let c: C = match self {
            Kind::TwoRows => count_two_rows(rows[0] as usize, cols),
            Kind::ThreeRows => count_three_rows(rows[0] as usize, rows[1] as usize, cols),
            Kind::General => count_general(rows, cols),
        };
        c.ln()
    }
}

/// Exact arithmetic used by the recursions.
trait Count: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&mut self, other: &Self);
    fn sub(&mut self, other: &Self);
    fn ln(&self) -> f64;
}

impl Count for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub(&mut self, other: &Self) {
        *self -= *other;
    }
    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl Count for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigUint::from(1u8)
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&mut self, other: &Self) {
        *self -= other;
    }
    fn ln(&self) -> f64 {
        let bits = self.bits();
        if bits <= 64 {
            return (self.to_u64().expect("fits") as f64).ln();
        }
        let shift = bits - 64;
        let top = (self >> shift).to_u64().expect("fits") as f64;
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Tables with two rows: tracks how much of the first row is filled.
fn count_two_rows<C: Count>(r1: usize, cols: &[u64]) -> C {
    let mut dp = vec![C::zero(); r1 + 1];
    dp[0] = C::one();
    let mut prefix = vec![C::zero(); r1 + 1];
    for &c in cols {
        let c = c as usize;
        let mut acc = C::zero();
        for t in 0..=r1 {
            acc.add(&dp[t]);
            prefix[t] = acc.clone();
        }
        for t in 0..=r1 {
            let mut v = prefix[t].clone();
            if t > c {
                v.sub(&prefix[t - c - 1]);
            }
            dp[t] = v;
        }
    }
    dp[r1].clone()
}

/// Tables with three rows: tracks the fill of the two smallest rows.
///
/// The per-column transition sums the old table over the triangle
/// `{(a-x, b-y) : x + y <= c}`, maintained incrementally along `b` with a
/// column prefix and an anti-diagonal prefix, so each column costs
/// `O(r1 * r2)`.
fn count_three_rows<C: Count>(r1: usize, r2: usize, cols: &[u64]) -> C {
    let Some((&last, inner)) = cols.split_last() else {
        return if r1 + r2 == 0 { C::one() } else { C::zero() };
    };
    let Some((&first, middle)) = inner.split_first() else {
        return if r1 + r2 <= last as usize { C::one() } else { C::zero() };
    };
    let w = r2 + 1;
    let at = |i: usize, j: usize| i * w + j;
    // after the first column every fill with i + j <= c is reachable once
    let mut dp = vec![C::zero(); (r1 + 1) * w];
    for i in 0..=r1.min(first as usize) {
        for j in 0..=r2.min(first as usize - i) {
            dp[at(i, j)] = C::one();
        }
    }
    let mut col_prefix = vec![C::zero(); dp.len()];
    let mut diag_prefix = vec![C::zero(); dp.len()];
    let mut next = vec![C::zero(); dp.len()];
    for &c in middle {
        let c = c as usize;
        for i in 0..=r1 {
            for j in 0..=r2 {
                let mut v = dp[at(i, j)].clone();
                if i > 0 {
                    v.add(&col_prefix[at(i - 1, j)]);
                }
                col_prefix[at(i, j)] = v;
                let mut d = dp[at(i, j)].clone();
                if i > 0 && j < r2 {
                    d.add(&diag_prefix[at(i - 1, j + 1)]);
                }
                diag_prefix[at(i, j)] = d;
            }
        }
        for a in 0..=r1 {
            let lo = a.saturating_sub(c);
            for b in 0..=r2 {
                // column segment old[lo..=a][b]
                let mut v = col_prefix[at(a, b)].clone();
                if lo > 0 {
                    v.sub(&col_prefix[at(lo - 1, b)]);
                }
                if b > 0 {
                    v.add(&next[at(a, b - 1)]);
                    // anti-diagonal i + j = a + b - 1 - c, i in [lo, min(a, d)]
                    if a + b > c {
                        let d = a + b - 1 - c;
                        let hi = a.min(d);
                        if lo <= hi {
                            // add back first so unsigned counts never dip below zero
                            if lo > 0 {
                                v.add(&diag_prefix[at(lo - 1, d - lo + 1)]);
                            }
                            v.sub(&diag_prefix[at(hi, d - hi)]);
                        }
                    }
                }
                next[at(a, b)] = v;
            }
        }
        std::mem::swap(&mut dp, &mut next);
    }
    // the last column takes whatever is left of both tracked rows
    let last = last as usize;
    let mut total = C::zero();
    for i in r1.saturating_sub(last)..=r1 {
        let from = (r1 + r2).saturating_sub(last + i);
        for j in from..=r2 {
            total.add(&dp[at(i, j)]);
        }
    }
    total
}

/// Any number of rows: states are the fills of all rows but the last, and
/// each column is placed one cell at a time so equal partial fills merge.
fn count_general<C: Count>(rows: &[u64], cols: &[u64]) -> C {
    let (tracked, last) = rows.split_at(rows.len() - 1);
    let last = last[0];
    let mut states: HashMap<Vec<u64>, C> = HashMap::new();
    states.insert(vec![0; tracked.len()], C::one());
    let mut placed = 0u64;
    for &c in cols {
        placed += c;
        // the column remainder rides along as the final coordinate
        let mut partial: HashMap<Vec<u64>, C> = HashMap::with_capacity(states.len());
        for (mut fill, count) in states.drain() {
            fill.push(c);
            partial.insert(fill, count);
        }
        for (k, &cap) in tracked.iter().enumerate() {
            let mut next: HashMap<Vec<u64>, C> = HashMap::with_capacity(partial.len());
            for (state, count) in &partial {
                let left = state[tracked.len()];
                for x in 0..=left.min(cap - state[k]) {
                    let mut s = state.clone();
                    s[k] += x;
                    s[tracked.len()] -= x;
                    next.entry(s).or_insert_with(C::zero).add(count);
                }
            }
            partial = next;
        }
        for (mut fill, count) in partial {
            fill.pop();
            let in_tracked: u64 = fill.iter().sum();
            if placed - in_tracked <= last {
                states.entry(fill).or_insert_with(C::zero).add(&count);
            }
        }
    }
    states.get(tracked).cloned().unwrap_or_else(C::zero)
}

/// Maximum-entropy (Gaussian lattice) estimate; margins must be positive.
fn max_entropy_estimate(rows: &[u64], cols: &[u64]) -> f64 {
    let (nr, nc) = (rows.len(), cols.len());
    let n: f64 = rows.iter().sum::<u64>() as f64;
    // Cell means are u_i v_j / (1 - u_i v_j) with u_i v_j < 1.
    let mut u: Vec<f64> = rows.iter().map(|&r| (r as f64 / (n + nc as f64)).sqrt()).collect();
    let mut v: Vec<f64> = cols.iter().map(|&c| (c as f64 / (n + nr as f64)).sqrt()).collect();
    let solve = |target: f64, other: &[f64]| -> f64 {
        let vmax = other.iter().cloned().fold(0.0, f64::max);
        let (mut lo, mut hi) = (0.0, 1.0 / vmax);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let s: f64 = other.iter().map(|&o| mid * o / (1.0 - mid * o)).sum();
            if s < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    for _ in 0..2_000 {
        let mut change: f64 = 0.0;
        for i in 0..nr {
            let nu = solve(rows[i] as f64, &v);
            change = change.max((nu / u[i] - 1.0).abs());
            u[i] = nu;
        }
        for j in 0..nc {
            let nv = solve(cols[j] as f64, &u);
            change = change.max((nv / v[j] - 1.0).abs());
            v[j] = nv;
        }
        if change < 1e-13 {
            break;
        }
    }
    let mut entropy = 0.0;
    let dim = nr + nc - 1;
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    let mut cells = Vec::with_capacity(nr * nc);
    for i in 0..nr {
        for j in 0..nc {
            let p = u[i] * v[j];
            let z = p / (1.0 - p);
            entropy += (z + 1.0) * (z + 1.0).ln() - if z > 0.0 { z * z.ln() } else { 0.0 };
            let var = z + z * z;
            q[(i, i)] += var;
            if j < nc - 1 {
                q[(nr + j, nr + j)] += var;
                q[(i, nr + j)] += var;
                q[(nr + j, i)] += var;
            }
            cells.push((i, (j < nc - 1).then_some(nr + j), z));
        }
    }
    let Some(ch) = q.clone().cholesky() else {
        return entropy - 0.5 * dim as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * q.determinant().abs().ln();
    };
    let log_det = 2.0 * ch.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let gaussian = entropy - 0.5 * dim as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_det;
    if cells.len() > EDGEWORTH_MAX_CELLS {
        return gaussian;
    }
    gaussian + edgeworth_correction(&cells, &ch.inverse())
}

/// Above this many cells the quadratic-cost correction is skipped; it
/// shrinks as tables grow anyway.
const EDGEWORTH_MAX_CELLS: usize = 2_500;

/// `nu - mu / 2` from the third and fourth cumulants of the geometric
/// cells, with `w_ij = s_i + t_j` Gaussian under covariance `Q^-1`:
/// `nu = sum k4 E[w^4] / 24`, `mu = sum sum k3 k3' E[w^3 w'^3] / 36`.
fn edgeworth_correction(cells: &[(usize, Option<usize>, f64)], inv: &DMatrix<f64>) -> f64 {
    let cov = |a: &(usize, Option<usize>, f64), b: &(usize, Option<usize>, f64)| {
        let mut c = inv[(a.0, b.0)];
        if let Some(t) = b.1 {
            c += inv[(a.0, t)];
        }
        if let Some(s) = a.1 {
            c += inv[(s, b.0)];
            if let Some(t) = b.1 {
                c += inv[(s, t)];
            }
        }
        c
    };
    let k3: Vec<f64> = cells.iter().map(|c| c.2 * (1.0 + c.2) * (1.0 + 2.0 * c.2)).collect();
    let var: Vec<f64> = cells.iter().map(|c| cov(c, c)).collect();
    let mut nu = 0.0;
    let mut mu = 0.0;
    for (a, ca) in cells.iter().enumerate() {
        let z = ca.2;
        nu += z * (1.0 + z) * (1.0 + 6.0 * z + 6.0 * z * z) * 3.0 * var[a] * var[a];
        for (b, cb) in cells.iter().enumerate() {
            let c = cov(ca, cb);
            mu += k3[a] * k3[b] * (9.0 * var[a] * var[b] * c + 6.0 * c * c * c);
        }
    }
    nu / 24.0 - mu / 72.0
}
