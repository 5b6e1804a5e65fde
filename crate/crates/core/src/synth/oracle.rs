use std::collections::HashMap;

use crate::error::{Error, Result};

pub const ORACLE_BUDGET: u64 = 14;

/// Counts non-negative integer matrices with the given margins by
/// enumerating every admissible column, one column at a time. Remaining row
/// capacities are memoized, which keeps totals up to the budget fast.
pub fn oracle_count_tables(row_sums: &[u64], col_sums: &[u64]) -> Result<u128> {
    let rows: u64 = row_sums.iter().sum();
    let cols: u64 = col_sums.iter().sum();
    if rows.max(cols) > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded { total: rows.max(cols), budget: ORACLE_BUDGET });
    }
    if rows != cols {
        return Err(Error::MarginMismatch { rows, cols });
    }
    let mut memo = HashMap::new();
    Ok(count(row_sums.to_vec(), col_sums, &mut memo))
}

fn count(remaining: Vec<u64>, cols: &[u64], memo: &mut HashMap<(usize, Vec<u64>), u128>) -> u128 {
    let Some((&c, rest)) = cols.split_first() else {
        return u128::from(remaining.iter().all(|&r| r == 0));
    };
    let key = (cols.len(), remaining);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut remaining = key.1.clone();
    let mut total = 0;
    fill(&mut remaining, 0, c, rest, memo, &mut total);
    memo.insert(key, total);
    total
}

fn fill(
    remaining: &mut Vec<u64>,
    i: usize,
    left: u64,
    rest: &[u64],
    memo: &mut HashMap<(usize, Vec<u64>), u128>,
    total: &mut u128,
) {
    if i == remaining.len() {
        if left == 0 {
            *total += count(remaining.clone(), rest, memo);
        }
        return;
    }
    for x in 0..=left.min(remaining[i]) {
        remaining[i] -= x;
        fill(remaining, i + 1, left - x, rest, memo, total);
        remaining[i] += x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        assert_eq!(oracle_count_tables(&[2, 2], &[2, 2]).unwrap(), 3);
        assert_eq!(oracle_count_tables(&[1, 1, 1], &[1, 1, 1]).unwrap(), 6);
        assert_eq!(oracle_count_tables(&[7], &[7]).unwrap(), 1);
        assert_eq!(oracle_count_tables(&[], &[]).unwrap(), 1);
        assert_eq!(oracle_count_tables(&[1; 7], &[1; 7]).unwrap(), 5040);
    }

    #[test]
    fn budget_and_mismatch() {
        assert!(matches!(oracle_count_tables(&[15], &[15]), Err(Error::BudgetExceeded { total: 15, budget: 14 })));
        assert!(matches!(oracle_count_tables(&[2], &[3]), Err(Error::MarginMismatch { .. })));
    }
}
