use std::collections::HashSet;

use crate::base::ThreeSum;
use crate::full::StrategyConfig;
use crate::timeline::{RetroOp, TimeKey};

use super::{Driver, ReductionError, Report};

/// Whether some `a + b + c == 0` with one element from each set.
pub fn brute_3sum(a: &[i64], b: &[i64], c: &[i64]) -> bool {
    let a: HashSet<i64> = a.iter().copied().collect();
    b.iter().any(|x| c.iter().any(|y| a.contains(&-(x + y))))
}

/// Decides 3-SUM with `O(n)` fully retroactive operations on a three-list
/// structure.
///
/// `L1` holds all of `A`. `B` and `C` are cut into groups of
/// `s = floor(sqrt(n))` elements so that both size gates hold. Group `C_j`
/// is written into `L3` ending at time `q_j`; group `B_i` replaces the
/// placeholder operations at the times `t_k` that precede everything in
/// `L3`. A query at `q_j` then tests `A x B_i x C_j`.
pub fn solve_3sum_retro(
    a: &[i64],
    b: &[i64],
    c: &[i64],
    config: &StrategyConfig,
) -> Result<Report<bool>, ReductionError> {
    let n = a.len();
    if b.len() != n || c.len() != n {
        return Err(ReductionError::DimensionMismatch(format!(
            "set sizes {}, {}, {} differ",
            n,
            b.len(),
            c.len()
        )));
    }
    let mut driver = Driver::new(config, &ThreeSum::new());
    if n == 0 {
        return Ok(Report {
            answer: false,
            census: driver.census,
        });
    }
    let s = n.isqrt();
    for (i, x) in a.iter().enumerate() {
        driver.append(RetroOp::set(1, i, Some(*x)))?;
    }
    let placeholders: Vec<TimeKey> = (0..s)
        .map(|k| driver.append(RetroOp::set(2, k, Some(0))))
        .collect::<Result<_, _>>()?;
    let mut group_ends = Vec::new();
    for group in c.chunks(s) {
        let mut last = TimeKey(0);
        // A ragged last group clears the slots it does not fill.
        for k in 0..s {
            last = driver.append(RetroOp::set(3, k, group.get(k).copied()))?;
        }
        group_ends.push(last);
    }

    let mut found = false;
    for group in b.chunks(s) {
        for (k, t) in placeholders.iter().enumerate() {
            driver.replace(*t, RetroOp::set(2, k, group.get(k).copied()))?;
        }
        for q in &group_ends {
            found |= driver.query(*q);
        }
    }
    Ok(Report {
        answer: found,
        census: driver.census,
    })
}
