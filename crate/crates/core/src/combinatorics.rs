//! Exact counting helpers, subset enumeration, and the level-wise search over
//! downward-closed families shared by the dimension computations.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of subset evaluations an exact enumeration may perform.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Upper limit on the work an exact enumeration is allowed to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget(u64::MAX)
    }

    pub(crate) fn exceeded(&self, lower_bound: Option<i64>) -> Error {
        Error::BudgetExceeded {
            budget: self.0,
            lower_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

/// A count together with how it was obtained. Sampled values are never
/// reported as exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counted {
    pub value: u128,
    pub exactness: Exactness,
    /// Number of random subsets evaluated, for sampled results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

impl Counted {
    pub fn exact(value: u128) -> Self {
        Counted {
            value,
            exactness: Exactness::Exact,
            samples: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({n},{k}) exceeds 128 bits")))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `C(n,0) + C(n,1) + ... + C(n,d)`, the Sauer–Shelah bound.
pub fn sauer_shelah_bound(n: u64, d: u64) -> Result<u128> {
    if d > n {
        return Err(Error::Range {
            value: d as i64,
            range: format!("0..={n}"),
        });
    }
    binomial_prefix_sum(n, d)
}

/// `C(n, <= d)`, with `d` allowed to exceed `n`.
pub fn binomial_prefix_sum(n: u64, d: u64) -> Result<u128> {
    let mut total: u128 = 0;
    for j in 0..=d.min(n) {
        total = total
            .checked_add(binomial(n, j)?)
            .ok_or_else(|| Error::Overflow(format!("C({n}, <= {d}) exceeds 128 bits")))?;
    }
    Ok(total)
}

/// `2^t` as `u128`, saturating at `u128::MAX` for `t >= 128`.
pub fn pow2(t: usize) -> u128 {
    if t >= 128 {
        u128::MAX
    } else {
        1u128 << t
    }
}

/// Advances `c` (strictly increasing, values `< n`) to the next
/// combination in colexicographic order. Returns `false` after the last one.
pub fn next_colex(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for j in 0..k {
        let limit = if j + 1 < k { c[j + 1] } else { n };
        if c[j] + 1 < limit {
            c[j] += 1;
            for (i, slot) in c.iter_mut().enumerate().take(j) {
                *slot = i;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every `k`-subset of `0..n` in colex order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        if !next_colex(&mut c, n) {
            break;
        }
    }
}

/// Maximizes `score` over all `k`-subsets of `0..n`.
///
/// Work is split by the largest element and run in parallel; ties are broken
/// towards the colex-first subset, so the result is identical to a serial scan.
pub fn max_over_subsets<F>(n: usize, k: usize, score: F) -> Option<(u128, Vec<usize>)>
where
    F: Fn(&[usize]) -> u128 + Sync,
{
    if k > n {
        return None;
    }
    if k == 0 {
        return Some((score(&[]), Vec::new()));
    }
    (k - 1..n)
        .into_par_iter()
        .map(|top| {
            let mut best: Option<(u128, Vec<usize>)> = None;
            let mut c: Vec<usize> = (0..k - 1).collect();
            c.push(top);
            loop {
                let v = score(&c);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, c.clone()));
                }
                if !next_colex(&mut c[..k - 1], top) {
                    break;
                }
            }
            best.expect("at least one subset per top element")
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
}

/// Result of a level-wise search over a downward-closed family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LevelSearch {
    /// A largest set satisfying the predicate (first generated at its level).
    pub largest: Vec<usize>,
    /// A largest set failing the predicate although all of its facets
    /// satisfy it, if any such set was generated.
    pub largest_critical: Option<Vec<usize>>,
}

/// Breadth-first search over subsets of `0..universe` that satisfy a
/// predicate closed under taking subsets. The empty set is assumed to
/// satisfy it. Level `k+1` candidates are built only from level-`k`
/// survivors whose every facet also survived, and the search stops at the
/// first empty level.
pub(crate) fn search_downward_closed<F>(
    universe: usize,
    budget: Budget,
    pred: F,
) -> Result<LevelSearch>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut spent: u64 = 0;
    let mut largest_critical: Option<Vec<usize>> = None;
    loop {
        let members: HashSet<&[usize]> = level.iter().map(|s| s.as_slice()).collect();
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&l| l + 1);
            for e in start..universe {
                let mut cand = s.clone();
                cand.push(e);
                let closed = (0..s.len()).all(|drop| {
                    let facet: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    members.contains(facet.as_slice())
                });
                if closed {
                    candidates.push(cand);
                }
            }
        }
        spent = spent.saturating_add(candidates.len() as u64);
        if spent > budget.0 {
            return Err(budget.exceeded(Some(level[0].len() as i64)));
        }
        let verdicts: Vec<bool> = candidates.par_iter().map(|c| pred(c)).collect();
        let mut next = Vec::new();
        for (cand, ok) in candidates.into_iter().zip(verdicts) {
            if ok {
                next.push(cand);
            } else if largest_critical.as_ref().is_none_or(|c| c.len() < cand.len()) {
                largest_critical = Some(cand);
            }
        }
        if next.is_empty() {
            let mut largest = level.swap_remove(0);
            largest.sort_unstable();
            return Ok(LevelSearch {
                largest,
                largest_critical,
            });
        }
        level = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(100, 50).unwrap(), 100891344545564193334812497256);
    }

    #[test]
    fn binomial_overflow_is_an_error() {
        assert!(matches!(binomial(200, 100), Err(Error::Overflow(_))));
    }

    #[test]
    fn sauer_shelah_values() {
        assert_eq!(sauer_shelah_bound(4, 2).unwrap(), 11);
        for n in 0..10 {
            assert_eq!(sauer_shelah_bound(n, 0).unwrap(), 1);
        }
        assert_eq!(sauer_shelah_bound(5, 5).unwrap(), 32);
        assert!(sauer_shelah_bound(3, 4).is_err());
    }

    #[test]
    fn colex_enumerates_every_subset_once() {
        let mut seen = Vec::new();
        for_each_subset(5, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[1], vec![0, 1, 3]);
        assert_eq!(seen[2], vec![0, 2, 3]);
        assert_eq!(seen[3], vec![1, 2, 3]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let unique: HashSet<_> = seen.iter().cloned().collect();
        assert_eq!(unique.len(), 10);
    }

    #[test]
    fn parallel_max_matches_serial_scan() {
        let score = |c: &[usize]| ((c.iter().sum::<usize>() * 7) % 11) as u128;
        let (v, w) = max_over_subsets(9, 4, score).unwrap();
        let mut best: Option<(u128, Vec<usize>)> = None;
        for_each_subset(9, 4, |c| {
            let s = score(c);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, c.to_vec()));
            }
        });
        assert_eq!((v, w), best.unwrap());
    }

    #[test]
    fn level_search_finds_largest_and_critical() {
        // sets of size <= 2 inside {0,1,2,3}
        let out = search_downward_closed(4, Budget::default(), |s| s.len() <= 2).unwrap();
        assert_eq!(out.largest, vec![0, 1]);
        assert_eq!(out.largest_critical.unwrap().len(), 3);
    }

    #[test]
    fn level_search_respects_budget() {
        let err = search_downward_closed(20, Budget(50), |_| true).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { lower_bound: Some(_), .. }));
    }
}
