//! Finite set systems and their exact invariants.
//!
//! A [`SetSystem`] is a base set `0..ground_size` with a family of subsets
//! stored as bit vectors. Construction canonicalizes the family: members are
//! deduplicated and sorted lexicographically on their bit strings, so every
//! operation below is a deterministic function of the family alone.
//!
//! The dimension-type invariants (VC dimension, independence dimension,
//! breadth, Helly number) are all computed by a level-wise search over a
//! family of subsets that is closed under taking subsets:
//!
//! * shattered subsets of the base set,
//! * independent subfamilies of members,
//! * irredundant subfamilies with nonempty intersection,
//! * subfamilies with nonempty intersection.
//!
//! Breadth is the largest size of an irredundant subfamily with nonempty
//! intersection (each member cuts the intersection of the others strictly),
//! floored at 1. If some nonempty intersection of `n` members needs more
//! than `d` of them, a minimal subfamily with the same intersection is
//! irredundant of size `> d`, and every subset of an irredundant family is
//! irredundant, so the level search is exact for arbitrary families.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::combinatorics::{
    binomial, for_each_subset, max_over_subsets, pow2, search_downward_closed, Budget, Counted,
    Exactness,
};
use crate::error::{Error, Result};

/// A finite base set `0..ground_size` with a canonical family of subsets.
///
/// Equality compares the canonical family only; the duplicate flag is ignored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SetSystemJson", into = "SetSystemJson")]
pub struct SetSystem {
    ground_size: usize,
    members: Vec<BitSet>,
    had_duplicates: bool,
}

impl PartialEq for SetSystem {
    fn eq(&self, other: &Self) -> bool {
        self.ground_size == other.ground_size && self.members == other.members
    }
}

impl Eq for SetSystem {}

impl std::hash::Hash for SetSystem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ground_size.hash(state);
        self.members.hash(state);
    }
}

/// Wire form: `{"ground_size": n, "members": ["0110", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetSystemJson {
    pub ground_size: usize,
    pub members: Vec<String>,
}

impl TryFrom<SetSystemJson> for SetSystem {
    type Error = Error;

    fn try_from(j: SetSystemJson) -> Result<Self> {
        let members = j
            .members
            .iter()
            .map(|s| BitSet::from_bit_str(s))
            .collect::<Result<Vec<_>>>()?;
        SetSystem::new(j.ground_size, members)
    }
}

impl From<SetSystem> for SetSystemJson {
    fn from(s: SetSystem) -> Self {
        SetSystemJson {
            ground_size: s.ground_size,
            members: s.members.iter().map(BitSet::to_bit_string).collect(),
        }
    }
}

impl SetSystem {
    pub fn new(ground_size: usize, mut members: Vec<BitSet>) -> Result<Self> {
        if let Some(bad) = members.iter().find(|m| m.len() != ground_size) {
            return Err(Error::Shape(format!(
                "member has width {} but ground_size is {ground_size}",
                bad.len()
            )));
        }
        let before = members.len();
        members.sort();
        members.dedup();
        Ok(SetSystem {
            ground_size,
            had_duplicates: members.len() != before,
            members,
        })
    }

    pub fn from_index_sets<I, S>(ground_size: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let members = sets
            .into_iter()
            .map(|s| BitSet::from_indices(ground_size, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground_size, members)
    }

    pub fn from_bit_strs(ground_size: usize, strs: &[&str]) -> Result<Self> {
        let members = strs
            .iter()
            .map(|s| BitSet::from_bit_str(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground_size, members)
    }

    pub fn empty_family(ground_size: usize) -> Self {
        SetSystem {
            ground_size,
            members: Vec::new(),
            had_duplicates: false,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("set system serializes")
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn members(&self) -> &[BitSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether the input handed to the constructor contained repeated members.
    pub fn had_duplicates(&self) -> bool {
        self.had_duplicates
    }

    pub fn contains_member(&self, set: &BitSet) -> bool {
        self.members.binary_search(set).is_ok()
    }

    /// The dual system: base set is the member list, and element `x`
    /// contributes the set of member indices containing it.
    pub fn dual(&self) -> SetSystem {
        let m = self.members.len();
        let rows = (0..self.ground_size)
            .map(|x| {
                let mut row = BitSet::new(m);
                for (j, s) in self.members.iter().enumerate() {
                    if s.contains(x) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        SetSystem::new(m, rows).expect("rows have member-count width")
    }

    /// `S ∩ A`, reindexed onto `0..|A|` in increasing element order.
    pub fn trace(&self, subset: &BitSet) -> Result<SetSystem> {
        if subset.len() != self.ground_size {
            return Err(Error::Shape(format!(
                "subset has width {} but ground_size is {}",
                subset.len(),
                self.ground_size
            )));
        }
        let positions: Vec<usize> = subset.iter().collect();
        let members = self.members.iter().map(|s| s.restrict(&positions)).collect();
        SetSystem::new(positions.len(), members)
    }

    /// `|S ∩ A|` for `A` given by sorted element positions.
    pub fn trace_count(&self, positions: &[usize]) -> u128 {
        if positions.len() <= 128 {
            let keys: HashSet<u128> = self.members.iter().map(|s| s.pack(positions)).collect();
            keys.len() as u128
        } else {
            let keys: HashSet<BitSet> =
                self.members.iter().map(|s| s.restrict(positions)).collect();
            keys.len() as u128
        }
    }

    pub fn is_shattered(&self, positions: &[usize]) -> bool {
        let k = positions.len();
        if k >= 128 || (self.members.len() as u128) < pow2(k) {
            return false;
        }
        self.trace_count(positions) == pow2(k)
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if t > self.ground_size {
            return Err(Error::Range {
                value: t as i64,
                range: format!("0..={}", self.ground_size),
            });
        }
        Ok(())
    }

    /// Exact shatter function `π(t)`: the maximum of `|S ∩ A|` over all
    /// `t`-subsets `A` of the base set.
    pub fn shatter_function(&self, t: usize, budget: Budget) -> Result<Counted> {
        Ok(self.shatter_with_witness(t, budget)?.0)
    }

    /// Like [`Self::shatter_function`], also returning a colex-first maximizing subset.
    pub fn shatter_with_witness(&self, t: usize, budget: Budget) -> Result<(Counted, Vec<usize>)> {
        self.check_t(t)?;
        let work = binomial(self.ground_size as u64, t as u64)?;
        if work > budget.0 as u128 {
            return Err(budget.exceeded(None));
        }
        let (value, witness) = max_over_subsets(self.ground_size, t, |a| self.trace_count(a))
            .expect("t <= ground_size");
        Ok((Counted::exact(value), witness))
    }

    /// Sampling lower bound on `π(t)` from `samples` random `t`-subsets.
    pub fn shatter_sampled(&self, t: usize, samples: u64, seed: u64) -> Result<Counted> {
        self.check_t(t)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0u128;
        for _ in 0..samples {
            let mut a = sample(&mut rng, self.ground_size, t).into_vec();
            a.sort_unstable();
            best = best.max(self.trace_count(&a));
        }
        Ok(Counted {
            value: best,
            exactness: Exactness::LowerBound,
            samples: Some(samples),
        })
    }

    /// VC dimension; `-1` for the empty family.
    pub fn vc_dimension(&self, budget: Budget) -> Result<i64> {
        Ok(match self.vc_witness(budget)? {
            None => -1,
            Some(w) => w.len() as i64,
        })
    }

    /// A largest shattered subset, or `None` for the empty family.
    pub fn vc_witness(&self, budget: Budget) -> Result<Option<Vec<usize>>> {
        if self.members.is_empty() {
            return Ok(None);
        }
        let found = search_downward_closed(self.ground_size, budget, |a| self.is_shattered(a))?;
        Ok(Some(found.largest))
    }

    /// Number of nonempty atoms of the Boolean algebra generated by the
    /// selected members, i.e. distinct membership signatures of base elements.
    pub fn atom_count(&self, member_indices: &[usize]) -> u128 {
        let selected: Vec<&BitSet> = member_indices.iter().map(|&i| &self.members[i]).collect();
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        for x in 0..self.ground_size {
            seen.insert(selected.iter().map(|s| s.contains(x)).collect());
        }
        seen.len() as u128
    }

    /// Dual shatter function `π*(t)`: the maximum number of nonempty atoms
    /// cut out by `t` members.
    pub fn dual_shatter(&self, t: usize, budget: Budget) -> Result<Counted> {
        if t > self.members.len() {
            return Err(Error::Range {
                value: t as i64,
                range: format!("0..={}", self.members.len()),
            });
        }
        let work = binomial(self.members.len() as u64, t as u64)?;
        if work > budget.0 as u128 {
            return Err(budget.exceeded(None));
        }
        let (v, _) = max_over_subsets(self.members.len(), t, |idx| self.atom_count(idx))
            .expect("t <= member count");
        Ok(Counted::exact(v))
    }

    fn is_independent(&self, idx: &[usize]) -> bool {
        let k = idx.len();
        if k >= 64 || (self.ground_size as u128) < pow2(k) {
            return false;
        }
        self.atom_count(idx) == pow2(k)
    }

    /// Largest `n` such that some `n` members are independent (all `2^n`
    /// atoms nonempty). `0` for the empty family.
    pub fn independence_dimension(&self, budget: Budget) -> Result<usize> {
        Ok(self.independence_witness(budget)?.len())
    }

    pub fn independence_witness(&self, budget: Budget) -> Result<Vec<usize>> {
        let found = search_downward_closed(self.members.len(), budget, |idx| {
            self.is_independent(idx)
        })?;
        Ok(found.largest)
    }

    fn intersection_of(&self, idx: &[usize]) -> BitSet {
        let mut acc = BitSet::full(self.ground_size);
        for &i in idx {
            acc.intersect_with(&self.members[i]);
        }
        acc
    }

    /// Members at `idx` have nonempty intersection and dropping any one of
    /// them strictly enlarges it.
    pub fn is_irredundant(&self, idx: &[usize]) -> bool {
        let all = self.intersection_of(idx);
        if all.is_empty() {
            return false;
        }
        if idx.len() < 2 {
            return true;
        }
        (0..idx.len()).all(|drop| {
            let mut rest = BitSet::full(self.ground_size);
            for (i, &j) in idx.iter().enumerate() {
                if i != drop {
                    rest.intersect_with(&self.members[j]);
                }
            }
            rest != all
        })
    }

    /// Breadth: the smallest `d >= 1` such that every nonempty intersection
    /// of more than `d` members equals an intersection of `d` of them.
    pub fn breadth(&self, budget: Budget) -> Result<usize> {
        Ok(self.breadth_witness(budget)?.len().max(1))
    }

    /// A largest irredundant subfamily with nonempty intersection.
    pub fn breadth_witness(&self, budget: Budget) -> Result<Vec<usize>> {
        let found =
            search_downward_closed(self.members.len(), budget, |idx| self.is_irredundant(idx))?;
        Ok(found.largest)
    }

    /// Helly number: the smallest `d >= 1` such that every subfamily of more
    /// than `d` members whose `d`-subfamilies all intersect has nonempty
    /// total intersection.
    pub fn helly_number(&self, budget: Budget) -> Result<usize> {
        Ok(self.helly_witness(budget)?.map_or(1, |w| w.len().max(1)))
    }

    /// A largest inconsistent subfamily all of whose proper subfamilies are
    /// consistent. The Helly number is its size (at least 1).
    pub fn helly_witness(&self, budget: Budget) -> Result<Option<Vec<usize>>> {
        let found = search_downward_closed(self.members.len(), budget, |idx| {
            !self.intersection_of(idx).is_empty()
        })?;
        Ok(found.largest_critical)
    }

    /// Searches for an injective placement of `pattern` into a trace of the
    /// system. `Ok(None)` certifies absence; running out of budget is an
    /// error, never an absence.
    pub fn contains_trace(
        &self,
        pattern: TracePattern,
        budget: Budget,
    ) -> Result<Option<TraceWitness>> {
        let sets = pattern.sets();
        let k = pattern.size;
        let mut search = PlacementSearch {
            system: self,
            sets: &sets,
            k,
            ordered: pattern.kind == PatternKind::Chain,
            nodes: 0,
            budget,
            chosen: Vec::with_capacity(k),
        };
        if self.ground_size < k || self.members.len() < sets.len() {
            return Ok(None);
        }
        if !search.extend()? {
            return Ok(None);
        }
        let elements = search.chosen.clone();
        let member_indices = sets
            .iter()
            .map(|&p| {
                self.find_member_with_trace(&elements, p)
                    .expect("complete placement realizes every pattern set")
            })
            .collect();
        let witness = TraceWitness {
            elements,
            member_indices,
        };
        debug_assert!(witness.verify(self, pattern));
        Ok(Some(witness))
    }

    /// Index of a member whose trace on `elements` is `{elements[i] : bit i of mask}`.
    fn find_member_with_trace(&self, elements: &[usize], mask: u64) -> Option<usize> {
        self.members.iter().position(|s| {
            elements
                .iter()
                .enumerate()
                .all(|(i, &x)| s.contains(x) == (mask >> i & 1 == 1))
        })
    }

    /// Evaluates both conditions of the breadth duality for `d`:
    /// (1) among any `d+1` members one contains the intersection of the rest;
    /// (2) among any `d+1` members one is contained in the union of the rest.
    ///
    /// Requires the family to be closed under pairwise intersection and union
    /// and not to contain the empty set.
    pub fn check_breadth_duality(&self, d: usize) -> Result<(bool, bool)> {
        if d == 0 {
            return Err(Error::Precondition("d must be at least 1".into()));
        }
        if let Some(i) = self.members.iter().position(BitSet::is_empty) {
            return Err(Error::Precondition(format!("member {i} is the empty set")));
        }
        for (i, a) in self.members.iter().enumerate() {
            for (j, b) in self.members.iter().enumerate().skip(i + 1) {
                if !self.contains_member(&a.and(b)) {
                    return Err(Error::Precondition(format!(
                        "members {i} and {j} ({a} and {b}): intersection is not a member"
                    )));
                }
                if !self.contains_member(&a.or(b)) {
                    return Err(Error::Precondition(format!(
                        "members {i} and {j} ({a} and {b}): union is not a member"
                    )));
                }
            }
        }
        let mut cond1 = true;
        let mut cond2 = true;
        for_each_subset(self.members.len(), d + 1, |idx| {
            if !cond1 && !cond2 {
                return;
            }
            let others = |drop: usize| idx.iter().filter(move |&&j| j != drop);
            if cond1
                && !idx.iter().any(|&i| {
                    let mut meet = BitSet::full(self.ground_size);
                    for &j in others(i) {
                        meet.intersect_with(&self.members[j]);
                    }
                    meet.is_subset(&self.members[i])
                })
            {
                cond1 = false;
            }
            if cond2
                && !idx.iter().any(|&i| {
                    let mut join = BitSet::new(self.ground_size);
                    for &j in others(i) {
                        join.union_with(&self.members[j]);
                    }
                    self.members[i].is_subset(&join)
                })
            {
                cond2 = false;
            }
        });
        Ok((cond1, cond2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Chain,
    Star,
    Costar,
}

/// The `k`-chain `{[1], [1,2], ..., [1..k]}`, the `k`-star of singletons, or
/// the `k`-costar of co-singletons, as set systems on `k` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TracePattern {
    pub kind: PatternKind,
    pub size: usize,
}

impl TracePattern {
    pub fn new(kind: PatternKind, size: usize) -> Result<Self> {
        if !(2..=63).contains(&size) {
            return Err(Error::Range {
                value: size as i64,
                range: "2..=63".into(),
            });
        }
        Ok(TracePattern { kind, size })
    }

    pub fn chain(size: usize) -> Result<Self> {
        Self::new(PatternKind::Chain, size)
    }

    pub fn star(size: usize) -> Result<Self> {
        Self::new(PatternKind::Star, size)
    }

    pub fn costar(size: usize) -> Result<Self> {
        Self::new(PatternKind::Costar, size)
    }

    /// Pattern members as bit masks over the `k` pattern points.
    pub fn sets(&self) -> Vec<u64> {
        let k = self.size;
        let full = (1u64 << k) - 1;
        match self.kind {
            PatternKind::Chain => (1..=k).map(|i| (1u64 << i) - 1).collect(),
            PatternKind::Star => (0..k).map(|i| 1u64 << i).collect(),
            PatternKind::Costar => (0..k).map(|i| full & !(1u64 << i)).collect(),
        }
    }

    pub fn as_system(&self) -> SetSystem {
        SetSystem::from_index_sets(
            self.size,
            self.sets()
                .into_iter()
                .map(|m| (0..self.size).filter(move |i| m >> i & 1 == 1)),
        )
        .expect("pattern points are in range")
    }
}

/// Placement of a pattern: pattern point `i` goes to `elements[i]`, and
/// pattern set `j` is the trace of member `member_indices[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceWitness {
    pub elements: Vec<usize>,
    pub member_indices: Vec<usize>,
}

impl TraceWitness {
    /// Direct containment check of the placement.
    pub fn verify(&self, system: &SetSystem, pattern: TracePattern) -> bool {
        let distinct: HashSet<usize> = self.elements.iter().copied().collect();
        if self.elements.len() != pattern.size || distinct.len() != pattern.size {
            return false;
        }
        let sets = pattern.sets();
        sets.len() == self.member_indices.len()
            && sets.iter().zip(&self.member_indices).all(|(&mask, &m)| {
                m < system.len()
                    && self.elements.iter().enumerate().all(|(i, &x)| {
                        x < system.ground_size()
                            && system.members()[m].contains(x) == (mask >> i & 1 == 1)
                    })
            })
    }
}

struct PlacementSearch<'a> {
    system: &'a SetSystem,
    sets: &'a [u64],
    k: usize,
    ordered: bool,
    nodes: u64,
    budget: Budget,
    chosen: Vec<usize>,
}

impl PlacementSearch<'_> {
    /// Every pattern set restricted to the chosen prefix must already be a trace.
    fn prefix_realizable(&self) -> bool {
        let j = self.chosen.len();
        let prefix_mask = if j == 64 { u64::MAX } else { (1u64 << j) - 1 };
        let mut needed: Vec<u64> = self.sets.iter().map(|&p| p & prefix_mask).collect();
        needed.sort_unstable();
        needed.dedup();
        needed.iter().all(|&mask| {
            self.system.members().iter().any(|s| {
                self.chosen
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| s.contains(x) == (mask >> i & 1 == 1))
            })
        })
    }

    fn extend(&mut self) -> Result<bool> {
        if self.chosen.len() == self.k {
            return Ok(true);
        }
        let start = if self.ordered {
            0
        } else {
            self.chosen.last().map_or(0, |&l| l + 1)
        };
        for x in start..self.system.ground_size() {
            if self.chosen.contains(&x) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget.0 {
                return Err(self.budget.exceeded(None));
            }
            self.chosen.push(x);
            if self.prefix_realizable() && self.extend()? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn all_k_subsets(n: usize, k: usize) -> SetSystem {
        let mut sets = Vec::new();
        for_each_subset(n, k, |c| sets.push(c.to_vec()));
        SetSystem::from_index_sets(n, sets).unwrap()
    }

    fn power_set(n: usize) -> SetSystem {
        SetSystem::from_index_sets(
            n,
            (0..1usize << n).map(|m| (0..n).filter(move |i| m >> i & 1 == 1)),
        )
        .unwrap()
    }

    fn singletons(n: usize) -> SetSystem {
        SetSystem::from_index_sets(n, (0..n).map(|i| [i])).unwrap()
    }

    fn chain(n: usize) -> SetSystem {
        SetSystem::from_index_sets(n, (1..=n).map(|i| 0..i)).unwrap()
    }

    fn set(n: usize, idx: &[usize]) -> BitSet {
        BitSet::from_indices(n, idx.iter().copied()).unwrap()
    }

    #[test]
    fn canonicalizes_and_flags_duplicates() {
        let s = SetSystem::from_bit_strs(3, &["110", "001", "110"]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.had_duplicates());
        assert_eq!(s.members()[0].to_bit_string(), "001");
    }

    #[test]
    fn rejects_width_mismatch() {
        assert!(matches!(
            SetSystem::from_bit_strs(3, &["11"]),
            Err(Error::Shape(_))
        ));
        let s = singletons(3);
        assert!(matches!(s.trace(&BitSet::new(4)), Err(Error::Shape(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = SetSystem::from_bit_strs(4, &["0110", "1000"]).unwrap();
        let text = s.to_json();
        assert_eq!(text, r#"{"ground_size":4,"members":["0110","1000"]}"#);
        assert_eq!(SetSystem::from_json(&text).unwrap(), s);
        assert!(SetSystem::from_json(r#"{"ground_size":2,"members":["012"]}"#).is_err());
    }

    #[test]
    fn trace_of_two_subsets_on_pair() {
        // every S ∩ {0,1} for S a 2-subset of a 4-set, enumerated by hand
        let s = all_k_subsets(4, 2);
        let t = s.trace(&set(4, &[0, 1])).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.ground_size(), 2);
        let expect = SetSystem::from_bit_strs(2, &["00", "10", "01", "11"]).unwrap();
        assert_eq!(t, expect);
    }

    #[test]
    fn trace_on_empty_subset() {
        let s = all_k_subsets(4, 2);
        assert_eq!(s.trace(&BitSet::new(4)).unwrap().len(), 1);
        assert_eq!(SetSystem::empty_family(4).trace(&BitSet::new(4)).unwrap().len(), 0);
    }

    #[test]
    fn trace_of_small_subsets_family_is_tight() {
        let mut sets = Vec::new();
        for k in 0..=2 {
            for_each_subset(5, k, |c| sets.push(c.to_vec()));
        }
        let s = SetSystem::from_index_sets(5, sets).unwrap();
        for_each_subset(5, 4, |a| {
            let t = s.trace(&set(5, a)).unwrap();
            assert_eq!(t.len(), 11);
        });
    }

    #[test]
    fn shatter_of_singleton_family() {
        let s = SetSystem::from_bit_strs(5, &["01101"]).unwrap();
        for t in 0..=5 {
            assert_eq!(s.shatter_function(t, b()).unwrap().value, 1);
        }
    }

    #[test]
    fn shatter_range_and_budget_errors() {
        let s = power_set(4);
        assert!(matches!(s.shatter_function(5, b()), Err(Error::Range { .. })));
        assert!(matches!(
            s.shatter_function(2, Budget(3)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampled_shatter_is_flagged() {
        let s = power_set(6);
        let c = s.shatter_sampled(3, 10, 7).unwrap();
        assert_eq!(c.exactness, Exactness::LowerBound);
        assert_eq!(c.value, 8);
        assert_eq!(c.samples, Some(10));
    }

    #[test]
    fn vc_of_empty_family_is_minus_one() {
        assert_eq!(SetSystem::empty_family(3).vc_dimension(b()).unwrap(), -1);
        // the family {∅} shatters only the empty set
        let s = SetSystem::from_bit_strs(3, &["000"]).unwrap();
        assert_eq!(s.vc_dimension(b()).unwrap(), 0);
    }

    #[test]
    fn vc_of_power_set_and_k_subsets() {
        assert_eq!(power_set(4).vc_dimension(b()).unwrap(), 4);
        assert_eq!(singletons(5).vc_dimension(b()).unwrap(), 1);
        // {0..n choose 2}: shatters a 2-set only if it also contains ∅ and
        // singletons as traces, which it does for n >= 4
        assert_eq!(all_k_subsets(4, 2).vc_dimension(b()).unwrap(), 2);
    }

    #[test]
    fn independence_examples() {
        assert_eq!(singletons(3).independence_dimension(b()).unwrap(), 1);
        let crossing = SetSystem::from_bit_strs(4, &["1100", "1010"]).unwrap();
        assert_eq!(crossing.independence_dimension(b()).unwrap(), 2);
        // <2> and <3> in Z6; atoms {0}, {2,4}, {3}, {1,5}
        let z6 = SetSystem::from_index_sets(6, [vec![0, 2, 4], vec![0, 3]]).unwrap();
        assert_eq!(z6.independence_dimension(b()).unwrap(), 2);
        assert_eq!(SetSystem::empty_family(4).independence_dimension(b()).unwrap(), 0);
    }

    #[test]
    fn breadth_examples() {
        assert_eq!(chain(5).breadth(b()).unwrap(), 1);
        let z6 = SetSystem::from_index_sets(6, [vec![0, 2, 4], vec![0, 3]]).unwrap();
        assert_eq!(z6.breadth(b()).unwrap(), 2);
        // convex subsets of an ordered 6-set
        let mut convex = Vec::new();
        for i in 0..6 {
            for j in i..6 {
                convex.push((i..=j).collect::<Vec<_>>());
            }
        }
        let c = SetSystem::from_index_sets(6, convex).unwrap();
        assert_eq!(c.breadth(b()).unwrap(), 2);
        // no nonempty intersections at all
        assert_eq!(singletons(4).breadth(b()).unwrap(), 1);
        assert_eq!(SetSystem::empty_family(2).breadth(b()).unwrap(), 1);
    }

    /// Brute-force breadth straight from the definition: smallest `d` such
    /// that every subfamily of more than `d` members with nonempty
    /// intersection has a `d`-subfamily with the same intersection.
    fn breadth_by_definition(s: &SetSystem) -> usize {
        let m = s.len();
        'd: for d in 1..=m.max(1) {
            for n in d + 1..=m {
                let mut bad = false;
                for_each_subset(m, n, |idx| {
                    if bad {
                        return;
                    }
                    let all = s.intersection_of(idx);
                    if all.is_empty() {
                        return;
                    }
                    let mut found = false;
                    for_each_subset(n, d, |sub| {
                        let chosen: Vec<usize> = sub.iter().map(|&i| idx[i]).collect();
                        if s.intersection_of(&chosen) == all {
                            found = true;
                        }
                    });
                    bad |= !found;
                });
                if bad {
                    continue 'd;
                }
            }
            return d;
        }
        unreachable!()
    }

    #[test]
    fn breadth_matches_definition_on_small_families() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..60 {
            let mut sets = Vec::new();
            for _ in 0..6 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                sets.push((0..5).filter(|i| state >> (i * 3) & 3 != 0).collect::<Vec<_>>());
            }
            let s = SetSystem::from_index_sets(5, sets).unwrap();
            assert_eq!(s.breadth(b()).unwrap(), breadth_by_definition(&s), "{s:?}");
        }
    }

    #[test]
    fn helly_examples() {
        assert_eq!(chain(4).helly_number(b()).unwrap(), 1);
        // pairwise intersecting, empty triple intersection
        let tri = SetSystem::from_index_sets(3, [vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(tri.helly_number(b()).unwrap(), 3);
        // two disjoint nonempty sets are 1-consistent but inconsistent
        assert_eq!(singletons(3).helly_number(b()).unwrap(), 2);
    }

    #[test]
    fn two_component_sets_have_large_helly_number() {
        // [0,i) ∪ (i+1,4] for i = 0..3, sampled at the half-integer grid
        // 0, 0.5, ..., 4 (grid index g stands for g/2)
        let sets: Vec<Vec<usize>> = (0..4)
            .map(|i| {
                (0..=8)
                    .filter(|&g| g < 2 * i || g > 2 * (i + 1))
                    .collect()
            })
            .collect();
        let s = SetSystem::from_index_sets(9, sets).unwrap();
        assert_eq!(s.len(), 4);
        // every 3 of them meet, all 4 do not
        for_each_subset(4, 3, |idx| assert!(!s.intersection_of(idx).is_empty()));
        assert!(s.intersection_of(&[0, 1, 2, 3]).is_empty());
        assert_eq!(s.helly_number(b()).unwrap(), 4);
    }

    #[test]
    fn helly_can_exceed_breadth_by_one() {
        let costar = TracePattern::costar(3).unwrap().as_system();
        assert_eq!(costar.breadth(b()).unwrap(), 2);
        assert_eq!(costar.helly_number(b()).unwrap(), 3);
    }

    #[test]
    fn trace_patterns() {
        let p = power_set(3);
        let w = p.contains_trace(TracePattern::chain(3).unwrap(), b()).unwrap().unwrap();
        assert!(w.verify(&p, TracePattern::chain(3).unwrap()));

        let s = singletons(4);
        assert!(s.contains_trace(TracePattern::star(4).unwrap(), b()).unwrap().is_some());
        assert!(s.contains_trace(TracePattern::costar(3).unwrap(), b()).unwrap().is_none());
    }

    #[test]
    fn chain_trace_needs_order() {
        // a chain in reverse element order is still a chain trace
        let s = SetSystem::from_index_sets(3, [vec![2], vec![1, 2], vec![0, 1, 2]]).unwrap();
        let pat = TracePattern::chain(3).unwrap();
        let w = s.contains_trace(pat, b()).unwrap().unwrap();
        assert_eq!(w.elements, vec![2, 1, 0]);
        assert!(w.verify(&s, pat));
    }

    #[test]
    fn trace_search_budget_is_inconclusive_not_absent() {
        let s = singletons(10);
        assert!(matches!(
            s.contains_trace(TracePattern::costar(3).unwrap(), Budget(5)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn pattern_size_is_validated() {
        assert!(TracePattern::chain(1).is_err());
    }

    #[test]
    fn breadth_duality_on_lattices() {
        let chain4 = chain(4);
        assert_eq!(chain4.check_breadth_duality(1).unwrap(), (true, true));

        // sublattice generated by two crossing sets
        let a = set(4, &[0, 1]);
        let c = set(4, &[1, 2]);
        let lattice = SetSystem::new(4, vec![a.and(&c), a.clone(), c.clone(), a.or(&c)]).unwrap();
        assert_eq!(lattice.check_breadth_duality(1).unwrap(), (false, false));
        assert_eq!(lattice.check_breadth_duality(2).unwrap(), (true, true));
    }

    #[test]
    fn breadth_duality_preconditions() {
        let with_empty = SetSystem::from_bit_strs(2, &["00", "10"]).unwrap();
        assert!(matches!(
            with_empty.check_breadth_duality(1),
            Err(Error::Precondition(_))
        ));
        let not_closed = SetSystem::from_bit_strs(3, &["110", "011"]).unwrap();
        let err = not_closed.check_breadth_duality(1).unwrap_err();
        assert!(err.to_string().contains("members 0 and 1"), "{err}");
    }

    #[test]
    fn dual_swaps_roles() {
        let s = SetSystem::from_index_sets(3, [vec![0, 1], vec![2]]).unwrap();
        let d = s.dual();
        assert_eq!(d.ground_size(), 2);
        // elements 0 and 1 share a signature, so the dual has two members
        assert_eq!(d.len(), 2);
        assert_eq!(d.members()[0].to_bit_string(), "01");
    }
}
