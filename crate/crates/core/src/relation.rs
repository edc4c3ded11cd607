//! Binary relations `Φ ⊆ X × Y`, their duals, and finite formula sets.
//!
//! Row `a` of a [`BiRelation`] is the fiber `Φ*_a ⊆ Y`; column `b` is
//! `Φ_b ⊆ X`. The primal set system `S_Φ` collects the columns as subsets
//! of `X`; its shatter function is `π_Φ`. The dual shatter function `π*_Φ`
//! counts distinct row signatures over a set of columns, which is the
//! number of nonempty atoms cut out by the chosen `Φ_b`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::combinatorics::{binomial, max_over_subsets, Budget, Counted};
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BiRelationJson", into = "BiRelationJson")]
pub struct BiRelation {
    x_size: usize,
    y_size: usize,
    rows: Vec<BitSet>,
}

/// Wire form: `{"x_size": a, "y_size": b, "rows": ["0101", ...]}`; row index
/// is `x`, character index is `y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiRelationJson {
    pub x_size: usize,
    pub y_size: usize,
    pub rows: Vec<String>,
}

impl TryFrom<BiRelationJson> for BiRelation {
    type Error = Error;

    fn try_from(j: BiRelationJson) -> Result<Self> {
        let rows = j
            .rows
            .iter()
            .map(|s| BitSet::from_bit_str(s))
            .collect::<Result<Vec<_>>>()?;
        BiRelation::new(j.x_size, j.y_size, rows)
    }
}

impl From<BiRelation> for BiRelationJson {
    fn from(r: BiRelation) -> Self {
        BiRelationJson {
            x_size: r.x_size,
            y_size: r.y_size,
            rows: r.rows.iter().map(BitSet::to_bit_string).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    Not,
    And,
    Or,
}

impl BiRelation {
    pub fn new(x_size: usize, y_size: usize, rows: Vec<BitSet>) -> Result<Self> {
        if rows.len() != x_size {
            return Err(Error::Shape(format!(
                "expected {x_size} rows, got {}",
                rows.len()
            )));
        }
        if let Some((a, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != y_size) {
            return Err(Error::Shape(format!(
                "row {a} has width {} but y_size is {y_size}",
                r.len()
            )));
        }
        Ok(BiRelation {
            x_size,
            y_size,
            rows,
        })
    }

    pub fn empty(x_size: usize, y_size: usize) -> Self {
        BiRelation {
            x_size,
            y_size,
            rows: vec![BitSet::new(y_size); x_size],
        }
    }

    pub fn full(x_size: usize, y_size: usize) -> Self {
        BiRelation {
            x_size,
            y_size,
            rows: vec![BitSet::full(y_size); x_size],
        }
    }

    pub fn from_fn(x_size: usize, y_size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let rows = (0..x_size)
            .map(|a| {
                let mut row = BitSet::new(y_size);
                for b in 0..y_size {
                    if f(a, b) {
                        row.insert(b);
                    }
                }
                row
            })
            .collect();
        BiRelation {
            x_size,
            y_size,
            rows,
        }
    }

    pub fn from_bit_strs(x_size: usize, y_size: usize, rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| BitSet::from_bit_str(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(x_size, y_size, rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |a, b| a == b)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("relation serializes")
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    #[inline]
    pub fn holds(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    pub fn is_square(&self) -> bool {
        self.x_size == self.y_size
    }

    /// Column `b` as a subset of `X`.
    pub fn column(&self, b: usize) -> BitSet {
        let mut col = BitSet::new(self.x_size);
        for (a, row) in self.rows.iter().enumerate() {
            if row.contains(b) {
                col.insert(a);
            }
        }
        col
    }

    /// The dual relation `Φ* ⊆ Y × X`.
    pub fn dualize(&self) -> BiRelation {
        let rows = (0..self.y_size).map(|b| self.column(b)).collect();
        BiRelation {
            x_size: self.y_size,
            y_size: self.x_size,
            rows,
        }
    }

    /// `S_Φ = {Φ_b : b ∈ Y}` on the base set `X`.
    pub fn system_of(&self) -> SetSystem {
        let cols = (0..self.y_size).map(|b| self.column(b)).collect();
        SetSystem::new(self.x_size, cols).expect("columns have width x_size")
    }

    /// `π_Φ(t)`, the shatter function of `S_Φ`.
    pub fn shatter(&self, t: usize, budget: Budget) -> Result<Counted> {
        self.system_of().shatter_function(t, budget)
    }

    /// Number of distinct row signatures over the columns `params`, which
    /// is the number of nonempty atoms of `{Φ_b : b ∈ params}`.
    pub fn count_types(&self, params: &[usize]) -> Result<u128> {
        FormulaSet::singleton(self.clone()).count_types(params)
    }

    /// `π*_Φ(t)`: the maximum of [`Self::count_types`] over `t`-sets of parameters.
    pub fn dual_shatter(&self, t: usize, budget: Budget) -> Result<Counted> {
        FormulaSet::singleton(self.clone()).dual_shatter(t, budget)
    }

    /// Pointwise Boolean combination. `other` is ignored for [`BoolOp::Not`].
    pub fn combine(&self, other: Option<&BiRelation>, op: BoolOp) -> Result<BiRelation> {
        if op == BoolOp::Not {
            return Ok(BiRelation {
                x_size: self.x_size,
                y_size: self.y_size,
                rows: self.rows.iter().map(BitSet::complement).collect(),
            });
        }
        let other = other.ok_or_else(|| Error::Shape("binary operation needs two relations".into()))?;
        if (self.x_size, self.y_size) != (other.x_size, other.y_size) {
            return Err(Error::Shape(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.x_size, self.y_size, other.x_size, other.y_size
            )));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| if op == BoolOp::And { a.and(b) } else { a.or(b) })
            .collect();
        Ok(BiRelation {
            x_size: self.x_size,
            y_size: self.y_size,
            rows,
        })
    }

    pub fn negate(&self) -> BiRelation {
        self.combine(None, BoolOp::Not).expect("negation is unary")
    }

    pub fn and(&self, other: &BiRelation) -> Result<BiRelation> {
        self.combine(Some(other), BoolOp::And)
    }

    pub fn or(&self, other: &BiRelation) -> Result<BiRelation> {
        self.combine(Some(other), BoolOp::Or)
    }

    /// Ladder dimension: the largest `n` with `a_1..a_n`, `b_1..b_n` such
    /// that `(a_i, b_j) ∈ Φ` iff `i <= j`.
    pub fn ladder_dimension(&self, budget: Budget) -> Result<usize> {
        Ok(self.ladder_witness(budget)?.0.len())
    }

    /// A longest ladder as `(a_1..a_n, b_1..b_n)`.
    ///
    /// Extending a ladder by a new last rung `(a, b)` needs `b` in every
    /// earlier row, `a` outside every earlier column, and `(a, b) ∈ Φ`; these
    /// constraints depend only on the sets of rungs used so far, so partial
    /// ladders are memoized by those two sets.
    pub fn ladder_witness(&self, budget: Budget) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut search = LadderSearch {
            rel: self,
            budget,
            nodes: 0,
            seen: HashSet::new(),
            a: Vec::new(),
            b: Vec::new(),
            best: (Vec::new(), Vec::new()),
        };
        let allowed_b = BitSet::full(self.y_size);
        let allowed_a = BitSet::full(self.x_size);
        search.run(&allowed_a, &allowed_b)?;
        Ok(search.best)
    }

    /// Finds pairwise-distinct `a_1..a_r` and `b_1..b_s` with every
    /// `(a_i, b_j) ∈ Φ`, or certifies that none exist.
    pub fn detect_krs(&self, r: usize, s: usize, budget: Budget) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        if r > s {
            return Err(Error::Precondition(format!("need r <= s, got r={r}, s={s}")));
        }
        if r == 0 {
            return Ok((s <= self.y_size).then(|| (Vec::new(), (0..s).collect())));
        }
        let mut nodes = 0u64;
        let mut chosen = Vec::with_capacity(r);
        let common = BitSet::full(self.y_size);
        let found = self.krs_extend(r, s, 0, &common, &mut chosen, &mut nodes, budget)?;
        Ok(found.map(|cols| (chosen, cols)))
    }

    #[allow(clippy::too_many_arguments)]
    fn krs_extend(
        &self,
        r: usize,
        s: usize,
        start: usize,
        common: &BitSet,
        chosen: &mut Vec<usize>,
        nodes: &mut u64,
        budget: Budget,
    ) -> Result<Option<Vec<usize>>> {
        if chosen.len() == r {
            return Ok(Some(common.iter().take(s).collect()));
        }
        let needed = r - chosen.len();
        for a in start..self.x_size {
            if self.x_size - a < needed {
                break;
            }
            *nodes += 1;
            if *nodes > budget.0 {
                return Err(budget.exceeded(None));
            }
            let next = common.and(&self.rows[a]);
            if next.count() < s {
                continue;
            }
            chosen.push(a);
            if let Some(cols) = self.krs_extend(r, s, a + 1, &next, chosen, nodes, budget)? {
                return Ok(Some(cols));
            }
            chosen.pop();
        }
        Ok(None)
    }
}

struct LadderSearch<'a> {
    rel: &'a BiRelation,
    budget: Budget,
    nodes: u64,
    seen: HashSet<(BitSet, BitSet)>,
    a: Vec<usize>,
    b: Vec<usize>,
    best: (Vec<usize>, Vec<usize>),
}

impl LadderSearch<'_> {
    /// `allowed_a`: rows avoiding every used column; `allowed_b`: columns in every used row.
    fn run(&mut self, allowed_a: &BitSet, allowed_b: &BitSet) -> Result<()> {
        if self.a.len() > self.best.0.len() {
            self.best = (self.a.clone(), self.b.clone());
        }
        let bound = self.a.len() + allowed_a.count().min(allowed_b.count());
        if bound <= self.best.0.len() {
            return Ok(());
        }
        for na in allowed_a.iter() {
            let candidates_b = allowed_b.and(&self.rel.rows[na]);
            for nb in candidates_b.iter() {
                self.nodes += 1;
                if self.nodes > self.budget.0 {
                    return Err(self.budget.exceeded(Some(self.best.0.len() as i64)));
                }
                let mut used_a = BitSet::new(self.rel.x_size);
                let mut used_b = BitSet::new(self.rel.y_size);
                for &x in self.a.iter().chain([&na]) {
                    used_a.insert(x);
                }
                for &y in self.b.iter().chain([&nb]) {
                    used_b.insert(y);
                }
                if !self.seen.insert((used_a, used_b)) {
                    continue;
                }
                let next_b = allowed_b.and(&self.rel.rows[na]);
                let mut next_a = allowed_a.clone();
                next_a.intersect_with(&self.rel.column(nb).complement());
                let mut next_b = next_b;
                next_b.remove(nb);
                self.a.push(na);
                self.b.push(nb);
                self.run(&next_a, &next_b)?;
                self.a.pop();
                self.b.pop();
            }
        }
        Ok(())
    }
}

/// An ordered, nonempty list of relations sharing `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FormulaSetJson", into = "FormulaSetJson")]
pub struct FormulaSet {
    relations: Vec<BiRelation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormulaSetJson {
    pub relations: Vec<BiRelation>,
}

impl TryFrom<FormulaSetJson> for FormulaSet {
    type Error = Error;

    fn try_from(j: FormulaSetJson) -> Result<Self> {
        FormulaSet::new(j.relations)
    }
}

impl From<FormulaSet> for FormulaSetJson {
    fn from(f: FormulaSet) -> Self {
        FormulaSetJson {
            relations: f.relations,
        }
    }
}

impl FormulaSet {
    pub fn new(relations: Vec<BiRelation>) -> Result<Self> {
        let first = relations
            .first()
            .ok_or_else(|| Error::Shape("a formula set needs at least one relation".into()))?;
        let dims = (first.x_size, first.y_size);
        if let Some((i, r)) = relations
            .iter()
            .enumerate()
            .find(|(_, r)| (r.x_size, r.y_size) != dims)
        {
            return Err(Error::Shape(format!(
                "relation {i} is {}x{}, expected {}x{}",
                r.x_size, r.y_size, dims.0, dims.1
            )));
        }
        Ok(FormulaSet { relations })
    }

    pub fn singleton(rel: BiRelation) -> Self {
        FormulaSet {
            relations: vec![rel],
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("formula set serializes")
    }

    pub fn relations(&self) -> &[BiRelation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_size(&self) -> usize {
        self.relations[0].x_size
    }

    pub fn y_size(&self) -> usize {
        self.relations[0].y_size
    }

    fn check_params(&self, params: &[usize]) -> Result<()> {
        match params.iter().find(|&&b| b >= self.y_size()) {
            Some(&b) => Err(Error::IndexOutOfRange {
                index: b,
                bound: self.y_size(),
            }),
            None => Ok(()),
        }
    }

    /// Truth vector of `x` over `(φ, b)` pairs in `(formula, parameter)` order.
    pub fn signature(&self, x: usize, params: &[usize]) -> BitSet {
        let mut sig = BitSet::new(self.relations.len() * params.len());
        for (k, rel) in self.relations.iter().enumerate() {
            for (j, &b) in params.iter().enumerate() {
                if rel.holds(x, b) {
                    sig.insert(k * params.len() + j);
                }
            }
        }
        sig
    }

    /// The realized complete types over `params`, each with one realizing
    /// element, in first-realization order.
    pub fn types(&self, params: &[usize]) -> Result<Vec<(BitSet, usize)>> {
        self.check_params(params)?;
        let mut seen: HashMap<BitSet, usize> = HashMap::new();
        let mut out = Vec::new();
        for x in 0..self.x_size() {
            let sig = self.signature(x, params);
            if !seen.contains_key(&sig) {
                seen.insert(sig.clone(), x);
                out.push((sig, x));
            }
        }
        Ok(out)
    }

    /// `|S^Δ(B)|`: the number of distinct signatures realized over `B`.
    pub fn count_types(&self, params: &[usize]) -> Result<u128> {
        self.check_params(params)?;
        let sigs: HashSet<BitSet> = (0..self.x_size()).map(|x| self.signature(x, params)).collect();
        Ok(sigs.len() as u128)
    }

    /// `π*_Δ(t)`: the maximum of `|S^Δ(B)|` over all `t`-subsets `B` of parameters.
    pub fn dual_shatter(&self, t: usize, budget: Budget) -> Result<Counted> {
        if t > self.y_size() {
            return Err(Error::Range {
                value: t as i64,
                range: format!("0..={}", self.y_size()),
            });
        }
        let work = binomial(self.y_size() as u64, t as u64)?;
        if work > budget.0 as u128 {
            return Err(budget.exceeded(None));
        }
        let (v, _) = max_over_subsets(self.y_size(), t, |b| {
            self.count_types(b).expect("indices in range")
        })
        .expect("t <= y_size");
        Ok(Counted::exact(v))
    }
}

/// `f⁻¹(S)` for every member `S`: the system on `X' = 0..f.len()` whose
/// members are preimages under the index map `f: X' -> X`.
pub fn pullback(system: &SetSystem, f: &[usize]) -> Result<SetSystem> {
    if let Some(&bad) = f.iter().find(|&&x| x >= system.ground_size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: system.ground_size(),
        });
    }
    let members = system
        .members()
        .iter()
        .map(|s| {
            let mut pre = BitSet::new(f.len());
            for (i, &x) in f.iter().enumerate() {
                if s.contains(x) {
                    pre.insert(i);
                }
            }
            pre
        })
        .collect();
    SetSystem::new(f.len(), members)
}
