//! Constructions that trade formula-set size or parameter arity for
//! parameter count: coding `d` relations into one, adjoining a parameter
//! coordinate, and taking `d`-fold powers of the object domain.

use std::collections::HashMap;

use crate::bits::BitSet;
use crate::combinatorics::Budget;
use crate::error::{Error, Result};
use crate::relation::{BiRelation, FormulaSet};

/// One relation `ψ` encoding a formula set `Δ = {φ_1..φ_d}`.
///
/// A parameter of `ψ` is a tuple `(y_1..y_2d, z, z_1..z_2d)` of `Y`-indices.
/// `ψ(x; ȳ)` holds iff exactly one `z_k` equals `z`, and for that `k` either
/// `φ_k(x; y_k)` (when `k <= d`) or `¬φ_{k-d}(x; y_k)` (when `k > d`).
/// Parameter tuples are never enumerated; they are evaluated on demand.
#[derive(Debug, Clone)]
pub struct ShelahCode {
    delta: FormulaSet,
}

/// Parameter set built from `B`, with the index of each tuple's source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedParameters {
    pub tuples: Vec<Vec<usize>>,
    /// For `tuples[i]`: `(k, b, positive)` meaning it defines `φ_k(X; b)`
    /// when `positive`, else its complement. `k` is 0-based.
    pub sources: Vec<(usize, usize, bool)>,
}

pub fn shelah_encode(delta: &FormulaSet) -> ShelahCode {
    ShelahCode {
        delta: delta.clone(),
    }
}

impl ShelahCode {
    pub fn d(&self) -> usize {
        self.delta.len()
    }

    /// Width of a parameter tuple, `4d + 1`.
    pub fn arity(&self) -> usize {
        4 * self.d() + 1
    }

    pub fn x_size(&self) -> usize {
        self.delta.x_size()
    }

    pub fn eval(&self, x: usize, param: &[usize]) -> Result<bool> {
        let d = self.d();
        if param.len() != self.arity() {
            return Err(Error::Shape(format!(
                "parameter tuple has length {}, expected {}",
                param.len(),
                self.arity()
            )));
        }
        if let Some(&bad) = param.iter().find(|&&v| v >= self.delta.y_size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.delta.y_size(),
            });
        }
        if x >= self.x_size() {
            return Err(Error::IndexOutOfRange {
                index: x,
                bound: self.x_size(),
            });
        }
        let (ys, rest) = param.split_at(2 * d);
        let z = rest[0];
        let zs = &rest[1..];
        let mut hit = None;
        for (k, &zk) in zs.iter().enumerate() {
            if zk == z {
                if hit.is_some() {
                    return Ok(false);
                }
                hit = Some(k);
            }
        }
        let Some(k) = hit else {
            return Ok(false);
        };
        let rels = self.delta.relations();
        Ok(if k < d {
            rels[k].holds(x, ys[k])
        } else {
            !rels[k - d].holds(x, ys[k])
        })
    }

    /// `B'` from `B`: for every `b ∈ B` and every `k`, one tuple defining
    /// `¬φ_k(X; b)` and one defining `φ_k(X; b)`. `b0` and `b1` are the first
    /// two elements of `B`.
    pub fn build_parameters(&self, b: &[usize]) -> Result<CodedParameters> {
        if b.len() < 2 {
            return Err(Error::Precondition(format!(
                "the parameter set needs at least 2 elements, got {}",
                b.len()
            )));
        }
        if let Some(&bad) = b.iter().find(|&&v| v >= self.delta.y_size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.delta.y_size(),
            });
        }
        let (b0, b1) = (b[0], b[1]);
        if b0 == b1 {
            return Err(Error::Precondition("parameter set has repeated elements".into()));
        }
        let d = self.d();
        let mut tuples = Vec::with_capacity(2 * d * b.len());
        let mut sources = Vec::with_capacity(2 * d * b.len());
        for &bb in b {
            for k in 0..d {
                let mut neg = vec![b0; self.arity()];
                neg[d + k] = bb;
                neg[2 * d] = b1;
                neg[2 * d + 1 + d + k] = b1;
                tuples.push(neg);
                sources.push((k, bb, false));

                let mut pos = vec![b0; self.arity()];
                pos[k] = bb;
                pos[2 * d] = b1;
                pos[2 * d + 1 + k] = b1;
                tuples.push(pos);
                sources.push((k, bb, true));
            }
        }
        Ok(CodedParameters { tuples, sources })
    }

    /// `ψ` restricted to the given parameter tuples, as a dense relation on
    /// `X × params`.
    pub fn relation_over(&self, params: &[Vec<usize>]) -> Result<BiRelation> {
        let mut rows = Vec::with_capacity(self.x_size());
        for x in 0..self.x_size() {
            let mut row = BitSet::new(params.len());
            for (j, p) in params.iter().enumerate() {
                if self.eval(x, p)? {
                    row.insert(j);
                }
            }
            rows.push(row);
        }
        BiRelation::new(self.x_size(), params.len(), rows)
    }

    /// Checks the type correspondence for `B`: builds `B'`, maps every
    /// realized `Δ(x;B)`-type `p` to the `ψ(x;B')`-type `q` it determines,
    /// and confirms that `q` is the type its realizer actually has and that
    /// `p ↦ q` is injective. Returns `(|S^Δ(B)|, |S^ψ(B')|)`.
    pub fn verify_injection(&self, b: &[usize]) -> Result<(usize, usize)> {
        let coded = self.build_parameters(b)?;
        let psi = self.relation_over(&coded.tuples)?;
        let all: Vec<usize> = (0..coded.tuples.len()).collect();
        let psi_types = FormulaSet::singleton(psi.clone()).count_types(&all)? as usize;
        let types = self.delta.types(b)?;
        let position: HashMap<usize, usize> = b.iter().enumerate().map(|(j, &v)| (v, j)).collect();
        let mut images: HashMap<BitSet, usize> = HashMap::new();
        for (p, realizer) in &types {
            let mut q = BitSet::new(coded.tuples.len());
            for (i, &(k, bb, positive)) in coded.sources.iter().enumerate() {
                let in_p = p.contains(k * b.len() + position[&bb]);
                if in_p == positive {
                    q.insert(i);
                }
            }
            if q != psi.rows()[*realizer] {
                return Err(Error::Precondition(format!(
                    "coded type of element {realizer} disagrees with its realized type"
                )));
            }
            if let Some(prev) = images.insert(q, *realizer) {
                return Err(Error::Precondition(format!(
                    "elements {prev} and {realizer} have distinct types but equal images"
                )));
            }
        }
        Ok((types.len(), psi_types))
    }
}

/// `ψ((a,u); (b,c)) = (u = zero ∧ φ(a;b)) ∨ u = c`, with `u, c` ranging over
/// an extra coordinate of size `extra`.
///
/// Objects `(a,u)` are flattened to `a·extra + u`, parameters `(b,c)` to
/// `b·extra + c`.
#[derive(Debug, Clone)]
pub struct LiftedRelation {
    phi: BiRelation,
    extra: usize,
    zero: usize,
}

pub fn lift_parameter(phi: &BiRelation, extra: usize, zero: usize) -> Result<LiftedRelation> {
    if phi.x_size() == 0 {
        return Err(Error::Precondition("object domain is empty".into()));
    }
    if extra == 0 {
        return Err(Error::Precondition("extra coordinate domain is empty".into()));
    }
    if zero >= extra {
        return Err(Error::IndexOutOfRange {
            index: zero,
            bound: extra,
        });
    }
    Ok(LiftedRelation {
        phi: phi.clone(),
        extra,
        zero,
    })
}

impl LiftedRelation {
    pub fn x_size(&self) -> usize {
        self.phi.x_size() * self.extra
    }

    pub fn y_size(&self) -> usize {
        self.phi.y_size() * self.extra
    }

    pub fn object(&self, a: usize, u: usize) -> usize {
        a * self.extra + u
    }

    pub fn parameter(&self, b: usize, c: usize) -> usize {
        b * self.extra + c
    }

    pub fn eval(&self, x: usize, y: usize) -> bool {
        let (a, u) = (x / self.extra, x % self.extra);
        let (b, c) = (y / self.extra, y % self.extra);
        (u == self.zero && self.phi.holds(a, b)) || u == c
    }

    pub fn materialize(&self) -> BiRelation {
        BiRelation::from_fn(self.x_size(), self.y_size(), |x, y| self.eval(x, y))
    }

    /// The set `A' = A×{zero} ∪ {(a', a_1), .., (a', a_t)}` with `a_j` the first
    /// `t = |A|` values of the extra coordinate other than `zero`.
    pub fn witness(&self, a: &[usize], a_prime: usize) -> Result<Vec<usize>> {
        if let Some(&bad) = a.iter().chain([&a_prime]).find(|&&v| v >= self.phi.x_size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.phi.x_size(),
            });
        }
        if self.extra < a.len() + 1 {
            return Err(Error::Precondition(format!(
                "need {} values besides the zero, the extra domain has {}",
                a.len(),
                self.extra - 1
            )));
        }
        let mut out: Vec<usize> = a.iter().map(|&v| self.object(v, self.zero)).collect();
        out.extend(
            (0..self.extra)
                .filter(|&u| u != self.zero)
                .take(a.len())
                .map(|u| self.object(a_prime, u)),
        );
        Ok(out)
    }
}

/// `Δ' = {φ(x_i; y) : φ ∈ Δ, i = 1..d}` on objects `X^d`.
///
/// Relation order is `φ`-major. A tuple `(x_1..x_d)` is indexed in base `|X|`
/// with `x_1` most significant.
pub fn power_delta(delta: &FormulaSet, d: usize, budget: Budget) -> Result<FormulaSet> {
    if d == 0 {
        return Err(Error::Range {
            value: 0,
            range: "1..".into(),
        });
    }
    let n = delta.x_size();
    let size = (n as u128).checked_pow(d as u32).filter(|&s| s <= budget.0 as u128);
    let Some(size) = size else {
        return Err(budget.exceeded(None));
    };
    let size = size as usize;
    let mut rels = Vec::with_capacity(delta.len() * d);
    for phi in delta.relations() {
        for i in 0..d {
            let stride = n.pow((d - 1 - i) as u32);
            rels.push(BiRelation::from_fn(size, delta.y_size(), |x, y| {
                phi.holds(x / stride % n, y)
            }));
        }
    }
    FormulaSet::new(rels)
}

/// Index in `X^d` of the tuple `coords` (base `n`, first coordinate most significant).
pub fn power_index(coords: &[usize], n: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * n + c)
}
