//! Leaves of a `p`-ary tree of depth `D` as a finite ultrametric space.
//!
//! An element is a digit string of length `D`; the valuation of two elements
//! is the length of their common prefix. The closed ball of radius `ρ`
//! around `a` is the set of elements sharing the first `ρ` digits of `a`, so
//! balls correspond to prefixes and any two are nested or disjoint.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

/// Largest leaf count materialized for an `"all"` space.
pub const LEAF_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricSpace {
    p: u32,
    depth: u32,
    /// Sorted, distinct leaf codes (base `p`, first digit most significant).
    elements: Vec<u64>,
    full: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ball {
    /// Lexicographically least member.
    pub center: u64,
    pub radius: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub p: u32,
    pub depth: u32,
    pub elements: ElementsJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementsJson {
    All(AllTag),
    List(Vec<String>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllTag {
    All,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallJson {
    pub center: String,
    pub radius: u32,
}

/// Result of counting balls near a given ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCount {
    pub count: u128,
    /// Some ball within distance `d` in the infinite tree has a radius
    /// outside `0..=D`, so `count` is the truncated value.
    pub boundary: bool,
}

impl UltrametricSpace {
    /// All `p^depth` leaves.
    pub fn full(p: u32, depth: u32) -> Result<Self> {
        check_shape(p, depth)?;
        let n = (p as u64)
            .checked_pow(depth)
            .filter(|&n| n <= LEAF_CAP)
            .ok_or_else(|| Error::Precondition(format!("{p}^{depth} leaves exceed the cap {LEAF_CAP}")))?;
        Ok(UltrametricSpace {
            p,
            depth,
            elements: (0..n).collect(),
            full: true,
        })
    }

    pub fn with_elements(p: u32, depth: u32, elements: &[u64]) -> Result<Self> {
        check_shape(p, depth)?;
        let bound = (p as u64).checked_pow(depth).unwrap_or(u64::MAX);
        if let Some(&bad) = elements.iter().find(|&&e| e >= bound) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                bound: bound as usize,
            });
        }
        let set: BTreeSet<u64> = elements.iter().copied().collect();
        let full = set.len() as u64 == bound;
        Ok(UltrametricSpace {
            p,
            depth,
            elements: set.into_iter().collect(),
            full,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SpaceJson = serde_json::from_str(s)?;
        match j.elements {
            ElementsJson::All(_) => Self::full(j.p, j.depth),
            ElementsJson::List(list) => {
                check_shape(j.p, j.depth)?;
                let codes = list
                    .iter()
                    .map(|s| parse_digits(j.p, j.depth, s))
                    .collect::<Result<Vec<_>>>()?;
                Self::with_elements(j.p, j.depth, &codes)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let elements = if self.full {
            ElementsJson::All(AllTag::All)
        } else {
            ElementsJson::List(self.elements.iter().map(|&e| self.digits(e)).collect())
        };
        serde_json::to_string(&SpaceJson {
            p: self.p,
            depth: self.depth,
            elements,
        })
        .expect("space serializes")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn digits(&self, code: u64) -> String {
        let mut out = vec![b'0'; self.depth as usize];
        let mut c = code;
        for slot in out.iter_mut().rev() {
            *slot = b'0' + (c % self.p as u64) as u8;
            c /= self.p as u64;
        }
        String::from_utf8(out).expect("ascii digits")
    }

    pub fn parse(&self, digits: &str) -> Result<u64> {
        parse_digits(self.p, self.depth, digits)
    }

    fn prefix(&self, code: u64, radius: u32) -> u64 {
        code / (self.p as u64).pow(self.depth - radius)
    }

    /// Length of the common prefix; `depth` for equal elements.
    pub fn valuation(&self, a: u64, b: u64) -> u32 {
        (0..=self.depth)
            .rev()
            .find(|&r| self.prefix(a, r) == self.prefix(b, r))
            .expect("radius 0 always agrees")
    }

    /// The ball of radius `radius` around `center`, in canonical form.
    pub fn ball(&self, center: u64, radius: u32) -> Result<Ball> {
        if radius > self.depth {
            return Err(Error::Range {
                value: radius as i64,
                range: format!("0..={}", self.depth),
            });
        }
        if self.elements.binary_search(&center).is_err() {
            return Err(Error::Precondition(format!(
                "{} is not an element of the space",
                self.digits(center)
            )));
        }
        let pre = self.prefix(center, radius);
        let least = *self
            .elements
            .iter()
            .find(|&&e| self.prefix(e, radius) == pre)
            .expect("center is a member");
        Ok(Ball {
            center: least,
            radius,
        })
    }

    pub fn ball_from_json(&self, s: &str) -> Result<Ball> {
        let j: BallJson = serde_json::from_str(s)?;
        self.ball(self.parse(&j.center)?, j.radius)
    }

    pub fn ball_to_json(&self, ball: &Ball) -> String {
        serde_json::to_string(&BallJson {
            center: self.digits(ball.center),
            radius: ball.radius,
        })
        .expect("ball serializes")
    }

    pub fn ball_members(&self, ball: &Ball) -> Vec<u64> {
        let pre = self.prefix(ball.center, ball.radius);
        self.elements
            .iter()
            .copied()
            .filter(|&e| self.prefix(e, ball.radius) == pre)
            .collect()
    }

    /// Every ball of the space, ordered by radius then center.
    pub fn all_balls(&self) -> Vec<Ball> {
        let mut out = Vec::new();
        for r in 0..=self.depth {
            let mut last = None;
            for &e in &self.elements {
                let pre = self.prefix(e, r);
                if last != Some(pre) {
                    out.push(Ball { center: e, radius: r });
                    last = Some(pre);
                }
            }
        }
        out
    }

    /// Distance in the tree whose edges join each ball to its immediate
    /// predecessor: both balls climb to the level where they meet.
    pub fn ball_distance(&self, a: &Ball, b: &Ball) -> u32 {
        let meet = a.radius.min(b.radius).min(self.valuation(a.center, b.center));
        (a.radius - meet) + (b.radius - meet)
    }

    /// Number of balls of this space at distance at most `d` from `ball`.
    pub fn count_balls_within(&self, ball: &Ball, d: u32) -> BallCount {
        let count = self
            .all_balls()
            .iter()
            .filter(|b| self.ball_distance(ball, b) <= d)
            .count() as u128;
        let boundary = !self.full || d > ball.radius || ball.radius + d > self.depth;
        BallCount { count, boundary }
    }

    /// Distinct balls `B_{v(a,b)}(a)` over ordered pairs `a ≠ b` of `subset`.
    pub fn special_balls(&self, subset: &[u64]) -> Result<Vec<Ball>> {
        let set: BTreeSet<u64> = subset.iter().copied().collect();
        let mut out = BTreeSet::new();
        for &a in &set {
            for &b in &set {
                if a != b {
                    out.insert(self.ball(a, self.valuation(a, b))?);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn special_ball_count(&self, subset: &[u64]) -> Result<usize> {
        Ok(self.special_balls(subset)?.len())
    }

    /// The balls as a set system on the elements of the space.
    pub fn ball_family_system(&self, balls: &[Ball]) -> Result<SetSystem> {
        let n = self.elements.len();
        let members = balls
            .iter()
            .map(|b| {
                let idx = self
                    .ball_members(b)
                    .into_iter()
                    .map(|e| self.elements.binary_search(&e).expect("member of space"));
                BitSet::from_indices(n, idx)
            })
            .collect::<Result<Vec<_>>>()?;
        SetSystem::new(n, members)
    }
}

fn check_shape(p: u32, depth: u32) -> Result<()> {
    if !(2..=10).contains(&p) {
        return Err(Error::Range {
            value: p as i64,
            range: "2..=10".into(),
        });
    }
    if depth == 0 {
        return Err(Error::Range {
            value: 0,
            range: "1..".into(),
        });
    }
    Ok(())
}

fn parse_digits(p: u32, depth: u32, s: &str) -> Result<u64> {
    if s.len() != depth as usize {
        return Err(Error::Parse(format!("{s:?} does not have {depth} digits")));
    }
    s.chars().try_fold(0u64, |acc, c| match c.to_digit(10) {
        Some(v) if v < p => Ok(acc * p as u64 + v as u64),
        _ => Err(Error::Parse(format!("invalid base-{p} digit {c:?} in {s:?}"))),
    })
}

/// `((p+1)^(d+1) - 1) / p`, the sum `1 + (p+1) + .. + (p+1)^d`.
pub fn beta_closed_form(p: u64, d: u32) -> Result<u128> {
    let big = (p as u128 + 1)
        .checked_pow(d + 1)
        .ok_or_else(|| Error::Overflow(format!("({}+1)^{} exceeds 128 bits", p, d + 1)))?;
    Ok((big - 1) / p as u128)
}

/// Balls within distance `d` of a ball in the infinite tree of valency
/// `p + 1`: one at distance 0 and `(p+1)·p^(i-1)` at each distance `i >= 1`.
pub fn balls_within_in_tree(p: u64, d: u32) -> u128 {
    1 + (1..=d).map(|i| (p as u128 + 1) * (p as u128).pow(i - 1)).sum::<u128>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{for_each_subset, Budget};

    fn sp(p: u32, d: u32) -> UltrametricSpace {
        UltrametricSpace::full(p, d).unwrap()
    }

    #[test]
    fn ball_members_examples() {
        let s = sp(2, 3);
        let b = s.ball(s.parse("000").unwrap(), 1).unwrap();
        let got: Vec<String> = s.ball_members(&b).iter().map(|&e| s.digits(e)).collect();
        assert_eq!(got, ["000", "001", "010", "011"]);
        assert_eq!(s.ball_members(&s.ball(5, 3).unwrap()), vec![5]);
        assert_eq!(s.ball_members(&s.ball(5, 0).unwrap()).len(), 8);
        assert!(s.ball(5, 4).is_err());
    }

    #[test]
    fn ultrametric_law_and_canonical_balls() {
        for (p, d) in [(2, 4), (3, 3)] {
            let s = sp(p, d);
            let e = s.elements().to_vec();
            for &a in &e {
                assert_eq!(s.valuation(a, a), d);
                for &b in &e {
                    assert_eq!(s.valuation(a, b), s.valuation(b, a));
                    for &c in &e {
                        assert!(s.valuation(a, c) >= s.valuation(a, b).min(s.valuation(b, c)));
                    }
                    for r in 0..=d {
                        let same = s.ball(a, r).unwrap() == s.ball(b, r).unwrap();
                        assert_eq!(same, s.valuation(a, b) >= r);
                    }
                }
            }
        }
    }

    #[test]
    fn distances() {
        let s = sp(2, 4);
        let b = s.ball(0, 2).unwrap();
        assert_eq!(s.ball_distance(&b, &b), 0);
        assert_eq!(s.ball_distance(&b, &s.ball(0, 1).unwrap()), 1);
        let left = s.ball(s.parse("0000").unwrap(), 3).unwrap();
        let right = s.ball(s.parse("0010").unwrap(), 3).unwrap();
        assert_eq!(s.ball_distance(&left, &right), 2);
    }

    /// Breadth-first search in the tree of balls, built from explicit
    /// parent and child links.
    fn bfs_count(s: &UltrametricSpace, start: &Ball, d: u32) -> usize {
        let balls = s.all_balls();
        let parent = |b: &Ball| (b.radius > 0).then(|| s.ball(b.center, b.radius - 1).unwrap());
        let mut seen = BTreeSet::from([*start]);
        let mut frontier = vec![*start];
        for _ in 0..d {
            let mut next = Vec::new();
            for b in &frontier {
                let mut nbrs: Vec<Ball> = balls.iter().filter(|c| parent(c) == Some(*b)).copied().collect();
                nbrs.extend(parent(b));
                for n in nbrs {
                    if seen.insert(n) {
                        next.push(n);
                    }
                }
            }
            frontier = next;
        }
        seen.len()
    }

    #[test]
    fn counts_match_tree_search() {
        let s = sp(2, 6);
        let b = s.ball(0, 3).unwrap();
        for d in 0..=3 {
            let got = s.count_balls_within(&b, d);
            assert_eq!(got.count as usize, bfs_count(&s, &b, d));
            assert!(!got.boundary);
            assert_eq!(got.count, balls_within_in_tree(2, d));
        }
        assert!(s.count_balls_within(&b, 4).boundary);
    }

    #[test]
    fn tree_counts_against_closed_form() {
        assert_eq!(beta_closed_form(2, 2).unwrap(), 13);
        assert_eq!(beta_closed_form(3, 1).unwrap(), 5);
        assert_eq!(beta_closed_form(5, 0).unwrap(), 1);
        for p in 2..=5u64 {
            assert_eq!(balls_within_in_tree(p, 0), 1);
            assert_eq!(balls_within_in_tree(p, 1), beta_closed_form(p, 1).unwrap());
            for d in 2..=4 {
                assert!(balls_within_in_tree(p, d) < beta_closed_form(p, d).unwrap());
            }
        }
        assert_eq!(balls_within_in_tree(2, 2), 10);
    }

    #[test]
    fn special_balls_examples() {
        let s = sp(2, 3);
        assert_eq!(s.special_ball_count(&[3]).unwrap(), 0);
        let a: Vec<u64> = ["000", "001", "010", "100"].iter().map(|d| s.parse(d).unwrap()).collect();
        assert_eq!(s.special_ball_count(&a).unwrap(), 3);
    }

    #[test]
    fn special_balls_bound_exhaustive() {
        let s = sp(2, 4);
        for k in 1..=8 {
            for_each_subset(16, k, |c| {
                let a: Vec<u64> = c.iter().map(|&i| i as u64).collect();
                assert!(s.special_ball_count(&a).unwrap() < k, "{a:?}");
            });
        }
    }

    #[test]
    fn ball_families_are_directed() {
        let s = sp(2, 3);
        let all = s.all_balls();
        let sys = s.ball_family_system(&all).unwrap();
        assert_eq!(sys.breadth(Budget::default()).unwrap(), 1);
        assert!(sys.independence_dimension(Budget::default()).unwrap() <= 1);
        for x in sys.members() {
            for y in sys.members() {
                assert!(!x.intersects(y) || x.is_subset(y) || y.is_subset(x));
            }
        }
    }

    #[test]
    fn unions_of_balls_have_linear_dual_shatter() {
        use crate::relation::BiRelation;
        let s = sp(2, 3);
        let balls = s.all_balls();
        let sys = s.ball_family_system(&balls).unwrap();
        let m = sys.members();
        let singles = BiRelation::from_fn(8, m.len(), |x, y| m[y].contains(x));
        let pairs: Vec<(usize, usize)> = (0..m.len()).flat_map(|i| (i..m.len()).map(move |j| (i, j))).collect();
        let unions = BiRelation::from_fn(8, pairs.len(), |x, y| m[pairs[y].0].contains(x) || m[pairs[y].1].contains(x));
        for t in 1..=3 {
            assert!(singles.dual_shatter(t, Budget::default()).unwrap().value <= 1 + t as u128);
            assert!(unions.dual_shatter(t, Budget::default()).unwrap().value <= 1 + 2 * t as u128);
        }
    }

    #[test]
    fn json_round_trips() {
        let s = sp(3, 2);
        assert_eq!(s.to_json(), r#"{"p":3,"depth":2,"elements":"all"}"#);
        assert_eq!(UltrametricSpace::from_json(&s.to_json()).unwrap(), s);
        let sub = UltrametricSpace::from_json(r#"{"p":2,"depth":3,"elements":["101","000"]}"#).unwrap();
        assert_eq!(sub.elements(), &[0, 5]);
        assert_eq!(UltrametricSpace::from_json(&sub.to_json()).unwrap(), sub);
        let b = s.ball_from_json(r#"{"center":"21","radius":1}"#).unwrap();
        assert_eq!(s.ball_to_json(&b), r#"{"center":"20","radius":1}"#);
        assert!(UltrametricSpace::from_json(r#"{"p":2,"depth":3,"elements":["102"]}"#).is_err());
    }
}
