//! Finite realizations of the standard example families.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::combinatorics::{binomial_prefix_sum, for_each_subset, max_over_subsets, Budget};
use crate::error::{Error, Result};
use crate::relation::BiRelation;
use crate::setsystem::SetSystem;

/// Largest member list a generator will materialize.
pub const MEMBER_CAP: u128 = 1 << 22;

/// Largest prime accepted by [`pointline_fq`].
pub const FIELD_CAP: u64 = 251;

/// Largest cube dimension accepted by [`hypercube_edges`].
pub const HYPERCUBE_CAP: usize = 10;

/// Largest grid parameter accepted by [`elekes_grid`].
pub const ELEKES_CAP: u64 = 8;

fn check_member_count(count: u128) -> Result<()> {
    if count > MEMBER_CAP {
        return Err(Error::Precondition(format!(
            "family would have {count} members, cap is {MEMBER_CAP}"
        )));
    }
    Ok(())
}

/// All subsets of `0..n` of size at most `d`.
pub fn subsets_at_most_d(n: usize, d: usize) -> Result<SetSystem> {
    if d > n {
        return Err(Error::Range {
            value: d as i64,
            range: format!("0..={n}"),
        });
    }
    check_member_count(binomial_prefix_sum(n as u64, d as u64)?)?;
    let mut members = Vec::new();
    for k in 0..=d {
        for_each_subset(n, k, |c| {
            members.push(BitSet::from_indices(n, c.iter().copied()).expect("indices < n"));
        });
    }
    SetSystem::new(n, members)
}

/// Unions of at most `k` runs of consecutive points among `n` ordered points.
///
/// A union of `r` runs is fixed by its `2r` boundaries among the `n + 1` gaps,
/// so there are `C(n+1, 0) + C(n+1, 2) + .. + C(n+1, 2k) = C(n, <= 2k)` members.
pub fn intervals(n: usize, k: usize) -> Result<SetSystem> {
    if n == 0 || k == 0 {
        return Err(Error::Range {
            value: n.min(k) as i64,
            range: "1..".into(),
        });
    }
    check_member_count(binomial_prefix_sum(n as u64, 2 * k as u64)?)?;
    let mut members = Vec::new();
    for r in 0..=k.min(n.div_ceil(2)) {
        for_each_subset(n + 1, 2 * r, |cuts| {
            let mut s = BitSet::new(n);
            for run in cuts.chunks(2) {
                for i in run[0]..run[1] {
                    s.insert(i);
                }
            }
            members.push(s);
        });
    }
    SetSystem::new(n, members)
}

/// Convex subsets of an ordered `n`-set: the empty set and all intervals.
pub fn convex(n: usize) -> Result<SetSystem> {
    intervals(n, 1)
}

pub type Point = (BigRational, BigRational);

pub fn point(x: i64, y: i64) -> Point {
    (BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
}

/// `(i, i²)` for `i` in `0..n`; no three are collinear.
pub fn moment_curve(n: usize) -> Vec<Point> {
    (0..n as i64).map(|i| point(i, i * i)).collect()
}

/// Parses `"x,y;x,y;..."` with integer or `p/q` coordinates.
pub fn parse_points(s: &str) -> Result<Vec<Point>> {
    fn coord(t: &str) -> Result<BigRational> {
        let t = t.trim();
        let bad = || Error::Parse(format!("invalid coordinate {t:?}"));
        match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(p, q))
            }
            None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
        }
    }
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (x, y) = p
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("point {p:?} is not of the form x,y")))?;
            Ok((coord(x)?, coord(y)?))
        })
        .collect()
}

fn cross(o: &Point, a: &Point, b: &Point) -> BigRational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn dot_dir(o: &Point, dir: &Point, p: &Point) -> BigRational {
    (&p.0 - &o.0) * &dir.0 + (&p.1 - &o.1) * &dir.1
}

/// Traces of half-planes on a finite point set in the plane.
///
/// Any trace other than `∅` and the whole set is cut by a half-plane whose
/// boundary can be translated and then rotated until it passes through two
/// of the points without changing the trace off that line. So every trace
/// is the open side of some line through two points together with a prefix
/// or suffix (in line order) of the points on that line, which is exactly
/// the candidate set built here. Every candidate is realized by a small
/// rotation and shift of that line. Open and closed half-planes cut the
/// same traces on finite sets, so `closed` does not change the result.
pub fn halfspaces(points: &[Point], closed: bool) -> Result<SetSystem> {
    let _ = closed;
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(Error::Precondition(format!("points {i} and {j} coincide")));
            }
        }
    }
    let mut members = vec![BitSet::new(n), BitSet::full(n)];
    let mut seen_lines: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let (o, a) = (&points[i], &points[j]);
            let mut on_line = Vec::new();
            let mut left = BitSet::new(n);
            let mut right = BitSet::new(n);
            for (m, p) in points.iter().enumerate() {
                let c = cross(o, a, p);
                if c.is_zero() {
                    on_line.push(m);
                } else if c.is_positive() {
                    left.insert(m);
                } else {
                    right.insert(m);
                }
            }
            if !seen_lines.insert(on_line.clone()) {
                continue;
            }
            let dir = (&a.0 - &o.0, &a.1 - &o.1);
            on_line.sort_by_cached_key(|&m| dot_dir(o, &dir, &points[m]));
            for side in [&left, &right] {
                for cut in 0..=on_line.len() {
                    let mut prefix = side.clone();
                    for &m in &on_line[..cut] {
                        prefix.insert(m);
                    }
                    members.push(prefix);
                    let mut suffix = side.clone();
                    for &m in &on_line[cut..] {
                        suffix.insert(m);
                    }
                    members.push(suffix);
                }
            }
        }
    }
    SetSystem::new(n, members)
}

/// All cosets `a + dZ_n` for the listed divisors `d`.
pub fn cosets_zn(n: usize, divisors: &[usize]) -> Result<SetSystem> {
    check_divisors(n, divisors)?;
    let mut members = Vec::new();
    for &d in divisors {
        for a in 0..d {
            members.push(BitSet::from_indices(n, (a..n).step_by(d)).expect("in range"));
        }
    }
    SetSystem::new(n, members)
}

/// The subgroups `dZ_n` for the listed divisors `d`.
pub fn subgroups_zn(n: usize, divisors: &[usize]) -> Result<SetSystem> {
    check_divisors(n, divisors)?;
    let members = divisors
        .iter()
        .map(|&d| BitSet::from_indices(n, (0..n).step_by(d)).expect("in range"))
        .collect();
    SetSystem::new(n, members)
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn check_divisors(n: usize, divisors: &[usize]) -> Result<()> {
    if n == 0 {
        return Err(Error::Range {
            value: 0,
            range: "1..".into(),
        });
    }
    match divisors.iter().find(|&&d| d == 0 || !n.is_multiple_of(d)) {
        Some(&d) => Err(Error::Precondition(format!("{d} does not divide {n}"))),
        None => Ok(()),
    }
}

/// `{a + bZ} ∩ [0, window)` for `1 <= b <= max_modulus` and `0 <= a < b`.
pub fn arithmetic_progressions(window: usize, max_modulus: usize) -> Result<SetSystem> {
    if max_modulus == 0 || window < max_modulus {
        return Err(Error::Precondition(format!(
            "need window >= max_modulus >= 1, got window {window}, max_modulus {max_modulus}"
        )));
    }
    let moduli: Vec<usize> = (1..=max_modulus).collect();
    progressions_with_moduli(window, &moduli)
}

/// `{a + bZ} ∩ [0, window)` for the listed moduli `b`.
pub fn progressions_with_moduli(window: usize, moduli: &[usize]) -> Result<SetSystem> {
    if let Some(&b) = moduli.iter().find(|&&b| b == 0 || b > window) {
        return Err(Error::Range {
            value: b as i64,
            range: format!("1..={window}"),
        });
    }
    let mut members = Vec::new();
    for &b in moduli {
        for a in 0..b {
            members.push(BitSet::from_indices(window, (a..window).step_by(b)).expect("in range"));
        }
    }
    SetSystem::new(window, members)
}

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Points versus non-vertical lines of the affine plane over `F_q`.
///
/// Point `(ξ, η)` has index `ξ·q + η`, line `η = aξ + b` has index `a·q + b`.
pub fn pointline_fq(q: u64) -> Result<BiRelation> {
    if !is_prime(q) {
        return Err(Error::Precondition(format!("{q} is not prime")));
    }
    if q > FIELD_CAP {
        return Err(Error::Range {
            value: q as i64,
            range: format!("2..={FIELD_CAP}"),
        });
    }
    let q = q as usize;
    Ok(BiRelation::from_fn(q * q, q * q, |p, l| {
        let (xi, eta) = (p / q, p % q);
        let (a, b) = (l / q, l % q);
        (a * xi + b) % q == eta
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElekesGrid {
    pub k: u64,
    /// `(x, y)` with `x < k`, `y < 4k²`.
    pub points: Vec<(u64, u64)>,
    /// `(a, b)` for the line `y = ax + b`, with `a < 2k`, `b < 2k²`.
    pub lines: Vec<(u64, u64)>,
    pub incidence: BiRelation,
}

impl ElekesGrid {
    pub fn vertex_count(&self) -> usize {
        self.points.len() + self.lines.len()
    }
}

/// The grid-and-lines configuration with `4k⁴` incidences among `8k³` objects.
///
/// `x` ranges over `k` values and every line `y = ax + b` stays below `4k²`
/// there, so each line contains exactly `k` grid points.
pub fn elekes_grid(k: u64) -> Result<ElekesGrid> {
    if k == 0 || k > ELEKES_CAP {
        return Err(Error::Range {
            value: k as i64,
            range: format!("1..={ELEKES_CAP}"),
        });
    }
    let points: Vec<(u64, u64)> = (0..k).flat_map(|x| (0..4 * k * k).map(move |y| (x, y))).collect();
    let lines: Vec<(u64, u64)> = (0..2 * k).flat_map(|a| (0..2 * k * k).map(move |b| (a, b))).collect();
    let incidence = BiRelation::from_fn(points.len(), lines.len(), |p, l| {
        let (x, y) = points[p];
        let (a, b) = lines[l];
        a * x + b == y
    });
    Ok(ElekesGrid {
        k,
        points,
        lines,
        incidence,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypercube {
    pub d: usize,
    /// Undirected edges `(u, v)` with `u < v`, differing in one bit.
    pub edges: Vec<(usize, usize)>,
    /// Edges as 2-sets together with all singletons.
    pub system: SetSystem,
}

impl Hypercube {
    pub fn vertex_count(&self) -> usize {
        1 << self.d
    }

    /// Symmetric adjacency relation.
    pub fn adjacency(&self) -> BiRelation {
        let n = self.vertex_count();
        BiRelation::from_fn(n, n, |u, v| (u ^ v).is_power_of_two())
    }

    /// Largest number of edges induced on `t` vertices.
    pub fn max_induced_edges(&self, t: usize, budget: Budget) -> Result<usize> {
        max_induced_edges(self.vertex_count(), &self.edges, t, budget)
    }
}

pub fn hypercube_edges(d: usize) -> Result<Hypercube> {
    if d > HYPERCUBE_CAP {
        return Err(Error::Range {
            value: d as i64,
            range: format!("0..={HYPERCUBE_CAP}"),
        });
    }
    let n = 1usize << d;
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..d).map(move |i| (u, u ^ (1 << i))))
        .filter(|&(u, v)| u < v)
        .collect();
    let members = edges
        .iter()
        .map(|&(u, v)| BitSet::from_indices(n, [u, v]).expect("in range"))
        .chain((0..n).map(|u| BitSet::from_indices(n, [u]).expect("in range")))
        .collect();
    Ok(Hypercube {
        d,
        edges: edges.clone(),
        system: SetSystem::new(n, members)?,
    })
}

/// Largest number of edges of an undirected graph induced on `t` vertices.
pub fn max_induced_edges(n: usize, edges: &[(usize, usize)], t: usize, budget: Budget) -> Result<usize> {
    if t > n {
        return Err(Error::Range {
            value: t as i64,
            range: format!("0..={n}"),
        });
    }
    if crate::combinatorics::binomial(n as u64, t as u64)? > budget.0 as u128 {
        return Err(budget.exceeded(None));
    }
    let mut adj = vec![BitSet::new(n); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let (best, _) = max_over_subsets(n, t, |vs| {
        let mut count = 0u128;
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if adj[u].contains(v) {
                    count += 1;
                }
            }
        }
        count
    })
    .expect("t <= n");
    Ok(best as usize)
}

/// `{{a, b} : (a, b) ∈ Φ}` on `X`, loops giving singletons.
pub fn phi_hat(rel: &BiRelation) -> Result<SetSystem> {
    if !rel.is_square() {
        return Err(Error::Shape(format!(
            "phi-hat needs a square relation, got {}x{}",
            rel.x_size(),
            rel.y_size()
        )));
    }
    let n = rel.x_size();
    let mut members = Vec::with_capacity(rel.edge_count());
    for a in 0..n {
        for b in rel.rows()[a].iter() {
            members.push(BitSet::from_indices(n, [a, b]).expect("in range"));
        }
    }
    SetSystem::new(n, members)
}

/// Both sides of the trace-count sandwich for `φ̂` on a set `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// `|A ∩ S_φ̂|`.
    pub trace_count: usize,
    /// Elements of `A` related to something but to nothing in `A`.
    pub a0: usize,
    /// Pairs `(a, b) ∈ A × A` with `(a, b) ∈ Φ`.
    pub induced_edges: usize,
    /// Elements of `A` related to something in `A` and to something outside `A`.
    pub mixed: usize,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `|A ∩ S_φ̂| <= 1 + |A| + |E|`.
    pub weak_upper_holds: bool,
}

pub fn phi_hat_sandwich(rel: &BiRelation, a: &BitSet) -> Result<SandwichReport> {
    let system = phi_hat(rel)?;
    if a.len() != rel.x_size() {
        return Err(Error::Shape(format!(
            "subset has width {}, expected {}",
            a.len(),
            rel.x_size()
        )));
    }
    let trace_count = system.trace(a)?.len();
    let n = rel.x_size();
    let neighbours = |v: usize| {
        let mut nb = rel.rows()[v].clone();
        nb.union_with(&rel.column(v));
        nb
    };
    let mut a0 = 0;
    let mut mixed = 0;
    for v in a.iter() {
        let nb = neighbours(v);
        let inside = nb.intersects(a);
        let outside = nb.intersects(&a.complement());
        if !inside && outside {
            a0 += 1;
        }
        if inside && outside {
            mixed += 1;
        }
    }
    let induced_edges = a.iter().map(|v| rel.rows()[v].and(a).count()).sum::<usize>();
    debug_assert!(a.iter().all(|v| v < n));
    // half of |E| compared in doubled form to stay in integers
    let lower_holds = 2 * a0 + induced_edges <= 2 * trace_count;
    let upper_holds = trace_count <= 1 + a0 + induced_edges;
    let weak_upper_holds = trace_count <= 1 + a.count() + induced_edges;
    Ok(SandwichReport {
        trace_count,
        a0,
        induced_edges,
        mixed,
        lower_holds,
        upper_holds,
        weak_upper_holds,
    })
}

/// A family together with its parameters, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Subsets { n: usize, d: usize },
    Intervals { points: usize, k: usize },
    Convex { points: usize },
    Halfspaces { points: Vec<(String, String)>, closed: bool },
    Cosets { n: usize, divisors: Vec<usize> },
    Subgroups { n: usize, divisors: Vec<usize> },
    ArithmeticProgressions { window: usize, max_modulus: usize },
    PointlineFq { q: u64 },
    ElekesGrid { k: u64 },
    HypercubeEdges { d: usize },
    PhiHat { q: u64 },
}

/// What a generator produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    System(SetSystem),
    Relation(BiRelation),
}

impl Generated {
    pub fn to_json(&self) -> String {
        match self {
            Generated::System(s) => s.to_json(),
            Generated::Relation(r) => r.to_json(),
        }
    }
}

impl FamilySpec {
    pub fn build(&self) -> Result<Generated> {
        use FamilySpec::*;
        Ok(match self {
            Subsets { n, d } => Generated::System(subsets_at_most_d(*n, *d)?),
            Intervals { points, k } => Generated::System(intervals(*points, *k)?),
            Convex { points } => Generated::System(convex(*points)?),
            Halfspaces { points, closed } => {
                let text: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
                Generated::System(halfspaces(&parse_points(&text.join(";"))?, *closed)?)
            }
            Cosets { n, divisors } => Generated::System(cosets_zn(*n, divisors)?),
            Subgroups { n, divisors } => Generated::System(subgroups_zn(*n, divisors)?),
            ArithmeticProgressions { window, max_modulus } => {
                Generated::System(arithmetic_progressions(*window, *max_modulus)?)
            }
            PointlineFq { q } => Generated::Relation(pointline_fq(*q)?),
            ElekesGrid { k } => Generated::Relation(elekes_grid(*k)?.incidence),
            HypercubeEdges { d } => Generated::System(hypercube_edges(*d)?.system),
            PhiHat { q } => Generated::System(phi_hat(&pointline_fq(*q)?)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn subsets_examples() {
        let s = subsets_at_most_d(5, 2).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(s.shatter_function(4, b()).unwrap().value, 11);
        assert_eq!(subsets_at_most_d(7, 0).unwrap().len(), 1);
        let full = subsets_at_most_d(4, 4).unwrap();
        assert_eq!(full.len(), 16);
        assert_eq!(full.vc_dimension(b()).unwrap(), 4);
        assert!(subsets_at_most_d(3, 4).is_err());
    }

    /// Counts subsets of `0..n` with at most `k` maximal runs by scanning bitmasks.
    fn runs_oracle(n: usize, k: usize) -> usize {
        (0u32..1 << n)
            .filter(|m| {
                let runs = (0..n).filter(|&i| m >> i & 1 == 1 && (i == 0 || m >> (i - 1) & 1 == 0)).count();
                runs <= k
            })
            .count()
    }

    #[test]
    fn interval_counts() {
        assert_eq!(intervals(6, 1).unwrap().len(), 22);
        for n in 1..=12 {
            for k in 1..=3 {
                let s = intervals(n, k).unwrap();
                assert_eq!(s.len(), runs_oracle(n, k), "n={n} k={k}");
                assert_eq!(s.len() as u128, binomial_prefix_sum(n as u64, 2 * k as u64).unwrap());
            }
        }
        assert_eq!(intervals(3, 5).unwrap().len(), 8);
        assert_eq!(intervals(10, 2).unwrap().vc_dimension(b()).unwrap(), 4);
    }

    #[test]
    fn convex_breadth_two() {
        assert_eq!(convex(6).unwrap().breadth(b()).unwrap(), 2);
    }

    #[test]
    fn halfplanes_general_position() {
        let s = halfspaces(&moment_curve(7), true).unwrap();
        assert_eq!(s.len(), 44);
        let s5 = halfspaces(&moment_curve(5), true).unwrap();
        assert_eq!(s5.vc_dimension(b()).unwrap(), 3);
        assert_eq!(halfspaces(&moment_curve(7), false).unwrap(), s);
    }

    #[test]
    fn halfplanes_collinear() {
        let pts: Vec<Point> = (0..4).map(|i| point(i, 2 * i + 1)).collect();
        assert_eq!(halfspaces(&pts, true).unwrap().len(), 8);
    }

    /// Sweeps many directions with a float projection and takes every prefix
    /// of the sorted order; exact for small integer inputs with distinct
    /// projections on a dense enough set of directions.
    fn sweep_oracle(pts: &[(i64, i64)]) -> usize {
        let n = pts.len();
        let mut seen = BTreeSet::new();
        let steps = 20_000;
        for s in 0..steps {
            let th = std::f64::consts::TAU * (s as f64 + 0.5) / steps as f64;
            let (c, si) = (th.cos(), th.sin());
            let mut order: Vec<(f64, usize)> = pts
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (x as f64 * c + y as f64 * si, i))
                .collect();
            order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for cut in 0..=n {
                let mut key: Vec<usize> = order[..cut].iter().map(|&(_, i)| i).collect();
                key.sort_unstable();
                seen.insert(key);
            }
        }
        seen.len()
    }

    #[test]
    fn halfplanes_match_sweep() {
        let configs: [&[(i64, i64)]; 3] = [
            &[(0, 0), (3, 1), (1, 4), (5, 5), (2, 2), (4, 0)],
            &[(0, 0), (1, 0), (2, 0), (0, 1), (1, 2)],
            &[(0, 0), (2, 1), (1, 3), (3, 3), (-1, 2)],
        ];
        for pts in configs {
            let exact: Vec<Point> = pts.iter().map(|&(x, y)| point(x, y)).collect();
            assert_eq!(halfspaces(&exact, true).unwrap().len(), sweep_oracle(pts), "{pts:?}");
        }
    }

    #[test]
    fn halfplane_errors_and_parsing() {
        assert!(halfspaces(&[point(1, 1), point(1, 1)], true).is_err());
        let pts = parse_points("0,0; 1/2,3 ;2,-1").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1].0, BigRational::new(1.into(), 2.into()));
        assert!(parse_points("1;2").is_err());
        assert!(parse_points("1/0,2").is_err());
        assert_eq!(halfspaces(&[point(0, 0)], true).unwrap().len(), 2);
        assert_eq!(halfspaces(&[], true).unwrap().len(), 1);
    }

    #[test]
    fn coset_examples() {
        assert_eq!(cosets_zn(6, &[2, 3]).unwrap().len(), 5);
        assert!(cosets_zn(6, &[4]).is_err());
        let z12 = subgroups_zn(12, &[2, 3, 4, 6]).unwrap();
        assert_eq!(z12.breadth(b()).unwrap(), z12.independence_dimension(b()).unwrap());
        let cos = cosets_zn(12, &[2, 3, 4, 6]).unwrap();
        assert_eq!(cos.breadth(b()).unwrap(), z12.breadth(b()).unwrap());
    }

    #[test]
    fn progressions() {
        let s = arithmetic_progressions(30, 30).unwrap();
        assert!(s.vc_dimension(b()).unwrap() >= 3);
        let one = progressions_with_moduli(12, &[1]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.members()[0].count(), 12);
        assert!(arithmetic_progressions(3, 4).is_err());
        // cosets of 2Z and 3Z in a window: pairwise intersecting triples meet
        let s = progressions_with_moduli(12, &[2, 3]).unwrap();
        assert_eq!(s.helly_number(b()).unwrap(), 2);
    }

    #[test]
    fn field_incidences() {
        for q in [2, 3, 5, 7] {
            let r = pointline_fq(q).unwrap();
            let q = q as usize;
            assert_eq!(r.edge_count(), q * q * q);
            assert!((0..q * q).all(|l| r.column(l).count() == q));
            assert!(r.rows().iter().all(|row| row.count() == q));
            assert!(r.detect_krs(2, 2, b()).unwrap().is_none());
        }
        assert!(pointline_fq(4).is_err());
        assert_eq!(pointline_fq(3).unwrap().system_of().len(), 9);
        assert!(pointline_fq(3).unwrap().negate().detect_krs(3, 3, b()).unwrap().is_some());
    }

    #[test]
    fn elekes_counts() {
        for k in 1..=3u64 {
            let g = elekes_grid(k).unwrap();
            assert_eq!(g.vertex_count() as u64, 8 * k * k * k);
            assert_eq!(g.incidence.edge_count() as u64, 4 * k.pow(4));
            for l in 0..g.lines.len() {
                assert_eq!(g.incidence.column(l).count() as u64, k);
            }
        }
        let g = elekes_grid(1).unwrap();
        assert_eq!((g.points.len(), g.lines.len()), (4, 4));
    }

    #[test]
    fn hypercube_counts() {
        for d in 0..=8 {
            let h = hypercube_edges(d).unwrap();
            let expect = if d == 0 { 0 } else { d << (d - 1) };
            assert_eq!(h.edges.len(), expect);
        }
        let h = hypercube_edges(3).unwrap();
        assert_eq!(h.vertex_count(), 8);
        assert_eq!(h.system.len(), 12 + 8);
        assert_eq!(h.max_induced_edges(4, b()).unwrap(), 4);
        assert_eq!(h.max_induced_edges(2, b()).unwrap(), 1);
        assert!(h.system.vc_dimension(b()).unwrap() <= 2);
        assert!(hypercube_edges(11).is_err());
    }

    #[test]
    fn phi_hat_matching() {
        // symmetric perfect matching 0-1, 2-3, 4-5
        let rel = BiRelation::from_fn(6, 6, |a, c| a / 2 == c / 2 && a != c);
        let r = phi_hat_sandwich(&rel, &BitSet::full(6)).unwrap();
        assert_eq!(r.trace_count, 3);
        assert_eq!(r.a0, 0);
        assert_eq!(r.induced_edges, 6);
        assert!(r.lower_holds && r.upper_holds);
        assert!(phi_hat(&BiRelation::empty(4, 4)).unwrap().is_empty());
        assert!(phi_hat(&BiRelation::empty(3, 4)).is_err());
    }

    #[test]
    fn phi_hat_upper_bound_can_fail() {
        // 0->1 inside A, 0->2 and 1->3 leave A = {0, 1}
        let rel = BiRelation::from_fn(4, 4, |a, c| matches!((a, c), (0, 1) | (0, 2) | (1, 3)));
        let a = BitSet::from_indices(4, [0, 1]).unwrap();
        let r = phi_hat_sandwich(&rel, &a).unwrap();
        assert_eq!((r.trace_count, r.a0, r.induced_edges, r.mixed), (3, 0, 1, 2));
        assert!(r.lower_holds);
        assert!(!r.upper_holds);
        assert!(r.weak_upper_holds);
    }

    #[test]
    fn phi_hat_on_field_plane() {
        let rel = pointline_fq(3).unwrap();
        let r = phi_hat_sandwich(&rel, &BitSet::full(9)).unwrap();
        assert!(r.lower_holds && r.upper_holds);
    }

    #[test]
    fn family_spec_round_trip() {
        let spec = FamilySpec::Intervals { points: 6, k: 1 };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"family":"intervals","points":6,"k":1}"#);
        let back: FamilySpec = serde_json::from_str(&text).unwrap();
        match back.build().unwrap() {
            Generated::System(s) => assert_eq!(s.len(), 22),
            Generated::Relation(_) => panic!("expected a set system"),
        }
        assert!(matches!(
            FamilySpec::PointlineFq { q: 3 }.build().unwrap(),
            Generated::Relation(r) if r.edge_count() == 27
        ));
    }
}
