//! Rooted graphs `(R, H)` and their average and maximum average degree.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::combinatorics::Budget;
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RootedGraphJson", into = "RootedGraphJson")]
pub struct RootedGraph {
    n_vertices: usize,
    roots: Vec<usize>,
    is_root: Vec<bool>,
    /// Normalized `(u, v)` with `u < v`, sorted and distinct.
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootedGraphJson {
    pub n_vertices: usize,
    pub roots: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<RootedGraphJson> for RootedGraph {
    type Error = Error;

    fn try_from(j: RootedGraphJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        RootedGraph::new(j.n_vertices, &j.roots, &edges)
    }
}

impl From<RootedGraph> for RootedGraphJson {
    fn from(g: RootedGraph) -> Self {
        RootedGraphJson {
            n_vertices: g.n_vertices,
            roots: g.roots,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Sparse,
    Dense,
    /// Average degree equals the threshold exactly.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Maximum average degree is strictly below the threshold.
    pub safe: bool,
    /// Maximum average degree equals the threshold exactly.
    pub safety_boundary: bool,
    pub density: Density,
}

impl RootedGraph {
    pub fn new(n_vertices: usize, roots: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        let mut is_root = vec![false; n_vertices];
        for &r in roots {
            if r >= n_vertices {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: n_vertices,
                });
            }
            is_root[r] = true;
        }
        if is_root.iter().all(|&r| r) {
            return Err(Error::Precondition("the roots must be a proper subset of the vertices".into()));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if let Some(bad) = [u, v].into_iter().find(|&x| x >= n_vertices) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    bound: n_vertices,
                });
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let roots: BTreeSet<usize> = roots.iter().copied().collect();
        Ok(RootedGraph {
            n_vertices,
            roots: roots.into_iter().collect(),
            is_root,
            edges: set.into_iter().collect(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rooted graph serializes")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn non_roots(&self) -> Vec<usize> {
        (0..self.n_vertices).filter(|&v| !self.is_root[v]).collect()
    }

    /// Edges not having both ends among the roots.
    pub fn counted_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| !(self.is_root[u] && self.is_root[v]))
            .count()
    }

    /// `2e / v` over non-root vertices and counted edges.
    pub fn average_degree(&self) -> Rational {
        let v = self.non_roots().len() as i64;
        Rational::new(2 * self.counted_edges() as i64, v)
    }

    /// Maximum of the average degree over rooted subgraphs with the same
    /// roots. For a fixed vertex set the induced edges give the most edges,
    /// so it suffices to range over nonempty sets of non-roots.
    pub fn max_average_degree(&self, budget: Budget) -> Result<Rational> {
        Ok(self.max_average_degree_witness(budget)?.0)
    }

    /// The maximum together with a non-root set attaining it (smallest mask first).
    pub fn max_average_degree_witness(&self, budget: Budget) -> Result<(Rational, Vec<usize>)> {
        let nr = self.non_roots();
        if nr.len() > 20 || (1u64 << nr.len()) - 1 > budget.0 {
            return self.densest_by_flow(&nr);
        }
        let pos: Vec<Option<usize>> = {
            let mut p = vec![None; self.n_vertices];
            for (i, &v) in nr.iter().enumerate() {
                p[v] = Some(i);
            }
            p
        };
        // each counted edge needs the non-roots among its ends
        let needs: Vec<u64> = self
            .edges
            .iter()
            .filter(|&&(u, v)| !(self.is_root[u] && self.is_root[v]))
            .map(|&(u, v)| [u, v].iter().filter_map(|&x| pos[x]).fold(0u64, |m, i| m | 1 << i))
            .collect();
        let mut best: Option<(Rational, u64)> = None;
        for mask in 1u64..(1 << nr.len()) {
            let e = needs.iter().filter(|&&n| n & mask == n).count() as i64;
            let val = Rational::new(2 * e, mask.count_ones() as i64);
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, mask));
            }
        }
        let (val, mask) = best.expect("at least one non-root");
        let chosen = nr.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        Ok((val, chosen))
    }

    /// Same maximum via Dinkelbach iteration on a max-closure cut: for the
    /// current ratio `p/q` pick edges (profit `q`) and the non-roots they
    /// need (cost `p`); a positive closure gives a strictly denser set.
    fn densest_by_flow(&self, nr: &[usize]) -> Result<(Rational, Vec<usize>)> {
        let mut index = vec![usize::MAX; self.n_vertices];
        for (i, &v) in nr.iter().enumerate() {
            index[v] = i;
        }
        let needs: Vec<Vec<usize>> = self
            .edges
            .iter()
            .filter(|&&(u, v)| !(self.is_root[u] && self.is_root[v]))
            .map(|&(u, v)| [u, v].into_iter().filter(|&x| !self.is_root[x]).map(|x| index[x]).collect())
            .collect();
        let density = |chosen: &[bool]| {
            let size = chosen.iter().filter(|&&c| c).count() as i64;
            let e = needs.iter().filter(|n| n.iter().all(|&i| chosen[i])).count() as i64;
            Rational::new(2 * e, size)
        };
        let mut chosen = vec![true; nr.len()];
        let mut best = density(&chosen);
        loop {
            // 2e/|U| > λ  ⇔  e·denom − |U|·(λ·denom/2) > 0; work with 2e to stay integral
            let (p, q) = (*best.numer(), *best.denom());
            let m = needs.len();
            let (source, sink) = (m + nr.len(), m + nr.len() + 1);
            let mut flow = MaxFlow::new(m + nr.len() + 2);
            for (j, n) in needs.iter().enumerate() {
                flow.add_edge(source, j, 2 * q);
                for &i in n {
                    flow.add_edge(j, m + i, i64::MAX / 4);
                }
            }
            for i in 0..nr.len() {
                flow.add_edge(m + i, sink, p);
            }
            let cut = flow.run(source, sink);
            if 2 * q * m as i64 - cut <= 0 {
                break;
            }
            let side = flow.source_side(source);
            let next: Vec<bool> = (0..nr.len()).map(|i| side[m + i]).collect();
            if !next.iter().any(|&c| c) {
                break;
            }
            let d = density(&next);
            if d <= best {
                break;
            }
            best = d;
            chosen = next;
        }
        let set = nr.iter().zip(&chosen).filter(|(_, &c)| c).map(|(&v, _)| v).collect();
        Ok((best, set))
    }

    /// Compares degrees against the threshold `2/α`.
    pub fn classify(&self, alpha: Rational, budget: Budget) -> Result<Classification> {
        if alpha <= Rational::from_integer(0) || alpha >= Rational::from_integer(1) {
            return Err(Error::Range {
                value: 0,
                range: format!("alpha must lie in (0,1), got {alpha}"),
            });
        }
        let threshold = Rational::from_integer(2) / alpha;
        let adeg = self.average_degree();
        let mdeg = self.max_average_degree(budget)?;
        let density = match adeg.cmp(&threshold) {
            std::cmp::Ordering::Less => Density::Sparse,
            std::cmp::Ordering::Equal => Density::Boundary,
            std::cmp::Ordering::Greater => Density::Dense,
        };
        Ok(Classification {
            safe: mdeg < threshold,
            safety_boundary: mdeg == threshold,
            density,
        })
    }
}

struct MaxFlow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl MaxFlow {
    fn new(n: usize) -> Self {
        MaxFlow {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.head.len()];
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, f: i64, level: &[usize], it: &mut [usize]) -> i64 {
        if u == t {
            return f;
        }
        while it[u] < self.head[u].len() {
            let e = self.head[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let got = self.push(v, t, f.min(self.cap[e]), level, it);
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = vec![0; self.head.len()];
            loop {
                let f = self.push(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).iter().map(|&l| l != usize::MAX).collect()
    }
}

/// Roots are the base points `0..t`, non-roots are the members (vertex
/// `t + i` for member `i`), and each membership is an edge.
pub fn rooted_graph_of(system: &SetSystem) -> Result<RootedGraph> {
    if system.is_empty() {
        return Err(Error::Precondition("the set system has no members".into()));
    }
    let t = system.ground_size();
    let roots: Vec<usize> = (0..t).collect();
    let edges: Vec<(usize, usize)> = system
        .members()
        .iter()
        .enumerate()
        .flat_map(|(i, m)| m.iter().map(move |x| (x, t + i)))
        .collect();
    RootedGraph::new(t + system.len(), &roots, &edges)
}

/// `max over nonempty S' ⊆ S of (2/|S'|)·Σ_{S ∈ S'} |S|`, computed from the
/// member sizes alone.
pub fn system_mdeg(system: &SetSystem) -> Result<Rational> {
    if system.is_empty() {
        return Err(Error::Precondition("the set system has no members".into()));
    }
    let sizes: Vec<i64> = system.members().iter().map(|m| m.count() as i64).collect();
    if sizes.len() > 24 {
        return Err(Error::Precondition(format!(
            "{} members is too many for subfamily enumeration",
            sizes.len()
        )));
    }
    let mut best = Rational::from_integer(0);
    for mask in 1u32..(1 << sizes.len()) {
        let total: i64 = sizes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s).sum();
        best = best.max(Rational::new(2 * total, mask.count_ones() as i64));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::subsets_at_most_d;

    fn b() -> Budget {
        Budget::default()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn uniform(t: usize, k: usize) -> SetSystem {
        let all = subsets_at_most_d(t, k).unwrap();
        let members = all.members().iter().filter(|m| m.count() == k).cloned().collect();
        SetSystem::new(t, members).unwrap()
    }

    #[test]
    fn star_and_empty() {
        let star = RootedGraph::new(4, &[0, 1, 2], &[(0, 3), (1, 3), (2, 3)]).unwrap();
        assert_eq!(star.average_degree(), r(6, 1));
        assert_eq!(star.max_average_degree(b()).unwrap(), r(6, 1));
        let bare = RootedGraph::new(3, &[0], &[]).unwrap();
        assert_eq!(bare.average_degree(), r(0, 1));
    }

    #[test]
    fn root_root_edges_are_ignored() {
        let g = RootedGraph::new(3, &[0, 1], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.counted_edges(), 1);
        assert_eq!(g.average_degree(), r(2, 1));
    }

    #[test]
    fn invalid_graphs() {
        assert!(RootedGraph::new(2, &[0, 1], &[]).is_err());
        assert!(RootedGraph::new(2, &[0], &[(1, 1)]).is_err());
        assert!(RootedGraph::new(2, &[0], &[(0, 2)]).is_err());
    }

    #[test]
    fn uniform_systems() {
        for t in 2..=6 {
            for k in 1..=3.min(t) {
                let g = rooted_graph_of(&uniform(t, k)).unwrap();
                assert_eq!(g.average_degree(), r(2 * k as i64, 1));
                assert_eq!(g.max_average_degree(b()).unwrap(), r(2 * k as i64, 1));
            }
        }
        let g = rooted_graph_of(&uniform(4, 2)).unwrap();
        assert_eq!(g.max_average_degree(b()).unwrap(), r(4, 1));
    }

    #[test]
    fn mixed_sizes() {
        let s = SetSystem::from_index_sets(4, [vec![0], vec![1, 2, 3]]).unwrap();
        let g = rooted_graph_of(&s).unwrap();
        assert_eq!(g.average_degree(), r(4, 1));
        let (m, w) = g.max_average_degree_witness(b()).unwrap();
        assert_eq!(m, r(6, 1));
        assert_eq!(w.len(), 1);
        assert_eq!(system_mdeg(&s).unwrap(), m);
    }

    #[test]
    fn figure_one_shape() {
        let s = SetSystem::from_index_sets(3, [vec![0, 1], vec![1, 2]]).unwrap();
        let g = rooted_graph_of(&s).unwrap();
        assert_eq!(g.non_roots().len(), 2);
        assert_eq!(g.counted_edges(), 4);
        assert!(rooted_graph_of(&SetSystem::empty_family(3)).is_err());
    }

    #[test]
    fn classification() {
        let g = rooted_graph_of(&uniform(5, 2)).unwrap();
        // threshold 2/α vs degree 4
        let c = g.classify(r(1, 3), b()).unwrap();
        assert!(c.safe && c.density == Density::Sparse);
        let c = g.classify(r(2, 3), b()).unwrap();
        assert!(!c.safe && c.density == Density::Dense);
        let c = g.classify(r(1, 2), b()).unwrap();
        assert!(!c.safe && c.safety_boundary && c.density == Density::Boundary);
        assert!(g.classify(r(1, 1), b()).is_err());
        assert!(g.classify(r(0, 1), b()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = RootedGraph::new(3, &[0], &[(2, 0), (1, 2)]).unwrap();
        let text = g.to_json();
        assert_eq!(text, r#"{"n_vertices":3,"roots":[0],"edges":[[0,2],[1,2]]}"#);
        assert_eq!(RootedGraph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn flow_matches_enumeration() {
        let mut seed = 7u64;
        for _ in 0..40 {
            let mut members = Vec::new();
            for _ in 0..6 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                members.push((0..5).filter(|i| seed >> (20 + i) & 1 == 1).collect::<Vec<usize>>());
            }
            let s = SetSystem::from_index_sets(5, members).unwrap();
            let g = rooted_graph_of(&s).unwrap();
            let (flow, set) = g.densest_by_flow(&g.non_roots()).unwrap();
            assert_eq!(flow, g.max_average_degree(b()).unwrap());
            assert!(!set.is_empty());
        }
        let g = RootedGraph::new(5, &[0], &[(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)]).unwrap();
        assert_eq!(g.densest_by_flow(&g.non_roots()).unwrap().0, g.max_average_degree(b()).unwrap());
    }
}
