//! Named verification suites. Each produces a list of cases with the
//! expected relation, the observed value and a status.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vclab_core::bits::BitSet;
use vclab_core::combinatorics::{binomial_prefix_sum, for_each_subset};
use vclab_core::generators::{
    divisors, elekes_grid, hypercube_edges, phi_hat_sandwich, pointline_fq, subgroups_zn,
};
use vclab_core::rooted::{rooted_graph_of, system_mdeg, Rational};
use vclab_core::ultrametric::{beta_closed_form, UltrametricSpace};
use vclab_core::{lift_parameter, shelah_encode, BiRelation, Budget, Error, FormulaSet, Result, SetSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Sauer,
    Duality,
    BreadthInd,
    Poizat,
    Coding,
    Lift,
    PhiHat,
    Incidence,
    Balls,
    Rooted,
    Hypercube,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub name: String,
    pub description: String,
    pub expected: String,
    pub observed: String,
    pub status: Status,
}

struct Cases(Vec<Case>);

impl Cases {
    fn push(&mut self, name: String, description: &str, expected: String, observed: String, ok: bool) {
        self.0.push(Case {
            name,
            description: description.into(),
            expected,
            observed,
            status: if ok { Status::Pass } else { Status::Fail },
        });
    }

    /// Records a check whose computation may run out of budget.
    fn attempt(&mut self, name: String, description: &str, expected: String, run: impl FnOnce() -> Result<(String, bool)>) -> Result<()> {
        match run() {
            Ok((observed, ok)) => self.push(name, description, expected, observed, ok),
            Err(Error::BudgetExceeded { budget, .. }) => self.0.push(Case {
                name,
                description: description.into(),
                expected,
                observed: format!("budget {budget} exceeded"),
                status: Status::Skipped,
            }),
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn random_system(r: &mut ChaCha8Rng, max_n: usize, max_members: usize) -> SetSystem {
    let n = r.gen_range(1..=max_n);
    let m = r.gen_range(1..=max_members);
    let density: f64 = r.gen_range(0.2..0.8);
    let members = (0..m)
        .map(|_| BitSet::from_indices(n, (0..n).filter(|_| r.gen_bool(density))).expect("in range"))
        .collect();
    SetSystem::new(n, members).expect("valid members")
}

fn random_relation(r: &mut ChaCha8Rng, x: usize, y: usize) -> BiRelation {
    let density: f64 = r.gen_range(0.2..0.8);
    BiRelation::from_fn(x, y, |_, _| r.gen_bool(density))
}

pub fn run(suite: Suite, budget: Budget, seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Cases(Vec::new());
    let c = &mut cases;
    match suite {
        Suite::Sauer => sauer(c, &mut rng, budget)?,
        Suite::Duality => duality(c, &mut rng, budget)?,
        Suite::BreadthInd => breadth_ind(c, &mut rng, budget)?,
        Suite::Poizat => poizat(c, budget)?,
        Suite::Coding => coding(c, &mut rng)?,
        Suite::Lift => lift(c, &mut rng, budget)?,
        Suite::PhiHat => phi_hat(c, &mut rng)?,
        Suite::Incidence => incidence(c, budget)?,
        Suite::Balls => balls(c, budget)?,
        Suite::Rooted => rooted(c, &mut rng, budget)?,
        Suite::Hypercube => hypercube(c, budget)?,
    }
    Ok(cases.0)
}

fn sauer(c: &mut Cases, rng: &mut ChaCha8Rng, budget: Budget) -> Result<()> {
    for i in 0..20 {
        let s = random_system(rng, 10, 30);
        c.attempt(
            format!("sauer system={i}"),
            "shatter function at most the sum of binomials up to the VC dimension",
            "pi(t) <= C(t,<=vc) for all t".into(),
            || {
                let vc = s.vc_dimension(budget)?;
                let mut worst = None;
                for t in 0..=s.ground_size() {
                    let v = s.shatter_function(t, budget)?.value;
                    let bound = binomial_prefix_sum(t as u64, vc.max(0) as u64)?;
                    if v > bound {
                        worst.get_or_insert(format!("t={t}: {v} > {bound}"));
                    }
                }
                Ok(match worst {
                    None => (format!("vc={vc}, n={}, no violation", s.ground_size()), true),
                    Some(w) => (w, false),
                })
            },
        )?;
    }
    Ok(())
}

fn duality(c: &mut Cases, rng: &mut ChaCha8Rng, budget: Budget) -> Result<()> {
    for i in 0..20 {
        let (x, y) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let phi = random_relation(rng, x, y);
        c.attempt(
            format!("dual-shatter relation={i}"),
            "shatter of a relation equals dual shatter of its transpose",
            "equal for every t".into(),
            || {
                let dual = phi.dualize();
                for t in 0..=x {
                    let (p, q) = (phi.shatter(t, budget)?.value, dual.dual_shatter(t, budget)?.value);
                    if p != q {
                        return Ok((format!("t={t}: {p} vs {q}"), false));
                    }
                }
                Ok((format!("{x}x{y}, equal"), true))
            },
        )?;
        c.attempt(
            format!("vc-dual-bound relation={i}"),
            "VC dimension below 2^(1 + dual VC dimension)",
            "vc < 2^(1+vc*)".into(),
            || {
                let vc = phi.system_of().vc_dimension(budget)?;
                let vc_dual = phi.dualize().system_of().vc_dimension(budget)?;
                Ok((format!("vc={vc}, vc*={vc_dual}"), vc < 1i64 << (1 + vc_dual.max(0))))
            },
        )?;
    }
    Ok(())
}

fn breadth_ind(c: &mut Cases, rng: &mut ChaCha8Rng, budget: Budget) -> Result<()> {
    for i in 0..20 {
        let s = random_system(rng, 8, 12);
        c.attempt(
            format!("breadth-ind system={i}"),
            "breadth at least the independence dimension",
            "breadth >= IND".into(),
            || {
                let (br, ind) = (s.breadth(budget)?, s.independence_dimension(budget)?);
                Ok((format!("breadth={br}, IND={ind}"), br >= ind))
            },
        )?;
        c.attempt(
            format!("helly-breadth system={i}"),
            "Helly number at most breadth + 1",
            "helly <= breadth + 1".into(),
            || {
                let (br, helly) = (s.breadth(budget)?, s.helly_number(budget)?);
                Ok((format!("breadth={br}, helly={helly}"), helly <= br + 1))
            },
        )?;
    }
    Ok(())
}

fn poizat(c: &mut Cases, budget: Budget) -> Result<()> {
    for n in 1..=12 {
        let divs = divisors(n);
        for mask in 1u64..(1 << divs.len()) {
            let chosen: Vec<usize> = (0..divs.len()).filter(|i| mask >> i & 1 == 1).map(|i| divs[i]).collect();
            let s = subgroups_zn(n, &chosen)?;
            c.attempt(
                format!("poizat n={n} divisors={chosen:?}"),
                "subgroup family has breadth equal to independence dimension",
                "breadth == IND".into(),
                || {
                    let (br, ind) = (s.breadth(budget)?, s.independence_dimension(budget)?);
                    Ok((format!("breadth={br}, IND={ind}"), br == ind))
                },
            )?;
        }
    }
    let cosets = vclab_core::generators::cosets_zn(12, &[2, 3, 4, 6])?;
    let subgroups = subgroups_zn(12, &[2, 3, 4, 6])?;
    c.attempt(
        "coset-breadth n=12 divisors=[2, 3, 4, 6]".into(),
        "cosets have the breadth of their subgroups",
        "equal breadth".into(),
        || {
            let (a, b) = (cosets.breadth(budget)?, subgroups.breadth(budget)?);
            Ok((format!("cosets {a}, subgroups {b}"), a == b))
        },
    )
}

fn coding(c: &mut Cases, rng: &mut ChaCha8Rng) -> Result<()> {
    for i in 0..10 {
        let d = 1 + i % 2;
        let (x, y) = (rng.gen_range(2..=8), rng.gen_range(3..=8));
        let delta = FormulaSet::new((0..d).map(|_| random_relation(rng, x, y)).collect())?;
        let code = shelah_encode(&delta);
        let b = [0, 1, 2];
        let coded = code.build_parameters(&b)?;
        let (types, coded_types) = code.verify_injection(&b)?;
        c.push(
            format!("coding d={d} case={i}"),
            "coded single relation realizes at least as many types over 2d|B| parameters",
            format!("|S(B)| <= |S'(B')|, |B'| = {}", 2 * d * b.len()),
            format!("{types} <= {coded_types}, |B'| = {}", coded.tuples.len()),
            types <= coded_types && coded.tuples.len() == 2 * d * b.len(),
        );
    }
    Ok(())
}

fn lift(c: &mut Cases, rng: &mut ChaCha8Rng, budget: Budget) -> Result<()> {
    for i in 0..5 {
        let (x, y) = (rng.gen_range(3..=6), rng.gen_range(1..=6));
        let phi = random_relation(rng, x, y);
        let psi = lift_parameter(&phi, 4, 0)?.materialize();
        c.attempt(
            format!("lift t=3 case={i}"),
            "extra parameter coordinate multiplies traces",
            "3*pi(3) <= pi'(6)".into(),
            || {
                let (base, lifted) = (phi.shatter(3, budget)?.value, psi.shatter(6, budget)?.value);
                Ok((format!("3*{base} <= {lifted}"), 3 * base <= lifted))
            },
        )?;
    }
    Ok(())
}

fn phi_hat(c: &mut Cases, rng: &mut ChaCha8Rng) -> Result<()> {
    for i in 0..10 {
        let n = rng.gen_range(3..=8);
        let rel = random_relation(rng, n, n);
        for j in 0..3 {
            let a = BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))?;
            let rep = phi_hat_sandwich(&rel, &a)?;
            let observed = format!(
                "traces={}, |A0|={}, |E|={}, mixed={}",
                rep.trace_count, rep.a0, rep.induced_edges, rep.mixed
            );
            c.push(
                format!("phi-hat-lower case={i}.{j}"),
                "trace count at least |A0| + |E|/2",
                "|A0| + |E|/2 <= traces".into(),
                observed.clone(),
                rep.lower_holds,
            );
            c.push(
                format!("phi-hat-upper case={i}.{j}"),
                "trace count at most 1 + |A0| + |E|",
                "traces <= 1 + |A0| + |E|".into(),
                observed.clone(),
                rep.upper_holds,
            );
            c.push(
                format!("phi-hat-weak-upper case={i}.{j}"),
                "trace count at most 1 + |A| + |E|",
                "traces <= 1 + |A| + |E|".into(),
                observed,
                rep.weak_upper_holds,
            );
        }
    }
    Ok(())
}

fn incidence(c: &mut Cases, budget: Budget) -> Result<()> {
    for q in [3u64, 5, 7] {
        let rel = pointline_fq(q)?;
        let edges = rel.edge_count() as u64;
        c.push(
            format!("fq-edges q={q} expect {}", q * q * q),
            "point-line incidences in the affine plane over F_q",
            (q * q * q).to_string(),
            edges.to_string(),
            edges == q * q * q,
        );
        c.attempt(
            format!("fq-no-k22 q={q}"),
            "two points lie on at most one common line",
            "no K_2,2".into(),
            || {
                let found = rel.detect_krs(2, 2, budget)?;
                Ok((if found.is_some() { "K_2,2 found" } else { "none" }.into(), found.is_none()))
            },
        )?;
    }
    for k in 1..=3u64 {
        let g = elekes_grid(k)?;
        let inc = g.incidence.edge_count() as u64;
        let quarter = 0.25 * (g.vertex_count() as f64).powf(4.0 / 3.0);
        c.push(
            format!("elekes k={k} expect {}", 4 * k.pow(4)),
            "grid incidences equal a quarter of |V|^(4/3)",
            format!("{} = |V|^(4/3)/4", 4 * k.pow(4)),
            format!("{inc}, |V|^(4/3)/4 = {quarter:.6}"),
            inc == 4 * k.pow(4) && (quarter - inc as f64).abs() <= 1e-6 * quarter,
        );
    }
    Ok(())
}

fn balls(c: &mut Cases, budget: Budget) -> Result<()> {
    for p in [2u64, 3] {
        for d in 0..=3u32 {
            let closed = beta_closed_form(p, d)?;
            let expect = ((p + 1).pow(d + 1) - 1) / p;
            c.push(
                format!("beta p={p} d={d} expect {expect}"),
                "closed form ((p+1)^(d+1) - 1)/p",
                expect.to_string(),
                closed.to_string(),
                closed == expect as u128,
            );
        }
    }
    for p in [2u32, 3] {
        let space = UltrametricSpace::full(p, 6)?;
        let centre = space.ball(0, 3)?;
        for d in 0..=3 {
            let got = space.count_balls_within(&centre, d);
            let closed = beta_closed_form(p as u64, d)?;
            c.push(
                format!("balls-within p={p} d={d} expect {closed}"),
                "enumerated balls within distance d of an interior ball equal the closed form",
                closed.to_string(),
                got.count.to_string(),
                !got.boundary && got.count == closed,
            );
        }
    }
    let space = UltrametricSpace::full(2, 4)?;
    let mut worst = (0usize, 0usize);
    let mut ok = true;
    for size in 1..=6 {
        for_each_subset(space.len(), size, |idx| {
            let subset: Vec<u64> = idx.iter().map(|&i| space.elements()[i]).collect();
            let count = space.special_ball_count(&subset).unwrap_or(usize::MAX);
            if count + 1 > size {
                ok = false;
            }
            if count > worst.0 {
                worst = (count, size);
            }
        });
    }
    c.push(
        "special-balls p=2 D=4 |A|<=6".into(),
        "special balls of A number at most |A| - 1",
        "count <= |A| - 1".into(),
        format!("largest count {} at |A|={}", worst.0, worst.1),
        ok,
    );
    for (p, depth) in [(2u32, 4u32), (3, 3)] {
        let space = UltrametricSpace::full(p, depth)?;
        let family = space.ball_family_system(&space.all_balls())?;
        c.attempt(
            format!("ball-breadth p={p} D={depth}"),
            "the family of all balls is directed",
            "breadth 1".into(),
            || {
                let br = family.breadth(budget)?;
                Ok((format!("breadth {br}"), br == 1))
            },
        )?;
    }
    Ok(())
}

fn rooted(c: &mut Cases, rng: &mut ChaCha8Rng, budget: Budget) -> Result<()> {
    for t in 1..=8 {
        for k in 1..=3.min(t) {
            let mut members = Vec::new();
            for_each_subset(t, k, |idx| members.push(BitSet::from_indices(t, idx.iter().copied()).expect("in range")));
            let g = rooted_graph_of(&SetSystem::new(t, members)?)?;
            c.attempt(
                format!("uniform-degree t={t} k={k}"),
                "all k-subsets of a t-set give average and maximum average degree 2k",
                format!("adeg = mdeg = {}", 2 * k),
                || {
                    let (adeg, mdeg) = (g.average_degree(), g.max_average_degree(budget)?);
                    let want = Rational::from_integer(2 * k as i64);
                    Ok((format!("adeg {adeg}, mdeg {mdeg}"), adeg == want && mdeg == want))
                },
            )?;
        }
    }
    for i in 0..20 {
        let s = random_system(rng, 7, 10);
        let g = rooted_graph_of(&s)?;
        c.attempt(
            format!("figure-mdeg system={i}"),
            "maximum average degree of the membership graph matches the member-size formula",
            "graph == formula".into(),
            || {
                let (graph, formula) = (g.max_average_degree(budget)?, system_mdeg(&s)?);
                Ok((format!("{graph} vs {formula}"), graph == formula))
            },
        )?;
    }
    Ok(())
}

fn hypercube(c: &mut Cases, budget: Budget) -> Result<()> {
    for d in 1..=8 {
        let q = hypercube_edges(d)?;
        let want = d * (1 << (d - 1));
        c.push(
            format!("hypercube-edges d={d} expect {want}"),
            "edge count d*2^(d-1)",
            want.to_string(),
            q.edges.len().to_string(),
            q.edges.len() == want,
        );
    }
    for d in 2..=4 {
        let q = hypercube_edges(d)?;
        c.attempt(
            format!("hypercube-induced d={d} t=4"),
            "most edges induced by 4 vertices",
            "4".into(),
            || {
                let m = q.max_induced_edges(4, budget)?;
                Ok((m.to_string(), m == 4))
            },
        )?;
    }
    Ok(())
}
