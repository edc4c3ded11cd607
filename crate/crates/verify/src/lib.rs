//! The acceptance criteria as runnable checks. Each check returns a one-line
//! detail string, `Ok` on pass and `Err` on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vclab_core::bits::BitSet;
use vclab_core::combinatorics::{binomial_prefix_sum, for_each_subset, pow2};
use vclab_core::estimator::{classify_growth, fit_exponent, Growth, Sample, ShatterProfile, R2_THRESHOLD};
use vclab_core::generators::{
    divisors, elekes_grid, halfspaces, hypercube_edges, intervals, moment_curve, phi_hat_sandwich, pointline_fq,
    subgroups_zn,
};
use vclab_core::rooted::{rooted_graph_of, system_mdeg, Rational};
use vclab_core::ultrametric::{beta_closed_form, UltrametricSpace};
use vclab_core::{lift_parameter, shelah_encode, BiRelation, Budget, FormulaSet, SetSystem, TracePattern};

pub type Outcome = Result<String, String>;
pub type Check = fn() -> Outcome;

fn b() -> Budget {
    Budget::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_system(r: &mut ChaCha8Rng, max_n: usize, max_members: usize) -> SetSystem {
    let n = r.gen_range(1..=max_n);
    let m = r.gen_range(0..=max_members);
    let density: f64 = r.gen_range(0.2..0.8);
    let members = (0..m)
        .map(|_| BitSet::from_indices(n, (0..n).filter(|_| r.gen_bool(density))).unwrap())
        .collect();
    SetSystem::new(n, members).unwrap()
}

fn random_relation(r: &mut ChaCha8Rng, x: usize, y: usize) -> BiRelation {
    let density: f64 = r.gen_range(0.2..0.8);
    BiRelation::from_fn(x, y, |_, _| r.gen_bool(density))
}

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn interval_counts() -> Outcome {
    let mut bad = Vec::new();
    for n in 4..=12 {
        let s = intervals(n, 1).unwrap();
        let got = s.shatter_function(n, b()).unwrap().value;
        let want = binomial_prefix_sum(n as u64, 2).unwrap();
        if got != want {
            bad.push(format!("n={n}: {got} != {want}"));
        }
    }
    for k in 1..=2 {
        let vc = intervals(10, k).unwrap().vc_dimension(b()).unwrap();
        if vc != 2 * k as i64 {
            bad.push(format!("k={k}: vc {vc}"));
        }
    }
    check(bad.is_empty(), "n=4..12 counts and vc 2,4 exact".into(), bad.join("; "))
}

fn halfplane_counts() -> Outcome {
    let s = halfspaces(&moment_curve(7), true).unwrap();
    let traces = s.shatter_function(7, b()).unwrap().value;
    let vcs: Vec<i64> = (5..=8)
        .map(|n| halfspaces(&moment_curve(n), true).unwrap().vc_dimension(b()).unwrap())
        .collect();
    check(
        traces == 44 && vcs.iter().all(|&v| v == 3),
        format!("44 traces on 7 points, vc {vcs:?} on 5..8 points"),
        format!("{traces} traces, vc {vcs:?}"),
    )
}

fn sauer_shelah() -> Outcome {
    let mut r = rng(0x5a0e);
    let mut violations = 0;
    for _ in 0..100 {
        let s = random_system(&mut r, 12, 40);
        let vc = s.vc_dimension(b()).unwrap();
        for t in 0..=s.ground_size() {
            let v = s.shatter_function(t, b()).unwrap().value;
            let bound = if vc < 0 { 0 } else { binomial_prefix_sum(t as u64, vc as u64).unwrap() };
            if v > bound {
                violations += 1;
            }
        }
    }
    check(violations == 0, "100 systems, 0 violations".into(), format!("{violations} violations"))
}

fn duality() -> Outcome {
    let mut r = rng(0xd0a1);
    let mut bad = 0;
    for _ in 0..50 {
        let (x, y) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let phi = random_relation(&mut r, x, y);
        let dual = phi.dualize();
        for t in 0..=x {
            if phi.shatter(t, b()).unwrap().value != dual.dual_shatter(t, b()).unwrap().value {
                bad += 1;
            }
        }
        let vc = phi.system_of().vc_dimension(b()).unwrap();
        let vc_dual = dual.system_of().vc_dimension(b()).unwrap();
        if vc >= 1i64 << (1 + vc_dual) {
            bad += 1;
        }
    }
    check(bad == 0, "50 relations, shatter/dual-shatter equal and vc bound holds".into(), format!("{bad} mismatches"))
}

fn breadth_ind() -> Outcome {
    let mut r = rng(0xb4ead);
    let mut random_bad = 0;
    for _ in 0..50 {
        let s = random_system(&mut r, 8, 12);
        if s.breadth(b()).unwrap() < s.independence_dimension(b()).unwrap() {
            random_bad += 1;
        }
    }
    let mut families = 0;
    let mut unequal = Vec::new();
    let mut whole_group_only = 0;
    for n in 1..=24 {
        let divs = divisors(n);
        for mask in 1u64..(1 << divs.len()) {
            let chosen: Vec<usize> = (0..divs.len()).filter(|i| mask >> i & 1 == 1).map(|i| divs[i]).collect();
            let s = subgroups_zn(n, &chosen).unwrap();
            let (br, ind) = (s.breadth(b()).unwrap(), s.independence_dimension(b()).unwrap());
            families += 1;
            if br != ind {
                if chosen == [1] {
                    whole_group_only += 1;
                }
                unequal.push(format!("n={n} divisors {chosen:?}: breadth {br}, IND {ind}"));
            }
        }
    }
    let shown: Vec<&String> = unequal.iter().take(3).collect();
    check(
        random_bad == 0 && unequal.is_empty(),
        format!("50 random systems; breadth == IND on all {families} subgroup families"),
        format!(
            "{random_bad} random violations; {} of {families} subgroup families unequal \
             ({whole_group_only} of them the family {{G}} alone), e.g. {shown:?}",
            unequal.len()
        ),
    )
}

fn costar_observations() -> Outcome {
    let mut r = rng(0xc057);
    let mut bad = 0;
    for _ in 0..30 {
        let s = random_system(&mut r, 8, 12);
        let breadth = s.breadth(b()).unwrap();
        for k in 2..=6 {
            let present = |size| s.contains_trace(TracePattern::costar(size).unwrap(), b()).unwrap().is_some();
            if present(k + 1) && breadth < k {
                bad += 1;
            }
            if breadth >= k && !present(k) {
                bad += 1;
            }
        }
    }
    check(bad == 0, "30 systems, both implications hold".into(), format!("{bad} violations"))
}

fn coding_injection() -> Outcome {
    let mut r = rng(0xc0de);
    let mut bad = Vec::new();
    for i in 0..20 {
        let d = 1 + i % 2;
        let (x, y) = (r.gen_range(2..=8), r.gen_range(3..=8));
        let rels = (0..d).map(|_| random_relation(&mut r, x, y)).collect();
        let delta = FormulaSet::new(rels).unwrap();
        let mut params: Vec<usize> = (0..y).collect();
        for j in 0..3 {
            let k = r.gen_range(j..y);
            params.swap(j, k);
        }
        let chosen = &params[..3];
        let code = shelah_encode(&delta);
        let coded = code.build_parameters(chosen).unwrap();
        let (types, coded_types) = code.verify_injection(chosen).unwrap();
        if types > coded_types || coded.tuples.len() != 2 * d * 3 {
            bad.push(format!("d={d}: {types} > {coded_types} or |B'|={}", coded.tuples.len()));
        }
    }
    check(bad.is_empty(), "20 formula sets, coded type count dominates".into(), bad.join("; "))
}

fn parameter_lift() -> Outcome {
    let mut r = rng(0x11f7);
    let mut bad = Vec::new();
    for _ in 0..10 {
        let (x, y) = (r.gen_range(3..=6), r.gen_range(1..=6));
        let phi = random_relation(&mut r, x, y);
        let psi = lift_parameter(&phi, 4, 0).unwrap().materialize();
        let base = phi.shatter(3, b()).unwrap().value;
        let lifted = psi.shatter(6, b()).unwrap().value;
        if 3 * base > lifted {
            bad.push(format!("3*{base} > {lifted}"));
        }
    }
    check(bad.is_empty(), "10 relations, t*pi(t) <= pi(2t) at t=3".into(), bad.join("; "))
}

fn incidences() -> Outcome {
    let mut bad = Vec::new();
    for q in [3u64, 5, 7] {
        let rel = pointline_fq(q).unwrap();
        if rel.edge_count() as u64 != q * q * q {
            bad.push(format!("q={q}: {} incidences", rel.edge_count()));
        }
        if rel.detect_krs(2, 2, b()).unwrap().is_some() {
            bad.push(format!("q={q}: K_2,2 found"));
        }
    }
    for k in 1..=3u64 {
        let g = elekes_grid(k).unwrap();
        let inc = g.incidence.edge_count() as u64;
        let v = g.vertex_count() as f64;
        let quarter = 0.25 * v.powf(4.0 / 3.0);
        if inc != 4 * k.pow(4) || quarter.round() as u64 != inc || (quarter - inc as f64).abs() > 1e-6 * quarter {
            bad.push(format!("k={k}: {inc} incidences, quarter power {quarter}"));
        }
    }
    check(bad.is_empty(), "q^3 incidences, no K_2,2; Elekes 4k^4".into(), bad.join("; "))
}

fn phi_hat() -> Outcome {
    let mut r = rng(0xf1a7);
    let (mut lower_fail, mut upper_fail, mut total) = (0, 0, 0);
    let mut example = None;
    for _ in 0..20 {
        let n = r.gen_range(3..=8);
        let rel = random_relation(&mut r, n, n);
        for _ in 0..5 {
            let a = BitSet::from_indices(n, (0..n).filter(|_| r.gen_bool(0.5))).unwrap();
            let rep = phi_hat_sandwich(&rel, &a).unwrap();
            total += 1;
            if !rep.lower_holds {
                lower_fail += 1;
            }
            if !rep.upper_holds {
                upper_fail += 1;
                example.get_or_insert(format!(
                    "|A|={} traces {} > 1+{}+{}",
                    a.count(),
                    rep.trace_count,
                    rep.a0,
                    rep.induced_edges
                ));
            }
        }
    }
    check(
        lower_fail == 0 && upper_fail == 0,
        format!("{total} cases, both bounds hold"),
        format!(
            "{total} cases: lower bound fails {lower_fail}, upper bound fails {upper_fail} (e.g. {})",
            example.unwrap_or_default()
        ),
    )
}

fn hypercube() -> Outcome {
    let mut bad = Vec::new();
    for d in 1..=8 {
        let q = hypercube_edges(d).unwrap();
        if q.edges.len() != d * (1 << (d - 1)) {
            bad.push(format!("d={d}: {} edges", q.edges.len()));
        }
    }
    for d in 2..=4 {
        let m = hypercube_edges(d).unwrap().max_induced_edges(4, b()).unwrap();
        if m != 4 {
            bad.push(format!("d={d}: max induced {m}"));
        }
    }
    check(bad.is_empty(), "d*2^(d-1) edges, 4 induced edges on 4 vertices".into(), bad.join("; "))
}

fn ball_counts() -> Outcome {
    let mut bad = Vec::new();
    for p in [2u32, 3] {
        let space = UltrametricSpace::full(p, 6).unwrap();
        let centre = space.ball(0, 3).unwrap();
        for d in 0..=3 {
            let got = space.count_balls_within(&centre, d);
            let want = beta_closed_form(p as u64, d).unwrap();
            if got.boundary || got.count != want {
                bad.push(format!("p={p} d={d}: {} != {want}", got.count));
            }
        }
    }
    let space = UltrametricSpace::full(2, 4).unwrap();
    let mut special_bad = 0;
    for size in 1..=6 {
        for_each_subset(space.len(), size, |idx| {
            let subset: Vec<u64> = idx.iter().map(|&i| space.elements()[i]).collect();
            if space.special_ball_count(&subset).unwrap() + 1 > size {
                special_bad += 1;
            }
        });
    }
    if special_bad > 0 {
        bad.push(format!("{special_bad} subsets exceed |A|-1 special balls"));
    }
    let mut r = rng(0xba11);
    for (p, depth) in [(2u32, 4u32), (3, 3)] {
        let space = UltrametricSpace::full(p, depth).unwrap();
        let balls = space.all_balls();
        for _ in 0..20 {
            let pick: Vec<_> = balls.iter().filter(|_| r.gen_bool(0.3)).cloned().collect();
            if pick.is_empty() {
                continue;
            }
            let br = space.ball_family_system(&pick).unwrap().breadth(b()).unwrap();
            if br != 1 {
                bad.push(format!("p={p} family breadth {br}"));
            }
        }
        let br = space.ball_family_system(&balls).unwrap().breadth(b()).unwrap();
        if br != 1 {
            bad.push(format!("p={p} all balls breadth {br}"));
        }
    }
    check(bad.is_empty(), "beta_d, special balls, breadth 1".into(), bad.join("; "))
}

fn rooted_graphs() -> Outcome {
    let mut bad = Vec::new();
    for t in 1..=8 {
        for k in 1..=3.min(t) {
            let mut members = Vec::new();
            for_each_subset(t, k, |idx| members.push(BitSet::from_indices(t, idx.iter().copied()).unwrap()));
            let g = rooted_graph_of(&SetSystem::new(t, members).unwrap()).unwrap();
            let two_k = Rational::from_integer(2 * k as i64);
            let (adeg, mdeg) = (g.average_degree(), g.max_average_degree(b()).unwrap());
            if adeg != two_k || mdeg != two_k {
                bad.push(format!("t={t} k={k}: adeg {adeg}, mdeg {mdeg}"));
            }
        }
    }
    let mut r = rng(0x2007);
    let mut seen = 0;
    while seen < 20 {
        let s = random_system(&mut r, 7, 10);
        if s.is_empty() {
            continue;
        }
        seen += 1;
        let g = rooted_graph_of(&s).unwrap();
        let (graph, formula) = (g.max_average_degree(b()).unwrap(), system_mdeg(&s).unwrap());
        if graph != formula {
            bad.push(format!("graph {graph} vs formula {formula}"));
        }
    }
    check(bad.is_empty(), "adeg == mdeg == 2k; 20 systems match".into(), bad.join("; "))
}

fn estimator() -> Outcome {
    let mut bad = Vec::new();
    let mut slopes = Vec::new();
    let samples = (4..=12)
        .map(|t| Sample { t, value: binomial_prefix_sum(t as u64, 2).unwrap(), exact: true })
        .collect();
    let profile = ShatterProfile::new(samples, "prefix sums").unwrap();
    let fit = fit_exponent(&profile, 4, false).unwrap();
    slopes.push(fit.slope);
    if !(1.6..=2.0).contains(&fit.slope) {
        bad.push(format!("slope {}", fit.slope));
    }
    let interval_profile = ShatterProfile::from_counts(
        &(4..=12)
            .map(|t| (t, intervals(12, 1).unwrap().shatter_function(t, b()).unwrap()))
            .collect::<Vec<_>>(),
        "intervals",
    )
    .unwrap();
    let slope = fit_exponent(&interval_profile, 4, false).unwrap().slope;
    slopes.push(slope);
    if !(1.6..=2.0).contains(&slope) {
        bad.push(format!("interval slope {slope}"));
    }
    let power = ShatterProfile::new(
        (1..=12).map(|t| Sample { t, value: pow2(t), exact: true }).collect(),
        "power set",
    )
    .unwrap();
    let growth = classify_growth(&power, R2_THRESHOLD);
    if growth != Growth::ExponentialSoFar {
        bad.push(format!("power set classified {}", growth.label()));
    }
    check(
        bad.is_empty(),
        format!("slopes {slopes:.4?}, power set exponential_so_far"),
        bad.join("; "),
    )
}

pub const CRITERIA: [(&str, Check); 14] = [
    ("interval family counts", interval_counts),
    ("half-plane counts", halfplane_counts),
    ("Sauer-Shelah bound", sauer_shelah),
    ("primal/dual shatter", duality),
    ("breadth vs independence", breadth_ind),
    ("costar observations", costar_observations),
    ("coding injection", coding_injection),
    ("parameter lift", parameter_lift),
    ("incidence counts", incidences),
    ("phi-hat sandwich", phi_hat),
    ("hypercube", hypercube),
    ("ball counts", ball_counts),
    ("rooted graphs", rooted_graphs),
    ("estimator sanity", estimator),
];

/// Runs one check, turning a panic into a failure.
pub fn run(check: Check) -> Outcome {
    catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}
