use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use vclab_core::combinatorics::DEFAULT_BUDGET;
use vclab_core::estimator::{fit_report, ShatterProfile};
use vclab_core::{BiRelation, Budget, Counted, Error, FamilySpec, SetSystem};

mod verify;

use verify::Suite;

#[derive(Parser)]
#[command(name = "vclab", version, about = "Exact VC-theoretic invariants of finite set systems")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Subset evaluations an exact enumeration may perform.
    #[arg(long, global = true, env = "VCLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family and write it as JSON.
    Gen(GenArgs),
    /// VC dimension, independence dimension, breadth and Helly number of a family.
    Invariants {
        input: PathBuf,
        /// Largest member count for which the Helly number is computed.
        #[arg(long, default_value_t = 24)]
        helly_cap: usize,
    },
    /// Shatter function profile as CSV.
    Shatter(ProfileArgs),
    /// Dual shatter function profile as CSV.
    DualShatter(ProfileArgs),
    /// Run a named verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        json: bool,
    },
    /// Fit a growth exponent to a profile CSV.
    Fit {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        t_min: usize,
        /// Fit even when some samples are not exact.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Subsets,
    Intervals,
    Convex,
    Halfspaces,
    Cosets,
    Subgroups,
    ArithmeticProgressions,
    PointlineFq,
    ElekesGrid,
    HypercubeEdges,
    PhiHat,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Size bound for subsets, dimension for hypercube-edges.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    /// Explicit points for halfspaces, e.g. "0,0;1,2;3/2,5".
    #[arg(long)]
    point_list: Option<String>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    divisors: Option<Vec<usize>>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    max_modulus: Option<usize>,
    #[arg(long)]
    open: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sample,
}

#[derive(Args)]
struct ProfileArgs {
    input: PathBuf,
    /// Range of t, as `a..b` (inclusive) or a single value.
    #[arg(long)]
    t: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Random subsets per t in sample mode.
    #[arg(long, default_value_t = 2000)]
    samples: u64,
    /// Exit non-zero when a row is dropped for exceeding the budget.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure categories mapped to exit codes.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget(cli.budget);
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Invariants { input, helly_cap } => invariants(&input, helly_cap, budget),
        Command::Shatter(args) => profile(args, false, budget, cli.seed),
        Command::DualShatter(args) => profile(args, true, budget, cli.seed),
        Command::Verify { suite, json } => run_suite(suite, json, budget, cli.seed),
        Command::Fit { input, t_min, force } => fit(&input, t_min, force),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this family")))
}

fn family_spec(a: &GenArgs) -> Result<FamilySpec, Failure> {
    Ok(match a.family {
        Family::Subsets => FamilySpec::Subsets { n: need(a.n, "n")?, d: need(a.d, "d")? },
        Family::Intervals => FamilySpec::Intervals {
            points: need(a.points, "points")?,
            k: need(a.k, "k")? as usize,
        },
        Family::Convex => FamilySpec::Convex { points: need(a.points, "points")? },
        Family::Halfspaces => {
            let points = match (&a.point_list, a.points) {
                (Some(list), _) => list
                    .split(';')
                    .map(|p| {
                        p.split_once(',')
                            .map(|(x, y)| (x.trim().to_string(), y.trim().to_string()))
                            .ok_or_else(|| Failure::Usage(format!("point {p:?} is not x,y")))
                    })
                    .collect::<Result<_, _>>()?,
                (None, Some(n)) => (0..n as i64).map(|i| (i.to_string(), (i * i).to_string())).collect(),
                (None, None) => return Err(Failure::Usage("--points or --point-list is required".into())),
            };
            FamilySpec::Halfspaces { points, closed: !a.open }
        }
        Family::Cosets => FamilySpec::Cosets {
            n: need(a.n, "n")?,
            divisors: a.divisors.clone().ok_or_else(|| Failure::Usage("--divisors is required".into()))?,
        },
        Family::Subgroups => FamilySpec::Subgroups {
            n: need(a.n, "n")?,
            divisors: a.divisors.clone().ok_or_else(|| Failure::Usage("--divisors is required".into()))?,
        },
        Family::ArithmeticProgressions => FamilySpec::ArithmeticProgressions {
            window: need(a.window, "window")?,
            max_modulus: need(a.max_modulus, "max-modulus")?,
        },
        Family::PointlineFq => FamilySpec::PointlineFq { q: need(a.q, "q")? },
        Family::ElekesGrid => FamilySpec::ElekesGrid { k: need(a.k, "k")? },
        Family::HypercubeEdges => FamilySpec::HypercubeEdges { d: need(a.d, "d")? },
        Family::PhiHat => FamilySpec::PhiHat { q: need(a.q, "q")? },
    })
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn gen(args: GenArgs) -> CmdResult {
    let generated = family_spec(&args)?.build()?;
    let mut text = generated.to_json();
    text.push('\n');
    emit(&text, args.out.as_deref())
}

/// A loaded input file: a set system or a relation.
enum Input {
    System(SetSystem),
    Relation(BiRelation),
}

impl Input {
    fn system(&self) -> SetSystem {
        match self {
            Input::System(s) => s.clone(),
            Input::Relation(r) => r.system_of(),
        }
    }
}

fn load(path: &Path) -> Result<Input, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if value.get("rows").is_some() {
        Ok(Input::Relation(BiRelation::from_json(&text)?))
    } else {
        Ok(Input::System(SetSystem::from_json(&text)?))
    }
}

fn field<T: serde::Serialize>(r: vclab_core::Result<T>) -> Result<Value, Failure> {
    match r {
        Ok(v) => Ok(json!({"value": v, "status": "exact"})),
        Err(Error::BudgetExceeded { lower_bound, .. }) => {
            Ok(json!({"value": Value::Null, "status": "skipped", "lower_bound": lower_bound}))
        }
        Err(e) => Err(e.into()),
    }
}

fn invariants(input: &Path, helly_cap: usize, budget: Budget) -> CmdResult {
    let s = load(input)?.system();
    let helly = if s.len() <= helly_cap {
        field(s.helly_number(budget))?
    } else {
        json!({"value": Value::Null, "status": "skipped", "reason": format!("more than {helly_cap} members")})
    };
    let report = json!({
        "member_count": s.len(),
        "ground_size": s.ground_size(),
        "vc_dim": field(s.vc_dimension(budget))?,
        "ind_dim": field(s.independence_dimension(budget))?,
        "breadth": field(s.breadth(budget))?,
        "helly": helly,
    });
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json")), None)
}

fn parse_range(spec: Option<&str>, max: usize) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("bad --t range {spec:?}"));
    let (lo, hi) = match spec {
        None => (1.min(max), max),
        Some(s) => match s.split_once("..") {
            Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None => {
                let t = s.parse().map_err(|_| bad())?;
                (t, t)
            }
        },
    };
    if lo > hi || hi > max {
        return Err(Failure::Usage(format!("--t range {lo}..{hi} must lie within 0..{max}")));
    }
    Ok((lo, hi))
}

fn profile(args: ProfileArgs, dual: bool, budget: Budget, seed: u64) -> CmdResult {
    let input = load(&args.input)?;
    let system = input.system();
    let max = if dual { system.len() } else { system.ground_size() };
    let (lo, hi) = parse_range(args.t.as_deref(), max)?;
    let mut rows: Vec<(usize, Counted)> = Vec::new();
    let mut dropped = Vec::new();
    for t in lo..=hi {
        let counted = match args.mode {
            Mode::Exact => {
                if dual {
                    match &input {
                        Input::Relation(r) => r.dual_shatter(t, budget),
                        Input::System(s) => s.dual_shatter(t, budget),
                    }
                } else {
                    system.shatter_function(t, budget)
                }
            }
            Mode::Sample => {
                let target = if dual { system.dual() } else { system.clone() };
                target.shatter_sampled(t, args.samples, seed.wrapping_add(t as u64))
            }
        };
        match counted {
            Ok(c) => rows.push((t, c)),
            Err(Error::BudgetExceeded { .. }) => {
                eprintln!("warning: t={t} exceeds the budget of {}; row omitted", budget.0);
                dropped.push(t);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let source = args.input.display().to_string();
    let csv = if rows.is_empty() {
        "t,value,exact\n".to_string()
    } else {
        ShatterProfile::from_counts(&rows, source)?.to_csv()
    };
    emit(&csv, args.out.as_deref())?;
    if args.strict && !dropped.is_empty() {
        return Err(Failure::Check(format!("{} rows omitted for budget", dropped.len())));
    }
    Ok(())
}

fn fit(input: &Path, t_min: usize, force: bool) -> CmdResult {
    let text = fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let profile = ShatterProfile::from_csv(&text, input.display().to_string())?;
    let report = fit_report(&profile, t_min, force)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json")), None)
}

fn run_suite(suite: Suite, as_json: bool, budget: Budget, seed: u64) -> CmdResult {
    let cases = verify::run(suite, budget, seed)?;
    if as_json {
        emit(&format!("{}\n", serde_json::to_string_pretty(&cases).expect("json")), None)?;
    } else {
        let mut text = String::new();
        for c in &cases {
            text.push_str(&format!(
                "{:<7} {}  expected {}  observed {}\n",
                c.status.label(),
                c.name,
                c.expected,
                c.observed
            ));
        }
        emit(&text, None)?;
    }
    let failed = cases.iter().filter(|c| c.status == verify::Status::Fail).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} cases failed", cases.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert!(matches!(parse_range(Some("2..5"), 6), Ok((2, 5))));
        assert!(matches!(parse_range(Some("3"), 6), Ok((3, 3))));
        assert!(matches!(parse_range(None, 4), Ok((1, 4))));
        assert!(matches!(parse_range(None, 0), Ok((0, 0))));
        assert!(parse_range(Some("5..2"), 6).is_err());
        assert!(parse_range(Some("1..7"), 6).is_err());
        assert!(parse_range(Some("a..b"), 6).is_err());
    }
}
