//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a certification finds violations, 2 on
//! usage or precondition errors.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_approx_core::bounds::{distance_bound_reports, tail_envelope_reports, BoundReport};
use poisson_approx_core::config::{linspace, GridConfig, PROB_ABS_TOL};
use poisson_approx_core::hypo_tests::{
    design_left, design_right, design_two_sided, p_value_right, TestDesign,
};
use poisson_approx_core::lambda_opt::{unimodality, OptimalLambda};
use poisson_approx_core::monotonicity::{
    corollary1_sequence, corollary2_sequence, find_mlr_violation, mlr_sign_report, theorem1_cases,
    theorem2_constant, theorem2_sequence, theorem2_stochastic_order, MonotonicityReport,
    Theorem1Part,
};
use poisson_approx_core::{BinomialParams, DistanceReport, Error, PoissonParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{Cell, OutputEnvelope, Table};
use crate::parallel::{self, THREADS_ENV};

/// Default seed of the random tail-ordering sweeps.
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Parser)]
#[command(
    name = "poisson-approx",
    version,
    about = "Exact binomial/Poisson probabilities, distances, bounds, monotonicity certificates and conservative tests"
)]
pub struct Cli {
    /// Worker threads for sweeps (default: machine parallelism).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Output format (default: csv for `power`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mass, CDF and upper tail of a binomial (`--n --p`) or Poisson (`--lambda`) law.
    Dist(DistArgs),
    /// Total-variation and Kolmogorov distance between X(n,p) and Π(λ).
    Distance(DistanceArgs),
    /// Optimal Poisson rate for Bernoulli(p), over the default p grid if `--p` is absent.
    OptimalLambda(OptimalLambdaArgs),
    /// Explicit distance bounds next to the exact distances.
    Bounds(BoundsArgs),
    /// Numerically certify a monotonicity claim.
    Verify(VerifyArgs),
    /// Design a conservative test with a Poisson-tail level.
    TestDesign(TestDesignArgs),
    /// Conservative right-tail p-value.
    PValue(PValueArgs),
    /// Rejection probability of a design over a p grid.
    Power(PowerArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Last k listed for a Poisson law (default: where the tail drops below 1e-16).
    #[arg(long)]
    pub k_max: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    /// Poisson rate (default: n p).
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimalLambdaArgs {
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    /// Rate for the triangle bound.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Also report the event envelope for every tail {X >= m}.
    #[arg(long)]
    pub tails: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClaimArg {
    #[value(name = "T1i")]
    T1i,
    #[value(name = "T1ii")]
    T1ii,
    #[value(name = "C1")]
    C1,
    #[value(name = "C2")]
    C2,
    #[value(name = "T2")]
    T2,
    #[value(name = "MLR")]
    Mlr,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub claim: ClaimArg,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub m1: Option<u64>,
    #[arg(long)]
    pub m2: Option<u64>,
    /// Largest n (default: 100 for T1i/T1ii, 200 for sequences, 10000 for MLR).
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of sampled tuples for T1i/T1ii.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    /// MLR: λ = c n.
    #[arg(long)]
    pub c: Option<f64>,
    /// MLR: k = floor(a n).
    #[arg(long)]
    pub a: Option<f64>,
    /// MLR: first n searched.
    #[arg(long, default_value_t = 5)]
    pub n_start: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Right,
    Left,
    TwoSided,
}

#[derive(Debug, Args)]
pub struct TestDesignArgs {
    #[arg(long, value_enum)]
    pub direction: DirectionArg,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p0: f64,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct PValueArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p0: f64,
    #[arg(long)]
    pub x: u64,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Design as JSON text, or a path to a JSON file; either a bare design or
    /// the output of `test-design`.
    #[arg(long)]
    pub design: String,
    #[arg(long, default_value_t = 0.01)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub p_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 99)]
    pub steps: usize,
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Precondition(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

/// A rendered result and whether its certification passed.
struct Rendered {
    json: OutputEnvelope,
    table: Table,
    certified: bool,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                RunOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                RunOutput {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Power(_) => Format::Csv,
        _ => Format::Json,
    });
    let threads = cli.threads;
    match parallel::with_threads(threads, move || execute(&cli.command)) {
        Ok(r) => RunOutput {
            code: if r.certified { 0 } else { 1 },
            stdout: match format {
                Format::Json => r.json.to_json(),
                Format::Csv => r.table.to_csv(),
            },
            stderr: if r.certified {
                String::new()
            } else {
                "certification failed\n".to_owned()
            },
        },
        Err(e) => RunOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn inputs<const N: usize>(pairs: [(&str, Value); N]) -> BTreeMap<String, Value> {
    pairs
        .into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| (k.to_owned(), v))
        .collect()
}

fn execute(command: &Command) -> Result<Rendered, Failure> {
    match command {
        Command::Dist(a) => dist(a),
        Command::Distance(a) => distance(a),
        Command::OptimalLambda(a) => optimal_lambda(a),
        Command::Bounds(a) => bounds(a),
        Command::Verify(a) => verify(a),
        Command::TestDesign(a) => test_design(a),
        Command::PValue(a) => p_value(a),
        Command::Power(a) => power(a),
    }
}

fn dist(a: &DistArgs) -> Result<Rendered, Failure> {
    #[derive(Serialize)]
    struct Row {
        k: u64,
        pmf: f64,
        cdf: f64,
        sf: f64,
    }
    let (law, rows): (&str, Vec<Row>) = match (a.n, a.p, a.lambda) {
        (Some(n), Some(p), None) => {
            let b = BinomialParams::new(n, p)?;
            let rows = (0..=n)
                .map(|k| Row {
                    k,
                    pmf: b.pmf(k),
                    cdf: b.cdf(k as i64),
                    sf: b.sf(k as i64),
                })
                .collect();
            ("binomial", rows)
        }
        (None, None, Some(l)) => {
            let q = PoissonParams::new(l)?;
            let k_max = a
                .k_max
                .unwrap_or_else(|| (0..).find(|&k| q.sf(k as i64 + 1) < 1e-16).unwrap_or(0));
            let rows = (0..=k_max)
                .map(|k| Row {
                    k,
                    pmf: q.pmf(k),
                    cdf: q.cdf(k as i64),
                    sf: q.sf(k as i64),
                })
                .collect();
            ("poisson", rows)
        }
        _ => {
            return Err(Failure::Usage(
                "give either --n and --p, or --lambda".into(),
            ))
        }
    };
    let mut table = Table::new(&["k", "pmf", "cdf", "sf"]);
    for r in &rows {
        table.push(vec![r.k.into(), r.pmf.into(), r.cdf.into(), r.sf.into()]);
    }
    let ins = inputs([
        ("law", json!(law)),
        ("n", json!(a.n)),
        ("p", json!(a.p)),
        ("lambda", json!(a.lambda)),
        ("k_max", json!(a.k_max)),
    ]);
    Ok(Rendered {
        json: OutputEnvelope::new("dist", ins, json!({ "law": law, "rows": to_value(&rows) })),
        table,
        certified: true,
    })
}

fn distance(a: &DistanceArgs) -> Result<Rendered, Failure> {
    let b = BinomialParams::new(a.n, a.p)?;
    let lambda = a.lambda.unwrap_or(b.mean());
    let r = DistanceReport::new(b, PoissonParams::new(lambda)?);
    let mut table = Table::new(&["n", "p", "lambda", "tv", "kolmogorov"]);
    table.push(vec![
        a.n.into(),
        a.p.into(),
        lambda.into(),
        r.tv.into(),
        r.kolmogorov.into(),
    ]);
    let ins = inputs([
        ("n", json!(a.n)),
        ("p", json!(a.p)),
        ("lambda", json!(lambda)),
    ]);
    let results = json!({ "tv": r.tv, "kolmogorov": r.kolmogorov });
    Ok(Rendered {
        json: OutputEnvelope::new("distance", ins, results),
        table,
        certified: true,
    })
}

fn optimal_lambda(a: &OptimalLambdaArgs) -> Result<Rendered, Failure> {
    let grid = GridConfig::default();
    let ps = match a.p {
        Some(p) => vec![p],
        None => grid.p_grid(),
    };
    let lambdas = grid.lambda_grid();
    #[derive(Serialize)]
    struct Entry {
        #[serde(flatten)]
        opt: OptimalLambda,
        profile_unimodal: bool,
    }
    let entries = parallel::par_map(&ps, |&p| -> Result<Entry, Error> {
        Ok(Entry {
            opt: OptimalLambda::new(p)?,
            profile_unimodal: unimodality(p, &lambdas)?.certified(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "p",
        "lambda_circ",
        "lambda_star",
        "min_tv",
        "delta_p",
        "lambda1",
        "lambda2",
        "lambda3",
        "profile_unimodal",
    ]);
    for e in &entries {
        let o = &e.opt;
        table.push(vec![
            o.p.into(),
            o.lambda_circ.into(),
            o.lambda_star.into(),
            o.min_tv.into(),
            o.delta_p.into(),
            o.breakpoints.lambda1.into(),
            o.breakpoints.lambda2.into(),
            o.breakpoints.lambda3.into(),
            Cell::Text(e.profile_unimodal.to_string()),
        ]);
    }
    let certified = entries.iter().all(|e| e.profile_unimodal);
    let ins = inputs([
        ("p", json!(a.p)),
        ("lambda_min", json!(grid.lambda_min)),
        ("lambda_max", json!(grid.lambda_max)),
        ("lambda_points", json!(grid.lambda_points)),
    ]);
    Ok(Rendered {
        json: OutputEnvelope::new("optimal-lambda", ins, to_value(&entries)),
        table,
        certified,
    })
}

fn bound_table(reports: &[BoundReport]) -> Table {
    let mut table = Table::new(&[
        "bound_name",
        "bound_value",
        "exact_value",
        "slack",
        "lambda",
        "event_min",
    ]);
    for r in reports {
        table.push(vec![
            r.bound_name.name().into(),
            r.bound_value.into(),
            r.exact_value.into(),
            r.slack.into(),
            r.lambda.into(),
            r.event_min.into(),
        ]);
    }
    table
}

fn bounds(a: &BoundsArgs) -> Result<Rendered, Failure> {
    let mut reports = distance_bound_reports(a.n, a.p, a.lambda)?;
    if a.tails {
        reports.extend(tail_envelope_reports(a.n, a.p)?);
    }
    let certified = reports.iter().all(|r| r.holds(PROB_ABS_TOL));
    let ins = inputs([
        ("n", json!(a.n)),
        ("p", json!(a.p)),
        ("lambda", json!(a.lambda)),
        ("tails", json!(a.tails)),
    ]);
    Ok(Rendered {
        json: OutputEnvelope::new("bounds", ins, to_value(&reports)),
        table: bound_table(&reports),
        certified,
    })
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T, Failure> {
    x.ok_or_else(|| Failure::Usage(format!("this claim needs {flag}")))
}

fn report_table(reports: &[&MonotonicityReport]) -> Table {
    let mut table = Table::new(&[
        "claim",
        "certified",
        "grid_size",
        "violations",
        "min_margin",
        "seed",
    ]);
    for r in reports {
        table.push(vec![
            Cell::Text(to_value(&r.claim).as_str().unwrap_or_default().to_owned()),
            Cell::Text(r.certified().to_string()),
            (r.grid_size as u64).into(),
            (r.violations.len() as u64).into(),
            r.min_margin.into(),
            r.seed.into(),
        ]);
    }
    table
}

fn verify(a: &VerifyArgs) -> Result<Rendered, Failure> {
    let mut ins = inputs([
        (
            "claim",
            json!(a.claim.to_possible_value().map(|v| v.get_name().to_owned())),
        ),
        ("lambda", json!(a.lambda)),
        ("m", json!(a.m)),
        ("m1", json!(a.m1)),
        ("m2", json!(a.m2)),
    ]);
    let (results, reports, certified): (Value, Vec<MonotonicityReport>, bool) = match a.claim {
        ClaimArg::T1i | ClaimArg::T1ii => {
            let part = if a.claim == ClaimArg::T1i {
                Theorem1Part::I
            } else {
                Theorem1Part::II
            };
            let n_max = a.n_max.unwrap_or(100);
            let cases = theorem1_cases(part, a.count, a.seed, n_max)?;
            let report = parallel::certify_theorem1(part, &cases, Some(a.seed));
            ins.insert("n_max".into(), json!(n_max));
            ins.insert("count".into(), json!(a.count));
            ins.insert("seed".into(), json!(a.seed));
            let ok = report.certified();
            (json!({ "report": to_value(&report) }), vec![report], ok)
        }
        ClaimArg::C1 => {
            let n_max = a.n_max.unwrap_or(200);
            let s = corollary1_sequence(need(a.lambda, "--lambda")?, need(a.m, "--m")?, n_max)?;
            ins.insert("n_max".into(), json!(n_max));
            let ok = s.report.certified();
            (json!({ "sequence": to_value(&s) }), vec![s.report], ok)
        }
        ClaimArg::C2 => {
            let n_max = a.n_max.unwrap_or(200);
            let s = corollary2_sequence(
                need(a.lambda, "--lambda")?,
                need(a.m1, "--m1")?,
                need(a.m2, "--m2")?,
                n_max,
            )?;
            ins.insert("n_max".into(), json!(n_max));
            let ok = s.report.certified();
            (json!({ "sequence": to_value(&s) }), vec![s.report], ok)
        }
        ClaimArg::T2 => {
            let n_max = a.n_max.unwrap_or(200);
            let lambda = need(a.lambda, "--lambda")?;
            let m = need(a.m, "--m")?;
            let s = if m == 1 {
                theorem2_constant(lambda, n_max)?
            } else {
                theorem2_sequence(lambda, m, n_max)?
            };
            let order = theorem2_stochastic_order(lambda, n_max)?;
            ins.insert("n_max".into(), json!(n_max));
            let ok = s.report.certified() && order.certified();
            let results = json!({
                "sequence": to_value(&s),
                "stochastic_order": to_value(&order),
            });
            (results, vec![s.report, order], ok)
        }
        ClaimArg::Mlr => {
            let n_max = a.n_max.unwrap_or(10_000);
            let (c, alpha) = (need(a.c, "--c")?, need(a.a, "--a")?);
            ins.insert("c".into(), json!(c));
            ins.insert("a".into(), json!(alpha));
            ins.insert("n_start".into(), json!(a.n_start));
            ins.insert("n_max".into(), json!(n_max));
            let signs = mlr_sign_report(40)?;
            let violation = match find_mlr_violation(c, alpha, a.n_start, n_max) {
                Ok(v) => Some(v),
                Err(Error::NotFound { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let ok = violation.is_some() && signs.certified();
            let results = json!({
                "violation": to_value(&violation),
                "sign_agreement": to_value(&signs),
            });
            (results, vec![signs], ok)
        }
    };
    let refs: Vec<&MonotonicityReport> = reports.iter().collect();
    Ok(Rendered {
        json: OutputEnvelope::new(
            "verify",
            ins,
            json!({ "certified": certified, "detail": results }),
        ),
        table: report_table(&refs),
        certified,
    })
}

fn design_table(d: &TestDesign) -> Table {
    let mut table = Table::new(&[
        "direction",
        "n",
        "p0",
        "alpha",
        "m",
        "m1",
        "m2",
        "tail_alpha",
        "poisson_level",
        "exact_binomial_level",
    ]);
    table.push(vec![
        Cell::Text(
            to_value(&d.direction)
                .as_str()
                .unwrap_or_default()
                .to_owned(),
        ),
        d.n.into(),
        d.p0.into(),
        d.alpha.into(),
        d.m.into(),
        d.m1.into(),
        d.m2.into(),
        d.tail_alpha.into(),
        d.poisson_level.into(),
        d.exact_binomial_level.into(),
    ]);
    table
}

fn test_design(a: &TestDesignArgs) -> Result<Rendered, Failure> {
    let d = match a.direction {
        DirectionArg::Right => design_right(a.n, a.p0, a.alpha),
        DirectionArg::Left => design_left(a.n, a.p0, a.alpha),
        DirectionArg::TwoSided => design_two_sided(a.n, a.p0, a.alpha),
    }?;
    let ins = inputs([
        ("direction", to_value(&d.direction)),
        ("n", json!(a.n)),
        ("p0", json!(a.p0)),
        ("alpha", json!(a.alpha)),
    ]);
    Ok(Rendered {
        json: OutputEnvelope::new("test-design", ins, to_value(&d)),
        table: design_table(&d),
        certified: true,
    })
}

fn p_value(a: &PValueArgs) -> Result<Rendered, Failure> {
    let v = p_value_right(a.n, a.p0, a.x)?;
    let mut table = Table::new(&["n", "p0", "x", "value", "in_rejection_region"]);
    table.push(vec![
        a.n.into(),
        a.p0.into(),
        a.x.into(),
        v.value.into(),
        Cell::Text(v.in_rejection_region.to_string()),
    ]);
    let ins = inputs([("n", json!(a.n)), ("p0", json!(a.p0)), ("x", json!(a.x))]);
    Ok(Rendered {
        json: OutputEnvelope::new("p-value", ins, to_value(&v)),
        table,
        certified: true,
    })
}

fn parse_design(text: &str) -> Result<TestDesign, Failure> {
    let source = if text.trim_start().starts_with('{') {
        text.to_owned()
    } else {
        std::fs::read_to_string(text)
            .map_err(|e| Failure::Usage(format!("cannot read design file {text}: {e}")))?
    };
    let value: Value = serde_json::from_str(&source)
        .map_err(|e| Failure::Usage(format!("design is not valid JSON: {e}")))?;
    let body = match value.get("results") {
        Some(inner) if value.get("command").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(body).map_err(|e| Failure::Usage(format!("not a test design: {e}")))
}

fn power(a: &PowerArgs) -> Result<Rendered, Failure> {
    let design = parse_design(&a.design)?;
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    let grid = linspace(a.p_min, a.p_max, a.steps);
    let curve = parallel::power_curve(&design, &grid)?;
    let mut table = Table::new(&["p", "power"]);
    for (&p, &v) in grid.iter().zip(&curve) {
        table.push(vec![p.into(), v.into()]);
    }
    let ins = inputs([
        ("design", to_value(&design)),
        ("p_min", json!(a.p_min)),
        ("p_max", json!(a.p_max)),
        ("steps", json!(a.steps)),
    ]);
    let rows: Vec<Value> = grid
        .iter()
        .zip(&curve)
        .map(|(p, v)| json!({ "p": p, "power": v }))
        .collect();
    Ok(Rendered {
        json: OutputEnvelope::new("power", ins, Value::Array(rows)),
        table,
        certified: true,
    })
}
