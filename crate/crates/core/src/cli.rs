//! Command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 when a violation is found or
//! a probed property fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::analysis::{
    concavity_defect_grid, concavity_scan, conjugacy_region_scan, counterexample_search, geomspace, linspace,
    optimality_search, power_fit, random_probabilistic_space, reversed_optimality_search, strict_gap_demo,
    GridSpec, SearchConfig, SearchTarget,
};
use crate::error::Error;
use crate::generators::{Generator, GeneratorPair};
use crate::inequalities::{
    generalized_minkowski_report, gmi_report, holder_report, minkowski_triangle_report, mulholland_report,
    quasi_mean_midpoint_report, reversed_holder_report, Direction, InequalityReport, DEFAULT_TOLERANCE,
};
use crate::measure::{MeasureSpace, StepFunction};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lpchar", version, about = "Generalized means and Hölder/Minkowski-type inequality probes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative tolerance for verdicts.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Master seed; required by every randomized command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Evaluation budget for searches.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Worker threads for search restarts; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Jsonl,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one inequality on explicit inputs.
    Check {
        #[arg(value_enum)]
        name: CheckName,
        #[command(flatten)]
        inputs: InputArgs,
    },
    /// Grid concavity scan of F(s,t) = φ⁻¹(s)ψ⁻¹(t).
    ScanConcavity(ScanArgs),
    /// Seeded counterexample search.
    Search {
        #[arg(value_enum)]
        target: CheckName,
        #[command(flatten)]
        inputs: InputArgs,
    },
    /// Least-squares power-law fit of a generator.
    Fit {
        #[arg(long)]
        gen: String,
        /// `lo,hi,n`, geometrically spaced.
        #[arg(long, default_value = "0.1,10,50")]
        grid: String,
    },
    /// Optimality searches over power maps and the strict power-mean gap.
    DemoOptimality {
        #[arg(value_enum)]
        kind: DemoKind,
        #[command(flatten)]
        inputs: InputArgs,
        /// `lo,hi` exponent range.
        #[arg(long)]
        r_range: Option<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Smaller exponent for strict-gap.
        #[arg(long)]
        p_prime: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Holder,
    ReversedHolder,
    Minkowski,
    Gmi,
    Genmink,
    Mulholland,
    Quasimean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    Holder,
    Reversed,
    StrictGap,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long)]
    pub gen: Option<String>,
    /// Weights, `uniform:<n>` or `random:<n>,<seed>`.
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    /// Function on the product, row-major with the X index outer.
    #[arg(long = "F", alias = "big-f")]
    pub big_f: Option<String>,
    /// Exponent for gmi and strict-gap.
    #[arg(long)]
    pub p: Option<f64>,
    /// `t,u,v,w`; repeatable.
    #[arg(long = "quad")]
    pub quads: Vec<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Weights of the quasi-arithmetic mean.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub direction: Option<String>,
    /// JSON file holding a witness, a report or a search outcome.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    /// Explicit exponents, comma separated.
    #[arg(long)]
    pub p_values: Option<String>,
    #[arg(long)]
    pub q_values: Option<String>,
    /// `lo,hi,n`, evenly spaced.
    #[arg(long)]
    pub p_range: Option<String>,
    #[arg(long)]
    pub q_range: Option<String>,
    /// `lo,hi`
    #[arg(long, default_value = "0.05,10")]
    pub s_range: String,
    #[arg(long, default_value = "0.05,10")]
    pub t_range: String,
    #[arg(long, default_value_t = 12)]
    pub steps: usize,
}

/// Usage-level failure: message names the offending field.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Usage>;

fn field<T>(name: &str, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| Usage(format!("--{name}: {e}")))
}

fn parse_list(name: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Usage(format!("--{name}: '{x}' is not a number")))
        })
        .collect()
}

/// Parses `0.5,0.5`, `uniform:<n>` or `random:<n>,<seed>`.
fn parse_space(name: &str, s: &str) -> CliResult<MeasureSpace> {
    if let Some(n) = s.strip_prefix("uniform:") {
        let n = n.parse::<usize>().map_err(|_| Usage(format!("--{name}: bad atom count '{n}'")))?;
        return field(name, MeasureSpace::uniform(n));
    }
    if let Some(rest) = s.strip_prefix("random:") {
        let (n, seed) = rest
            .split_once(',')
            .ok_or_else(|| Usage(format!("--{name}: expected random:<n>,<seed>")))?;
        let n = n.parse::<usize>().map_err(|_| Usage(format!("--{name}: bad atom count '{n}'")))?;
        let seed = seed.parse::<u64>().map_err(|_| Usage(format!("--{name}: bad seed '{seed}'")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return field(name, random_probabilistic_space(n, &mut rng));
    }
    field(name, MeasureSpace::new(parse_list(name, s)?))
}

fn parse_range3(name: &str, s: &str) -> CliResult<Vec<f64>> {
    let v = parse_list(name, s)?;
    match v.as_slice() {
        [lo, hi, n] if *n >= 1.0 && n.fract() == 0.0 && lo <= hi => Ok(linspace(*lo, *hi, *n as usize)),
        _ => Err(Usage(format!("--{name}: expected lo,hi,n with lo <= hi and n >= 1"))),
    }
}

fn parse_range2(name: &str, s: &str) -> CliResult<(f64, f64)> {
    match parse_list(name, s)?.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(Usage(format!("--{name}: expected lo,hi with lo < hi"))),
    }
}

/// Inputs after merging a JSON witness with explicit flags (flags win).
#[derive(Debug, Default)]
struct Resolved {
    phi: Option<Generator>,
    psi: Option<Generator>,
    gen: Option<Generator>,
    mu: Option<MeasureSpace>,
    nu: Option<MeasureSpace>,
    f: Option<StepFunction>,
    g: Option<StepFunction>,
    big_f: Option<StepFunction>,
    p: Option<f64>,
    quads: Vec<[f64; 4]>,
    a: Option<Vec<f64>>,
    b: Option<Vec<f64>>,
    q: Option<Vec<f64>>,
    direction: Option<Direction>,
}

fn witness_of(v: Value) -> Value {
    match v {
        Value::Object(ref m) if m.contains_key("report") => witness_of(m["report"].clone()),
        Value::Object(ref m) if m.contains_key("witness") => m["witness"].clone(),
        other => other,
    }
}

fn from_json<T: serde::de::DeserializeOwned>(name: &str, w: &Value) -> CliResult<Option<T>> {
    match w.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| Usage(format!("--input: field '{name}': {e}"))),
    }
}

impl Resolved {
    fn from_args(args: &InputArgs) -> CliResult<Self> {
        let mut r = Resolved::default();
        if let Some(path) = &args.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("--input: {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Usage(format!("--input: {e}")))?;
            let w = witness_of(v);
            r.phi = from_json("phi", &w)?;
            r.psi = from_json("psi", &w)?;
            r.gen = from_json("gen", &w)?;
            r.mu = from_json("mu", &w)?;
            r.nu = from_json("nu", &w)?;
            r.f = from_json("f", &w)?;
            r.g = from_json("g", &w)?;
            r.big_f = from_json("F", &w)?;
            r.p = from_json("p", &w)?;
            if let Some(quad) = from_json::<[f64; 4]>("quad", &w)? {
                r.quads.push(quad);
            }
            r.a = from_json("a", &w)?;
            r.b = from_json("b", &w)?;
            r.q = from_json("q", &w)?;
            r.direction = from_json("direction", &w)?;
        }
        let generator = |name: &str, s: &Option<String>| -> CliResult<Option<Generator>> {
            s.as_deref().map(|s| field(name, Generator::parse(s))).transpose()
        };
        let function = |name: &str, s: &Option<String>| -> CliResult<Option<StepFunction>> {
            s.as_deref()
                .map(|s| field(name, StepFunction::new(parse_list(name, s)?)))
                .transpose()
        };
        let list = |name: &str, s: &Option<String>| s.as_deref().map(|s| parse_list(name, s)).transpose();
        if let Some(g) = generator("phi", &args.phi)? {
            r.phi = Some(g);
        }
        if let Some(g) = generator("psi", &args.psi)? {
            r.psi = Some(g);
        }
        if let Some(g) = generator("gen", &args.gen)? {
            r.gen = Some(g);
        }
        if let Some(s) = &args.mu {
            r.mu = Some(parse_space("mu", s)?);
        }
        if let Some(s) = &args.nu {
            r.nu = Some(parse_space("nu", s)?);
        }
        if let Some(f) = function("f", &args.f)? {
            r.f = Some(f);
        }
        if let Some(g) = function("g", &args.g)? {
            r.g = Some(g);
        }
        if let Some(f) = function("F", &args.big_f)? {
            r.big_f = Some(f);
        }
        if args.p.is_some() {
            r.p = args.p;
        }
        if !args.quads.is_empty() {
            r.quads = args
                .quads
                .iter()
                .map(|s| match parse_list("quad", s)?.as_slice() {
                    [t, u, v, w] => Ok([*t, *u, *v, *w]),
                    _ => Err(Usage(format!("--quad: expected four values, got '{s}'"))),
                })
                .collect::<CliResult<_>>()?;
        }
        for (slot, name, src) in [(&mut r.a, "a", &args.a), (&mut r.b, "b", &args.b), (&mut r.q, "q", &args.q)] {
            if let Some(v) = list(name, src)? {
                *slot = Some(v);
            }
        }
        if let Some(d) = &args.direction {
            r.direction = Some(field("direction", d.parse())?);
        }
        Ok(r)
    }

    fn need<'a, T>(slot: &'a Option<T>, name: &str) -> CliResult<&'a T> {
        slot.as_ref().ok_or_else(|| Usage(format!("--{name} is required")))
    }

    fn pair(&self) -> CliResult<GeneratorPair> {
        Ok(GeneratorPair::new(
            Self::need(&self.phi, "phi")?.clone(),
            Self::need(&self.psi, "psi")?.clone(),
        ))
    }

    fn mu_or(&self, default_atoms: usize) -> CliResult<MeasureSpace> {
        match &self.mu {
            Some(mu) => Ok(mu.clone()),
            None => Ok(MeasureSpace::uniform(default_atoms)?),
        }
    }
}

fn check_reports(name: CheckName, r: &Resolved, tol: f64) -> CliResult<Vec<InequalityReport>> {
    let reports = match name {
        CheckName::Holder => vec![holder_report(&r.pair()?, Resolved::need(&r.f, "f")?, Resolved::need(&r.g, "g")?, Resolved::need(&r.mu, "mu")?, tol)?],
        CheckName::ReversedHolder => vec![reversed_holder_report(
            &r.pair()?,
            Resolved::need(&r.f, "f")?,
            Resolved::need(&r.g, "g")?,
            Resolved::need(&r.mu, "mu")?,
            tol,
        )?],
        CheckName::Minkowski => vec![minkowski_triangle_report(
            Resolved::need(&r.gen, "gen")?,
            Resolved::need(&r.f, "f")?,
            Resolved::need(&r.g, "g")?,
            Resolved::need(&r.mu, "mu")?,
            tol,
        )?],
        CheckName::Gmi => vec![gmi_report(
            *Resolved::need(&r.p, "p")?,
            Resolved::need(&r.big_f, "F")?,
            Resolved::need(&r.mu, "mu")?,
            Resolved::need(&r.nu, "nu")?,
            tol,
        )?],
        CheckName::Genmink => vec![generalized_minkowski_report(
            &r.pair()?,
            Resolved::need(&r.big_f, "F")?,
            Resolved::need(&r.mu, "mu")?,
            Resolved::need(&r.nu, "nu")?,
            r.direction.unwrap_or(Direction::Forward),
            tol,
        )?],
        CheckName::Mulholland => {
            if r.quads.is_empty() {
                return Err(Usage("--quad is required".into()));
            }
            let gen = Resolved::need(&r.gen, "gen").or_else(|_| Resolved::need(&r.phi, "phi"))?;
            r.quads
                .iter()
                .map(|q| mulholland_report(gen, *q, r.direction.unwrap_or(Direction::Forward), tol))
                .collect::<crate::Result<_>>()?
        }
        CheckName::Quasimean => {
            let a = Resolved::need(&r.a, "a")?;
            let q = match &r.q {
                Some(q) => q.clone(),
                None => vec![1.0 / a.len() as f64; a.len()],
            };
            vec![quasi_mean_midpoint_report(Resolved::need(&r.gen, "gen")?, a, Resolved::need(&r.b, "b")?, &q, tol)?]
        }
    };
    Ok(reports)
}

fn search_target(name: CheckName, r: &Resolved) -> CliResult<SearchTarget> {
    let direction = r.direction.unwrap_or(Direction::Forward);
    Ok(match name {
        CheckName::Holder => SearchTarget::Holder {
            pair: r.pair()?,
            mu: r.mu_or(2)?,
        },
        CheckName::ReversedHolder => SearchTarget::ReversedHolder {
            pair: r.pair()?,
            mu: r.mu_or(2)?,
        },
        CheckName::Minkowski => SearchTarget::Minkowski {
            gen: Resolved::need(&r.gen, "gen")?.clone(),
            mu: r.mu_or(2)?,
        },
        CheckName::Genmink => SearchTarget::GeneralizedMinkowski {
            pair: r.pair()?,
            mu: r.mu_or(2)?,
            nu: match &r.nu {
                Some(nu) => nu.clone(),
                None => MeasureSpace::new(vec![1.0, 1.0])?,
            },
            direction,
        },
        CheckName::Gmi => {
            let p = *Resolved::need(&r.p, "p")?;
            SearchTarget::GeneralizedMinkowski {
                pair: GeneratorPair::power_and_inverse(p)?,
                mu: r.mu_or(2)?,
                nu: match &r.nu {
                    Some(nu) => nu.clone(),
                    None => MeasureSpace::new(vec![1.0, 1.0])?,
                },
                direction,
            }
        }
        CheckName::Mulholland => SearchTarget::Mulholland {
            gen: Resolved::need(&r.gen, "gen")?.clone(),
            direction,
        },
        CheckName::Quasimean => SearchTarget::QuasiMeanMidpoint {
            gen: Resolved::need(&r.gen, "gen")?.clone(),
            weights: r.q.clone().unwrap_or_else(|| vec![0.5, 0.5]),
        },
    })
}

/// Check name that re-verifies reports produced by a search target.
fn checker_for(target: CheckName) -> CheckName {
    match target {
        CheckName::Gmi => CheckName::Genmink,
        other => other,
    }
}

fn emit_json<T: Serialize, W: Write>(out: &mut W, value: &T, format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Jsonl => writeln!(out, "{}", serde_json::to_string(value)?),
        _ => writeln!(out, "{}", serde_json::to_string_pretty(value)?),
    }
}

fn emit_reports<W: Write>(out: &mut W, reports: &[InequalityReport], format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Json if reports.len() == 1 => emit_json(out, &reports[0], format),
        OutputFormat::Json => emit_json(out, &reports, format),
        OutputFormat::Jsonl => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
            Ok(())
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "lhs", "rhs", "gap", "holds", "is_equality", "tolerance", "witness"])?;
            for r in reports {
                w.write_record([
                    r.name.clone(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.gap.to_string(),
                    r.holds.to_string(),
                    r.is_equality.to_string(),
                    r.tolerance.to_string(),
                    r.witness.to_string(),
                ])?;
            }
            w.flush()
        }
        OutputFormat::Pretty => {
            for r in reports {
                let verdict = match (r.holds, r.is_equality) {
                    (true, true) => "holds (equality)",
                    (true, false) => "holds",
                    _ => "VIOLATED",
                };
                writeln!(out, "{}: lhs={} rhs={} gap={:e} {verdict}", r.name, r.lhs, r.rhs, r.gap)?;
            }
            Ok(())
        }
    }
}

fn verdict_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn run_check<W: Write>(name: CheckName, inputs: &InputArgs, g: &GlobalOpts, out: &mut W) -> CliResult<i32> {
    let resolved = Resolved::from_args(inputs)?;
    let reports = check_reports(name, &resolved, g.tolerance)?;
    emit_reports(out, &reports, g.output).map_err(|e| Usage(e.to_string()))?;
    Ok(verdict_code(reports.iter().all(|r| r.holds)))
}

fn run_scan<W: Write>(args: &ScanArgs, g: &GlobalOpts, out: &mut W) -> CliResult<i32> {
    let s = parse_range2("s-range", &args.s_range)?;
    let t = parse_range2("t-range", &args.t_range)?;
    let grid = field("steps", GridSpec::new(s, t, args.steps))?;
    let io = |e: std::io::Error| Usage(e.to_string());

    if args.phi.is_some() || args.psi.is_some() {
        let phi = field("phi", Generator::parse(args.phi.as_deref().unwrap_or_default()))?;
        let psi = field("psi", Generator::parse(args.psi.as_deref().unwrap_or_default()))?;
        let pair = GeneratorPair::new(phi, psi);
        let verdict = concavity_scan(&pair, &grid, g.tolerance)?;
        if g.output == OutputFormat::Csv {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["s", "t", "midpoint_defect"]).map_err(|e| Usage(e.to_string()))?;
            for (s, t, d) in concavity_defect_grid(&pair, &grid)? {
                w.write_record([s.to_string(), t.to_string(), d.to_string()])
                    .map_err(|e| Usage(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        } else {
            emit_json(out, &verdict, g.output).map_err(io)?;
        }
        return Ok(verdict_code(verdict.concave_on_grid));
    }

    let exps = |name: &str, values: &Option<String>, range: &Option<String>| -> CliResult<Vec<f64>> {
        match (values, range) {
            (Some(v), _) => parse_list(name, v),
            (None, Some(r)) => parse_range3(name, r),
            (None, None) => Err(Usage(format!("--{name}-values, --{name}-range or --phi/--psi is required"))),
        }
    };
    let ps = exps("p", &args.p_values, &args.p_range)?;
    let qs = exps("q", &args.q_values, &args.q_range)?;
    if ps.is_empty() || qs.is_empty() {
        return Err(Usage("exponent ranges must be non-empty".into()));
    }
    let cells = conjugacy_region_scan(&ps, &qs, &grid, g.tolerance)?;
    match g.output {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["p", "q", "predicate", "concave_on_grid", "boundary", "worst_violation"])
                .map_err(|e| Usage(e.to_string()))?;
            for c in &cells {
                w.write_record([
                    c.p.to_string(),
                    c.q.to_string(),
                    c.predicate.to_string(),
                    c.concave_on_grid.to_string(),
                    c.boundary.to_string(),
                    c.worst_violation.to_string(),
                ])
                .map_err(|e| Usage(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        OutputFormat::Jsonl => {
            for c in &cells {
                emit_json(out, c, g.output).map_err(io)?;
            }
        }
        OutputFormat::Pretty => {
            for c in &cells {
                writeln!(
                    out,
                    "p={:<8} q={:<8} 1/p+1/q<=1: {:<5} concave: {:<5}{}",
                    c.p,
                    c.q,
                    c.predicate,
                    c.concave_on_grid,
                    if c.boundary { " (boundary)" } else { "" }
                )
                .map_err(io)?;
            }
        }
        OutputFormat::Json => emit_json(out, &cells, g.output).map_err(io)?,
    }
    Ok(verdict_code(cells.iter().all(|c| c.boundary || c.agrees())))
}

fn run_search<W: Write>(target_name: CheckName, inputs: &InputArgs, g: &GlobalOpts, out: &mut W) -> CliResult<i32> {
    let seed = g.seed.ok_or_else(|| Usage("--seed is required for search".into()))?;
    if g.budget == 0 {
        return Err(Usage("--budget must be at least 1".into()));
    }
    let resolved = Resolved::from_args(inputs)?;
    let target = search_target(target_name, &resolved)?;
    let config = SearchConfig {
        tolerance: g.tolerance,
        jobs: g.jobs,
        ..SearchConfig::new(g.budget, seed)
    };
    let outcome = counterexample_search(&target, &config)?;
    let io = |e: std::io::Error| Usage(e.to_string());
    match outcome {
        None => {
            writeln!(out, "none").map_err(io)?;
            Ok(EXIT_PASS)
        }
        Some(outcome) => {
            // Re-verify through the checker the witness names.
            let replay = Resolved::from_witness(&outcome.report.witness)?;
            let again = check_reports(checker_for(target_name), &replay, g.tolerance)?;
            if again.len() != 1 || again[0].gap != outcome.report.gap || again[0].holds {
                return Err(Usage("internal error: witness did not replay to the same verdict".into()));
            }
            match g.output {
                OutputFormat::Csv | OutputFormat::Pretty => emit_reports(out, &[outcome.report], g.output).map_err(io)?,
                _ => emit_json(out, &outcome, g.output).map_err(io)?,
            }
            Ok(EXIT_VIOLATION)
        }
    }
}

impl Resolved {
    fn from_witness(w: &Value) -> CliResult<Self> {
        Resolved::from_args(&witness_inputs(w))
    }
}

/// Rebuilds the inputs of a witness without touching the filesystem.
fn witness_inputs(w: &Value) -> InputArgs {
    let spec = |k: &str| w.get(k).and_then(Value::as_str).map(str::to_string);
    let values = |k: &str, inner: Option<&str>| {
        let v = match inner {
            Some(i) => w.get(k).and_then(|x| x.get(i)),
            None => w.get(k),
        };
        v.and_then(Value::as_array).map(|a| {
            a.iter()
                .map(|x| x.as_f64().map(|f| format!("{f:?}")).unwrap_or_default())
                .collect::<Vec<_>>()
                .join(",")
        })
    };
    InputArgs {
        phi: spec("phi"),
        psi: spec("psi"),
        gen: spec("gen"),
        mu: values("mu", Some("weights")),
        nu: values("nu", Some("weights")),
        f: values("f", Some("values")),
        g: values("g", Some("values")),
        big_f: values("F", Some("values")),
        p: w.get("p").and_then(Value::as_f64),
        quads: values("quad", None).into_iter().collect(),
        a: values("a", None),
        b: values("b", None),
        q: values("q", None),
        direction: spec("direction"),
        input: None,
    }
}

fn run_fit<W: Write>(gen: &str, grid: &str, g: &GlobalOpts, out: &mut W) -> CliResult<i32> {
    let gen = field("gen", Generator::parse(gen))?;
    let v = parse_list("grid", grid)?;
    let grid = match v.as_slice() {
        [lo, hi, n] if *lo > 0.0 && lo < hi && *n >= 3.0 && n.fract() == 0.0 => geomspace(*lo, *hi, *n as usize),
        _ => return Err(Usage("--grid: expected lo,hi,n with 0 < lo < hi and n >= 3".into())),
    };
    let fit = field("gen", power_fit(&gen, &grid))?;
    emit_json(out, &fit, g.output).map_err(|e| Usage(e.to_string()))?;
    Ok(EXIT_PASS)
}

fn run_demo<W: Write>(
    kind: DemoKind,
    inputs: &InputArgs,
    r_range: &Option<String>,
    steps: usize,
    p_prime: Option<f64>,
    g: &GlobalOpts,
    out: &mut W,
) -> CliResult<i32> {
    let r = Resolved::from_args(inputs)?;
    let io = |e: std::io::Error| Usage(e.to_string());
    let range = |default: (f64, f64)| match r_range {
        Some(s) => parse_range2("r-range", s),
        None => Ok(default),
    };
    match kind {
        DemoKind::Holder => {
            let f = Resolved::need(&r.f, "f")?;
            let mu = Resolved::need(&r.mu, "mu")?;
            let res = optimality_search(&r.pair()?, f, mu, range((0.1, 10.0))?, steps, g.tolerance)?;
            emit_json(out, &res, g.output).map_err(io)?;
            Ok(verdict_code(res.achieved_equality))
        }
        DemoKind::Reversed => {
            let gf = Resolved::need(&r.g, "g")?;
            let mu = Resolved::need(&r.mu, "mu")?;
            let res = reversed_optimality_search(&r.pair()?, gf, mu, range((-10.0, 2.0))?, steps, g.tolerance)?;
            emit_json(out, &res, g.output).map_err(io)?;
            Ok(verdict_code(res.achieved_equality))
        }
        DemoKind::StrictGap => {
            let p = *Resolved::need(&r.p, "p")?;
            let pp = p_prime.ok_or_else(|| Usage("--p-prime is required".into()))?;
            let res = strict_gap_demo(p, pp, Resolved::need(&r.f, "f")?, Resolved::need(&r.mu, "mu")?, g.tolerance)?;
            emit_json(out, &res, g.output).map_err(io)?;
            Ok(verdict_code(res.strict))
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let g = &cli.global;
    if !(g.tolerance > 0.0 && g.tolerance.is_finite()) {
        let _ = writeln!(err, "error: --tolerance must be positive");
        return EXIT_USAGE;
    }
    let result = match &cli.command {
        Command::Check { name, inputs } => run_check(*name, inputs, g, out),
        Command::ScanConcavity(args) => run_scan(args, g, out),
        Command::Search { target, inputs } => run_search(*target, inputs, g, out),
        Command::Fit { gen, grid } => run_fit(gen, grid, g, out),
        Command::DemoOptimality {
            kind,
            inputs,
            r_range,
            steps,
            p_prime,
        } => run_demo(*kind, inputs, r_range, *steps, *p_prime, g, out),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
