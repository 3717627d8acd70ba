//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use lpchar::analysis::{
    conjugacy_region_scan, counterexample_search, geomspace, grid_pairs, hessian_fd_check, is_certified, linspace,
    multiplicativity_check, optimality_search, power_fit, power_hessian_det, random_probabilistic_space,
    random_space_with_mass, reversed_optimality_search, strict_gap_demo, GridSpec, SearchConfig, SearchTarget,
};
use lpchar::generators::{Generator, GeneratorPair};
use lpchar::inequalities::{
    build_two_block, generalized_minkowski_report, gmi_report, holder_report, mulholland_report,
    mulholland_subadditivity_check, quasi_mean_midpoint_report, reversed_holder_report, Direction,
};
use lpchar::measure::{MeasureSpace, StepFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sf(v: Vec<f64>) -> StepFunction {
    StepFunction::new(v).unwrap()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn c1_classical_holder() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_gap: f64 = f64::INFINITY;
    let mut worst_equality: f64 = 0.0;
    for p in [1.5, 2.0, 4.0] {
        let q = p / (p - 1.0);
        let pair = GeneratorPair::powers(p, q).unwrap();
        for _ in 0..10_000 {
            let n = rng.gen_range(2..=5);
            let mu = random_probabilistic_space(n, &mut rng).unwrap();
            let f = sf(random_values(&mut rng, n, 0.0, 10.0));
            let g = sf(random_values(&mut rng, n, 0.0, 10.0));
            let r = holder_report(&pair, &f, &g, &mu, TOL).unwrap();
            ensure(r.holds, || format!("violation at p={p}: {:?}", r.witness))?;
            worst_gap = worst_gap.min(r.relative_gap());

            let g_eq = f.powf(p / q).unwrap();
            let r = holder_report(&pair, &f, &g_eq, &mu, TOL).unwrap();
            ensure(r.is_equality, || format!("no equality at p={p}, gap {}: {:?}", r.gap, r.witness))?;
            worst_equality = worst_equality.max(r.relative_gap().abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "30000 samples, min relative gap {worst_gap:.3e}, worst equality defect {worst_equality:.1e}, {secs:.2}s"
    ))
}

fn c2_region() -> Outcome {
    let start = Instant::now();
    let exps = linspace(1.1, 5.0, 20);
    let cells = conjugacy_region_scan(&exps, &exps, &GridSpec::default(), TOL).unwrap();
    let mismatched: Vec<_> = cells.iter().filter(|c| !c.boundary && !c.agrees()).map(|c| (c.p, c.q)).collect();
    ensure(mismatched.is_empty(), || format!("verdict disagrees with 1/p+1/q<=1 at {mismatched:?}"))?;

    let mu = MeasureSpace::new(vec![0.5, 0.5]).unwrap();
    let mut searched = 0;
    for c in cells.iter().filter(|c| 1.0 / c.p + 1.0 / c.q > 1.05) {
        let target = SearchTarget::Holder {
            pair: GeneratorPair::powers(c.p, c.q).unwrap(),
            mu: mu.clone(),
        };
        let found = counterexample_search(&target, &SearchConfig::new(10_000, 7)).unwrap();
        ensure(found.is_some(), || format!("no Hölder violation found at p={}, q={}", c.p, c.q))?;
        searched += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.2}s"))?;
    let boundary = cells.iter().filter(|c| c.boundary).count();
    Ok(format!(
        "400 cells ({boundary} boundary) agree; violations found at all {searched} searched cells; {secs:.2}s"
    ))
}

fn c3_hessian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = rng.gen_range(1.2..5.0);
        let q = rng.gen_range(1.2..5.0);
        let exact = power_hessian_det(p, q).unwrap();
        let fd = hessian_fd_check(p, q, (1.0, 1.0), None).unwrap();
        let err = (exact - fd).abs();
        ensure(err <= 1e-5, || format!("p={p}, q={q}: exact {exact}, fd {fd}"))?;
        if exact.abs() > 1e-4 {
            ensure(exact.signum() == fd.signum(), || format!("sign mismatch at p={p}, q={q}"))?;
        }
        worst = worst.max(err);
    }
    Ok(format!("50 pairs, worst |det - fd| = {worst:.2e}"))
}

fn c4_generalized_minkowski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let pair = GeneratorPair::power_and_inverse(p).unwrap();
        for _ in 0..1000 {
            let mu = random_probabilistic_space(rng.gen_range(2..=4), &mut rng).unwrap();
            let nu = random_space_with_mass(rng.gen_range(2..=4), 2.0, &mut rng).unwrap();
            let n = mu.atom_count() * nu.atom_count();
            let big_f = sf(random_values(&mut rng, n, 0.0, 10.0));
            let r = generalized_minkowski_report(&pair, &big_f, &mu, &nu, Direction::Forward, TOL).unwrap();
            let s = gmi_report(p, &big_f, &mu, &nu, TOL).unwrap();
            ensure(r.holds, || format!("violation at p={p}: {:?}", r.witness))?;
            ensure(r.holds == s.holds, || format!("gmi verdict differs at p={p}: {:?}", r.witness))?;
        }
    }
    Ok("4000 samples hold; gmi verdicts agree".into())
}

/// Closed-form generalized Minkowski gap (rhs − lhs) for φ = e^t − 1,
/// ψ = log(1 + s) on two blocks of masses b (X) and c (Y).
fn expm1_two_block_gap(t: f64, u: f64, v: f64, w: f64, b: f64, c: f64) -> f64 {
    let lhs = (b * (c * (t + v)).exp_m1() + b * (c * (u + w)).exp_m1()).ln_1p();
    let rhs = c * (b * t.exp_m1() + b * u.exp_m1()).ln_1p() + c * (b * v.exp_m1() + b * w.exp_m1()).ln_1p();
    rhs - lhs
}

fn c5_converse_probe() -> Outcome {
    let (b, c) = (0.5, 1.0);
    let levels: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
    let mut oracle_min = (f64::INFINITY, [0.0; 4]);
    for &t in &levels {
        for &u in &levels {
            for &v in &levels {
                for &w in &levels {
                    let gap = expm1_two_block_gap(t, u, v, w, b, c);
                    if gap < oracle_min.0 {
                        oracle_min = (gap, [t, u, v, w]);
                    }
                }
            }
        }
    }
    ensure(oracle_min.0 < -1e-3, || format!("oracle grid finds no violation: {oracle_min:?}"))?;

    let pair = GeneratorPair::new(Generator::Expm1, Generator::inverse_of(Generator::Expm1));
    let probe = build_two_block(oracle_min.1, b, c).unwrap();
    let at_oracle =
        generalized_minkowski_report(&pair, &probe.big_f, &probe.mu, &probe.nu, Direction::Forward, TOL).unwrap();
    ensure((at_oracle.gap - oracle_min.0).abs() <= 1e-9 * at_oracle.scale(), || {
        format!("report gap {} differs from oracle {}", at_oracle.gap, oracle_min.0)
    })?;

    let target = SearchTarget::GeneralizedMinkowski {
        pair: pair.clone(),
        mu: probe.mu.clone(),
        nu: probe.nu.clone(),
        direction: Direction::Forward,
    };
    let found = counterexample_search(&target, &SearchConfig::new(100_000, 5)).unwrap();
    let found = found.ok_or("search found no violation within 1e5 evaluations")?;
    ensure(is_certified(&found.report), || "search result is not certified".into())?;
    let x: Vec<f64> = serde_json::from_value(found.report.witness["F"]["values"].clone()).unwrap();
    // Rows [[t, v], [u, w]] flatten to [t, v, u, w].
    let oracle_gap = expm1_two_block_gap(x[0], x[2], x[1], x[3], b, c);
    ensure((oracle_gap - found.report.gap).abs() <= 1e-9 * found.report.scale(), || {
        format!("oracle gap {oracle_gap} disagrees with search gap {}", found.report.gap)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=4);
        let q = random_probabilistic_space(n, &mut rng).unwrap().weights().to_vec();
        let a = random_values(&mut rng, n, 0.0, 10.0);
        let bb = random_values(&mut rng, n, 0.0, 10.0);
        let r = quasi_mean_midpoint_report(&Generator::Expm1, &a, &bb, &q, TOL).unwrap();
        ensure(r.holds, || format!("quasi-mean midpoint violated: {:?}", r.witness))?;
    }
    Ok(format!(
        "oracle min gap {:.4} at {:?}; search certified gap {:.4} after {} evaluations; 10000 midpoint samples hold",
        oracle_min.0, oracle_min.1, found.report.gap, found.evaluations
    ))
}

fn c6_optimality() -> Outcome {
    let mu = MeasureSpace::new(vec![0.5, 0.5]).unwrap();
    let f = sf(vec![1.0, 2.0]);
    let cubic = optimality_search(&GeneratorPair::powers(3.0, 3.0).unwrap(), &f, &mu, (0.1, 10.0), 100, TOL).unwrap();
    ensure(cubic.min_gap > 1e-4, || format!("p=q=3 min gap {}", cubic.min_gap))?;
    let square = optimality_search(&GeneratorPair::powers(2.0, 2.0).unwrap(), &f, &mu, (0.1, 10.0), 100, TOL).unwrap();
    ensure(square.min_gap.abs() <= 1e-9, || format!("p=q=2 min gap {}", square.min_gap))?;
    let strict = strict_gap_demo(2.0, 1.5, &f, &mu, TOL).unwrap();
    ensure(strict.strict && strict.margin > 1e-6, || format!("strict gap {strict:?}"))?;
    Ok(format!(
        "p=q=3 min gap {:.4}; p=q=2 min gap {:.1e} at r={:.6}; strict margin {:.5}",
        cubic.min_gap, square.min_gap, square.best_exponent, strict.margin
    ))
}

fn c7_reversed_holder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for p in [0.3, 0.5, 0.8] {
        let q = p / (p - 1.0);
        let pair = GeneratorPair::new(Generator::power(1.0, p).unwrap(), Generator::extended_power(1.0, q).unwrap());
        let stated_r = (q - 1.0) / p;
        let mut worst_equality: f64 = 0.0;
        for _ in 0..10_000 {
            let n = rng.gen_range(2..=5);
            let mu = random_probabilistic_space(n, &mut rng).unwrap();
            let f = sf(random_values(&mut rng, n, 0.05, 10.0));
            let g = sf(random_values(&mut rng, n, 0.05, 10.0));
            let r = reversed_holder_report(&pair, &f, &g, &mu, TOL).unwrap();
            ensure(r.holds, || format!("reversed Hölder violated at p={p}: {:?}", r.witness))?;
            let r = reversed_holder_report(&pair, &g.powf(stated_r).unwrap(), &g, &mu, TOL).unwrap();
            worst_equality = worst_equality.max(r.relative_gap().abs());
        }
        if worst_equality > TOL {
            failures.push(format!("p={p}: f=g^((q-1)/p) leaves relative gap up to {worst_equality:.3e}"));
        }
        let g = sf(vec![1.0, 2.0]);
        let mu = MeasureSpace::new(vec![0.5, 0.5]).unwrap();
        let opt = reversed_optimality_search(&pair, &g, &mu, (-10.0, 2.0), 241, TOL).unwrap();
        if (opt.best_exponent - stated_r).abs() > 1e-3 {
            failures.push(format!(
                "p={p}: optimum at r={:.4} (q-1 = {:.4}), not (q-1)/p = {stated_r:.4}",
                opt.best_exponent,
                q - 1.0
            ));
        }
    }
    if failures.is_empty() {
        Ok("inequality holds; equality and exponent recovery at (q-1)/p".into())
    } else {
        Err(format!("inequality holds on all 30000 samples, but {}", failures.join("; ")))
    }
}

fn c8_two_block() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (b, c) = (0.5, 1.0);
    for p in [1.0, 2.0, 3.0] {
        let gen = Generator::power(1.0, p).unwrap();
        let pair = GeneratorPair::power_and_inverse(p).unwrap();
        let quads: Vec<[f64; 4]> = (0..1000)
            .map(|_| [0; 4].map(|_| rng.gen_range(0.0..10.0)))
            .collect();
        let mul = mulholland_subadditivity_check(&gen, &quads, TOL).unwrap();
        for (quad, m) in quads.iter().zip(&mul) {
            let tb = build_two_block(*quad, b, c).unwrap();
            let r = generalized_minkowski_report(&pair, &tb.big_f, &tb.mu, &tb.nu, Direction::Forward, TOL).unwrap();
            ensure(r.holds == m.holds, || format!("verdicts differ at p={p}, quad {quad:?}"))?;
            ensure(r.holds, || format!("violation at p={p}, quad {quad:?}"))?;
        }
    }
    let gen = Generator::power(1.0, 0.5).unwrap();
    let pair = GeneratorPair::power_and_inverse(0.5).unwrap();
    for _ in 0..1000 {
        let quad = [0; 4].map(|_| rng.gen_range(0.0..10.0));
        let tb = build_two_block(quad, b, c).unwrap();
        let r = generalized_minkowski_report(&pair, &tb.big_f, &tb.mu, &tb.nu, Direction::Reversed, TOL).unwrap();
        let m = mulholland_report(&gen, quad, Direction::Reversed, TOL).unwrap();
        ensure(r.holds && m.holds, || format!("reversed regime fails at quad {quad:?}"))?;
    }
    Ok("3000 forward quadruples agree and hold; 1000 reversed quadruples at p=0.5 hold".into())
}

fn c9_detectors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = geomspace(0.5, 4.0, 20);
    let pairs = grid_pairs(&linspace(0.5, 4.0, 8));
    let mut worst_fit: f64 = 0.0;
    let mut worst_defect: f64 = 0.0;
    for _ in 0..100 {
        let c = rng.gen_range(0.1..10.0);
        let p = rng.gen_range(0.2..5.0);
        let gen = Generator::power(c, p).unwrap();
        let fit = power_fit(&gen, &grid).unwrap();
        let err = ((fit.c - c) / c).abs().max(((fit.p - p) / p).abs());
        ensure(err <= 1e-6, || format!("fit {fit:?} for c={c}, p={p}"))?;
        worst_fit = worst_fit.max(err);
        let defect = multiplicativity_check(&gen, &pairs).unwrap();
        ensure(defect < 1e-8, || format!("power defect {defect} for c={c}, p={p}"))?;
        worst_defect = worst_defect.max(defect);
    }
    let expm1 = multiplicativity_check(&Generator::Expm1, &pairs).unwrap();
    ensure(expm1 > 0.05, || format!("expm1 defect only {expm1}"))?;
    Ok(format!(
        "worst fit error {worst_fit:.1e}; worst power defect {worst_defect:.1e}; expm1 defect {expm1:.3}"
    ))
}

fn run_search(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_lpchar"))
        .arg("search")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.code().is_some_and(|c| c == 0 || c == 1), "search failed: {out:?}");
    out.stdout
}

fn c10_determinism() -> Outcome {
    let cases: [&[&str]; 3] = [
        &["holder", "--phi", "power:1,3", "--psi", "power:1,1.2", "--seed", "42"],
        &["genmink", "--phi", "expm1", "--psi", "inverse:expm1", "--mu", "0.5,0.5", "--nu", "1,1", "--seed", "3"],
        &["holder", "--phi", "power:1,2", "--psi", "power:1,2", "--seed", "11", "--budget", "2000"],
    ];
    for case in cases {
        let first = run_search(case);
        let second = run_search(case);
        ensure(first == second, || format!("outputs differ for {case:?}"))?;
        let mut parallel = case.to_vec();
        parallel.extend(["--jobs", "4"]);
        ensure(run_search(&parallel) == first, || format!("--jobs 4 changes output for {case:?}"))?;
    }
    Ok("3 searches byte-identical across runs and job counts".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("C1 classical Hölder suite", c1_classical_holder),
        ("C2 concavity region and violations", c2_region),
        ("C3 Hessian cross-check", c3_hessian),
        ("C4 generalized Minkowski, power pairs", c4_generalized_minkowski),
        ("C5 expm1 converse probe", c5_converse_probe),
        ("C6 optimality dichotomy", c6_optimality),
        ("C7 reversed Hölder suite", c7_reversed_holder),
        ("C8 Mulholland and two-block equivalence", c8_two_block),
        ("C9 detector soundness", c9_detectors),
        ("C10 search determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
