//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! seed defaults to 2024 and can be overridden with `CTMTLKIT_SEED`.

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use ctmtl::eval::satisfying_positions;
use ctmtl::formula::build::*;
use ctmtl::formula::{classify_fragment, desugar, is_pure_mtl, normalize_thresholds, Cmp, Fragment};
use ctmtl::game::{
    self, separation_fixture, solve_game, verify_game_theorem, zero_round_equivalent, Budget,
    FixtureFamily, GameParams,
};
use ctmtl::gen::{random_formula, random_interval, random_word, rng, FormulaParams, Rng8, WordParams};
use ctmtl::transform::{
    compile_with, eliminate_c_unbounded, expand_untimed_threshold_until, output_intervals,
    CompileOptions, Construction, TransformError,
};
use ctmtl::witness::{roundtrip_compiled, RoundtripOptions, RoundtripReport};
use ctmtl::Interval;
use rand::Rng;
use serde::Serialize;

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn seed() -> u64 {
    std::env::var("CTMTLKIT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(2024)
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = run();
    let elapsed = start.elapsed();
    Outcome {
        id,
        name,
        pass: pass && limit.map_or(true, |l| elapsed < l),
        detail,
        elapsed,
        limit,
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

// 1. Threshold normalization preserves truth at every position.
fn normalization(seed: u64) -> (bool, String) {
    let mut fp = FormulaParams::new(&["a", "b", "c"], 2);
    fp.compound_thresholds = true;
    let wp = WordParams::new(&["a", "b", "c"], 8);
    let mut r = rng(seed);
    let mut failures = 0;
    let mut first = None;
    for _ in 0..500 {
        let f = random_formula(&mut r, &fp);
        let g = normalize_thresholds(&desugar(&f));
        for _ in 0..20 {
            let w = random_word(&mut r, &wp);
            if satisfying_positions(&w, &f) != satisfying_positions(&w, &g) {
                failures += 1;
                first.get_or_insert_with(|| format!("; first: {f} on {w}"));
            }
        }
    }
    (
        failures == 0,
        format!("500 formulas x 20 words, {failures} disagreements{}", first.unwrap_or_default()),
    )
}

fn random_unbounded(r: &mut Rng8) -> Interval {
    Interval::unbounded(r.gen_range(0..=4), r.gen_bool(0.5))
}

// 2. Exact rewrites agree with the counting semantics.
fn exact_rewrites(seed: u64) -> (bool, String) {
    let mut r = rng(seed);
    let fp = FormulaParams::mtl(&["a", "b"], 1);
    let wp = WordParams::new(&["a", "b"], 8);
    let (mut c_fail, mut ut_fail) = (0, 0);
    for _ in 0..500 {
        let n = r.gen_range(1..=4u32);
        let f = count(Cmp::Ge, n, random_unbounded(&mut r), random_formula(&mut r, &fp));
        let g = eliminate_c_unbounded(&f).expect("unbounded C with n >= 1");
        let w = random_word(&mut r, &wp);
        if satisfying_positions(&w, &f) != satisfying_positions(&w, &g) {
            c_fail += 1;
        }
    }
    for _ in 0..500 {
        let n = r.gen_range(0..=4u32);
        let (x, b, y) = (
            random_formula(&mut r, &fp),
            random_formula(&mut r, &fp),
            random_formula(&mut r, &fp),
        );
        let f = until_thr(
            x.clone(),
            Interval::full(),
            ctmtl::formula::ThresholdExpr::atom(b.clone(), Cmp::Ge, n),
            y.clone(),
        );
        let g = expand_untimed_threshold_until(&x, &b, n as usize, &y);
        let w = random_word(&mut r, &wp);
        if satisfying_positions(&w, &f) != satisfying_positions(&w, &g) {
            ut_fail += 1;
        }
    }
    (
        c_fail + ut_fail == 0,
        format!("unbounded C 500 instances {c_fail} failures; untimed UT 500 instances {ut_fail} failures"),
    )
}

#[derive(Serialize)]
struct Instance {
    formula: String,
    word: String,
    report: RoundtripReport,
}

#[derive(Default, Serialize)]
struct SuiteSummary {
    instances: usize,
    models: usize,
    failures: usize,
    mutations: usize,
    mutated_models: usize,
    spurious: usize,
    refused_punctual: usize,
}

/// Random (formula, word) round trips; refused punctual `#b>=n` untils are
/// redrawn and counted.
fn roundtrip_suite(
    seed: u64,
    instances: usize,
    construction: Construction,
) -> (SuiteSummary, Vec<Instance>) {
    let mut fp = FormulaParams::new(&["a", "b"], 2);
    fp.max_const = 3;
    fp.max_endpoint = 4;
    let wp = WordParams::new(&["a", "b"], 8);
    let mut r = rng(seed);
    let mut sum = SuiteSummary::default();
    let mut out = Vec::with_capacity(instances);
    let sigma = ["a", "b"].into_iter().map(Into::into).collect();
    let copts = CompileOptions {
        construction,
        alphabet: Some(sigma),
    };
    while out.len() < instances {
        let f = random_formula(&mut r, &fp);
        let compiled = match compile_with(&f, &copts) {
            Ok(c) => c,
            Err(TransformError::PunctualUtGe(_)) => {
                sum.refused_punctual += 1;
                continue;
            }
            Err(e) => panic!("{f}: {e}"),
        };
        let w = random_word(&mut r, &wp);
        let opts = RoundtripOptions {
            construction,
            mutations: 64,
            seed: r.gen(),
        };
        let report = roundtrip_compiled(&compiled, &w, &opts).expect("strict word");
        sum.instances += 1;
        sum.models += usize::from(report.satisfied);
        sum.failures += usize::from(!report.passed());
        sum.mutations += report.mutations;
        sum.mutated_models += report.mutated_models;
        sum.spurious += report.spurious;
        out.push(Instance {
            formula: f.to_string(),
            word: w.to_string(),
            report,
        });
    }
    (sum, out)
}

// 3. Forward, backward and adversarial round trip.
fn equisatisfiability(seed: u64) -> (bool, String) {
    let (s, runs) = roundtrip_suite(seed, 500, Construction::Corrected);
    let first = runs
        .iter()
        .find(|i| !i.report.passed())
        .map(|i| format!("; first: {} on {}", i.formula, i.word))
        .unwrap_or_default();
    (
        s.failures == 0,
        format!(
            "{} instances ({} models, {} redrawn punctual), {} mutations, {} mutated models, {} failures{first}",
            s.instances, s.models, s.refused_punctual, s.mutations, s.mutated_models, s.failures
        ),
    )
}

/// The printed counter formulas, for the record.
fn as_printed_counterexamples(seed: u64) -> String {
    let (s, runs) = roundtrip_suite(seed, 500, Construction::AsPrinted);
    let forward = runs.iter().filter(|i| !i.report.forward).count();
    let first = runs
        .iter()
        .find(|i| !i.report.passed())
        .map(|i| format!("; first: {} on {}", i.formula, i.word))
        .unwrap_or_default();
    format!(
        "as-printed counter formulas: {} of {} instances fail ({} forward, {} spurious mutated models){first}",
        s.failures, s.instances, forward, s.spurious
    )
}

// 4. Outputs are pure MTL; non-punctual inputs stay non-punctual.
fn purity(seed: u64) -> (bool, String) {
    let mut r = rng(seed);
    let mut fp = FormulaParams::new(&["a", "b"], 2);
    fp.compound_thresholds = true;
    let mut nonpunctual = fp.clone();
    nonpunctual.punctual = false;
    let (mut impure, mut punctual, mut compiled, mut mitl, mut mitl_inputs) = (0, 0, 0, 0, 0);
    let mut refused = 0;
    for k in 0..1000 {
        let f = random_formula(&mut r, if k % 2 == 0 { &fp } else { &nonpunctual });
        let c = match compile_with(&f, &CompileOptions::default()) {
            Ok(c) => c,
            Err(TransformError::PunctualUtGe(_)) => {
                refused += 1;
                continue;
            }
            Err(e) => panic!("{f}: {e}"),
        };
        compiled += 1;
        impure += usize::from(!is_pure_mtl(&c.mtl_formula));
        if k % 2 == 1 {
            mitl_inputs += 1;
            mitl += usize::from(classify_fragment(&f) == Fragment::Mitl);
            if output_intervals(&c).iter().any(Interval::is_punctual) {
                punctual += 1;
            }
        }
    }
    (
        impure == 0 && punctual == 0,
        format!(
            "{compiled} compiled ({refused} punctual #b>=n untils refused), {impure} with counting nodes; {mitl_inputs} non-punctual inputs ({mitl} MITL-classified), {punctual} with punctual output intervals"
        ),
    )
}

// 5. Game suite.
fn games(seed: u64) -> (bool, String) {
    let mut r = rng(seed);
    let wp = WordParams::new(&["a", "b"], 4);
    let mut zero_bad = 0;
    for _ in 0..1000 {
        let (u, v) = (random_word(&mut r, &wp), random_word(&mut r, &wp));
        let params = GameParams::new(0, 0, Vec::new(), Fragment::Ctmtl);
        let solved = solve_game(&u, &v, &params, &Budget::default()).expect("zero rounds");
        if solved.duplicator_wins != zero_round_equivalent(&u, &v) {
            zero_bad += 1;
        }
    }

    let mono = game::monotonicity_grid(&mut r, 3, 2, 40);

    let mut fixtures_ok = 0;
    for family in FixtureFamily::ALL {
        let Ok(fx) = separation_fixture(family, &Default::default()) else {
            continue;
        };
        let ok = verify_game_theorem(&fx.formula, &fx.rho1, &fx.rho2, &Budget::default())
            .is_ok_and(|v| v.consistent);
        fixtures_ok += usize::from(ok);
    }

    let (mut random_ok, mut random_total, mut over_budget) = (0, 0, 0);
    let mut fp = FormulaParams::new(&["a", "b"], 2);
    fp.max_const = 2;
    fp.max_endpoint = 2;
    fp.compound_thresholds = false;
    let small = WordParams::new(&["a", "b"], 3);
    while random_total < 100 {
        let f = random_formula(&mut r, &fp);
        let (u, v) = (random_word(&mut r, &small), random_word(&mut r, &small));
        if !ctmtl::eval::distinguishes(&f, &u, &v) {
            continue;
        }
        match verify_game_theorem(&f, &u, &v, &Budget::default()) {
            Ok(v) => {
                random_total += 1;
                random_ok += usize::from(v.consistent);
            }
            Err(game::GameError::BudgetExceeded { .. }) => over_budget += 1,
            Err(e) => panic!("{f}: {e}"),
        }
    }
    (
        zero_bad == 0 && mono.violations == 0 && fixtures_ok == FixtureFamily::ALL.len() && random_ok == random_total,
        format!(
            "0-round {zero_bad}/1000 mismatches; monotonicity {} violations over {} games; fixtures {fixtures_ok}/{}; random distinguishing {random_ok}/{random_total} ({over_budget} skipped over budget)",
            mono.violations,
            mono.games,
            FixtureFamily::ALL.len()
        ),
    )
}

// 6. Fixture satisfaction patterns.
fn fixtures() -> (bool, String) {
    let mut lines = Vec::new();
    let mut ok = true;
    for family in FixtureFamily::ALL {
        let fx = match separation_fixture(family, &Default::default()) {
            Ok(fx) => fx,
            Err(e) => {
                ok = false;
                lines.push(format!("{}: {e}", family.name()));
                continue;
            }
        };
        let (s1, s2) = (
            ctmtl::eval::eval_word(&fx.rho1, &fx.formula),
            ctmtl::eval::eval_word(&fx.rho2, &fx.formula),
        );
        let good = (s1, s2) == fx.expected;
        ok &= good;
        lines.push(format!("{}: rho1 {} rho2 {}", family.name(), mark(s1), mark(s2)));
    }
    (ok, lines.join("; "))
}

fn mark(b: bool) -> &'static str {
    if b {
        "sat"
    } else {
        "unsat"
    }
}

// 7. Same seed, same bytes.
fn determinism(seed: u64) -> (bool, String) {
    let report = || {
        let (s, runs) = roundtrip_suite(seed, 40, Construction::Corrected);
        let mut lines = vec![serde_json::to_string(&s).expect("serializable")];
        lines.extend(runs.iter().map(|i| serde_json::to_string(i).expect("serializable")));
        let mut r = rng(seed);
        let wp = WordParams::new(&["a", "b"], 4);
        let u = random_word(&mut r, &wp);
        let v = random_word(&mut r, &wp);
        let params = GameParams::new(2, 1, vec![random_interval(&mut r, &FormulaParams::new(&["a"], 1))], Fragment::Ctmtl);
        let solved = solve_game(&u, &v, &params, &Budget::default());
        lines.push(serde_json::to_string(&solved.ok()).expect("serializable"));
        lines.join("\n")
    };
    let (a, b) = (report(), report());
    (a == b, format!("{} bytes per run, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let seed = seed();
    println!("acceptance seed {seed}");
    type Job = (u8, &'static str, Option<Duration>, Box<dyn FnOnce() -> (bool, String) + Send>);
    let jobs: Vec<Job> = vec![
        (1, "threshold normalization equivalence", secs(60), Box::new(move || normalization(seed))),
        (2, "exact-equivalence eliminations", secs(60), Box::new(move || exact_rewrites(seed))),
        (3, "equisatisfiability round trip", secs(600), Box::new(move || equisatisfiability(seed))),
        (4, "purity and non-punctuality", None, Box::new(move || purity(seed))),
        (5, "game suite", secs(300), Box::new(move || games(seed))),
        (6, "fixture fidelity", None, Box::new(fixtures)),
        (7, "determinism", None, Box::new(move || determinism(seed))),
    ];
    let mut outcomes: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(id, name, limit, run)| (id, name, limit, s.spawn(move || timed(id, name, limit, run))))
            .collect();
        handles
            .into_iter()
            .map(|(id, name, limit, h)| {
                h.join().unwrap_or_else(|_| Outcome {
                    id,
                    name,
                    pass: false,
                    detail: "panicked".into(),
                    elapsed: Duration::ZERO,
                    limit,
                })
            })
            .collect()
    });
    outcomes.sort_by_key(|o| o.id);
    let info = as_printed_counterexamples(seed);
    let mut all = true;
    for o in &outcomes {
        all &= o.pass;
        let limit = o
            .limit
            .map(|l| format!(" (limit {}s)", l.as_secs()))
            .unwrap_or_default();
        println!(
            "{} criterion {}: {} [{:.1}s{limit}] {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!("INFO {info}");
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
