//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any failure is not a recorded deviation.

mod common;

use std::time::{Duration, Instant};

use common::KlOracle;
use soergel::coxeter::preset;
use soergel::hecke::Laurent;
use soergel::suites::{
    affine_suite, dxy_suite, hw_rank_suite, lightleaves_suite, pieri_suite, realization_suite, universal_suite, valid_presets,
    Assertion, SuiteResult, homformula_suite,
};

const MAIN_PRESETS: [&str; 4] = ["A2", "B2", "universal3", "affine-A2"];

struct Outcome {
    id: u8,
    title: &'static str,
    failures: Vec<Assertion>,
    /// Failures that match a recorded deviation exactly.
    recorded: Vec<String>,
    checked: usize,
    elapsed: Duration,
    limit: Duration,
}

fn per_group(names: &[&str], run: impl Fn(&soergel::coxeter::CoxeterGroup) -> SuiteResult) -> Vec<SuiteResult> {
    names.iter().map(|n| run(&preset(n).unwrap())).collect()
}

fn collect(id: u8, title: &'static str, limit_secs: u64, run: impl FnOnce() -> Vec<SuiteResult>) -> Outcome {
    let start = Instant::now();
    let results = run();
    let checked = results.iter().map(|r| r.assertions.len()).sum();
    let failures = results.iter().flat_map(|r| r.failures().into_iter().cloned()).collect();
    Outcome { id, title, failures, recorded: Vec::new(), checked, elapsed: start.elapsed(), limit: Duration::from_secs(limit_secs) }
}

/// The computed `H_e` coefficient of the KL basis element for `stustu`
/// differs from the stated `v^4+v^6`; accepted as a recorded deviation only
/// if it equals the independent oracle value.
fn classify_universal(mut o: Outcome) -> Outcome {
    let g = preset("universal3").unwrap();
    let w = g.element(&[0, 1, 2, 0, 1, 2]);
    let oracle = KlOracle::new(&g).h(&g.identity(), &w);
    let stated = Laurent::from_terms(&[(4, 1), (6, 1)]);
    let (recorded, rest): (Vec<_>, Vec<_>) = o.failures.into_iter().partition(|a| {
        a.name == "universal.kl_coefficient" && oracle != stated && a.details.starts_with(&format!("computed {oracle},"))
    });
    o.recorded = recorded.iter().map(|a| format!("{}: {} (independent oracle: {oracle})", a.name, a.details)).collect();
    o.failures = rest;
    o
}

fn main() {
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let jobs: Vec<std::thread::ScopedJoinHandle<Outcome>> = vec![
            s.spawn(|| collect(1, "d-values", 120, || per_group(&MAIN_PRESETS, |g| dxy_suite(g, 5)))),
            s.spawn(|| collect(2, "Pieri rule", 120, || per_group(&MAIN_PRESETS, |g| pieri_suite(g, 4)))),
            s.spawn(|| collect(3, "H_w graded rank", 300, || per_group(&MAIN_PRESETS, |g| hw_rank_suite(g, 5)))),
            s.spawn(|| collect(4, "light leaves", 300, || per_group(&["universal2", "universal3", "ra3"], |g| lightleaves_suite(g, 5)))),
            s.spawn(|| collect(5, "hom formula", 600, || per_group(&["A2", "universal3"], |g| homformula_suite(g, 6, false)))),
            s.spawn(|| collect(6, "finite-group control", 600, || per_group(&["A2", "B2"], |g| homformula_suite(g, 6, true)))),
            s.spawn(|| classify_universal(collect(7, "universal rank-3 example", 600, || vec![universal_suite()]))),
            s.spawn(|| collect(8, "affine A2 example", 1800, || vec![affine_suite()])),
            s.spawn(|| {
                let mut names = valid_presets();
                names.push("gkm-violation");
                collect(9, "realization axioms", 300, || vec![realization_suite(&names, 6)])
            }),
        ];
        jobs.into_iter().map(|j| j.join().expect("criterion panicked")).collect()
    });
    let mut unexpected = false;
    for o in &outcomes {
        let timely = o.elapsed <= o.limit;
        let pass = o.failures.is_empty() && o.recorded.is_empty() && timely;
        println!(
            "criterion {}: {} ({}; {} assertions; {:.1}s of {}s)",
            o.id,
            if pass { "PASS" } else { "FAIL" },
            o.title,
            o.checked,
            o.elapsed.as_secs_f64(),
            o.limit.as_secs()
        );
        for f in &o.failures {
            println!("    failed {}: {}", f.name, f.details);
        }
        for r in &o.recorded {
            println!("    recorded deviation {r}");
        }
        if !timely {
            println!("    over time limit");
        }
        unexpected |= !o.failures.is_empty() || !timely;
    }
    if unexpected {
        std::process::exit(1);
    }
}
