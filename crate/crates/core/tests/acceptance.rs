//! The acceptance battery. Every criterion prints one line with its verdict
//! followed by the report lines it was decided on; the test fails if any
//! criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use tiling_semigroup::filters::{build_plaque_universe, build_universe};
use tiling_semigroup::report::Report;
use tiling_semigroup::semigroup::TilingSemigroup;
use tiling_semigroup::suites::{self, assumptions, filters, groupoid, semigroup};
use tiling_semigroup::{SubstitutionSystem, Vec2};

const SEED: u64 = 20240611;
const CRITERION_1_BUDGET: Duration = Duration::from_secs(120);
const BATTERY_BUDGET: Duration = Duration::from_secs(600);
const RANDOM_TRIPLES: usize = 10_000;
const NONZERO_PAIRS: usize = 1_000;
const MIN_DETERMINATE_COVERAGE: f64 = 0.90;
const FILTER_WINDOWS: [(&str, usize); 3] = [("chair", 17), ("checkerboard", 17), ("solid", 16)];
const FILTER_SEARCH_LIMIT: usize = 10_000_000;
const REPETITIVITY_RADIUS: u32 = 64;
const GERMS: groupoid::Population = groupoid::Population { radius: 2, max_tiles: 3, reach: 2 };

fn out(line: &str) {
    // bypasses the test harness's output capture
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

fn system(name: &str) -> TilingSemigroup {
    TilingSemigroup::new(SubstitutionSystem::builtin(name).expect("shipped system"))
}

struct Outcome {
    passed: bool,
}

fn conclude(n: u32, title: &str, report: &Report, extra_ok: bool, started: Instant, detail: &str) -> Outcome {
    let passed = report.passed() && extra_ok && !report.lines().is_empty();
    let verdict = if passed { "pass" } else { "fail" };
    let (p, f, i) = report.counts("");
    out(&format!(
        "criterion {n} [{title}]: {verdict} ({:.1} s; checks pass={p} fail={f} indet={i}{detail})",
        started.elapsed().as_secs_f64()
    ));
    for l in report.lines() {
        out(&format!("    {}\t{}\t{}", l.check, l.fingerprint, l.verdict));
    }
    Outcome { passed }
}

#[test]
fn acceptance_battery() {
    let battery = Instant::now();
    let chair = system("chair");
    let mut outcomes = Vec::new();

    // 1
    let started = Instant::now();
    let mut report = Report::new("inverse semigroup");
    let big = chair.enumerate_elements(2, 6).expect("enumeration");
    let small = chair.enumerate_elements(1, 4).expect("enumeration");
    semigroup::regularity(&chair, &big, "chair r=2 n=6", &mut report);
    semigroup::commuting_idempotents(&chair, &big, "chair r=2 n=6", &mut report);
    semigroup::associativity(&chair, &small, "chair r=1 n=4", &mut report);
    semigroup::random_associativity(&chair, &big, RANDOM_TRIPLES, SEED, "chair r=2 n=6", &mut report);
    let in_time = started.elapsed() <= CRITERION_1_BUDGET;
    let detail = format!("; elements={} budget={}s", big.len(), CRITERION_1_BUDGET.as_secs());
    outcomes.push(conclude(1, "inverse-semigroup certification", &report, in_time, started, &detail));

    // 2
    let started = Instant::now();
    let mut report = Report::new("nonzero criterion");
    let ball = 2 * semigroup::patch_reach(&big);
    let windows = chair.system().realized_windows(ball, 32).expect("windows");
    semigroup::nonzero_criterion(&chair, &big, &windows, NONZERO_PAIRS, SEED, "chair r=2 n=6 R=32", &mut report);
    outcomes.push(conclude(2, "nonzero-product criterion", &report, true, started, ""));
    drop(big);

    // 3
    let started = Instant::now();
    let mut report = Report::new("germ equivalence");
    let windows = chair.system().realized_windows(3, 16).expect("windows");
    let plaques = build_plaque_universe(&chair, 4, 81).expect("universe");
    groupoid::germ_equivalence(&chair, &windows, &plaques, GERMS, "chair R=16", &mut report).expect("sweep");
    drop(plaques);
    outcomes.push(conclude(3, "germ equivalence", &report, true, started, ""));

    // 4
    let started = Instant::now();
    let mut report = Report::new("alpha");
    groupoid::alpha_isomorphism(&chair, &windows, GERMS, "chair R=16", &mut report).expect("sweep");
    outcomes.push(conclude(4, "alpha isomorphism at scale", &report, true, started, ""));

    // 5
    let started = Instant::now();
    let mut report = Report::new("commuting diagram");
    let universe = build_universe(&chair, 2, 4).expect("universe");
    let elements = chair.enumerate_elements(2, 4).expect("enumeration");
    filters::commuting_diagram(
        &chair,
        &elements,
        &windows,
        &universe,
        MIN_DETERMINATE_COVERAGE,
        "chair R=16",
        &mut report,
    )
    .expect("sweep");
    let detail = format!("; min coverage={MIN_DETERMINATE_COVERAGE}");
    outcomes.push(conclude(5, "commuting diagram", &report, true, started, &detail));

    // 6
    let started = Instant::now();
    let mut report = Report::new("xi filters");
    for (k, (name, count)) in FILTER_WINDOWS.into_iter().enumerate() {
        let sg = system(name);
        let u = build_universe(&sg, 2, 4).expect("universe");
        let ws = suites::seeded_windows(sg.system(), count, 16, 48, SEED + k as u64).expect("windows");
        filters::xi_is_filter(&sg, &ws, &u, &format!("{name} R=16 seed={}", SEED + k as u64), &mut report)
            .expect("sweep");
    }
    let maximal = build_plaque_universe(&chair, 3, 49).expect("universe");
    filters::xi_is_ultrafilter(&chair, &windows, &maximal, "chair R=16", &mut report).expect("sweep");
    let solid = system("solid");
    let tiny = build_universe(&solid, 1, 4).expect("universe");
    filters::reconstruction(&solid, &tiny, FILTER_SEARCH_LIMIT, "solid", &mut report).expect("enumeration");
    outcomes.push(conclude(6, "xi filters and ultrafilters", &report, true, started, ""));

    // 7
    let started = Instant::now();
    let mut report = Report::new("psi injectivity");
    let atlas_windows = chair.system().realized_windows(3, 3).expect("windows");
    filters::psi_injectivity(&atlas_windows, &maximal, "chair atlas r=3", &mut report).expect("sweep");
    outcomes.push(conclude(7, "psi injectivity", &report, true, started, ""));

    // 8
    let started = Instant::now();
    let mut report = Report::new("assumptions");
    assumptions::saturation(chair.system(), 3, &mut report).expect("saturation");
    assumptions::period(chair.system(), 16, None, &mut report).expect("period");
    assumptions::period(solid.system(), 8, Some(Vec2::new(1, 0)), &mut report).expect("period");
    let rep = assumptions::repetitivity(chair.system(), 2, REPETITIVITY_RADIUS, 64, &mut report);
    let in_time = battery.elapsed() <= BATTERY_BUDGET;
    let detail = format!(
        "; r0={} battery={:.1} s budget={}s",
        rep.as_ref().map_or("unbounded".to_string(), |r| r.to_string()),
        battery.elapsed().as_secs_f64(),
        BATTERY_BUDGET.as_secs()
    );
    outcomes.push(conclude(8, "assumptions harness", &report, in_time && rep.is_ok(), started, &detail));

    let failed: Vec<usize> = outcomes.iter().enumerate().filter(|(_, o)| !o.passed).map(|(k, _)| k + 1).collect();
    out(&format!("acceptance: {} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len()));
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
