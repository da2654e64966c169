//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Criteria in `KNOWN_UNATTAINABLE` still print FAIL when they fail, but do
//! not make the process exit non-zero. Any other failure, or a known one
//! that starts passing, exits 1.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use attractor_class::dynamics::{integrate_orbit, FnField, Point};
use attractor_class::example::{
    check_inequalities, halton_point, log_grid, verify_global_attraction, verify_instability,
    y_map,
};
use attractor_class::fixtures;
use attractor_class::generate::{all_feasible, random_feasible};
use attractor_class::synthesis::{
    build_block_layout, last_separatrix, prescribed_directions, synthesize_configuration, Q,
};
use attractor_class::{
    canonical_feasible_set, decide_equivalence, Configuration, FeasibleSet, OrientationChoice,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// pinned tolerances and sizes
const Y_LOWER_BOUND: f64 = 0.25;
const Y_MIN_RANGE: (f64, f64) = (0.80, 0.86);
const Y_GRID: (f64, f64, usize) = (1e-3, 10.0, 60);
const STEP: f64 = 1e-3;
const BUDGET: f64 = 1e4;
const ATTRACTION_SAMPLES: u64 = 100;
const ATTRACTION_BOX: (f64, f64) = (-5.0, 5.0);
const ATTRACTION_EPS: f64 = 0.05;
const INSTABILITY_START: Point = [0.0, 1e-4];
const INSTABILITY_EXIT: f64 = 0.25;
const INSTABILITY_ENTER: f64 = 0.05;
const INEQUALITY_DENSITY: usize = 200;
const ORDER_STEPS: [f64; 3] = [0.1, 0.05, 0.025];
const ORDER_RATIO: f64 = 8.0;
const ROUND_TRIP_SETS: usize = 200;
const ROUND_TRIP_MAX_KEYS: usize = 12;
const EXHAUSTIVE_MAX_KEYS: usize = 4;
const FIELD_SETS: usize = 50;
const FIELD_MAX_KEYS: usize = 12;
const LINE_SAMPLES: usize = 1000;
const TILING_YMAX: i128 = 3;
const SEED: u64 = 20_240_601;

// wall-clock limits, per criterion
const LIMITS: [u64; 10] = [1, 1, 10, 60, 60, 120, 10, 10, 1, 30];

const KNOWN_UNATTAINABLE: [usize; 2] = [1, 2];

// printed element lists, one string per row of each table
const TABLE1_ROWS: [&str; 3] = [
    "(1,2) (1,5/3)",
    "(1,1,0) (1,1,2) (1,1,1/3) (1,1,2/3)",
    "(1,1,1,0) (1,1,1,1) (1,1,1,1/3) (1,1,1,2/3)",
];
const TABLE2_ROWS: [&str; 5] = [
    "(1,2) (1,2/3)",
    "(1,1,0) (1,1,1) (1,1,1/3) (1,1,2/3)",
    "(2,1) (2,2/3)",
    "(3,2) (3,5/3)",
    "(3,1,0) (3,1,1) (3,1,1/3) (3,1,2/3)",
];
const TABLE3_ROWS: [&str; 13] = [
    "(1,5/3) (1,4)",
    "(1,1,0) (1,1,1/3) (1,1,2/3) (1,1,1)",
    "(1,2,0) (1,2,1/3) (1,2,2/3) (1,2,1)",
    "(1,3,0) (1,3,1/3) (1,3,2/3) (1,3,1)",
    "(2,2/3) (2,2)",
    "(2,1,0) (2,1,1/3) (2,1,8/3) (2,1,3)",
    "(2,1,1,0) (2,1,1,1/3) (2,1,1,2/3) (2,1,1,1)",
    "(2,1,2,0) (2,1,2,1/3) (2,1,2,2/3) (2,1,2,1)",
    "(3,2/3) (3,1)",
    "(4,5/3) (4,2)",
    "(4,1,0) (4,1,4/3) (4,1,5/3) (4,1,3)",
    "(4,1,1,0) (4,1,1,1/3) (4,1,1,2/3) (4,1,1,1)",
    "(4,1,2,0) (4,1,2,1/3) (4,1,2,2/3) (4,1,2,1)",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn printed(rows: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = rows
        .iter()
        .flat_map(|r| r.split_whitespace().map(str::to_string))
        .collect();
    v.sort();
    v
}

fn element_strings(l: &FeasibleSet) -> Vec<String> {
    let mut v: Vec<String> = l.elements().iter().map(ToString::to_string).collect();
    v.sort();
    v
}

fn criterion_tables() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let cases: [(&str, &str, &[&str]); 3] = [
        ("table1", fixtures::TABLE1_JSON, &TABLE1_ROWS),
        ("table2", fixtures::TABLE2_JSON, &TABLE2_ROWS),
        ("table3", fixtures::TABLE3_JSON, &TABLE3_ROWS),
    ];
    for (name, json, rows) in cases {
        match FeasibleSet::from_json(json) {
            Ok(l) => {
                let ok = element_strings(&l) == printed(rows);
                pass &= ok;
                notes.push(format!("{name}: valid, elements {}", if ok { "match" } else { "DIFFER" }));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

fn criterion_non_equivalence() -> Outcome {
    let l1 = fixtures::table1();
    let l2 = match fixtures::table2() {
        Ok(l) => l,
        Err(e) => return outcome(false, format!("table2 cannot be synthesized: {e}")),
    };
    let (c1, c2) = (synthesize_configuration(&l1), synthesize_configuration(&l2));
    match decide_equivalence(&c1, &c2) {
        Ok(eq) => outcome(!eq.equivalent, format!("equivalent = {}", eq.equivalent)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut first = None;
    for _ in 0..ROUND_TRIP_SETS {
        let l = random_feasible(&mut rng, ROUND_TRIP_MAX_KEYS);
        let cfg = synthesize_configuration(&l);
        let back = canonical_feasible_set(&cfg, OrientationChoice::Ccw, &last_separatrix(&l));
        if back.as_ref() != Ok(&l) {
            failures += 1;
            first.get_or_insert_with(|| l.to_string());
        }
    }
    outcome(
        failures == 0,
        format!("{ROUND_TRIP_SETS} sets, {failures} failures{}", match first {
            Some(s) => format!(", first {s}"),
            None => String::new(),
        }),
    )
}

/// The word read from the chosen separatrix, with orbit names replaced by
/// order of first appearance: equal signatures mean an order- and
/// orbit-preserving bijection between the words exists.
fn signature(cfg: &Configuration, sigma: &str) -> Vec<(usize, String, String)> {
    let marks = cfg.marks();
    let last = marks
        .iter()
        .rposition(|m| m.orbit == sigma)
        .expect("separatrix present in the word");
    let k = (last + 1) % marks.len();
    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    marks[k..]
        .iter()
        .chain(&marks[..k])
        .map(|m| {
            let next = names.len();
            let id = *names.entry(m.orbit.as_str()).or_insert(next);
            (id, format!("{:?}", m.end), format!("{:?}", m.class))
        })
        .collect()
}

fn criterion_uniqueness() -> Outcome {
    let sets: Vec<FeasibleSet> = all_feasible(EXHAUSTIVE_MAX_KEYS)
        .into_iter()
        .filter(|l| l.n() >= 2)
        .collect();
    let mut seen: BTreeMap<Vec<(usize, String, String)>, String> = BTreeMap::new();
    let mut clashes = Vec::new();
    for l in &sets {
        let sig = signature(&synthesize_configuration(l), &last_separatrix(l));
        if let Some(other) = seen.insert(sig, l.to_string()) {
            clashes.push(format!("{other} ~ {l}"));
        }
    }
    outcome(
        clashes.is_empty(),
        format!("{} sets, {} clashes {}", sets.len(), clashes.len(), clashes.join(" ")),
    )
}

fn criterion_crossing_bound() -> Outcome {
    let grid = log_grid(Y_GRID.0, Y_GRID.1, Y_GRID.2);
    match y_map(&grid, STEP, BUDGET) {
        Ok(points) => {
            let above = points.iter().all(|p| p.y > Y_LOWER_BOUND);
            let min = points
                .iter()
                .min_by(|a, b| a.y.total_cmp(&b.y))
                .expect("non-empty grid");
            let in_range = (Y_MIN_RANGE.0..=Y_MIN_RANGE.1).contains(&min.y);
            outcome(
                above && in_range && points.len() == Y_GRID.2,
                format!("all > {Y_LOWER_BOUND}: {above}; min Y = {:.6} at y0 = {:.3e}", min.y, min.y0),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_attraction() -> Outcome {
    let samples: Vec<Point> = (1..=ATTRACTION_SAMPLES)
        .map(|i| halton_point(i, ATTRACTION_BOX.0, ATTRACTION_BOX.1))
        .collect();
    let r = verify_global_attraction(&samples, ATTRACTION_EPS, STEP, BUDGET);
    let reached = r.entries.iter().filter(|e| e.reached).count();
    let longest = r
        .entries
        .iter()
        .map(|e| e.arc_length)
        .fold(0.0, f64::max);
    outcome(
        r.pass && r.entries.len() == samples.len(),
        format!("{reached}/{} reached, longest arc {longest:.3}", samples.len()),
    )
}

fn criterion_instability() -> Outcome {
    match verify_instability(INSTABILITY_START, INSTABILITY_EXIT, INSTABILITY_ENTER, STEP, BUDGET) {
        Ok(r) => outcome(
            r.exit_point.is_some() && r.entered_after_exit,
            format!("exit point {:?}, max radius {:.4}", r.exit_point, r.max_radius),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_inequalities() -> Outcome {
    let r = check_inequalities(INEQUALITY_DENSITY);
    let parts: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.violations.len(), c.samples))
        .collect();
    outcome(r.pass(), format!("violations/samples: {}", parts.join(", ")))
}

fn criterion_order() -> Outcome {
    // unit rotation field from (1,0) for arc length 1: exact end (cos 1, sin 1)
    let f = FnField::new(|p: Point| [-p[1], p[0]]);
    let exact = [1f64.cos(), 1f64.sin()];
    let errs: Vec<f64> = ORDER_STEPS
        .iter()
        .map(|&h| {
            integrate_orbit(&f, [1.0, 0.0], h, 1.0, &[])
                .map(|t| {
                    let e = t.end();
                    (e[0] - exact[0]).hypot(e[1] - exact[1])
                })
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    outcome(
        ratios.iter().all(|&r| r >= ORDER_RATIO),
        format!("errors {:?}, ratios {ratios:.2?}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()),
    )
}

fn qf(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

fn criterion_field() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut problems = Vec::new();
    let mut lines = 0;
    for _ in 0..FIELD_SETS {
        let l = random_feasible(&mut rng, FIELD_MAX_KEYS);
        let field = build_block_layout(&l);
        if let Err(e) = field.check_tiling(TILING_YMAX) {
            problems.push(format!("{l}: tiling {e}"));
            continue;
        }
        let expected: BTreeMap<_, _> = prescribed_directions(&l).into_iter().collect();
        if expected.len() != field.layout.orbit_lines.len() {
            problems.push(format!("{l}: {} lines for {} gaps", field.layout.orbit_lines.len(), expected.len()));
        }
        for line in &field.layout.orbit_lines {
            lines += 1;
            let Some(&right) = expected.get(&line.key) else {
                problems.push(format!("{l}: no rule for {}", line.key));
                continue;
            };
            let (a, b) = (qf(line.x0), qf(line.x1));
            for k in 0..LINE_SAMPLES {
                let x = a + (b - a) * (k as f64 + 0.5) / LINE_SAMPLES as f64;
                let v = field.eval([x, line.level as f64]);
                if v[1] != 0.0 || v[0] == 0.0 || (v[0] > 0.0) != right {
                    problems.push(format!("{l}: line {} at x = {x}: {v:?}", line.key));
                    break;
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{FIELD_SETS} sets, {lines} lines x {LINE_SAMPLES} points, {} problems{}",
            problems.len(),
            problems.first().map(|p| format!(", first {p}")).unwrap_or_default()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("fixture tables parse, validate and match the printed elements", criterion_tables),
        ("the two example flows are not equivalent", criterion_non_equivalence),
        ("synthesis/extraction round trip on random sets", criterion_round_trip),
        ("small-case uniqueness of the synthesized words", criterion_uniqueness),
        ("crossing map bound and minimum", criterion_crossing_bound),
        ("global attraction sampling", criterion_attraction),
        ("instability witness", criterion_instability),
        ("inequality grids", criterion_inequalities),
        ("integrator order", criterion_order),
        ("synthesis field invariants", criterion_field),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(LIMITS[i]);
        let pass = o.pass && in_time;
        let known = KNOWN_UNATTAINABLE.contains(&n);
        println!(
            "{} {n:>2} {name} [{:.2}s / {}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            LIMITS[i],
            if known && !pass { ", known unattainable" } else { "" },
            o.detail
        );
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria differ from the expected outcome");
        std::process::exit(1);
    }
}
