//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured extremes. Every tolerance is fixed here, not computed.
//!
//! Criteria:
//!  1. converging trees reproduce c = n with rank n - 1 (the n - c formula fails)
//!  2. rank(L) = n - sink_count with semisimple zero, exhaustive n <= 4 + 1000 random
//!  3. enumerative in-forest dimension == sink count on every enumerable instance
//!  4. wcc <= d <= scc on every instance
//!  5. spectrum localization over 10,000 random weighted digraphs
//!  6. forest matrix == long-run limit (1e-8) == resolvent (1e-6)
//!  7. projector algebra: idempotent, annihilates L, rank d, stochastic rows
//!  8. primitive strongly connected limits equal v w^T
//!  9. trajectories end at the projected initial state; Cesaro on the periodic instance
//! 10. CLI analyze output matches the stored golden reports

use lapforest::digraph::{laplacian, Arc, Digraph};
use lapforest::dynamics::{self, LongRunMode};
use lapforest::{components, forests, random, spectral};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Random weighted digraphs sized for forest enumeration (density shrinks
/// with n), deterministic for a given seed.
fn enumerable_instances(seed: u64, count: usize, n_max: usize) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random::random_digraph(&mut rng, n_max, i % 2 == 0))
        .collect()
}

#[test]
fn criterion_01_converging_tree_counterexample() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in 2..=8 {
        let mut cases = vec![random::converging_path(n)];
        cases.push(random::random_converging_tree(&mut rng, n, false));
        cases.push(random::random_converging_tree(&mut rng, n, true));
        for g in cases {
            let decomposition = components::decompose(&g);
            assert_eq!(decomposition.scc_count, n, "c = n for a converging tree");
            assert_eq!(decomposition.sink_count, 1, "single sink: the root");
            let family = forests::enumerate_maximal_in_forests(&g).unwrap();
            assert_eq!(family.dimension(), 1);
            let report = spectral::spectrum(&laplacian(&g), None).unwrap();
            assert_eq!(report.numerical_rank, n - 1, "rank(L) = n - 1");
            let naive = n as i64 - decomposition.scc_count as i64;
            assert_eq!(naive, 0);
            assert_ne!(
                naive, report.numerical_rank as i64,
                "the n - c prediction must be flagged incorrect"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "required under 1 s, took {elapsed:?}");
    println!("criterion 01 PASS: converging trees n=2..8, c=n, d=1, rank=n-1, n-c flagged ({elapsed:?})");
}

#[test]
fn criterion_02_rank_law() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in 1..=4 {
        for g in random::all_digraphs(n) {
            let d = components::decompose(&g).sink_count;
            let report = spectral::spectrum(&laplacian(&g), None).unwrap();
            assert_eq!(report.numerical_rank, g.n() - d, "rank law on {}", g.to_edge_list());
            assert_eq!(report.zero_multiplicity, d, "zero multiplicity on {}", g.to_edge_list());
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.05..=0.6);
        let g = random::random_digraph_with(&mut rng, n, p, true);
        let d = components::decompose(&g).sink_count;
        let report = spectral::spectrum(&laplacian(&g), None).unwrap();
        assert_eq!(report.numerical_rank, g.n() - d, "rank law on {}", g.to_edge_list());
        assert_eq!(report.zero_multiplicity, d, "zero multiplicity on {}", g.to_edge_list());
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "required under 60 s, took {elapsed:?}");
    println!("criterion 02 PASS: rank(L) = n - d with semisimple zero on {checked} digraphs ({elapsed:?})");
}

#[test]
fn criterion_03_dimension_equivalence() {
    let mut checked = 0usize;
    for n in 1..=4 {
        for g in random::all_digraphs(n) {
            let family = forests::enumerate_maximal_in_forests(&g).unwrap();
            let sink_count = components::decompose(&g).sink_count;
            assert_eq!(family.dimension(), sink_count, "on {}", g.to_edge_list());
            checked += 1;
        }
    }
    for g in enumerable_instances(303, 500, 10) {
        let family = forests::enumerate_maximal_in_forests(&g)
            .expect("acceptance instances stay within the enumeration budget");
        let sink_count = components::decompose(&g).sink_count;
        assert_eq!(family.dimension(), sink_count, "on {}", g.to_edge_list());
        checked += 1;
    }
    println!("criterion 03 PASS: enumerative d == sink count on {checked} instances");
}

#[test]
fn criterion_04_weak_strong_bounds() {
    let mut checked = 0usize;
    for n in 1..=4 {
        for g in random::all_digraphs(n) {
            let d = components::decompose(&g);
            let dim = components::forest_dimension_structural(&d);
            assert!(d.wcc_count <= dim && dim <= d.scc_count, "on {}", g.to_edge_list());
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..2000 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.05..=0.6);
        let weighted = rng.gen_bool(0.5);
        let g = random::random_digraph_with(&mut rng, n, p, weighted);
        let d = components::decompose(&g);
        let dim = components::forest_dimension_structural(&d);
        assert!(d.wcc_count <= dim && dim <= d.scc_count, "on {}", g.to_edge_list());
        checked += 1;
    }
    println!("criterion 04 PASS: wcc <= d <= scc on {checked} instances");
}

#[test]
fn criterion_05_spectrum_localization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.05..=0.7);
        // Weights uniform in (0, 10].
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(p) {
                    let w = 10.0 * (1.0 - rng.gen::<f64>());
                    arcs.push(Arc::new(i, j, w));
                }
            }
        }
        let g = Digraph::new(n, arcs).unwrap();
        let report = spectral::spectrum(&laplacian(&g), None).unwrap();
        assert!(
            spectral::check_spectrum_localization(&report, report.tolerance),
            "localization failed on {}",
            g.to_edge_list()
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "required under 120 s, took {elapsed:?}");
    println!("criterion 05 PASS: localization on {checked} random weighted digraphs ({elapsed:?})");
}

#[test]
fn criterion_06_markov_chain_tree_theorem() {
    let mut worst_power: f64 = 0.0;
    let mut worst_resolvent: f64 = 0.0;
    let mut checked = 0usize;
    let mut run = |g: &Digraph| {
        let family = forests::enumerate_maximal_in_forests(g)
            .expect("acceptance instances stay within the enumeration budget");
        let jbar = forests::forest_matrix(&family);
        let l = laplacian(g);

        let p = dynamics::perron(&l, None).unwrap();
        assert!(p.is_stochastic() && p.has_positive_diagonal());
        let power = dynamics::long_run_matrix(&p, LongRunMode::Power, None, None).unwrap();
        let dp = max_abs_diff(&power, jbar.matrix());
        assert!(dp <= 1e-8, "power limit vs forests: {dp:e} on {}", g.to_edge_list());
        worst_power = worst_power.max(dp);

        let resolvent = spectral::eigenprojector_resolvent(&l, 1e8).unwrap();
        let dr = max_abs_diff(&resolvent, jbar.matrix());
        assert!(dr <= 1e-6, "resolvent vs forests: {dr:e} on {}", g.to_edge_list());
        worst_resolvent = worst_resolvent.max(dr);
        checked += 1;
    };
    for n in 1..=4 {
        for g in random::all_digraphs(n) {
            run(&g);
        }
    }
    for g in enumerable_instances(606, 400, 10) {
        run(&g);
    }
    println!(
        "criterion 06 PASS: long-run and resolvent match the forest matrix on {checked} instances \
         (worst power {worst_power:.2e} <= 1e-8, worst resolvent {worst_resolvent:.2e} <= 1e-6)"
    );
}

#[test]
fn criterion_07_eigenprojector_algebra() {
    let mut checked = 0usize;
    let mut run = |g: &Digraph| {
        let family = forests::enumerate_maximal_in_forests(g)
            .expect("acceptance instances stay within the enumeration budget");
        let jbar = forests::forest_matrix(&family);
        let m = jbar.matrix();
        let l = laplacian(g);
        let d = family.dimension();

        let idem = max_abs_diff(&(m * m), m);
        assert!(idem <= 1e-10, "idempotence: {idem:e} on {}", g.to_edge_list());

        let lj = (l.matrix() * m).abs().max();
        let jl = (m * l.matrix()).abs().max();
        assert!(lj <= 1e-10 && jl <= 1e-10, "L J = J L = 0: {lj:e}/{jl:e} on {}", g.to_edge_list());

        let rank = spectral::numerical_rank(m, 1e-6).unwrap();
        assert_eq!(rank, d, "rank(J) = d on {}", g.to_edge_list());

        for i in 0..g.n() {
            let row_sum: f64 = m.row(i).sum();
            assert!((row_sum - 1.0).abs() <= 1e-12, "row sums on {}", g.to_edge_list());
        }
        checked += 1;
    };
    for n in 1..=4 {
        for g in random::all_digraphs(n) {
            run(&g);
        }
    }
    for g in enumerable_instances(707, 400, 10) {
        run(&g);
    }
    println!("criterion 07 PASS: J idempotent, annihilates L, rank d, stochastic rows on {checked} instances");
}

#[test]
fn criterion_08_primitive_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut checked = 0usize;
    for i in 0..300 {
        let g = random::random_strongly_connected(&mut rng, 10, i % 2 == 0);
        let l = laplacian(&g);
        let p = dynamics::perron(&l, None).unwrap();
        assert!(p.is_stochastic());
        assert!(
            p.is_primitive(),
            "default epsilon must make a strongly connected graph primitive: {}",
            g.to_edge_list()
        );
        let lim = dynamics::primitive_limit(&p).unwrap();
        let norm = (lim.left.dot(&lim.right) - 1.0).abs();
        assert!(norm <= 1e-12, "v.w normalization: {norm:e}");
        let power = dynamics::long_run_matrix(&p, LongRunMode::Power, None, None).unwrap();
        let diff = max_abs_diff(&lim.outer, &power);
        assert!(diff <= 1e-8, "power limit vs v w^T: {diff:e} on {}", g.to_edge_list());
        checked += 1;
    }
    println!("criterion 08 PASS: primitive limits equal v w^T on {checked} strongly connected graphs");
}

#[test]
fn criterion_09_dynamics_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut checked = 0usize;
    for _ in 0..150 {
        let g = random::random_digraph(&mut rng, 8, true);
        let n = g.n();
        let l = laplacian(&g);
        let family = forests::enumerate_maximal_in_forests(&g)
            .expect("acceptance instances stay within the enumeration budget");
        let jbar = forests::forest_matrix(&family);
        let d = family.dimension();
        let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        let target = jbar.matrix() * &x0;

        let p = dynamics::perron(&l, None).unwrap();
        let r = p.subdominant_modulus();
        let steps = if r <= 0.0 {
            2 * n
        } else {
            ((40.0 / -r.ln()).ceil() as usize).clamp(2 * n, 200_000)
        };
        let discrete = dynamics::simulate_discrete(&p, &x0, steps).unwrap();
        let last = discrete.states.last().unwrap();
        let dev = (last - &target).abs().max();
        assert!(dev <= 1e-6, "discrete deviation {dev:e} on {}", g.to_edge_list());

        let report = spectral::spectrum(&l, None).unwrap();
        let t_end = report.min_positive_real_part.map(|re| 20.0 / re).unwrap_or(1.0);
        let dt = if l.max_diagonal() > 0.0 { 0.25 / l.max_diagonal() } else { 0.1 };
        let continuous = dynamics::simulate_continuous(&l, &x0, t_end, dt).unwrap();
        let clast = continuous.states.last().unwrap();
        let cdev = (clast - &target).abs().max();
        assert!(cdev <= 1e-6, "continuous deviation {cdev:e} on {}", g.to_edge_list());

        if d == 1 {
            let spread = last.max() - last.min();
            let cspread = clast.max() - clast.min();
            assert!(spread <= 1e-6 && cspread <= 1e-6, "consensus spread on {}", g.to_edge_list());
        }
        checked += 1;
    }

    // The periodic instance: P = [[0,1],[1,0]] from the 2-cycle at eps = 1.
    let l = laplacian(&Digraph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap());
    let p = dynamics::perron(&l, Some(1.0)).unwrap();
    assert_eq!(p.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    let cesaro = dynamics::long_run_matrix(&p, LongRunMode::Cesaro, None, None).unwrap();
    let uniform = DMatrix::from_element(2, 2, 0.5);
    let cd = max_abs_diff(&cesaro, &uniform);
    assert!(cd <= 1e-4, "Cesaro limit of the periodic instance: {cd:e}");

    println!("criterion 09 PASS: trajectories reach the projected limit on {checked} instances; periodic Cesaro {cd:.2e} <= 1e-4");
}

#[test]
fn criterion_10_cli_golden_reports() {
    let bin = env!("CARGO_BIN_EXE_lapforest");
    let cases = [
        ("fixtures/converging_path_n3.edges", "tests/golden/converging_path_n3.json", [1.0, 0.0, 0.0].as_slice()),
        ("fixtures/asymmetric_2cycle.edges", "tests/golden/asymmetric_2cycle.json", [1.0 / 3.0, 2.0 / 3.0].as_slice()),
    ];
    for (fixture, golden, expected_row) in cases {
        let fixture_path = format!("{}/{fixture}", env!("CARGO_MANIFEST_DIR"));
        let golden_path = format!("{}/{golden}", env!("CARGO_MANIFEST_DIR"));
        let output = std::process::Command::new(bin)
            .args(["analyze", &fixture_path, "--json"])
            .output()
            .expect("run lapforest analyze");
        assert!(
            output.status.success(),
            "analyze must exit 0, got {:?}; stderr: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        let got: serde_json::Value =
            serde_json::from_slice(&output.stdout).expect("analyze emits valid JSON");
        let want: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(&golden_path).expect("golden file present"),
        )
        .expect("golden file is valid JSON");
        assert_eq!(got, want, "JSON report drifted from the golden file {golden}");

        // The golden values themselves must match the enumeration oracle.
        let matrix = got["forest"]["matrix"].as_array().unwrap();
        for row in matrix {
            let row = row.as_array().unwrap();
            assert_eq!(row.len(), expected_row.len());
            for (entry, want) in row.iter().zip(expected_row) {
                let value: f64 = entry.as_str().unwrap().parse().unwrap();
                assert!(
                    (value - want).abs() < 1e-15,
                    "golden forest matrix entry {value} != {want}"
                );
            }
        }
        assert_eq!(got["all_checks_pass"], serde_json::Value::Bool(true));
    }
    println!("criterion 10 PASS: CLI analyze matches the stored golden reports with exit 0");
}
