//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use totalwalk::experiments::{
    check_gap_symmetry, compare_spectrum, fit_csv, rows_to_csv, search_instance, sweep, Family, MarkedSelection,
    SearchOutcome, SweepConfig, SweepRow,
};
use totalwalk::graph::{
    complete_bipartite, complete_graph, cycle_graph, incidence_matrix, line_graph, petersen_graph, total_graph, Graph,
};
use totalwalk::knn::{
    kn_search_profile, knn_levels_with_phi2, knn_total_spectrum, total_kn_johnson_isomorphism, MarkedKind,
};
use totalwalk::matrix::Matrix;
use totalwalk::search::{check_zero_overlap, state_at, LevelWeights, SearchSetup, PMAX_SAMPLES};
use totalwalk::spectral::{symmetric_eig, EigOptions};
use totalwalk::{ElementLabel, Execution};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > budget {
        o.passed = false;
        o.detail.push_str(&format!("; took {elapsed:.1?}, budget {budget:?}"));
    } else {
        o.detail.push_str(&format!("; {elapsed:.1?}"));
    }
    o
}

fn spectrum_oracle() -> Outcome {
    let mut cases: Vec<(Family, usize)> = Vec::new();
    cases.extend((3..=12).map(|n| (Family::Kn, n)));
    cases.extend((2..=30).map(|n| (Family::Knn, n)));
    cases.extend((3..=12).map(|n| (Family::Cycle, n)));
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for &(family, n) in &cases {
        match compare_spectrum(family, n, Execution::default()) {
            Ok(c) => match c.max_diff {
                Some(d) if c.multiplicities_match => {
                    worst = worst.max(d);
                    if d > 1e-9 {
                        bad.push(format!("{family:?} {n}: diff {d:e}"));
                    }
                }
                _ => bad.push(format!("{family:?} {n}: multiplicities differ")),
            },
            Err(e) => bad.push(format!("{family:?} {n}: {e}")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} spectra, max |dphi| = {worst:.2e} {}", cases.len(), bad.join(", ")),
    )
}

/// Exact trace identities with the θ₀± pair handled through its symmetric
/// functions: `θ⁺ + θ⁻ = n − 2`, `θ⁺θ⁻ = −n`.
fn trace_identities_hold(n: i64, phi2: i64) -> bool {
    let pair = 2 * (n - 1);
    let trace = 2 * n + pair * (n - 2) + phi2 - 2 * (n - 1) * (n - 1) - n;
    let squares = 4 * n * n + pair * ((n - 2) * (n - 2) + 2 * n) + phi2 * phi2 + 4 * (n - 1) * (n - 1) + n * n;
    let dim = n * n + 2 * n;
    trace == 0 && squares == 2 * n * dim
}

fn erratum() -> Outcome {
    let mut bad = Vec::new();
    for n in 3..=30usize {
        let ni = n as i64;
        if !trace_identities_hold(ni, ni - 2) {
            bad.push(format!("n-2 fails at {n}"));
        }
        if trace_identities_hold(ni, ni - 4) {
            bad.push(format!("n-4 passes at {n}"));
        }
        let cf = knn_total_spectrum(n).unwrap().spectrum();
        let edges2 = (2 * n * (n * n + 2 * n)) as f64;
        if cf.trace().abs() > 1e-9 || (cf.trace_of_square() - edges2).abs() > 1e-9 * edges2 {
            bad.push(format!("closed form traces off at {n}"));
        }
        let printed = totalwalk::Spectrum::from_levels(&knn_levels_with_phi2(n, n as f64 - 4.0), 1e-9);
        if printed.trace().abs() < 0.5 {
            bad.push(format!("printed listing passes the trace at {n}"));
        }
    }
    outcome(bad.is_empty(), format!("n = 3..30 {}", bad.join(", ")))
}

fn incidence_identities() -> Outcome {
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    graphs.extend((3..=8).map(|n| (format!("K{n}"), complete_graph(n).unwrap())));
    graphs.extend((2..=6).map(|n| (format!("K{n},{n}"), complete_bipartite(n, n).unwrap())));
    graphs.extend((3..=12).map(|k| (format!("C{k}"), cycle_graph(k).unwrap())));
    graphs.push(("Petersen".into(), petersen_graph()));
    let mut bad = Vec::new();
    for (name, g) in &graphs {
        let r = g.regular_degree().unwrap() as i64;
        let inc = incidence_matrix(g).to_i64();
        let rrt = inc.matmul(&inc.transpose());
        let rtr = inc.transpose().matmul(&inc);
        let a = g.adjacency_i64();
        let al = line_graph(g).unwrap().adjacency_i64();
        let plus_diag = |m: &Matrix<i64>, d: i64| {
            Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] + if i == j { d } else { 0 })
        };
        if rrt != plus_diag(&a, r) || rtr != plus_diag(&al, 2) {
            bad.push(name.clone());
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} regular graphs {}", graphs.len(), bad.join(", ")),
    )
}

fn isomorphism() -> Outcome {
    let bad: Vec<String> = (2..=8)
        .filter_map(|n| total_kn_johnson_isomorphism(n).err().map(|e| format!("n={n}: {e}")))
        .collect();
    outcome(bad.is_empty(), format!("n = 2..8 {}", bad.join(", ")))
}

fn dense_runs() -> Vec<SearchOutcome> {
    let mut out = Vec::new();
    for n in [8, 16, 32] {
        for kind in [MarkedKind::Vertex, MarkedKind::Edge] {
            out.push(search_instance(Family::Knn, n, kind, None, PMAX_SAMPLES, Execution::default()).unwrap());
        }
    }
    out
}

fn success_probability(runs: &[SearchOutcome]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for r in runs {
        let nf = r.n as f64;
        let floor = 1.0 - 2.0 / nf - 5.0 / (nf * nf);
        let mut ok = r.p_max.p >= floor;
        let mut line = format!("{} {}: p_max {:.4} (floor {:.4}", r.n, r.kind, r.p_max.p, floor);
        if r.kind == MarkedKind::Vertex {
            let dev = (r.p_max.p - (1.0 - 14.0 / (9.0 * nf))).abs();
            let lim = 5.0 / (nf * nf);
            ok &= dev <= lim;
            line.push_str(&format!(", |p - (1 - 14/9n)| {dev:.4} vs {lim:.4}"));
        }
        line.push(')');
        if !ok {
            line.push_str(" FAIL");
        }
        passed &= ok;
        parts.push(line);
    }
    outcome(passed, parts.join("; "))
}

fn optimal_time(runs: &[SearchOutcome]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for r in runs {
        let ratio = r.p_max.t / r.t_reference;
        let ok = (ratio - 1.0).abs() <= 0.05;
        passed &= ok;
        parts.push(format!(
            "{} {}: t*/(pi sqrt(N)/2) = {ratio:.4}{}",
            r.n,
            r.kind,
            if ok { "" } else { " FAIL" }
        ));
    }
    outcome(passed, parts.join("; "))
}

fn full_sweep() -> Vec<SweepRow> {
    sweep(&SweepConfig::default(), Execution::default()).unwrap()
}

fn eps_scaling(rows: &[SweepRow]) -> Outcome {
    let csv = rows_to_csv(rows);
    let v = fit_csv(csv.as_bytes(), "eps_plus", Some(MarkedKind::Vertex)).unwrap();
    let e = fit_csv(csv.as_bytes(), "eps_plus", Some(MarkedKind::Edge)).unwrap();
    let in_band = |s: f64| (-0.51..=-0.47).contains(&s);
    let ok = in_band(v.slope) && (v.intercept + 0.079).abs() <= 0.02 && in_band(e.slope);
    outcome(
        ok,
        format!(
            "vertex slope {:.4} intercept {:.4}; edge slope {:.4} intercept {:.4}; {} points each",
            v.slope, v.intercept, e.slope, e.intercept, v.points
        ),
    )
}

fn hypothesis_one(rows: &[SweepRow]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for kind in [MarkedKind::Vertex, MarkedKind::Edge] {
        let subset: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == kind).collect();
        let c = check_gap_symmetry(&subset);
        passed &= c.passed;
        parts.push(format!(
            "{kind}: worst |e+ + e-|/(10 e^2) = {:.3} {}",
            c.worst, c.detail
        ));
    }
    outcome(passed, parts.join("; "))
}

fn hypothesis_two(rows: &[SweepRow]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for kind in [MarkedKind::Vertex, MarkedKind::Edge] {
        let worst = rows
            .iter()
            .filter(|r| r.kind == kind && r.n >= 20)
            .map(|r| r.prod_sum.abs() * (r.dimension as f64).sqrt())
            .fold(0.0, f64::max);
        passed &= worst <= 1.0;
        parts.push(format!("{kind}: max sqrt(N)|sum| = {worst:.4}"));
    }
    outcome(passed, parts.join("; "))
}

fn complete_graph_case() -> Outcome {
    let p = kn_search_profile(10, Execution::default()).unwrap();
    let ok = p.p_max.p >= 1.0 - 3.0 / 10.0 && p.sin2_correlation >= 0.99;
    outcome(
        ok,
        format!(
            "p_max {:.4} at t {:.3}, correlation {:.5}",
            p.p_max.p, p.p_max.t, p.sin2_correlation
        ),
    )
}

fn property_suites(rows: &[SweepRow]) -> Outcome {
    let mut bad = Vec::new();

    // unitarity
    let root = complete_bipartite(6, 6).unwrap();
    let t = total_graph(&root);
    let setup = SearchSetup::on_total_graph(&t, ElementLabel::Edge(7), 0.09).unwrap();
    let h = setup.diagonalize(&EigOptions::default()).unwrap();
    let mut unit_err: f64 = 0.0;
    for k in 0..20 {
        let psi = state_at(&h, setup.initial(), 3.7 * k as f64).unwrap();
        let nrm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        unit_err = unit_err.max((nrm - 1.0).abs());
    }
    if unit_err > 1e-10 {
        bad.push(format!("unitarity {unit_err:e}"));
    }

    // completeness and the zero-overlap checks
    let roots: Vec<Graph> = vec![
        complete_graph(5).unwrap(),
        complete_bipartite(4, 4).unwrap(),
        cycle_graph(6).unwrap(),
        cycle_graph(7).unwrap(),
        petersen_graph(),
    ];
    let mut completeness: f64 = 0.0;
    let mut prop3_failures = 0;
    for root in &roots {
        let t = total_graph(root);
        let a = t.graph().adjacency_f64();
        let a_eig = symmetric_eig(&a, 1e-12).unwrap();
        for label in [ElementLabel::Vertex(0), ElementLabel::Edge(root.m() - 1)] {
            let w = t.index_of(label).unwrap();
            let setup = SearchSetup::on_total_graph(&t, label, 0.3).unwrap();
            let lv = LevelWeights::from_eigensystem(&a_eig, w, setup.initial()).unwrap();
            completeness = completeness.max((lv.weight_sum() - 1.0).abs());
            let h = symmetric_eig(&setup.hamiltonian(), 1e-12).unwrap();
            if !check_zero_overlap(&setup, &h, a_eig.values()).unwrap().passed() {
                prop3_failures += 1;
            }
        }
    }
    if completeness > 1e-10 {
        bad.push(format!("completeness {completeness:e}"));
    }
    if prop3_failures > 0 {
        bad.push(format!("{prop3_failures} zero-overlap checks"));
    }

    // secular residual at λ± over the whole sweep
    let mut residual: f64 = 0.0;
    for r in rows {
        let levels = totalwalk::experiments::family_levels(Family::Knn, r.n, r.kind).unwrap();
        let rep = totalwalk::search::report(&levels, None).unwrap();
        residual = residual.max(rep.secular_residual);
    }
    if residual > 1e-12 {
        bad.push(format!("secular residual {residual:e}"));
    }

    // determinism
    let config = SweepConfig {
        n_min: 5,
        n_max: 41,
        marked: MarkedSelection::Both,
        ..SweepConfig::default()
    };
    let a = rows_to_csv(&sweep(&config, Execution::Parallel).unwrap());
    let b = rows_to_csv(&sweep(&config, Execution::Parallel).unwrap());
    let c = rows_to_csv(&sweep(&config, Execution::Sequential).unwrap());
    if a != b || a != c {
        bad.push("sweep CSV not byte-identical".into());
    }

    outcome(
        bad.is_empty(),
        format!(
            "unitarity {unit_err:.1e}, completeness {completeness:.1e}, secular residual {residual:.1e}, \
             zero-overlap failures {prop3_failures} {}",
            bad.join(", ")
        ),
    )
}

#[allow(clippy::vec_init_then_push)]
fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((
        1,
        "spectrum oracle equivalence",
        timed(Duration::from_secs(30), spectrum_oracle),
    ));
    results.push((2, "erratum resolution", timed(Duration::from_secs(1), erratum)));
    results.push((3, "incidence identities", incidence_identities()));
    results.push((4, "Johnson isomorphism", isomorphism()));

    let start = Instant::now();
    let runs = dense_runs();
    let dense_time = start.elapsed();
    let mut c5 = success_probability(&runs);
    c5.detail.push_str(&format!("; dense runs {dense_time:.1?}"));
    if dense_time > Duration::from_secs(120) {
        c5.passed = false;
    }
    results.push((5, "search success probability", c5));
    results.push((6, "optimal time", optimal_time(&runs)));

    let start = Instant::now();
    let rows = full_sweep();
    let sweep_time = start.elapsed();
    let mut c7 = eps_scaling(&rows);
    c7.detail.push_str(&format!("; sweep {sweep_time:.1?}"));
    if sweep_time > Duration::from_secs(60) {
        c7.passed = false;
    }
    results.push((7, "epsilon scaling", c7));
    results.push((8, "gap symmetry", hypothesis_one(&rows)));
    results.push((9, "overlap antisymmetry bound", hypothesis_two(&rows)));
    results.push((10, "complete graph search", complete_graph_case()));
    results.push((11, "property suites", property_suites(&rows)));

    let mut failed = 0;
    for (k, name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {k:>2} {name}: {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
