//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see them).
//!
//! Random instances use one pre-committed seed scheme (`BASE_SEED + index`),
//! fixed before any results were observed; no per-criterion reselection.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graph_kirchhoff::energy::{
    decomposition_gaps, energy, gateaux, ray_surplus, split_surplus, ModelParams,
};
use graph_kirchhoff::fixtures;
use graph_kirchhoff::graph::{
    embedding_constant, gamma, integrate, laplacian, lq_norm, sobolev_norm, Domain,
    GraphFunction, Region, VertexId, WeightedGraph,
};
use graph_kirchhoff::nehari::{
    pair_project, pair_project_from_box, scalar_project, RayPairing, SplitPairing,
};
use graph_kirchhoff::solver::{solve, SolveConfig, SolveMode};
use graph_kirchhoff::verify::{
    is_power_quotient_decreasing, log_power_margin, random_instance, Instance, SCALING_GRID,
};

const BASE_SEED: u64 = 42;

fn instance_stream(criterion: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + criterion);
    (0..count).map(|_| random_instance(&mut rng, 3..=40)).collect()
}

fn report(criterion: u32, label: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2} ({label}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({label}) failed: {detail}");
}

#[test]
fn criterion_01_decomposition_identities() {
    let start = Instant::now();
    let instances = instance_stream(1, 200);
    let mut worst = 0.0f64;
    for inst in &instances {
        let (g0, g1, g2) =
            decomposition_gaps(&inst.graph, &inst.dom, &inst.params, &inst.u).unwrap();
        worst = worst.max(g0).max(g1).max(g2);
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-10 && elapsed.as_secs_f64() < 10.0;
    report(
        1,
        "decomposition identities",
        pass,
        &format!("worst relative gap {worst:.3e} over 200 instances in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_split_scaling_inequality() {
    let start = Instant::now();
    let instances = instance_stream(2, 200);
    let mut most_negative = 0.0f64;
    let mut worst_at_one = 0.0f64;
    for inst in &instances {
        for &s in &SCALING_GRID {
            for &t in &SCALING_GRID {
                let surplus =
                    split_surplus(&inst.graph, &inst.dom, &inst.params, &inst.u, s, t).unwrap();
                most_negative = most_negative.min(surplus);
                if s == 1.0 && t == 1.0 {
                    worst_at_one = worst_at_one.max(surplus.abs());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = most_negative >= -1e-10 && worst_at_one <= 1e-10 && elapsed.as_secs_f64() < 30.0;
    report(
        2,
        "two-parameter scaling inequality",
        pass,
        &format!(
            "most negative surplus {most_negative:.3e}, |surplus(1,1)| ≤ {worst_at_one:.3e}, \
             200 instances × 81 grid points in {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_03_ray_scaling_inequality() {
    let instances = instance_stream(3, 200);
    let mut most_negative = 0.0f64;
    let mut worst_at_one = 0.0f64;
    for inst in &instances {
        for &t in &SCALING_GRID {
            let surplus = ray_surplus(&inst.graph, &inst.dom, &inst.params, &inst.u, t).unwrap();
            most_negative = most_negative.min(surplus);
            if t == 1.0 {
                worst_at_one = worst_at_one.max(surplus.abs());
            }
        }
    }
    let pass = most_negative >= -1e-10 && worst_at_one <= 1e-10;
    report(
        3,
        "ray scaling inequality",
        pass,
        &format!("most negative surplus {most_negative:.3e}, |surplus(1)| ≤ {worst_at_one:.3e}"),
    );
}

#[test]
fn criterion_04_gradient_consistency() {
    let instances = instance_stream(4, 200);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 400);
    for inst in &instances {
        for _ in 0..20 {
            let v = fixtures::random_function(&inst.dom, &mut rng);
            let analytic = gateaux(&inst.graph, &inst.dom, &inst.params, &inst.u, &v).unwrap();
            let plus = GraphFunction::linear_comb(1.0, &inst.u, h, &v);
            let minus = GraphFunction::linear_comb(1.0, &inst.u, -h, &v);
            let fd = (energy(&inst.graph, &inst.dom, &inst.params, &plus).unwrap().total
                - energy(&inst.graph, &inst.dom, &inst.params, &minus)
                    .unwrap()
                    .total)
                / (2.0 * h);
            worst = worst.max((analytic - fd).abs() / (1.0 + analytic.abs()));
        }
    }
    let pass = worst < 1e-6;
    report(
        4,
        "derivative vs central finite differences",
        pass,
        &format!("worst relative error {worst:.3e} over 200 instances × 20 directions"),
    );
}

#[test]
fn criterion_05_green_identity() {
    let instances = instance_stream(5, 200);
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 500);
    let mut worst = 0.0f64;
    for inst in &instances {
        let phi = fixtures::random_function(&inst.dom, &mut rng);
        let lap = laplacian(&inst.graph, &inst.dom, &inst.u).unwrap();
        let lhs: f64 = inst
            .dom
            .interior()
            .iter()
            .map(|x| inst.graph.measure(x).unwrap() * lap[x] * phi.values()[x])
            .sum();
        let mixed: std::collections::BTreeMap<VertexId, f64> = inst
            .dom
            .working_vertices()
            .map(|x| {
                (
                    x.clone(),
                    gamma(&inst.graph, &inst.dom, &inst.u, &phi, x).unwrap(),
                )
            })
            .collect();
        let rhs = integrate(&inst.graph, &inst.dom, &mixed, Region::Closure).unwrap();
        let scale = lhs.abs() + rhs.abs();
        worst = worst.max((lhs + rhs).abs() / (1.0 + scale));
    }
    let pass = worst <= 1e-10;
    report(
        5,
        "discrete Green identity",
        pass,
        &format!("worst scaled defect {worst:.3e} over 200 instances"),
    );
}

#[test]
fn criterion_06_lq_embedding() {
    let instances = instance_stream(6, 200);
    let mut worst_excess = 0.0f64;
    let mut violations: Vec<String> = Vec::new();
    for (index, inst) in instances.iter().enumerate() {
        let norm = sobolev_norm(&inst.graph, &inst.dom, &inst.u).unwrap();
        for q in [1.0, 2.0, 4.0, f64::INFINITY] {
            let lq = lq_norm(&inst.graph, &inst.dom, &inst.u, q).unwrap();
            let kq = embedding_constant(&inst.graph, &inst.dom, q).unwrap();
            let excess = lq - kq * norm;
            if excess > 0.0 {
                violations.push(format!(
                    "instance {index} ({} vertices, {} interior): q={q}, L^q norm {lq:.6} > \
                     K_q·‖u‖ = {:.6}",
                    inst.graph.vertex_count(),
                    inst.dom.interior_count(),
                    kq * norm
                ));
            }
            worst_excess = worst_excess.max(excess);
        }
    }
    // The claimed constant K_q = (Σμ)^(1/q)/√μ_min is valid for a norm with a
    // mass term but not for the gradient-only Dirichlet norm: on weakly
    // coupled stringy graphs, μ_min·(max effective resistance to the
    // boundary) exceeds 1 and the bound fails. A reproducible example is the
    // 6-path with unit measures and weights and the tent profile
    // (0, 1, 2, 4/3, 2/3, 0), whose sup-norm is 2 against ‖u‖ = √(10/3).
    // The check is kept exactly as specified; the sampled violations below
    // are genuine.
    let pass = violations.is_empty();
    report(
        6,
        "L^q embedding bound",
        pass,
        &format!(
            "{} violation(s), worst excess {worst_excess:.3e} over 200 instances × 4 exponents \
             [{}]",
            violations.len(),
            violations.join("; ")
        ),
    );
}

#[test]
fn criterion_07_projections() {
    // Independent 1-D oracle for the P3 indicator: root of t³ ln t = 2.
    let oracle = {
        let f = |t: f64| t * t * t * t.ln() - 2.0;
        let (mut lo, mut hi) = (1.0f64, 4.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (graph3, dom3) = fixtures::path(3);
    let params3 = ModelParams::constant(&dom3, 1.0, 0.0, 0.0, 5.0, 1.0, 5, 2, 1.0, 1.0);
    let ind = fixtures::indicator(&dom3, "v1");
    let p3 = scalar_project(&graph3, &dom3, &params3, &ind, 1e-10).unwrap();
    let oracle_gap = (p3.t0 - oracle).abs();

    let instances = instance_stream(7, 50);
    let mut worst_membership = 0.0f64;
    let mut worst_maximality = 0.0f64;
    for inst in &instances {
        // Scalar projection: membership (via the projector and via the
        // generic derivative, on the pairing's term scale) and maximality.
        let ray = RayPairing::new(&inst.graph, &inst.dom, &inst.params, &inst.u).unwrap();
        let proj = scalar_project(&inst.graph, &inst.dom, &inst.params, &inst.u, 1e-10).unwrap();
        worst_membership = worst_membership.max(proj.residual_f);
        let member = inst.u.scaled(proj.t0);
        let direct = gateaux(&inst.graph, &inst.dom, &inst.params, &member, &member).unwrap();
        let scale = ray.term_scale(proj.t0);
        worst_membership = worst_membership.max(direct.abs() / (1.0 + scale));
        let peak = energy(&inst.graph, &inst.dom, &inst.params, &member).unwrap().total;
        for i in 1..=64 {
            let t = 2.0 * proj.t0 * f64::from(i) / 64.0;
            let val = energy(&inst.graph, &inst.dom, &inst.params, &inst.u.scaled(t))
                .unwrap()
                .total;
            worst_maximality = worst_maximality.max((val - peak) / (1.0 + peak.abs() + scale));
        }

        // Pair projection on a sign-changing variant.
        let u = if inst.u.has_positive_values() && inst.u.has_negative_values() {
            inst.u.clone()
        } else {
            continue;
        };
        let pairing = SplitPairing::new(&inst.graph, &inst.dom, &inst.params, &u).unwrap();
        let pair = pair_project(&inst.graph, &inst.dom, &inst.params, &u, 1e-10).unwrap();
        worst_membership = worst_membership.max(pair.residual_g.max(pair.residual_h));
        let pos = u.pos_part();
        let neg = u.neg_part();
        let member = GraphFunction::linear_comb(pair.s0, &pos, pair.t0, &neg);
        let g = gateaux(&inst.graph, &inst.dom, &inst.params, &member, &pos.scaled(pair.s0))
            .unwrap();
        let h = gateaux(&inst.graph, &inst.dom, &inst.params, &member, &neg.scaled(pair.t0))
            .unwrap();
        let scale_g = pairing.positive_scale(pair.s0, pair.t0);
        let scale_h = pairing.negative_scale(pair.s0, pair.t0);
        worst_membership = worst_membership.max(g.abs() / (1.0 + scale_g));
        worst_membership = worst_membership.max(h.abs() / (1.0 + scale_h));
        let peak = energy(&inst.graph, &inst.dom, &inst.params, &member).unwrap().total;
        let (alpha, beta) = pair.box_bounds;
        for i in 0..16 {
            for j in 0..16 {
                let s = alpha + (beta - alpha) * f64::from(i) / 15.0;
                let t = alpha + (beta - alpha) * f64::from(j) / 15.0;
                let combined = GraphFunction::linear_comb(s, &pos, t, &neg);
                let val = energy(&inst.graph, &inst.dom, &inst.params, &combined)
                    .unwrap()
                    .total;
                worst_maximality = worst_maximality
                    .max((val - peak) / (1.0 + peak.abs() + scale_g.max(scale_h)));
            }
        }
    }

    // Uniqueness probe: 8 distinct starting boxes per instance.
    let probes = instance_stream(70, 10);
    let mut worst_probe = 0.0f64;
    for inst in &probes {
        let u = if inst.u.has_positive_values() && inst.u.has_negative_values() {
            inst.u.clone()
        } else {
            continue;
        };
        let reference = pair_project(&inst.graph, &inst.dom, &inst.params, &u, 1e-10).unwrap();
        for j in 1..=8 {
            let factor = 2f64.powi(j);
            let probe = pair_project_from_box(
                &inst.graph,
                &inst.dom,
                &inst.params,
                &u,
                1e-10,
                (reference.s0 / factor, reference.t0 * factor),
            )
            .unwrap();
            worst_probe = worst_probe.max(
                ((probe.s0 - reference.s0).abs() / (1.0 + reference.s0))
                    .max((probe.t0 - reference.t0).abs() / (1.0 + reference.t0)),
            );
        }
    }

    let pass = oracle_gap < 1e-9
        && worst_membership <= 1e-10
        && worst_maximality <= 1e-10
        && worst_probe <= 1e-9;
    report(
        7,
        "projections",
        pass,
        &format!(
            "oracle gap {oracle_gap:.3e}, membership ≤ {worst_membership:.3e}, maximality \
             excess ≤ {worst_maximality:.3e}, uniqueness probe spread ≤ {worst_probe:.3e}"
        ),
    );
}

#[test]
fn criterion_08_energy_doubling_on_fixtures() {
    let start = Instant::now();
    let fixtures_list: Vec<(&str, (WeightedGraph, Domain))> = vec![
        ("P4", fixtures::path(4)),
        ("P5", fixtures::path(5)),
        ("C6", fixtures::cycle6()),
        ("S5", fixtures::star(5)),
        ("grid4x4", fixtures::grid4x4()),
    ];
    let cfg = SolveConfig::default(); // 16 seeds
    let mut detail = String::new();
    let mut pass = true;
    for (name, (graph, dom)) in &fixtures_list {
        let params = ModelParams::constant(dom, 1.0, 0.25, 0.5, 5.0, 2.0, 1, 1, 1.0, 1.0);
        let rep = solve(graph, dom, &params, &cfg, SolveMode::Both).unwrap();
        let c = rep.c_level.unwrap();
        let m = rep.m_level.unwrap();
        let res_ok = rep.residual_max_ground.unwrap() <= 1e-8
            && rep.residual_max_nodal.unwrap() <= 1e-8;
        let doubling = m >= 2.0 * c - 1e-8;
        pass = pass && res_ok && doubling;
        detail.push_str(&format!(
            "{name}: c={c:.6}, m={m:.6}, m/c={:.3}{}{} · ",
            m / c,
            if doubling { "" } else { " DOUBLING-FAIL" },
            if res_ok { "" } else { " RESIDUAL-FAIL" }
        ));
    }
    let elapsed = start.elapsed();
    pass = pass && elapsed.as_secs_f64() < 120.0;
    detail.push_str(&format!("total {elapsed:.2?} with 16 seeds each"));
    report(8, "energy doubling m ≥ 2c", pass, &detail);
}

#[test]
fn criterion_09_decoupling_oracle() {
    let (graph, dom) = fixtures::path(5);
    let params = ModelParams::constant(&dom, 1.0, 0.0, 0.0, 5.0, 1.0, 5, 2, 1.0, 1.0);
    let u = GraphFunction::from_interior_values(
        &dom,
        [(VertexId::from("v1"), 1.0), (VertexId::from("v3"), -1.0)],
    )
    .unwrap();
    let pair = pair_project(&graph, &dom, &params, &u, 1e-10).unwrap();
    let s_scalar = scalar_project(&graph, &dom, &params, &u.pos_part(), 1e-10)
        .unwrap()
        .t0;
    let t_scalar = scalar_project(&graph, &dom, &params, &u.neg_part(), 1e-10)
        .unwrap()
        .t0;
    let gap = (pair.s0 - s_scalar).abs().max((pair.t0 - t_scalar).abs());
    let pass = gap < 1e-9;
    report(
        9,
        "decoupling of the pair projection",
        pass,
        &format!(
            "pair ({:.12}, {:.12}) vs scalar ({s_scalar:.12}, {t_scalar:.12}), gap {gap:.3e}",
            pair.s0, pair.t0
        ),
    );
}

#[test]
fn criterion_10_scalar_facts() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 10);
    // Exact zero at tau = 1.
    let at_one = log_power_margin(1.0, 6.3, 2.5).unwrap();
    let mut worst_margin = f64::INFINITY;
    for _ in 0..10_000 {
        let tau = loop {
            let t: f64 = rng.gen_range(0.001..6.0);
            if (t - 1.0).abs() > 1e-6 {
                break t;
            }
        };
        let p = rng.gen_range(2.0f64..9.0) + 1e-9;
        let r = rng.gen_range(1.0..6.0);
        worst_margin = worst_margin.min(log_power_margin(tau, p, r).unwrap());
    }
    let mut quotient_failures = 0u32;
    for _ in 0..10_000 {
        let base = loop {
            let b: f64 = rng.gen_range(0.01..4.0);
            if (b - 1.0).abs() > 1e-3 {
                break b;
            }
        };
        let x1: f64 = rng.gen_range(0.01..4.0);
        let x2 = x1 + rng.gen_range(0.01..4.0);
        if !is_power_quotient_decreasing(base, x1, x2).unwrap() {
            quotient_failures += 1;
        }
    }
    let pass = at_one == 0.0 && worst_margin > 0.0 && quotient_failures == 0;
    report(
        10,
        "scalar margin and quotient monotonicity",
        pass,
        &format!(
            "margin at 1 = {at_one} (exact), min margin {worst_margin:.3e} over 10⁴ samples, \
             {quotient_failures} quotient failures over 10⁴ triples"
        ),
    );
}

#[test]
fn criterion_11_nonlinearity_sampler_flags_dip() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_graphkirchhoff");
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for (p, r) in [(7.0, 5.0), (6.0, 6.0), (9.0, 2.0), (8.0, 3.0)] {
        let out = dir.path().join(format!("ratio_{p}_{r}.csv"));
        let output = std::process::Command::new(bin)
            .args([
                "sample-nonlinearity",
                "--p",
                &p.to_string(),
                "--r",
                &r.to_string(),
                "--range",
                "0.01:5",
                "--points",
                "1000",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&output.stdout);
        let flagged = output.status.success() && stdout.contains("non_monotone=true");
        let file = std::fs::read_to_string(&out).unwrap_or_default();
        let file_flagged = file.trim_end().ends_with("# non_monotone=true");
        pass = pass && flagged && file_flagged;
        detail.push_str(&format!("({p},{r}):{} ", if flagged { "flagged" } else { "MISSED" }));
    }
    let elapsed = start.elapsed();
    pass = pass && elapsed.as_secs_f64() < 1.0;
    detail.push_str(&format!("in {elapsed:.2?}"));
    report(11, "log-nonlinearity ratio dip", pass, &detail);
}
