//! Scalar and pair projections onto the constraint sets, with their
//! diagnostics: brackets, sign boxes, iteration counts, and the maximality
//! property that makes the projections well-defined.

use graph_kirchhoff::energy::{energy, ModelParams};
use graph_kirchhoff::fixtures;
use graph_kirchhoff::graph::{GraphFunction, VertexId};
use graph_kirchhoff::nehari::{pair_project, scalar_project};

fn main() {
    let (graph, dom) = fixtures::path(5);
    let params = ModelParams::constant(&dom, 1.0, 0.5, 0.25, 5.0, 1.0, 1, 1, 1.0, 1.0);
    let tol = 1e-10;

    // Scalar projection of a one-signed seed function.
    let u = fixtures::indicator(&dom, "v2");
    let proj = scalar_project(&graph, &dom, &params, &u, tol).unwrap();
    println!("scalar projection of the v2 indicator:");
    println!("  t0 = {}", proj.t0);
    println!("  bracket = {:?}, iterations = {}", proj.bracket, proj.iterations);
    println!("  residual (scale-normalized) = {:.3e}", proj.residual_f);
    let peak = energy(&graph, &dom, &params, &u.scaled(proj.t0)).unwrap().total;
    println!("  I(t0·u) = {peak}  (the maximum along the ray)");

    // Pair projection of a sign-changing function.
    let w = GraphFunction::from_interior_values(
        &dom,
        [
            (VertexId::from("v1"), 1.0),
            (VertexId::from("v2"), -0.25),
            (VertexId::from("v3"), -1.5),
        ],
    )
    .unwrap();
    let pair = pair_project(&graph, &dom, &params, &w, tol).unwrap();
    println!("pair projection of a sign-changing function:");
    println!("  (s0, t0) = ({}, {})", pair.s0, pair.t0);
    println!("  sign box = {:?}, iterations = {}", pair.box_bounds, pair.iterations);
    println!(
        "  residuals (scale-normalized) = ({:.3e}, {:.3e})",
        pair.residual_g, pair.residual_h
    );
    let member = GraphFunction::linear_comb(pair.s0, &w.pos_part(), pair.t0, &w.neg_part());
    println!(
        "  I(s0·w⁺ + t0·w⁻) = {}",
        energy(&graph, &dom, &params, &member).unwrap().total
    );
}
