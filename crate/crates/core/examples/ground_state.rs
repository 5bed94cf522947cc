//! Ground-state computation on the 6-cycle fixture: multi-start projected
//! descent to the minimum of the energy over the scalar constraint set.

use graph_kirchhoff::energy::ModelParams;
use graph_kirchhoff::fixtures;
use graph_kirchhoff::solver::{minimize_ground, SolveConfig};

fn main() {
    let (graph, dom) = fixtures::cycle6();
    // a = 1, Kirchhoff coupling b = 1/4, potential weight λ = 1/2,
    // log exponent p = 5 with r = 2, linear power law (2k/m = 2).
    let params = ModelParams::constant(&dom, 1.0, 0.25, 0.5, 5.0, 2.0, 1, 1, 1.0, 1.0);
    let cfg = SolveConfig::default();

    let result = minimize_ground(&graph, &dom, &params, &cfg).unwrap();
    println!("ground level c = {}", result.level);
    println!("winner seed    = {}", result.winner_seed);
    println!("max |residual| = {:.3e}", result.residual_max);
    println!("membership     = {:.3e}", result.membership);
    println!("minimizer:");
    for (x, v) in result.minimizer.values() {
        println!("  u({x}) = {v:+.6}");
    }
    let converged = result.per_seed.iter().filter(|s| s.converged).count();
    println!("{converged}/{} seeds converged", result.per_seed.len());
}
