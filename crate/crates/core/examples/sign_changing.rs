//! Sign-changing (nodal) ground state on the 4×4 grid with a Dirichlet
//! frame, and the energy-doubling relation m ≥ 2c between the nodal and
//! ground levels.

use graph_kirchhoff::energy::ModelParams;
use graph_kirchhoff::fixtures;
use graph_kirchhoff::solver::{check_doubling, solve, SolveConfig, SolveMode};

fn main() {
    let (graph, dom) = fixtures::grid4x4();
    let params = ModelParams::constant(&dom, 1.0, 0.25, 0.5, 5.0, 2.0, 1, 1, 1.0, 1.0);
    let cfg = SolveConfig::default();

    let report = solve(&graph, &dom, &params, &cfg, SolveMode::Both).unwrap();
    let c = report.c_level.unwrap();
    let m = report.m_level.unwrap();
    println!("ground level c = {c}");
    println!("nodal  level m = {m}");
    println!("ratio m/c      = {}", report.ratio.unwrap());
    println!(
        "doubling m ≥ 2c − {:.0e}: {}",
        report.doubling_tol,
        check_doubling(&report, report.doubling_tol).unwrap()
    );

    let nodal = report.nodal_state.unwrap();
    let positive = nodal.values().values().filter(|v| **v > 0.0).count();
    let negative = nodal.values().values().filter(|v| **v < 0.0).count();
    println!("nodal minimizer: {positive} positive and {negative} negative vertices");
    println!(
        "max residuals: ground {:.3e}, nodal {:.3e}",
        report.residual_max_ground.unwrap(),
        report.residual_max_nodal.unwrap()
    );
}
