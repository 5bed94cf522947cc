//! Thin command-line front end over the library: ingestion, solving,
//! verification, projections, and nonlinearity sampling.
//!
//! Exit codes: 0 success, 1 input/usage error, 2 validation error,
//! 3 convergence failure (including a failed doubling check), 4 property
//! failure in `verify`.

#![forbid(unsafe_code)]

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use graph_kirchhoff::energy::{nodal_ratio, EnergyError};
use graph_kirchhoff::graph::GraphError;
use graph_kirchhoff::io::{self, FileError};
use graph_kirchhoff::nehari::{pair_project, scalar_project, ProjectionError};
use graph_kirchhoff::solver::{solve, SolveConfig, SolveError, SolveMode};
use graph_kirchhoff::verify::{run_suite, VerifyError};

const EXIT_INPUT: i32 = 1;
const EXIT_VALIDATION: i32 = 2;
const EXIT_CONVERGENCE: i32 = 3;
const EXIT_PROPERTY: i32 = 4;

#[derive(Parser)]
#[command(
    name = "graphkirchhoff",
    about = "Ground-state and sign-changing solvers for Kirchhoff-type equations \
             with logarithmic nonlinearity on weighted finite graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ground and/or nodal levels and write a solve report.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, default_value_t = 16)]
        seeds: u32,
        /// Pointwise residual tolerance for convergence.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Constraint membership tolerance for projections.
        #[arg(long, default_value_t = 1e-10)]
        proj_tol: f64,
        #[arg(long, default_value_t = 7)]
        rng_seed: u64,
        #[arg(long, default_value_t = 2000)]
        max_iters: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the randomized property suite.
    Verify {
        #[arg(long)]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project a function onto the scalar or nodal constraint set.
    Project {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        params: PathBuf,
        /// Function file: a JSON object mapping vertex ids to values.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sample the log-nonlinearity ratio on a log-spaced grid to CSV.
    SampleNonlinearity {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        /// Range "A:B" with 0 < A < B.
        #[arg(long)]
        range: String,
        #[arg(long)]
        points: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a graph file against every invariant.
    Validate {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ground,
    Nodal,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Scalar,
    Pair,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let code = match &e {
            FileError::Read { .. } | FileError::Write { .. } | FileError::Json { .. } => {
                EXIT_INPUT
            }
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match &e {
            SolveError::BadConfig(_) => EXIT_INPUT,
            SolveError::InteriorTooSmall => EXIT_VALIDATION,
            SolveError::Energy(_) => EXIT_VALIDATION,
            SolveError::AllSeedsFailed(_) | SolveError::Projection(_) => EXIT_CONVERGENCE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ProjectionError> for Failure {
    fn from(e: ProjectionError) -> Self {
        let code = match &e {
            ProjectionError::ZeroFunction | ProjectionError::MissingSignPart => EXIT_VALIDATION,
            ProjectionError::Energy(EnergyError::Graph(GraphError::NonzeroBoundary(_, _))) => {
                EXIT_VALIDATION
            }
            ProjectionError::Energy(_) => EXIT_VALIDATION,
            _ => EXIT_CONVERGENCE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::new(EXIT_INPUT, e.to_string())
    }
}

fn main() {
    if let Ok(threads) = std::env::var("GRAPHKIRCHHOFF_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(EXIT_INPUT);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            graph,
            params,
            mode,
            seeds,
            tol,
            proj_tol,
            rng_seed,
            max_iters,
            out,
        } => cmd_solve(
            &graph, &params, mode, seeds, tol, proj_tol, rng_seed, max_iters, &out,
        ),
        Command::Verify { trials, seed, out } => cmd_verify(trials, seed, out.as_deref()),
        Command::Project {
            graph,
            params,
            input,
            kind,
            tol,
        } => cmd_project(&graph, &params, &input, kind, tol),
        Command::SampleNonlinearity {
            p,
            r,
            range,
            points,
            out,
        } => cmd_sample_nonlinearity(p, r, &range, points, &out),
        Command::Validate { graph } => cmd_validate(&graph),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    graph_path: &std::path::Path,
    params_path: &std::path::Path,
    mode: ModeArg,
    seeds: u32,
    tol: f64,
    proj_tol: f64,
    rng_seed: u64,
    max_iters: u32,
    out: &std::path::Path,
) -> Result<(), Failure> {
    let (graph, dom) = io::load_graph(graph_path)?;
    let params = io::load_params(params_path, &dom)?;
    let cfg = SolveConfig {
        seeds,
        rng_seed,
        grad_tol: tol,
        proj_tol,
        max_iters,
        ..SolveConfig::default()
    };
    let mode = match mode {
        ModeArg::Ground => SolveMode::Ground,
        ModeArg::Nodal => SolveMode::Nodal,
        ModeArg::Both => SolveMode::Both,
    };
    let report = solve(&graph, &dom, &params, &cfg, mode)?;
    io::write_json(out, &report)?;
    if let Some(c) = report.c_level {
        println!(
            "ground level c = {c} (max residual {})",
            report.residual_max_ground.unwrap_or(f64::NAN)
        );
    }
    if let Some(m) = report.m_level {
        println!(
            "nodal level m = {m} (max residual {})",
            report.residual_max_nodal.unwrap_or(f64::NAN)
        );
    }
    if let Some(ok) = report.doubling_ok {
        println!("energy doubling m >= 2c: {}", if ok { "ok" } else { "VIOLATED" });
        if !ok {
            return Err(Failure::new(
                EXIT_CONVERGENCE,
                format!(
                    "doubling check failed: m = {:?} < 2c = {:?}",
                    report.m_level,
                    report.c_level.map(|c| 2.0 * c)
                ),
            ));
        }
    }
    println!("report written to {}", out.display());
    Ok(())
}

fn cmd_verify(trials: u32, seed: u64, out: Option<&std::path::Path>) -> Result<(), Failure> {
    let report = run_suite(trials, seed)?;
    for check in &report.checks {
        println!(
            "{:32} trials {:4}  failures {:3}  skipped {:3}  worst violation {:.3e}",
            check.name, check.trials, check.failures, check.skipped, check.worst_violation
        );
    }
    if let Some(path) = out {
        io::write_json(path, &report)?;
        println!("report written to {}", path.display());
    }
    let failures = report.total_failures();
    if failures > 0 {
        for f in report.failures.iter().take(3) {
            eprintln!(
                "counterexample ({}, trial {}, seed {}): violation {:.3e}",
                f.check, f.trial, f.trial_seed, f.violation
            );
        }
        return Err(Failure::new(
            EXIT_PROPERTY,
            format!("{failures} property failure(s) in {} trials", report.trials),
        ));
    }
    println!("all checks passed over {} trials (seed {seed})", report.trials);
    Ok(())
}

fn cmd_project(
    graph_path: &std::path::Path,
    params_path: &std::path::Path,
    input: &std::path::Path,
    kind: KindArg,
    tol: f64,
) -> Result<(), Failure> {
    let (graph, dom) = io::load_graph(graph_path)?;
    let params = io::load_params(params_path, &dom)?;
    let u = io::load_function(input, &dom)?;
    let json = match kind {
        KindArg::Scalar => {
            let proj = scalar_project(&graph, &dom, &params, &u, tol)?;
            serde_json::to_string_pretty(&proj).expect("projection serializes")
        }
        KindArg::Pair => {
            let proj = pair_project(&graph, &dom, &params, &u, tol)?;
            serde_json::to_string_pretty(&proj).expect("projection serializes")
        }
    };
    println!("{json}");
    Ok(())
}

fn cmd_sample_nonlinearity(
    p: f64,
    r: f64,
    range: &str,
    points: u32,
    out: &std::path::Path,
) -> Result<(), Failure> {
    let (s_min, s_max) = parse_range(range)?;
    if points < 2 {
        return Err(Failure::new(EXIT_INPUT, "need at least 2 sample points"));
    }
    let mut rows = Vec::with_capacity(points as usize);
    for i in 0..points {
        let frac = f64::from(i) / f64::from(points - 1);
        let s = s_min * (s_max / s_min).powf(frac);
        let ratio = nodal_ratio(s, p, r)
            .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
        rows.push((s, ratio));
    }
    // Non-monotone iff some earlier sample exceeds a later one.
    let mut running_max = f64::NEG_INFINITY;
    let mut non_monotone = false;
    for &(_, ratio) in &rows {
        if ratio < running_max {
            non_monotone = true;
            break;
        }
        running_max = running_max.max(ratio);
    }
    let mut file = std::fs::File::create(out).map_err(|source| FileError::Write {
        path: out.display().to_string(),
        source,
    })?;
    let write = |file: &mut std::fs::File, text: String| -> Result<(), Failure> {
        file.write_all(text.as_bytes()).map_err(|source| {
            Failure::from(FileError::Write {
                path: out.display().to_string(),
                source,
            })
        })
    };
    write(&mut file, "s,ratio\n".to_owned())?;
    for (s, ratio) in &rows {
        write(&mut file, format!("{s},{ratio}\n"))?;
    }
    write(&mut file, format!("# non_monotone={non_monotone}\n"))?;
    println!("non_monotone={non_monotone}");
    println!("wrote {} samples to {}", rows.len(), out.display());
    Ok(())
}

fn parse_range(range: &str) -> Result<(f64, f64), Failure> {
    let err = || Failure::new(EXIT_INPUT, format!("bad range '{range}', expected A:B with 0 < A < B"));
    let (lo, hi) = range.split_once(':').ok_or_else(err)?;
    let lo: f64 = lo.trim().parse().map_err(|_| err())?;
    let hi: f64 = hi.trim().parse().map_err(|_| err())?;
    if !(lo > 0.0 && hi > lo) {
        return Err(err());
    }
    Ok((lo, hi))
}

fn cmd_validate(graph_path: &std::path::Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(graph_path).map_err(|source| FileError::Read {
        path: graph_path.display().to_string(),
        source,
    })?;
    let file: io::GraphFile =
        serde_json::from_str(&text).map_err(|source| FileError::Json {
            path: graph_path.display().to_string(),
            source,
        })?;
    match file.build() {
        Ok((graph, dom)) => {
            println!(
                "ok: {} vertices ({} interior, {} boundary)",
                graph.vertex_count(),
                dom.interior_count(),
                dom.boundary().len()
            );
            Ok(())
        }
        Err(FileError::Violations(violations)) => {
            for v in &violations {
                println!("violation: {v}");
            }
            Err(Failure::new(
                EXIT_VALIDATION,
                format!("{} violation(s)", violations.len()),
            ))
        }
        Err(e) => Err(e.into()),
    }
}
