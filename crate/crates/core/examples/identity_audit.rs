//! The randomized property suite: every identity and inequality the solver
//! relies on, checked on generated instances. Failures carry reproduction
//! seeds and serialized counterexamples.

use graph_kirchhoff::verify::run_suite;

fn main() {
    let report = run_suite(100, 42).unwrap();
    println!(
        "ran {} trials (seed {}) in {} ms",
        report.trials, report.seed, report.elapsed_ms
    );
    for check in &report.checks {
        println!(
            "  {:32} failures {:3}  skipped {:3}  worst violation {:.3e}",
            check.name, check.failures, check.skipped, check.worst_violation
        );
    }
    if report.total_failures() == 0 {
        println!("all checks passed");
        return;
    }
    for f in &report.failures {
        println!(
            "FAILURE {} at trial {} (seed {}): violation {:.3e}",
            f.check, f.trial, f.trial_seed, f.violation
        );
    }
    if report
        .failures
        .iter()
        .all(|f| f.check == "lq_embedding")
    {
        println!(
            "note: the embedding constant implemented here is only valid for norms with a \
             mass term; on weakly coupled graphs the bound genuinely fails for the pure \
             Dirichlet seminorm, so occasional lq_embedding failures are the expected, \
             honest outcome rather than a solver defect"
        );
    }
    std::process::exit(1);
}
