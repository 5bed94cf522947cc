//! Variational calculus and ground-state solvers for Kirchhoff-type equations
//! with logarithmic nonlinearity on weighted finite graphs.
//!
//! The library models a bounded domain as a finite working graph split into an
//! interior and a Dirichlet boundary, builds the discrete differential calculus
//! (μ-Laplacian, gradient form, weighted integrals), and minimizes the energy
//! functional
//!
//! ```text
//! I(u) = a/2 ∫|∇u|² dμ + b/4 (∫|∇u|² dμ)² + (m/2k) ∫ λ g |u|^(2k/m) dμ
//!        + r/p² ∫ Q |u|^p dμ − 1/p ∫ Q |u|^p ln|u|^r dμ
//! ```
//!
//! over the Nehari set (ground states) and over its sign-changing refinement
//! (nodal ground states). Every identity and inequality the construction rests
//! on — decomposition of the energy into sign parts, the two-parameter scaling
//! inequality, embedding bounds, and the energy-doubling relation `m ≥ 2c` —
//! is exposed as an executable check in [`verify`].
//!
//! Start with the runnable programs under `examples/`:
//!
//! * `graph_calculus` — Laplacian, gradient form, and the discrete Green identity
//! * `ground_state` — projected descent to the ground-state level `c`
//! * `sign_changing` — nodal solve and the `m ≥ 2c` check
//! * `projections` — scalar and pair projections onto the constraint sets
//! * `identity_audit` — the randomized property suite
//! * `nonlinearity_profile` — sampling the log-nonlinearity ratio to CSV
//!
//! A thin CLI (`graphkirchhoff`) drives the same entry points from JSON files.

#![forbid(unsafe_code)]
// Validation uses `!(x > 0.0)` rather than `x <= 0.0` so that NaN fails too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod nehari;
pub mod solver;
pub mod verify;


pub use graph::{CrossTerms, Domain, GraphFunction, Region, VertexId, WeightedGraph};


