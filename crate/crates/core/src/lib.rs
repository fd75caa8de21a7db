//! Numerical laboratory for simulation-function contractions.
//!
//! The crate verifies, on discretized metric spaces, the machinery behind
//! Z-contractions: simulation-function axioms, the contraction inequality
//! `zeta(d(Tx,Ty), d(x,y)) >= 0`, and the convergence behaviour of Picard
//! iteration (asymptotic regularity, orbit boundedness, windowed Cauchy
//! modulus).
//!
//! Modules:
//!
//! * [`expr`] — parser/evaluator for the scalar expressions that define
//!   metrics `d(x,y)`, self-maps `T(x)`, simulation functions `zeta(t,s)`
//!   and their inner functions.
//! * [`metric`] — domains (interval grids, finite point sets), metric
//!   axiom verification, self-map closure checks.
//! * [`simfun`] — the catalogue of simulation functions (Banach, Rhoades,
//!   psi-phi, ratio, Geraghty, Boyd–Wong, integral-type, custom) and the
//!   numeric axiom checker.
//! * [`contraction`] — the Z-contraction verifier, the distance-preservation
//!   diagnostic, the per-family classifier and a brute-force fixed-point
//!   oracle for finite spaces.
//! * [`picard`] — Picard iteration with convergence diagnostics and trace
//!   export (CSV/JSON).
//! * [`randgen`] — seeded generation of random finite metric spaces and
//!   self-maps for randomized property suites.
//!
//! Everything is deterministic: identical inputs produce byte-identical
//! reports, and parallel-free scans always report the lexicographically
//! smallest witness of a failure.

// Negated comparisons like `!(v > 0.0)` are load-bearing in the validation
// scans: NaN must fail a check, and the positive rewrite would let it pass.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contraction;
pub mod expr;
pub mod metric;
pub mod picard;
pub mod quad;
pub mod randgen;
pub mod report;
pub mod simfun;

pub use contraction::{brute_force_fixed_points, check_distance_preservation, classify, verify_z};
pub use metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
pub use picard::{iterate, IterateParams, IterationTrace, IterationVerdict};
pub use report::{CheckResult, VerificationReport, Witness};
pub use simfun::{check_axioms, SequenceFamily, SimulationFunction};
