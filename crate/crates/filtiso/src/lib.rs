//! Exact computations with filtered isocrystals over a tamely ramified
//! coefficient field: Newton retractions and strata on the adjoint quotient,
//! weak admissibility with certificates, Harder-Narasimhan filtrations, and a
//! sweep verifying that weakly admissible filtrations exist exactly over the
//! closed stratum predicted by the filtration type.
//!
//! Start with the runnable examples:
//!
//! ```text
//! examples/
//!   field_arithmetic.rs      exact arithmetic and valuations in Q(pi)
//!   newton_polygon.rs        retraction of a point of the adjoint quotient
//!   strata.rs                dominance order and stratum membership
//!   filtration_types.rs      generic degrees and the stratum coweight
//!   slope_decomposition.rs   isocrystal slopes and stable subspaces
//!   weak_admissibility.rs    verdicts with certificates
//!   harder_narasimhan.rs     canonical slope filtrations
//!   existence_search.rs      seeded witness search for one cell
//!   theorem_sweep.rs         grid cross-check, JSON-lines reports
//!   reference_suite.rs       the built-in worked examples
//! ```
//!
//! Each runs with `cargo run --example NAME`. The same capabilities are
//! exposed by the thin `filtiso` binary; see README.md for the subcommands.

pub mod adjoint;
pub mod cli;
pub mod error;
pub mod field;
pub mod filtered;
pub mod filtype;
pub mod isocrystal;
pub mod linalg;
pub mod schema;
pub mod theorem;

pub use error::{Error, Result};
