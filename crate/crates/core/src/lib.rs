//! Quantify Bell non-locality as the trace distance to the local polytope.
//!
//! A behavior `q(a⃗|x⃗)` collects the outcome statistics of a multipartite Bell
//! experiment. The central quantity of this crate is
//!
//! ```text
//! NL(q) = min_{p local} Σ_x⃗ π(x⃗) · ½ Σ_a⃗ |q(a⃗|x⃗) − p(a⃗|x⃗)|
//! ```
//!
//! the minimum input-weighted trace distance from `q` to the polytope of
//! local-hidden-variable behaviors. It is computed exactly with a dense
//! linear program, comes with a dual certificate that lower-bounds it, and is
//! monotone under the free operations of the non-locality resource theory
//! (relabelings, mixing with local points, local post-processing, restricted
//! pre-processing, uncorrelated input enlarging).
//!
//! Module map:
//!
//! * [`scenario`]: scenarios, behaviors, input distributions, deterministic
//!   strategies, locality and non-signaling tests.
//! * [`lp`]: a self-contained dense simplex solver plus the assemblers for
//!   the non-locality programs.
//! * [`inequalities`]: CHSH, CGLMP(d), Inn22(n) and Mermin functionals with
//!   exact local bounds and LP non-signaling bounds.
//! * [`quantum`]: small dense complex layer producing Born-rule behaviors
//!   for the state families used by the inequality constructions.
//! * [`measures`]: NL, constrained NL, dual certificates, the CHSH closed
//!   form, EPR-2 non-local content, relative-entropy measure, Pinsker bound.
//! * [`freeops`]: the free operations, usable both as library features and
//!   as generators for monotonicity property tests.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for the float math fallback.
//!
//! ```
//! use belldist_core::measures::{chsh_closed_form, nl};
//! use belldist_core::scenario::{
//!     enumerate_strategies, make_pr_box, InputDistribution, Scenario,
//! };
//!
//! let scenario = Scenario::chsh();
//! let strategies = enumerate_strategies(&scenario)?;
//! let inputs = InputDistribution::uniform(scenario);
//!
//! let pr = make_pr_box();
//! let result = nl(&pr, &inputs, &strategies)?;
//! assert!((result.value - 0.25).abs() < 1e-9);
//! assert!((chsh_closed_form(&pr)? - 0.25).abs() < 1e-9);
//! # Ok::<(), belldist_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("belldist-core needs either the `std` or the `libm` feature");

pub mod freeops;
pub mod inequalities;
pub mod lp;
mod math;
mod matrix;
pub mod measures;
pub mod quantum;
pub mod scenario;

pub use matrix::Mat;
pub use scenario::{Behavior, InputDistribution, Scenario, StrategyMatrix};

use alloc::string::String;

/// Largest behavior dimension `n = Π m_k · Π d_k` a scenario may have.
pub const DIMENSION_CAP: u64 = 10_000_000;

/// Largest number of deterministic strategies `Π d_k^{m_k}` that may be
/// enumerated.
pub const STRATEGY_CAP: u64 = 10_000_000;

/// Feasibility and validity tolerance used across the crate.
pub const FEAS_TOL: f64 = 1e-9;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("scenario dimension {dim} exceeds the cap of {cap}")]
    ScenarioTooLarge { dim: u128, cap: u64 },
    #[error("{count} deterministic strategies exceed the cap of {cap}")]
    StrategyCapacity { count: u128, cap: u64 },
    #[error("empty scenario or a party with zero inputs/outputs")]
    DegenerateScenario,
    #[error("component {value} out of range for party {party} (limit {limit})")]
    IndexOutOfRange {
        party: usize,
        value: usize,
        limit: usize,
    },
    #[error("operands live on different scenarios")]
    ScenarioMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("invalid permutation")]
    InvalidPermutation,
    #[error("channel does not match the scenario arity")]
    ChannelArity,
    #[error("input channel violates the column-sum restriction (max {max})")]
    ChannelRestriction { max: f64 },
    #[error("functional requires a non-signaling behavior (violation {violation})")]
    NotNonsignaling { violation: f64 },
    #[error("linear program solver failed: {0}")]
    Solver(#[from] lp::SolverError),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
