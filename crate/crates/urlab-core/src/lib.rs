//! Exact computation laboratory for uniform reliability (UR) and
//! probabilistic query evaluation (PQE) over binary-signature instances.
//!
//! The crate is organized around a small ground data model ([`instance`]),
//! evaluable homomorphism-closed queries ([`query`]), exact counting and
//! probability kernels ([`reliability`]), edge-structure analysis and
//! critical-model search ([`structure`]), two hard weighted counting
//! problems on graphs ([`hardprob`]), and executable reduction pipelines
//! and gadget builders ([`pipelines`], [`gadgets`]).
//!
//! Everything reduction-facing uses exact rational arithmetic; floating
//! point is quarantined to the Monte Carlo estimator. All operations are
//! pure: instances are immutable values, and enumeration kernels expose
//! index ranges so callers can partition work without shared state.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod fixtures;
pub mod gadgets;
pub mod hardprob;
pub mod instance;
pub mod pipelines;
pub mod query;
pub mod reliability;
pub mod structure;
pub mod verify;

pub use error::Error;
pub use instance::{Edge, Fact, Homomorphism, Instance, Relation};
pub use query::Query;
pub use reliability::{Count, Probability, Tid};

// The exact-arithmetic types appear in public signatures; callers merge
// partial results with them.
pub use num_bigint;
pub use num_rational;
pub use num_traits;

/// Default cap on the number of facts for subset-enumeration operations.
///
/// Enumerations are `2^n`; exceeding the cap is an error, never a silent
/// approximation. Override per call site (CLI flag or environment).
pub const DEFAULT_SUBSET_CAP: usize = 24;

/// Hard ceiling on subset enumeration: masks are `u64`.
pub const MAX_SUBSET_CAP: usize = 60;
