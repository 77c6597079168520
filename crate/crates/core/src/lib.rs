//! Exact continued-fraction machinery for intermediate convergents and Farey
//! indicator sums, together with a seeded Monte Carlo harness that checks
//! their almost-everywhere asymptotics on uniformly sampled reals.
//!
//! Module map:
//! - [`exact`]: reduced fractions mod 1, mediants, heights.
//! - [`cf`]: canonical expansions, partial-quotient streams, convergents,
//!   the cutoff `N(Q, x)`, `a(Q, x)` and intermediate-convergent enumeration.
//! - [`farey`]: Farey neighbors, the indicator `chi`, exact expectations and
//!   Farey enumeration.
//! - [`stats`]: weights, `M_Q(x)` by three independent routes and the
//!   classical metric statistics.
//! - [`harness`]: experiment configs, deterministic parallel runs, CSV/JSON.

pub mod arith;
pub mod cf;
pub mod error;
pub mod exact;
pub mod farey;
pub mod harness;
pub mod stats;

pub use error::{Error, Result};
