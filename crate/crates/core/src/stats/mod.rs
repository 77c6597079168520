//! Weighted sums over Farey fractions and the classical statistics of
//! partial quotients.

mod classical;
mod mq;
mod weight;

pub use classical::*;
pub use mq::*;
pub use weight::*;
