//! Continued fractions: canonical expansions of rationals, exact
//! partial-quotient streams for reals, convergents and the enumeration of
//! intermediate convergents below a height bound.

mod convergents;
pub mod dyadic;
mod expansion;
mod stream;

pub use convergents::{convergents, cutoff, intermediates, ConvergentPair, Cutoff, Intermediate, Intermediates};
pub use expansion::{
    cf_of_fraction, cf_of_ratio, cf_of_rational, terminal_quotient, terminal_quotient_u64, value_of_cf,
    ContinuedFraction,
};
pub use stream::{PartialQuotientStream, StreamKind};

pub(crate) use stream::is_integer;
