//! Exact scalar arithmetic and the continued-fraction engine.
//!
//! The geometry modules consume three layers from here:
//!
//! 1. [`ExactScalar`] — exact elements of one real quadratic field Q(sqrt d);
//! 2. [`RatInterval`] / [`Scalar`] — validated enclosures, so that stream
//!    irrationals flow through the same code paths without silent rounding;
//! 3. [`RealSpec`] — expansions, convergents, `||q alpha||`, and the
//!    depth-bounded approximability verdict.

mod cf;
mod interval;
mod scalar;
mod value;

pub use cf::{badly_approximable_to_depth, ApproxVerdict, Convergent, QuotientStream, RealSpec};
pub use interval::RatInterval;
pub use scalar::ExactScalar;
pub use value::{AlphaSymbol, Scalar};

pub(crate) use value::one_half;
