//! Exact simulation of the real Rel flow on slit double covers of flat tori.
//!
//! A point of the locus studied here is two identical copies of a flat torus
//! glued along a straight slit. The crate provides, entirely in exact
//! arithmetic (big rationals, real quadratic irrationals, and validated
//! enclosures for other irrationals):
//!
//! * a continued-fraction engine with best approximants and `||q alpha||`
//!   ([`exact`]);
//! * the normalized torus with slit reduction through mod-2 intersection
//!   parities ([`torus`]);
//! * the two-colored "checkerboard" decomposition cut out by a long slit and
//!   its short representative, with exact areas ([`checkerboard`]);
//! * period coordinates with the shear action, Rel flow and tremors
//!   ([`surface`]);
//! * the recurrence experiments comparing the Rel orbit behaviour against the
//!   approximability class of the torus modulus ([`experiments`]);
//! * JSON forms of tori, slits, surfaces and period tuples ([`codec`]).
//!
//! ```
//! use reltori::exact::RealSpec;
//!
//! let golden = RealSpec::builtin("golden").unwrap();
//! let quotients = golden.cf_expand(6).unwrap();
//! assert!(quotients[1..].iter().all(|a| *a == 1u32.into()));
//! ```

pub mod error;
pub mod exact;
pub mod torus;
pub mod checkerboard;
pub mod surface;
pub mod experiments;
pub mod codec;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests so the book cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/continued-fractions.md")]
    mod continued_fractions {}
    #[doc = include_str!("../../../book/src/slit-tori.md")]
    mod slit_tori {}
    #[doc = include_str!("../../../book/src/checkerboards.md")]
    mod checkerboards {}
    #[doc = include_str!("../../../book/src/rel-and-tremors.md")]
    mod rel_and_tremors {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments_guide {}
}
