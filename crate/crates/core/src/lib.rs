//! Exact-rational calculus for ramification data of local fields.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in this crate. The central object is a continuous
//! piecewise-linear function on the half-line in canonical breakpoint form
//! ([`plf::PlFunction`]). On top of it sit the three function calculi:
//!
//! * [`galois`]: decomposition functions `Sigma` built from the component
//!   data of a tensor square, slope arithmetic, and the derivative
//!   discontinuity diagnostics;
//! * [`gl`]: endo-class invariant profiles, their structure functions `Phi`,
//!   tame lifting, and the conductor/ultrametric formulas;
//! * [`herbrand`]: Herbrand functions `Psi = Phi^-1 o Sigma`, ramification
//!   radius transfer, twist-sample interpolation, and the boundary-slope
//!   checks.
//!
//! Ultrametric distance tables ([`ultrametric::UltrametricTable`]) carry the
//! distances `Delta` and `A` as data; they are validated, never derived from
//! group theory.

// errors carry the exact offending rationals and stay off the hot paths
#![allow(clippy::result_large_err)]

pub mod error;
pub mod galois;
pub mod gl;
pub mod herbrand;
pub mod json;
pub mod plf;
pub mod rat;
pub mod ultrametric;

pub use error::Error;
pub use plf::PlFunction;
pub use rat::Rat;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    /// Every value type is immutable after construction, so all of them are
    /// shareable across concurrent readers.
    #[test]
    fn values_are_send_and_sync() {
        fn ok<T: Send + Sync>() {}
        ok::<crate::PlFunction>();
        ok::<crate::galois::GaloisDecomposition>();
        ok::<crate::gl::EndoClassProfile>();
        ok::<crate::herbrand::HerbrandBundle>();
        ok::<crate::herbrand::TwistSample>();
        ok::<crate::ultrametric::UltrametricTable>();
    }
}
