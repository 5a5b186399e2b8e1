//! Crate-wide error type.

use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Error)]
pub enum Error {
    // scalars
    #[error("cannot parse `{0}` as a rational a/b")]
    BadRational(String),
    #[error("{0} is not prime")]
    NotPrime(u64),

    // piecewise-linear core
    #[error("a piecewise-linear function needs at least one breakpoint")]
    EmptyBreakpoints,
    #[error("breakpoint abscissae must start at x >= 0 and increase strictly")]
    UnorderedBreakpoints,
    #[error("x = {x} lies outside the domain [{start}, +inf)")]
    OutsideDomain { x: Rat, start: Rat },
    #[error("not invertible: the segment starting at x = {at} has slope {slope} <= 0")]
    NotInvertible { at: Rat, slope: Rat },
    #[error("not invertible on the half-line: value {0} at the domain start is negative")]
    NegativeInverseDomain(Rat),
    #[error("the range of the inner function leaves the domain of the outer function")]
    DomainMismatch,
    #[error("scale factor must be a positive integer")]
    ZeroScale,
    #[error("{0} must be a positive integer")]
    NonPositive(&'static str),
    #[error("max-affine mean needs a nonempty term list")]
    EmptyTerms,
    #[error("max-affine mean needs a term with a >= 1, b = 0 to increase strictly")]
    NoLinearTerm,
    #[error("weight must be a positive integer")]
    ZeroWeight,
    #[error("breakpoint csv: {0}")]
    BadCsv(String),

    // ultrametric tables
    #[error("ultrametric table: {0}")]
    BadTable(String),
    #[error("table fails ultrametric validation: {0}")]
    InvalidTable(String),

    // galois side
    #[error("decomposition invariant violated: {0}")]
    BadDecomposition(String),
    #[error("slope needs dim >= 1")]
    ZeroDim,
    #[error("no solution: {varsigma} lies below the least value {at_start}")]
    PairingBelowRange { varsigma: Rat, at_start: Rat },
    #[error("the function has no derivative jump (tame data)")]
    NoJumps,
    #[error("empty distance list")]
    EmptyDistances,

    // gl side
    #[error("profile invariant violated: {0}")]
    BadProfile(String),
    #[error("minimality violated: gcd({m}, {e}) != 1")]
    NotMinimal { m: u64, e: u64 },
    #[error("profile is not totally wild (e = deg = p^r required)")]
    NotTotallyWild,
    #[error("pairing input invariant violated: d must be 0 when n1 != n2")]
    BadPairingInput,
    #[error("structure functions disagree at a = {at}: {left} != {right}")]
    PairingMismatch { at: Rat, left: Rat, right: Rat },
    #[error("varsigma table is not an ultrametric: {0}")]
    VarsigmaNotUltrametric(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    // herbrand side
    #[error("no valid Herbrand function: sigma(0) = {sigma0} < phi(0) = {phi0}")]
    HerbrandBelowRange { sigma0: Rat, phi0: Rat },
    #[error("bundle inconsistent: {0}")]
    BadBundle(String),
    #[error("twist sample invariant violated: {0}")]
    BadSample(String),
    #[error("sample abscissa {0} lies in the exclusion set")]
    ExcludedAbscissa(Rat),
    #[error("inconsistent samples at abscissa {at}: {left} != {right}")]
    InconsistentSamples { at: Rat, left: Rat, right: Rat },
    #[error("sample grid too sparse: {0}")]
    SparseGrid(String),
    #[error("m = a*p^(t-r) has t = {t} outside 0 <= t < r = {r}: twist to a reduced level first")]
    LevelNotReduced { t: i64, r: u32 },
    #[error("m is not representable as a*p^(t-r): {0}")]
    NotRepresentable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
}
