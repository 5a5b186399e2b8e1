//! Galois-side calculus: decomposition functions built from the component
//! data of `check(sigma) (x) sigma`, slope arithmetic, tame restriction, and
//! the derivative-discontinuity diagnostics.

use std::fmt;

use num_bigint::BigUint;

use crate::error::Error;
use crate::plf::PlFunction;
use crate::rat::{is_p_integral, is_positive_integer, is_prime, Rat};
use crate::Result;

/// Slope `swan/dim` of an irreducible piece.
pub fn slope_of(dim: u64, swan: u64) -> Result<Rat> {
    if dim == 0 {
        return Err(Error::ZeroDim);
    }
    Ok(Rat::new(swan.into(), dim.into()))
}

/// Component data of the semisimple tensor square of an irreducible
/// representation: the multiset of `(dim, swan)` over its irreducible pieces.
///
/// The pieces must fill the full `dim^2` and include the trivial one `(1, 0)`,
/// which is what forces the decomposition function to increase strictly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisDecomposition {
    dim: u64,
    components: Vec<(u64, u64)>,
}

impl GaloisDecomposition {
    pub fn new(dim: u64, components: Vec<(u64, u64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadDecomposition("dim must be >= 1".into()));
        }
        if components.is_empty() {
            return Err(Error::BadDecomposition(
                "components must be nonempty".into(),
            ));
        }
        if components.iter().any(|&(d, _)| d == 0) {
            return Err(Error::BadDecomposition(
                "every component needs dim >= 1".into(),
            ));
        }
        let total: u128 = components.iter().map(|&(d, _)| d as u128).sum();
        if total != (dim as u128) * (dim as u128) {
            return Err(Error::BadDecomposition(format!(
                "component dims sum to {total}, expected dim^2 = {}",
                (dim as u128) * (dim as u128)
            )));
        }
        if !components.contains(&(1, 0)) {
            return Err(Error::BadDecomposition(
                "a trivial component (dim 1, swan 0) is required".into(),
            ));
        }
        Ok(GaloisDecomposition { dim, components })
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn components(&self) -> &[(u64, u64)] {
        &self.components
    }

    /// The decomposition function: the normalized max-affine sum
    /// `x -> dim^-2 * sum_i max(x * dim_i, swan_i)`. Always continuous,
    /// strictly increasing, piecewise linear and convex, with terminal
    /// slope 1.
    pub fn sigma_function(&self) -> PlFunction {
        PlFunction::max_affine_mean(self.dim * self.dim, &self.components)
            .expect("construction invariants guarantee a valid max-affine mean")
    }
}

/// Solves `sigma(delta) = varsigma` for the unique `delta`; `sigma` must be
/// strictly increasing and `varsigma` at least its least value.
pub fn delta_from_pairing(sigma: &PlFunction, varsigma: &Rat) -> Result<Rat> {
    let at_start = sigma.value_at_start().clone();
    if *varsigma < at_start {
        return Err(Error::PairingBelowRange {
            varsigma: varsigma.clone(),
            at_start,
        });
    }
    sigma.invert()?.eval(varsigma)
}

/// Decomposition function after restriction along a tame extension of
/// ramification index `e`, i.e. `x -> e * sigma(x/e)`.
///
/// The underlying representation must be totally wild; that cannot be read
/// off the function itself and is asserted by the caller.
pub fn restrict_tame_sigma(sigma: &PlFunction, e: u64) -> Result<PlFunction> {
    sigma.scale_conj(e)
}

/// Recovers the base distance from the distances to the conjugate translates
/// over a tame extension of index `e`: the minimum of the list divided by `e`.
pub fn tame_distance_min(conjugate_distances: &[Rat], e: u64) -> Result<Rat> {
    if e == 0 {
        return Err(Error::NonPositive("e"));
    }
    let min = conjugate_distances
        .iter()
        .min()
        .ok_or(Error::EmptyDistances)?;
    Ok(min / Rat::from_integer(e.into()))
}

/// Which integrality statement applies to the least derivative jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WildnessMode {
    /// The representation is wild over the base field itself: the least jump
    /// must be a positive integer.
    AbsolutelyWild,
    /// General totally wild case: the least jump times the ramification index
    /// of the imprimitivity field must be a positive integer, and the jump is
    /// p-integral.
    General { e_imprimitivity: u64 },
}

/// Diagnostic for the least discontinuity of the derivative of a
/// decomposition function. Failed flags indicate inconsistent input data,
/// not a computation error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastJumpDiagnostic {
    pub least_jump: Rat,
    pub mode: WildnessMode,
    /// Absolutely wild mode: the jump is a positive integer.
    pub integer_ok: Option<bool>,
    /// General mode: jump * e is a positive integer.
    pub scaled_integer_ok: Option<bool>,
    /// Denominator of the jump is prime to p.
    pub p_integral: bool,
    /// What the jump measures, for reports.
    pub interpretation: String,
}

impl LeastJumpDiagnostic {
    pub fn consistent(&self) -> bool {
        self.integer_ok.unwrap_or(true) && self.scaled_integer_ok.unwrap_or(true) && self.p_integral
    }
}

/// Reads the least derivative jump of a decomposition function and checks the
/// integrality facts it must satisfy in the asserted wildness mode.
pub fn least_sigma_jump(
    sigma: &PlFunction,
    p: u64,
    mode: WildnessMode,
) -> Result<LeastJumpDiagnostic> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let jumps = sigma.derivative_jumps();
    let first = jumps.first().ok_or(Error::NoJumps)?;
    let a = first.x.clone();
    let p_integral = is_p_integral(&a, p);
    let (integer_ok, scaled_integer_ok, interpretation) = match mode {
        WildnessMode::AbsolutelyWild => (
            Some(is_positive_integer(&a)),
            None,
            "least jump = min swan conductor over nontrivial self-twist characters".to_string(),
        ),
        WildnessMode::General { e_imprimitivity } => {
            if e_imprimitivity == 0 {
                return Err(Error::NonPositive("e_imprimitivity"));
            }
            let scaled = &a * Rat::from_integer(e_imprimitivity.into());
            (
                None,
                Some(is_positive_integer(&scaled)),
                format!(
                    "least jump = min swan conductor over nontrivial self-twist characters \
                     of the restriction to the imprimitivity field, scaled by 1/{e_imprimitivity}"
                ),
            )
        }
    };
    Ok(LeastJumpDiagnostic {
        least_jump: a,
        mode,
        integer_ok,
        scaled_integer_ok,
        p_integral,
        interpretation,
    })
}

/// Distance to a twist by a character of conductor `c`: exactly `c` when the
/// derivative of the decomposition function is continuous there, otherwise
/// only the upper bound `c`.
pub fn twist_distance(sigma: &PlFunction, c: u64) -> Result<(Rat, bool)> {
    if c == 0 {
        return Err(Error::NonPositive("conductor c"));
    }
    let c = Rat::from_integer(c.into());
    let exact = !sigma.has_jump_at(&c);
    Ok((c, exact))
}

/// Consequence of a single derivative discontinuity for an absolutely wild
/// representation of dimension `p^r`: the kernel Galois group is elementary
/// abelian of order `p^(2r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleJumpNote {
    pub p: u64,
    pub r: u32,
    pub order: BigUint,
}

impl fmt::Display for SingleJumpNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Gal(E/F) elementary abelian of order {}^{} = {}",
            self.p,
            2 * self.r,
            self.order
        )
    }
}

pub fn single_jump_diagnostic(
    sigma: &PlFunction,
    p: u64,
    r: u32,
) -> Result<Option<SingleJumpNote>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::NonPositive("r"));
    }
    if sigma.derivative_jumps().len() != 1 {
        return Ok(None);
    }
    Ok(Some(SingleJumpNote {
        p,
        r,
        order: BigUint::from(p).pow(2 * r),
    }))
}
