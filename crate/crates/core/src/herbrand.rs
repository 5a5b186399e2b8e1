//! Herbrand functions `Psi = Phi^-1 o Sigma`: construction, ramification
//! radius transfer, tame lifting, reconstruction from twist samples, and the
//! structural checks near 0 and near the level `m`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::galois::GaloisDecomposition;
use crate::gl::EndoClassProfile;
use crate::plf::PlFunction;
use crate::rat::{format_rat, is_prime, split_p_power, Rat};
use crate::ultrametric::UltrametricTable;
use crate::Result;

/// Herbrand composition `Phi^-1 o Sigma`. `phi` must be strictly increasing
/// and `sigma(0)` must not fall below `phi(0)`, otherwise the composite would
/// start below the half-line.
pub fn herbrand_function(phi: &PlFunction, sigma: &PlFunction) -> Result<PlFunction> {
    if !phi.certify().strictly_increasing {
        return Err(Error::Precondition(
            "phi must be strictly increasing".into(),
        ));
    }
    let sigma0 = sigma.value_at_start().clone();
    let phi0 = phi.eval(phi.domain_start())?;
    if sigma0 < phi0 {
        return Err(Error::HerbrandBelowRange { sigma0, phi0 });
    }
    phi.invert()?.compose(sigma)
}

/// The radius transfer of the higher ramification correspondence: from a
/// Galois-side radius `eps` to the endo-class-side radius `delta = psi(eps)`.
/// Balls match in both the strict and non-strict reading.
pub fn transfer_radius(psi: &PlFunction, eps: &Rat) -> Result<Rat> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    if !psi.certify().strictly_increasing {
        return Err(Error::Precondition(
            "psi must be strictly increasing".into(),
        ));
    }
    if psi.eval(&Rat::zero())? != Rat::zero() {
        return Err(Error::Precondition("psi must vanish at 0".into()));
    }
    psi.eval(eps)
}

/// Herbrand function after a tame lift of ramification index `e`:
/// `x -> e * psi(x/e)`.
pub fn tame_lift_herbrand(psi: &PlFunction, e: u64) -> Result<PlFunction> {
    psi.scale_conj(e)
}

/// True when the inverses of the two functions coincide identically on
/// `[a, +inf)`. Both functions must be strictly increasing from `(0, 0)`.
pub fn psi_inverse_agreement(psi1: &PlFunction, psi2: &PlFunction, a: &Rat) -> Result<bool> {
    let inv1 = psi1.invert()?;
    let inv2 = psi2.invert()?;
    Ok(match inv1.agree_from(&inv2) {
        Some(x0) => x0 <= *a,
        None => false,
    })
}

/// A complete worked object: profile, decomposition, the three functions and
/// the exclusion set for sampling.
#[derive(Clone, Debug)]
pub struct HerbrandBundle {
    profile: EndoClassProfile,
    decomposition: GaloisDecomposition,
    phi: PlFunction,
    sigma: PlFunction,
    psi: PlFunction,
    exclusions: BTreeSet<Rat>,
    cancelled_sigma_jumps: Vec<Rat>,
}

impl HerbrandBundle {
    /// Assembles the bundle, checking the coherence facts the calculus
    /// guarantees for matching data: `sigma(0) = phi(0)` (so `psi(0) = 0`)
    /// and `psi = id` from the level `m` on.
    pub fn new(profile: EndoClassProfile, decomposition: GaloisDecomposition) -> Result<Self> {
        let phi = profile.structure_function();
        let sigma = decomposition.sigma_function();
        let zero = Rat::zero();
        let phi0 = phi.eval(&zero)?;
        let sigma0 = sigma.eval(&zero)?;
        if phi0 != sigma0 {
            return Err(Error::BadBundle(format!(
                "sigma(0) = {} differs from phi(0) = {}",
                format_rat(&sigma0),
                format_rat(&phi0)
            )));
        }
        let psi = herbrand_function(&phi, &sigma)?;
        match psi.agree_from(&PlFunction::identity()) {
            Some(x0) if x0 <= *profile.m() || profile.is_trivial() => {}
            got => {
                return Err(Error::BadBundle(format!(
                    "psi must equal the identity from m = {} on (agrees from {})",
                    format_rat(profile.m()),
                    got.map(|x| format_rat(&x))
                        .unwrap_or_else(|| "nowhere".into())
                )))
            }
        }
        let psi_jump_xs: BTreeSet<Rat> = psi.derivative_jumps().into_iter().map(|j| j.x).collect();
        let mut exclusions = psi_jump_xs.clone();
        let mut cancelled = Vec::new();
        for j in sigma.derivative_jumps() {
            // a sigma jump can be cancelled in psi by a matching phi jump;
            // such points stay excluded and are surfaced in reports
            if !psi_jump_xs.contains(&j.x) {
                cancelled.push(j.x.clone());
            }
            exclusions.insert(j.x);
        }
        Ok(HerbrandBundle {
            profile,
            decomposition,
            phi,
            sigma,
            psi,
            exclusions,
            cancelled_sigma_jumps: cancelled,
        })
    }

    pub fn profile(&self) -> &EndoClassProfile {
        &self.profile
    }

    pub fn decomposition(&self) -> &GaloisDecomposition {
        &self.decomposition
    }

    pub fn phi(&self) -> &PlFunction {
        &self.phi
    }

    pub fn sigma(&self) -> &PlFunction {
        &self.sigma
    }

    pub fn psi(&self) -> &PlFunction {
        &self.psi
    }

    /// All derivative-jump abscissae of `psi` and `sigma`; sampling must
    /// avoid these.
    pub fn exclusions(&self) -> &BTreeSet<Rat> {
        &self.exclusions
    }

    /// Sigma-jump abscissae where `psi'` happens to be continuous. No worked
    /// instance of this is known; bundles showing it are valid but flagged.
    pub fn cancelled_sigma_jumps(&self) -> &[Rat] {
        &self.cancelled_sigma_jumps
    }
}

/// One distance measurement against a twist: over a tame extension of
/// ramification index `e`, a character of swan conductor `k`, and the
/// measured distance `value`. The sample point is `(k/e, value/e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSample {
    pub e: u64,
    pub k: u64,
    pub value: Rat,
}

impl TwistSample {
    pub fn new(e: u64, k: u64, value: Rat) -> Result<Self> {
        if e == 0 || k == 0 {
            return Err(Error::BadSample("e and k must be positive".into()));
        }
        if !value.is_positive() {
            return Err(Error::BadSample("value must be positive".into()));
        }
        Ok(TwistSample { e, k, value })
    }

    pub fn abscissa(&self) -> Rat {
        Rat::new(self.k.into(), self.e.into())
    }

    pub fn ordinate(&self) -> Rat {
        &self.value / Rat::from_integer(self.e.into())
    }
}

/// Reconstructs the unique Herbrand function through the sample points, the
/// anchor `(0, 0)`, and the identity from `m` on.
///
/// The samples determine the function only when consecutive abscissae bracket
/// every slope change: each linear piece needs two pinning points (anchors
/// count). Underdetermined grids yield a [`Error::SparseGrid`] report, never
/// a guessed function.
pub fn reconstruct_psi(
    samples: &[TwistSample],
    m: &Rat,
    exclusions: &BTreeSet<Rat>,
) -> Result<PlFunction> {
    if m.is_negative() {
        return Err(Error::Precondition("m must be nonnegative".into()));
    }
    if m.is_zero() {
        // trivial class: the Herbrand function is the identity outright
        return PlFunction::new(vec![(Rat::zero(), Rat::zero())], Rat::one());
    }

    let mut points: BTreeMap<Rat, Rat> = BTreeMap::new();
    points.insert(Rat::zero(), Rat::zero());
    points.insert(m.clone(), m.clone());
    for s in samples {
        let x = s.abscissa();
        let y = s.ordinate();
        if exclusions.contains(&x) {
            return Err(Error::ExcludedAbscissa(x));
        }
        if x > *m {
            // beyond the level the function is the identity; the sample can
            // only confirm it
            if y != x {
                return Err(Error::InconsistentSamples {
                    at: x.clone(),
                    left: y,
                    right: x,
                });
            }
            continue;
        }
        if let Some(prev) = points.get(&x) {
            if *prev != y {
                return Err(Error::InconsistentSamples {
                    at: x,
                    left: prev.clone(),
                    right: y,
                });
            }
            continue;
        }
        points.insert(x, y);
    }

    let pts: Vec<(Rat, Rat)> = points.into_iter().collect();
    let anchor = |x: &Rat| x.is_zero() || x == m;

    // group the points into maximal collinear runs; each run pins one line
    let mut runs: Vec<(usize, usize)> = Vec::new(); // inclusive index ranges
    let mut i = 0;
    while i < pts.len() {
        if i + 1 == pts.len() {
            return Err(Error::SparseGrid(format!(
                "point at x = {} is on no determined line (one more sample needed nearby)",
                format_rat(&pts[i].0)
            )));
        }
        let mut j = i + 1;
        while j + 1 < pts.len() && on_line(&pts[i], &pts[j], &pts[j + 1]) {
            j += 1;
        }
        runs.push((i, j));
        i = j + 1;
    }

    let line_of = |run: &(usize, usize)| -> (Rat, Rat) {
        let (a, b) = (&pts[run.0], &pts[run.0 + 1]);
        let slope = (&b.1 - &a.1) / (&b.0 - &a.0);
        let intercept = &a.1 - &slope * &a.0;
        (slope, intercept)
    };

    // junction of consecutive runs: the lines must cross strictly inside the
    // bracketing gap (sample abscissae avoid the exclusion set, so a junction
    // may not collide with one)
    let mut breakpoints: Vec<(Rat, Rat)> = vec![(Rat::zero(), Rat::zero())];
    for w in runs.windows(2) {
        let (s1, b1) = line_of(&w[0]);
        let (s2, b2) = line_of(&w[1]);
        if s1 == s2 {
            return Err(Error::SparseGrid(
                "adjacent sample groups lie on parallel lines that never meet".into(),
            ));
        }
        let x = (&b2 - &b1) / (&s1 - &s2);
        let gap_left = &pts[w[0].1].0;
        let gap_right = &pts[w[1].0].0;
        let left_ok = x > *gap_left || (x == *gap_left && anchor(gap_left));
        let right_ok = x < *gap_right || (x == *gap_right && anchor(gap_right));
        if !left_ok || !right_ok {
            return Err(Error::SparseGrid(format!(
                "slope change between x = {} and x = {} cannot be bracketed from the samples",
                format_rat(gap_left),
                format_rat(gap_right)
            )));
        }
        breakpoints.push((x.clone(), &s1 * &x + &b1));
    }

    // terminal junction with the identity at m
    let (s_last, b_last) = line_of(runs.last().expect("at least one run"));
    if !(s_last.is_one() && b_last.is_zero()) {
        breakpoints.push((m.clone(), m.clone()));
    }

    let f = PlFunction::new(breakpoints, Rat::one())?;
    for s in samples {
        let x = s.abscissa();
        if f.eval(&x)? != s.ordinate() {
            return Err(Error::SparseGrid(format!(
                "reconstruction cannot reproduce the sample at x = {}",
                format_rat(&x)
            )));
        }
    }
    Ok(f)
}

/// One failed sample in verification mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleMismatch {
    pub e: u64,
    pub k: u64,
    pub abscissa: Rat,
    pub expected: Rat,
    pub actual: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub checked: usize,
    /// Samples at excluded abscissae are skipped, not judged.
    pub skipped: Vec<Rat>,
    pub mismatches: Vec<SampleMismatch>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks every sample against a reference function: `value/e` must equal
/// `reference(k/e)` exactly. Samples at excluded abscissae are skipped.
pub fn verify_psi_samples(
    samples: &[TwistSample],
    exclusions: &BTreeSet<Rat>,
    reference: &PlFunction,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    for s in samples {
        let x = s.abscissa();
        if exclusions.contains(&x) {
            report.skipped.push(x);
            continue;
        }
        let expected = reference.eval(&x)?;
        let actual = s.ordinate();
        if expected != actual {
            report.mismatches.push(SampleMismatch {
                e: s.e,
                k: s.k,
                abscissa: x,
                expected,
                actual,
            });
        }
        report.checked += 1;
    }
    Ok(report)
}

/// One failed ball comparison between the two distance tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallViolation {
    pub x: String,
    pub y: String,
    /// Which label's function was used for the transfer.
    pub via_psi: String,
    pub eps: Rat,
    pub delta: Rat,
    /// False for the non-strict comparison.
    pub strict: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BallTransferReport {
    pub comparisons: usize,
    pub violations: Vec<BallViolation>,
}

impl BallTransferReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cross-checks two distance tables against the radius transfer: for every
/// pair and a grid of radii `eps` (the jump abscissae, the declared distance,
/// their midpoints, and a point beyond), the balls must match in both strict
/// and non-strict form: `delta(x, y) < eps` iff `a(x, y) < psi(eps)`.
pub fn ball_transfer_check(
    delta_table: &UltrametricTable,
    a_table: &UltrametricTable,
    psis: &BTreeMap<String, PlFunction>,
) -> Result<BallTransferReport> {
    if delta_table.labels() != a_table.labels() {
        return Err(Error::BadTable("distance tables must share labels".into()));
    }
    for t in [delta_table, a_table] {
        let r = t.validate();
        if !r.is_valid() {
            return Err(Error::InvalidTable(r.describe()));
        }
    }
    for l in delta_table.labels() {
        if !psis.contains_key(l) {
            return Err(Error::BadTable(format!("missing psi for label {l}")));
        }
    }

    let mut report = BallTransferReport::default();
    let n = delta_table.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = delta_table.dist(i, j);
            let a = a_table.dist(i, j);
            for side in [i, j] {
                let label = &delta_table.labels()[side];
                let psi = &psis[label];
                for eps in eps_grid(psi, d) {
                    let delta = psi.eval(&eps)?;
                    for strict in [true, false] {
                        let lhs = if strict { d < &eps } else { d <= &eps };
                        let rhs = if strict { a < &delta } else { a <= &delta };
                        report.comparisons += 1;
                        if lhs != rhs {
                            report.violations.push(BallViolation {
                                x: delta_table.labels()[i].clone(),
                                y: delta_table.labels()[j].clone(),
                                via_psi: label.clone(),
                                eps: eps.clone(),
                                delta: delta.clone(),
                                strict,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Radii worth probing: the declared distance, every jump abscissa of the
/// function, midpoints between consecutive candidates, and one point beyond.
fn eps_grid(psi: &PlFunction, declared: &Rat) -> Vec<Rat> {
    let mut base: BTreeSet<Rat> = psi.derivative_jumps().into_iter().map(|j| j.x).collect();
    base.insert(declared.clone());
    let base: Vec<Rat> = base.into_iter().collect();
    let mut grid: BTreeSet<Rat> = base.iter().cloned().collect();
    for w in base.windows(2) {
        grid.insert((&w[0] + &w[1]) / Rat::from_integer(2.into()));
    }
    if let Some(last) = base.last() {
        grid.insert(last + Rat::one());
    }
    let half = Rat::new(1.into(), 2.into());
    if let Some(first) = base.first() {
        if first.is_positive() {
            grid.insert(first * half);
        }
    }
    grid.into_iter().filter(|e| e.is_positive()).collect()
}

/// Writes `m = a * p^(t-r)` with `a` prime to `p`. Fails when the denominator
/// of `m` has a prime factor other than `p`.
pub fn decompose_m(m: &Rat, p: u64, r: u32) -> Result<(BigUint, i64)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !m.is_positive() {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let (alpha, a) = split_p_power(m.numer().magnitude(), p);
    let (beta, rest) = split_p_power(m.denom().magnitude(), p);
    if !rest.is_one() {
        return Err(Error::NotRepresentable(format!(
            "denominator of {} contains the factor {} prime to {}",
            format_rat(m),
            rest,
            p
        )));
    }
    let t = alpha as i64 - beta as i64 + r as i64;
    Ok((a, t))
}

/// One slope comparison of [`boundary_slopes_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeCheck {
    pub expected: Rat,
    pub actual: Rat,
}

impl SlopeCheck {
    pub fn pass(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySlopesReport {
    /// Slope on the first interval right of 0: must be `p^-r`.
    pub near_zero: SlopeCheck,
    /// Slope on the last interval left of `m`: must be `p^(r-t)`.
    pub near_m: SlopeCheck,
    pub a: BigUint,
    pub t: i64,
}

impl BoundarySlopesReport {
    pub fn pass(&self) -> bool {
        self.near_zero.pass() && self.near_m.pass()
    }
}

/// Verifies the forced boundary slopes of a totally wild Herbrand function of
/// degree `p^r` and level `m = a * p^(t-r)`: slope `p^-r` just right of 0 and
/// `p^(r-t)` just left of `m`. Requires `0 <= t < r`; data outside that range
/// must be twisted to a reduced level first. `r = 0` expects slope 1 on both
/// ends.
pub fn boundary_slopes_check(
    psi: &PlFunction,
    p: u64,
    r: u32,
    m: &Rat,
) -> Result<BoundarySlopesReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !m.is_positive() {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let (a, t) = decompose_m(m, p, r)?;
    let (expected_zero, expected_m) = if r == 0 {
        (Rat::one(), Rat::one())
    } else {
        if t < 0 || t >= r as i64 {
            return Err(Error::LevelNotReduced { t, r });
        }
        let pow = |k: i64| -> Rat {
            let mag = Rat::from_integer(BigUint::from(p).pow(k.unsigned_abs() as u32).into());
            if k >= 0 {
                mag
            } else {
                mag.recip()
            }
        };
        (pow(-(r as i64)), pow(r as i64 - t))
    };
    Ok(BoundarySlopesReport {
        near_zero: SlopeCheck {
            expected: expected_zero,
            actual: psi.slope_right_at(psi.domain_start())?,
        },
        near_m: SlopeCheck {
            expected: expected_m,
            actual: psi.slope_left_at(m)?,
        },
        a,
        t,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentiallyTameReport {
    /// The Herbrand function is the identity.
    pub psi_is_identity: bool,
    /// The ramification index of the profile is prime to `p`.
    pub e_prime_to_p: bool,
}

impl EssentiallyTameReport {
    /// The two characterizations must agree; a mismatch means inconsistent
    /// data.
    pub fn consistent(&self) -> bool {
        self.psi_is_identity == self.e_prime_to_p
    }
}

/// An endo-class is essentially tame exactly when its Herbrand function is
/// the identity, equivalently when `e` is prime to `p`. Returns both
/// readings; disagreement flags the data.
pub fn essentially_tame_check(
    profile: &EndoClassProfile,
    psi: &PlFunction,
) -> EssentiallyTameReport {
    EssentiallyTameReport {
        psi_is_identity: psi.is_identity(),
        e_prime_to_p: !profile.e().is_multiple_of(profile.p()),
    }
}

fn on_line(a: &(Rat, Rat), b: &(Rat, Rat), q: &(Rat, Rat)) -> bool {
    (&b.1 - &a.1) * (&q.0 - &a.0) == (&q.1 - &a.1) * (&b.0 - &a.0)
}
