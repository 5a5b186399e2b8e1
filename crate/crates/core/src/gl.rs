//! GL-side calculus: endo-class invariant profiles, their structure
//! functions, tame lifting, and the conductor / ultrametric formulas on the
//! set of endo-classes.
//!
//! A profile records the invariant shadow of an endo-class: degree data,
//! normalized level `m`, critical exponent `k0`, and the normalized jump set
//! with the per-interval tower invariants `(d, e_x, c)`. The tower is input
//! data; nothing here constructs strata or simple characters.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::plf::PlFunction;
use crate::rat::{format_rat, is_prime, Rat};
use crate::ultrametric::UltrametricTable;
use crate::Result;

/// Tower invariants on the open interval left of one normalized jump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    /// Degree of the approximating field: determines the slope `1/d`.
    pub d: u64,
    /// Ramification index of the approximating field; carried but consumed by
    /// no formula here.
    pub ex: u64,
    /// Exponent of the order-theoretic constant of the approximation.
    pub c: u64,
}

/// Invariant profile of an endo-class of simple characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoClassProfile {
    p: u64,
    deg: u64,
    e: u64,
    f: u64,
    m: Rat,
    /// `None` encodes minus infinity (degree one).
    k0: Option<Rat>,
    jumps: Vec<Rat>,
    levels: Vec<Level>,
    trivial: bool,
}

impl EndoClassProfile {
    /// The trivial class: degree data all 1, level 0, empty tower.
    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, 1, 1, 1, Rat::zero(), None, vec![], vec![], true)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: u64,
        deg: u64,
        e: u64,
        f: u64,
        m: Rat,
        k0: Option<Rat>,
        jumps: Vec<Rat>,
        levels: Vec<Level>,
        trivial: bool,
    ) -> Result<Self> {
        let fail = |msg: &str| Err(Error::BadProfile(msg.into()));
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if trivial {
            if deg != 1 || e != 1 || f != 1 {
                return fail("trivial class must have deg = e = f = 1");
            }
            if !m.is_zero() {
                return fail("trivial class must have m = 0");
            }
            if !jumps.is_empty() || !levels.is_empty() {
                return fail("trivial class must have no jumps");
            }
            if k0.is_some() {
                return fail("trivial class must have k0 = -infinity (null)");
            }
            return Ok(EndoClassProfile {
                p,
                deg,
                e,
                f,
                m,
                k0,
                jumps,
                levels,
                trivial,
            });
        }

        if deg == 0 || e == 0 || f == 0 {
            return fail("deg, e, f must be positive");
        }
        if e * f != deg {
            return fail("e * f must equal deg");
        }
        if !m.is_positive() {
            return fail("m must be positive");
        }
        if !(Rat::from_integer(e.into()) * &m).is_integer() {
            return fail("denominator of m must divide e");
        }
        match (&k0, deg) {
            (None, 1) => {}
            (None, _) => return fail("k0 = -infinity is reserved for deg = 1"),
            (Some(_), 1) => return fail("deg = 1 requires k0 = -infinity (null)"),
            (Some(k), _) => {
                if !k.is_negative() {
                    return fail("k0 must be negative");
                }
                if -k > m {
                    return fail("-k0 must not exceed m");
                }
            }
        }
        if jumps.is_empty() {
            return fail("jump set must be nonempty with last element m");
        }
        if jumps.len() != levels.len() {
            return fail("levels must match jumps one to one");
        }
        for w in jumps.windows(2) {
            if w[0] >= w[1] {
                return fail("jumps must increase strictly");
            }
        }
        if !jumps[0].is_positive() {
            return fail("jumps must be positive");
        }
        if jumps.last() != Some(&m) {
            return fail("last jump must equal m");
        }
        let least_ok = match &k0 {
            Some(k) => jumps[0] == m || jumps[0] == -k,
            None => jumps[0] == m,
        };
        if !least_ok {
            return fail("least jump must equal m or -k0");
        }
        if levels[0].d != deg {
            return fail("first level must have d = deg");
        }
        for l in &levels {
            if l.d == 0 || l.ex == 0 {
                return fail("level d and e_x must be positive");
            }
        }
        for w in levels.windows(2) {
            if w[1].d >= w[0].d {
                return fail("d values must decrease strictly along increasing x");
            }
            if !w[0].d.is_multiple_of(w[1].d) {
                return fail("each d must divide its predecessor");
            }
        }
        // continuity of the structure function across every jump
        for (i, w) in levels.windows(2).enumerate() {
            if intercept(&w[0]) + &jumps[i] / d_rat(&w[0])
                != intercept(&w[1]) + &jumps[i] / d_rat(&w[1])
            {
                return Err(Error::BadProfile(format!(
                    "continuity constraint fails at jump {}",
                    format_rat(&jumps[i])
                )));
            }
        }
        let last = levels.last().expect("nonempty");
        if intercept(last) + &m / d_rat(last) != m {
            return fail("continuity constraint fails at the last jump m");
        }

        Ok(EndoClassProfile {
            p,
            deg,
            e,
            f,
            m,
            k0,
            jumps,
            levels,
            trivial,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn deg(&self) -> u64 {
        self.deg
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn m(&self) -> &Rat {
        &self.m
    }

    pub fn k0(&self) -> Option<&Rat> {
        self.k0.as_ref()
    }

    pub fn jumps(&self) -> &[Rat] {
        &self.jumps
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Totally wild: `e = deg = p^r`.
    pub fn is_totally_wild(&self) -> bool {
        if self.e != self.deg {
            return false;
        }
        let mut d = self.deg;
        while d.is_multiple_of(self.p) {
            d /= self.p;
        }
        d == 1
    }

    /// The structure function: slope `1/d` on each tower interval, the
    /// identity from `m` on, glued continuously. Certified convex and
    /// strictly increasing for every valid profile.
    pub fn structure_function(&self) -> PlFunction {
        if self.trivial {
            return PlFunction::identity();
        }
        let mut points = vec![(Rat::zero(), intercept(&self.levels[0]))];
        for (i, jump) in self.jumps.iter().enumerate() {
            let level = &self.levels[i];
            points.push((jump.clone(), intercept(level) + jump / d_rat(level)));
        }
        PlFunction::new(points, Rat::one())
            .expect("profile invariants guarantee ordered breakpoints")
    }

    /// Lift along a tame extension of ramification index `e_ext`: jumps, `m`,
    /// `k0` and the constants `c` all scale by `e_ext`; `d` and `e_x` do not.
    /// Requires a totally wild profile.
    pub fn tame_lift(&self, e_ext: u64) -> Result<Self> {
        if e_ext == 0 {
            return Err(Error::ZeroScale);
        }
        if !self.is_totally_wild() && !self.trivial {
            return Err(Error::NotTotallyWild);
        }
        let scale = Rat::from_integer(e_ext.into());
        let levels = self
            .levels
            .iter()
            .map(|l| {
                Ok(Level {
                    d: l.d,
                    ex: l.ex,
                    c: l.c
                        .checked_mul(e_ext)
                        .ok_or(Error::Overflow("tame lift of c"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EndoClassProfile::new(
            self.p,
            self.deg,
            self.e,
            self.f,
            &self.m * &scale,
            self.k0.as_ref().map(|k| k * &scale),
            self.jumps.iter().map(|j| j * &scale).collect(),
            levels,
            self.trivial,
        )
    }
}

fn d_rat(level: &Level) -> Rat {
    Rat::from_integer(level.d.into())
}

/// `c/d^2`, the value contribution of a level at 0.
fn intercept(level: &Level) -> Rat {
    Rat::new(level.c.into(), (level.d as u128 * level.d as u128).into())
}

/// Constant `m * f * (e*f - 1)` of a minimal element with invariants
/// `(m, e, f)`; minimality means `gcd(m, e) = 1`.
pub fn minimal_c(m: u64, e: u64, f: u64) -> Result<u64> {
    if m == 0 || e == 0 || f == 0 {
        return Err(Error::BadProfile(
            "minimal invariants must be positive".into(),
        ));
    }
    if m.gcd(&e) != 1 {
        return Err(Error::NotMinimal { m, e });
    }
    let ef = e.checked_mul(f).ok_or(Error::Overflow("minimal_c"))?;
    m.checked_mul(f)
        .and_then(|mf| mf.checked_mul(ef - 1))
        .ok_or(Error::Overflow("minimal_c"))
}

/// Profile of a totally ramified minimal class with level `a/b`: degree and
/// ramification index `b`, a single jump at `a/b`, constant `a(b-1)`.
pub fn minimal_profile(a: u64, b: u64, p: u64) -> Result<EndoClassProfile> {
    if a == 0 || b == 0 {
        return Err(Error::BadProfile("a and b must be positive".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::NotMinimal { m: a, e: b });
    }
    let m = Rat::new(a.into(), b.into());
    let c = minimal_c(a, b, 1)?;
    let k0 = (b > 1).then(|| -m.clone());
    EndoClassProfile::new(
        p,
        b,
        b,
        1,
        m.clone(),
        k0,
        vec![m],
        vec![Level { d: b, ex: b, c }],
        false,
    )
}

/// The common value `varsigma = Phi_1(a) = Phi_2(a)` of the conductor
/// formula at a declared distance `a`; the two structure functions must
/// agree there, anything else is inconsistent data.
pub fn pairing_varsigma(
    prof1: &EndoClassProfile,
    prof2: &EndoClassProfile,
    a: &Rat,
) -> Result<Rat> {
    let left = prof1.structure_function().eval(a)?;
    let right = prof2.structure_function().eval(a)?;
    if left != right {
        return Err(Error::PairingMismatch {
            at: a.clone(),
            left,
            right,
        });
    }
    Ok(left)
}

/// Distance between classes of distinct levels: the larger level. Equal
/// levels carry no formula; the distance is then genuinely data.
pub fn mixed_level_distance(m1: &Rat, m2: &Rat) -> Option<Rat> {
    (m1 != m2).then(|| m1.max(m2).clone())
}

/// Rankin-Selberg pairing data for a Swan exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingInput {
    ar: i64,
    n1: u64,
    n2: u64,
    d: u64,
}

impl PairingInput {
    pub fn new(ar: i64, n1: u64, n2: u64, d: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::BadPairingInput);
        }
        if d != 0 && n1 != n2 {
            return Err(Error::BadPairingInput);
        }
        Ok(PairingInput { ar, n1, n2, d })
    }

    /// Swan exponent `ar - n1*n2 + d`.
    pub fn swan_exponent(&self) -> Result<i64> {
        let v = self.ar as i128 - (self.n1 as i128) * (self.n2 as i128) + self.d as i128;
        i64::try_from(v).map_err(|_| Error::Overflow("swan_exponent"))
    }
}

/// Partition of the labels into open balls of radius `eps`: `x ~ y` iff
/// `dist(x, y) < eps`. The ultrametric inequality makes this an equivalence,
/// so the table must validate first.
pub fn truncation_classes(t: &UltrametricTable, eps: &Rat) -> Result<Vec<Vec<String>>> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let report = t.validate();
    if !report.is_valid() {
        return Err(Error::InvalidTable(report.describe()));
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..t.len() {
        match classes.iter_mut().find(|cls| t.dist(cls[0], i) < eps) {
            Some(cls) => cls.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes
        .into_iter()
        .map(|cls| cls.into_iter().map(|i| t.labels()[i].clone()).collect())
        .collect())
}

/// Applies the conductor formula across a whole catalog: from profiles and a
/// distance table on the same labels, the table of pairing values
/// `varsigma(x, y) = Phi_x(dist(x, y))`. The result must itself validate as a
/// (non-separating) ultrametric; a violation means inconsistent input.
pub fn varsigma_table(
    profiles: &[(String, EndoClassProfile)],
    t: &UltrametricTable,
) -> Result<UltrametricTable> {
    let labels: Vec<&String> = profiles.iter().map(|(l, _)| l).collect();
    if labels.len() != t.len() || labels.iter().zip(t.labels()).any(|(a, b)| *a != b) {
        return Err(Error::BadTable(
            "profile labels must match the table labels".into(),
        ));
    }
    let report = t.validate();
    if !report.is_valid() {
        return Err(Error::InvalidTable(report.describe()));
    }
    let n = t.len();
    let mut dist = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pairing_varsigma(&profiles[i].1, &profiles[j].1, t.dist(i, j))?;
            dist[i][j] = v.clone();
            dist[j][i] = v;
        }
    }
    let out = UltrametricTable::new(t.labels().to_vec(), dist, false)?;
    let report = out.validate();
    if !report.is_valid() {
        return Err(Error::VarsigmaNotUltrametric(report.describe()));
    }
    Ok(out)
}

/// Normalized level of a class twisted by a character of swan conductor `k`:
/// `max(m, k)`. Structure and Herbrand functions are unchanged by twisting.
pub fn twist_level(m: &Rat, k: u64) -> Result<Rat> {
    if k == 0 {
        return Err(Error::NonPositive("swan conductor k"));
    }
    Ok(m.max(&Rat::from_integer(k.into())).clone())
}
