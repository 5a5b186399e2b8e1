//! Continuous piecewise-linear functions on the half-line, in canonical
//! breakpoint form over exact rationals.
//!
//! A function is a nonempty list of breakpoints `(x_i, y_i)` with strictly
//! increasing `x_i >= 0`, linear between consecutive breakpoints, plus a
//! terminal slope on `[x_last, +inf)`. The domain is `[x_0, +inf)`; functions
//! built from ramification data start at `x_0 = 0`, while inverses start at
//! the former value at zero. Canonical form merges every breakpoint that is
//! collinear with its neighbours, so two values of this type are equal as
//! functions if and only if they are structurally equal.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rat::{format_rat, parse_rat, Rat};
use crate::Result;

/// A breakpoint where the derivative changes, with the slopes on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeJump {
    pub x: Rat,
    pub left: Rat,
    pub right: Rat,
}

/// Shape flags certified by exact slope inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Slopes nondecreasing from left to right.
    pub convex: bool,
    /// All slopes strictly positive, terminal slope included.
    pub strictly_increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlFunction {
    points: Vec<(Rat, Rat)>,
    terminal_slope: Rat,
}

impl PlFunction {
    /// Builds a function from breakpoints and a terminal slope, canonicalizing
    /// by merging every breakpoint collinear with its neighbours.
    pub fn new(points: Vec<(Rat, Rat)>, terminal_slope: Rat) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyBreakpoints);
        }
        if points[0].0.is_negative() {
            return Err(Error::UnorderedBreakpoints);
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::UnorderedBreakpoints);
            }
        }

        let mut canon: Vec<(Rat, Rat)> = Vec::with_capacity(points.len());
        for pt in points {
            canon.push(pt);
            while canon.len() >= 3 {
                let n = canon.len();
                if collinear(&canon[n - 3], &canon[n - 2], &canon[n - 1]) {
                    canon.remove(n - 2);
                } else {
                    break;
                }
            }
        }
        // the last breakpoint is redundant when its left slope equals the
        // terminal slope
        while canon.len() >= 2 {
            let n = canon.len();
            if segment_slope(&canon[n - 2], &canon[n - 1]) == terminal_slope {
                canon.pop();
            } else {
                break;
            }
        }

        Ok(PlFunction {
            points: canon,
            terminal_slope,
        })
    }

    /// The identity function on `[0, +inf)`.
    pub fn identity() -> Self {
        PlFunction {
            points: vec![(Rat::zero(), Rat::zero())],
            terminal_slope: Rat::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity()
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.points
    }

    pub fn terminal_slope(&self) -> &Rat {
        &self.terminal_slope
    }

    /// Left end of the domain (the first breakpoint abscissa).
    pub fn domain_start(&self) -> &Rat {
        &self.points[0].0
    }

    /// Value at the left end of the domain.
    pub fn value_at_start(&self) -> &Rat {
        &self.points[0].1
    }

    /// Slope of the `i`-th segment: between breakpoints `i` and `i+1`, or the
    /// terminal slope for the last breakpoint.
    fn slope(&self, i: usize) -> Rat {
        if i + 1 < self.points.len() {
            segment_slope(&self.points[i], &self.points[i + 1])
        } else {
            self.terminal_slope.clone()
        }
    }

    /// All segment slopes from left to right, terminal slope last.
    pub fn slopes(&self) -> Vec<Rat> {
        (0..self.points.len()).map(|i| self.slope(i)).collect()
    }

    /// Index of the segment containing `x`: the largest `i` with `x_i <= x`.
    fn segment_of(&self, x: &Rat) -> Result<usize> {
        if x < self.domain_start() {
            return Err(Error::OutsideDomain {
                x: x.clone(),
                start: self.domain_start().clone(),
            });
        }
        Ok(self
            .points
            .partition_point(|(bx, _)| bx <= x)
            .saturating_sub(1))
    }

    /// Exact evaluation by linear interpolation; the terminal slope
    /// extrapolates beyond the last breakpoint.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let i = self.segment_of(x)?;
        let (x0, y0) = &self.points[i];
        Ok(y0 + self.slope(i) * (x - x0))
    }

    /// Slope immediately to the right of `x`.
    pub fn slope_right_at(&self, x: &Rat) -> Result<Rat> {
        let i = self.segment_of(x)?;
        Ok(self.slope(i))
    }

    /// Slope immediately to the left of `x`; `x` must lie strictly inside the
    /// domain.
    pub fn slope_left_at(&self, x: &Rat) -> Result<Rat> {
        if x <= self.domain_start() {
            return Err(Error::OutsideDomain {
                x: x.clone(),
                start: self.domain_start().clone(),
            });
        }
        let i = self.segment_of(x)?;
        if &self.points[i].0 == x {
            Ok(self.slope(i - 1))
        } else {
            Ok(self.slope(i))
        }
    }

    /// The breakpoints where the derivative actually jumps, in increasing
    /// order. In canonical form that is every interior breakpoint.
    pub fn derivative_jumps(&self) -> Vec<DerivativeJump> {
        (1..self.points.len())
            .filter_map(|i| {
                let left = self.slope(i - 1);
                let right = self.slope(i);
                (left != right).then(|| DerivativeJump {
                    x: self.points[i].0.clone(),
                    left,
                    right,
                })
            })
            .collect()
    }

    pub fn has_jump_at(&self, x: &Rat) -> bool {
        self.points[1..].iter().any(|(bx, _)| bx == x)
    }

    /// Certifies convexity and strict increase by slope inspection.
    pub fn certify(&self) -> Certificate {
        let slopes = self.slopes();
        let convex = slopes.windows(2).all(|w| w[0] <= w[1]);
        let strictly_increasing = slopes.iter().all(|s| s.is_positive());
        Certificate {
            convex,
            strictly_increasing,
        }
    }

    /// Functional inverse of a strictly increasing function. The result is
    /// defined on `[f(x_0), +inf)` with the breakpoints reflected, so
    /// `invert(f)(f(x)) = x` across the whole domain.
    pub fn invert(&self) -> Result<Self> {
        for (i, s) in self.slopes().into_iter().enumerate() {
            if !s.is_positive() {
                return Err(Error::NotInvertible {
                    at: self.points[i].0.clone(),
                    slope: s,
                });
            }
        }
        if self.points[0].1.is_negative() {
            return Err(Error::NegativeInverseDomain(self.points[0].1.clone()));
        }
        let points = self
            .points
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        PlFunction::new(points, self.terminal_slope.recip())
    }

    /// Exact composition `self(g(x))`. The breakpoints of the result are the
    /// breakpoints of `g` together with the preimages under `g` of the
    /// breakpoints of `self`.
    pub fn compose(&self, g: &PlFunction) -> Result<Self> {
        if g.terminal_slope.is_negative() {
            return Err(Error::DomainMismatch);
        }
        let inf_g = g.points.iter().map(|(_, y)| y).min().expect("nonempty");
        if inf_g < self.domain_start() {
            return Err(Error::DomainMismatch);
        }

        let mut xs: BTreeSet<Rat> = g.points.iter().map(|(x, _)| x.clone()).collect();
        for (bx, _) in &self.points[1..] {
            // crossings inside the segments of g
            for w in g.points.windows(2) {
                let (x0, y0) = &w[0];
                let (x1, y1) = &w[1];
                if y0 == y1 {
                    continue;
                }
                if bx >= y0.min(y1) && bx <= y0.max(y1) {
                    xs.insert(x0 + (bx - y0) * (x1 - x0) / (y1 - y0));
                }
            }
            // crossing on the terminal ray of g
            let (xl, yl) = g.points.last().expect("nonempty");
            if !g.terminal_slope.is_zero() {
                let t = xl + (bx - yl) / &g.terminal_slope;
                if t >= *xl {
                    xs.insert(t);
                }
            }
        }

        let mut points = Vec::with_capacity(xs.len());
        for x in xs {
            let y = self.eval(&g.eval(&x)?)?;
            points.push((x, y));
        }
        let terminal = if g.terminal_slope.is_zero() {
            Rat::zero()
        } else {
            &g.terminal_slope * &self.terminal_slope
        };
        PlFunction::new(points, terminal)
    }

    /// Conjugate scaling `x -> e * f(x/e)`: both breakpoint coordinates are
    /// multiplied by `e`, all slopes are unchanged.
    pub fn scale_conj(&self, e: u64) -> Result<Self> {
        if e == 0 {
            return Err(Error::ZeroScale);
        }
        let e = Rat::from_integer(e.into());
        let points = self.points.iter().map(|(x, y)| (x * &e, y * &e)).collect();
        PlFunction::new(points, self.terminal_slope.clone())
    }

    /// The normalized max-affine sum `x -> N^-1 * sum_i max(a_i * x, b_i)`,
    /// convex and piecewise linear. At least one term must have `a >= 1` and
    /// `b = 0`, which makes the sum strictly increasing.
    pub fn max_affine_mean(n: u64, terms: &[(u64, u64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroWeight);
        }
        if terms.is_empty() {
            return Err(Error::EmptyTerms);
        }
        if !terms.iter().any(|&(a, b)| a >= 1 && b == 0) {
            return Err(Error::NoLinearTerm);
        }
        let weight = Rat::from_integer(n.into());
        let mut xs: BTreeSet<Rat> = BTreeSet::new();
        xs.insert(Rat::zero());
        for &(a, b) in terms {
            if a > 0 && b > 0 {
                xs.insert(Rat::new(b.into(), a.into()));
            }
        }
        let value = |x: &Rat| -> Rat {
            let mut acc = Rat::zero();
            for &(a, b) in terms {
                let ax = Rat::from_integer(a.into()) * x;
                let b = Rat::from_integer(b.into());
                acc += ax.max(b);
            }
            acc / &weight
        };
        let points = xs.iter().map(|x| (x.clone(), value(x))).collect();
        let total_slope: Rat = terms
            .iter()
            .map(|&(a, _)| Rat::from_integer(a.into()))
            .sum();
        PlFunction::new(points, total_slope / weight)
    }

    /// Least `x0` such that `self` and `g` coincide identically on
    /// `[x0, +inf)`, or `None` when their terminal behaviour differs.
    pub fn agree_from(&self, g: &PlFunction) -> Option<Rat> {
        if self.terminal_slope != g.terminal_slope {
            return None;
        }
        let start = self.domain_start().max(g.domain_start()).clone();
        let mut xs: BTreeSet<Rat> = BTreeSet::new();
        xs.insert(start);
        for (x, _) in self.points.iter().chain(&g.points) {
            if x >= self.domain_start().max(g.domain_start()) {
                xs.insert(x.clone());
            }
        }
        let xs: Vec<Rat> = xs.into_iter().collect();
        let differs = |x: &Rat| self.eval(x).unwrap() != g.eval(x).unwrap();
        if differs(xs.last().expect("nonempty")) {
            return None;
        }
        // walk left over the merged grid; both functions are linear between
        // consecutive grid points, so agreement can only start at one of them
        let mut agree_since = xs.len() - 1;
        while agree_since > 0 && !differs(&xs[agree_since - 1]) {
            agree_since -= 1;
        }
        Some(xs[agree_since].clone())
    }

    /// Breakpoint dump `x,y,right_slope` with rationals encoded as `a/b`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,right_slope\n");
        for (i, (x, y)) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_rat(x),
                format_rat(y),
                format_rat(&self.slope(i))
            ));
        }
        out
    }

    /// Parses a breakpoint dump produced by [`PlFunction::to_csv`], checking
    /// that the recorded slopes match the breakpoints.
    pub fn from_csv(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "x,y,right_slope" => {}
            _ => return Err(Error::BadCsv("missing `x,y,right_slope` header".into())),
        }
        let mut points: Vec<(Rat, Rat)> = Vec::new();
        let mut slopes: Vec<Rat> = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(Error::BadCsv(format!("expected 3 fields in `{line}`")));
            }
            points.push((parse_rat(fields[0])?, parse_rat(fields[1])?));
            slopes.push(parse_rat(fields[2])?);
        }
        let terminal = slopes.last().cloned().ok_or(Error::EmptyBreakpoints)?;
        let f = PlFunction::new(points.clone(), terminal)?;
        for (i, s) in slopes.iter().enumerate().take(points.len() - 1) {
            if segment_slope(&points[i], &points[i + 1]) != *s {
                return Err(Error::BadCsv(format!(
                    "slope column disagrees with breakpoints at x = {}",
                    format_rat(&points[i].0)
                )));
            }
        }
        Ok(f)
    }
}

impl fmt::Display for PlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .points
            .iter()
            .map(|(x, y)| format!("({}, {})", format_rat(x), format_rat(y)))
            .collect();
        write!(
            f,
            "[{}; slope {}]",
            pts.join(", "),
            format_rat(&self.terminal_slope)
        )
    }
}

fn segment_slope(p: &(Rat, Rat), q: &(Rat, Rat)) -> Rat {
    (&q.1 - &p.1) / (&q.0 - &p.0)
}

fn collinear(p: &(Rat, Rat), q: &(Rat, Rat), r: &(Rat, Rat)) -> bool {
    (&q.1 - &p.1) * (&r.0 - &q.0) == (&r.1 - &q.1) * (&q.0 - &p.0)
}
