//! Continued fractions: expansions, best approximants, `||q alpha||`, and the
//! depth-bounded approximability verdict.
//!
//! Two ways to describe an irrational number:
//!
//! * [`RealSpec::Quadratic`] — an exact quadratic irrational; quotients are
//!   computed exactly by the Euclidean iteration `a = floor(x)`,
//!   `x <- 1/(x - a)`, and `||q alpha||` comes out as an exact scalar.
//! * [`RealSpec::Stream`] — `a0` plus a deterministic, restartable generator
//!   of partial quotients. Values are handled through validated rational
//!   enclosures built from consecutive convergents.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::interval::RatInterval;
use super::scalar::ExactScalar;
use super::value::Scalar;

/// One step of a continued-fraction expansion: index, partial quotient, and
/// the best-approximant pair satisfying
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`
/// with seeds `p_{-1} = 1, p_0 = a_0, q_{-1} = 0, q_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub quotient: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// Deterministic, restartable source of partial quotients `a_1, a_2, ...`
/// (all `>= 1`). Indexing is stateless, so parallel consumers need no
/// coordination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientStream {
    /// `a_k = 2^k`
    Pow2,
    /// `a_k = k!`
    Factorial,
    /// An explicit finite list `a_1..a_n`; deeper requests fail with
    /// [`Error::DepthExceeded`].
    Explicit(Vec<BigInt>),
}

impl QuotientStream {
    /// Partial quotient `a_k` for `k >= 1`.
    pub fn quotient(&self, k: usize) -> Result<BigInt> {
        debug_assert!(k >= 1);
        match self {
            QuotientStream::Pow2 => Ok(BigInt::one() << k),
            QuotientStream::Factorial => {
                let mut f = BigInt::one();
                for i in 2..=k {
                    f *= i;
                }
                Ok(f)
            }
            QuotientStream::Explicit(list) => list
                .get(k - 1)
                .cloned()
                .ok_or(Error::DepthExceeded { needed: k }),
        }
    }
}

/// Specification of an irrational real number for the continued-fraction
/// engine.
#[derive(Clone, Debug, PartialEq)]
pub enum RealSpec {
    /// Exact quadratic irrational (rejects rationals at construction).
    Quadratic(ExactScalar),
    /// `a0 + [0; a1, a2, ...]` with quotients from a deterministic stream.
    Stream { a0: BigInt, quotients: QuotientStream },
}

impl RealSpec {
    /// Wraps an exact scalar, rejecting rational values.
    pub fn quadratic(x: ExactScalar) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::RationalInput);
        }
        Ok(RealSpec::Quadratic(x))
    }

    pub fn stream(a0: u64, quotients: QuotientStream) -> Self {
        RealSpec::Stream {
            a0: BigInt::from(a0),
            quotients,
        }
    }

    /// The builtin registry: `golden`, `sqrt2m1`, `sqrt3m1`, `pow2`,
    /// `factorial`.
    pub fn builtin(name: &str) -> Option<Self> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        match name {
            // (sqrt 5 - 1) / 2
            "golden" => Some(RealSpec::Quadratic(
                ExactScalar::quadratic(-half.clone(), half, 5).unwrap(),
            )),
            // sqrt 2 - 1
            "sqrt2m1" => Some(RealSpec::Quadratic(
                ExactScalar::quadratic(BigRational::from_integer((-1).into()), BigRational::one(), 2)
                    .unwrap(),
            )),
            // sqrt 3 - 1
            "sqrt3m1" => Some(RealSpec::Quadratic(
                ExactScalar::quadratic(BigRational::from_integer((-1).into()), BigRational::one(), 3)
                    .unwrap(),
            )),
            "pow2" => Some(RealSpec::stream(0, QuotientStream::Pow2)),
            "factorial" => Some(RealSpec::stream(0, QuotientStream::Factorial)),
            _ => None,
        }
    }

    /// Replaces the value by its fractional part (drops `a0`); the lattice a
    /// torus builds from the value is unchanged by this.
    pub fn normalized_fract(&self) -> Result<Self> {
        match self {
            RealSpec::Quadratic(x) => RealSpec::quadratic(x.fract()),
            RealSpec::Stream { quotients, .. } => Ok(RealSpec::Stream {
                a0: BigInt::zero(),
                quotients: quotients.clone(),
            }),
        }
    }

    /// Partial quotients `a_0 .. a_depth` (so `depth + 1` entries).
    ///
    /// For quadratic inputs the expansion is computed exactly; it is
    /// eventually periodic, though nothing here depends on that.
    pub fn cf_expand(&self, depth: usize) -> Result<Vec<BigInt>> {
        if depth == 0 {
            return Err(Error::DepthZero);
        }
        match self {
            RealSpec::Quadratic(x) => {
                if x.is_negative() {
                    return Err(Error::InvalidInput("expansion requires a positive value"));
                }
                let mut out = Vec::with_capacity(depth + 1);
                let mut t = x.clone();
                for k in 0..=depth {
                    let a = t.floor_int();
                    out.push(a.clone());
                    if k < depth {
                        let frac = &t - &ExactScalar::from_bigint(a);
                        debug_assert!(!frac.is_zero(), "quadratic input validated irrational");
                        t = frac.recip();
                    }
                }
                Ok(out)
            }
            RealSpec::Stream { a0, quotients } => {
                let mut out = Vec::with_capacity(depth + 1);
                out.push(a0.clone());
                for k in 1..=depth {
                    let a = quotients.quotient(k)?;
                    if !a.is_positive() {
                        return Err(Error::InvalidInput("partial quotients must be >= 1"));
                    }
                    out.push(a);
                }
                Ok(out)
            }
        }
    }

    /// Convergents `(k, a_k, p_k, q_k)` for `k = 0 ..= depth`.
    pub fn convergents(&self, depth: usize) -> Result<Vec<Convergent>> {
        let quotients = self.cf_expand(depth)?;
        let mut out = Vec::with_capacity(quotients.len());
        let (mut p_prev, mut p_cur) = (BigInt::one(), quotients[0].clone());
        let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
        out.push(Convergent {
            index: 0,
            quotient: quotients[0].clone(),
            p: p_cur.clone(),
            q: q_cur.clone(),
        });
        for (k, a) in quotients.iter().enumerate().skip(1) {
            let p_next = a * &p_cur + &p_prev;
            let q_next = a * &q_cur + &q_prev;
            p_prev = std::mem::replace(&mut p_cur, p_next);
            q_prev = std::mem::replace(&mut q_cur, q_next);
            debug_assert!(p_cur.gcd(&q_cur).is_one());
            out.push(Convergent {
                index: k,
                quotient: a.clone(),
                p: p_cur.clone(),
                q: q_cur.clone(),
            });
        }
        Ok(out)
    }

    /// Validated enclosure of the value, from convergents at `depth` and
    /// `depth + 1` (the value lies strictly between consecutive convergents).
    pub fn value_enclosure(&self, depth: usize) -> Result<Scalar> {
        match self {
            RealSpec::Quadratic(x) => Ok(Scalar::Exact(x.clone())),
            RealSpec::Stream { .. } => {
                let convs = self.convergents(depth.max(1) + 1)?;
                let u = convs[convs.len() - 2].value();
                let v = convs[convs.len() - 1].value();
                let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
                Ok(Scalar::Enclosure(RatInterval::new(lo, hi)))
            }
        }
    }

    /// `||q_k alpha||` — exact for quadratics, an enclosure of width
    /// `<= 2/(q_k q_{k+1})` for streams. For `k >= 1` this equals
    /// `|q_k alpha - p_k|`.
    pub fn norm_q_alpha(&self, k: usize) -> Result<Scalar> {
        match self {
            RealSpec::Quadratic(x) => {
                let convs = self.convergents(k.max(1))?;
                let q = ExactScalar::from_bigint(convs[k].q.clone());
                Ok(Scalar::Exact((&q * x).dist_nearest()))
            }
            RealSpec::Stream { .. } => {
                // alpha lies strictly between consecutive convergents; use a
                // few extra terms when the stream has them (the contract only
                // needs k+2, deeper terms just tighten the enclosure)
                let deep = match self.convergents(k + 5) {
                    Ok(c) => c,
                    Err(Error::DepthExceeded { .. }) => self.convergents(k + 2)?,
                    Err(e) => return Err(e),
                };
                let convs = deep;
                let c = &convs[k];
                let x1 = convs[convs.len() - 2].value();
                let x2 = convs[convs.len() - 1].value();
                let e1 = (BigRational::from_integer(c.q.clone()) * x1
                    - BigRational::from_integer(c.p.clone()))
                .abs();
                let e2 = (BigRational::from_integer(c.q.clone()) * x2
                    - BigRational::from_integer(c.p.clone()))
                .abs();
                let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
                if k == 0 {
                    // |q0 alpha - p0| is the distance to floor, not
                    // necessarily to the nearest integer; fold it.
                    let enc = RatInterval::new(lo, hi);
                    let base = RatInterval::new(
                        BigRational::from_integer(c.p.clone()),
                        BigRational::from_integer(c.p.clone()),
                    );
                    return Ok(Scalar::Enclosure(
                        base.add(&enc).dist_nearest_enclosure(),
                    ));
                }
                Ok(Scalar::Enclosure(RatInterval::new(lo, hi)))
            }
        }
    }

    /// `q_k * ||q_k alpha||`, the approximation quality at index `k`.
    pub fn approx_quality(&self, k: usize) -> Result<Scalar> {
        let convs = self.convergents(k.max(1))?;
        let norm = self.norm_q_alpha(k)?;
        Ok(&Scalar::from_bigint(convs[k].q.clone()) * &norm)
    }

    pub fn is_stream(&self) -> bool {
        matches!(self, RealSpec::Stream { .. })
    }

    /// For finite explicit quotient lists, the largest depth `cf_expand`
    /// supports; `None` for quadratics and unbounded streams.
    pub fn max_depth(&self) -> Option<usize> {
        match self {
            RealSpec::Stream {
                quotients: QuotientStream::Explicit(list),
                ..
            } => Some(list.len()),
            _ => None,
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Quadratic(x) => write!(f, "{x}"),
            RealSpec::Stream { a0, quotients } => match quotients {
                QuotientStream::Pow2 if a0.is_zero() => write!(f, "pow2"),
                QuotientStream::Factorial if a0.is_zero() => write!(f, "factorial"),
                QuotientStream::Explicit(list) => {
                    write!(f, "[{a0};")?;
                    for (i, a) in list.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, "]")
                }
                _ => write!(f, "[{a0};<stream>]"),
            },
        }
    }
}

impl FromStr for RealSpec {
    type Err = Error;

    /// Accepts a builtin id (`golden`, ...), an explicit finite list
    /// `[a0;a1,a2,...]`, or an exact scalar string (which must be
    /// irrational).
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(spec) = RealSpec::builtin(&s) {
            return Ok(spec);
        }
        if let Some(body) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let (a0s, rest) = body
                .split_once(';')
                .ok_or_else(|| Error::Parse(format!("expected '[a0;a1,...]' in '{input}'")))?;
            let a0: BigInt = a0s
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer part in '{input}'")))?;
            if a0.is_negative() {
                return Err(Error::InvalidInput("a0 must be >= 0"));
            }
            let mut list = Vec::new();
            for tok in rest.split(',').filter(|t| !t.is_empty()) {
                let a: BigInt = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad quotient '{tok}'")))?;
                if !a.is_positive() {
                    return Err(Error::InvalidInput("partial quotients must be >= 1"));
                }
                list.push(a);
            }
            if list.is_empty() {
                return Err(Error::Parse("quotient list is empty".into()));
            }
            return Ok(RealSpec::Stream {
                a0,
                quotients: QuotientStream::Explicit(list),
            });
        }
        let x: ExactScalar = s.parse()?;
        RealSpec::quadratic(x)
    }
}

/// Depth-bounded approximability verdict. This is evidence, never a proof:
/// a stream may do anything beyond the inspected window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproxVerdict {
    /// All inspected quotients `a_1..a_depth` are `<= bound`.
    BadlyApproxEvidence { bound: u64 },
    /// First index whose quotient exceeds the bound.
    WellApproxEvidence { index: usize, quotient: BigInt },
}

/// Scans `a_1 ..= a_depth` against the bound `K`.
pub fn badly_approximable_to_depth(
    x: &RealSpec,
    depth: usize,
    k_bound: u64,
) -> Result<ApproxVerdict> {
    if depth == 0 {
        return Err(Error::DepthZero);
    }
    let quotients = x.cf_expand(depth)?;
    let bound = BigInt::from(k_bound);
    for (i, a) in quotients.iter().enumerate().skip(1) {
        if a > &bound {
            return Ok(ApproxVerdict::WellApproxEvidence {
                index: i,
                quotient: a.clone(),
            });
        }
    }
    Ok(ApproxVerdict::BadlyApproxEvidence { bound: k_bound })
}
