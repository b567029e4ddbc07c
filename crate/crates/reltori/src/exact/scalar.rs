//! Exact scalars of the form `p + q*sqrt(d)` with big-rational `p`, `q` and a
//! square-free radicand `d`.
//!
//! Everything downstream (orbits, intersection counts, areas) is built on the
//! guarantee that comparison, sign and floor never touch floating point:
//! denominators of convergents grow exponentially, and `f64` comparisons go
//! wrong around depth 35.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::interval::RatInterval;

/// An element of the real quadratic field Q(sqrt(d)), stored as
/// `rational + coeff * sqrt(disc)`.
///
/// Normalisation invariants, enforced by every constructor:
/// * `disc` is square-free and `disc >= 2`, or `disc == 0`;
/// * `coeff == 0` implies `disc == 0` (rationals carry no radicand).
///
/// With those invariants the representation is unique, so derived equality is
/// value equality. Arithmetic between two scalars with distinct positive
/// radicands has no exact representation here and panics; callers validate
/// field compatibility at construction boundaries (see
/// [`ExactScalar::compatible`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    rational: BigRational,
    coeff: BigRational,
    disc: u64,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::from_ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_ratio(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_ratio(BigRational::from_integer(n))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        ExactScalar {
            rational: r,
            coeff: BigRational::zero(),
            disc: 0,
        }
    }

    /// `num / den` as an exact rational scalar. `den` must be non-zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_ratio(BigRational::new(num.into(), den.into()))
    }

    /// Builds `rational + coeff * sqrt(disc)`, validating the radicand.
    ///
    /// `disc == 0` or `disc == 1` fold into the rational part.
    pub fn quadratic(rational: BigRational, coeff: BigRational, disc: u64) -> Result<Self> {
        if coeff.is_zero() || disc == 0 {
            return Ok(Self::from_ratio(rational));
        }
        if disc == 1 {
            return Ok(Self::from_ratio(rational + coeff));
        }
        if !is_square_free(disc) {
            return Err(Error::NotSquareFree(disc));
        }
        Ok(ExactScalar {
            rational,
            coeff,
            disc,
        })
    }

    /// `sqrt(d)` as an exact scalar.
    pub fn sqrt_of(d: u64) -> Result<Self> {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> u64 {
        self.disc
    }

    pub fn is_rational(&self) -> bool {
        self.disc == 0
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rational.is_integer()
    }

    /// Whether arithmetic between the two scalars stays inside one field.
    pub fn compatible(&self, rhs: &Self) -> bool {
        self.disc == 0 || rhs.disc == 0 || self.disc == rhs.disc
    }

    fn joint_disc(&self, rhs: &Self) -> u64 {
        match (self.disc, rhs.disc) {
            (0, d) | (d, 0) => d,
            (d1, d2) if d1 == d2 => d1,
            (d1, d2) => panic!(
                "exact arithmetic cannot mix Q(sqrt({d1})) and Q(sqrt({d2}))"
            ),
        }
    }

    fn normalized(rational: BigRational, coeff: BigRational, disc: u64) -> Self {
        if coeff.is_zero() {
            Self::from_ratio(rational)
        } else {
            debug_assert!(disc >= 2);
            ExactScalar {
                rational,
                coeff,
                disc,
            }
        }
    }

    /// Exact sign: -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        let sp = ratio_sign(&self.rational);
        let sq = ratio_sign(&self.coeff);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // Opposite signs: |p| vs |q| sqrt(d) decided by squaring.
        let p2 = &self.rational * &self.rational;
        let q2d = &self.coeff * &self.coeff * BigRational::from_integer(BigInt::from(self.disc));
        match p2.cmp(&q2d) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            // p^2 = q^2 d would make sqrt(d) rational; unreachable for
            // square-free d >= 2 with p, q != 0.
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Total order inside one field (or against a rational). Panics on
    /// incompatible radicands, like the arithmetic operators.
    pub fn cmp_exact(&self, rhs: &Self) -> Ordering {
        let diff = self - rhs;
        match diff.signum() {
            x if x < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    fn cmp_int(&self, n: &BigInt) -> Ordering {
        if self.coeff.is_zero() {
            return self.rational.cmp(&BigRational::from_integer(n.clone()));
        }
        self.cmp_exact(&Self::from_bigint(n.clone()))
    }

    /// Exact floor, by exponential bracketing plus binary search on exact
    /// integer comparisons.
    pub fn floor_int(&self) -> BigInt {
        if self.coeff.is_zero() {
            return self.rational.floor().to_integer();
        }
        let one = BigInt::one();
        let (mut lo, mut hi);
        if self.signum() >= 0 {
            lo = BigInt::zero();
            hi = BigInt::one();
            while self.cmp_int(&hi) != Ordering::Less {
                lo = hi.clone();
                hi *= 2;
            }
        } else {
            hi = BigInt::zero();
            lo = -BigInt::one();
            while self.cmp_int(&lo) == Ordering::Less {
                hi = lo.clone();
                lo *= 2;
            }
        }
        // invariant: lo <= self < hi
        while &hi - &lo > one {
            let mid = (&lo + &hi) >> 1;
            if self.cmp_int(&mid) == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &Self::from_bigint(self.floor_int())
    }

    /// Distance to the nearest integer, `min({x}, 1 - {x})`, exactly.
    /// Both branches agree at `{x} = 1/2`, where the value is exactly `1/2`.
    pub fn dist_nearest(&self) -> Self {
        let f = self.fract();
        let g = &Self::one() - &f;
        if f.cmp_exact(&g) == Ordering::Greater {
            g
        } else {
            f
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        &Self::one() / self
    }

    /// Approximate value for display and sorting hints; never used in logic.
    pub fn to_f64(&self) -> f64 {
        let mut v = ratio_to_f64(&self.rational);
        if !self.coeff.is_zero() {
            v += ratio_to_f64(&self.coeff) * (self.disc as f64).sqrt();
        }
        v
    }

    /// Validated rational enclosure of width `<= |coeff| * 2^(1-bits)`.
    pub fn enclosure(&self, bits: u64) -> RatInterval {
        if self.coeff.is_zero() {
            return RatInterval::point(self.rational.clone());
        }
        let scale: BigInt = BigInt::one() << bits;
        let scaled = BigInt::from(self.disc) * &scale * &scale;
        let root = scaled.sqrt(); // floor(sqrt(d) * 2^bits)
        let lo = BigRational::new(root.clone(), scale.clone());
        let hi = BigRational::new(root + 1, scale);
        let (s_lo, s_hi) = if self.coeff.is_negative() {
            (&self.coeff * hi, &self.coeff * lo)
        } else {
            (&self.coeff * lo, &self.coeff * hi)
        };
        RatInterval::new(&self.rational + s_lo, &self.rational + s_hi)
    }

    /// Decimal rendering with a fixed number of significant digits,
    /// round-half-up, computed exactly.
    pub fn to_decimal_string(&self, sig_digits: usize) -> String {
        decimal_string(self, sig_digits)
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (~{:.6})", self.to_f64())
    }
}

fn is_square_free(d: u64) -> bool {
    let mut rem = d;
    let mut p: u64 = 2;
    while p <= 100_000 && p * p <= rem {
        if rem.is_multiple_of(p * p) {
            return false;
        }
        while rem.is_multiple_of(p) {
            rem /= p;
        }
        p += 1;
    }
    // Remaining factor has no prime below 1e5; reject it only if it is a
    // perfect square. (A square factor with two distinct huge primes is not
    // detectable cheaply and does not occur for realistic inputs.)
    if rem > 1 {
        let r = rem.sqrt();
        if r * r == rem {
            return false;
        }
    }
    true
}

pub(crate) fn ratio_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Robust BigRational -> f64 that tolerates arbitrarily large numerators and
/// denominators (num's own conversion can overflow to NaN).
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let sn = (nb - 80).max(0) as u64;
    let sd = (db - 80).max(0) as u64;
    let nf = (n >> sn).to_f64().unwrap_or(f64::NAN);
    let df = (d >> sd).to_f64().unwrap_or(f64::NAN);
    let base = nf / df;
    let shift = sn as i64 - sd as i64;
    if shift == 0 {
        base
    } else {
        base * (shift as f64).exp2()
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let d = self.joint_disc(rhs);
        ExactScalar::normalized(&self.rational + &rhs.rational, &self.coeff + &rhs.coeff, d)
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        let d = self.joint_disc(rhs);
        ExactScalar::normalized(&self.rational - &rhs.rational, &self.coeff - &rhs.coeff, d)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let d = self.joint_disc(rhs);
        let dd = BigRational::from_integer(BigInt::from(d));
        let rational = &self.rational * &rhs.rational + &self.coeff * &rhs.coeff * dd;
        let coeff = &self.rational * &rhs.coeff + &self.coeff * &rhs.rational;
        ExactScalar::normalized(rational, coeff, d)
    }
}

impl Div for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        assert!(!rhs.is_zero(), "division by zero exact scalar");
        let d = self.joint_disc(rhs);
        // multiply by the conjugate of rhs
        let conj = ExactScalar::normalized(rhs.rational.clone(), -&rhs.coeff, rhs.disc);
        let num = self * &conj;
        let den = &rhs.rational * &rhs.rational
            - &rhs.coeff * &rhs.coeff * BigRational::from_integer(BigInt::from(d));
        debug_assert!(!den.is_zero());
        ExactScalar::normalized(num.rational / &den, num.coeff / &den, d)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::normalized(-&self.rational, -&self.coeff, self.disc)
    }
}

macro_rules! forward_owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl PartialOrd for ExactScalar {
    /// `None` exactly when the radicands are incompatible.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.compatible(other) {
            Some(self.cmp_exact(other))
        } else {
            None
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn ratio(r: &BigRational) -> String {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.coeff.is_zero() {
            return write!(f, "{}", ratio(&self.rational));
        }
        let sign = if self.coeff.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}*sqrt({})",
            ratio(&self.rational),
            sign,
            ratio(&self.coeff.abs()),
            self.disc
        )
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Parses `"p/q"` or `"p/q+r/s*sqrt(d)"` (whitespace is ignored; the
    /// rational part may be omitted, as may `r/s*` for a bare `sqrt(d)`).
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        // split into signed terms at top-level +/-
        let mut terms: Vec<(i32, String)> = Vec::new();
        let mut current = String::new();
        let mut sign = 1i32;
        let mut expect_term_start = true;
        for c in s.chars() {
            if (c == '+' || c == '-') && !expect_term_start {
                terms.push((sign, std::mem::take(&mut current)));
                sign = if c == '-' { -1 } else { 1 };
                expect_term_start = true;
            } else if (c == '+' || c == '-') && expect_term_start && current.is_empty() {
                if c == '-' {
                    sign = -sign;
                }
            } else {
                current.push(c);
                expect_term_start = false;
            }
        }
        terms.push((sign, current));

        let mut rational = BigRational::zero();
        let mut coeff = BigRational::zero();
        let mut disc: Option<u64> = None;
        for (sgn, term) in terms {
            if term.is_empty() {
                return Err(Error::Parse(format!("malformed scalar '{input}'")));
            }
            if let Some(idx) = term.find("sqrt(") {
                if !term.ends_with(')') {
                    return Err(Error::Parse(format!("unterminated sqrt in '{input}'")));
                }
                let d: u64 = term[idx + 5..term.len() - 1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radicand in '{input}'")))?;
                let prefix = &term[..idx];
                let c = if prefix.is_empty() {
                    BigRational::one()
                } else if let Some(stripped) = prefix.strip_suffix('*') {
                    parse_ratio(stripped)?
                } else {
                    return Err(Error::Parse(format!(
                        "expected '*' before sqrt in '{input}'"
                    )));
                };
                match disc {
                    None => disc = Some(d),
                    Some(prev) if prev == d => {}
                    Some(prev) => {
                        return Err(Error::MixedFields { left: prev, right: d });
                    }
                }
                coeff += c * BigRational::from_integer(sgn.into());
            } else {
                rational += parse_ratio(&term)? * BigRational::from_integer(sgn.into());
            }
        }
        ExactScalar::quadratic(rational, coeff, disc.unwrap_or(0))
    }
}

pub(crate) fn parse_ratio(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let num: BigInt = n.parse().map_err(|_| err())?;
            let den: BigInt = d.parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(num))
        }
    }
}

fn decimal_string(x: &ExactScalar, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let s = x.abs();
    let ten = ExactScalar::from_int(10);

    // magnitude: smallest e with s < 10^e
    let mut e: i64 = 0;
    let mut p = ExactScalar::one(); // 10^e
    if s.cmp_exact(&p) != Ordering::Less {
        while s.cmp_exact(&p) != Ordering::Less {
            p = &p * &ten;
            e += 1;
        }
    } else {
        let mut q = &p / &ten; // 10^(e-1)
        while s.cmp_exact(&q) == Ordering::Less {
            p = q;
            q = &p / &ten;
            e -= 1;
        }
    }
    // digits = round(s * 10^(sig - e))
    let shift = sig as i64 - e;
    let mut scaled = s;
    if shift >= 0 {
        for _ in 0..shift {
            scaled = &scaled * &ten;
        }
    } else {
        for _ in 0..(-shift) {
            scaled = &scaled / &ten;
        }
    }
    let half = ExactScalar::ratio(1, 2);
    let mut digits = (&scaled + &half).floor_int();
    let cap = BigInt::from(10u32).pow(sig as u32);
    if digits >= cap {
        digits /= 10;
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);

    let body = if e <= 0 {
        format!("0.{}{}", "0".repeat((-e) as usize), ds)
    } else if (e as usize) < sig {
        format!("{}.{}", &ds[..e as usize], &ds[e as usize..])
    } else if (e as usize) == sig {
        ds
    } else {
        format!("{}{}", ds, "0".repeat(e as usize - sig))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}
