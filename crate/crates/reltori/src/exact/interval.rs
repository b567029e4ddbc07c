//! Validated rational intervals.
//!
//! Endpoints are exact big rationals, so interval arithmetic here has no
//! rounding at all: only the *initial* enclosures (of a continued-fraction
//! stream value, or of a square root) carry width. A comparison whose
//! operands overlap raises [`Error::PrecisionExhausted`] instead of guessing.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::scalar::ratio_to_f64;

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval endpoints");
        RatInterval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.midpoint())
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RatInterval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RatInterval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }

    pub fn neg(&self) -> Self {
        RatInterval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let candidates = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        RatInterval::new(lo, hi)
    }

    /// Division; the divisor interval must not contain zero.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.lo.is_negative() && !rhs.hi.is_negative()
            || rhs.lo.is_zero()
            || rhs.hi.is_zero()
        {
            if rhs.is_point() {
                return Err(Error::DivisionByZero);
            }
            if !(rhs.lo.is_positive() || rhs.hi.is_negative()) {
                return Err(Error::PrecisionExhausted);
            }
        }
        let inv = RatInterval::new(
            BigRational::one() / &rhs.hi,
            BigRational::one() / &rhs.lo,
        );
        Ok(self.mul(&inv))
    }

    /// Decide the order of two enclosures, or fail if they overlap
    /// (except for two identical points, which compare equal).
    pub fn try_cmp(&self, rhs: &Self) -> Result<Ordering> {
        if self.hi < rhs.lo {
            return Ok(Ordering::Less);
        }
        if self.lo > rhs.hi {
            return Ok(Ordering::Greater);
        }
        if self.is_point() && rhs.is_point() && self.lo == rhs.lo {
            return Ok(Ordering::Equal);
        }
        Err(Error::PrecisionExhausted)
    }

    /// Exact sign, or failure if the interval straddles zero.
    pub fn try_sign(&self) -> Result<i32> {
        if self.hi.is_negative() {
            Ok(-1)
        } else if self.lo.is_positive() {
            Ok(1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Ok(0)
        } else {
            Err(Error::PrecisionExhausted)
        }
    }

    /// Floor, if it is determined by the enclosure.
    pub fn try_floor(&self) -> Result<BigInt> {
        let fl = self.lo.floor().to_integer();
        let fh = self.hi.floor().to_integer();
        if fl == fh {
            Ok(fl)
        } else if self.hi.is_integer() && fh == &fl + BigInt::one() {
            // [x, n] with x > n-1: floor is f(lo) unless the value is exactly
            // n, which an enclosure cannot attest. Refuse.
            Err(Error::PrecisionExhausted)
        } else {
            Err(Error::PrecisionExhausted)
        }
    }

    /// Enclosure of the fractional part, when the floor is determined.
    pub fn try_fract(&self) -> Result<Self> {
        let f = BigRational::from_integer(self.try_floor()?);
        Ok(RatInterval::new(&self.lo - &f, &self.hi - &f))
    }

    /// Enclosure of the distance to the nearest integer. Total: when the
    /// enclosure spans an integer or half-integer the hull is widened
    /// accordingly, never invalid.
    pub fn dist_nearest_enclosure(&self) -> Self {
        if self.width() >= BigRational::one() {
            return RatInterval::new(
                BigRational::zero(),
                BigRational::new(BigInt::one(), BigInt::from(2)),
            );
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let f = match self.try_fract() {
            Ok(f) => f,
            Err(_) => {
                // spans an integer: distance reaches 0; max is bounded by
                // the distance of the endpoints' fractional parts.
                let d1 = frac_dist(&self.lo);
                let d2 = frac_dist(&self.hi);
                let hi = if d1 > d2 { d1 } else { d2 };
                return RatInterval::new(BigRational::zero(), hi.min(half));
            }
        };
        // f is within [0,1); the map t -> min(t, 1-t) folds at 1/2
        if f.hi <= half {
            f
        } else if f.lo >= half {
            RatInterval::new(BigRational::one() - &f.hi, BigRational::one() - &f.lo)
        } else {
            let left = f.lo.clone();
            let right = BigRational::one() - &f.hi;
            RatInterval::new(left.min(right), half)
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = (-&self.lo).max(self.hi.clone());
            RatInterval::new(BigRational::zero(), hi)
        }
    }

    /// Hull of the pointwise maximum.
    pub fn sup(&self, rhs: &Self) -> Self {
        RatInterval::new(
            self.lo.clone().max(rhs.lo.clone()),
            self.hi.clone().max(rhs.hi.clone()),
        )
    }

    /// Hull of the pointwise minimum.
    pub fn inf(&self, rhs: &Self) -> Self {
        RatInterval::new(
            self.lo.clone().min(rhs.lo.clone()),
            self.hi.clone().min(rhs.hi.clone()),
        )
    }
}

fn frac_dist(r: &BigRational) -> BigRational {
    let f = r - r.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] (~{:.6})", self.lo, self.hi, self.to_f64())
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ordering_and_precision() {
        let a = RatInterval::new(r(1, 3), r(1, 2));
        let b = RatInterval::new(r(2, 3), r(3, 4));
        assert_eq!(a.try_cmp(&b).unwrap(), Ordering::Less);
        assert_eq!(b.try_cmp(&a).unwrap(), Ordering::Greater);
        let c = RatInterval::new(r(2, 5), r(3, 5));
        assert!(matches!(a.try_cmp(&c), Err(Error::PrecisionExhausted)));
    }

    #[test]
    fn interval_products_cover_all_signs() {
        let a = RatInterval::new(r(-2, 1), r(3, 1));
        let b = RatInterval::new(r(-1, 1), r(4, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &r(-8, 1));
        assert_eq!(p.hi(), &r(12, 1));
    }

    #[test]
    fn dist_nearest_is_a_valid_enclosure() {
        // straddles the half-integer fold
        let a = RatInterval::new(r(2, 5), r(3, 5));
        let d = a.dist_nearest_enclosure();
        assert_eq!(d.hi(), &r(1, 2));
        assert_eq!(d.lo(), &r(2, 5));
        // spans an integer
        let b = RatInterval::new(r(9, 10), r(11, 10));
        let d = b.dist_nearest_enclosure();
        assert_eq!(d.lo(), &BigRational::zero());
        assert_eq!(d.hi(), &r(1, 10));
    }

    #[test]
    fn division_guards_zero() {
        let a = RatInterval::point(r(1, 1));
        let z = RatInterval::new(r(-1, 2), r(1, 2));
        assert!(a.div(&z).is_err());
        let pos = RatInterval::new(r(1, 2), r(2, 1));
        let q = a.div(&pos).unwrap();
        assert_eq!(q.lo(), &r(1, 2));
        assert_eq!(q.hi(), &r(2, 1));
    }
}
