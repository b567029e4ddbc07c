//! [`Scalar`]: the working number type of the geometry layer.
//!
//! A scalar is one of:
//!
//! * an exact element of one real quadratic field;
//! * an affine form `c0 + c1 * alpha` with exact coefficients over a shared
//!   symbol `alpha` that carries a validated enclosure (used when the torus
//!   modulus is a continued-fraction stream). Sums and differences of affine
//!   forms cancel *exactly*, which is what keeps coincident coordinates
//!   recognisably equal; only genuinely nonlinear steps (products,
//!   quotients) drop to enclosures;
//! * a validated rational enclosure.
//!
//! No comparison ever guesses: an undecidable one raises
//! [`Error::PrecisionExhausted`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};

use super::interval::RatInterval;
use super::scalar::ExactScalar;

/// Initial precision for promoting an exact quadratic to an enclosure.
const PROMOTE_BITS: u64 = 128;
/// Precision ladder for comparisons across incompatible fields.
const ESCALATION_BITS: [u64; 3] = [128, 512, 2048];

/// Shared symbol for an irrational handled through an enclosure. The
/// enclosure is fixed when the symbol is created (torus construction);
/// everything derived from it inherits that precision.
#[derive(Debug)]
pub struct AlphaSymbol {
    enclosure: RatInterval,
    approx: f64,
}

impl AlphaSymbol {
    pub fn new(enclosure: RatInterval) -> Arc<Self> {
        let approx = enclosure.to_f64();
        Arc::new(AlphaSymbol { enclosure, approx })
    }

    pub fn enclosure(&self) -> &RatInterval {
        &self.enclosure
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }
}

/// Exact-or-enclosed scalar value.
#[derive(Clone)]
pub enum Scalar {
    /// Exact element of some Q(sqrt(d)).
    Exact(ExactScalar),
    /// `c0 + c1 * alpha` with exact coefficients; `c1` is never zero
    /// (constructors collapse that case to `Exact`).
    Affine {
        c0: ExactScalar,
        c1: ExactScalar,
        sym: Arc<AlphaSymbol>,
    },
    /// Validated rational enclosure of a real number.
    Enclosure(RatInterval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactScalar::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(ExactScalar::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(ExactScalar::from_int(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Exact(ExactScalar::from_bigint(n))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar::Exact(ExactScalar::from_ratio(r))
    }

    /// Exact rational scalar carrying the precise binary value of a float.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Scalar::from_ratio)
    }

    /// Affine form `c0 + c1 * alpha`; collapses to `Exact` when `c1 = 0`.
    pub fn affine(c0: ExactScalar, c1: ExactScalar, sym: Arc<AlphaSymbol>) -> Self {
        if c1.is_zero() {
            Scalar::Exact(c0)
        } else {
            Scalar::Affine { c0, c1, sym }
        }
    }

    fn from_interval(i: RatInterval) -> Self {
        if i.is_point() {
            Scalar::Exact(ExactScalar::from_ratio(i.lo().clone()))
        } else {
            Scalar::Enclosure(i)
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Scalar::Exact(x) => Some(x),
            _ => None,
        }
    }

    pub fn enclosure(&self, bits: u64) -> RatInterval {
        match self {
            Scalar::Exact(x) => x.enclosure(bits),
            Scalar::Affine { c0, c1, sym } => c0
                .enclosure(bits)
                .add(&c1.enclosure(bits).mul(&sym.enclosure)),
            Scalar::Enclosure(i) => i.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(x) => x.is_zero(),
            // normalized affine forms have c1 != 0 and alpha irrational
            Scalar::Affine { .. } => false,
            Scalar::Enclosure(i) => i.is_point() && i.lo() == &BigRational::from_integer(0.into()),
        }
    }

    fn same_symbol(a: &Arc<AlphaSymbol>, b: &Arc<AlphaSymbol>) -> bool {
        Arc::ptr_eq(a, b)
    }

    fn add_impl(&self, rhs: &Scalar, negate_rhs: bool) -> Scalar {
        let flip = |x: &ExactScalar| if negate_rhs { -x } else { x.clone() };
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if a.compatible(b) => {
                Scalar::Exact(a + &flip(b))
            }
            (Scalar::Exact(a), Scalar::Affine { c0, c1, sym }) if a.compatible(c0) => {
                Scalar::affine(a + &flip(c0), flip(c1), sym.clone())
            }
            (Scalar::Affine { c0, c1, sym }, Scalar::Exact(b)) if c0.compatible(b) => {
                Scalar::affine(c0 + &flip(b), c1.clone(), sym.clone())
            }
            (
                Scalar::Affine { c0, c1, sym },
                Scalar::Affine {
                    c0: d0,
                    c1: d1,
                    sym: s2,
                },
            ) if Self::same_symbol(sym, s2) && c0.compatible(d0) && c1.compatible(d1) => {
                Scalar::affine(c0 + &flip(d0), c1 + &flip(d1), sym.clone())
            }
            _ => {
                let r = self.enclosure(PROMOTE_BITS);
                let s = rhs.enclosure(PROMOTE_BITS);
                Scalar::from_interval(if negate_rhs { r.sub(&s) } else { r.add(&s) })
            }
        }
    }

    fn mul_impl(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if a.compatible(b) => Scalar::Exact(a * b),
            (Scalar::Exact(a), Scalar::Affine { c0, c1, sym })
            | (Scalar::Affine { c0, c1, sym }, Scalar::Exact(a))
                if a.compatible(c0) && a.compatible(c1) =>
            {
                Scalar::affine(a * c0, a * c1, sym.clone())
            }
            _ => Scalar::from_interval(
                self.enclosure(PROMOTE_BITS)
                    .mul(&rhs.enclosure(PROMOTE_BITS)),
            ),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if a.compatible(b) => {
                if b.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            (Scalar::Affine { c0, c1, sym }, Scalar::Exact(b))
                if b.compatible(c0) && b.compatible(c1) =>
            {
                if b.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::affine(c0 / b, c1 / b, sym.clone()))
                }
            }
            _ => Ok(Scalar::from_interval(
                self.enclosure(PROMOTE_BITS)
                    .div(&rhs.enclosure(PROMOTE_BITS))?,
            )),
        }
    }

    /// Exact sign where determinable.
    pub fn try_sign(&self) -> Result<i32> {
        match self {
            Scalar::Exact(x) => Ok(x.signum()),
            Scalar::Affine { c0, c1, sym } => {
                if c0.is_rational() && c1.is_rational() {
                    // evaluate the two endpoint values directly
                    let r0 = c0.rational_part();
                    let r1 = c1.rational_part();
                    let (lo, hi) = if c1.is_positive() {
                        (r0 + r1 * sym.enclosure().lo(), r0 + r1 * sym.enclosure().hi())
                    } else {
                        (r0 + r1 * sym.enclosure().hi(), r0 + r1 * sym.enclosure().lo())
                    };
                    return RatInterval::new(lo, hi).try_sign();
                }
                self.enclosure(PROMOTE_BITS).try_sign()
            }
            Scalar::Enclosure(i) => i.try_sign(),
        }
    }

    /// Ordering; escalates precision for exact values from different fields,
    /// and fails with [`Error::PrecisionExhausted`] when enclosures overlap.
    pub fn try_cmp(&self, rhs: &Scalar) -> Result<Ordering> {
        let diff = self.add_impl(rhs, true);
        match &diff {
            Scalar::Exact(x) => Ok(sign_to_ordering(x.signum())),
            Scalar::Affine { .. } => Ok(sign_to_ordering(diff.try_sign()?)),
            Scalar::Enclosure(_) => {
                // retry with escalating precision for exact operands from
                // different quadratic fields
                if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, rhs) {
                    for bits in ESCALATION_BITS {
                        if let Ok(ord) = a.enclosure(bits).try_cmp(&b.enclosure(bits)) {
                            return Ok(ord);
                        }
                    }
                    return Err(Error::PrecisionExhausted);
                }
                self.enclosure(PROMOTE_BITS)
                    .try_cmp(&rhs.enclosure(PROMOTE_BITS))
            }
        }
    }

    pub fn try_lt(&self, rhs: &Scalar) -> Result<bool> {
        Ok(self.try_cmp(rhs)? == Ordering::Less)
    }

    pub fn floor(&self) -> Result<BigInt> {
        match self {
            Scalar::Exact(x) => Ok(x.floor_int()),
            Scalar::Affine { .. } => self.enclosure(PROMOTE_BITS).try_floor(),
            Scalar::Enclosure(i) => i.try_floor(),
        }
    }

    pub fn fract(&self) -> Result<Scalar> {
        let f = Scalar::from_bigint(self.floor()?);
        Ok(self.add_impl(&f, true))
    }

    /// Distance to the nearest integer. Total: undecidable branch choices
    /// widen to an enclosure instead of failing.
    pub fn dist_nearest(&self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.dist_nearest()),
            _ => {
                if let Ok(f) = self.fract() {
                    let g = &Scalar::one() - &f;
                    match f.try_cmp(&g) {
                        Ok(Ordering::Greater) => return g,
                        Ok(_) => return f,
                        Err(_) => {}
                    }
                }
                Scalar::Enclosure(
                    self.enclosure(PROMOTE_BITS).dist_nearest_enclosure(),
                )
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        match self.try_sign() {
            Ok(s) if s < 0 => -self,
            Ok(_) => self.clone(),
            Err(_) => Scalar::Enclosure(self.enclosure(PROMOTE_BITS).abs()),
        }
    }

    /// Pointwise maximum; widens to the enclosure hull when undecidable.
    pub fn sup(&self, rhs: &Scalar) -> Scalar {
        match self.try_cmp(rhs) {
            Ok(Ordering::Less) => rhs.clone(),
            Ok(_) => self.clone(),
            Err(_) => Scalar::from_interval(
                self.enclosure(PROMOTE_BITS)
                    .sup(&rhs.enclosure(PROMOTE_BITS)),
            ),
        }
    }

    /// Pointwise minimum; widens to the enclosure hull when undecidable.
    pub fn inf(&self, rhs: &Scalar) -> Scalar {
        match self.try_cmp(rhs) {
            Ok(Ordering::Greater) => rhs.clone(),
            Ok(_) => self.clone(),
            Err(_) => Scalar::from_interval(
                self.enclosure(PROMOTE_BITS)
                    .inf(&rhs.enclosure(PROMOTE_BITS)),
            ),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(x) => x.to_f64(),
            Scalar::Affine { c0, c1, sym } => c0.to_f64() + c1.to_f64() * sym.approx,
            Scalar::Enclosure(i) => i.to_f64(),
        }
    }

    /// Fixed-significant-digit decimal; non-exact values render the midpoint
    /// of their enclosure.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        match self {
            Scalar::Exact(x) => x.to_decimal_string(sig),
            _ => ExactScalar::from_ratio(self.enclosure(PROMOTE_BITS).midpoint())
                .to_decimal_string(sig),
        }
    }

    /// Lossless textual form: `p/q[+r/s*sqrt(d)]` for exact values, the
    /// enclosure `[lo,hi]` otherwise.
    pub fn exact_form(&self) -> String {
        match self {
            Scalar::Exact(x) => x.to_string(),
            _ => self.enclosure(PROMOTE_BITS).to_string(),
        }
    }
}

fn sign_to_ordering(s: i32) -> Ordering {
    match s {
        x if x < 0 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

impl PartialEq for Scalar {
    /// Structural equality: exact values compare by value (representations
    /// are unique), affine forms by coefficients over the same symbol,
    /// enclosures by endpoints. Use [`Scalar::try_cmp`] for semantic order.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (
                Scalar::Affine { c0, c1, sym },
                Scalar::Affine {
                    c0: d0,
                    c1: d1,
                    sym: s2,
                },
            ) => Self::same_symbol(sym, s2) && c0 == d0 && c1 == d1,
            (Scalar::Enclosure(a), Scalar::Enclosure(b)) => a == b,
            _ => false,
        }
    }
}

impl From<ExactScalar> for Scalar {
    fn from(x: ExactScalar) -> Self {
        Scalar::Exact(x)
    }
}

impl From<RatInterval> for Scalar {
    fn from(i: RatInterval) -> Self {
        Scalar::Enclosure(i)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, false)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, true)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_impl(rhs)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero (or an enclosure that may contain zero);
    /// use [`Scalar::try_div`] where the divisor is not known to be safe.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.try_div(rhs).expect("scalar division by (possible) zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(-x),
            Scalar::Affine { c0, c1, sym } => Scalar::Affine {
                c0: -c0,
                c1: -c1,
                sym: sym.clone(),
            },
            Scalar::Enclosure(i) => Scalar::Enclosure(i.neg()),
        }
    }
}

macro_rules! forward_owned {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(x) => write!(f, "Exact({x:?})"),
            Scalar::Affine { c0, c1, .. } => {
                write!(f, "Affine({c0} + {c1}*alpha ~ {:.6})", self.to_f64())
            }
            Scalar::Enclosure(i) => write!(f, "Enclosure({i:?})"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.exact_form())
    }
}

/// `1/2` as a rational, used by several modules.
pub(crate) fn one_half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight_alpha() -> Arc<AlphaSymbol> {
        // alpha ~ 0.4531 with a 2^-200 enclosure
        let denom = BigInt::one() << 200u32;
        let num = &denom * BigInt::from(4531) / BigInt::from(10000);
        let lo = BigRational::new(num.clone(), denom.clone());
        let hi = BigRational::new(num + BigInt::one(), denom);
        AlphaSymbol::new(RatInterval::new(lo, hi))
    }

    #[test]
    fn affine_differences_cancel_exactly() {
        let sym = tight_alpha();
        let alpha = Scalar::affine(ExactScalar::zero(), ExactScalar::one(), sym.clone());
        let x = &Scalar::from_int(3) - &(&Scalar::from_int(5) * &alpha);
        let y = &Scalar::from_int(3) - &(&Scalar::from_int(5) * &alpha);
        let d = &x - &y;
        assert!(d.is_zero());
        assert_eq!(x.try_cmp(&y).unwrap(), Ordering::Equal);
    }

    #[test]
    fn affine_comparisons_use_the_enclosure() {
        let sym = tight_alpha();
        let alpha = Scalar::affine(ExactScalar::zero(), ExactScalar::one(), sym);
        assert_eq!(
            alpha.try_cmp(&Scalar::from_ratio(one_half())).unwrap(),
            Ordering::Less
        );
        assert_eq!(alpha.floor().unwrap(), BigInt::from(0));
    }

    #[test]
    fn promotion_on_mixed_fields() {
        let a = Scalar::Exact("sqrt(2)".parse().unwrap());
        let b = Scalar::Exact("sqrt(3)".parse().unwrap());
        let s = &a + &b;
        assert!(!s.is_exact());
        assert!((s.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(a.try_cmp(&b).unwrap(), Ordering::Less);
    }

    #[test]
    fn exact_stays_exact() {
        let a = Scalar::Exact("1/3".parse().unwrap());
        let b = Scalar::Exact("-1/2+1/2*sqrt(5)".parse().unwrap());
        let s = &a * &b;
        assert!(s.is_exact());
    }

    #[test]
    fn enclosure_comparison_fails_loudly() {
        let i1 = Scalar::Enclosure(RatInterval::new(
            BigRational::new(1.into(), 3.into()),
            BigRational::new(1.into(), 2.into()),
        ));
        let i2 = Scalar::Enclosure(RatInterval::new(
            BigRational::new(2.into(), 5.into()),
            BigRational::new(3.into(), 5.into()),
        ));
        assert!(matches!(i1.try_cmp(&i2), Err(Error::PrecisionExhausted)));
    }
}
