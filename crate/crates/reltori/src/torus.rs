//! The normalized flat torus, straight slits, intersection parities against
//! the homology generators, and reduction of a long horizontal slit to a
//! short representative in the same relative mod-2 class.
//!
//! Conventions used throughout (and by the checkerboard module):
//!
//! * The torus is `R^2 / Lambda` with `Lambda = (0,1)Z + (a,alpha)Z`,
//!   `a > 0`, `alpha` irrational and normalized into `(0,1)`. Its area is
//!   exactly `a`.
//! * "Strip coordinates" present the torus as `[0,a] x [0,1)` with the
//!   gluings `(a,h) ~ (0, h - alpha mod 1)` and `(x,1) ~ (x,0)`. Horizontal
//!   segments stay horizontal there.
//! * The generator `gamma` is the vertical circle (lifts `x = n a`); `delta`
//!   is the diagonal circle (lifts `y = (alpha/a) x - m`). Crossing counts
//!   use perturbed representatives: a segment crosses `gamma` once per
//!   integer `n` with `n a` in the half-open x-range `[x_min, x_max)`, and
//!   crosses `delta` once per integer `k` in `[phi_min, phi_max)` where
//!   `phi(X,Y) = Y - (alpha/a) X`. This reproduces the ad hoc endpoint
//!   conventions (the left endpoint of a horizontal slit counts toward
//!   `gamma`; its right endpoint never counts) with one uniform rule.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, RealSpec, Scalar};

/// Default enclosure depth used when the twist is a quotient stream. Ample
/// for ad hoc geometry on slits up to a few thousand pieces; the trajectory
/// driver sizes deeper enclosures itself when it needs them.
const DEFAULT_ENCLOSURE_DEPTH: usize = 12;

/// Hard cap on the number of pieces any enumeration is allowed to touch.
const ENUMERATION_LIMIT: u64 = 1 << 24;

/// Flat torus `R^2 / ((0,1)Z + (a,alpha)Z)` with exact parameters.
///
/// `alpha` is normalized to its fractional part at construction; this leaves
/// the lattice unchanged and keeps every corner computation in `(0,1)`.
#[derive(Clone, Debug)]
pub struct NormalizedTorus {
    a: ExactScalar,
    alpha_spec: RealSpec,
    alpha: Scalar,
    enclosure_depth: usize,
}

impl NormalizedTorus {
    pub fn new(a: ExactScalar, alpha: RealSpec) -> Result<Self> {
        Self::with_enclosure_depth(a, alpha, DEFAULT_ENCLOSURE_DEPTH)
    }

    /// Unit-modulus torus (`a = 1`).
    pub fn unit(alpha: RealSpec) -> Result<Self> {
        Self::new(ExactScalar::one(), alpha)
    }

    /// Builds the torus with a chosen enclosure depth for stream moduli.
    /// Deeper enclosures let longer orbits sort without precision loss.
    pub fn with_enclosure_depth(a: ExactScalar, alpha: RealSpec, depth: usize) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidInput("torus modulus a must be positive"));
        }
        let alpha_spec = alpha.normalized_fract()?;
        // finite quotient lists cap the achievable precision; the enclosure
        // is then as tight as the list allows, and any comparison it cannot
        // decide later fails with PrecisionExhausted
        let depth = match alpha_spec.max_depth() {
            Some(n) if n >= 2 => depth.min(n - 1),
            Some(_) => return Err(Error::DepthExceeded { needed: 2 }),
            None => depth,
        };
        let alpha = match alpha_spec.value_enclosure(depth)? {
            v @ Scalar::Exact(_) => v,
            v => {
                // streams enter the geometry as an affine symbol so that
                // linear combinations cancel exactly
                let sym = crate::exact::AlphaSymbol::new(v.enclosure(0));
                Scalar::affine(ExactScalar::zero(), ExactScalar::one(), sym)
            }
        };
        Ok(NormalizedTorus {
            a,
            alpha_spec,
            alpha,
            enclosure_depth: depth,
        })
    }

    /// Horizontal modulus `a`; also the exact area of the torus.
    pub fn modulus(&self) -> &ExactScalar {
        &self.a
    }

    /// Area of the torus: the determinant of the lattice basis, which is
    /// exactly `a`.
    pub fn area(&self) -> &ExactScalar {
        &self.a
    }

    /// The vertical lattice twist `alpha`, normalized into `(0,1)`.
    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn alpha_spec(&self) -> &RealSpec {
        &self.alpha_spec
    }

    pub fn enclosure_depth(&self) -> usize {
        self.enclosure_depth
    }

    pub(crate) fn a_scalar(&self) -> Scalar {
        Scalar::Exact(self.a.clone())
    }
}

/// Projection of lattice coordinates to the fundamental square, i.e. both
/// coordinates reduced mod 1.
pub fn cover_project(point: (Scalar, Scalar)) -> Result<(Scalar, Scalar)> {
    Ok((point.0.fract()?, point.1.fract()?))
}

/// The rotation orbit `{k alpha mod 1 : k = 0..n}`, computed incrementally
/// and exactly. These are the heights at which a long horizontal slit meets
/// the vertical circle.
pub fn rotation_orbit(torus: &NormalizedTorus, n: usize) -> Result<Vec<Scalar>> {
    let mut out = Vec::with_capacity(n + 1);
    let one = Scalar::one();
    let mut x = Scalar::zero();
    out.push(x.clone());
    for _ in 0..n {
        let mut next = &x + torus.alpha();
        if next.try_cmp(&one)? != std::cmp::Ordering::Less {
            next = &next - &one;
        }
        out.push(next.clone());
        x = next;
    }
    Ok(out)
}

/// Horizontal slit of length `n * a` with its left endpoint at the origin.
///
/// The slit is embedded for any irrational `alpha`: a self-overlap would
/// force a horizontal lattice vector, i.e. a rational relation
/// `m alpha + k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalSlit {
    n: ExactScalar,
}

impl HorizontalSlit {
    pub fn new(n: ExactScalar) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::InvalidInput("slit length ratio must be positive"));
        }
        Ok(HorizontalSlit { n })
    }

    pub fn unit() -> Self {
        HorizontalSlit {
            n: ExactScalar::one(),
        }
    }

    /// Length ratio `N` (the slit has Euclidean length `N * a`).
    pub fn ratio(&self) -> &ExactScalar {
        &self.n
    }

    pub fn length(&self, torus: &NormalizedTorus) -> ExactScalar {
        &self.n * torus.modulus()
    }

    /// Number of unit-`a` pieces the slit occupies: `ceil(N)`.
    pub fn piece_count(&self) -> Result<u64> {
        let floor = self.n.floor_int();
        let ceil = if self.n.fract().is_zero() {
            floor
        } else {
            floor + BigInt::one()
        };
        let c = ceil
            .to_u64()
            .ok_or(Error::InvalidInput("slit too long to enumerate"))?;
        if c > ENUMERATION_LIMIT {
            return Err(Error::InvalidInput("slit too long to enumerate"));
        }
        Ok(c)
    }
}

/// Index of a lift corner of the fundamental parallelogram:
/// `0: (0,0)`, `1: (0,1)`, `2: (a, alpha)`, `3: (a, alpha+1)`.
pub type AnchorIndex = u8;

/// A straight slit given by an anchor corner and the vector from that corner
/// to a lift of the second marked point. The anchor is stored explicitly so
/// that rendering and checkerboard code agree on the exact lift.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortSlit {
    pub dx: Scalar,
    pub dy: Scalar,
    pub anchor: AnchorIndex,
}

impl ShortSlit {
    pub fn length_sq(&self) -> Scalar {
        &(&self.dx * &self.dx) + &(&self.dy * &self.dy)
    }

    /// True only for the degenerate horizontal representative returned by
    /// [`reduce_slit`] on an already-short input.
    pub fn is_horizontal(&self) -> bool {
        self.dy.as_exact().map(ExactScalar::is_zero).unwrap_or(false)
    }

    /// Plane coordinates of the anchor corner.
    pub fn anchor_point(&self, torus: &NormalizedTorus) -> (Scalar, Scalar) {
        corner_point(torus, self.anchor)
    }

    /// Plane coordinates of the far endpoint (the lift of the second marked
    /// point).
    pub fn far_point(&self, torus: &NormalizedTorus) -> (Scalar, Scalar) {
        let (cx, cy) = self.anchor_point(torus);
        (&cx + &self.dx, &cy + &self.dy)
    }
}

pub(crate) fn corner_point(torus: &NormalizedTorus, anchor: AnchorIndex) -> (Scalar, Scalar) {
    let a = torus.a_scalar();
    let alpha = torus.alpha().clone();
    match anchor {
        0 => (Scalar::zero(), Scalar::zero()),
        1 => (Scalar::zero(), Scalar::one()),
        2 => (a, alpha),
        3 => (a, &alpha + &Scalar::one()),
        _ => panic!("anchor index out of range"),
    }
}

/// Homology generator to intersect against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// The vertical circle; lifts are the lines `x = n a`.
    Vertical,
    /// The diagonal circle through the lattice direction `(a, alpha)`;
    /// lifts are the lines `y = (alpha/a) x - m`.
    Diagonal,
}

/// A segment to intersect: either the long horizontal slit or a straight
/// short slit with endpoints at the marked points.
#[derive(Clone, Copy, Debug)]
pub enum SegmentRef<'a> {
    Slit(&'a HorizontalSlit),
    Short(&'a ShortSlit),
}

/// Number of crossings of the segment with the generator's lift family,
/// counted by explicit enumeration under the perturbed-representative
/// convention described in the module docs.
pub fn intersection_count(
    torus: &NormalizedTorus,
    seg: SegmentRef<'_>,
    gen: Generator,
) -> Result<u64> {
    match (seg, gen) {
        (SegmentRef::Slit(slit), Generator::Vertical) => {
            // integers n with n*a in [0, N*a), i.e. n < N
            let mut count = 0u64;
            let mut n = BigInt::zero();
            loop {
                let nn = ExactScalar::from_bigint(n.clone());
                if nn.cmp_exact(slit.ratio()) != std::cmp::Ordering::Less {
                    break;
                }
                count += 1;
                if count > ENUMERATION_LIMIT {
                    return Err(Error::InvalidInput("slit too long to enumerate"));
                }
                n += 1;
            }
            Ok(count)
        }
        (SegmentRef::Slit(slit), Generator::Diagonal) => {
            // phi spans [-N alpha, 0]; integers k in [-N alpha, 0) are
            // k = -m for m = 1 .. floor(N alpha); m = N alpha exactly would
            // put the right endpoint on a lift, outside the convention.
            let n_alpha = &Scalar::Exact(slit.ratio().clone()) * torus.alpha();
            let mut count = 0u64;
            let mut m = BigInt::one();
            loop {
                match Scalar::from_bigint(m.clone()).try_cmp(&n_alpha)? {
                    std::cmp::Ordering::Less => count += 1,
                    std::cmp::Ordering::Equal => return Err(Error::DegenerateSegment),
                    std::cmp::Ordering::Greater => break,
                }
                if count > ENUMERATION_LIMIT {
                    return Err(Error::InvalidInput("slit too long to enumerate"));
                }
                m += 1;
            }
            Ok(count)
        }
        (SegmentRef::Short(ss), Generator::Vertical) => {
            let (p0, p1) = (ss.anchor_point(torus), ss.far_point(torus));
            let (xmin, xmax) = minmax(&p0.0, &p1.0)?;
            // candidates live in the strip [0, a]; n ranges over {0, 1}
            let mut count = 0u64;
            for n in 0..=1i64 {
                let na = &Scalar::from_int(n) * &torus.a_scalar();
                let ge_min = na.try_cmp(&xmin)? != std::cmp::Ordering::Less;
                let lt_max = na.try_cmp(&xmax)? == std::cmp::Ordering::Less;
                if ge_min && lt_max {
                    count += 1;
                }
            }
            Ok(count)
        }
        (SegmentRef::Short(ss), Generator::Diagonal) => {
            let (p0, p1) = (ss.anchor_point(torus), ss.far_point(torus));
            let ratio = torus.alpha().try_div(&torus.a_scalar())?;
            let phi0 = &p0.1 - &(&ratio * &p0.0);
            let phi1 = &p1.1 - &(&ratio * &p1.0);
            let (pmin, pmax) = minmax(&phi0, &phi1)?;
            if pmin == pmax {
                // parallel to the diagonal family
                if pmin.fract()?.is_zero() {
                    return Err(Error::DegenerateSegment);
                }
                return Ok(0);
            }
            let lo = pmin.floor()?;
            let hi = pmax.floor()? + BigInt::one();
            let mut count = 0u64;
            let mut k = lo;
            while k <= hi {
                let ks = Scalar::from_bigint(k.clone());
                let ge_min = ks.try_cmp(&pmin)? != std::cmp::Ordering::Less;
                let lt_max = ks.try_cmp(&pmax)? == std::cmp::Ordering::Less;
                if ge_min && lt_max {
                    count += 1;
                }
                k += 1;
            }
            Ok(count)
        }
    }
}

/// Crossing parity (0 or 1) against the generator.
pub fn intersection_parity(
    torus: &NormalizedTorus,
    seg: SegmentRef<'_>,
    gen: Generator,
) -> Result<u8> {
    Ok((intersection_count(torus, seg, gen)? % 2) as u8)
}

fn minmax(x: &Scalar, y: &Scalar) -> Result<(Scalar, Scalar)> {
    match x.try_cmp(y) {
        Ok(std::cmp::Ordering::Greater) => Ok((y.clone(), x.clone())),
        Ok(_) => Ok((x.clone(), y.clone())),
        Err(e) => Err(e),
    }
}

/// The four corner-anchored candidate segments joining the lift of the
/// slit's right endpoint to the corners of its fundamental parallelogram.
///
/// The lift is `(x a, x alpha + y)` with `x = {N}` (or `x = 1` when `N` is
/// an integer, which places the lift on the right edge) and `y = {-N alpha}`.
pub fn corner_candidates(
    torus: &NormalizedTorus,
    slit: &HorizontalSlit,
) -> Result<[ShortSlit; 4]> {
    let xfrac = slit.ratio().fract();
    let x = if xfrac.is_zero() {
        ExactScalar::one()
    } else {
        xfrac
    };
    let n_alpha = &Scalar::Exact(slit.ratio().clone()) * torus.alpha();
    let y = (-&n_alpha).fract()?;
    if y.is_zero() {
        // N alpha integral: the right endpoint is a lattice point
        return Err(Error::DegenerateSegment);
    }
    let lift_x = &Scalar::Exact(x.clone()) * &torus.a_scalar();
    let lift_y = &(&Scalar::Exact(x) * torus.alpha()) + &y;
    let mut out = Vec::with_capacity(4);
    for anchor in 0..4u8 {
        let (cx, cy) = corner_point(torus, anchor);
        out.push(ShortSlit {
            dx: &lift_x - &cx,
            dy: &lift_y - &cy,
            anchor,
        });
    }
    Ok(out.try_into().unwrap())
}

/// Reduces a horizontal slit to the unique corner-anchored candidate whose
/// crossing parities against both generators match the slit's.
///
/// An input that is already no longer than every candidate is returned
/// unchanged, re-expressed as a horizontal [`ShortSlit`] anchored at the
/// origin.
pub fn reduce_slit(torus: &NormalizedTorus, slit: &HorizontalSlit) -> Result<ShortSlit> {
    let candidates = corner_candidates(torus, slit)?;

    if slit.ratio().cmp_exact(&ExactScalar::one()) != std::cmp::Ordering::Greater {
        let len = slit.length(torus);
        let len_sq = Scalar::Exact(&len * &len);
        let mut shortest = true;
        for c in &candidates {
            if len_sq.try_cmp(&c.length_sq())? == std::cmp::Ordering::Greater {
                shortest = false;
                break;
            }
        }
        if shortest {
            return Ok(ShortSlit {
                dx: Scalar::Exact(len),
                dy: Scalar::zero(),
                anchor: 0,
            });
        }
    }

    let gp = intersection_parity(torus, SegmentRef::Slit(slit), Generator::Vertical)?;
    let dp = intersection_parity(torus, SegmentRef::Slit(slit), Generator::Diagonal)?;
    let mut winner: Option<ShortSlit> = None;
    for c in candidates {
        let cg = intersection_parity(torus, SegmentRef::Short(&c), Generator::Vertical)?;
        let cd = intersection_parity(torus, SegmentRef::Short(&c), Generator::Diagonal)?;
        if (cg, cd) == (gp, dp) {
            if winner.is_some() {
                return Err(Error::MultipleCandidates);
            }
            winner = Some(c);
        }
    }
    winner.ok_or(Error::NoCandidate)
}
