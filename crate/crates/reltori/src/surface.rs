//! Surfaces built from two identical tori glued along a slit, in period
//! coordinates: the tuple `(gamma1, delta1, gamma2, delta2, J)` of five plane
//! vectors, together with the linear action, the real Rel flow, tremors,
//! canonicalization after Rel, a chart-level pseudo-distance, and the
//! tremor-holonomy separation functional.
//!
//! In this normalized presentation a surface is a torus, a horizontal slit of
//! length `N a` starting at the origin, and a pair of horizontal shears
//! `(a1, a2)` applied to the two copies. Its period tuple is
//!
//! ```text
//! gamma_i = u_{a_i} (0, 1),   delta_i = u_{a_i} (a, alpha),   J = (N a, 0),
//! ```
//!
//! where `u_s` is the horizontal shear by `s`. The real Rel flow moves only
//! the relative class: `J <- J + (t, 0)`, i.e. it lengthens the slit.

use std::sync::Arc;

use crate::checkerboard::Checkerboard;
use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Scalar};
use crate::torus::{reduce_slit, HorizontalSlit, NormalizedTorus, ShortSlit};

/// A plane vector with scalar coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vec2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(Scalar::zero(), Scalar::zero())
    }

    pub fn add(&self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }

    pub fn sub(&self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, s: &Scalar) -> Vec2 {
        Vec2::new(s * &self.x, s * &self.y)
    }

    /// Cross product `self.x * rhs.y - self.y * rhs.x`.
    pub fn cross(&self, rhs: &Vec2) -> Scalar {
        &(&self.x * &rhs.y) - &(&self.y * &rhs.x)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// A 2x2 matrix with exact entries and determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    entries: [[ExactScalar; 2]; 2],
}

impl Mat2 {
    /// Validates `det = 1` exactly.
    pub fn unimodular(entries: [[ExactScalar; 2]; 2]) -> Result<Self> {
        let det = &(&entries[0][0] * &entries[1][1]) - &(&entries[0][1] * &entries[1][0]);
        if det != ExactScalar::one() {
            return Err(Error::NonUnimodular);
        }
        Ok(Mat2 { entries })
    }

    pub fn identity() -> Self {
        Mat2 {
            entries: [
                [ExactScalar::one(), ExactScalar::zero()],
                [ExactScalar::zero(), ExactScalar::one()],
            ],
        }
    }

    /// Horizontal shear `u_s = [[1, s], [0, 1]]`.
    pub fn shear(s: &ExactScalar) -> Self {
        Mat2 {
            entries: [
                [ExactScalar::one(), s.clone()],
                [ExactScalar::zero(), ExactScalar::one()],
            ],
        }
    }

    /// Diagonal element `[[l, 0], [0, 1/l]]` of the geodesic flow; `l != 0`.
    pub fn diagonal(l: &ExactScalar) -> Result<Self> {
        if l.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Mat2 {
            entries: [
                [l.clone(), ExactScalar::zero()],
                [ExactScalar::zero(), l.recip()],
            ],
        })
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let e = &self.entries;
        let sx = |m: &ExactScalar| Scalar::Exact(m.clone());
        Vec2::new(
            &(&sx(&e[0][0]) * &v.x) + &(&sx(&e[0][1]) * &v.y),
            &(&sx(&e[1][0]) * &v.x) + &(&sx(&e[1][1]) * &v.y),
        )
    }
}

/// Period coordinates of a slit double torus: two oriented lattice bases and
/// the slit holonomy vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodTuple {
    pub gamma1: Vec2,
    pub delta1: Vec2,
    pub gamma2: Vec2,
    pub delta2: Vec2,
    pub slit: Vec2,
}

impl PeriodTuple {
    /// Checks the chart invariants: both bases non-degenerate with the same
    /// orientation and equal torus areas (shears preserve them), and a
    /// non-zero slit vector.
    pub fn validate(&self) -> Result<()> {
        let d1 = self.gamma1.cross(&self.delta1);
        let d2 = self.gamma2.cross(&self.delta2);
        let s1 = d1.try_sign()?;
        let s2 = d2.try_sign()?;
        if s1 == 0 || s2 == 0 {
            return Err(Error::InvalidInput("degenerate lattice basis"));
        }
        if s1 != s2 {
            return Err(Error::InvalidInput("bases with opposite orientations"));
        }
        let diff = &d1 - &d2;
        match diff.try_sign() {
            Ok(0) => {}
            Ok(_) => return Err(Error::InvalidInput("copies have different areas")),
            // enclosures that overlap cannot refute equality
            Err(_) => {}
        }
        if self.slit.is_zero() {
            return Err(Error::InvalidInput("zero slit vector"));
        }
        Ok(())
    }

    /// Real Rel at the tuple level: adds `(t, 0)` to the slit holonomy and
    /// leaves the absolute periods alone.
    pub fn rel(&self, t: &ExactScalar) -> PeriodTuple {
        let mut out = self.clone();
        out.slit = Vec2::new(&out.slit.x + &Scalar::Exact(t.clone()), out.slit.y);
        out
    }

    /// Linear action on every component.
    pub fn apply(&self, g: &Mat2) -> PeriodTuple {
        PeriodTuple {
            gamma1: g.apply(&self.gamma1),
            delta1: g.apply(&self.delta1),
            gamma2: g.apply(&self.gamma2),
            delta2: g.apply(&self.delta2),
            slit: g.apply(&self.slit),
        }
    }

    /// The ten scalar coordinates in a fixed order.
    pub fn coords(&self) -> [&Scalar; 10] {
        [
            &self.gamma1.x,
            &self.gamma1.y,
            &self.delta1.x,
            &self.delta1.y,
            &self.gamma2.x,
            &self.gamma2.y,
            &self.delta2.x,
            &self.delta2.y,
            &self.slit.x,
            &self.slit.y,
        ]
    }

    fn copy_swapped(&self) -> PeriodTuple {
        PeriodTuple {
            gamma1: self.gamma2.clone(),
            delta1: self.delta2.clone(),
            gamma2: self.gamma1.clone(),
            delta2: self.delta1.clone(),
            slit: self.slit.clone(),
        }
    }
}

/// Pair of horizontal shears applied to the two torus copies. Equal shears
/// reduce to the plain horocycle action.
#[derive(Clone, Debug, PartialEq)]
pub struct TremorParam {
    pub shear1: ExactScalar,
    pub shear2: ExactScalar,
}

impl TremorParam {
    pub fn new(shear1: ExactScalar, shear2: ExactScalar) -> Self {
        TremorParam { shear1, shear2 }
    }

    pub fn none() -> Self {
        TremorParam::new(ExactScalar::zero(), ExactScalar::zero())
    }

    pub fn is_horocycle(&self) -> bool {
        self.shear1 == self.shear2
    }

    /// `|a1 - a2|`, the transverse-cocycle difference the separation
    /// functional scales with.
    pub fn shear_gap(&self) -> ExactScalar {
        (&self.shear1 - &self.shear2).abs()
    }
}

/// A slit double torus: a normalized torus, a horizontal slit, and a tremor
/// given by independent horizontal shears of the two copies.
#[derive(Clone, Debug)]
pub struct ELocusSurface {
    torus: Arc<NormalizedTorus>,
    slit: HorizontalSlit,
    tremor: TremorParam,
}

impl ELocusSurface {
    pub fn new(torus: NormalizedTorus, slit: HorizontalSlit, tremor: TremorParam) -> Self {
        ELocusSurface {
            torus: Arc::new(torus),
            slit,
            tremor,
        }
    }

    /// Untremored surface with slit length `a` (the reference configuration).
    pub fn base(torus: NormalizedTorus) -> Self {
        Self::new(torus, HorizontalSlit::unit(), TremorParam::none())
    }

    pub fn torus(&self) -> &NormalizedTorus {
        &self.torus
    }

    pub fn slit(&self) -> &HorizontalSlit {
        &self.slit
    }

    pub fn tremor_param(&self) -> &TremorParam {
        &self.tremor
    }

    /// Period tuple of the surface:
    /// `gamma_i = (a_i, 1)`, `delta_i = (a + a_i alpha, alpha)`,
    /// `J = (N a, 0)`.
    pub fn period_tuple(&self) -> PeriodTuple {
        let alpha = self.torus.alpha();
        let a = Scalar::Exact(self.torus.modulus().clone());
        let gamma = |s: &ExactScalar| Vec2::new(Scalar::Exact(s.clone()), Scalar::one());
        let delta = |s: &ExactScalar| {
            Vec2::new(&a + &(&Scalar::Exact(s.clone()) * alpha), alpha.clone())
        };
        PeriodTuple {
            gamma1: gamma(&self.tremor.shear1),
            delta1: delta(&self.tremor.shear1),
            gamma2: gamma(&self.tremor.shear2),
            delta2: delta(&self.tremor.shear2),
            slit: Vec2::new(
                Scalar::Exact(self.slit.length(&self.torus)),
                Scalar::zero(),
            ),
        }
    }

    /// Real Rel flow: lengthens the slit by `t` (torus and tremor are
    /// untouched). Fails with [`Error::SingularityCollision`] when
    /// `t <= -N a`, where the two singularities would collide.
    pub fn rel(&self, t: &ExactScalar) -> Result<Self> {
        let new_n = &self.slit.ratio().clone() + &(t / self.torus.modulus());
        if !new_n.is_positive() {
            return Err(Error::SingularityCollision);
        }
        Ok(ELocusSurface {
            torus: self.torus.clone(),
            slit: HorizontalSlit::new(new_n)?,
            tremor: self.tremor.clone(),
        })
    }

    /// The open interval of Rel times defined at this surface.
    ///
    /// For an irrational twist the only horizontal saddle connection between
    /// the two singularities runs along the slit line (a horizontal lattice
    /// vector would force a rational relation `m alpha + k = 0`), so the only
    /// obstruction is slit collapse: the interval is `(-N a, +infinity)`.
    pub fn rel_defined_interval(&self) -> RelInterval {
        RelInterval {
            lower: -&self.slit.length(&self.torus),
        }
    }

    /// Adds `(c1, c2)` to the shear pair; tremors compose additively.
    pub fn tremor(&self, c1: &ExactScalar, c2: &ExactScalar) -> Self {
        ELocusSurface {
            torus: self.torus.clone(),
            slit: self.slit.clone(),
            tremor: TremorParam::new(&self.tremor.shear1 + c1, &self.tremor.shear2 + c2),
        }
    }

    /// Signed mass of the carried tremor: `(a1 + a2) * area(T)`.
    pub fn signed_mass(&self) -> ExactScalar {
        &(&self.tremor.shear1 + &self.tremor.shear2) * self.torus.area()
    }

    /// Total variation of the carried tremor: `(|a1| + |a2|) * area(T)`.
    pub fn total_variation(&self) -> ExactScalar {
        &(&self.tremor.shear1.abs() + &self.tremor.shear2.abs()) * self.torus.area()
    }

    /// Canonical period tuple after re-slitting: reduces the slit to its
    /// short representative, computes the exchange proportion `theta` of the
    /// `(I, I')` checkerboard on the base torus, and re-marks the absolute
    /// periods by the exact convex combination
    ///
    /// ```text
    /// gamma1 <- (1 - theta) u_{a1} gamma + theta u_{a2} gamma,   ...
    /// ```
    ///
    /// with the roles of the copies swapped in the second pair, and the slit
    /// component replaced by the short representative.
    pub fn canonical_tuple(&self) -> Result<PeriodTuple> {
        let short = reduce_slit(&self.torus, &self.slit)?;
        if short.is_horizontal() {
            // already short: nothing is exchanged
            return Ok(self.period_tuple());
        }
        let cb = Checkerboard::build_summary(&self.torus, &self.slit, &short)?;
        let theta = cb.exchange_proportion();
        Ok(self.mixed_tuple(&theta, &short))
    }

    /// Assembles the canonical tuple from a known exchange proportion and
    /// short representative (shared by the closed-form trajectory path).
    pub fn mixed_tuple(&self, theta: &Scalar, short: &ShortSlit) -> PeriodTuple {
        let alpha = self.torus.alpha();
        let a = Scalar::Exact(self.torus.modulus().clone());
        let one = Scalar::one();
        let s1 = Scalar::Exact(self.tremor.shear1.clone());
        let s2 = Scalar::Exact(self.tremor.shear2.clone());
        // mixed shears (1-theta) a_i + theta a_j
        let m1 = &(&(&one - theta) * &s1) + &(theta * &s2);
        let m2 = &(&(&one - theta) * &s2) + &(theta * &s1);
        let gamma = |s: &Scalar| Vec2::new(s.clone(), Scalar::one());
        let delta = |s: &Scalar| Vec2::new(&a + &(s * alpha), alpha.clone());
        PeriodTuple {
            gamma1: gamma(&m1),
            delta1: delta(&m1),
            gamma2: gamma(&m2),
            delta2: delta(&m2),
            slit: Vec2::new(short.dx.clone(), short.dy.clone()),
        }
    }

    /// Linear action on the surface, at the tuple level: the image of a
    /// sheared slit torus under a general unimodular matrix leaves this
    /// normalized presentation, so the result is its period tuple.
    pub fn apply_gl(&self, g: &Mat2) -> PeriodTuple {
        self.period_tuple().apply(g)
    }

    /// Tremor-holonomy gap `Delta = (B2 / area(T)) |a1 - a2|`: how far the
    /// vertical-curve holonomy of the re-marked copy sits from the original
    /// tremor coordinate. This is the separation functional that certifies
    /// non-recurrence.
    pub fn tremor_holonomy_gap(&self, cb: &Checkerboard) -> Scalar {
        let theta = cb.exchange_proportion();
        &theta * &Scalar::Exact(self.tremor.shear_gap())
    }
}

/// Open interval `(lower, +infinity)` of defined Rel times.
#[derive(Clone, Debug, PartialEq)]
pub struct RelInterval {
    pub lower: ExactScalar,
}

/// Chart-level proxy distance between period tuples: the minimum over the
/// finite symmetry set (copy swap, slit sign flip, and the four anchor
/// choices, i.e. slit translations by corner vectors) of the L-infinity
/// difference of the ten coordinates.
///
/// This is an upper-bound witness for recurrence only; separation is always
/// certified through the tremor-holonomy gap, never through this proxy.
pub fn stratum_pseudodistance(t1: &PeriodTuple, t2: &PeriodTuple) -> Scalar {
    let gamma_avg = t2
        .gamma1
        .add(&t2.gamma2)
        .scale(&Scalar::from_ratio(crate::exact::one_half()));
    let delta_avg = t2
        .delta1
        .add(&t2.delta2)
        .scale(&Scalar::from_ratio(crate::exact::one_half()));

    let mut best: Option<Scalar> = None;
    for swapped in [false, true] {
        let base = if swapped { t2.copy_swapped() } else { t2.clone() };
        for flip in [false, true] {
            for e1 in 0..2 {
                for e2 in 0..2 {
                    let mut slit = if flip { base.slit.neg() } else { base.slit.clone() };
                    if e1 == 1 {
                        slit = slit.sub(&gamma_avg);
                    }
                    if e2 == 1 {
                        slit = slit.sub(&delta_avg);
                    }
                    let candidate = PeriodTuple {
                        slit,
                        ..base.clone()
                    };
                    let d = linf_distance(t1, &candidate);
                    best = Some(match best {
                        None => d,
                        Some(b) => b.inf(&d),
                    });
                }
            }
        }
    }
    best.expect("nonempty symmetry set")
}

fn linf_distance(t1: &PeriodTuple, t2: &PeriodTuple) -> Scalar {
    let mut acc = Scalar::zero();
    for (c1, c2) in t1.coords().iter().zip(t2.coords().iter()) {
        let d = (&**c1 - &**c2).abs();
        acc = acc.sup(&d);
    }
    acc
}
