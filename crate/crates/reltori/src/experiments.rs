//! Recurrence experiments along the real Rel flow.
//!
//! The driver samples the flow at the times `t_j = 2 q_j a` given by the
//! convergent denominators of the torus twist. At each step it re-slits the
//! surface, computes the checkerboard exchange, canonicalizes the period
//! tuple, and records how far the orbit point sits from the start — both in
//! the chart proxy distance and in the tremor-holonomy gap that certifies
//! separation. The verdict from those records is then compared against the
//! continued-fraction classification of the twist.
//!
//! Slits short enough for the exact arrangement run through the generic
//! pipeline. Past the configured limit (denominators grow exponentially for
//! well-approximable streams, so the arrangement would have astronomically
//! many cells) the driver switches to the proven trapezoid form of the
//! odd-convergent checkerboard, after verifying its validity condition
//! `2 ||q alpha|| + alpha < 1` on the enclosure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::checkerboard::Checkerboard;
use crate::error::{Error, Result};
use crate::exact::{
    badly_approximable_to_depth, one_half, ApproxVerdict, ExactScalar, RealSpec, Scalar,
};
use crate::surface::{stratum_pseudodistance, ELocusSurface, PeriodTuple};
use crate::torus::{reduce_slit, NormalizedTorus, ShortSlit};

/// One sampled point of the Rel orbit at a convergent time.
#[derive(Clone, Debug)]
pub struct RecurrenceRecord {
    /// Convergent index `j >= 1`.
    pub j: usize,
    /// Denominator `q_j`.
    pub q: BigInt,
    /// Flow time `t_j = 2 q_j a`; strictly increasing in `j`.
    pub t: Scalar,
    /// `||q_j alpha||`, exact or a validated enclosure.
    pub norm: Scalar,
    /// `s_j = (q_j + 1/2) ||q_j alpha|| a`.
    pub s: Scalar,
    /// Exchange proportion of the re-slitting checkerboard.
    pub theta: Scalar,
    /// Area imbalance `|B1 - B2| / a` of that checkerboard.
    pub imbalance: Scalar,
    /// Chart pseudo-distance between the canonicalized orbit point and the
    /// starting tuple.
    pub distance: Scalar,
    /// Tremor-holonomy gap `theta * |a1 - a2|`.
    pub gap: Scalar,
}

/// Tuning knobs for the trajectory driver.
#[derive(Clone, Debug)]
pub struct TrajectoryOptions {
    /// Largest `ceil(N)` still built through the exact arrangement when the
    /// twist is an exact quadratic.
    pub generic_limit: u64,
    /// Same limit for stream twists, whose enclosure arithmetic is far more
    /// expensive per cell.
    pub stream_generic_limit: u64,
    /// Extra enclosure depth (beyond the deepest arrangement-built step)
    /// for stream twists.
    pub enclosure_pad: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions {
            generic_limit: 1 << 16,
            stream_generic_limit: 1 << 12,
            enclosure_pad: 4,
        }
    }
}

/// Samples the Rel orbit of `surface` at `t_j = 2 q_j a` for `j = 1..=depth`.
///
/// The surface must carry the reference slit of length `a` (ratio 1); the
/// tremor may be arbitrary. Records for distinct `j` are computed in
/// parallel and returned ordered by `j`.
pub fn recurrence_trajectory(
    surface: &ELocusSurface,
    depth: usize,
) -> Result<Vec<RecurrenceRecord>> {
    recurrence_trajectory_with(surface, depth, &TrajectoryOptions::default())
}

/// [`recurrence_trajectory`] with explicit options.
pub fn recurrence_trajectory_with(
    surface: &ELocusSurface,
    depth: usize,
    opts: &TrajectoryOptions,
) -> Result<Vec<RecurrenceRecord>> {
    if depth == 0 {
        return Err(Error::DepthZero);
    }
    if surface.slit().ratio() != &ExactScalar::one() {
        return Err(Error::InvalidInput(
            "trajectory starts from the reference slit of length a",
        ));
    }
    // Streams need enclosures deep enough for the deepest step that still
    // runs through the exact arrangement; the closed-form steps only need
    // enough precision for their regime check. Oversizing slows every
    // comparison down, so size from the convergents.
    let spec = surface.torus().alpha_spec().clone();
    let convergents = spec.convergents(depth)?;
    let surface = if spec.is_stream() {
        let limit = BigInt::from(opts.stream_generic_limit);
        let deepest_generic = convergents
            .iter()
            .skip(1)
            .filter(|c| BigInt::from(2) * &c.q + BigInt::one() <= limit)
            .map(|c| c.index)
            .max()
            .unwrap_or(1);
        let want = (deepest_generic + opts.enclosure_pad).max(8);
        let torus = surface.torus();
        if torus.enclosure_depth() < want {
            let rebuilt = NormalizedTorus::with_enclosure_depth(
                torus.modulus().clone(),
                torus.alpha_spec().clone(),
                want,
            )?;
            ELocusSurface::new(rebuilt, surface.slit().clone(), surface.tremor_param().clone())
        } else {
            surface.clone()
        }
    } else {
        surface.clone()
    };
    let base_tuple = surface.period_tuple();

    let records: Result<Vec<RecurrenceRecord>> = (1..=depth)
        .into_par_iter()
        .map(|j| step_record(&surface, &spec, &convergents[j].q, j, &base_tuple, opts))
        .collect();
    let records = records?;

    debug_assert!(records.windows(2).all(|w| w[0].q < w[1].q));
    Ok(records)
}

fn step_record(
    surface: &ELocusSurface,
    spec: &RealSpec,
    q: &BigInt,
    j: usize,
    base_tuple: &PeriodTuple,
    opts: &TrajectoryOptions,
) -> Result<RecurrenceRecord> {
    let a = Scalar::Exact(surface.torus().modulus().clone());
    let norm = spec.norm_q_alpha(j)?;
    let q_scalar = Scalar::from_bigint(q.clone());
    let q_half = Scalar::from_ratio(BigRational::from_integer(q.clone()) + one_half());
    let t = &(&Scalar::from_int(2) * &q_scalar) * &a;
    let s = &(&q_half * &norm) * &a;
    let n_ratio = BigInt::from(2) * q + BigInt::one();

    let limit = if spec.is_stream() {
        opts.stream_generic_limit
    } else {
        opts.generic_limit
    };
    let generic = match u64::try_from(&n_ratio) {
        Ok(n) => n <= limit,
        Err(_) => false,
    };

    let (theta, imbalance, short) = if generic {
        let t_exact = t
            .as_exact()
            .expect("flow times at convergents are exact")
            .clone();
        let moved = surface.rel(&t_exact)?;
        let short = reduce_slit(moved.torus(), moved.slit())?;
        let cb = Checkerboard::build_summary(moved.torus(), moved.slit(), &short)?;
        (cb.exchange_proportion(), cb.imbalance(), short)
    } else {
        // trapezoid form; verify its validity condition on the enclosure
        let cond = &(&Scalar::from_int(2) * &norm) + surface.torus().alpha();
        if cond.try_cmp(&Scalar::one())? != std::cmp::Ordering::Less {
            return Err(Error::InvalidInput(
                "slit too long for the exact arrangement and outside the convergent regime",
            ));
        }
        let sign = if j % 2 == 1 { 1i64 } else { -1i64 };
        let dy = &Scalar::from_int(2 * sign) * &norm;
        let short = ShortSlit {
            dx: a.clone(),
            dy,
            anchor: 1,
        };
        let theta = &q_half * &norm;
        let one = Scalar::one();
        let len = &(&q_scalar * &Scalar::from_int(2)) + &one; // 2q + 1
        let imbalance = (&one - &(&len * &norm)).abs();
        (theta, imbalance, short)
    };

    let canonical = surface.mixed_tuple(&theta, &short);
    let distance = stratum_pseudodistance(&canonical, base_tuple);
    let gap = &theta * &Scalar::Exact(surface.tremor_param().shear_gap());

    Ok(RecurrenceRecord {
        j,
        q: q.clone(),
        t,
        norm,
        s,
        theta,
        imbalance,
        distance,
        gap,
    })
}

/// Depth-bounded empirical verdict about the Rel orbit.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum RecurrenceVerdict {
    /// Indices whose records come back within `eps_dist` (both in exchange
    /// proportion and chart distance): the orbit revisits its start along
    /// this subsequence.
    RecurrentEvidence { witnesses: Vec<usize> },
    /// Every record keeps a tremor-holonomy gap of at least `eps_gap`.
    SeparatedEvidence { min_gap: Scalar },
    /// Neither pattern at this depth.
    Inconclusive,
}

/// Classifies a trajectory. `eps_dist` bounds both the exchange proportion
/// and the chart distance of a recurrence witness; `eps_gap` is the
/// separation threshold for the gap functional.
pub fn classify_recurrence(
    records: &[RecurrenceRecord],
    eps_dist: &Scalar,
    eps_gap: &Scalar,
) -> Result<RecurrenceVerdict> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut witnesses = Vec::new();
    for r in records {
        if r.theta.try_lt(eps_dist)? && r.distance.try_lt(eps_dist)? {
            witnesses.push(r.j);
        }
    }
    if !witnesses.is_empty() {
        return Ok(RecurrenceVerdict::RecurrentEvidence { witnesses });
    }
    let mut min_gap = records[0].gap.clone();
    for r in &records[1..] {
        min_gap = min_gap.inf(&r.gap);
    }
    if !min_gap.try_lt(eps_gap)? {
        return Ok(RecurrenceVerdict::SeparatedEvidence { min_gap });
    }
    Ok(RecurrenceVerdict::Inconclusive)
}

/// Default chart tolerance for recurrence evidence.
pub fn default_eps_dist() -> Scalar {
    Scalar::from_ratio(BigRational::new(BigInt::one(), BigInt::from(100)))
}

/// Default separation threshold: one tenth of the shear gap.
pub fn default_eps_gap(tremor_gap: &ExactScalar) -> Scalar {
    &Scalar::from_ratio(BigRational::new(BigInt::one(), BigInt::from(10)))
        * &Scalar::Exact(tremor_gap.clone())
}

/// Outcome of comparing the continued-fraction classification with the
/// empirical Rel-orbit verdict.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub alpha: String,
    pub depth: usize,
    pub k_bound: u64,
    pub cf_verdict: ApproxVerdict,
    pub empirical: RecurrenceVerdict,
    pub agree: bool,
    pub records: Vec<RecurrenceRecord>,
}

/// Full-control configuration for [`theorem_check_with`].
#[derive(Clone, Debug)]
pub struct TheoremCheckConfig {
    pub depth: usize,
    pub k_bound: u64,
    pub modulus: ExactScalar,
    pub eps_dist: Scalar,
    /// Multiplied by `|a1 - a2|` to obtain the separation threshold.
    pub eps_gap_factor: Scalar,
    pub trajectory: TrajectoryOptions,
}

impl TheoremCheckConfig {
    pub fn new(depth: usize, k_bound: u64) -> Self {
        TheoremCheckConfig {
            depth,
            k_bound,
            modulus: ExactScalar::one(),
            eps_dist: default_eps_dist(),
            eps_gap_factor: Scalar::from_ratio(BigRational::new(
                BigInt::one(),
                BigInt::from(10),
            )),
            trajectory: TrajectoryOptions::default(),
        }
    }
}

/// Runs the dichotomy experiment for one twist: the continued-fraction
/// verdict (bounded quotients up to `k_bound`?) against the empirical orbit
/// verdict, on the reference surface with the given tremor shears.
///
/// Requires `a1 != a2`: equal shears reduce the deformation to the plain
/// horocycle, for which the orbit question is a different (and out of scope)
/// problem.
pub fn theorem_check(
    alpha: &RealSpec,
    tremor: (&ExactScalar, &ExactScalar),
    depth: usize,
    k_bound: u64,
) -> Result<TheoremReport> {
    theorem_check_with(alpha, tremor, &TheoremCheckConfig::new(depth, k_bound))
}

/// [`theorem_check`] with explicit tolerances, modulus and limits.
pub fn theorem_check_with(
    alpha: &RealSpec,
    tremor: (&ExactScalar, &ExactScalar),
    config: &TheoremCheckConfig,
) -> Result<TheoremReport> {
    if tremor.0 == tremor.1 {
        return Err(Error::HypothesisViolated);
    }
    let torus = NormalizedTorus::new(config.modulus.clone(), alpha.clone())?;
    let surface = ELocusSurface::base(torus).tremor(tremor.0, tremor.1);
    let records = recurrence_trajectory_with(&surface, config.depth, &config.trajectory)?;

    let eps_gap = &config.eps_gap_factor * &Scalar::Exact(surface.tremor_param().shear_gap());
    let empirical = classify_recurrence(&records, &config.eps_dist, &eps_gap)?;
    let cf_verdict = badly_approximable_to_depth(alpha, config.depth, config.k_bound)?;
    let agree = matches!(
        (&cf_verdict, &empirical),
        (
            ApproxVerdict::BadlyApproxEvidence { .. },
            RecurrenceVerdict::SeparatedEvidence { .. }
        ) | (
            ApproxVerdict::WellApproxEvidence { .. },
            RecurrenceVerdict::RecurrentEvidence { .. }
        )
    );
    Ok(TheoremReport {
        alpha: alpha.to_string(),
        depth: config.depth,
        k_bound: config.k_bound,
        cf_verdict,
        empirical,
        agree,
        records,
    })
}

/// Tremor-holonomy gap of the surface after flowing for an arbitrary time
/// `t > 0`, through the generic pipeline; also returns `min(B1, B2)`.
pub fn gap_at(surface: &ELocusSurface, t: &ExactScalar) -> Result<(Scalar, Scalar)> {
    let moved = surface.rel(t)?;
    let short = reduce_slit(moved.torus(), moved.slit())?;
    let cb = Checkerboard::build_summary(moved.torus(), moved.slit(), &short)?;
    let gap = moved.tremor_holonomy_gap(&cb);
    let (b1, b2) = cb.color_areas();
    Ok((gap, b1.inf(b2)))
}

/// One sample of the off-subsequence sanity sweep.
#[derive(Clone, Debug)]
pub struct SweepSample {
    pub t: ExactScalar,
    pub gap: Scalar,
    pub min_region: Scalar,
}

/// Evaluates the gap functional at random intermediate times, `per_decade`
/// samples in each decade `[a 10^d, a 10^{d+1})`. The separation bound is a
/// statement over *all* times, so the convergent subsequence is
/// complemented by this seeded random sweep.
pub fn sanity_sweep(
    surface: &ELocusSurface,
    decades: usize,
    per_decade: usize,
    seed: u64,
) -> Result<Vec<SweepSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<BigRational> = Vec::new();
    for d in 0..decades {
        let scale = BigInt::from(10u32).pow(d as u32);
        for _ in 0..per_decade {
            // rational in [1, 10) with a 2^20 grid
            let grid = 1u64 << 20;
            let u = rng.gen_range(0..(9 * grid));
            let frac = BigRational::new(BigInt::from(u), BigInt::from(grid))
                + BigRational::one();
            times.push(frac * BigRational::from_integer(scale.clone()));
        }
    }
    let samples: Result<Vec<SweepSample>> = times
        .into_par_iter()
        .map(|ratio| {
            let t = &ExactScalar::from_ratio(ratio) * surface.torus().modulus();
            let (gap, min_region) = gap_at(surface, &t)?;
            Ok(SweepSample { t, gap, min_region })
        })
        .collect();
    let mut samples = samples?;
    samples.sort_by(|x, y| {
        x.t.to_f64()
            .partial_cmp(&y.t.to_f64())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(samples)
}

/// Significant digits used by the text emitters.
pub const CSV_DIGITS: usize = 40;

/// CSV rendering of trajectory records: decimal columns at 40 significant
/// digits followed by lossless exact forms.
pub fn records_csv(records: &[RecurrenceRecord]) -> String {
    let mut out = String::from(
        "j,q_j,t_j,norm,s_j,theta,imbalance,distance,gap,\
         t_exact,norm_exact,s_exact,theta_exact,imbalance_exact,distance_exact,gap_exact\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.j,
            r.q,
            r.t.to_decimal_string(CSV_DIGITS),
            r.norm.to_decimal_string(CSV_DIGITS),
            r.s.to_decimal_string(CSV_DIGITS),
            r.theta.to_decimal_string(CSV_DIGITS),
            r.imbalance.to_decimal_string(CSV_DIGITS),
            r.distance.to_decimal_string(CSV_DIGITS),
            r.gap.to_decimal_string(CSV_DIGITS),
            r.t.exact_form(),
            r.norm.exact_form(),
            r.s.exact_form(),
            r.theta.exact_form(),
            r.imbalance.exact_form(),
            r.distance.exact_form(),
            r.gap.exact_form(),
        ));
    }
    out
}

impl TheoremReport {
    /// Machine-readable report.
    pub fn to_json(&self) -> serde_json::Value {
        let cf = match &self.cf_verdict {
            ApproxVerdict::BadlyApproxEvidence { bound } => serde_json::json!({
                "kind": "badly-approximable-evidence",
                "quotient_bound": bound,
            }),
            ApproxVerdict::WellApproxEvidence { index, quotient } => serde_json::json!({
                "kind": "well-approximable-evidence",
                "index": index,
                "quotient": quotient.to_string(),
            }),
        };
        let empirical = match &self.empirical {
            RecurrenceVerdict::RecurrentEvidence { witnesses } => serde_json::json!({
                "kind": "recurrent-evidence",
                "witnesses": witnesses,
            }),
            RecurrenceVerdict::SeparatedEvidence { min_gap } => serde_json::json!({
                "kind": "separated-evidence",
                "min_gap": min_gap.to_decimal_string(CSV_DIGITS),
            }),
            RecurrenceVerdict::Inconclusive => serde_json::json!({ "kind": "inconclusive" }),
        };
        serde_json::json!({
            "alpha": self.alpha,
            "depth": self.depth,
            "k_bound": self.k_bound,
            "cf_verdict": cf,
            "empirical_verdict": empirical,
            "agree": self.agree,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface_for(name: &str, a1: i64, a2: i64) -> ELocusSurface {
        let torus = NormalizedTorus::unit(RealSpec::builtin(name).unwrap()).unwrap();
        ELocusSurface::base(torus)
            .tremor(&ExactScalar::from_int(a1), &ExactScalar::from_int(a2))
    }

    #[test]
    fn golden_trajectory_keeps_large_gaps() {
        let m = surface_for("golden", 1, 0);
        let records = recurrence_trajectory(&m, 10).unwrap();
        assert_eq!(records.len(), 10);
        let threshold = Scalar::from_ratio(BigRational::new(19.into(), 100.into()));
        for r in &records {
            assert!(
                !r.gap.try_lt(&threshold).unwrap(),
                "gap at j={} is {:.4}",
                r.j,
                r.gap.to_f64()
            );
        }
        // times are strictly increasing: t_j / a = 2 Fibonacci
        let ts: Vec<f64> = records.iter().map(|r| r.t.to_f64()).collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ts[0], 2.0); // q_1 = 1
    }

    #[test]
    fn golden_classified_separated() {
        let m = surface_for("golden", 1, 0);
        let records = recurrence_trajectory(&m, 10).unwrap();
        let eps_gap = default_eps_gap(&m.tremor_param().shear_gap());
        let verdict = classify_recurrence(&records, &default_eps_dist(), &eps_gap).unwrap();
        assert!(matches!(verdict, RecurrenceVerdict::SeparatedEvidence { .. }));
    }

    #[test]
    fn pow2_stream_recurs() {
        let m = surface_for("pow2", 1, 0);
        let records = recurrence_trajectory(&m, 12).unwrap();
        let small = records
            .iter()
            .find(|r| r.theta.to_f64() < 1e-3)
            .expect("exchange proportion shrinks along the subsequence");
        assert!(small.distance.to_f64() < 1e-2);
        let eps_gap = default_eps_gap(&m.tremor_param().shear_gap());
        let verdict = classify_recurrence(&records, &default_eps_dist(), &eps_gap).unwrap();
        assert!(matches!(verdict, RecurrenceVerdict::RecurrentEvidence { .. }));
    }

    #[test]
    fn theta_matches_s_over_a_in_the_convergent_regime() {
        // for golden the trapezoid regime holds at j = 1 and from j = 3 on
        let m = surface_for("golden", 1, 0);
        let records = recurrence_trajectory(&m, 8).unwrap();
        for r in &records {
            if r.j == 2 {
                continue;
            }
            assert_eq!(
                r.theta.as_exact().unwrap(),
                r.s.as_exact().unwrap(),
                "theta != s_j/a at j={}",
                r.j
            );
        }
    }

    #[test]
    fn theorem_check_agrees_on_golden_and_pow2() {
        let one = ExactScalar::one();
        let zero = ExactScalar::zero();
        let golden = RealSpec::builtin("golden").unwrap();
        let report = theorem_check(&golden, (&one, &zero), 10, 1).unwrap();
        assert!(report.agree);
        assert!(matches!(
            report.cf_verdict,
            ApproxVerdict::BadlyApproxEvidence { .. }
        ));

        let pow2 = RealSpec::builtin("pow2").unwrap();
        let report = theorem_check(&pow2, (&one, &zero), 12, 10).unwrap();
        assert!(report.agree);
        assert!(matches!(
            report.empirical,
            RecurrenceVerdict::RecurrentEvidence { .. }
        ));
    }

    #[test]
    fn equal_shears_rejected() {
        let one = ExactScalar::one();
        let golden = RealSpec::builtin("golden").unwrap();
        assert!(matches!(
            theorem_check(&golden, (&one, &one), 5, 1),
            Err(Error::HypothesisViolated)
        ));
    }

    #[test]
    fn empty_records_rejected() {
        let eps = default_eps_dist();
        assert!(matches!(
            classify_recurrence(&[], &eps, &eps),
            Err(Error::EmptyRecords)
        ));
    }

    #[test]
    fn trajectory_requires_reference_slit() {
        let m = surface_for("golden", 1, 0).rel(&ExactScalar::from_int(1)).unwrap();
        assert!(matches!(
            recurrence_trajectory(&m, 3),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sweep_gaps_stay_bounded_below_for_golden() {
        let m = surface_for("golden", 1, 0);
        let samples = sanity_sweep(&m, 2, 5, 99).unwrap();
        assert_eq!(samples.len(), 10);
        for s in &samples {
            // Case-bound floor: far weaker than the observed values, but
            // every sample must clear it
            assert!(s.min_region.to_f64() > 2.0e-3);
            assert!(s.gap.to_f64() > 0.0);
        }
    }

    #[test]
    fn csv_shape() {
        let m = surface_for("golden", 1, 0);
        let records = recurrence_trajectory(&m, 3).unwrap();
        let csv = records_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("j,q_j,t_j,norm"));
        assert_eq!(lines[1].split(',').count(), 16);
    }
}
