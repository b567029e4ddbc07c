//! The two-colored region decomposition ("checkerboard") cut out of the torus
//! by a long horizontal slit together with its short straight representative,
//! with exact areas.
//!
//! Geometry happens in strip coordinates `[0,a] x [0,1)` (see [`crate::torus`]):
//! the long slit contributes horizontal pieces at the rotation-orbit heights
//! `{-i alpha}`, the short slit contributes a transversal segment. Cutting the
//! strip at every event height yields bands; the short slit's chords split
//! each band into trapezoid panels. Crossing a piece of either slit flips the
//! color, crossing an artificial band cut does not, and the vertical edge
//! `x = 0 ~ x = a` glues bands with the lattice twist `-alpha`. A breadth
//! first search propagates the two colors from the basepoint panel (the one
//! just above the left endpoint of the long slit, color 1) and verifies the
//! coloring is proper on every boundary.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{one_half, ExactScalar, Scalar};
use crate::torus::{corner_point, HorizontalSlit, NormalizedTorus, ShortSlit};

/// Cell color. Color one is the color of the basepoint region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    One,
    Two,
}

/// One convex cell of the decomposition: a rectangle or trapezoid with two
/// horizontal sides.
#[derive(Clone, Debug)]
pub struct Piece {
    pub color: Color,
    /// Exact area in the flat metric.
    pub area: Scalar,
    /// Corner coordinates in strip coordinates, counter-clockwise from the
    /// bottom-left, for rendering.
    pub quad: [(f64, f64); 4],
    /// Index of the horizontal band the cell lives in.
    pub band: usize,
}

/// The checkerboard decomposition with its exact color areas.
#[derive(Clone, Debug)]
pub struct Checkerboard {
    pieces: Vec<Piece>,
    b1: Scalar,
    b2: Scalar,
    q_index: Option<usize>,
    area: ExactScalar,
    bands: usize,
}

impl Checkerboard {
    /// Builds the full decomposition, keeping cell geometry.
    pub fn build(
        torus: &NormalizedTorus,
        slit: &HorizontalSlit,
        short: &ShortSlit,
    ) -> Result<Self> {
        build_impl(torus, slit, short, true)
    }

    /// Builds the decomposition keeping only color areas (no cell list);
    /// use for long slits where the cell geometry is not needed.
    pub fn build_summary(
        torus: &NormalizedTorus,
        slit: &HorizontalSlit,
        short: &ShortSlit,
    ) -> Result<Self> {
        build_impl(torus, slit, short, false)
    }

    /// Closed-form checkerboard for a slit of length `(2q+1) a` at a
    /// convergent denominator `q`, valid when `2 ||q alpha|| + alpha < 1`:
    /// the two regions are trapezoids with base `(q + 1/2) a`, one of height
    /// `||q alpha||`, so the non-basepoint region has area
    /// `(q + 1/2) ||q alpha|| a` exactly. The caller checks the validity
    /// condition; this constructor only assembles the summary.
    pub fn from_odd_convergent(
        torus: &NormalizedTorus,
        q: &BigInt,
        norm_q_alpha: &Scalar,
        q_index: Option<usize>,
    ) -> Self {
        let a = Scalar::Exact(torus.modulus().clone());
        let q_half = Scalar::from_ratio(
            num_rational::BigRational::from_integer(q.clone()) + one_half(),
        );
        let b2 = &(&q_half * norm_q_alpha) * &a;
        let b1 = &a - &b2;
        Checkerboard {
            pieces: Vec::new(),
            b1,
            b2,
            q_index,
            area: torus.modulus().clone(),
            bands: 0,
        }
    }

    /// Exact areas of the two colored regions, `(B1, B2)`. `B1` is the area
    /// of the region containing the basepoint.
    pub fn color_areas(&self) -> (&Scalar, &Scalar) {
        (&self.b1, &self.b2)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Number of horizontal bands in the decomposition (0 for summaries
    /// assembled from the closed form).
    pub fn band_count(&self) -> usize {
        self.bands
    }

    /// The index `k` with `q_k <= N < q_{k+1}` when it could be computed.
    pub fn q_index(&self) -> Option<usize> {
        self.q_index
    }

    /// Area imbalance `|B1 - B2| / area(T)`, always in `[0, 1]`.
    pub fn imbalance(&self) -> Scalar {
        self.signed_imbalance().abs()
    }

    /// Signed imbalance `(B1 - B2) / area(T)`, for diagnostics.
    pub fn signed_imbalance(&self) -> Scalar {
        let area = Scalar::Exact(self.area.clone());
        &(&self.b1 - &self.b2) / &area
    }

    /// Exchange proportion `theta = B2 / area(T)`: the fraction of the torus
    /// swapped between the two copies when re-marking along the short slit.
    /// `B2` is the region *not* containing the basepoint.
    pub fn exchange_proportion(&self) -> Scalar {
        &self.b2 / &Scalar::Exact(self.area.clone())
    }
}

/// Strip-coordinate piece of the short slit: a segment from `(x_bot, h_bot)`
/// to `(x_top, h_top)` with `0 <= h_bot < h_top <= 1`.
#[derive(Clone, Debug)]
struct ShortPiece {
    x_bot: Scalar,
    h_bot: Scalar,
    x_top: Scalar,
    h_top: Scalar,
}

impl ShortPiece {
    fn x_at(&self, h: &Scalar) -> Scalar {
        let t = &(h - &self.h_bot) / &(&self.h_top - &self.h_bot);
        &self.x_bot + &(&t * &(&self.x_top - &self.x_bot))
    }
}

/// The short slit in strip coordinates: either transversal pieces or, for a
/// vertical slit, flip intervals on the glued edge `x = 0 ~ x = a`
/// (expressed in left-edge heights).
struct ShortGeometry {
    pieces: Vec<ShortPiece>,
    edge_flips: Vec<(Scalar, Scalar)>,
}

fn short_geometry(torus: &NormalizedTorus, short: &ShortSlit) -> Result<ShortGeometry> {
    let (cx, cy) = corner_point(torus, short.anchor);
    let fx = &cx + &short.dx;
    let fy = &cy + &short.dy;

    let dy_sign = short.dy.try_sign()?;
    debug_assert!(dy_sign != 0, "horizontal short slit has no checkerboard");

    // orient by increasing Y
    let (p0, p1) = if dy_sign > 0 {
        ((cx, cy), (fx, fy))
    } else {
        ((fx, fy), (cx, cy))
    };

    let dx_sign = short.dx.try_sign()?;
    if dx_sign == 0 {
        // vertical: lives on the circle x = 0 ~ x = a; express in left-edge
        // heights (subtract alpha on the right edge).
        let on_right = p0.0.try_cmp(&Scalar::zero())? != Ordering::Equal;
        let (mut y0, mut y1) = (p0.1.clone(), p1.1.clone());
        if on_right {
            y0 = &y0 - torus.alpha();
            y1 = &y1 - torus.alpha();
        }
        let base = y0.floor()?;
        let shift = Scalar::from_bigint(base);
        let u = &y0 - &shift;
        let v = &y1 - &shift;
        let one = Scalar::one();
        let mut flips = Vec::new();
        if v.try_cmp(&one)? != Ordering::Greater {
            flips.push((u, v));
        } else {
            flips.push((u, one.clone()));
            flips.push((Scalar::zero(), &v - &one));
        }
        Ok(ShortGeometry {
            pieces: Vec::new(),
            edge_flips: flips,
        })
    } else {
        // transversal: split the plane segment at integer heights
        let mut pieces = Vec::new();
        let base = p0.1.floor()?;
        let mut m = Scalar::from_bigint(base);
        let dy = &p1.1 - &p0.1;
        let dxs = &p1.0 - &p0.0;
        let x_at = |y: &Scalar| -> Scalar {
            let t = &(y - &p0.1) / &dy;
            &p0.0 + &(&t * &dxs)
        };
        let one = Scalar::one();
        let mut cur_y = p0.1.clone();
        let mut cur_x = p0.0.clone();
        loop {
            let next_cut = &m + &one;
            let ends_here = p1.1.try_cmp(&next_cut)? != Ordering::Greater;
            let top_y = if ends_here { p1.1.clone() } else { next_cut.clone() };
            // exact endpoint coordinates at the segment's own ends; the
            // interpolated value only at genuine interior cuts
            let top_x = if ends_here { p1.0.clone() } else { x_at(&top_y) };
            if top_y.try_cmp(&cur_y)? == Ordering::Greater {
                pieces.push(ShortPiece {
                    x_bot: cur_x.clone(),
                    h_bot: &cur_y - &m,
                    x_top: top_x.clone(),
                    h_top: &top_y - &m,
                });
            }
            if ends_here {
                break;
            }
            cur_y = top_y;
            cur_x = top_x;
            m = next_cut;
        }
        Ok(ShortGeometry {
            pieces,
            edge_flips: Vec::new(),
        })
    }
}

/// Total-order wrapper over f64 for cached sort keys.
#[derive(PartialEq)]
struct FloatKey(f64);

impl Eq for FloatKey {}

impl PartialOrd for FloatKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FloatKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Compare scalars, treating structurally identical values (same exact
/// value, same affine coefficients, or byte-identical enclosures from the
/// same computation) as equal before falling back to semantic comparison.
fn cmp_structural(a: &Scalar, b: &Scalar) -> Result<Ordering> {
    if a == b {
        return Ok(Ordering::Equal);
    }
    a.try_cmp(b)
}

/// Sorts scalars ascending: fast float pre-sort verified by exact
/// comparisons, with an exact merge sort as fallback.
fn sort_exact<T: CloneUnchecked>(
    items: &mut Vec<T>,
    key: impl Fn(&T) -> Scalar + Copy,
) -> Result<()> {
    items.sort_by_cached_key(|a| FloatKey(key(a).to_f64()));
    let mut sorted = true;
    for w in items.windows(2) {
        if cmp_structural(&key(&w[0]), &key(&w[1]))? == Ordering::Greater {
            sorted = false;
            break;
        }
    }
    if sorted {
        return Ok(());
    }
    merge_sort(items, key)
}

fn merge_sort<T: CloneUnchecked>(
    items: &mut Vec<T>,
    key: impl Fn(&T) -> Scalar + Copy,
) -> Result<()> {
    let n = items.len();
    if n <= 1 {
        return Ok(());
    }
    let rest = items.split_off(n / 2);
    let mut left = std::mem::take(items);
    let mut right = rest;
    merge_sort(&mut left, key)?;
    merge_sort(&mut right, key)?;
    let mut li = 0;
    let mut ri = 0;
    while li < left.len() || ri < right.len() {
        let take_left = if li == left.len() {
            false
        } else if ri == right.len() {
            true
        } else {
            cmp_structural(&key(&left[li]), &key(&right[ri]))? != Ordering::Greater
        };
        if take_left {
            items.push(left[li].clone_unchecked());
            li += 1;
        } else {
            items.push(right[ri].clone_unchecked());
            ri += 1;
        }
    }
    Ok(())
}

/// Internal clone helper so merge_sort does not require `T: Clone` at the
/// call sites that move values; implemented for the one element type used.
trait CloneUnchecked {
    fn clone_unchecked(&self) -> Self;
}

impl<A: Clone, B: Clone> CloneUnchecked for (A, B) {
    fn clone_unchecked(&self) -> Self {
        self.clone()
    }
}

impl CloneUnchecked for ShortPiece {
    fn clone_unchecked(&self) -> Self {
        self.clone()
    }
}

struct Band {
    lo: Scalar,
    hi: Scalar,
    chords: Vec<ShortPiece>, // clipped chords spanning the band
    face_offset: usize,
}

fn build_impl(
    torus: &NormalizedTorus,
    slit: &HorizontalSlit,
    short: &ShortSlit,
    keep_pieces: bool,
) -> Result<Checkerboard> {
    if short.is_horizontal() {
        // the slit coincides with its representative; the complement carries
        // a single color and no exchange region
        return Err(Error::DegenerateCell);
    }
    let a = torus.a_scalar();
    let alpha = torus.alpha().clone();
    let one = Scalar::one();
    let n_pieces = slit.piece_count()?;

    // --- event heights: slit piece heights with their covered widths ---
    let mut events: Vec<(Scalar, Option<Scalar>)> = Vec::with_capacity(n_pieces as usize + 4);
    let mut h = Scalar::zero();
    for i in 0..n_pieces {
        let remaining = &Scalar::Exact(slit.ratio().clone()) - &Scalar::from_int(i as i64);
        let width = if remaining.try_cmp(&one)? == Ordering::Less {
            &remaining * &a
        } else {
            a.clone()
        };
        events.push((h.clone(), Some(width)));
        let mut next = &h - &alpha;
        if next.try_sign()? < 0 {
            next = &next + &one;
        }
        h = next;
    }

    let geom = short_geometry(torus, short)?;
    for p in &geom.pieces {
        events.push((p.h_bot.clone(), None));
        if p.h_top.try_cmp(&one)? == Ordering::Less {
            events.push((p.h_top.clone(), None));
        }
    }
    for (u, v) in &geom.edge_flips {
        events.push((u.clone(), None));
        if v.try_cmp(&one)? == Ordering::Less {
            events.push((v.clone(), None));
        }
    }

    sort_exact(&mut events, |e| e.0.clone())?;
    // dedup, merging slit covers into coinciding event heights
    let mut heights: Vec<Scalar> = Vec::with_capacity(events.len());
    let mut covers: Vec<Option<Scalar>> = Vec::with_capacity(events.len());
    for (h, cover) in events {
        if let Some(last) = heights.last() {
            if cmp_structural(last, &h)? == Ordering::Equal {
                let idx = covers.len() - 1;
                if covers[idx].is_none() {
                    covers[idx] = cover;
                }
                continue;
            }
        }
        heights.push(h);
        covers.push(cover);
    }
    let m = heights.len();
    debug_assert!(m >= 1 && heights[0].is_zero());
    let height_keys: Vec<f64> = heights.iter().map(Scalar::to_f64).collect();

    // --- bands and chords ---
    let mut bands: Vec<Band> = Vec::with_capacity(m);
    for k in 0..m {
        let hi = if k + 1 < m {
            heights[k + 1].clone()
        } else {
            one.clone()
        };
        bands.push(Band {
            lo: heights[k].clone(),
            hi,
            chords: Vec::new(),
            face_offset: 0,
        });
    }
    for p in &geom.pieces {
        let mut k = locate_height(&heights, &height_keys, &p.h_bot)?;
        loop {
            let band_lo = bands[k].lo.clone();
            let band_hi = bands[k].hi.clone();
            if band_hi.try_cmp(&p.h_top)? == Ordering::Greater {
                break;
            }
            // reuse the piece's own endpoints where the band boundary is the
            // piece boundary, so coincident coordinates stay exactly equal
            let x_bot = if band_lo.try_cmp(&p.h_bot)? == Ordering::Equal {
                p.x_bot.clone()
            } else {
                p.x_at(&band_lo)
            };
            let x_top = if band_hi.try_cmp(&p.h_top)? == Ordering::Equal {
                p.x_top.clone()
            } else {
                p.x_at(&band_hi)
            };
            bands[k].chords.push(ShortPiece {
                x_bot,
                h_bot: band_lo,
                x_top,
                h_top: band_hi,
            });
            if k + 1 == m {
                break;
            }
            k += 1;
            if bands[k].lo.try_cmp(&p.h_top)? != Ordering::Less {
                break;
            }
        }
    }
    let mut total_faces = 0usize;
    for band in &mut bands {
        sort_exact(&mut band.chords, |c| c.x_bot.clone())?;
        band.face_offset = total_faces;
        total_faces += band.chords.len() + 1;
    }

    // --- constraint graph ---
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); total_faces];
    let edge = |adj: &mut Vec<Vec<(usize, bool)>>, f: usize, g: usize, flip: bool| {
        adj[f].push((g, flip));
        adj[g].push((f, flip));
    };

    // across chords inside a band
    for band in &bands {
        for p in 0..band.chords.len() {
            edge(&mut adj, band.face_offset + p, band.face_offset + p + 1, true);
        }
    }

    // across each horizontal boundary (cyclic)
    for k in 0..m {
        let below = (k + m - 1) % m;
        let mut xs: Vec<Scalar> = vec![Scalar::zero(), a.clone()];
        for c in &bands[below].chords {
            xs.push(c.x_top.clone());
        }
        for c in &bands[k].chords {
            xs.push(c.x_bot.clone());
        }
        if let Some(w) = &covers[k] {
            xs.push(w.clone());
        }
        let mut pairs = xs_wrap(&mut xs);
        sort_exact(&mut pairs, |x| x.0.clone())?;
        let xs: Vec<Scalar> = dedup_scalars(pairs)?;
        for win in xs.windows(2) {
            let (u, v) = (&win[0], &win[1]);
            let mid = &(u + v) / &Scalar::from_int(2);
            let f_below = face_at(&bands[below], &mid, true)?;
            let f_above = face_at(&bands[k], &mid, false)?;
            let flip = match &covers[k] {
                Some(w) => mid.try_cmp(w)? == Ordering::Less,
                None => false,
            };
            edge(&mut adj, f_below, f_above, flip);
        }
    }

    // across the glued vertical edge
    for k in 0..m {
        let right_face = bands[k].face_offset + bands[k].chords.len();
        let u0 = shift_mod_one(&bands[k].lo, &alpha, &one)?;
        let span = &bands[k].hi - &bands[k].lo;
        let v0 = &u0 + &span;
        let mut intervals: Vec<(Scalar, Scalar)> = Vec::new();
        if v0.try_cmp(&one)? != Ordering::Greater {
            intervals.push((u0, v0));
        } else {
            intervals.push((u0, one.clone()));
            intervals.push((Scalar::zero(), &v0 - &one));
        }
        for (lo, hi) in intervals {
            if lo.try_cmp(&hi)? != Ordering::Less {
                continue;
            }
            let mut j = locate_height(&heights, &height_keys, &lo)?;
            loop {
                let seg_lo = if bands[j].lo.try_cmp(&lo)? == Ordering::Less {
                    lo.clone()
                } else {
                    bands[j].lo.clone()
                };
                let seg_hi = if bands[j].hi.try_cmp(&hi)? == Ordering::Less {
                    bands[j].hi.clone()
                } else {
                    hi.clone()
                };
                if seg_lo.try_cmp(&seg_hi)? == Ordering::Less {
                    let mid = &(&seg_lo + &seg_hi) / &Scalar::from_int(2);
                    let mut flip = false;
                    for (f0, f1) in &geom.edge_flips {
                        if mid.try_cmp(f0)? != Ordering::Less
                            && mid.try_cmp(f1)? == Ordering::Less
                        {
                            flip = true;
                            break;
                        }
                    }
                    edge(&mut adj, right_face, bands[j].face_offset, flip);
                }
                if bands[j].hi.try_cmp(&hi)? != Ordering::Less || j + 1 == m {
                    break;
                }
                j += 1;
            }
        }
    }

    // --- two-coloring from the basepoint ---
    let colors = match two_color(&adj, total_faces) {
        Some(c) => c,
        None => return Err(Error::NotHomologous),
    };

    // --- areas ---
    let half = Scalar::from_ratio(one_half());
    let mut b1 = Scalar::zero();
    let mut b2 = Scalar::zero();
    let mut pieces = Vec::new();
    for (k, band) in bands.iter().enumerate() {
        let dh = &band.hi - &band.lo;
        let n_panels = band.chords.len() + 1;
        for p in 0..n_panels {
            let (xl_bot, xl_top) = if p == 0 {
                (Scalar::zero(), Scalar::zero())
            } else {
                (band.chords[p - 1].x_bot.clone(), band.chords[p - 1].x_top.clone())
            };
            let (xr_bot, xr_top) = if p == band.chords.len() {
                (a.clone(), a.clone())
            } else {
                (band.chords[p].x_bot.clone(), band.chords[p].x_top.clone())
            };
            let w_bot = &xr_bot - &xl_bot;
            let w_top = &xr_top - &xl_top;
            let area = &(&(&w_bot + &w_top) * &half) * &dh;
            match area.try_sign() {
                Ok(s) if s > 0 => {}
                Ok(_) => return Err(Error::DegenerateCell),
                Err(_) => return Err(Error::PrecisionExhausted),
            }
            let color = if colors[band.face_offset + p] == 0 {
                Color::One
            } else {
                Color::Two
            };
            match color {
                Color::One => b1 = &b1 + &area,
                Color::Two => b2 = &b2 + &area,
            }
            if keep_pieces {
                pieces.push(Piece {
                    color,
                    area,
                    quad: [
                        (xl_bot.to_f64(), band.lo.to_f64()),
                        (xr_bot.to_f64(), band.lo.to_f64()),
                        (xr_top.to_f64(), band.hi.to_f64()),
                        (xl_top.to_f64(), band.hi.to_f64()),
                    ],
                    band: k,
                });
            }
        }
    }

    // exactness check: B1 + B2 = area(T)
    let total = &b1 + &b2;
    match (&total, &a) {
        (Scalar::Exact(t), Scalar::Exact(aa)) => {
            if t != aa {
                return Err(Error::DegenerateCell);
            }
        }
        _ => {
            let enc = total.enclosure(64);
            let target = a.enclosure(64);
            if !enc.overlaps(&target) {
                return Err(Error::DegenerateCell);
            }
        }
    }

    let q_index = q_index_for(torus, slit);
    Ok(Checkerboard {
        pieces,
        b1,
        b2,
        q_index,
        area: torus.modulus().clone(),
        bands: m,
    })
}

// Helper wrapping xs into (Scalar, ()) pairs for the generic sorter.
fn xs_wrap(xs: &mut Vec<Scalar>) -> Vec<(Scalar, ())> {
    xs.drain(..).map(|x| (x, ())).collect()
}

fn dedup_scalars(pairs: Vec<(Scalar, ())>) -> Result<Vec<Scalar>> {
    let mut out: Vec<Scalar> = Vec::with_capacity(pairs.len());
    for (x, _) in pairs {
        if let Some(last) = out.last() {
            if cmp_structural(last, &x)? == Ordering::Equal {
                continue;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Index of the band whose bottom height is `<= h <` next height. Uses the
/// float keys to seed, then fixes up with exact comparisons.
fn locate_height(heights: &[Scalar], keys: &[f64], h: &Scalar) -> Result<usize> {
    let m = heights.len();
    let hf = h.to_f64();
    let mut idx = keys.partition_point(|k| *k <= hf);
    idx = idx.saturating_sub(1).min(m - 1);
    loop {
        if heights[idx].try_cmp(h)? == Ordering::Greater {
            if idx == 0 {
                return Err(Error::DegenerateCell);
            }
            idx -= 1;
        } else if idx + 1 < m && heights[idx + 1].try_cmp(h)? != Ordering::Greater {
            idx += 1;
        } else {
            return Ok(idx);
        }
    }
}

/// Face of `band` whose x-extent contains `x` at the band's bottom
/// (`at_top = false`) or top (`at_top = true`) edge.
fn face_at(band: &Band, x: &Scalar, at_top: bool) -> Result<usize> {
    let mut panel = 0;
    for (i, c) in band.chords.iter().enumerate() {
        let cx = if at_top { &c.x_top } else { &c.x_bot };
        if cx.try_cmp(x)? == Ordering::Less {
            panel = i + 1;
        } else {
            break;
        }
    }
    Ok(band.face_offset + panel)
}

fn shift_mod_one(h: &Scalar, alpha: &Scalar, one: &Scalar) -> Result<Scalar> {
    let mut u = h - alpha;
    if u.try_sign()? < 0 {
        u = &u + one;
    }
    Ok(u)
}

fn two_color(adj: &[Vec<(usize, bool)>], total: usize) -> Option<Vec<i8>> {
    let mut colors = vec![-1i8; total];
    let mut queue = std::collections::VecDeque::new();
    colors[0] = 0;
    queue.push_back(0usize);
    let mut visited = 1usize;
    while let Some(f) = queue.pop_front() {
        for &(g, flip) in &adj[f] {
            let want = if flip { 1 - colors[f] } else { colors[f] };
            if colors[g] == -1 {
                colors[g] = want;
                visited += 1;
                queue.push_back(g);
            } else if colors[g] != want {
                return None;
            }
        }
    }
    if visited != total {
        // the complement of the curves is connected on a torus; an
        // unreached face indicates a construction bug
        return None;
    }
    Some(colors)
}

fn q_index_for(torus: &NormalizedTorus, slit: &HorizontalSlit) -> Option<usize> {
    let n = slit.ratio();
    let mut depth = 4usize;
    loop {
        let convs = torus.alpha_spec().convergents(depth).ok()?;
        if let Some(pos) = convs.iter().position(|c| {
            ExactScalar::from_bigint(c.q.clone()).cmp_exact(n) == Ordering::Greater
        }) {
            return if pos == 0 { None } else { Some(pos - 1) };
        }
        if depth > 260 {
            return None;
        }
        depth *= 2;
    }
}

/// Decides whether the slit and the candidate short slit cut out a properly
/// two-colorable arrangement, i.e. represent the same relative homology
/// class mod 2. This is the arrangement-based oracle, independent of the
/// intersection-parity route used by [`crate::torus::reduce_slit`].
pub fn homologous_mod2(
    torus: &NormalizedTorus,
    slit: &HorizontalSlit,
    short: &ShortSlit,
) -> Result<bool> {
    if short.is_horizontal() {
        // the candidate is the slit itself; the union is a single arc and
        // bounds trivially
        return Ok(true);
    }
    match build_impl(torus, slit, short, false) {
        Ok(_) => Ok(true),
        Err(Error::NotHomologous) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Monte-Carlo estimate of the color areas by crossing parity of a straight
/// path from the basepoint, in floating point. This is a statistical oracle
/// for [`Checkerboard::build`], sharing none of its arrangement logic.
///
/// Returns `(B1, B2)` estimates. Deterministic for fixed inputs.
pub fn monte_carlo_color_areas(
    torus: &NormalizedTorus,
    slit: &HorizontalSlit,
    short: &ShortSlit,
    samples: u64,
) -> Result<(f64, f64)> {
    monte_carlo_color_areas_seeded(torus, slit, short, samples, 0x5eed)
}

/// [`monte_carlo_color_areas`] with an explicit RNG seed.
pub fn monte_carlo_color_areas_seeded(
    torus: &NormalizedTorus,
    slit: &HorizontalSlit,
    short: &ShortSlit,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    const MIN_SAMPLES: u64 = 10_000;
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            min: MIN_SAMPLES,
            got: samples,
        });
    }
    let a = torus.modulus().to_f64();
    let alpha = torus.alpha().to_f64();
    let n = slit.ratio().to_f64();
    let n_pieces = slit.piece_count()? as usize;

    // slit piece heights; all full width except possibly the last
    let mut labeled: Vec<(f64, usize)> = Vec::with_capacity(n_pieces);
    for i in 0..n_pieces {
        let h = (-(i as f64) * alpha).rem_euclid(1.0);
        labeled.push((h, i));
    }
    labeled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let heights: Vec<f64> = labeled.iter().map(|e| e.0).collect();

    // short-slit pieces in strip coordinates (float, independent split)
    let (cx, cy) = corner_f64(a, alpha, short.anchor);
    let fx = cx + short.dx.to_f64();
    let fy = cy + short.dy.to_f64();
    let (p0, p1) = if cy <= fy { ((cx, cy), (fx, fy)) } else { ((fx, fy), (cx, cy)) };
    let mut segs: Vec<((f64, f64), (f64, f64))> = Vec::new();
    if (p1.0 - p0.0).abs() < 1e-15 {
        // A vertical short slit lies on the glued circle x = 0 ~ x = a.
        // Straight paths between interior points of the strip never touch
        // that circle, so it contributes no crossings.
    } else {
        let mut cur = p0.1;
        let dy = p1.1 - p0.1;
        let x_of = |y: f64| p0.0 + (y - p0.1) / dy * (p1.0 - p0.0);
        while cur < p1.1 - 1e-15 {
            let m = cur.floor();
            let top = (m + 1.0).min(p1.1);
            segs.push(((x_of(cur), cur - m), (x_of(top), top - m)));
            cur = top;
        }
    }

    // basepoint: inside the face just above the slit's left endpoint
    let mut hmin = f64::INFINITY;
    for &h in &heights {
        if h > 1e-12 {
            hmin = hmin.min(h);
        }
    }
    for s in &segs {
        for h in [s.0 .1, s.1 .1] {
            if h > 1e-12 {
                hmin = hmin.min(h);
            }
        }
    }
    let hb = 0.5 * hmin.min(1.0);
    let mut xmin = a;
    for s in &segs {
        let (q0, q1) = (s.0, s.1);
        if (q0.1 - q1.1).abs() > 1e-15 && hb > q0.1.min(q1.1) && hb < q0.1.max(q1.1) {
            let t = (hb - q0.1) / (q1.1 - q0.1);
            let x = q0.0 + t * (q1.0 - q0.0);
            if x > 1e-12 {
                xmin = xmin.min(x);
            }
        }
    }
    let xb = 0.5 * xmin;

    let partial: Option<(f64, f64)> = if n.fract() > 1e-12 {
        let i = n_pieces - 1;
        Some(((-(i as f64) * alpha).rem_euclid(1.0), a * (n - i as f64)))
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut even = 0u64;
    for _ in 0..samples {
        let xs = rng.gen_range(0.0..a);
        let hs = rng.gen_range(0.0..1.0);
        let mut parity = 0u64;

        let (hlo, hhi) = if hb < hs { (hb, hs) } else { (hs, hb) };
        // full-width slit pieces cross iff their height is in range
        let lo_idx = heights.partition_point(|&h| h <= hlo);
        let hi_idx = heights.partition_point(|&h| h < hhi);
        parity += (hi_idx - lo_idx) as u64;
        if let Some((hp, wp)) = partial {
            if hp > hlo && hp < hhi {
                // the partial piece was counted as full; correct it
                let t = (hp - hb) / (hs - hb);
                let x = xb + t * (xs - xb);
                if x >= wp {
                    parity -= 1;
                }
            }
        }
        // short slit pieces: segment-segment tests
        for s in &segs {
            if segments_cross((xb, hb), (xs, hs), s.0, s.1) {
                parity += 1;
            }
        }
        if parity.is_multiple_of(2) {
            even += 1;
        }
    }
    let area = torus.modulus().to_f64();
    let b1 = even as f64 / samples as f64 * area;
    Ok((b1, area - b1))
}

fn corner_f64(a: f64, alpha: f64, anchor: u8) -> (f64, f64) {
    match anchor {
        0 => (0.0, 0.0),
        1 => (0.0, 1.0),
        2 => (a, alpha),
        3 => (a, alpha + 1.0),
        _ => panic!("anchor index out of range"),
    }
}

fn segments_cross(p0: (f64, f64), p1: (f64, f64), q0: (f64, f64), q1: (f64, f64)) -> bool {
    let d1 = (p1.0 - p0.0, p1.1 - p0.1);
    let d2 = (q1.0 - q0.0, q1.1 - q0.1);
    let den = d1.0 * d2.1 - d1.1 * d2.0;
    if den.abs() < 1e-18 {
        return false;
    }
    let r = (q0.0 - p0.0, q0.1 - p0.1);
    let t = (r.0 * d2.1 - r.1 * d2.0) / den;
    let u = (r.0 * d1.1 - r.1 * d1.0) / den;
    t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0
}

/// CSV rendering of the cell list: index, color, exact area as a 40-digit
/// decimal, and the lossless exact form.
pub fn pieces_csv(cb: &Checkerboard) -> String {
    let mut out = String::from("piece,color,area,area_exact\n");
    for (i, p) in cb.pieces().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            match p.color {
                Color::One => 1,
                Color::Two => 2,
            },
            p.area.to_decimal_string(40),
            p.area.exact_form(),
        ));
    }
    out
}

/// SVG rendering of the fundamental parallelogram with the colored cells and
/// both slits, figure-style: fixed 1000-unit width, height
/// `1000 (1 + alpha) / a`, colors `#ffffff`/`#d94040`, curves stroked 2px.
pub fn to_svg(
    torus: &NormalizedTorus,
    cb: &Checkerboard,
    slit: &HorizontalSlit,
    short: &ShortSlit,
) -> String {
    let a = torus.modulus().to_f64();
    let alpha = torus.alpha().to_f64();
    let scale = 1000.0 / a;
    let height = 1000.0 * (1.0 + alpha) / a;
    let slope = alpha / a;

    // strip point -> fundamental parallelogram representative -> svg coords
    let place = |x: f64, y_unshifted: f64| -> (f64, f64) {
        (x * scale, height - y_unshifted * scale)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 {height:.4}\">\n"
    ));

    // colored cells, clipped against the diagonal line h = (alpha/a) x and
    // shifted into the parallelogram
    for p in cb.pieces() {
        let quad: Vec<(f64, f64)> = p.quad.to_vec();
        for (part, shift) in clip_by_line(&quad, slope) {
            if part.len() < 3 {
                continue;
            }
            let fill = match p.color {
                Color::One => "#ffffff",
                Color::Two => "#d94040",
            };
            let mut d = String::new();
            for (i, (x, h)) in part.iter().enumerate() {
                let (sx, sy) = place(*x, h + shift);
                d.push_str(if i == 0 { "M" } else { "L" });
                d.push_str(&format!("{sx:.4} {sy:.4} "));
            }
            d.push('Z');
            svg.push_str(&format!(
                "  <path d=\"{d}\" fill=\"{fill}\" stroke=\"{fill}\" stroke-width=\"0.5\"/>\n"
            ));
        }
    }

    // parallelogram border
    let border = [
        place(0.0, 0.0),
        place(0.0, 1.0),
        place(a, alpha + 1.0),
        place(a, alpha),
    ];
    let mut d = String::new();
    for (i, (sx, sy)) in border.iter().enumerate() {
        d.push_str(if i == 0 { "M" } else { "L" });
        d.push_str(&format!("{sx:.4} {sy:.4} "));
    }
    d.push('Z');
    svg.push_str(&format!(
        "  <path d=\"{d}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n"
    ));

    // long slit: horizontal pieces, each split at the diagonal
    let n = slit.ratio().to_f64();
    let pieces = slit.piece_count().unwrap_or(0);
    for i in 0..pieces {
        let h = (-(i as f64) * alpha).rem_euclid(1.0);
        let w = a * (n - i as f64).min(1.0);
        let x_star = (h / slope).clamp(0.0, a);
        for (x0, x1, shift) in [
            (0.0, w.min(x_star), 0.0),
            (x_star.min(w), w, 1.0),
        ] {
            if x1 - x0 > 1e-12 {
                let (sx0, sy0) = place(x0, h + shift);
                let (sx1, sy1) = place(x1, h + shift);
                svg.push_str(&format!(
                    "  <line x1=\"{sx0:.4}\" y1=\"{sy0:.4}\" x2=\"{sx1:.4}\" y2=\"{sy1:.4}\" stroke=\"#000000\" stroke-width=\"2\"/>\n"
                ));
            }
        }
    }

    // short slit: strip pieces split at the diagonal
    let (cx, cy) = corner_f64(a, alpha, short.anchor);
    let fx = cx + short.dx.to_f64();
    let fy = cy + short.dy.to_f64();
    let (p0, p1) = if cy <= fy { ((cx, cy), (fx, fy)) } else { ((fx, fy), (cx, cy)) };
    let mut segs: Vec<((f64, f64), (f64, f64))> = Vec::new();
    if (p1.1 - p0.1).abs() < 1e-15 {
        segs.push((p0, p1));
    } else {
        let dy = p1.1 - p0.1;
        let x_of = |y: f64| p0.0 + (y - p0.1) / dy * (p1.0 - p0.0);
        let mut cur = p0.1;
        while cur < p1.1 - 1e-15 {
            let m = cur.floor();
            let top = (m + 1.0).min(p1.1);
            segs.push(((x_of(cur), cur - m), (x_of(top), top - m)));
            cur = top;
        }
    }
    for ((x0, h0), (x1, h1)) in segs {
        // split where h - slope x changes sign
        let l0 = h0 - slope * x0;
        let l1 = h1 - slope * x1;
        type Part = ((f64, f64), (f64, f64), f64);
        let mut parts: Vec<Part> = Vec::new();
        if l0 >= 0.0 && l1 >= 0.0 {
            parts.push(((x0, h0), (x1, h1), 0.0));
        } else if l0 < 0.0 && l1 < 0.0 {
            parts.push(((x0, h0), (x1, h1), 1.0));
        } else {
            let t = l0 / (l0 - l1);
            let xm = x0 + t * (x1 - x0);
            let hm = h0 + t * (h1 - h0);
            let (s0, s1) = if l0 >= 0.0 { (0.0, 1.0) } else { (1.0, 0.0) };
            parts.push(((x0, h0), (xm, hm), s0));
            parts.push(((xm, hm), (x1, h1), s1));
        }
        for ((u0, v0), (u1, v1), shift) in parts {
            let (sx0, sy0) = place(u0, v0 + shift);
            let (sx1, sy1) = place(u1, v1 + shift);
            svg.push_str(&format!(
                "  <line x1=\"{sx0:.4}\" y1=\"{sy0:.4}\" x2=\"{sx1:.4}\" y2=\"{sy1:.4}\" stroke=\"#000000\" stroke-width=\"2\"/>\n"
            ));
        }
    }

    svg.push_str("</svg>\n");
    svg
}

/// Clips a convex polygon against the diagonal `h = slope * x`, returning
/// the part above (shift 0) and the part below (shift 1, to be translated up
/// into the parallelogram).
fn clip_by_line(quad: &[(f64, f64)], slope: f64) -> Vec<(Vec<(f64, f64)>, f64)> {
    let side = |p: &(f64, f64)| p.1 - slope * p.0;
    let mut above = Vec::new();
    let mut below = Vec::new();
    let n = quad.len();
    for i in 0..n {
        let p = quad[i];
        let q = quad[(i + 1) % n];
        let sp = side(&p);
        let sq = side(&q);
        if sp >= 0.0 {
            above.push(p);
        }
        if sp <= 0.0 {
            below.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let t = sp / (sp - sq);
            let m = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
            above.push(m);
            below.push(m);
        }
    }
    vec![(above, 0.0), (below, 1.0)]
}
