//! Elementary-aspect extraction.
//!
//! A drawing is reduced to a configuration of feature points: line ends,
//! soft bends, corner bends and line crossings. Every measured quantity
//! (counts, bend percentages, the largest and smallest distances, the
//! main-form length) is computed from that point set.

use std::cmp::Ordering;

use crate::drawing::{Drawing, Point, Polyline, CLOSURE_TOLERANCE};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Crossings closer than this are reported once (mm).
pub const INTERSECTION_DEDUP: f64 = 1e-6;

/// Sampling and bend-classification parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig<T> {
    pub resample_step_mm: T,
    pub theta_soft_deg: T,
    pub theta_corner_deg: T,
}

impl<T: Real> Default for GeometryConfig<T> {
    fn default() -> Self {
        Self {
            resample_step_mm: T::one(),
            theta_soft_deg: T::lit(5.0),
            theta_corner_deg: T::lit(40.0),
        }
    }
}

impl<T: Real> GeometryConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.resample_step_mm > T::zero()) || !self.resample_step_mm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "resample step must be positive, got {}",
                self.resample_step_mm
            )));
        }
        let (s, c) = (self.theta_soft_deg, self.theta_corner_deg);
        if !(T::zero() < s && s < c && c < T::lit(180.0)) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < theta_soft < theta_corner < 180, got {s} and {c}"
            )));
        }
        Ok(())
    }

    /// Same thresholds with the step multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            resample_step_mm: self.resample_step_mm * k,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    End,
    SoftBend,
    CornerBend,
    Intersection,
}

/// Which line(s) a feature point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSource {
    Polyline(usize),
    /// Indices of the two crossing polylines (equal for a self-crossing).
    Crossing(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturePoint<T> {
    pub position: Point<T>,
    pub kind: FeatureKind,
    pub source: FeatureSource,
}

impl<T> FeaturePoint<T> {
    /// Owning polyline, `None` for crossings.
    pub fn polyline_index(&self) -> Option<usize> {
        match self.source {
            FeatureSource::Polyline(i) => Some(i),
            FeatureSource::Crossing(..) => None,
        }
    }
}

/// Subdivides every segment into equal pieces no longer than `step`.
///
/// Original vertices are kept, so endpoints and corners stay exact and the
/// arc length is unchanged. A segment shorter than `step` is left whole.
pub fn resample<T: Real>(p: &Polyline<T>, step: T) -> Polyline<T> {
    assert!(step > T::zero(), "resample step must be positive");
    let slack = T::lit(1e-9);
    let mut out = Vec::with_capacity(p.vertices().len());
    out.push(p.first());
    for (a, b) in p.segments() {
        let len = a.distance(&b);
        let pieces = (len / step - slack).ceil().max(T::one());
        let n = pieces.to_usize().unwrap_or(1).max(1);
        let nf = T::from_count(n);
        for k in 1..n {
            out.push(a.lerp(&b, T::from_count(k) / nf));
        }
        out.push(b);
    }
    Polyline::new(out).expect("subdivision of a valid polyline is valid")
}

/// Unsigned turning angle at `b` in degrees, in `[0, 180]`.
pub fn turning_angle_deg<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let (ux, uy) = b.sub(&a);
    let (vx, vy) = c.sub(&b);
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    cross.abs().atan2(dot).to_degrees()
}

fn cumulative_lengths<T: Real>(v: &[Point<T>]) -> Vec<T> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(v.len());
    out.push(acc);
    for w in v.windows(2) {
        acc += w[0].distance(&w[1]);
        out.push(acc);
    }
    out
}

fn point_at<T: Real>(v: &[Point<T>], cum: &[T], s: T) -> Point<T> {
    let total = *cum.last().expect("non-empty");
    let s = s.max(T::zero()).min(total);
    let i = match cum.binary_search_by(|c| c.partial_cmp(&s).unwrap_or(Ordering::Less)) {
        Ok(i) => return v[i],
        Err(i) => i.clamp(1, v.len() - 1),
    };
    let span = cum[i] - cum[i - 1];
    v[i - 1].lerp(&v[i], (s - cum[i - 1]) / span)
}

#[derive(Clone, Copy, PartialEq)]
enum VertexClass {
    Flat,
    Soft,
    Corner,
}

/// Emits End, SoftBend and CornerBend feature points for a (resampled)
/// polyline.
///
/// Interior vertices turning by at least `theta_corner` are corners. A
/// maximal run of vertices turning by at least `theta_soft` (but less than
/// `theta_corner`) is one soft bend, placed at the arc-length midpoint of the
/// run. Closed polylines have no ends; their junction vertex is classified
/// like any other.
pub fn classify_vertices<T: Real>(
    p: &Polyline<T>,
    theta_soft: T,
    theta_corner: T,
    polyline_index: usize,
) -> Vec<FeaturePoint<T>> {
    let v = p.vertices();
    let cum = cumulative_lengths(v);
    let total = *cum.last().expect("non-empty");
    let src = FeatureSource::Polyline(polyline_index);
    let feature = |position, kind| FeaturePoint {
        position,
        kind,
        source: src,
    };
    let classify = |theta: T| {
        if theta >= theta_corner {
            VertexClass::Corner
        } else if theta >= theta_soft {
            VertexClass::Soft
        } else {
            VertexClass::Flat
        }
    };
    let half = T::lit(0.5);
    let mut out = Vec::new();

    if !p.is_closed() {
        let n = v.len();
        out.push(feature(v[0], FeatureKind::End));
        let mut run: Option<(usize, usize)> = None;
        let flush = |run: &mut Option<(usize, usize)>, out: &mut Vec<FeaturePoint<T>>| {
            if let Some((a, b)) = run.take() {
                let s = (cum[a] + cum[b]) * half;
                out.push(feature(point_at(v, &cum, s), FeatureKind::SoftBend));
            }
        };
        for i in 1..n - 1 {
            match classify(turning_angle_deg(v[i - 1], v[i], v[i + 1])) {
                VertexClass::Soft => {
                    run = Some(run.map_or((i, i), |(a, _)| (a, i)));
                }
                VertexClass::Corner => {
                    flush(&mut run, &mut out);
                    out.push(feature(v[i], FeatureKind::CornerBend));
                }
                VertexClass::Flat => flush(&mut run, &mut out),
            }
        }
        flush(&mut run, &mut out);
        out.push(feature(v[n - 1], FeatureKind::End));
        return out;
    }

    // Closed: vertices 0..m form the cycle, v[m] duplicates v[0].
    let m = v.len() - 1;
    let class: Vec<VertexClass> = (0..m)
        .map(|i| {
            let prev = if i == 0 { v[m - 1] } else { v[i - 1] };
            classify(turning_angle_deg(prev, v[i], v[i + 1]))
        })
        .collect();
    let Some(start) = class.iter().position(|c| *c != VertexClass::Soft) else {
        // Every vertex bends softly: one bend for the whole loop.
        out.push(feature(
            point_at(v, &cum, total * half),
            FeatureKind::SoftBend,
        ));
        return out;
    };
    // Arc position of cyclic step k after `start`, unwrapped past the junction.
    let pos = |k: usize| {
        let i = (start + k) % m;
        if start + k >= m {
            cum[i] + total
        } else {
            cum[i]
        }
    };
    let wrap = |s: T| if s >= total { s - total } else { s };
    let mut run: Option<(T, T)> = None;
    for k in 1..=m {
        let i = (start + k) % m;
        match class[i] {
            VertexClass::Soft => {
                let s = pos(k);
                run = Some(run.map_or((s, s), |(a, _)| (a, s)));
            }
            other => {
                if let Some((a, b)) = run.take() {
                    let s = wrap((a + b) * half);
                    out.push(feature(point_at(v, &cum, s), FeatureKind::SoftBend));
                }
                if other == VertexClass::Corner {
                    out.push(feature(v[i], FeatureKind::CornerBend));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: Point<T>,
    b: Point<T>,
    polyline: usize,
    index: usize,
    last_index: usize,
    closed: bool,
}

impl<T: Real> Segment<T> {
    fn adjacent(&self, other: &Self) -> bool {
        if self.polyline != other.polyline {
            return false;
        }
        let (i, j) = (self.index.min(other.index), self.index.max(other.index));
        i == j || j - i == 1 || (self.closed && i == 0 && j == self.last_index)
    }

    fn x_range(&self) -> (T, T) {
        (self.a.x.min(self.b.x), self.a.x.max(self.b.x))
    }

    fn y_range(&self) -> (T, T) {
        (self.a.y.min(self.b.y), self.a.y.max(self.b.y))
    }
}

fn segments_of<T: Real>(d: &Drawing<T>) -> Vec<Segment<T>> {
    let mut out = Vec::new();
    for (pi, p) in d.polylines().iter().enumerate() {
        let closed = p.is_closed();
        let last_index = p.vertices().len() - 2;
        for (si, (a, b)) in p.segments().enumerate() {
            out.push(Segment {
                a,
                b,
                polyline: pi,
                index: si,
                last_index,
                closed,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Hit<T> {
    point: Point<T>,
    polylines: (usize, usize),
}

/// Crossing point of two non-parallel closed segments, if any.
fn crossing<T: Real>(s: &Segment<T>, t: &Segment<T>) -> Option<Point<T>> {
    let (rx, ry) = s.b.sub(&s.a);
    let (sx, sy) = t.b.sub(&t.a);
    let denom = rx * sy - ry * sx;
    let scale = rx.hypot(ry) * sx.hypot(sy);
    if denom.abs() <= T::lit(1e-12) * scale {
        return None;
    }
    let (qx, qy) = t.a.sub(&s.a);
    let u = (qx * sy - qy * sx) / denom;
    let w = (qx * ry - qy * rx) / denom;
    let unit = T::zero()..=T::one();
    if unit.contains(&u) && unit.contains(&w) {
        Some(s.a.lerp(&s.b, u))
    } else {
        None
    }
}

fn test_pair<T: Real>(segs: &[Segment<T>], i: usize, j: usize, hits: &mut Vec<Hit<T>>) {
    let (i, j) = (i.min(j), i.max(j));
    let (s, t) = (&segs[i], &segs[j]);
    if s.adjacent(t) {
        return;
    }
    if let Some(point) = crossing(s, t) {
        hits.push(Hit {
            point,
            polylines: (s.polyline, t.polyline),
        });
    }
}

fn dedup_hits<T: Real>(mut hits: Vec<Hit<T>>) -> Vec<FeaturePoint<T>> {
    hits.sort_by(|p, q| {
        p.point
            .x
            .partial_cmp(&q.point.x)
            .unwrap_or(Ordering::Equal)
            .then(p.point.y.partial_cmp(&q.point.y).unwrap_or(Ordering::Equal))
            .then(p.polylines.cmp(&q.polylines))
    });
    let tol = T::lit(INTERSECTION_DEDUP);
    let mut kept: Vec<Hit<T>> = Vec::with_capacity(hits.len());
    for h in hits {
        let dup = kept
            .iter()
            .rev()
            .take_while(|k| h.point.x - k.point.x <= tol)
            .any(|k| k.point.distance(&h.point) <= tol);
        if !dup {
            kept.push(h);
        }
    }
    kept.into_iter()
        .map(|h| FeaturePoint {
            position: h.point,
            kind: FeatureKind::Intersection,
            source: FeatureSource::Crossing(h.polylines.0, h.polylines.1),
        })
        .collect()
}

/// Reference O(n²) pairwise crossing search.
pub fn find_intersections_brute_force<T: Real>(d: &Drawing<T>) -> Vec<FeaturePoint<T>> {
    let segs = segments_of(d);
    let mut hits = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            test_pair(&segs, i, j, &mut hits);
        }
    }
    dedup_hits(hits)
}

/// Sweep-line crossing search.
///
/// Segments enter the sweep at their left x and leave once the sweep passes
/// their right x; each entering segment is tested only against the active
/// segments whose y-extent overlaps its own. Every pair with overlapping
/// bounding boxes is tested with the same predicate as the brute-force
/// search, so both return identical sets.
pub fn find_intersections_sweep<T: Real>(d: &Drawing<T>) -> Vec<FeaturePoint<T>> {
    let segs = segments_of(d);
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| {
        segs[i]
            .x_range()
            .0
            .partial_cmp(&segs[j].x_range().0)
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut active: Vec<usize> = Vec::new();
    let mut hits = Vec::new();
    for &i in &order {
        let (x0, _) = segs[i].x_range();
        let (y0, y1) = segs[i].y_range();
        active.retain(|&j| segs[j].x_range().1 >= x0);
        for &j in &active {
            let (v0, v1) = segs[j].y_range();
            if v1 >= y0 && v0 <= y1 {
                test_pair(&segs, i, j, &mut hits);
            }
        }
        active.push(i);
    }
    dedup_hits(hits)
}

/// All line crossings of the drawing (sweep-line implementation).
pub fn find_intersections<T: Real>(d: &Drawing<T>) -> Vec<FeaturePoint<T>> {
    find_intersections_sweep(d)
}

/// Measured and counted quantities of one drawing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryAspects<T> {
    /// All feature points (#p).
    pub n_points: usize,
    /// Ends plus bends (#e).
    pub n_ends_bends: usize,
    pub n_ends: usize,
    pub n_soft: usize,
    pub n_corner: usize,
    pub n_intersections: usize,
    /// Soft-bend share of #e (%s), in `[0, 1]`.
    pub pct_soft: T,
    /// Corner share of #e (%c), in `[0, 1]`.
    pub pct_corner: T,
    /// Largest feature-point distance L (mm).
    pub largest: T,
    /// Smallest feature-point distance S (mm), pairs closer than the resample
    /// step excluded.
    pub smallest: T,
    /// Diameter M of the main connected form (mm).
    pub main_form: T,
    /// Average segment length sqrt(S * L) (mm).
    pub lseg: T,
}

/// Feature points together with the aspects derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction<T> {
    pub points: Vec<FeaturePoint<T>>,
    pub aspects: ElementaryAspects<T>,
}

/// Ends and bends of every polyline followed by all crossings.
pub fn feature_points<T: Real>(
    d: &Drawing<T>,
    cfg: &GeometryConfig<T>,
) -> Result<Vec<FeaturePoint<T>>> {
    cfg.validate()?;
    let mut points = Vec::new();
    for (i, p) in d.polylines().iter().enumerate() {
        let r = resample(p, cfg.resample_step_mm);
        points.extend(classify_vertices(
            &r,
            cfg.theta_soft_deg,
            cfg.theta_corner_deg,
            i,
        ));
    }
    points.extend(find_intersections(d));
    Ok(points)
}

pub fn elementary_aspects<T: Real>(
    d: &Drawing<T>,
    cfg: &GeometryConfig<T>,
) -> Result<ElementaryAspects<T>> {
    extract(d, cfg).map(|e| e.aspects)
}

pub fn extract<T: Real>(d: &Drawing<T>, cfg: &GeometryConfig<T>) -> Result<Extraction<T>> {
    let points = feature_points(d, cfg)?;
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "'{}' has {} feature point(s), need at least 2",
            d.id(),
            points.len()
        )));
    }
    let count = |k: FeatureKind| points.iter().filter(|p| p.kind == k).count();
    let n_ends = count(FeatureKind::End);
    let n_soft = count(FeatureKind::SoftBend);
    let n_corner = count(FeatureKind::CornerBend);
    let n_intersections = count(FeatureKind::Intersection);
    let n_ends_bends = n_ends + n_soft + n_corner;
    let share = |k: usize| {
        if n_ends_bends == 0 {
            T::zero()
        } else {
            T::from_count(k) / T::from_count(n_ends_bends)
        }
    };

    let step = cfg.resample_step_mm;
    let mut largest = T::zero();
    let mut smallest: Option<T> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dist = points[i].position.distance(&points[j].position);
            largest = largest.max(dist);
            if dist >= step {
                smallest = Some(smallest.map_or(dist, |s| s.min(dist)));
            }
        }
    }
    let smallest = smallest.ok_or_else(|| {
        Error::Degenerate(format!(
            "'{}': no feature-point pair is at least one resample step apart",
            d.id()
        ))
    })?;

    let main_form = main_form_diameter(d, &points);
    let aspects = ElementaryAspects {
        n_points: points.len(),
        n_ends_bends,
        n_ends,
        n_soft,
        n_corner,
        n_intersections,
        pct_soft: share(n_soft),
        pct_corner: share(n_corner),
        largest,
        smallest,
        main_form,
        lseg: (smallest * largest).sqrt(),
    };
    Ok(Extraction { points, aspects })
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Diameter of the feature points of the connected component with the
/// greatest total arc length. Polylines connect through crossings and
/// through coinciding endpoints.
fn main_form_diameter<T: Real>(d: &Drawing<T>, points: &[FeaturePoint<T>]) -> T {
    let lines = d.polylines();
    let mut sets = DisjointSet::new(lines.len());
    for p in points {
        if let FeatureSource::Crossing(a, b) = p.source {
            sets.union(a, b);
        }
    }
    let tol = T::lit(CLOSURE_TOLERANCE);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let touches = [lines[i].first(), lines[i].last()].iter().any(|e| {
                [lines[j].first(), lines[j].last()]
                    .iter()
                    .any(|f| e.distance(f) <= tol)
            });
            if touches {
                sets.union(i, j);
            }
        }
    }
    let mut length = vec![T::zero(); lines.len()];
    for (i, p) in lines.iter().enumerate() {
        let r = sets.find(i);
        length[r] += p.arc_length();
    }
    let mut main = 0;
    for r in 0..lines.len() {
        if length[r] > length[main] {
            main = r;
        }
    }
    let members: Vec<Point<T>> = points
        .iter()
        .filter(|p| {
            let owner = match p.source {
                FeatureSource::Polyline(i) => i,
                FeatureSource::Crossing(a, _) => a,
            };
            sets.find(owner) == main
        })
        .map(|p| p.position)
        .collect();
    let mut diameter = T::zero();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            diameter = diameter.max(members[i].distance(&members[j]));
        }
    }
    diameter
}
