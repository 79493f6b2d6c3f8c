//! Seeded generator of synthetic line drawings.
//!
//! Each polyline is a random walk of straight segments joined by turns. A
//! turn is either a corner (an exact kink of 60 to 120 degrees by default)
//! or a soft curve (a circular arc sampled at the resample step, so every
//! arc vertex turns by roughly `step / radius`). Optional zigzags add short
//! runs of alternating corners. The generator records how many corners,
//! curves and crossings it intended so measurements can be checked against
//! ground truth.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drawing::{Annotations, Content, Drawing, Point, Polyline};
use crate::error::{Error, Result};
use crate::expressiveness::{hand_aspects, AspectValues};
use crate::geometry::{elementary_aspects, find_intersections, ElementaryAspects, GeometryConfig};
use crate::scalar::Real;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, name: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(Error::Infeasible(format!(
                "{name} range [{}, {}] must be positive and non-empty",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }

    fn lerp(&self, u: f64) -> f64 {
        self.lo + (self.hi - self.lo) * u
    }

    /// Geometric interpolation from `hi` (u = 0) down to `lo` (u = 1).
    fn shrink(&self, u: f64) -> f64 {
        self.hi * (self.lo / self.hi).powf(u)
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count {
    pub lo: usize,
    pub hi: usize,
}

impl Count {
    pub const fn new(lo: usize, hi: usize) -> Self {
        Self { lo, hi }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.gen_range(self.lo..=self.hi)
    }

    fn lerp(&self, u: f64, jitter: f64) -> usize {
        let v = self.lo as f64 + (self.hi - self.lo) as f64 * u + jitter;
        (v.round().max(self.lo as f64) as usize).min(self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub count: usize,
    pub id_prefix: String,
    pub polylines: Count,
    /// Turns (corners or curves) per polyline.
    pub turns: Count,
    pub segment_mm: Span,
    /// Per-drawing probability that a turn is a soft curve rather than a
    /// corner, drawn uniformly from this range.
    pub soft_fraction: (f64, f64),
    pub corner_deg: Span,
    pub arc_radius_mm: Span,
    pub arc_sweep_deg: Span,
    /// Probability that a polyline carries a zigzag.
    pub zigzag_probability: f64,
    pub zigzag_mm: Span,
    /// Long side of the canvas.
    pub canvas_mm: Span,
    /// Width over height.
    pub aspect_ratio: Span,
    pub ldiv: Span,
    /// Regenerate a drawing until it has at least this many crossings.
    pub min_crossings: usize,
    pub resample_step_mm: f64,
    /// Couple drawing size, bend count and fine detail to one latent
    /// variable: larger drawings get more bends and a smaller smallest
    /// distance.
    pub trend_mode: bool,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            count: 30,
            id_prefix: "d".into(),
            polylines: Count::new(2, 5),
            turns: Count::new(1, 5),
            segment_mm: Span::new(8.0, 35.0),
            soft_fraction: (0.2, 0.6),
            corner_deg: Span::new(60.0, 120.0),
            arc_radius_mm: Span::new(3.0, 7.0),
            arc_sweep_deg: Span::new(40.0, 150.0),
            zigzag_probability: 0.3,
            zigzag_mm: Span::new(2.0, 6.0),
            canvas_mm: Span::new(60.0, 200.0),
            aspect_ratio: Span::new(0.5, 2.0),
            ldiv: Span::new(1.0, 10.0),
            min_crossings: 0,
            resample_step_mm: 1.0,
            trend_mode: false,
        }
    }
}

const MAX_ATTEMPTS: usize = 200;

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Infeasible("count must be at least 1".into()));
        }
        if self.id_prefix.is_empty()
            || self
                .id_prefix
                .chars()
                .any(|c| c.is_whitespace() || c == '#' || c == ',')
        {
            return Err(Error::Infeasible(format!(
                "bad id prefix '{}'",
                self.id_prefix
            )));
        }
        if self.polylines.lo == 0 || self.polylines.lo > self.polylines.hi {
            return Err(Error::Infeasible(
                "polyline count range must be non-empty and positive".into(),
            ));
        }
        if self.turns.lo > self.turns.hi {
            return Err(Error::Infeasible("turn count range is empty".into()));
        }
        self.segment_mm.check("segment length")?;
        self.corner_deg.check("corner angle")?;
        self.arc_radius_mm.check("arc radius")?;
        self.arc_sweep_deg.check("arc sweep")?;
        self.zigzag_mm.check("zigzag segment")?;
        self.canvas_mm.check("canvas")?;
        self.aspect_ratio.check("aspect ratio")?;
        self.ldiv.check("ldiv")?;
        if self.corner_deg.hi >= 180.0 || self.arc_sweep_deg.hi >= 360.0 {
            return Err(Error::Infeasible(
                "turn angles must stay below a full reversal".into(),
            ));
        }
        let (s_lo, s_hi) = self.soft_fraction;
        for (name, p) in [
            ("soft fraction", s_lo),
            ("soft fraction", s_hi),
            ("zigzag probability", self.zigzag_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Infeasible(format!("{name} {p} outside [0, 1]")));
            }
        }
        if s_lo > s_hi {
            return Err(Error::Infeasible("soft fraction range is empty".into()));
        }
        if !(self.resample_step_mm > 0.0) {
            return Err(Error::Infeasible("resample step must be positive".into()));
        }
        if self.min_crossings > 0 && self.trend_mode {
            return Err(Error::Infeasible(
                "trend mode draws non-crossing lanes".into(),
            ));
        }
        if self.min_crossings > 0 && self.polylines.hi < 2 {
            return Err(Error::Infeasible(format!(
                "{} forced crossing(s) need at least 2 polylines",
                self.min_crossings
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> GeometryConfig<f64> {
        GeometryConfig {
            resample_step_mm: self.resample_step_mm,
            ..GeometryConfig::default()
        }
    }
}

/// Ground truth the generator intended for one drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct GenMeta {
    pub id: String,
    pub polylines: usize,
    pub corners: usize,
    pub soft_curves: usize,
    pub crossings: usize,
    pub zigzags: usize,
    /// Latent size variable in `[0, 1]`.
    pub latent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus<T> {
    pub drawings: Vec<Drawing<T>>,
    pub meta: Vec<GenMeta>,
}

struct Walker<'a, R> {
    rng: &'a mut R,
    pos: (f64, f64),
    heading: f64,
    centre: (f64, f64),
    points: Vec<(f64, f64)>,
}

impl<R: Rng> Walker<'_, R> {
    fn forward(&mut self, len: f64) {
        self.pos.0 += len * self.heading.cos();
        self.pos.1 += len * self.heading.sin();
        self.points.push(self.pos);
    }

    /// +1 or -1, preferring the side that turns toward the canvas centre.
    fn steer(&mut self) -> f64 {
        let to_centre = (self.centre.1 - self.pos.1).atan2(self.centre.0 - self.pos.0);
        let diff = (to_centre - self.heading + PI).rem_euclid(2.0 * PI) - PI;
        let preferred = if diff >= 0.0 { 1.0 } else { -1.0 };
        if self.rng.gen_bool(0.75) {
            preferred
        } else {
            -preferred
        }
    }

    fn corner(&mut self, deg: f64, sign: f64) {
        self.heading += sign * deg.to_radians();
    }

    /// Arc of `n >= 2` chords; interior vertices turn by `sweep / n`.
    fn arc(&mut self, radius: f64, sweep_deg: f64, step: f64, sign: f64) {
        let sweep = sweep_deg.to_radians();
        // Chords no longer than the step, so resampling adds no flat vertices.
        let n = ((radius * sweep / step).ceil() as usize).max(2);
        let delta = sweep / n as f64;
        let chord = 2.0 * radius * (delta / 2.0).sin();
        for _ in 0..n {
            self.heading += sign * delta / 2.0;
            self.forward(chord);
            self.heading += sign * delta / 2.0;
        }
    }
}

struct Generated {
    lines: Vec<Vec<(f64, f64)>>,
    corners: usize,
    soft: usize,
    zigzags: usize,
}

impl Generated {
    fn new(n_lines: usize) -> Self {
        Self {
            lines: Vec::with_capacity(n_lines),
            corners: 0,
            soft: 0,
            zigzags: 0,
        }
    }

    /// Distinct primitive types: straight always, plus arcs and zigzags.
    fn kinds(&self) -> usize {
        1 + usize::from(self.soft > 0) + usize::from(self.zigzags > 0)
    }
}

fn soft_probability(spec: &GenSpec, rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = spec.soft_fraction;
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Free random walks anywhere on the canvas; lines may cross.
fn draw_free(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Generated {
    let long_side = spec.canvas_mm.sample(rng);
    let ratio = (spec.aspect_ratio.lo.ln()
        + rng.gen::<f64>() * (spec.aspect_ratio.hi.ln() - spec.aspect_ratio.lo.ln()))
    .exp();
    let (w, h) = if ratio >= 1.0 {
        (long_side, long_side / ratio)
    } else {
        (long_side * ratio, long_side)
    };
    let seg_scale = long_side / ((spec.canvas_mm.lo + spec.canvas_mm.hi) / 2.0);
    let n_lines = spec.polylines.sample(rng);
    let soft_p = soft_probability(spec, rng);
    let mut out = Generated::new(n_lines);
    for _ in 0..n_lines {
        let turns = spec.turns.sample(rng);
        let zigzag_len = rng
            .gen_bool(spec.zigzag_probability)
            .then(|| spec.zigzag_mm.sample(rng));
        let zigzag_at = zigzag_len.map(|_| rng.gen_range(0..=turns));
        let start = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let heading = rng.gen_range(0.0..2.0 * PI);
        let mut walker = Walker {
            rng: &mut *rng,
            pos: start,
            heading,
            centre: (w / 2.0, h / 2.0),
            points: vec![start],
        };
        for t in 0..=turns {
            let len = spec.segment_mm.sample(walker.rng) * seg_scale;
            walker.forward(len);
            if let (Some(z), true) = (zigzag_len, zigzag_at == Some(t)) {
                let sign = walker.steer();
                for k in 0..3 {
                    let s = if k % 2 == 0 { sign } else { -sign };
                    let deg = spec.corner_deg.sample(walker.rng);
                    walker.corner(deg, s);
                    walker.forward(z);
                }
                let deg = spec.corner_deg.sample(walker.rng);
                walker.corner(deg, sign);
                let len = spec.segment_mm.sample(walker.rng) * seg_scale;
                walker.forward(len);
                out.corners += 4;
                out.zigzags += 1;
            }
            if t == turns {
                break;
            }
            if walker.rng.gen_bool(soft_p) {
                let r = spec.arc_radius_mm.sample(walker.rng);
                let sweep = spec.arc_sweep_deg.sample(walker.rng);
                let sign = walker.steer();
                walker.arc(r, sweep, spec.resample_step_mm, sign);
                out.soft += 1;
            } else {
                let deg = spec.corner_deg.sample(walker.rng);
                let sign = walker.steer();
                walker.corner(deg, sign);
                out.corners += 1;
            }
        }
        out.lines.push(walker.points);
    }
    out
}

/// Trend mode: every polyline is an x-monotone meander in its own lane, so
/// nothing crosses and the closest feature pair is the fine-detail zigzag of
/// the first line. Its spacing shrinks while the line and bend counts (and
/// with them L) grow with the latent variable. Headings alternate between `+h` and `-h`
/// with `h` half a corner angle; a soft curve sweeps between the same two
/// headings. The canvas and arc sweep ranges are not used.
fn draw_trend(spec: &GenSpec, rng: &mut ChaCha8Rng, latent: f64) -> Generated {
    let n_lines = spec.polylines.lerp(latent, rng.gen_range(-0.5..0.5));
    let soft_p = soft_probability(spec, rng);
    let detail = spec.zigzag_mm.shrink(latent);
    let half = Span::new(spec.corner_deg.lo / 2.0, spec.corner_deg.hi / 2.0);
    let lane_gap = 2.0 * spec.segment_mm.hi + detail;
    let mut out = Generated::new(n_lines);
    for line in 0..n_lines {
        let turns = spec.turns.lerp(latent, rng.gen_range(-0.5..0.5));
        let zigzag_at = (line == 0).then(|| rng.gen_range(0..=turns));
        let start = (
            rng.gen_range(0.0..spec.segment_mm.lo),
            line as f64 * lane_gap,
        );
        let mut sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut h = half.sample(rng);
        let mut walker = Walker {
            rng: &mut *rng,
            pos: start,
            heading: sign * h.to_radians(),
            centre: (0.0, 0.0),
            points: vec![start],
        };
        let mut flip = |walker: &mut Walker<'_, ChaCha8Rng>| {
            let next = half.sample(walker.rng);
            let turn = h + next;
            sign = -sign;
            h = next;
            (turn, sign)
        };
        for t in 0..=turns {
            let len = spec.segment_mm.sample(walker.rng);
            walker.forward(len);
            if zigzag_at == Some(t) {
                for _ in 0..3 {
                    let (turn, s) = flip(&mut walker);
                    walker.corner(turn, s);
                    walker.forward(detail);
                }
                let (turn, s) = flip(&mut walker);
                walker.corner(turn, s);
                let len = spec.segment_mm.sample(walker.rng);
                walker.forward(len);
                out.corners += 4;
                out.zigzags += 1;
            }
            if t == turns {
                break;
            }
            let (turn, s) = flip(&mut walker);
            if walker.rng.gen_bool(soft_p) {
                let r = spec.arc_radius_mm.sample(walker.rng);
                walker.arc(r, turn, spec.resample_step_mm, s);
                out.soft += 1;
            } else {
                walker.corner(turn, s);
                out.corners += 1;
            }
        }
        out.lines.push(walker.points);
    }
    out
}

fn build<T: Real>(
    id: String,
    lines: &[Vec<(f64, f64)>],
    ldiv: f64,
    content: Content,
) -> Result<Drawing<T>> {
    let polylines = lines
        .iter()
        .map(|l| {
            Polyline::new(
                l.iter()
                    .map(|&(x, y)| Point::new(T::lit(x), T::lit(y)))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Drawing::new(
        id,
        polylines,
        Annotations {
            ldiv: T::lit(ldiv),
            content,
            hand_targets: None,
        },
    )
}

/// Generates a corpus; identical specs give identical corpora.
pub fn generate<T: Real>(spec: &GenSpec) -> Result<Corpus<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let geo = GeometryConfig::<T> {
        resample_step_mm: T::lit(spec.resample_step_mm),
        ..GeometryConfig::default()
    };
    let width = spec.count.to_string().len().max(3);
    let mut corpus = Corpus {
        drawings: Vec::with_capacity(spec.count),
        meta: Vec::with_capacity(spec.count),
    };
    for i in 0..spec.count {
        let id = format!("{}{:0width$}", spec.id_prefix, i, width = width);
        let latent = if spec.trend_mode {
            (i as f64 + rng.gen::<f64>()) / spec.count as f64
        } else {
            rng.gen::<f64>()
        };
        let mut attempt = 0;
        let (drawing, meta) = loop {
            attempt += 1;
            if attempt > MAX_ATTEMPTS {
                return Err(Error::Infeasible(format!(
                    "could not generate '{id}' with at least {} crossing(s) in {MAX_ATTEMPTS} attempts",
                    spec.min_crossings
                )));
            }
            let g = if spec.trend_mode {
                draw_trend(spec, &mut rng, latent)
            } else {
                draw_free(spec, &mut rng)
            };
            // Within its band, ldiv follows the latent size in trend mode.
            let offset = if spec.trend_mode {
                latent
            } else {
                rng.gen::<f64>()
            };
            let band = (g.kinds() - 1) as f64 + offset;
            let ldiv = spec.ldiv.lerp(band / 3.0);
            let content = match rng.gen_range(0..3) {
                0 => Content::Theory,
                1 => Content::Setup,
                _ => Content::Both,
            };
            let d: Drawing<T> = match build(id.clone(), &g.lines, ldiv, content) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let crossings = find_intersections(&d).len();
            let stray = spec.trend_mode && crossings > 0;
            if stray || crossings < spec.min_crossings || elementary_aspects(&d, &geo).is_err() {
                continue;
            }
            let meta = GenMeta {
                id: id.clone(),
                polylines: g.lines.len(),
                corners: g.corners,
                soft_curves: g.soft,
                crossings,
                zigzags: g.zigzags,
                latent,
            };
            break (d, meta);
        };
        corpus.drawings.push(drawing);
        corpus.meta.push(meta);
    }
    Ok(corpus)
}

/// Base corpus plus drawings injected at the extremes of (a) and (b).
#[derive(Debug, Clone, PartialEq)]
pub struct Injection<T> {
    pub drawings: Vec<Drawing<T>>,
    pub high_a: Vec<String>,
    pub low_a: Vec<String>,
    pub high_b: Vec<String>,
    pub low_b: Vec<String>,
}

impl<T> Injection<T> {
    pub fn injected_a(&self) -> Vec<String> {
        self.high_a.iter().chain(&self.low_a).cloned().collect()
    }

    pub fn injected_b(&self) -> Vec<String> {
        self.high_b.iter().chain(&self.low_b).cloned().collect()
    }
}

pub const MIN_INJECTION_BASE: usize = 10;

/// Index of the sample whose value has the middle rank.
fn median_index<T: Real>(values: &[T]) -> usize {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite"));
    order[values.len() / 2]
}

/// Adds `k` drawings with extreme (a) and `k` with extreme (b), alternating
/// high and low (high first). Every injected value lies beyond the whole
/// base range, and the aspect not being targeted is held at the base median
/// so each injected drawing is extreme in one aspect only.
pub fn extreme_injection<T: Real>(
    base: &[Drawing<T>],
    k: usize,
    cfg: &GeometryConfig<T>,
) -> Result<Injection<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if base.len() < MIN_INJECTION_BASE {
        return Err(Error::InvalidArgument(format!(
            "extreme injection needs a base corpus of at least {MIN_INJECTION_BASE}, got {}",
            base.len()
        )));
    }
    let measured: Vec<(ElementaryAspects<T>, AspectValues<T>)> = base
        .iter()
        .map(|d| {
            let ea = elementary_aspects(d, cfg)?;
            Ok((ea, hand_aspects(&ea, d.ldiv())?))
        })
        .collect::<Result<_>>()?;
    let a: Vec<T> = measured.iter().map(|m| m.1.a).collect();
    let b: Vec<T> = measured.iter().map(|m| m.1.b).collect();
    let fold = |v: &[T], f: fn(T, T) -> T, init: T| v.iter().copied().fold(init, f);
    let (a_min, a_max) = (
        fold(&a, T::min, T::infinity()),
        fold(&a, T::max, T::neg_infinity()),
    );
    let (b_min, b_max) = (
        fold(&b, T::min, T::infinity()),
        fold(&b, T::max, T::neg_infinity()),
    );
    let a_med = a[median_index(&a)];
    let b_med_drawing = &base[median_index(&b)];
    let b_med_lseg = measured[median_index(&b)].0.lseg;
    let max_e = measured.iter().map(|m| m.0.n_ends_bends).max().unwrap_or(0);
    let factor = T::lit(4.0);

    let mut out = Injection {
        drawings: base.to_vec(),
        high_a: Vec::new(),
        low_a: Vec::new(),
        high_b: Vec::new(),
        low_b: Vec::new(),
    };
    for j in 0..k {
        let high = j % 2 == 0;
        // (a) = ldiv / lseg: retune ldiv on the median-(b) drawing.
        let target_a = if high { a_max * factor } else { a_min / factor };
        let id = format!("inj_a_{}_{j}", if high { "high" } else { "low" });
        let d = b_med_drawing
            .with_id(&id)?
            .with_ldiv(target_a * b_med_lseg)?;
        out.drawings.push(d);
        if high {
            &mut out.high_a
        } else {
            &mut out.low_a
        }
        .push(id);
    }
    for j in 0..k {
        let high = j % 2 == 0;
        let id = format!("inj_b_{}_{j}", if high { "high" } else { "low" });
        let d = if high {
            high_b_drawing(&id, max_e, b_max * factor, cfg)?
        } else {
            if !(b_min > T::zero()) {
                return Err(Error::Infeasible(
                    "base corpus already contains a bend-free drawing; no lower (b) exists".into(),
                ));
            }
            let len = measured[median_index(&b)].0.largest;
            build::<T>(
                id.clone(),
                &[vec![(0.0, 0.0), (len.as_f64(), 0.0)]],
                1.0,
                Content::Setup,
            )?
        };
        // Hold (a) at the base median.
        let lseg = elementary_aspects(&d, cfg)?.lseg;
        out.drawings.push(d.with_ldiv(a_med * lseg)?);
        if high {
            &mut out.high_b
        } else {
            &mut out.low_b
        }
        .push(id);
    }
    Ok(out)
}

/// Square-wave meander with more corners than any base drawing and (b)
/// above `min_b`.
fn high_b_drawing<T: Real>(
    id: &str,
    base_max_e: usize,
    min_b: T,
    cfg: &GeometryConfig<T>,
) -> Result<Drawing<T>> {
    let seg = 10.0 * cfg.resample_step_mm.as_f64();
    let mut corners = base_max_e + 2;
    for _ in 0..32 {
        let mut pts = vec![(0.0, 0.0)];
        let (mut x, mut y) = (0.0, 0.0);
        let mut up = true;
        // Each period: right, vertical, right; two corners per vertical.
        let mut made = 0;
        while made < corners {
            x += seg;
            pts.push((x, y));
            y += if up { seg } else { -seg };
            pts.push((x, y));
            up = !up;
            made += 2;
        }
        x += seg;
        pts.push((x, y));
        let d = build::<T>(id.to_string(), &[pts], 1.0, Content::Setup)?;
        let ea = elementary_aspects(&d, cfg)?;
        let b = hand_aspects(&ea, T::one())?.b;
        if ea.n_ends_bends > base_max_e && b > min_b {
            return Ok(d);
        }
        corners *= 2;
    }
    Err(Error::Infeasible(
        "could not build a high-(b) drawing".into(),
    ))
}
