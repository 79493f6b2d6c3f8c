//! Model inputs and targets.
//!
//! The input vector has twelve entries: eight composition values (half-plane
//! averages of the feature-point coordinates about the drawing centre and
//! their mean absolute deviations), the point count, L, S in tenths of a
//! millimetre, and the line diversity. The target vector holds the five
//! interpretation-dependent quantities.

use crate::drawing::{bounding_box, Drawing, Point};
use crate::error::{Error, Result};
use crate::geometry::{ElementaryAspects, FeaturePoint};
use crate::scalar::Real;

pub const INPUT_LEN: usize = 12;
pub const TARGET_LEN: usize = 5;

pub const INPUT_NAMES: [&str; INPUT_LEN] = [
    "avg_right",
    "avg_left",
    "avg_above",
    "avg_below",
    "dev_right",
    "dev_left",
    "dev_above",
    "dev_below",
    "n_points",
    "largest_mm",
    "smallest_0.1mm",
    "ldiv",
];

pub const TARGET_NAMES: [&str; TARGET_LEN] = [
    "ends_bends_ratio",
    "pct_soft",
    "pct_corner",
    "composition_type",
    "main_form_ratio",
];

/// Half-plane averages and mean absolute deviations, centre-relative (mm).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompositionSummary<T> {
    pub avg_right: T,
    pub avg_left: T,
    pub avg_above: T,
    pub avg_below: T,
    pub dev_right: T,
    pub dev_left: T,
    pub dev_above: T,
    pub dev_below: T,
}

impl<T: Real> CompositionSummary<T> {
    pub fn to_array(&self) -> [T; 8] {
        [
            self.avg_right,
            self.avg_left,
            self.avg_above,
            self.avg_below,
            self.dev_right,
            self.dev_left,
            self.dev_above,
            self.dev_below,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputVector<T>([T; INPUT_LEN]);

impl<T: Real> InputVector<T> {
    pub fn new(values: [T; INPUT_LEN]) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[T; INPUT_LEN] {
        &self.0
    }

    pub fn composition(&self) -> [T; 8] {
        let mut out = [T::zero(); 8];
        out.copy_from_slice(&self.0[..8]);
        out
    }

    pub fn n_points(&self) -> T {
        self.0[8]
    }

    pub fn largest(&self) -> T {
        self.0[9]
    }

    /// S in units of 0.1 mm.
    pub fn smallest_tenths(&self) -> T {
        self.0[10]
    }

    pub fn ldiv(&self) -> T {
        self.0[11]
    }

    /// Every entry multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        Self(self.0.map(|v| v * k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetVector<T>([T; TARGET_LEN]);

impl<T: Real> TargetVector<T> {
    pub fn new(values: [T; TARGET_LEN]) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[T; TARGET_LEN] {
        &self.0
    }

    /// #e / #p.
    pub fn ends_bends_ratio(&self) -> T {
        self.0[0]
    }

    pub fn pct_soft(&self) -> T {
        self.0[1]
    }

    pub fn pct_corner(&self) -> T {
        self.0[2]
    }

    pub fn composition_type(&self) -> T {
        self.0[3]
    }

    /// M / L.
    pub fn main_form_ratio(&self) -> T {
        self.0[4]
    }

    pub fn validate(&self) -> Result<()> {
        let unit = T::zero()..=T::one();
        if let Some(i) = self.0.iter().position(|v| !unit.contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "target t{} = {} outside [0, 1]",
                i + 1,
                self.0[i]
            )));
        }
        let t4 = self.composition_type();
        if !(T::lit(0.2)..=T::lit(0.8)).contains(&t4) {
            return Err(Error::InvalidArgument(format!(
                "composition type t4 = {t4} outside [0.2, 0.8]"
            )));
        }
        if self.pct_soft() + self.pct_corner() > T::one() {
            return Err(Error::InvalidArgument(format!(
                "t2 + t3 = {} exceeds 1",
                self.pct_soft() + self.pct_corner()
            )));
        }
        Ok(())
    }
}

/// Average and mean absolute deviation of a sample; `(0, 0)` when empty.
fn mean_and_mad<T: Real>(values: &[T]) -> (T, T) {
    if values.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let mad = values.iter().map(|v| (*v - mean).abs()).sum::<T>() / n;
    (mean, mad)
}

/// Reduces the feature-point configuration to eight composition values.
///
/// The centre is the bounding-box centre of the points. Points on a centre
/// line belong to neither adjacent half-plane.
pub fn composition_reduction<T: Real>(points: &[Point<T>]) -> CompositionSummary<T> {
    let Some((lo, hi)) = bounding_box(points.iter().copied()) else {
        return CompositionSummary::default();
    };
    let half = T::lit(0.5);
    let (cx, cy) = ((lo.x + hi.x) * half, (lo.y + hi.y) * half);
    let dx: Vec<T> = points.iter().map(|p| p.x - cx).collect();
    let dy: Vec<T> = points.iter().map(|p| p.y - cy).collect();
    let side = |d: &[T], positive: bool| -> Vec<T> {
        d.iter()
            .copied()
            .filter(|v| {
                if positive {
                    *v > T::zero()
                } else {
                    *v < T::zero()
                }
            })
            .collect()
    };
    let (avg_right, dev_right) = mean_and_mad(&side(&dx, true));
    let (avg_left, dev_left) = mean_and_mad(&side(&dx, false));
    let (avg_above, dev_above) = mean_and_mad(&side(&dy, true));
    let (avg_below, dev_below) = mean_and_mad(&side(&dy, false));
    CompositionSummary {
        avg_right,
        avg_left,
        avg_above,
        avg_below,
        dev_right,
        dev_left,
        dev_above,
        dev_below,
    }
}

pub fn composition_of_features<T: Real>(points: &[FeaturePoint<T>]) -> CompositionSummary<T> {
    let positions: Vec<Point<T>> = points.iter().map(|p| p.position).collect();
    composition_reduction(&positions)
}

pub fn assemble_input<T: Real>(
    d: &Drawing<T>,
    ea: &ElementaryAspects<T>,
    cs: &CompositionSummary<T>,
) -> InputVector<T> {
    let mut v = [T::zero(); INPUT_LEN];
    v[..8].copy_from_slice(&cs.to_array());
    v[8] = T::from_count(ea.n_points);
    v[9] = ea.largest;
    v[10] = T::lit(10.0) * ea.smallest;
    v[11] = d.ldiv();
    InputVector(v)
}

/// Portrait-to-landscape score of the vertex bounding box:
/// `clamp(0.5 + 0.3 * log2(width / height), 0.2, 0.8)`; 0.5 when the box
/// has no area.
pub fn composition_type<T: Real>(d: &Drawing<T>) -> T {
    let (lo, hi) = d.bounding_box();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let neutral = T::lit(0.5);
    if !(w > T::zero() && h > T::zero()) {
        return neutral;
    }
    (neutral + T::lit(0.3) * (w / h).log2())
        .max(T::lit(0.2))
        .min(T::lit(0.8))
}

/// Target vector computed from the geometry; replaced verbatim by the
/// drawing's hand targets when it carries them.
pub fn assemble_target<T: Real>(ea: &ElementaryAspects<T>, d: &Drawing<T>) -> TargetVector<T> {
    if let Some(t) = &d.annotations().hand_targets {
        return *t;
    }
    computed_target(ea, d)
}

/// Target vector from the geometry alone, ignoring any hand targets.
pub fn computed_target<T: Real>(ea: &ElementaryAspects<T>, d: &Drawing<T>) -> TargetVector<T> {
    TargetVector([
        T::from_count(ea.n_ends_bends) / T::from_count(ea.n_points),
        ea.pct_soft,
        ea.pct_corner,
        composition_type(d),
        ea.main_form / ea.largest,
    ])
}
