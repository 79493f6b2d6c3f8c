//! Expressiveness measures.
//!
//! Three looking-time style aspects are computed from the elementary
//! aspects:
//!
//! * (a) diffusion, small scale: `ldiv / lseg`
//! * (b) kinematic, large scale: `#e * (%s * lseg^(2/3) + %c * lseg^(2/5))`
//! * (c) nearness: `M * ldiv / S`
//!
//! with `lseg = sqrt(S * L)`. Lengths enter in millimetres. The same
//! formulas evaluated on model outputs give the predicted aspects.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::features::{InputVector, TargetVector};
use crate::geometry::ElementaryAspects;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aspect {
    A,
    B,
    C,
}

impl Aspect {
    pub const ALL: [Aspect; 3] = [Aspect::A, Aspect::B, Aspect::C];

    pub fn as_str(&self) -> &'static str {
        match self {
            Aspect::A => "a",
            Aspect::B => "b",
            Aspect::C => "c",
        }
    }
}

impl std::fmt::Display for Aspect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Aspect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Aspect::A),
            "b" => Ok(Aspect::B),
            "c" => Ok(Aspect::C),
            other => Err(Error::InvalidArgument(format!(
                "unknown aspect '{other}' (expected a, b or c)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectValues<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> AspectValues<T> {
    pub fn get(&self, aspect: Aspect) -> T {
        match aspect {
            Aspect::A => self.a,
            Aspect::B => self.b,
            Aspect::C => self.c,
        }
    }
}

pub fn aspect_a<T: Real>(ldiv: T, lseg: T) -> Result<T> {
    if !(lseg > T::zero()) {
        return Err(Error::Degenerate(format!(
            "l-segm must be positive, got {lseg}"
        )));
    }
    if !(ldiv > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "ldiv must be positive, got {ldiv}"
        )));
    }
    Ok(ldiv / lseg)
}

pub fn aspect_b<T: Real>(n_ends_bends: T, pct_soft: T, pct_corner: T, lseg: T) -> Result<T> {
    if !(lseg > T::zero()) {
        return Err(Error::Degenerate(format!(
            "l-segm must be positive, got {lseg}"
        )));
    }
    let soft = lseg.powf(T::lit(2.0) / T::lit(3.0));
    let corner = lseg.powf(T::lit(2.0) / T::lit(5.0));
    Ok(n_ends_bends * (pct_soft * soft + pct_corner * corner))
}

pub fn aspect_c<T: Real>(main_form: T, ldiv: T, smallest: T) -> Result<T> {
    if !(smallest > T::zero()) {
        return Err(Error::Degenerate(format!(
            "smallest distance must be positive, got {smallest}"
        )));
    }
    Ok(main_form * ldiv / smallest)
}

/// Aspects from directly measured (hand) values.
pub fn hand_aspects<T: Real>(ea: &ElementaryAspects<T>, ldiv: T) -> Result<AspectValues<T>> {
    Ok(AspectValues {
        a: aspect_a(ldiv, ea.lseg)?,
        b: aspect_b(
            T::from_count(ea.n_ends_bends),
            ea.pct_soft,
            ea.pct_corner,
            ea.lseg,
        )?,
        c: aspect_c(ea.main_form, ldiv, ea.smallest)?,
    })
}

/// Aspects reconstructed from an input vector and a (predicted) output
/// vector. (a) uses only the inputs.
pub fn aspects_from_outputs<T: Real>(
    input: &InputVector<T>,
    out: &TargetVector<T>,
) -> Result<AspectValues<T>> {
    let smallest = input.smallest_tenths() / T::lit(10.0);
    let largest = input.largest();
    let ldiv = input.ldiv();
    let lseg = (smallest * largest).sqrt();
    let n_ends_bends = out.ends_bends_ratio() * input.n_points();
    let main_form = out.main_form_ratio() * largest;
    Ok(AspectValues {
        a: aspect_a(ldiv, lseg)?,
        b: aspect_b(n_ends_bends, out.pct_soft(), out.pct_corner(), lseg)?,
        c: aspect_c(main_form, ldiv, smallest)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremeFlag {
    Low,
    Normal,
    High,
}

impl ExtremeFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremeFlag::Low => "low-extreme",
            ExtremeFlag::Normal => "normal",
            ExtremeFlag::High => "high-extreme",
        }
    }
}

pub const DEFAULT_LOW_PCT: f64 = 10.0;
pub const DEFAULT_HIGH_PCT: f64 = 90.0;

/// Flags values in the tails of the sample.
///
/// A value is low-extreme when it lies strictly below the nearest-rank
/// percentile at rank `floor(n * low_pct / 100) + 1`, i.e. at most
/// `low_pct` percent of the sample is less than or equal to it; the high tail
/// is the mirror image. Ties always share a flag, so a constant sample has no
/// extremes. Only ranks matter.
pub fn flag_extremes<T: Real>(values: &[T], low_pct: T, high_pct: T) -> Result<Vec<ExtremeFlag>> {
    if values.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 values to flag extremes, got {}",
            values.len()
        )));
    }
    let hundred = T::lit(100.0);
    if !(T::zero() < low_pct && low_pct < high_pct && high_pct < hundred) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < low_pct < high_pct < 100, got {low_pct} and {high_pct}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("values must be finite".into()));
    }
    let n = T::from_count(values.len());
    let low_budget = n * low_pct / hundred;
    let high_budget = n * (hundred - high_pct) / hundred;
    Ok(values
        .iter()
        .map(|v| {
            let at_or_below = T::from_count(values.iter().filter(|w| *w <= v).count());
            let at_or_above = T::from_count(values.iter().filter(|w| *w >= v).count());
            if at_or_below <= low_budget {
                ExtremeFlag::Low
            } else if at_or_above <= high_budget {
                ExtremeFlag::High
            } else {
                ExtremeFlag::Normal
            }
        })
        .collect())
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks<T: Real>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let avg = T::from_count(start + 1 + end) / T::lit(2.0);
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; `None` when either series is constant.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    assert_eq!(x.len(), y.len(), "series lengths differ");
    if x.len() < 2 {
        return None;
    }
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (*a - mx, *b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Result<LinearFit<T>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "linear fit needs two equally long series of at least 2 values".into(),
        ));
    }
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (a, b) in x.iter().zip(y) {
        sxy += (*a - mx) * (*b - my);
        sxx += (*a - mx) * (*a - mx);
        syy += (*b - my) * (*b - my);
    }
    if sxx == T::zero() {
        return Err(Error::InvalidArgument("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == T::zero() {
        T::one()
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Everything the trend analysis needs from one drawing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendSample<T> {
    pub aspects: ElementaryAspects<T>,
    pub values: AspectValues<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendEntry<T> {
    pub pair: &'static str,
    /// `None` when one of the series is constant.
    pub rho: Option<T>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport<T> {
    pub entries: Vec<TrendEntry<T>>,
}

impl<T: Real> TrendReport<T> {
    pub fn get(&self, pair: &str) -> Option<&TrendEntry<T>> {
        self.entries.iter().find(|e| e.pair == pair)
    }
}

pub const MIN_TREND_SAMPLES: usize = 5;

/// Spearman correlations of the aspect pairs used in the trend analysis.
pub fn correlation_trends<T: Real>(samples: &[TrendSample<T>]) -> Result<TrendReport<T>> {
    if samples.len() < MIN_TREND_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "trend analysis needs at least {MIN_TREND_SAMPLES} drawings, got {}",
            samples.len()
        )));
    }
    let col = |f: &dyn Fn(&TrendSample<T>) -> T| samples.iter().map(f).collect::<Vec<T>>();
    let n_e = col(&|s| T::from_count(s.aspects.n_ends_bends));
    let pct_s = col(&|s| s.aspects.pct_soft);
    let pct_c = col(&|s| s.aspects.pct_corner);
    let small = col(&|s| s.aspects.smallest);
    let large = col(&|s| s.aspects.largest);
    let inv_s = col(&|s| T::one() / s.aspects.smallest);
    let a = col(&|s| s.values.a);
    let b = col(&|s| s.values.b);
    let c = col(&|s| s.values.c);
    let pairs: [(&'static str, &[T], &[T]); 9] = [
        ("pct_soft~n_ends_bends", &pct_s, &n_e),
        ("pct_corner~n_ends_bends", &pct_c, &n_e),
        ("smallest~n_ends_bends", &small, &n_e),
        ("largest~n_ends_bends", &large, &n_e),
        ("a~inv_smallest", &a, &inv_s),
        ("c~inv_smallest", &c, &inv_s),
        ("b~largest", &b, &large),
        ("inv_smallest~largest", &inv_s, &large),
        ("a~b", &a, &b),
    ];
    Ok(TrendReport {
        entries: pairs
            .iter()
            .map(|(pair, x, y)| TrendEntry {
                pair,
                rho: spearman(x, y),
                n: samples.len(),
            })
            .collect(),
    })
}
