//! Linear 1-norm soft-margin SVM.
//!
//! The dual
//!
//! ```text
//! max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j <x_i, x_j>
//! s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! is solved by sequential minimal optimisation, always updating the
//! maximal violating pair. The decision value of a drawing is
//! `<w, x> - b`, positive for the "large" class.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expressiveness::Aspect;
use crate::features::{InputVector, INPUT_LEN};
use crate::format;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmModel<T> {
    pub w: [T; INPUT_LEN],
    pub b: T,
    pub aspect: Aspect,
    pub c: T,
}

impl<T: Real> SvmModel<T> {
    /// `<w, x> - b`.
    pub fn decision(&self, x: &InputVector<T>) -> T {
        self.w
            .iter()
            .zip(x.values())
            .map(|(w, v)| *w * *v)
            .sum::<T>()
            - self.b
    }

    /// +1 for the large class, -1 otherwise.
    pub fn classify(&self, x: &InputVector<T>) -> i8 {
        if self.decision(x) > T::zero() {
            1
        } else {
            -1
        }
    }

    /// `svm <aspect> <C>`, then the twelve weights, then `b`.
    pub fn to_text(&self) -> String {
        let mut out = format!("svm {} {}\n", self.aspect, format::exact(self.c));
        let w: Vec<String> = self.w.iter().map(|v| format::exact(*v)).collect();
        let _ = writeln!(out, "{}", w.join(" "));
        let _ = writeln!(out, "{}", format::exact(self.b));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let err = |line, reason: String| Error::Parse { line, reason };
        let num = |line: usize, tok: &str| -> Result<T> {
            tok.parse::<T>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("invalid number '{tok}'")))
        };
        let [(hl, header), (wl, weights), (bl, bias)] = lines[..] else {
            return Err(err(
                lines.last().map_or(1, |l| l.0),
                format!("expected 3 non-empty lines, found {}", lines.len()),
            ));
        };
        let toks: Vec<&str> = header.split_whitespace().collect();
        let ["svm", aspect, c] = toks[..] else {
            return Err(err(
                hl,
                format!("expected 'svm <aspect> <C>', found '{header}'"),
            ));
        };
        let aspect: Aspect = aspect.parse().map_err(|e: Error| err(hl, e.to_string()))?;
        let c = num(hl, c)?;
        if c <= T::zero() {
            return Err(err(hl, format!("C must be positive, got {c}")));
        }
        let ws = weights
            .split_whitespace()
            .map(|t| num(wl, t))
            .collect::<Result<Vec<T>>>()?;
        if ws.len() != INPUT_LEN {
            return Err(err(
                wl,
                format!("expected {INPUT_LEN} weights, got {}", ws.len()),
            ));
        }
        let mut w = [T::zero(); INPUT_LEN];
        w.copy_from_slice(&ws);
        let b = match bias.split_whitespace().collect::<Vec<_>>()[..] {
            [b] => num(bl, b)?,
            _ => return Err(err(bl, format!("expected a single offset, found '{bias}'"))),
        };
        Ok(Self { w, b, aspect, c })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmTrainSet<T> {
    samples: Vec<(InputVector<T>, i8)>,
}

impl<T: Real> SvmTrainSet<T> {
    pub fn new(samples: Vec<(InputVector<T>, i8)>) -> Result<Self> {
        if let Some((_, y)) = samples.iter().find(|(_, y)| *y != 1 && *y != -1) {
            return Err(Error::InvalidArgument(format!("label {y} is not +1 or -1")));
        }
        let has = |l: i8| samples.iter().any(|(_, y)| *y == l);
        if !has(1) || !has(-1) {
            return Err(Error::InvalidArgument(
                "training set needs both +1 and -1 labels".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(InputVector<T>, i8)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Median of a sample, averaging the two middle values for even sizes.
pub fn median<T: Real>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    })
}

/// +1 above the median, -1 at or below it.
pub fn label_by_median<T: Real>(values: &[T]) -> Result<Vec<i8>> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 aspect values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "aspect values must be finite".into(),
        ));
    }
    let m = median(values).expect("non-empty");
    let labels: Vec<i8> = values.iter().map(|v| if *v > m { 1 } else { -1 }).collect();
    if labels.iter().all(|l| *l == -1) {
        return Err(Error::InvalidArgument(
            "aspect values do not split at the median (all equal or top-heavy ties)".into(),
        ));
    }
    Ok(labels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig<T> {
    pub c: T,
    /// Stop once the maximal KKT violation falls to this level.
    pub tolerance: T,
    /// Iteration cap, in passes over the training set.
    pub max_passes: usize,
}

impl<T: Real> Default for SvmConfig<T> {
    fn default() -> Self {
        Self {
            c: T::one(),
            tolerance: T::lit(1e-9),
            max_passes: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit<T> {
    pub model: SvmModel<T>,
    pub alphas: Vec<T>,
    pub iterations: usize,
    /// Maximal violating-pair gap at termination.
    pub kkt_gap: T,
    pub dual_objective: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `sum a - 1/2 a' Q a` with `Q_ij = y_i y_j <x_i, x_j>`.
pub fn dual_objective<T: Real>(set: &SvmTrainSet<T>, alphas: &[T]) -> T {
    let s = set.samples();
    let mut quad = T::zero();
    for i in 0..s.len() {
        for j in 0..s.len() {
            let yy = T::lit(f64::from(s[i].1 * s[j].1));
            quad += alphas[i] * alphas[j] * yy * dot(s[i].0.values(), s[j].0.values());
        }
    }
    alphas.iter().copied().sum::<T>() - quad * T::lit(0.5)
}

pub fn train_svm<T: Real>(set: &SvmTrainSet<T>, aspect: Aspect, c: T) -> Result<SvmModel<T>> {
    let cfg = SvmConfig {
        c,
        ..SvmConfig::default()
    };
    train_svm_with(set, aspect, &cfg).map(|f| f.model)
}

pub fn train_svm_with<T: Real>(
    set: &SvmTrainSet<T>,
    aspect: Aspect,
    cfg: &SvmConfig<T>,
) -> Result<SvmFit<T>> {
    let c = cfg.c;
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "C must be positive, got {c}"
        )));
    }
    let s = set.samples();
    let n = s.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let y: Vec<T> = s.iter().map(|(_, l)| T::lit(f64::from(*l))).collect();
    let k: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| dot(s[i].0.values(), s[j].0.values()))
                .collect()
        })
        .collect();
    let tau = T::lit(1e-12);
    let mut a = vec![T::zero(); n];
    let mut g = vec![-T::one(); n];
    let in_up = |a: T, y: T| (y > T::zero() && a < c) || (y < T::zero() && a > T::zero());
    let in_low = |a: T, y: T| (y > T::zero() && a > T::zero()) || (y < T::zero() && a < c);

    let max_iter = cfg.max_passes.saturating_mul(n);
    let mut iterations = 0;
    let gap = loop {
        let mut i = usize::MAX;
        let mut j = usize::MAX;
        let (mut gmax, mut gmin) = (T::neg_infinity(), T::infinity());
        for t in 0..n {
            let v = -y[t] * g[t];
            if in_up(a[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(a[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        let gap = if i == usize::MAX || j == usize::MAX {
            T::zero()
        } else {
            gmax - gmin
        };
        if gap <= cfg.tolerance {
            break gap;
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged {
                iterations,
                violation: gap.as_f64(),
            });
        }
        iterations += 1;

        let (old_i, old_j) = (a[i], a[j]);
        let quad = (k[i][i] + k[j][j] - k[i][j] - k[i][j]).max(tau);
        if y[i] != y[j] {
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > T::zero() {
                if a[j] < T::zero() {
                    a[j] = T::zero();
                    a[i] = diff;
                }
            } else if a[i] < T::zero() {
                a[i] = T::zero();
                a[j] = -diff;
            }
            if diff > T::zero() {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < T::zero() {
                a[j] = T::zero();
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < T::zero() {
                a[i] = T::zero();
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for t in 0..n {
            g[t] += y[t] * (y[i] * k[t][i] * di + y[j] * k[t][j] * dj);
        }
    };

    // Offset: mean of y_i G_i over free vectors, else midpoint of the
    // feasible interval.
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut free_sum, mut free_n) = (T::zero(), 0usize);
    for t in 0..n {
        let yg = y[t] * g[t];
        let upper = a[t] >= c;
        let lower = a[t] <= T::zero();
        if (upper && y[t] < T::zero()) || (lower && y[t] > T::zero()) {
            ub = ub.min(yg);
        } else if upper || lower {
            lb = lb.max(yg);
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let b = if free_n > 0 {
        free_sum / T::from_count(free_n)
    } else {
        (ub + lb) / T::lit(2.0)
    };

    let mut w = [T::zero(); INPUT_LEN];
    for (t, (x, _)) in s.iter().enumerate() {
        for (wi, xi) in w.iter_mut().zip(x.values()) {
            *wi += a[t] * y[t] * *xi;
        }
    }
    let dual = dual_objective(set, &a);
    Ok(SvmFit {
        model: SvmModel { w, b, aspect, c },
        alphas: a,
        iterations,
        kkt_gap: gap,
        dual_objective: dual,
    })
}

/// Largest per-sample violation of the KKT conditions of `fit`:
/// `a = 0 => y f >= 1`, `a = C => y f <= 1`, free `a => y f = 1`.
pub fn kkt_violation<T: Real>(set: &SvmTrainSet<T>, fit: &SvmFit<T>) -> T {
    let c = fit.model.c;
    set.samples()
        .iter()
        .zip(&fit.alphas)
        .map(|((x, y), a)| {
            let margin = T::lit(f64::from(*y)) * fit.model.decision(x);
            if *a <= T::zero() {
                (T::one() - margin).max(T::zero())
            } else if *a >= c {
                (margin - T::one()).max(T::zero())
            } else {
                (margin - T::one()).abs()
            }
        })
        .fold(T::zero(), T::max)
}
