//! Three-layer perceptron: 12 inputs, 5 hidden cells, 5 outputs, Fermi
//! (logistic) activation in both layers and no bias units.
//!
//! Training is plain backpropagation on the squared error, one sample at a
//! time in corpus order unless batch updates are requested. Progress is
//! reported as the mean absolute deviation between outputs and targets.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{InputVector, TargetVector, INPUT_LEN, TARGET_LEN};
use crate::format;
use crate::scalar::Real;

pub const HIDDEN: usize = 5;

/// Starting input->hidden weights (x1000), identical for every hidden cell.
pub const PAPER_START_INPUT_ROW: [i32; INPUT_LEN] = [50, 50, 50, 50, 50, 50, 50, 50, 1, 1, 10, 10];

/// Starting hidden->output weights (x1000); rows are output cells.
pub const PAPER_START_OUTPUT: [[i32; HIDDEN]; TARGET_LEN] = [
    [1, 1, 1, 1, -1],
    [1, 1, 1, -1, 1],
    [1, 1, 1, -1, -1],
    [1, 1, -1, -1, -1],
    [1, -1, 1, -1, -1],
];

/// Published input->hidden weights after 5000 iterations (x1000); rows are
/// hidden cells.
pub const PAPER_FINAL_INPUT: [[i32; INPUT_LEN]; HIDDEN] = [
    [83, 327, 47, -36, 185, 158, 38, 34, 12, -21, -158, -2],
    [47, 43, 55, 46, 52, 50, 51, 50, 10, -53, -3, 21],
    [86, 81, 291, -63, -22, 9, 10, 27, -53, -13, -37, 158],
    [19, 69, 92, 96, -7, 36, 57, 58, 54, -10, -114, 64],
    [72, -16, 48, 139, 36, 32, 56, 65, -12, -16, 2, 226],
];

/// Published hidden->output weights after 5000 iterations (x1000); rows are
/// output cells.
pub const PAPER_FINAL_OUTPUT: [[i32; HIDDEN]; TARGET_LEN] = [
    [1737, 728, 912, 3656, -808],
    [867, 836, -3168, -665, 1831],
    [557, 1062, 1093, -1139, -2168],
    [3720, 1136, -1904, -535, 4],
    [1816, -1198, 5837, 228, -2136],
];

/// Logistic function `1 / (1 + e^-x)`.
pub fn fermi<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptronModel<T> {
    /// `[hidden][input]`
    pub w_in_hidden: [[T; INPUT_LEN]; HIDDEN],
    /// `[output][hidden]`
    pub w_hidden_out: [[T; HIDDEN]; TARGET_LEN],
}

/// Weight-shaped gradient of the squared error.
pub type Gradient<T> = PerceptronModel<T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardPass<T> {
    pub hidden: [T; HIDDEN],
    pub output: [T; TARGET_LEN],
}

fn milli<T: Real>(v: i32) -> T {
    T::lit(f64::from(v)) / T::lit(1000.0)
}

impl<T: Real> PerceptronModel<T> {
    pub fn zeros() -> Self {
        Self {
            w_in_hidden: [[T::zero(); INPUT_LEN]; HIDDEN],
            w_hidden_out: [[T::zero(); HIDDEN]; TARGET_LEN],
        }
    }

    /// Published starting weights.
    pub fn paper_start() -> Self {
        Self {
            w_in_hidden: [PAPER_START_INPUT_ROW.map(milli); HIDDEN],
            w_hidden_out: PAPER_START_OUTPUT.map(|r| r.map(milli)),
        }
    }

    /// Published weights after training.
    pub fn paper_final() -> Self {
        Self {
            w_in_hidden: PAPER_FINAL_INPUT.map(|r| r.map(milli)),
            w_hidden_out: PAPER_FINAL_OUTPUT.map(|r| r.map(milli)),
        }
    }

    /// Uniform weights in `[-0.5, 0.5)` from a seeded ChaCha stream.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Self::zeros();
        for w in m.weights_mut() {
            *w = T::lit(rng.gen::<f64>() - 0.5);
        }
        m
    }

    pub fn weights(&self) -> impl Iterator<Item = &T> {
        self.w_in_hidden
            .iter()
            .flatten()
            .chain(self.w_hidden_out.iter().flatten())
    }

    pub fn weights_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.w_in_hidden
            .iter_mut()
            .flatten()
            .chain(self.w_hidden_out.iter_mut().flatten())
    }

    pub fn forward(&self, x: &InputVector<T>) -> ForwardPass<T> {
        let x = x.values();
        let hidden = self
            .w_in_hidden
            .map(|row| fermi(row.iter().zip(x).map(|(w, v)| *w * *v).sum::<T>()));
        let output = self
            .w_hidden_out
            .map(|row| fermi(row.iter().zip(&hidden).map(|(w, h)| *w * *h).sum::<T>()));
        ForwardPass { hidden, output }
    }

    pub fn predict(&self, x: &InputVector<T>) -> TargetVector<T> {
        TargetVector::new(self.forward(x).output)
    }

    /// Gradient of `E = 1/2 * sum_k (out_k - t_k)^2` by backpropagation.
    pub fn gradient(&self, x: &InputVector<T>, target: &TargetVector<T>) -> Gradient<T> {
        let pass = self.forward(x);
        let mut g = Self::zeros();
        let mut delta_out = [T::zero(); TARGET_LEN];
        for k in 0..TARGET_LEN {
            let o = pass.output[k];
            delta_out[k] = (o - target.values()[k]) * o * (T::one() - o);
            for j in 0..HIDDEN {
                g.w_hidden_out[k][j] = delta_out[k] * pass.hidden[j];
            }
        }
        for j in 0..HIDDEN {
            let h = pass.hidden[j];
            let back: T = (0..TARGET_LEN)
                .map(|k| delta_out[k] * self.w_hidden_out[k][j])
                .sum();
            let delta = back * h * (T::one() - h);
            for (i, xi) in x.values().iter().enumerate() {
                g.w_in_hidden[j][i] = delta * *xi;
            }
        }
        g
    }

    /// Squared-error loss of one sample.
    pub fn loss(&self, x: &InputVector<T>, target: &TargetVector<T>) -> T {
        let out = self.forward(x).output;
        out.iter()
            .zip(target.values())
            .map(|(o, t)| (*o - *t) * (*o - *t))
            .sum::<T>()
            * T::lit(0.5)
    }

    fn step(&mut self, g: &Gradient<T>, rate: T) {
        for (w, d) in self.weights_mut().zip(g.weights()) {
            *w -= rate * *d;
        }
    }

    /// Text model file: header `perceptron 12 5 5`, five rows of twelve
    /// input->hidden weights, then five rows of five hidden->output weights.
    pub fn to_text(&self) -> String {
        let mut out = format!("perceptron {INPUT_LEN} {HIDDEN} {TARGET_LEN}\n");
        let row = |r: &[T]| {
            r.iter()
                .map(|v| format::exact(*v))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for r in &self.w_in_hidden {
            let _ = writeln!(out, "{}", row(r));
        }
        for r in &self.w_hidden_out {
            let _ = writeln!(out, "{}", row(r));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line, reason: String| Error::Parse { line, reason };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty model file".into()))?;
        let expected = format!("perceptron {INPUT_LEN} {HIDDEN} {TARGET_LEN}");
        if header.split_whitespace().collect::<Vec<_>>().join(" ") != expected {
            return Err(err(
                hl,
                format!("expected header '{expected}', found '{header}'"),
            ));
        }
        let mut read_row = |width: usize| -> Result<Vec<T>> {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| err(0, "model file ends early".into()))?;
            let vals = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<T>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(ln, format!("invalid weight '{t}'")))
                })
                .collect::<Result<Vec<T>>>()?;
            if vals.len() != width {
                return Err(err(
                    ln,
                    format!("expected {width} weights, got {}", vals.len()),
                ));
            }
            Ok(vals)
        };
        let mut m = Self::zeros();
        for r in m.w_in_hidden.iter_mut() {
            r.copy_from_slice(&read_row(INPUT_LEN)?);
        }
        for r in m.w_hidden_out.iter_mut() {
            r.copy_from_slice(&read_row(HIDDEN)?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "unexpected trailing content".into()));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Paper,
    Random(u64),
}

impl Init {
    pub fn model<T: Real>(&self) -> PerceptronModel<T> {
        match self {
            Init::Paper => PerceptronModel::paper_start(),
            Init::Random(seed) => PerceptronModel::random(*seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    /// One step per sample, in set order.
    PerSample,
    /// One step per epoch with the mean gradient.
    Batch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    pub learning_rate: T,
    pub init: Init,
    pub update: Update,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            epochs: 5000,
            learning_rate: T::lit(0.5),
            init: Init::Paper,
            update: Update::PerSample,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport<T> {
    /// Mean absolute deviation after each epoch.
    pub deviations: Vec<T>,
    pub model: PerceptronModel<T>,
}

impl<T: Real> TrainReport<T> {
    pub fn first_deviation(&self) -> T {
        self.deviations[0]
    }

    pub fn final_deviation(&self) -> T {
        *self.deviations.last().expect("at least one epoch")
    }
}

pub type Sample<T> = (InputVector<T>, TargetVector<T>);

pub fn train<T: Real>(set: &[Sample<T>], cfg: &TrainConfig<T>) -> Result<TrainReport<T>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    if !(cfg.learning_rate >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be non-negative, got {}",
            cfg.learning_rate
        )));
    }
    let mut model = cfg.init.model::<T>();
    model
        .train_from(set, cfg)
        .map(|deviations| TrainReport { deviations, model })
}

impl<T: Real> PerceptronModel<T> {
    /// Continues training `self` in place; returns per-epoch deviations.
    pub fn train_from(&mut self, set: &[Sample<T>], cfg: &TrainConfig<T>) -> Result<Vec<T>> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut deviations = Vec::with_capacity(cfg.epochs);
        for _ in 0..cfg.epochs {
            match cfg.update {
                Update::PerSample => {
                    for (x, t) in set {
                        let g = self.gradient(x, t);
                        self.step(&g, cfg.learning_rate);
                    }
                }
                Update::Batch => {
                    let mut total = Self::zeros();
                    for (x, t) in set {
                        let g = self.gradient(x, t);
                        for (acc, d) in total.weights_mut().zip(g.weights()) {
                            *acc += *d;
                        }
                    }
                    self.step(&total, cfg.learning_rate / T::from_count(set.len()));
                }
            }
            deviations.push(evaluate(self, set)?);
        }
        Ok(deviations)
    }
}

/// Mean over samples and output cells of `|out - target|`.
pub fn evaluate<T: Real>(m: &PerceptronModel<T>, set: &[Sample<T>]) -> Result<T> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let total: T = set
        .iter()
        .map(|(x, t)| {
            m.forward(x)
                .output
                .iter()
                .zip(t.values())
                .map(|(o, t)| (*o - *t).abs())
                .sum::<T>()
        })
        .sum();
    Ok(total / T::from_count(set.len() * TARGET_LEN))
}
