use expresso::expressiveness::Aspect;
use expresso::features::InputVector;
use expresso::svm::{dual_objective, kkt_violation, train_svm_with, SvmConfig, SvmTrainSet};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn separable_set(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SvmTrainSet<f64> {
    let w: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let b = rng.gen_range(-0.5..0.5);
    loop {
        let mut samples = Vec::new();
        while samples.len() < n {
            let x: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0) * scale);
            let f: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - b * scale;
            if f.abs() > 0.3 * scale {
                samples.push((InputVector::new(x), if f > 0.0 { 1 } else { -1 }));
            }
        }
        if let Ok(set) = SvmTrainSet::new(samples) {
            return set;
        }
    }
}

/// Best dual objective over every {0, C, free} assignment, solving the
/// equality-constrained stationarity system for the free multipliers.
fn brute_force_dual(set: &SvmTrainSet<f64>, c: f64) -> f64 {
    let s = set.samples();
    let n = s.len();
    let y: Vec<f64> = s.iter().map(|(_, l)| f64::from(*l)).collect();
    let q = DMatrix::from_fn(n, n, |i, j| {
        y[i] * y[j]
            * s[i]
                .0
                .values()
                .iter()
                .zip(s[j].0.values())
                .map(|(a, b)| a * b)
                .sum::<f64>()
    });
    let objective = |a: &DVector<f64>| a.sum() - 0.5 * (a.transpose() * &q * a)[(0, 0)];
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut a = DVector::from_fn(n, |i, _| if state[i] == 1 { c } else { 0.0 });
        if !free.is_empty() {
            let m = free.len();
            let mut lhs = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (k, &j) in free.iter().enumerate() {
                    lhs[(r, k)] = q[(i, j)];
                }
                lhs[(r, m)] = y[i];
                lhs[(m, r)] = y[i];
                let fixed: f64 = (0..n)
                    .filter(|j| state[*j] != 2)
                    .map(|j| q[(i, j)] * a[j])
                    .sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[m] = -(0..n)
                .filter(|j| state[*j] != 2)
                .map(|j| y[j] * a[j])
                .sum::<f64>();
            let Some(sol) = lhs.lu().solve(&rhs) else {
                continue;
            };
            for (r, &i) in free.iter().enumerate() {
                a[i] = sol[r];
            }
        }
        let feasible = a.iter().all(|v| *v >= -1e-9 && *v <= c + 1e-9)
            && (0..n).map(|i| y[i] * a[i]).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.max(objective(&a));
        }
    }
    best
}

#[test]
fn dual_matches_brute_force_qp() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = 10.0;
    for case in 0..20 {
        let set = separable_set(&mut rng, 6, 1.0);
        let cfg = SvmConfig {
            c,
            ..SvmConfig::default()
        };
        let fit = train_svm_with(&set, Aspect::B, &cfg).unwrap();
        let oracle = brute_force_dual(&set, c);
        assert!(
            (fit.dual_objective - oracle).abs() <= 1e-3,
            "case {case}: {} vs {oracle}",
            fit.dual_objective
        );
        assert!((dual_objective(&set, &fit.alphas) - fit.dual_objective).abs() < 1e-9);
        assert!(kkt_violation(&set, &fit) <= 1e-6, "case {case}");
        assert!(fit.alphas.iter().all(|a| (0.0..=c).contains(a)));
        for (x, y) in set.samples() {
            assert_eq!(fit.model.classify(x), *y, "case {case}");
        }
    }
}

#[test]
fn hard_margin_regime_reaches_unit_margins() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let set = separable_set(&mut rng, 12, 1.0);
        let cfg = SvmConfig {
            c: 1e3,
            ..SvmConfig::default()
        };
        let fit = train_svm_with(&set, Aspect::A, &cfg).unwrap();
        for (x, y) in set.samples() {
            assert!(f64::from(*y) * fit.model.decision(x) >= 1.0 - 1e-6);
        }
    }
}

#[test]
fn input_scaling_keeps_training_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in [0.1, 3.0, 25.0] {
        let set = separable_set(&mut rng, 10, 1.0);
        let scaled = SvmTrainSet::new(
            set.samples()
                .iter()
                .map(|(x, y)| (x.scaled(k), *y))
                .collect(),
        )
        .unwrap();
        let cfg = SvmConfig {
            c: 1e3,
            ..SvmConfig::default()
        };
        let a = train_svm_with(&set, Aspect::C, &cfg).unwrap().model;
        let b = train_svm_with(&scaled, Aspect::C, &cfg).unwrap().model;
        for ((x, _), (xs, _)) in set.samples().iter().zip(scaled.samples()) {
            assert_eq!(a.classify(x), b.classify(xs));
        }
    }
}
