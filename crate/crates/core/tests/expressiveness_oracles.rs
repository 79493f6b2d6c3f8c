use expresso::expressiveness::{
    aspect_a, aspect_b, aspect_c, aspects_from_outputs, flag_extremes, spearman, ExtremeFlag,
};
use expresso::perceptron::{Init, PerceptronModel};
use expresso::synth::{generate, Corpus, GenSpec};
use expresso::{analyze, GeometryConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn formulas_match_straight_line_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let ldiv: f64 = rng.gen_range(0.1..10.0);
        let s: f64 = rng.gen_range(0.5..50.0);
        let l = s + rng.gen_range(0.0..500.0);
        let m = rng.gen_range(0.0..=l);
        let n_e = f64::from(rng.gen_range(2u32..200));
        let pct_s: f64 = rng.gen_range(0.0..1.0);
        let pct_c = rng.gen_range(0.0..1.0 - pct_s);
        let lseg = (s * l).sqrt();

        let a_ref = ldiv / lseg;
        let b_ref = n_e * (pct_s * (lseg * lseg).cbrt() + pct_c * (lseg.ln() * 0.4).exp());
        let c_ref = m * ldiv / s;

        assert!(rel_close(aspect_a(ldiv, lseg).unwrap(), a_ref, 1e-12));
        let b = aspect_b(n_e, pct_s, pct_c, lseg).unwrap();
        assert!(b == b_ref || rel_close(b, b_ref, 1e-12), "{b} vs {b_ref}");
        assert!(rel_close(aspect_c(m, ldiv, s).unwrap(), c_ref, 1e-12));
    }
}

#[test]
fn aspect_b_grows_with_each_input() {
    let base = aspect_b(10.0, 0.3, 0.4, 20.0).unwrap();
    assert!(aspect_b(11.0, 0.3, 0.4, 20.0).unwrap() > base);
    assert!(aspect_b(10.0, 0.35, 0.4, 20.0).unwrap() > base);
    assert!(aspect_b(10.0, 0.3, 0.45, 20.0).unwrap() > base);
}

/// Average ranks by counting, then a two-pass Pearson.
fn oracle_spearman(x: &[f64], y: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn spearman_matches_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..300 {
        let n = rng.gen_range(3..60);
        // Coarse values on every third case to force ties.
        let draw = |rng: &mut ChaCha8Rng| {
            if case % 3 == 0 {
                f64::from(rng.gen_range(0..5))
            } else {
                rng.gen_range(-10.0..10.0)
            }
        };
        let x: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v * rng.gen_range(-1.0..2.0) + draw(&mut rng))
            .collect();
        let ours = spearman(&x, &y);
        let oracle = oracle_spearman(&x, &y);
        match ours {
            Some(r) => assert!((r - oracle).abs() <= 1e-12, "{r} vs {oracle}"),
            None => assert!(oracle.is_nan()),
        }
    }
}

#[test]
fn spearman_without_ties_matches_rank_difference_formula() {
    let x = [3.1, 1.2, 4.4, 1.5, 9.2, 2.6, 5.3];
    let y = [2.0, 7.0, 1.0, 8.0, 2.5, 8.5, 3.0];
    let n = x.len() as f64;
    let rank = |v: &[f64], a: f64| 1.0 + v.iter().filter(|b| **b < a).count() as f64;
    let d2: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (rank(&x, *a) - rank(&y, *b)).powi(2))
        .sum();
    let expected = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
    assert!((spearman(&x, &y).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn perceptron_values_reproduce_hand_aspects() {
    let c: Corpus<f64> = generate(&GenSpec {
        seed: 8,
        count: 20,
        ..GenSpec::default()
    })
    .unwrap();
    let cfg = GeometryConfig::default();
    let models: Vec<PerceptronModel<f64>> = vec![
        PerceptronModel::paper_start(),
        PerceptronModel::paper_final(),
        Init::Random(1).model(),
        Init::Random(2).model(),
    ];
    for d in &c.drawings {
        let an = analyze(d, &cfg).unwrap();
        assert!(rel_close(
            an.extraction.aspects.lseg.powi(2),
            an.extraction.aspects.smallest * an.extraction.aspects.largest,
            1e-9
        ));
        for m in &models {
            let p = aspects_from_outputs(&an.input, &m.predict(&an.input)).unwrap();
            assert!(rel_close(p.a, an.aspects.a, 1e-12));
        }
        let p = aspects_from_outputs(&an.input, &an.target).unwrap();
        assert!(rel_close(p.b, an.aspects.b, 1e-9) || p.b == an.aspects.b);
        assert!(rel_close(p.c, an.aspects.c, 1e-9));
    }
}

proptest! {
    #[test]
    fn extremes_ignore_monotone_transforms(values in prop::collection::vec(-1e3f64..1e3, 3..50)) {
        let flags = flag_extremes(&values, 10.0, 90.0).unwrap();
        let moved: Vec<f64> = values.iter().map(|v| (v / 100.0).exp() * 3.0 + 1.0).collect();
        prop_assert_eq!(&flags, &flag_extremes(&moved, 10.0, 90.0).unwrap());
        let low = flags.iter().filter(|f| **f == ExtremeFlag::Low).count();
        let high = flags.iter().filter(|f| **f == ExtremeFlag::High).count();
        prop_assert!(low as f64 <= values.len() as f64 * 0.1);
        prop_assert!(high as f64 <= values.len() as f64 * 0.1 + 1e-9);
    }
}
