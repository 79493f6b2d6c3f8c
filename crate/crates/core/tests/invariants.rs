use expresso::features::composition_of_features;
use expresso::geometry::{elementary_aspects, extract, ElementaryAspects};
use expresso::synth::{generate, Corpus, GenSpec};
use expresso::{Drawing, GeometryConfig, Point};
use proptest::prelude::*;

fn sample_drawing(seed: u64, crossings: usize) -> Drawing<f64> {
    let spec = GenSpec {
        seed,
        count: 1,
        min_crossings: crossings,
        ..GenSpec::default()
    };
    let c: Corpus<f64> = generate(&spec).unwrap();
    c.drawings.into_iter().next().unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn counts(ea: &ElementaryAspects<f64>) -> [usize; 6] {
    [
        ea.n_points,
        ea.n_ends_bends,
        ea.n_ends,
        ea.n_soft,
        ea.n_corner,
        ea.n_intersections,
    ]
}

fn measures(ea: &ElementaryAspects<f64>) -> [f64; 6] {
    [
        ea.pct_soft,
        ea.pct_corner,
        ea.largest,
        ea.smallest,
        ea.main_form,
        ea.lseg,
    ]
}

fn cfg() -> GeometryConfig<f64> {
    GeometryConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn translation_invariance(seed in 0u64..1_000_000, cross in 0usize..3, tx in -1000.0f64..1000.0, ty in -1000.0f64..1000.0) {
        let d = sample_drawing(seed, cross);
        let moved = d.map_points(|p| Point::new(p.x + tx, p.y + ty)).unwrap();
        let (a, b) = (elementary_aspects(&d, &cfg()).unwrap(), elementary_aspects(&moved, &cfg()).unwrap());
        prop_assert_eq!(counts(&a), counts(&b));
        for (x, y) in measures(&a).into_iter().zip(measures(&b)) {
            prop_assert!(close(x, y, 1e-9), "{} vs {}", x, y);
        }
    }

    #[test]
    fn rotation_invariance(seed in 0u64..1_000_000, cross in 0usize..3, angle in 0.0f64..std::f64::consts::TAU) {
        let d = sample_drawing(seed, cross);
        let (s, c) = angle.sin_cos();
        let turned = d.map_points(|p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y)).unwrap();
        let (a, b) = (elementary_aspects(&d, &cfg()).unwrap(), elementary_aspects(&turned, &cfg()).unwrap());
        prop_assert_eq!(counts(&a), counts(&b));
        for (x, y) in measures(&a).into_iter().zip(measures(&b)).take(5) {
            prop_assert!(close(x, y, 1e-6), "{} vs {}", x, y);
        }
    }

    #[test]
    fn scaling_multiplies_lengths(seed in 0u64..1_000_000, cross in 0usize..3, k in 0.2f64..5.0) {
        let d = sample_drawing(seed, cross);
        let big = d.map_points(|p| Point::new(p.x * k, p.y * k)).unwrap();
        let a = elementary_aspects(&d, &cfg()).unwrap();
        let b = elementary_aspects(&big, &cfg().scaled(k)).unwrap();
        prop_assert_eq!(counts(&a), counts(&b));
        prop_assert!(close(a.pct_soft, b.pct_soft, 1e-12));
        prop_assert!(close(a.pct_corner, b.pct_corner, 1e-12));
        for (x, y) in [(a.largest, b.largest), (a.smallest, b.smallest), (a.main_form, b.main_form), (a.lseg, b.lseg)] {
            prop_assert!(close(x * k, y, 1e-9), "{} * {} vs {}", x, k, y);
        }
    }

    #[test]
    fn mirror_swaps_left_and_right(seed in 0u64..1_000_000, cross in 0usize..3) {
        let d = sample_drawing(seed, cross);
        let mirrored = d.map_points(|p| Point::new(-p.x, p.y)).unwrap();
        let v = composition_of_features(&extract(&d, &cfg()).unwrap().points).to_array();
        let m = composition_of_features(&extract(&mirrored, &cfg()).unwrap().points).to_array();
        let tol = 1e-9 * v.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for i in [2, 3, 6, 7] {
            prop_assert!((v[i] - m[i]).abs() <= tol);
        }
        prop_assert!((m[0] + v[1]).abs() <= tol && (m[1] + v[0]).abs() <= tol);
        prop_assert!((m[4] - v[5]).abs() <= tol && (m[5] - v[4]).abs() <= tol);
    }

    #[test]
    fn aspect_relations_hold(seed in 0u64..1_000_000, cross in 0usize..3) {
        let d = sample_drawing(seed, cross);
        let ea = elementary_aspects(&d, &cfg()).unwrap();
        prop_assert!(ea.pct_soft + ea.pct_corner < 1.0);
        prop_assert!(ea.n_points >= ea.n_ends_bends);
        prop_assert!(ea.smallest <= ea.largest);
        prop_assert!(ea.main_form <= ea.largest);
        prop_assert!(close(ea.lseg * ea.lseg, ea.smallest * ea.largest, 1e-9));
    }
}
