use expresso::synth::{generate, Corpus, GenSpec};
use expresso::{analyze, GeometryConfig, PerceptronModelF32};

#[test]
fn single_precision_pipeline_tracks_double() {
    let spec = GenSpec {
        seed: 12,
        count: 10,
        trend_mode: true,
        ..GenSpec::default()
    };
    let narrow: Corpus<f32> = generate(&spec).unwrap();
    let wide: Corpus<f64> = generate(&spec).unwrap();
    let model = PerceptronModelF32::paper_final();
    for (d32, d64) in narrow.drawings.iter().zip(&wide.drawings) {
        let a32 = analyze(d32, &GeometryConfig::<f32>::default()).unwrap();
        let a64 = analyze(d64, &GeometryConfig::<f64>::default()).unwrap();
        assert_eq!(
            a32.extraction.aspects.n_ends_bends,
            a64.extraction.aspects.n_ends_bends
        );
        for (x, y) in [
            (a32.aspects.a, a64.aspects.a),
            (a32.aspects.b, a64.aspects.b),
            (a32.aspects.c, a64.aspects.c),
        ] {
            assert!((f64::from(x) - y).abs() <= 1e-3 * y.abs(), "{x} vs {y}");
        }
        assert!(model
            .predict(&a32.input)
            .values()
            .iter()
            .all(|v| v.is_finite()));
    }
}
