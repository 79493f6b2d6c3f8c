use expresso::drawing::{
    parse_drawing, serialize_drawing, Annotations, Content, Drawing, Point, Polyline,
};
use expresso::features::TargetVector;
use expresso::Error;
use proptest::prelude::*;

fn polyline() -> impl Strategy<Value = Polyline<f64>> {
    prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 2..12)
        .prop_filter_map("coincident vertices", |pts| {
            Polyline::new(pts.into_iter().map(|(x, y)| Point::new(x, y)).collect()).ok()
        })
}

fn targets() -> impl Strategy<Value = Option<TargetVector<f64>>> {
    prop::option::of(
        (
            0.0f64..=1.0,
            0.0f64..=1.0,
            0.0f64..=1.0,
            0.2f64..=0.8,
            0.0f64..=1.0,
        )
            .prop_map(|(t1, s, c, t4, t5)| {
                let (t2, t3) = if s + c > 1.0 {
                    (s / 2.0, c / 2.0)
                } else {
                    (s, c)
                };
                TargetVector::new([t1, t2, t3, t4, t5])
            }),
    )
}

fn any_drawing() -> impl Strategy<Value = Drawing<f64>> {
    (
        "[a-z][a-z0-9_.-]{0,10}",
        1e-3f64..1e3,
        prop::sample::select(vec![Content::Theory, Content::Setup, Content::Both]),
        targets(),
        prop::collection::vec(polyline(), 1..5),
    )
        .prop_map(|(id, ldiv, content, hand_targets, polylines)| {
            Drawing::new(
                id,
                polylines,
                Annotations {
                    ldiv,
                    content,
                    hand_targets,
                },
            )
            .unwrap()
        })
}

/// Single-line corruptions that each break a data-model invariant.
fn corrupt(text: &str, which: usize, pick: usize) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let vertex_lines: Vec<usize> = (0..lines.len())
        .filter(|&i| lines[i].starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        .collect();
    let v = vertex_lines[pick % vertex_lines.len()];
    let mut out: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    match which {
        0 => out[v] = "NaN 1.0".into(),
        1 => out[v] = "1.0 inf".into(),
        2 => out[1] = "ldiv 0.0".into(),
        3 => out[1] = "ldiv -2.5".into(),
        4 => out[0] = "drawing".into(),
        5 => out[2] = "content poster".into(),
        6 => {
            // Repeat the previous line: either a coincident vertex or a
            // vertex outside any polyline block.
            out[v] = if lines[v - 1] == "polyline" {
                "1.0".into()
            } else {
                lines[v - 1].into()
            }
        }
        7 => out[v] = format!("{} 7.0", lines[v]),
        8 | 9 => {
            let line = if which == 8 {
                "targets 0.5 0.7 0.6 0.5 0.5"
            } else {
                "targets 0.5 0.1 0.1 0.9 0.5"
            };
            if lines[3].starts_with("targets") {
                out[3] = line.into();
            } else {
                out.insert(3, line.into());
            }
        }
        10 => {
            let last = out.len() - 1;
            out[last] = "polyline".into();
        }
        _ => out[v] = "x y".into(),
    }
    out.join("\n") + "\n"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialize_parse_round_trip(d in any_drawing()) {
        let text = serialize_drawing(&d);
        let back: Drawing<f64> = parse_drawing(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_drawing(&back), text);
    }

    #[test]
    fn invariant_violating_mutations_are_rejected(d in any_drawing(), which in 0usize..12, pick in any::<usize>()) {
        let bad = corrupt(&serialize_drawing(&d), which, pick);
        let res = parse_drawing::<f64>(&bad);
        prop_assert!(matches!(res, Err(Error::Parse { .. })), "accepted mutation {}:\n{}", which, bad);
    }
}

#[test]
fn zero_polylines_reason() {
    let err = parse_drawing::<f64>("drawing a\nldiv 1.0\ncontent both\n").unwrap_err();
    match err {
        Error::Parse { reason, .. } => assert_eq!(reason, "no polylines"),
        other => panic!("unexpected {other:?}"),
    }
}
