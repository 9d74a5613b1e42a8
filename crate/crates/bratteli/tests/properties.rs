//! Randomized structural invariants: serialization round-trips, matrix
//! power algebra, height recursions, the path-space ultrametric, exact
//! cylinder additivity, and window arithmetic.

use std::collections::BTreeMap;

use bratteli::diagram::{Diagram, Edge, FinitePath};
use bratteli::measure::{stationary_cylinder_measure, HeightCache};
use bratteli::order::path_distance;
use bratteli::report::envelope;
use bratteli::{IndexSet, Matrix, MatrixDescriptor, Quad, Window};
use num_bigint::BigUint;
use proptest::prelude::*;

fn banded_descriptor() -> impl Strategy<Value = MatrixDescriptor> {
    (
        prop::bool::ANY,
        prop::collection::btree_map(-3i64..=3, 1u64..=9, 1..5),
    )
        .prop_map(|(integers, bands)| MatrixDescriptor::Banded {
            index_set: if integers {
                IndexSet::Integers
            } else {
                IndexSet::Naturals
            },
            offsets: bands.keys().copied().collect(),
            entries: bands.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        })
}

fn banded_matrix() -> impl Strategy<Value = Matrix> {
    prop::collection::btree_map(-2i64..=2, 1u64..=3, 1..4).prop_map(|bands| {
        Matrix::banded(
            IndexSet::Integers,
            bands.clone(),
            MatrixDescriptor::Banded {
                index_set: IndexSet::Integers,
                offsets: bands.keys().copied().collect(),
                entries: bands.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            },
        )
    })
}

proptest! {
    // Matrix descriptors survive a JSON round-trip bit-exactly.
    #[test]
    fn descriptor_json_round_trip(desc in banded_descriptor()) {
        let text = serde_json::to_string(&desc).unwrap();
        let back: MatrixDescriptor = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &desc);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    // Catalog descriptors with parameters also round-trip.
    #[test]
    fn catalog_descriptor_round_trip(a in 1u64..=5, b in 1u64..=5) {
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), serde_json::Value::from(a));
        params.insert("b".to_string(), serde_json::Value::from(b));
        let desc = MatrixDescriptor::Catalog { name: "a1".into(), params };
        let text = serde_json::to_string(&desc).unwrap();
        let back: MatrixDescriptor = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, desc);
    }

    // Semigroup property of matrix powers: A^{m+n} = A^m · A^n entrywise.
    #[test]
    fn power_additivity(
        matrix in banded_matrix(),
        m in 1u32..=3,
        n in 1u32..=3,
        w in -3i64..=3,
        v in -3i64..=3,
    ) {
        let direct = matrix.power_entry(m + n, w, v);
        let reach = 2 * m as i64;
        let mut summed = BigUint::from(0u32);
        for u in (w - reach)..=(w + reach) {
            summed += matrix.power_entry(m, w, u) * matrix.power_entry(n, u, v);
        }
        prop_assert_eq!(direct, summed);
    }

    // Heights obey the one-level recursion H⁽ⁿ⁺¹⁾_v = Σ_w a_{w,v} H⁽ⁿ⁾_w,
    // and the cached values agree with the direct computation.
    #[test]
    fn height_recursion(matrix in banded_matrix(), n in 0usize..=4, v in -4i64..=4) {
        let diagram = Diagram::stationary(matrix);
        let heights = HeightCache::new(&diagram);
        let mut recursed = BigUint::from(0u32);
        for (w, mult) in diagram.incoming(n, v) {
            recursed += BigUint::from(mult) * &*heights.height(n, w);
        }
        prop_assert_eq!(&recursed, &*heights.height(n + 1, v));
        prop_assert_eq!(recursed, diagram.height(n + 1, v));
    }

    // The path metric 2^{−first disagreement} is a symmetric ultrametric.
    #[test]
    fn path_distance_is_ultrametric(
        a in prop::collection::vec((0i64..3, 0u32..2), 6),
        b in prop::collection::vec((0i64..3, 0u32..2), 6),
        c in prop::collection::vec((0i64..3, 0u32..2), 6),
    ) {
        let path = |spec: &[(i64, u32)]| -> Vec<Edge> {
            spec.iter()
                .enumerate()
                .map(|(level, (target, copy))| Edge {
                    level,
                    source: 0,
                    target: *target,
                    copy: *copy,
                })
                .collect()
        };
        let (pa, pb, pc) = (path(&a), path(&b), path(&c));
        let d = |x: &[Edge], y: &[Edge]| path_distance(x, y).unwrap_or(0.0);
        prop_assert_eq!(d(&pa, &pb), d(&pb, &pa));
        prop_assert!(d(&pa, &pc) <= d(&pa, &pb).max(d(&pb, &pc)));
        prop_assert_eq!(d(&pa, &pa), 0.0);
    }

    // Exact cylinder additivity: the measure of a cylinder equals the sum
    // of the measures of its one-level extensions, in exact arithmetic.
    #[test]
    fn cylinder_additivity_exact(
        a in 1u64..=3,
        b in 1u64..=3,
        start in -3i64..=3,
        deltas in prop::collection::vec(-1i64..=1, 1..4),
    ) {
        let entry = bratteli::catalog::resolve(&format!("a1?a={a}&b={b}")).unwrap();
        let lambda = entry.oracle.lambda.clone().unwrap();
        let xi = entry.oracle.xi.clone().unwrap();
        let mut edges = Vec::new();
        let mut cur = start;
        for (level, delta) in deltas.iter().enumerate() {
            edges.push(Edge { level, source: cur, target: cur + delta, copy: 0 });
            cur += delta;
        }
        let n = edges.len();
        let cyl = FinitePath::new(0, edges.clone());
        let whole = stationary_cylinder_measure(&lambda, &*xi, &cyl);
        let (row, exceeds) = entry.matrix.row_entries(cur, Window::new(cur - 5, cur + 5));
        prop_assert!(!exceeds, "row support must fit the scan window");
        let mut summed = Quad::zero();
        for (target, mult) in row {
            for copy in 0..mult as u32 {
                let mut extended = edges.clone();
                extended.push(Edge { level: n, source: cur, target, copy });
                let part = stationary_cylinder_measure(
                    &lambda,
                    &*xi,
                    &FinitePath::new(0, extended),
                );
                summed = &summed + &part;
            }
        }
        prop_assert_eq!(summed, whole);
    }

    // Window arithmetic: containment, clamping, and padding.
    #[test]
    fn window_invariants(lo in -50i64..=50, len in 0i64..=40, pad in 0i64..=10) {
        let w = Window::new(lo, lo + len);
        for v in [lo - 1, lo, lo + len, lo + len + 1] {
            prop_assert_eq!(w.contains(v), v >= lo && v <= lo + len);
        }
        let padded = w.padded(pad, IndexSet::Integers);
        prop_assert!(padded.lo <= w.lo && padded.hi >= w.hi);
        if lo + len >= 1 {
            let clamped = IndexSet::Naturals.clamp(w);
            prop_assert!(clamped.lo >= 1);
            prop_assert!(clamped.hi <= w.hi);
        }
    }

    // Report envelopes serialize deterministically and carry the config.
    #[test]
    fn envelope_is_deterministic(key in "[a-z]{1,8}", value in 0i64..1000) {
        let config = serde_json::json!({ key.clone(): value });
        let report = envelope(config, serde_json::json!({"ok": true}));
        let once = serde_json::to_vec(&report).unwrap();
        let twice = serde_json::to_vec(&report).unwrap();
        prop_assert_eq!(once, twice);
        prop_assert_eq!(report.pointer("/library").and_then(|v| v.as_str()), Some("bratteli"));
        prop_assert_eq!(report.pointer(&format!("/config/{key}")).and_then(|v| v.as_i64()), Some(value));
    }
}
