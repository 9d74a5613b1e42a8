//! Tail-invariant measures from closed-form eigendata: exact cylinder
//! values, Rokhlin-tower mass accounting, and the normalized measure/height
//! sequences with their norming constants.
//!
//!     cargo run --example invariant_measures

use std::collections::BTreeMap;

use bratteli::catalog;
use bratteli::diagram::{Edge, FinitePath};
use bratteli::measure::{
    normalized_sequences, stationary_cylinder_measure, stationary_measure_vectors, tower_total,
    HeightCache,
};
use bratteli::Window;

fn main() {
    // Exact cylinder value on the doubled-center birth-death diagram: the
    // length-2 cylinder sitting at the center vertex.
    let entry = catalog::resolve("a1?a=1&b=1").unwrap();
    let (lambda, xi) = (
        entry.oracle.lambda.clone().unwrap(),
        entry.oracle.xi.clone().unwrap(),
    );
    let cyl = FinitePath::new(
        0,
        vec![
            Edge { level: 0, source: 0, target: 0, copy: 0 },
            Edge { level: 1, source: 0, target: 0, copy: 0 },
        ],
    );
    let value = stationary_cylinder_measure(&lambda, &*xi, &cyl);
    println!("a1(1,1) length-2 center cylinder: exactly {value}");

    // The renewal diagram carries an invariant *probability* measure: at
    // every level the tower masses p⁽ⁿ⁾_v · H⁽ⁿ⁾_v sum to 1.
    let entry = catalog::get("a5", &BTreeMap::new()).unwrap();
    let pair = entry.eigen_pair().unwrap();
    let vectors = stationary_measure_vectors(&pair, 8, Window::new(1, 64));
    let heights = HeightCache::new(&entry.diagram);
    for n in [0, 2, 4, 6, 8] {
        println!("a5 tower total at level {n}: {:.12}", tower_total(&vectors, &heights, n));
    }

    // Normalized sequences: μ̂⁽ⁿ⁾ (sup-normalized measures), Ĥ⁽ⁿ⁾ (pairing-
    // normalized heights), and norming constants λₙ > 1 whose running
    // product reconstructs the raw measure sequence.
    let seq = normalized_sequences(&vectors, &heights);
    println!("a5 norming constants λₙ = {:?}", seq.lambdas);
    println!(
        "a5 pairing ⟨μ̂,Ĥ⟩ deviations: {:.2e}",
        seq.pairings.iter().map(|p| (p - 1.0).abs()).fold(0.0f64, f64::max)
    );
    println!(
        "a5 reconstruction round-trip error: {:.2e}",
        seq.round_trip_error(&vectors)
    );
}
