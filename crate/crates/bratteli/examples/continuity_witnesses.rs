//! Constructive (dis)continuity analysis of the Vershik map on bounded-size
//! diagrams: an explicit ε-ball witness of discontinuity at maximal paths,
//! a band condition under which the construction provably fails, and probes
//! confirming a continuous extension on the doubling-offset diagram.
//!
//!     cargo run --example continuity_witnesses

use std::collections::BTreeMap;
use std::sync::Arc;

use bratteli::catalog;
use bratteli::diagram::{Edge, FinitePath};
use bratteli::order::{
    banded_extreme_path, continuity_probe, discontinuity_witness, DiscontinuityOutcome,
    OrderedPath, ProbeDirection, Side, TailRule,
};
use bratteli::Vertex;

fn main() {
    // Uniform band: t_n ≡ t, so t_{n+k} < t_n + … + t_{n+k−1} holds with
    // k = 2 and every maximal path is a discontinuity point.
    let entry = catalog::get("uniform", &BTreeMap::new()).unwrap();
    let band = entry.diagram.band().unwrap().clone();
    let x_max = banded_extreme_path(&entry.diagram, &entry.order, &band, 0, Side::Max);
    for eps_exp in [3, 5, 8] {
        let eps = 0.5f64.powi(eps_exp);
        match discontinuity_witness(&entry.diagram, &entry.order, &x_max, eps, 20) {
            DiscontinuityOutcome::Witness { n, k, distance_x_to_xprime, image_distance, .. } => {
                println!(
                    "uniform, ε=2^-{eps_exp}: witness at n={n}, k={k}; deviations within {distance_x_to_xprime:.4} map to distance {image_distance}"
                );
            }
            DiscontinuityOutcome::ConditionFails { .. } => println!("unexpected failure"),
        }
    }

    // Doubling offsets t_n = 2^{n-1}: t_{n+k} = Σ t_i exactly, the strict
    // inequality never holds, and the witness construction reports that.
    let entry = catalog::get("continuous_vershik", &BTreeMap::new()).unwrap();
    let band = entry.diagram.band().unwrap().clone();
    let x_max = banded_extreme_path(&entry.diagram, &entry.order, &band, 0, Side::Max);
    match discontinuity_witness(&entry.diagram, &entry.order, &x_max, 0.125, 25) {
        DiscontinuityOutcome::ConditionFails { n, probed_k } => println!(
            "continuous_vershik: band condition fails for every k ≤ {probed_k} at n={n} — no witness"
        ),
        DiscontinuityOutcome::Witness { .. } => println!("unexpected witness"),
    }

    // Positive side: near the maximal path, images of small deformations
    // stay close to the minimal path — the modulus of a homeomorphism.
    let order = entry.order.clone();
    let diagram = entry.diagram.clone();
    let x_min = banded_extreme_path(&diagram, &order, &band, 0, Side::Min);
    let deviate = {
        let (d, o, b, xm) = (diagram.clone(), order.clone(), band.clone(), x_max.clone());
        move |m: usize| -> OrderedPath {
            let edges = xm.materialize(m);
            let cur = edges.last().map(|e| e.target).unwrap_or(0);
            let (d2, o2, b2) = (d.clone(), o.clone(), b.clone());
            let rule = move |level: usize, cur: Vertex| -> Edge {
                o2.minimal_edge_into(&d2, level, cur + b2.t(level))
            };
            let first = rule(m, cur);
            let mut all = edges;
            all.push(first);
            OrderedPath::new(FinitePath::new(0, all), TailRule::Rule(Arc::new(rule)))
        }
    };
    let ms: Vec<usize> = (3..=8).collect();
    let table = continuity_probe(
        &diagram, &order, &x_max, &x_min, &ms, deviate, ProbeDirection::Forward, 6,
    );
    for s in &table.samples {
        println!(
            "continuous_vershik: deform at level {:>2} (distance {:.5}) → image within {:.5} of the minimal path",
            s.m, s.distance_to_extreme, s.image_distance_to_paired
        );
    }
    println!("modulus holds: {}", table.modulus_holds);
}
