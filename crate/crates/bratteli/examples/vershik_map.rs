//! The Vershik (adic successor) map: iterate it along a path, check the
//! inverse really inverts it, and validate both against brute-force adic
//! enumeration on a finite truncation.
//!
//!     cargo run --example vershik_map

use std::collections::BTreeMap;

use bratteli::catalog;
use bratteli::diagram::FinitePath;
use bratteli::order::{
    adic_cmp, enumerate_paths_into, vershik_inverse_step, vershik_step, OrderedPath, StepResult,
    TailRule,
};

fn main() {
    let entry = catalog::get("a5", &BTreeMap::new()).unwrap();
    let (diagram, order) = (&entry.diagram, &entry.order);
    let depth = 5;

    // Start from the minimal path into vertex 1 and iterate the successor.
    let start = OrderedPath::new(
        order.minimal_path_into(diagram, 1, depth),
        TailRule::Vertical(1),
    );
    let mut current = start.clone();
    println!("successor orbit (level-0..4 source vertices):");
    for step in 0..6 {
        let edges = current.materialize(depth);
        let sources: Vec<i64> = edges.iter().map(|e| e.source).collect();
        println!("  step {step}: {sources:?}");
        match vershik_step(diagram, order, &current, depth) {
            StepResult::Image(next) => current = next,
            StepResult::ExtremeThroughDepth(d) => {
                println!("  reached an all-maximal path through depth {d}");
                break;
            }
        }
    }

    // Inverse ∘ forward is the identity away from the extreme paths.
    let image = vershik_step(diagram, order, &start, depth).unwrap_image();
    let back = vershik_inverse_step(diagram, order, &image, depth).unwrap_image();
    assert_eq!(back.materialize(depth), start.materialize(depth));
    println!("inverse(successor(x)) == x: verified");

    // Brute force: enumerate every finite path into a deep vertex, sort them
    // adically, and confirm the successor map walks that sorted list.
    let v = 2;
    let n = 4;
    let mut paths: Vec<FinitePath> = enumerate_paths_into(diagram, v, n);
    paths.sort_by(|a, b| adic_cmp(diagram, order, a, b));
    let mut hops = 0;
    for w in paths.windows(2) {
        let cur = OrderedPath::new(w[0].clone(), TailRule::Vertical(v));
        let next = vershik_step(diagram, order, &cur, n).unwrap_image();
        assert_eq!(next.materialize(n), w[1].edges, "successor disagrees with adic sort");
        hops += 1;
    }
    println!("truncation into vertex {v} at level {n}: {} paths, {hops} successor hops verified", paths.len());
}
