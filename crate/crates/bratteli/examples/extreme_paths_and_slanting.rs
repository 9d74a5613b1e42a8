//! Orders whose extreme-path sets are empty (with finite certificates),
//! telescoping that empties them, transitivity witnesses entering arbitrary
//! cylinders, slanting (tail-invariant) sets, and a diagram whose adic image
//! provably misses a cylinder.
//!
//!     cargo run --example extreme_paths_and_slanting

use std::collections::BTreeMap;

use bratteli::catalog;
use bratteli::diagram::{slanting_membership, transitive_witness, FinitePath, Slant};
use bratteli::order::{extreme_paths, telescoped_order, ExtremeVerdict};
use bratteli::Window;

fn main() {
    // The slanted order on the full-first-row diagram: every chain of
    // minimal (or maximal) edges strictly decreases the vertex, so no
    // infinite extreme path exists — a proof by infinite descent.
    let entry = catalog::get("slanted", &BTreeMap::new()).unwrap();
    let report = extreme_paths(&entry.diagram, &entry.order, Window::new(1, 10), 15);
    for (side, verdict) in [("minimal", &report.minimal), ("maximal", &report.maximal)] {
        match verdict {
            ExtremeVerdict::Empty(cert) => {
                println!("slanted {side}: EMPTY — {}", cert.detail)
            }
            ExtremeVerdict::Stubs(s) => println!("slanted {side}: {} stubs survive", s.len()),
        }
    }

    // The alternating-order tridiagonal diagram: extreme paths survive, but
    // telescoping by pairs of levels empties both sets.
    let entry = catalog::get("alternating", &BTreeMap::new()).unwrap();
    let cuts: Vec<usize> = (0..8).map(|i| 2 * i).collect();
    let telescoped = entry.diagram.telescope(&cuts).unwrap();
    let t_order = telescoped_order(&entry.diagram, &entry.order, &cuts);
    // Probe deeper than the window is wide: a strictly right-to-left chain
    // starting inside [1, 8] dies within 8 levels.
    let report = extreme_paths(&telescoped, &t_order, Window::new(1, 8), 12);
    println!(
        "alternating, telescoped by pairs: minimal empty = {}, maximal empty = {}",
        matches!(report.minimal, ExtremeVerdict::Empty(_)),
        matches!(report.maximal, ExtremeVerdict::Empty(_))
    );

    // Transitivity: from any cylinder, a finite path reaches the vertical
    // vertex at a level multiple of its return length — the tail class of
    // the periodic path meets every cylinder.
    let entry = catalog::resolve("a1?a=1&b=1").unwrap();
    let cyl = bratteli::diagram::FinitePath::new(0, vec![
        bratteli::diagram::Edge { level: 0, source: 3, target: 4, copy: 0 },
        bratteli::diagram::Edge { level: 1, source: 4, target: 3, copy: 1 },
    ]);
    let witness = transitive_witness(&entry.diagram, &cyl, 0, 1, 60).unwrap();
    println!(
        "a1(1,1): cylinder at vertex {} reaches vertex 0 after {} more levels",
        cyl.range_vertex().unwrap(),
        witness.len()
    );

    // Slanting sets: paths whose range drifts at the maximal band rate.
    // They are tail-invariant, so their (non)emptiness obstructs minimality.
    let entry = catalog::get("uniform", &BTreeMap::new()).unwrap();
    let band = entry.diagram.band().unwrap().clone();
    let mut edges = Vec::new();
    let mut cur = 0i64;
    for level in 0..12 {
        let next = cur + band.t(level);
        edges.push(bratteli::diagram::Edge { level, source: cur, target: next, copy: 0 });
        cur = next;
    }
    let drifting = FinitePath::new(0, edges);
    println!(
        "uniform: maximal-drift path in Z_0^+ : {:?}",
        slanting_membership(&entry.diagram, &drifting, 0, Slant::Plus)
    );

    // Compressibility: on the tree-plus-spine diagram, the successor image
    // of every path avoids the cylinder over the tree root.
    let entry = catalog::resolve("compressible").unwrap();
    let order = &entry.order;
    use bratteli::order::{vershik_step, OrderedPath, TailRule};
    let spine_head = 17; // 2^4 + 1: the spine head at level 4
    let seed = OrderedPath::new(
        order.minimal_path_into(&entry.diagram, spine_head, 4),
        TailRule::Vertical(spine_head),
    );
    let image = vershik_step(&entry.diagram, order, &seed, 4).unwrap_image();
    println!(
        "compressible: image of a sample path starts at vertex {} — never vertex 1, so the root cylinder is missed",
        image.materialize(1)[0].source
    );
}
