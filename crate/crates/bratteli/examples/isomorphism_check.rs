//! Verify a diagram isomorphism edge-by-edge: the integer-line tridiagonal
//! diagram folds onto a one-sided diagram via an explicit vertex bijection,
//! and the induced edge map preserves incidence and multiplicity.
//!
//!     cargo run --example isomorphism_check

use bratteli::catalog;
use bratteli::diagram::{verify_isomorphism, IsoVerdict};
use bratteli::Window;

fn main() {
    let (line, folded, witness) = catalog::isomorphism_pair();
    for depth in 1..=5 {
        let verdict = verify_isomorphism(&line, &folded, &witness, depth, Window::new(-15, 15));
        match verdict {
            IsoVerdict::VerifiedToDepth(d) => {
                println!("depth {depth}: vertex/edge maps consistent through level {d}")
            }
            IsoVerdict::Violation { level, detail } => {
                println!("depth {depth}: VIOLATION at level {level} — {detail}")
            }
        }
    }

    // The two sides really are the catalog entries iso_line and iso_folded.
    let a = catalog::resolve("iso_line").unwrap();
    let b = catalog::resolve("iso_folded").unwrap();
    println!(
        "iso_line λ = {:?}, iso_folded λ = {:?} (isomorphic diagrams share spectra)",
        a.oracle.lambda_f64(),
        b.oracle.lambda_f64()
    );
}
