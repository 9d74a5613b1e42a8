//! Classify the eigenvector-induced Markov chain of each matrix family as
//! positive recurrent, null recurrent, or transient, from certificate-based
//! finite evidence plus the catalog's analytic closed forms.
//!
//!     cargo run --example recurrence_classification

use bratteli::catalog;
use bratteli::spectral::classify_recurrence;
use bratteli::Window;

fn main() {
    let cases = [
        ("a1?a=1&b=1", 0i64), // a < 2b: positive recurrent
        ("a1?a=3&b=1", 0),    // a > 2b: ξ not summable, null recurrent
        ("a2?a=1&b=2", 0),    // hopping: null recurrent at the top eigenvalue
        ("a3", 1),
        ("a5", 1),
        ("a6", 1),
        ("a7?c=1,2,1", 1),
    ];
    for (address, anchor) in cases {
        let entry = catalog::resolve(address).unwrap();
        let lambda = entry.oracle.lambda_f64().unwrap();
        let window = entry.matrix.index_set().clamp(Window::new(-80, 80));
        let pair = entry.eigen_pair();
        // Iterate the diagram's level matrix: same return diagonal as the
        // published orientation, but its columns are always finite (the
        // published a7 matrix has an unbounded first column).
        let matrix = entry.diagram.level_matrix(0);
        let mut class = classify_recurrence(
            &matrix,
            lambda,
            anchor,
            300,
            window,
            pair.as_ref(),
            1e-9,
        );
        if let Some(analytic) = entry.oracle.recurrence {
            class = class.with_analytic(analytic, "closed-form ξ summability");
        }
        println!("{address:>12}: {:?}", class.variant);
        println!("              {}", class.certificate);
        if let Some(note) = &class.analytic_override {
            println!("              {note}");
        }
    }
}
