//! Estimate the dominant eigenvalue of an infinite non-negative matrix from
//! exact diagonal power entries, and compare with closed forms.
//!
//!     cargo run --example spectral_radius

use std::collections::BTreeMap;

use bratteli::catalog;
use bratteli::spectral::{column_sum_bounds, perron_estimate, truncated_spectral_radius};
use bratteli::Window;

fn main() {
    for (id, anchor) in [("a1", 0i64), ("a3", 1), ("a5", 1), ("a6", 1)] {
        let entry = catalog::get(id, &BTreeMap::new()).unwrap();
        let window = entry.matrix.index_set().clamp(Window::new(-60, 60));
        let est = perron_estimate(&entry.matrix, anchor, 60, window, 1e12).unwrap();
        let closed = entry.oracle.lambda_f64().unwrap();
        println!(
            "{id:>3}: λ ≈ {:.6} (closed form {:.6}, rel. err {:.2e}, period {})",
            est.lambda,
            closed,
            (est.lambda - closed).abs() / closed,
            est.period
        );
        let bounds = column_sum_bounds(&entry.matrix, window);
        println!("     column sums in [{}, {}]", bounds.inf, bounds.sup);
    }

    // A matrix with super-exponentially growing diagonal has no finite
    // eigenvalue; the truncated spectral radius grows without bound.
    let entry = catalog::get("infinite_perron", &BTreeMap::new()).unwrap();
    for half in [3, 5, 8] {
        let w = Window::new(-half, half);
        let r = truncated_spectral_radius(&entry.matrix, w, 300);
        println!("infinite_perron on [{}, {}]: truncated radius {r:.3}", w.lo, w.hi);
    }
}
