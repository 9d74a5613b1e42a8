//! Drive the library the way the `bratteli` binary does: resolve a diagram
//! from a descriptor, build a deterministic JSON report with the standard
//! envelope, and render a DOT drawing.
//!
//!     cargo run --example cli_reports

use bratteli::catalog;
use bratteli::report::{envelope, render_dot};
use bratteli::spectral::perron_estimate;
use bratteli::{Matrix, MatrixDescriptor, Window};
use serde_json::json;

fn main() {
    // Descriptors round-trip through JSON; this is the `--diagram file.json`
    // input format (see schemas/matrix_descriptor.md).
    let text = r#"{
        "kind": "banded",
        "index_set": "integers",
        "offsets": [-1, 0, 1],
        "entries": { "-1": 1, "0": 1, "1": 1 }
    }"#;
    let descriptor: MatrixDescriptor = serde_json::from_str(text).unwrap();
    let matrix = Matrix::from_descriptor(&descriptor).unwrap();
    let est = perron_estimate(&matrix, 0, 60, Window::new(-40, 40), 1e9).unwrap();

    // Reports embed the config and library version; fixed key order makes
    // the bytes reproducible.
    let report = envelope(
        json!({"descriptor": descriptor, "anchor": 0, "horizon": 60}),
        json!({"lambda_estimate": est.lambda, "period": est.period}),
    );
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    // DOT rendering of a catalog diagram.
    let entry = catalog::resolve("a5").unwrap();
    let dot = render_dot(&entry.diagram, 3, Window::new(1, 5));
    println!("{dot}");
}
