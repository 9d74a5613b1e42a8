//! Exact path counting (heights) and the limit theorems they satisfy:
//! height ratios, deep-level edge frequencies, and cross-level count ratios
//! all converge to expressions in the eigendata.
//!
//!     cargo run --example heights_and_limits

use std::collections::BTreeMap;

use bratteli::catalog;
use bratteli::measure::{frequency_check, height_ratio_limit, ratio_limit_check, HeightCache};

fn main() {
    let entry = catalog::get("a5", &BTreeMap::new()).unwrap();
    let heights = HeightCache::new(&entry.diagram);
    print!("a5 heights H⁽ⁿ⁾₁ for n=0..8: ");
    for n in 0..=8 {
        print!("{} ", heights.height(n, 1));
    }
    println!();

    // H⁽ⁿ⁾_w / H⁽ⁿ⁾_v → η_w / η_v.
    let pair = entry.eigen_pair().unwrap();
    let ratio = height_ratio_limit(&entry.diagram, &pair, 2, 1, 30);
    println!(
        "a5: H⁽ⁿ⁾₂/H⁽ⁿ⁾₁ → {} (target {}, final error {:.2e})",
        ratio.terms.last().unwrap().1,
        ratio.target,
        ratio.final_error
    );

    // a⁽ᴺ⁻ⁿ⁾_{w,v} / H⁽ᴺ⁾_v → ξ_w / λⁿ: how often a deep fiber passes
    // through w exactly n levels down.
    let freq = frequency_check(&entry.diagram, &pair, 1, 1, 1, 40);
    println!(
        "a5: frequency of vertex 1 one level down → {} (target {}, error {:.2e})",
        freq.terms.last().unwrap().1,
        freq.target,
        freq.final_error
    );

    // Cross-level, cross-vertex count ratios converge to (ξ_{v₁}/ξ_{v₂})λ^{n₂−n₁}.
    let entry = catalog::resolve("a1?a=1&b=2").unwrap();
    let pair = entry.eigen_pair().unwrap();
    let check = ratio_limit_check(&entry.diagram, &pair, (0, 1), (1, 2), 0, 60);
    println!(
        "a1(1,2): a⁽ᴺ⁻¹⁾(0→0)/a⁽ᴺ⁻²⁾(1→0) → {} (target {}, error {:.2e})",
        check.terms.last().unwrap().1,
        check.target,
        check.final_error
    );
}
