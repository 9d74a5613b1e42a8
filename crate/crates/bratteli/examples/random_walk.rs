//! Sample the Markov chain induced by the Perron eigenvector and compare
//! empirical return statistics with the closed-form stationary law.
//!
//!     cargo run --example random_walk

use bratteli::catalog;
use bratteli::spectral::stochastic_from_eigenpair;
use bratteli::Window;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    // Positive-recurrent birth-death chain: stationary mass of the center
    // pair is computable in closed form from ξ (η ≡ 1, Σξ = 2 + 2b/(2b−a)).
    let entry = catalog::resolve("a1?a=1&b=1").unwrap();
    let pair = entry.eigen_pair().unwrap();
    // Validate rows strictly inside the scan window (boundary rows lose
    // mass to the truncation).
    let window = Window::new(-30, 30);
    let chain =
        stochastic_from_eigenpair(&entry.matrix, &pair, Window::new(-20, 20), window).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let steps = 200_000;
    let mut cur = 0i64;
    let mut at_center = 0u64;
    for _ in 0..steps {
        let row = chain.row_distribution(cur, window);
        let mut u: f64 = rng.gen();
        let mut next = cur;
        for (v, p) in &row {
            if u < *p {
                next = *v;
                break;
            }
            u -= *p;
        }
        cur = next;
        if cur == 0 || cur == -1 {
            at_center += 1;
        }
    }
    // Stationary probability of {0, −1}: ξ₀+ξ₋₁ over Σξ = 2/4 = 1/2.
    let empirical = at_center as f64 / steps as f64;
    println!("a1(1,1): fraction of time at the center pair = {empirical:.4} (stationary value 0.5)");

    // Null-recurrent hopping chain: returns happen, but the expected return
    // time is infinite — return counts grow sublinearly.
    let entry = catalog::resolve("a2?a=1&b=1").unwrap();
    let pair = entry.eigen_pair().unwrap();
    let window = Window::new(-400, 400);
    let chain = stochastic_from_eigenpair(&entry.matrix, &pair, Window::new(-5, 5), window).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for steps in [1000u64, 10_000, 100_000] {
        let mut cur = 0i64;
        let mut returns = 0u64;
        for _ in 0..steps {
            let row = chain.row_distribution(cur, window);
            let mut u: f64 = rng.gen();
            let mut next = cur;
            for (v, p) in &row {
                if u < *p {
                    next = *v;
                    break;
                }
                u -= *p;
            }
            cur = next;
            if cur == 0 {
                returns += 1;
            }
        }
        println!(
            "a2(1,1): {steps:>6} steps → {returns:>4} returns to 0 (frequency {:.4}, decaying like 1/√n)",
            returns as f64 / steps as f64
        );
    }
}
