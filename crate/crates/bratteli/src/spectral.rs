//! Perron–Frobenius engine for infinite non-negative matrices: eigenvalue
//! estimation from diagonal power growth, windowed and exact eigenvector
//! computation, recurrence classification for the associated countable-state
//! chain, column-sum eigenvalue bounds, and the induced stochastic matrix.
//!
//! All windowed computations are honest about truncation: residuals are
//! measured on an interior sub-window with a boundary ring discarded, and
//! classification returns `Inconclusive` rather than guessing when no
//! certificate fires.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{Quad, Rat};
use crate::matrix::{big_ln, IndexSet, Matrix, MatrixError, RowSupport, Vertex, Window};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("eigenvalue estimates exceeded ceiling {ceiling} at n={n} (estimate {estimate:.3e}); infinite eigenvalue suspected")]
    DivergenceDetected { n: u32, estimate: f64, ceiling: f64 },
    #[error("no strictly positive solution: {detail}")]
    NoPositiveSolution { detail: String },
    #[error("row {row} of the stochastic matrix sums to {sum} (|sum-1| > tolerance)")]
    RowSumViolation { row: Vertex, sum: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

// ---------------------------------------------------------------------------
// Eigenvalue estimation: n-th roots of diagonal power entries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PerronEstimate {
    /// Best available estimate: the larger of the root supremum and the last
    /// diagonal-ratio refinement (both approach the eigenvalue from below).
    pub lambda: f64,
    pub anchor: Vertex,
    pub period: u32,
    /// `(n, (a^{(n)}_{ii})^{1/n})` along the period-respecting subsequence.
    pub sequence: Vec<(u32, f64)>,
    /// Running supremum of the sequence (monotone by construction; its limit
    /// is the eigenvalue).
    pub running_sup: Vec<f64>,
    /// `(a^{(n)}_{ii}/a^{(n−d)}_{ii})^{1/d}` — converges like O(1/n) where
    /// the plain n-th root only converges like O(log n / n).
    pub ratio_sequence: Vec<(u32, f64)>,
}

/// Estimate the Perron value `λ = sup_n (a^{(n)}_{ii})^{1/n}`. The diagonal
/// power entries are exact big integers accumulated by pulling an indicator
/// back through the columns, with support clipped to `window` (clipping only
/// lowers entries, so the supremum stays a lower bound). When the anchor has
/// period `d > 1` the subsequence `n ≡ 0 (mod d)` is used.
pub fn perron_estimate(
    matrix: &Matrix,
    anchor: Vertex,
    horizon: u32,
    window: Window,
    ceiling: f64,
) -> Result<PerronEstimate, SpectralError> {
    let window = matrix.index_set().clamp(window);
    let period = matrix.period(anchor, horizon)?;
    let mut vec: HashMap<Vertex, BigUint> = HashMap::new();
    vec.insert(anchor, BigUint::one());
    let mut sequence = Vec::new();
    let mut running_sup = Vec::new();
    let mut ratio_sequence = Vec::new();
    let mut sup = 0.0f64;
    let mut prev_ln: Option<f64> = None;
    for n in 1..=horizon {
        vec = matrix.pull_back(&vec);
        vec.retain(|v, w| window.contains(*v) && !w.is_zero());
        if n % period != 0 {
            continue;
        }
        let diag = vec.get(&anchor).cloned().unwrap_or_else(BigUint::zero);
        if diag.is_zero() {
            continue;
        }
        let ln = big_ln(&diag);
        let est = (ln / n as f64).exp();
        if let Some(p) = prev_ln {
            ratio_sequence.push((n, ((ln - p) / period as f64).exp()));
        }
        prev_ln = Some(ln);
        let best = ratio_sequence
            .last()
            .map_or(est, |&(_, r)| r.max(est));
        if best > ceiling {
            return Err(SpectralError::DivergenceDetected {
                n,
                estimate: best,
                ceiling,
            });
        }
        sup = sup.max(est);
        sequence.push((n, est));
        running_sup.push(sup);
    }
    let lambda = ratio_sequence.last().map_or(sup, |&(_, r)| r.max(sup));
    Ok(PerronEstimate {
        lambda,
        anchor,
        period,
        sequence,
        running_sup,
        ratio_sequence,
    })
}

// ---------------------------------------------------------------------------
// Column-sum bounds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ColumnSumBounds {
    pub inf: f64,
    pub sup: f64,
    /// All windowed column sums are equal — under a summable right
    /// eigenvector the common sum *is* the eigenvalue.
    pub equal: bool,
}

/// Inf/sup of column sums over the window (each column is finite). Under the
/// summable-eigenvector hypothesis these bracket the Perron value; the caller
/// is responsible for that hypothesis.
pub fn column_sum_bounds(matrix: &Matrix, window: Window) -> ColumnSumBounds {
    let window = matrix.index_set().clamp(window);
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut equal = true;
    let mut first: Option<u128> = None;
    for col in window.iter() {
        let sum: u128 = matrix
            .column_entries(col)
            .into_iter()
            .map(|(_, a)| a as u128)
            .sum();
        match first {
            None => first = Some(sum),
            Some(f) if f != sum => equal = false,
            _ => {}
        }
        inf = inf.min(sum as f64);
        sup = sup.max(sum as f64);
    }
    ColumnSumBounds { inf, sup, equal }
}

// ---------------------------------------------------------------------------
// Eigenvectors
// ---------------------------------------------------------------------------

/// A one-sided eigenvector accessor: an exact closed form, a windowed
/// numeric table, or both (the exact form wins on overlap).
#[derive(Clone)]
pub struct EigenVector {
    exact: Option<Arc<dyn Fn(Vertex) -> Quad + Send + Sync>>,
    numeric: Option<Arc<HashMap<Vertex, f64>>>,
}

impl std::fmt::Debug for EigenVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "EigenVector(exact={}, numeric={})",
            self.exact.is_some(),
            self.numeric.as_ref().map_or(0, |m| m.len())
        )
    }
}

impl EigenVector {
    pub fn from_exact(f: impl Fn(Vertex) -> Quad + Send + Sync + 'static) -> EigenVector {
        EigenVector {
            exact: Some(Arc::new(f)),
            numeric: None,
        }
    }

    pub fn from_numeric(map: HashMap<Vertex, f64>) -> EigenVector {
        EigenVector {
            exact: None,
            numeric: Some(Arc::new(map)),
        }
    }

    pub fn exact_at(&self, v: Vertex) -> Option<Quad> {
        self.exact.as_ref().map(|f| f(v))
    }

    pub fn value(&self, v: Vertex) -> f64 {
        if let Some(f) = &self.exact {
            return f(v).to_f64();
        }
        self.numeric
            .as_ref()
            .and_then(|m| m.get(&v).copied())
            .unwrap_or_else(|| panic!("eigenvector entry {v} outside the computed window"))
    }

    pub fn has_entry(&self, v: Vertex) -> bool {
        self.exact.is_some() || self.numeric.as_ref().is_some_and(|m| m.contains_key(&v))
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum Provenance {
    ClosedForm(String),
    Windowed {
        lo: Vertex,
        hi: Vertex,
        residual: f64,
    },
}

/// `(λ, ξ, η)` with `Aξ = λξ` and `ηA = λη`, all entries strictly positive.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub lambda_exact: Option<Quad>,
    pub xi: EigenVector,
    pub eta: EigenVector,
    pub provenance: Provenance,
}

/// Numerically compute the right eigenvector for a *known* eigenvalue by
/// shifted inverse iteration on the dense window truncation, normalized so
/// the anchor entry is 1. The residual is measured on the interior only (a
/// boundary ring of width `ring` is discarded, since truncation corrupts
/// rows near the edge).
pub fn right_eigenvector(
    matrix: &Matrix,
    lambda: f64,
    window: Window,
    anchor: Vertex,
    ring: usize,
) -> Result<(HashMap<Vertex, f64>, f64), SpectralError> {
    windowed_eigenvector(matrix, lambda, window, anchor, ring, false)
}

/// Left-eigenvector analogue (operates on the transposed truncation).
pub fn left_eigenvector(
    matrix: &Matrix,
    lambda: f64,
    window: Window,
    anchor: Vertex,
    ring: usize,
) -> Result<(HashMap<Vertex, f64>, f64), SpectralError> {
    windowed_eigenvector(matrix, lambda, window, anchor, ring, true)
}

fn windowed_eigenvector(
    matrix: &Matrix,
    lambda: f64,
    window: Window,
    anchor: Vertex,
    ring: usize,
    transpose: bool,
) -> Result<(HashMap<Vertex, f64>, f64), SpectralError> {
    let window = matrix.index_set().clamp(window);
    assert!(window.contains(anchor), "anchor must lie in the window");
    let n = window.len();
    let dense_u = matrix.truncate(window);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, row) in dense_u.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if transpose {
                a[(j, i)] = v as f64;
            } else {
                a[(i, j)] = v as f64;
            }
        }
    }
    // Shifted inverse iteration: converges to the truncated eigenvector
    // whose eigenvalue is nearest λ. The small shift keeps the solve
    // non-singular when λ is (nearly) an exact eigenvalue of the truncation.
    let shift = lambda + 1e-7 * lambda.max(1.0);
    let b = &a - DMatrix::<f64>::identity(n, n) * shift;
    let lu = b.lu();
    let mut x = DMatrix::<f64>::from_element(n, 1, 1.0);
    for _ in 0..200 {
        let mut y = lu.solve(&x).ok_or_else(|| SpectralError::NoPositiveSolution {
            detail: "singular shifted truncation".into(),
        })?;
        let norm = y.abs().max();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SpectralError::NoPositiveSolution {
                detail: "inverse iteration collapsed".into(),
            });
        }
        y /= norm;
        x = y;
    }
    let anchor_idx = (anchor - window.lo) as usize;
    let pivot = x[(anchor_idx, 0)];
    if pivot == 0.0 {
        return Err(SpectralError::NoPositiveSolution {
            detail: "anchor entry vanished".into(),
        });
    }
    x /= pivot;

    let interior = Window::new(
        window.lo + ring as i64,
        (window.hi - ring as i64).max(window.lo + ring as i64),
    );
    // Interior residual ‖Aξ − λξ‖∞ / ‖ξ‖∞ and positivity check.
    let ax = &a * &x;
    let mut residual = 0.0f64;
    let mut max_entry = 0.0f64;
    for v in interior.iter() {
        let i = (v - window.lo) as usize;
        let xv = x[(i, 0)];
        if xv <= 0.0 {
            return Err(SpectralError::NoPositiveSolution {
                detail: format!("interior entry at vertex {v} is {xv}"),
            });
        }
        max_entry = max_entry.max(xv.abs());
        residual = residual.max((ax[(i, 0)] - lambda * xv).abs());
    }
    let residual = residual / max_entry;
    // Return the whole window (boundary entries included, less accurate);
    // the residual certifies the interior only.
    let map: HashMap<Vertex, f64> = window
        .iter()
        .map(|v| (v, x[((v - window.lo) as usize, 0)]))
        .collect();
    Ok((map, residual))
}

/// Exact rational right eigenvector of a tridiagonal matrix on the naturals
/// by forward recurrence from `ξ₁ = 1`: row `v` of the eigen equation
/// determines `ξ_{v+1}` once `ξ_{v−1}, ξ_v` are known. Fails when a row
/// reaches outside `{v−1, v, v+1}` or the superdiagonal entry vanishes.
pub fn rational_forward_eigenvector(
    matrix: &Matrix,
    lambda: &Rat,
    len: usize,
) -> Result<Vec<Rat>, SpectralError> {
    assert_eq!(matrix.index_set(), IndexSet::Naturals);
    let mut xi: Vec<Rat> = vec![Rat::one()];
    for v in 1..=(len as i64) {
        let (entries, _) = matrix.row_entries(v, Window::new(1, len as i64 + 1));
        if entries.iter().any(|&(c, _)| (c - v).abs() > 1) {
            return Err(SpectralError::NoPositiveSolution {
                detail: format!("row {v} is not tridiagonal"),
            });
        }
        let coeff = |c: Vertex| -> Rat {
            Rat::from(num_bigint::BigInt::from(matrix.entry(v, c)))
        };
        let up = coeff(v + 1);
        if up.is_zero() {
            return Err(SpectralError::NoPositiveSolution {
                detail: format!("zero superdiagonal at row {v}"),
            });
        }
        let prev = if v >= 2 {
            &coeff(v - 1) * &xi[(v - 2) as usize]
        } else {
            Rat::zero()
        };
        let cur = &coeff(v) * &xi[(v - 1) as usize];
        let next = (lambda * &xi[(v - 1) as usize] - prev - cur) / up;
        if next <= Rat::zero() {
            return Err(SpectralError::NoPositiveSolution {
                detail: format!("entry {} is non-positive", v + 1),
            });
        }
        xi.push(next);
    }
    Ok(xi)
}

// ---------------------------------------------------------------------------
// Exact residual verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ExactResidualReport {
    pub rows_checked: usize,
    /// Rows whose support is unbounded cannot be summed term-by-term; they
    /// are listed instead of silently skipped.
    pub skipped_unbounded: Vec<Vertex>,
    pub all_zero: bool,
    pub first_violation: Option<Vertex>,
}

/// Verify `Aξ = λξ` with exact field arithmetic on every bounded row in the
/// window. Returns exact-zero or the first violating row.
pub fn verify_right_exact(
    matrix: &Matrix,
    lambda: &Quad,
    xi: &dyn Fn(Vertex) -> Quad,
    rows: Window,
) -> ExactResidualReport {
    let rows = matrix.index_set().clamp(rows);
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut first_violation = None;
    for v in rows.iter() {
        let RowSupport::Bounded { lo, hi } = matrix.row_support(v) else {
            skipped.push(v);
            continue;
        };
        let mut sum = Quad::zero();
        for c in lo..=hi {
            if !matrix.index_set().contains(c) {
                continue;
            }
            let a = matrix.entry(v, c);
            if a > 0 {
                sum = &sum + &(&Quad::from_int(a as i64) * &xi(c));
            }
        }
        checked += 1;
        if &sum - &(lambda * &xi(v)) != Quad::zero() {
            first_violation.get_or_insert(v);
        }
    }
    ExactResidualReport {
        rows_checked: checked,
        skipped_unbounded: skipped,
        all_zero: first_violation.is_none(),
        first_violation,
    }
}

/// Verify `ηA = λη` exactly on every finite column in the window (columns of
/// a diagram matrix are always finite, so nothing is skipped except columns
/// flagged unbounded).
pub fn verify_left_exact(
    matrix: &Matrix,
    lambda: &Quad,
    eta: &dyn Fn(Vertex) -> Quad,
    cols: Window,
) -> ExactResidualReport {
    let cols = matrix.index_set().clamp(cols);
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut first_violation = None;
    for v in cols.iter() {
        let entries = match matrix.try_column_entries(v) {
            Ok(e) => e,
            Err(_) => {
                skipped.push(v);
                continue;
            }
        };
        let mut sum = Quad::zero();
        for (w, a) in entries {
            sum = &sum + &(&Quad::from_int(a as i64) * &eta(w));
        }
        checked += 1;
        if &sum - &(lambda * &eta(v)) != Quad::zero() {
            first_violation.get_or_insert(v);
        }
    }
    ExactResidualReport {
        rows_checked: checked,
        skipped_unbounded: skipped,
        all_zero: first_violation.is_none(),
        first_violation,
    }
}

// ---------------------------------------------------------------------------
// Recurrence classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecurrenceVariant {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceClass {
    pub variant: RecurrenceVariant,
    /// Partial sums `S_N = Σ_{n≤N} a^{(n)}_{ii}/λⁿ`.
    pub partial_sums: Vec<f64>,
    pub horizon: u32,
    pub eta_dot_xi: Option<f64>,
    pub certificate: String,
    /// Set when the numeric verdict was replaced by a catalog's analytic
    /// classification.
    pub analytic_override: Option<String>,
}

impl RecurrenceClass {
    /// Replace the numeric verdict with an analytic classification, keeping
    /// the numeric diagnostics and recording the override.
    pub fn with_analytic(mut self, variant: RecurrenceVariant, label: &str) -> RecurrenceClass {
        if self.variant != variant {
            self.analytic_override = Some(format!(
                "numeric verdict {:?} replaced by analytic classification ({label})",
                self.variant
            ));
            self.variant = variant;
        } else {
            self.analytic_override = Some(format!("confirmed analytically ({label})"));
        }
        self
    }
}

/// Partial-sum threshold above which the return series counts as recurrence
/// evidence.
pub const RECURRENCE_THRESHOLD: f64 = 10.0;

/// Classify the matrix at `anchor` for eigenvalue `λ`: the chain is
/// recurrent when `Σ a^{(n)}_{ii}/λⁿ` diverges, and a recurrent chain is
/// positive recurrent when `η·ξ < ∞`. All verdicts are certificate-based:
///  * Transient — the return terms decay with an observed geometric ratio
///    `< 1` and a tail bound keeps the total finite;
///  * recurrent evidence — the partial sums exceed [`RECURRENCE_THRESHOLD`],
///    refined to Positive/Null by a ratio test on the `η_vξ_v` terms;
///  * otherwise Inconclusive (the question is not decidable from finitely
///    many terms; catalog entries overlay their analytic class).
pub fn classify_recurrence(
    matrix: &Matrix,
    lambda: f64,
    anchor: Vertex,
    horizon: u32,
    window: Window,
    eigen: Option<&EigenPair>,
    tol: f64,
) -> RecurrenceClass {
    let window = matrix.index_set().clamp(window);
    let mut vec: HashMap<Vertex, BigUint> = HashMap::new();
    vec.insert(anchor, BigUint::one());
    let mut terms: Vec<f64> = Vec::new();
    let mut partial_sums = Vec::new();
    let mut sum = 0.0f64;
    for n in 1..=horizon {
        vec = matrix.pull_back(&vec);
        vec.retain(|v, w| window.contains(*v) && !w.is_zero());
        let diag = vec.get(&anchor).cloned().unwrap_or_else(BigUint::zero);
        let term = if diag.is_zero() {
            0.0
        } else {
            (big_ln(&diag) - n as f64 * lambda.ln()).exp()
        };
        terms.push(term);
        sum += term;
        partial_sums.push(sum);
    }

    // Transient certificate: geometric decay of the (nonzero) return terms.
    let nonzero: Vec<f64> = terms.iter().copied().filter(|&t| t > 0.0).collect();
    let tail_geometric = nonzero.len() >= 8 && {
        let k = nonzero.len();
        let ratios: Vec<f64> = (k - 6..k).map(|i| nonzero[i] / nonzero[i - 1]).collect();
        ratios.iter().all(|&r| r < 0.95)
            && nonzero[k - 1] * 0.95 / 0.05 < tol.max(1e-6) * sum.max(1.0)
    };
    if tail_geometric && sum < RECURRENCE_THRESHOLD {
        return RecurrenceClass {
            variant: RecurrenceVariant::Transient,
            partial_sums,
            horizon,
            eta_dot_xi: None,
            certificate: format!(
                "return terms decay geometrically; partial sum {sum:.4} with bounded tail"
            ),
            analytic_override: None,
        };
    }
    if sum <= RECURRENCE_THRESHOLD {
        return RecurrenceClass {
            variant: RecurrenceVariant::Inconclusive,
            partial_sums,
            horizon,
            eta_dot_xi: None,
            certificate: format!(
                "partial sum {sum:.4} below threshold {RECURRENCE_THRESHOLD} without a decay certificate"
            ),
            analytic_override: None,
        };
    }

    // Recurrent; refine by the η·ξ summability test when eigendata is given.
    let Some(pair) = eigen else {
        return RecurrenceClass {
            variant: RecurrenceVariant::Inconclusive,
            partial_sums,
            horizon,
            eta_dot_xi: None,
            certificate: format!(
                "partial sum {sum:.4} exceeds {RECURRENCE_THRESHOLD} (recurrent), no eigendata to refine"
            ),
            analytic_override: None,
        };
    };
    let products: Vec<f64> = window
        .iter()
        .filter(|&v| pair.xi.has_entry(v) && pair.eta.has_entry(v))
        .map(|v| pair.xi.value(v) * pair.eta.value(v))
        .collect();
    let total: f64 = products.iter().sum();
    // Decay of η_vξ_v away from the anchor certifies summability; terms
    // bounded away from zero certify divergence.
    let k = products.len();
    let edge = products.iter().rev().take(5).fold(0.0f64, |a, &b| a.max(b));
    let peak = products.iter().fold(0.0f64, |a, &b| a.max(b));
    if k >= 10 && edge < 1e-6 * peak {
        RecurrenceClass {
            variant: RecurrenceVariant::PositiveRecurrent,
            partial_sums,
            horizon,
            eta_dot_xi: Some(total),
            certificate: format!(
                "recurrent (partial sum {sum:.4}); η·ξ terms decay to {edge:.3e} of peak, estimate {total:.6}"
            ),
            analytic_override: None,
        }
    } else if k >= 10 && edge > 1e-3 * peak {
        RecurrenceClass {
            variant: RecurrenceVariant::NullRecurrent,
            partial_sums,
            horizon,
            eta_dot_xi: None,
            certificate: format!(
                "recurrent (partial sum {sum:.4}); η·ξ terms stay at {edge:.3e} of peak at the window edge"
            ),
            analytic_override: None,
        }
    } else {
        RecurrenceClass {
            variant: RecurrenceVariant::Inconclusive,
            partial_sums,
            horizon,
            eta_dot_xi: Some(total),
            certificate: "recurrent, but η·ξ terms neither clearly decay nor clearly persist".into(),
            analytic_override: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Induced stochastic matrix
// ---------------------------------------------------------------------------

/// The row-stochastic matrix `p_{w,v} = a_{w,v} ξ_v / (λ ξ_w)` induced by an
/// eigenpair.
#[derive(Debug, Clone)]
pub struct StochasticMatrix {
    matrix: Matrix,
    lambda: f64,
    xi: EigenVector,
}

impl StochasticMatrix {
    pub fn p(&self, w: Vertex, v: Vertex) -> f64 {
        let a = self.matrix.entry(w, v);
        if a == 0 {
            return 0.0;
        }
        a as f64 * self.xi.value(v) / (self.lambda * self.xi.value(w))
    }

    /// Row `w` as an explicit distribution, scanning `window` (exact for
    /// bounded rows inside the window; truncated for unbounded rows).
    pub fn row_distribution(&self, w: Vertex, window: Window) -> Vec<(Vertex, f64)> {
        let (entries, _) = self.matrix.row_entries(w, window);
        entries
            .into_iter()
            .map(|(v, a)| {
                (
                    v,
                    a as f64 * self.xi.value(v) / (self.lambda * self.xi.value(w)),
                )
            })
            .collect()
    }

    /// Check `Σ_v p_{w,v} = 1` for each requested row.
    pub fn validate_rows(
        &self,
        rows: Window,
        scan: Window,
        tol: f64,
    ) -> Result<(), SpectralError> {
        for w in self.matrix.index_set().clamp(rows).iter() {
            let sum: f64 = self.row_distribution(w, scan).iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > tol {
                return Err(SpectralError::RowSumViolation { row: w, sum });
            }
        }
        Ok(())
    }

    /// n-step return probability `p^{(n)}_{vv}` by forward DP over rows.
    pub fn return_probability(&self, v: Vertex, n: u32, scan: Window) -> f64 {
        let mut dist: HashMap<Vertex, f64> = HashMap::new();
        dist.insert(v, 1.0);
        for _ in 0..n {
            let mut next: HashMap<Vertex, f64> = HashMap::new();
            for (&w, &p) in &dist {
                if p == 0.0 {
                    continue;
                }
                for (u, q) in self.row_distribution(w, scan) {
                    *next.entry(u).or_insert(0.0) += p * q;
                }
            }
            next.retain(|u, p| scan.contains(*u) && *p > 0.0);
            dist = next;
        }
        dist.get(&v).copied().unwrap_or(0.0)
    }

    /// Partial sums of the return probabilities (the λ=1 recurrence
    /// diagnostics of the induced chain).
    pub fn return_partial_sums(&self, v: Vertex, horizon: u32, scan: Window) -> Vec<f64> {
        let mut dist: HashMap<Vertex, f64> = HashMap::new();
        dist.insert(v, 1.0);
        let mut sums = Vec::new();
        let mut total = 0.0;
        for _ in 0..horizon {
            let mut next: HashMap<Vertex, f64> = HashMap::new();
            for (&w, &p) in &dist {
                for (u, q) in self.row_distribution(w, scan) {
                    *next.entry(u).or_insert(0.0) += p * q;
                }
            }
            next.retain(|u, p| scan.contains(*u) && *p > 0.0);
            dist = next;
            total += dist.get(&v).copied().unwrap_or(0.0);
            sums.push(total);
        }
        sums
    }
}

/// Build the induced stochastic matrix, validating the eigenpair's rows on
/// `check_rows` first.
pub fn stochastic_from_eigenpair(
    matrix: &Matrix,
    pair: &EigenPair,
    check_rows: Window,
    scan: Window,
) -> Result<StochasticMatrix, SpectralError> {
    let p = StochasticMatrix {
        matrix: matrix.clone(),
        lambda: pair.lambda,
        xi: pair.xi.clone(),
    };
    p.validate_rows(check_rows, scan, 1e-9)?;
    Ok(p)
}

/// Compare the n-step return probability of the induced chain with
/// `a^{(n)}_{vv}/λⁿ` (they agree identically for a true eigenpair).
pub fn verify_power_identity(
    matrix: &Matrix,
    stochastic: &StochasticMatrix,
    v: Vertex,
    n: u32,
    scan: Window,
) -> (f64, f64, f64) {
    let lhs = stochastic.return_probability(v, n, scan);
    let a_nn = matrix.power_entry(n, v, v);
    let rhs = if a_nn.is_zero() {
        0.0
    } else {
        (big_ln(&a_nn) - n as f64 * stochastic.lambda.ln()).exp()
    };
    (lhs, rhs, (lhs - rhs).abs())
}

// ---------------------------------------------------------------------------
// Summability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum TailModel {
    /// Entries beyond the window decay at least geometrically with this
    /// ratio.
    GeometricRatio(f64),
    /// An exact closed-form total is known.
    ClosedFormSum(Quad),
    /// No model: judge from the windowed terms alone.
    NumericHorizon,
}

#[derive(Debug, Clone, Serialize)]
pub enum Summability {
    FiniteSum { value: f64, exact: Option<String> },
    Divergent,
    Inconclusive,
}

/// Decide `Σ_v ξ_v < ∞` over the index set from windowed terms plus a tail
/// model.
pub fn summability(
    xi: impl Fn(Vertex) -> f64,
    window: Window,
    index_set: IndexSet,
    tail: TailModel,
) -> Summability {
    let window = index_set.clamp(window);
    let terms: Vec<f64> = window.iter().map(&xi).collect();
    let partial: f64 = terms.iter().sum();
    match tail {
        TailModel::ClosedFormSum(q) => Summability::FiniteSum {
            value: q.to_f64(),
            exact: Some(q.to_string()),
        },
        TailModel::GeometricRatio(rho) => {
            if rho >= 1.0 {
                Summability::Divergent
            } else {
                let edge = terms.first().copied().unwrap_or(0.0).max(
                    terms.last().copied().unwrap_or(0.0),
                );
                Summability::FiniteSum {
                    value: partial + edge * rho / (1.0 - rho),
                    exact: None,
                }
            }
        }
        TailModel::NumericHorizon => {
            let peak = terms.iter().fold(0.0f64, |a, &b| a.max(b));
            let edge = terms.iter().rev().take(3).fold(0.0f64, |a, &b| a.max(b));
            let lead = terms.iter().take(3).fold(0.0f64, |a, &b| a.max(b));
            let boundary = match index_set {
                IndexSet::Naturals => edge,
                IndexSet::Integers => edge.max(lead),
            };
            if boundary > 1e-3 * peak {
                // Terms do not tend to zero along the window edge.
                Summability::Divergent
            } else if boundary < 1e-9 * peak {
                Summability::FiniteSum {
                    value: partial,
                    exact: None,
                }
            } else {
                Summability::Inconclusive
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Truncated spectral radius
// ---------------------------------------------------------------------------

/// Spectral radius of the dense window truncation by power iteration — a
/// monotone (in the window) lower bound for the Perron value, and the tool
/// for exhibiting an infinite one.
pub fn truncated_spectral_radius(matrix: &Matrix, window: Window, iters: usize) -> f64 {
    let window = matrix.index_set().clamp(window);
    let n = window.len();
    let dense = matrix.truncate(window);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, row) in dense.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            a[(i, j)] = v as f64;
        }
    }
    let mut x = DMatrix::<f64>::from_element(n, 1, 1.0);
    let mut estimate = 0.0;
    for _ in 0..iters {
        let y = &a * &x;
        let norm = y.abs().max();
        if norm == 0.0 {
            return 0.0;
        }
        estimate = norm / x.abs().max();
        x = y / norm;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rint;
    use crate::matrix::MatrixDescriptor;
    use std::collections::BTreeMap;

    /// Symmetric walk matrix on Z with offsets −1,0,1 → eigenvalue a+2b at
    /// the constant vector... here entries (1,1,1) give λ = 3? No: offsets
    /// each 1 → column sums 3, λ = 3 with ξ ≡ 1.
    fn walk(a: u64, b: u64) -> Matrix {
        let mut bands = BTreeMap::new();
        bands.insert(-1, b);
        bands.insert(0, a);
        bands.insert(1, b);
        Matrix::banded(
            IndexSet::Integers,
            bands,
            MatrixDescriptor::Opaque {
                label: format!("walk({a},{b})"),
            },
        )
    }

    #[test]
    fn perron_estimate_lazy_walk() {
        // Lazy walk with column sums 3: eigenvalue 3 (equal column sums).
        let m = walk(1, 1);
        let est = perron_estimate(&m, 0, 60, Window::new(-200, 200), 1e6).unwrap();
        assert!(est.lambda > 2.97 && est.lambda <= 3.0, "{}", est.lambda);
        // Running sup is monotone.
        for w in est.running_sup.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn period_two_walk_uses_even_subsequence() {
        let m = walk(0, 1);
        let est = perron_estimate(&m, 0, 60, Window::new(-200, 200), 1e6).unwrap();
        assert_eq!(est.period, 2);
        assert!(est.lambda > 1.9 && est.lambda <= 2.0, "{}", est.lambda);
    }

    #[test]
    fn column_sums_bracket_eigenvalue() {
        let b = column_sum_bounds(&walk(2, 1), Window::new(-10, 10));
        assert_eq!((b.inf, b.sup), (4.0, 4.0));
        assert!(b.equal);
    }

    #[test]
    fn exact_residual_constant_vector() {
        let m = walk(1, 1);
        let lambda = Quad::from_int(3);
        let report = verify_right_exact(&m, &lambda, &|_| Quad::one(), Window::new(-20, 20));
        assert!(report.all_zero);
        let report = verify_left_exact(&m, &lambda, &|_| Quad::one(), Window::new(-20, 20));
        assert!(report.all_zero);
    }

    fn renewal() -> Matrix {
        // Column j feeds vertex 1 and vertex j+1; the right eigenvector at
        // λ = 2 is ξ_k = 2^{1−k} (anchor-normalized), which decays fast
        // enough that window truncation is invisible in the interior.
        Matrix::from_columns(
            IndexSet::Naturals,
            "renewal",
            |j| vec![(1, 1), (j + 1, 1)],
            |i| {
                if i == 1 {
                    RowSupport::Unbounded
                } else {
                    RowSupport::Bounded { lo: i - 1, hi: i - 1 }
                }
            },
        )
    }

    #[test]
    fn windowed_eigenvector_finds_decaying_solution() {
        let m = renewal();
        let (xi, residual) = right_eigenvector(&m, 2.0, Window::new(1, 80), 1, 5).unwrap();
        assert!(residual < 1e-10, "residual {residual}");
        for k in 1..=20i64 {
            let expected = 0.5f64.powi(k as i32 - 1);
            assert!(
                (xi[&k] - expected).abs() < 1e-8,
                "xi[{k}] = {} vs {expected}",
                xi[&k]
            );
        }
    }

    #[test]
    fn rational_recurrence_on_naturals() {
        // Tridiagonal matrix on N: row v has (1, 1, 2) at (v−1, v, v+1) and
        // row 1 has (3, 2) at (1, 2) so that ξ ≡ 1 solves Aξ = 5ξ... build
        // instead the renewal-style tridiagonal with known solution:
        // rows (v−1:2, v:1, v+1:1), row 1 (1:3, 2:1): λ=4 gives
        // ξ_{v+1} = 3ξ_v − 2ξ_{v-1}… just check consistency of the solver
        // against verify_right_exact.
        let mut bands = BTreeMap::new();
        bands.insert(-1, 2u64);
        bands.insert(0, 1);
        bands.insert(1, 1);
        let m = Matrix::banded(
            IndexSet::Naturals,
            bands,
            MatrixDescriptor::Opaque { label: "nat walk".into() },
        );
        let lambda = rint(4);
        if let Ok(xi) = rational_forward_eigenvector(&m, &lambda, 12) {
            // Each interior row of the eigen equation holds exactly.
            for v in 2..=10i64 {
                let lhs = &(&rint(2) * &xi[(v - 2) as usize]) + &xi[(v - 1) as usize]
                    + xi[v as usize].clone();
                assert_eq!(lhs, &lambda * &xi[(v - 1) as usize]);
            }
        }
    }

    #[test]
    fn classify_simple_walk_as_null_like() {
        // Symmetric walk a=0,b=1 at λ=2: recurrent (partial sums grow like
        // Σ 1/√n) but η·ξ ≡ 1 diverges — with constant eigendata supplied
        // the refinement reports NullRecurrent.
        let m = walk(0, 1);
        let pair = EigenPair {
            lambda: 2.0,
            lambda_exact: Some(Quad::from_int(2)),
            xi: EigenVector::from_exact(|_| Quad::one()),
            eta: EigenVector::from_exact(|_| Quad::one()),
            provenance: Provenance::ClosedForm("walk".into()),
        };
        let class = classify_recurrence(
            &m,
            2.0,
            0,
            400,
            Window::new(-500, 500),
            Some(&pair),
            1e-9,
        );
        assert_eq!(class.variant, RecurrenceVariant::NullRecurrent, "{}", class.certificate);
        assert!(class.partial_sums.last().unwrap() > &RECURRENCE_THRESHOLD);
    }

    #[test]
    fn stochastic_rows_sum_to_one_and_power_identity_holds() {
        let m = walk(0, 1);
        let pair = EigenPair {
            lambda: 2.0,
            lambda_exact: Some(Quad::from_int(2)),
            xi: EigenVector::from_exact(|_| Quad::one()),
            eta: EigenVector::from_exact(|_| Quad::one()),
            provenance: Provenance::ClosedForm("walk".into()),
        };
        let scan = Window::new(-50, 50);
        let p = stochastic_from_eigenpair(&m, &pair, Window::new(-10, 10), scan).unwrap();
        assert!((p.p(0, 1) - 0.5).abs() < 1e-15);
        let (lhs, rhs, diff) = verify_power_identity(&m, &p, 0, 4, scan);
        assert!((lhs - 6.0 / 16.0).abs() < 1e-12);
        assert!((rhs - 6.0 / 16.0).abs() < 1e-12);
        assert!(diff < 1e-12);
    }

    #[test]
    fn divergence_detected_for_super_exponential_diagonal() {
        // Diagonal entries m^m explode: the estimate passes any ceiling.
        let m = Matrix::from_columns(
            IndexSet::Naturals,
            "super-diagonal",
            |c| {
                let d = (c as u64).saturating_pow(c as u32);
                let mut col = vec![(c, d.max(1)), (c + 1, 1)];
                if c > 1 {
                    col.insert(0, (c - 1, 1));
                }
                col
            },
            |r| RowSupport::Bounded {
                lo: (r - 1).max(1),
                hi: r + 1,
            },
        );
        match perron_estimate(&m, 5, 30, Window::new(1, 40), 1e4) {
            Err(SpectralError::DivergenceDetected { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn all_ones_vector_is_divergent() {
        let v = summability(|_| 1.0, Window::new(1, 100), IndexSet::Naturals, TailModel::NumericHorizon);
        assert!(matches!(v, Summability::Divergent));
        let v = summability(
            |k| 0.5f64.powi(k as i32),
            Window::new(1, 100),
            IndexSet::Naturals,
            TailModel::NumericHorizon,
        );
        match v {
            Summability::FiniteSum { value, .. } => assert!((value - 1.0).abs() < 1e-9),
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn truncated_radius_grows_toward_eigenvalue() {
        let m = walk(1, 1);
        let r20 = truncated_spectral_radius(&m, Window::new(-10, 10), 200);
        let r60 = truncated_spectral_radius(&m, Window::new(-30, 30), 200);
        assert!(r20 < r60 && r60 < 3.0 + 1e-9);
        assert!(r60 > 2.98);
    }
}
