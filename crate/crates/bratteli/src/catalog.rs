//! Constructors for the library's worked examples: parametrized matrix
//! families with exact closed-form eigendata attached as independent
//! oracles, plus the special diagrams and orders used by the continuity,
//! topology, and measure machinery.
//!
//! Every entry carries whatever is known about it in closed form — the
//! eigenvalue (exact rational or quadratic surd), strictly positive right
//! and left eigenvectors, a second eigenpair where one exists, the
//! recurrence class, and the summability of the right eigenvector — so
//! numeric code paths can be tested against exact targets.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{BandSpec, Diagram, EdgeMapRule, IsoWitness};
use crate::exact::{rat, rint, Quad, Rat};
use crate::matrix::{
    IndexSet, Matrix, MatrixDescriptor, MatrixError, MatrixKernel, RowSupport, Vertex,
};
use crate::order::{EdgeOrder, OrderTable};
use crate::spectral::{EigenPair, EigenVector, Provenance, RecurrenceVariant};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog id {0:?} (see catalog::list())")]
    UnknownId(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
}

// ---------------------------------------------------------------------------
// Oracle data
// ---------------------------------------------------------------------------

pub type ExactVec = Arc<dyn Fn(Vertex) -> Quad + Send + Sync>;
pub type NumericVec = Arc<dyn Fn(Vertex) -> f64 + Send + Sync>;

/// Whether the right eigenvector is summable, and its exact total when it
/// is.
#[derive(Clone, Debug)]
pub enum XiSum {
    Finite(Quad),
    Divergent,
}

/// A second strictly positive eigenpair (families with more than one have
/// more than one tail-invariant measure).
#[derive(Clone)]
pub struct SecondEigenPair {
    pub lambda: Option<Quad>,
    pub lambda_numeric: f64,
    pub xi: Option<ExactVec>,
    pub eta: Option<ExactVec>,
}

/// Closed-form reference data attached to a catalog entry. Everything is
/// optional: special diagrams (orders, counterexamples) carry little or no
/// eigendata.
#[derive(Clone, Default)]
pub struct Oracle {
    pub lambda: Option<Quad>,
    pub lambda_numeric: Option<f64>,
    pub xi: Option<ExactVec>,
    pub eta: Option<ExactVec>,
    pub xi_numeric: Option<NumericVec>,
    pub eta_numeric: Option<NumericVec>,
    pub second: Option<SecondEigenPair>,
    pub recurrence: Option<RecurrenceVariant>,
    pub xi_sum: Option<XiSum>,
}

impl Oracle {
    pub fn lambda_f64(&self) -> Option<f64> {
        self.lambda
            .as_ref()
            .map(Quad::to_f64)
            .or(self.lambda_numeric)
    }

    pub fn xi_f64(&self, v: Vertex) -> Option<f64> {
        if let Some(f) = &self.xi {
            return Some(f(v).to_f64());
        }
        self.xi_numeric.as_ref().map(|f| f(v))
    }

    pub fn eta_f64(&self, v: Vertex) -> Option<f64> {
        if let Some(f) = &self.eta {
            return Some(f(v).to_f64());
        }
        self.eta_numeric.as_ref().map(|f| f(v))
    }
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("lambda", &self.lambda)
            .field("lambda_numeric", &self.lambda_numeric)
            .field("recurrence", &self.recurrence)
            .field("xi_sum", &self.xi_sum)
            .finish_non_exhaustive()
    }
}

// ---------------------------------------------------------------------------
// Entries
// ---------------------------------------------------------------------------

/// A fully wired worked example: the matrix (in the orientation the
/// spectral engine expects: columns list incoming edges), the diagram built
/// on it, an edge order, and the entry's closed-form oracle.
#[derive(Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub title: String,
    pub params: BTreeMap<String, Value>,
    /// The matrix spectral analyses run on. For `a7` this is the published
    /// orientation with an unbounded first column (forward powers only);
    /// the diagram below uses its transpose, which has finite columns.
    pub matrix: Matrix,
    pub diagram: Diagram,
    pub order: EdgeOrder,
    pub oracle: Oracle,
    pub properties: Vec<&'static str>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CatalogEntry({})", self.id)
    }
}

impl CatalogEntry {
    /// Assemble a [`EigenPair`] from the exact oracle data, when complete.
    pub fn eigen_pair(&self) -> Option<EigenPair> {
        let xi = self.oracle.xi.clone()?;
        let eta = self.oracle.eta.clone()?;
        let lambda = self.oracle.lambda_f64()?;
        Some(EigenPair {
            lambda,
            lambda_exact: self.oracle.lambda.clone(),
            xi: EigenVector::from_exact(move |v| xi(v)),
            eta: EigenVector::from_exact(move |v| eta(v)),
            provenance: Provenance::ClosedForm(self.id.to_string()),
        })
    }
}

/// Catalog ids with one-line summaries.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("a1", "two-sided birth-death family A1(a,b): λ=a+2b, geometric ξ, positive recurrent iff a<2b"),
        ("a2", "two-sided hopping family A2(a,b): period 2, eigenpairs (a+b, 1) and (2√(ab), (a/b)^{n/2}), null recurrent"),
        ("a3", "one-sided drift family A3(b,c,alpha): λ=b+c+αc, ξ_n=α^{1−n}, positive recurrent"),
        ("a4", "alternating-band family A4(b,r,alpha,beta): λ=b+2r, parity-dependent geometric ξ"),
        ("a5", "renewal matrix: λ=2, probability eigenvector ξ_k=2^{-k}, unique invariant probability measure"),
        ("a6", "pair renewal matrix: λ=1+√2, probability ξ, two-periodic η"),
        ("a7", "return-sequence family A7(c): λ solves Σ c_k/λ^{k+1}=1; η_k=λ^{1-k}; diagram uses the transpose"),
        ("no_measure", "growing-diagonal matrix with no tail-invariant measure of finite cylinder values"),
        ("compressible", "tree-plus-spine diagram whose adic image misses the cylinder over the tree root"),
        ("infinite_perron", "tridiagonal matrix with super-exponential diagonal: infinite eigenvalue"),
        ("slanted", "full-first-row diagram with a stationary order whose extreme path sets are empty"),
        ("alternating", "tridiagonal diagram with a two-periodic order; telescoping empties the extreme path sets"),
        ("both_discontinuous", "order with unique extreme paths where the adic map and its inverse are both discontinuous"),
        ("inverse_discontinuous", "order with unique extreme paths where only the inverse adic map is discontinuous"),
        ("continuous_vershik", "doubling-offset diagram (t_n = 2^{n-1}, two incoming edges everywhere): adic map extends to a homeomorphism"),
        ("uniform", "uniformly banded diagram (offsets -t..t): every maximal path is a discontinuity point"),
        ("iso_line", "tridiagonal (1,2,1) diagram on the integers; isomorphic to iso_folded"),
        ("iso_folded", "the integer line diagram folded onto the naturals; isomorphic to iso_line"),
    ]
}

// ---------------------------------------------------------------------------
// Parameter plumbing
// ---------------------------------------------------------------------------

fn param_u64(params: &BTreeMap<String, Value>, key: &str, default: u64) -> Result<u64, CatalogError> {
    match params.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n
            .as_u64()
            .ok_or_else(|| CatalogError::BadParam(format!("{key} must be a non-negative integer"))),
        Some(Value::String(s)) => s
            .parse()
            .map_err(|_| CatalogError::BadParam(format!("{key}={s:?} is not an integer"))),
        Some(other) => Err(CatalogError::BadParam(format!("{key}={other}"))),
    }
}

fn param_i64(params: &BTreeMap<String, Value>, key: &str, default: i64) -> Result<i64, CatalogError> {
    match params.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n
            .as_i64()
            .ok_or_else(|| CatalogError::BadParam(format!("{key} must be an integer"))),
        Some(Value::String(s)) => s
            .parse()
            .map_err(|_| CatalogError::BadParam(format!("{key}={s:?} is not an integer"))),
        Some(other) => Err(CatalogError::BadParam(format!("{key}={other}"))),
    }
}

fn param_u64_list(
    params: &BTreeMap<String, Value>,
    key: &str,
    default: &[u64],
) -> Result<Vec<u64>, CatalogError> {
    match params.get(key) {
        None => Ok(default.to_vec()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_u64()
                    .ok_or_else(|| CatalogError::BadParam(format!("{key} entries must be integers")))
            })
            .collect(),
        Some(Value::String(s)) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CatalogError::BadParam(format!("{key} entry {t:?} is not an integer")))
            })
            .collect(),
        Some(other) => Err(CatalogError::BadParam(format!("{key}={other}"))),
    }
}

fn check_known_keys(
    params: &BTreeMap<String, Value>,
    known: &[&str],
) -> Result<(), CatalogError> {
    for k in params.keys() {
        if !known.contains(&k.as_str()) {
            return Err(CatalogError::BadParam(format!(
                "unknown parameter {k:?} (expected one of {known:?})"
            )));
        }
    }
    Ok(())
}

fn echo_params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `p/q` as an exact rational wrapped in the quadratic-field type.
fn qrat(p: i64, q: i64) -> Quad {
    Quad::from_rat(rat(p, q))
}

/// Square-free decomposition `n = s²·d`.
fn squarefree(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut d = n;
    let mut f = 2u64;
    while f * f <= d {
        while d % (f * f) == 0 {
            d /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s, d)
}

// ---------------------------------------------------------------------------
// get / resolve
// ---------------------------------------------------------------------------

/// Construct a catalog entry by id with explicit parameters.
pub fn get(id: &str, params: &BTreeMap<String, Value>) -> Result<CatalogEntry, CatalogError> {
    match id {
        "a1" => {
            check_known_keys(params, &["a", "b"])?;
            entry_a1(param_u64(params, "a", 1)?, param_u64(params, "b", 1)?)
        }
        "a2" => {
            check_known_keys(params, &["a", "b"])?;
            entry_a2(param_u64(params, "a", 1)?, param_u64(params, "b", 1)?)
        }
        "a3" => {
            check_known_keys(params, &["b", "c", "alpha"])?;
            entry_a3(
                param_u64(params, "b", 1)?,
                param_u64(params, "c", 1)?,
                param_u64(params, "alpha", 2)?,
            )
        }
        "a4" => {
            check_known_keys(params, &["b", "r", "alpha", "beta"])?;
            entry_a4(
                param_u64(params, "b", 0)?,
                param_u64(params, "r", 2)?,
                param_i64(params, "alpha", 1)?,
                param_i64(params, "beta", 0)?,
            )
        }
        "a5" => {
            check_known_keys(params, &[])?;
            Ok(entry_a5())
        }
        "a6" => {
            check_known_keys(params, &[])?;
            Ok(entry_a6())
        }
        "a7" => {
            check_known_keys(params, &["c"])?;
            entry_a7(param_u64_list(params, "c", &[1])?)
        }
        "no_measure" => {
            check_known_keys(params, &[])?;
            Ok(entry_no_measure())
        }
        "compressible" => {
            check_known_keys(params, &[])?;
            Ok(entry_compressible())
        }
        "infinite_perron" => {
            check_known_keys(params, &[])?;
            Ok(entry_infinite_perron())
        }
        "slanted" => {
            check_known_keys(params, &[])?;
            Ok(entry_slanted())
        }
        "alternating" => {
            check_known_keys(params, &[])?;
            Ok(entry_alternating())
        }
        "both_discontinuous" => {
            check_known_keys(params, &[])?;
            Ok(entry_both_discontinuous())
        }
        "inverse_discontinuous" => {
            check_known_keys(params, &[])?;
            Ok(entry_inverse_discontinuous())
        }
        "continuous_vershik" => {
            check_known_keys(params, &[])?;
            Ok(entry_continuous_vershik())
        }
        "uniform" => {
            check_known_keys(params, &["t"])?;
            entry_uniform(param_i64(params, "t", 2)?)
        }
        "iso_line" => {
            check_known_keys(params, &[])?;
            Ok(entry_iso_line())
        }
        "iso_folded" => {
            check_known_keys(params, &[])?;
            Ok(entry_iso_folded())
        }
        other => Err(CatalogError::UnknownId(other.to_string())),
    }
}

/// Resolve a textual address such as `catalog:a1?a=1&b=2`, `a7?c=1,2,1`, or
/// plain `a5`.
pub fn resolve(address: &str) -> Result<CatalogEntry, CatalogError> {
    let address = address.strip_prefix("catalog:").unwrap_or(address);
    let (id, query) = match address.split_once('?') {
        Some((id, q)) => (id, Some(q)),
        None => (address, None),
    };
    let mut params = BTreeMap::new();
    if let Some(q) = query {
        for pair in q.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CatalogError::BadParam(format!("expected key=value, got {pair:?}")))?;
            let value = match v.parse::<i64>() {
                Ok(n) => Value::from(n),
                Err(_) => Value::from(v.to_string()),
            };
            params.insert(k.to_string(), value);
        }
    }
    get(id, &params)
}

/// Resolve a `Catalog` matrix descriptor (other descriptor kinds go through
/// [`Matrix::from_descriptor`]).
pub fn resolve_matrix(descriptor: &MatrixDescriptor) -> Result<Matrix, MatrixError> {
    match descriptor {
        MatrixDescriptor::Catalog { name, params } => get(name, params)
            .map(|e| e.matrix)
            .map_err(|e| MatrixError::BadDescriptor(e.to_string())),
        other => Matrix::from_descriptor(other),
    }
}

// ---------------------------------------------------------------------------
// Matrix families A1–A7
// ---------------------------------------------------------------------------

fn entry_a1(a: u64, b: u64) -> Result<CatalogEntry, CatalogError> {
    if a == 0 || b == 0 {
        return Err(CatalogError::ParamOutOfRange(format!(
            "a1 requires a ≥ 1 and b ≥ 1 (got a={a}, b={b})"
        )));
    }
    let matrix = Matrix::from_columns(
        IndexSet::Integers,
        "a1",
        move |c| match c {
            0 => vec![(-1, b), (0, a), (1, b)],
            -1 => vec![(-2, b), (-1, a), (0, b)],
            c if c >= 1 => vec![(c - 1, 2 * b), (c + 1, a)],
            c => vec![(c - 1, a), (c + 1, 2 * b)],
        },
        |r| RowSupport::Bounded { lo: r - 1, hi: r + 1 },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a1".into(),
        params: echo_params(&[("a", Value::from(a)), ("b", Value::from(b))]),
    });
    // ξ is symmetric around the double center: ξ_0 = ξ_{−1} = 1 and
    // ξ_v = (1/2^v)(a/b)^{v−1} for v ≥ 1 (mirrored for v ≤ −2). η ≡ 1.
    let (ai, bi) = (a as i64, b as i64);
    let xi: ExactVec = Arc::new(move |v: Vertex| {
        let n = if v >= 0 { v } else { -v - 1 };
        if n == 0 {
            return Quad::one();
        }
        let ratio = rat(ai, bi);
        let mut val = rat(1, 2);
        for _ in 1..n {
            val = val * &ratio / rint(2);
        }
        Quad::from_rat(val)
    });
    let summable = a < 2 * b;
    let xi_sum = if summable {
        // 2 + 2·Σ_{v≥1} (1/2^v)(a/b)^{v−1} = 2 + 2b/(2b−a).
        XiSum::Finite(Quad::from_rat(rint(2) + rat(2 * bi, 2 * bi - ai)))
    } else {
        XiSum::Divergent
    };
    let diagram = Diagram::stationary(matrix.clone()).with_band(BandSpec::constant(1, a + 2 * b));
    Ok(CatalogEntry {
        id: "a1",
        title: format!("two-sided birth-death family, a={a}, b={b}"),
        params: echo_params(&[("a", Value::from(a)), ("b", Value::from(b))]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(ai + 2 * bi)),
            xi: Some(xi),
            eta: Some(Arc::new(|_| Quad::one())),
            recurrence: summable.then_some(RecurrenceVariant::PositiveRecurrent),
            xi_sum: Some(xi_sum),
            ..Oracle::default()
        },
        properties: vec!["equal-column-sums", "banded"],
    })
}

fn entry_a2(a: u64, b: u64) -> Result<CatalogEntry, CatalogError> {
    if a == 0 || b == 0 {
        return Err(CatalogError::ParamOutOfRange(format!(
            "a2 requires a ≥ 1 and b ≥ 1 (got a={a}, b={b})"
        )));
    }
    let matrix = Matrix::from_columns(
        IndexSet::Integers,
        "a2",
        move |c| vec![(c - 1, b), (c + 1, a)],
        |r| RowSupport::Bounded { lo: r - 1, hi: r + 1 },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a2".into(),
        params: echo_params(&[("a", Value::from(a)), ("b", Value::from(b))]),
    });
    let (ai, bi) = (a as i64, b as i64);
    // Second eigenpair: λ̃ = 2√(ab) with ξ̃_n = (a/b)^{n/2} and
    // η̃_n = (b/a)^{n/2}, exact in the field Q(√(ab)).
    let (s, d) = squarefree(a * b);
    let half_pow = move |num: i64, den: i64, n: Vertex| -> Quad {
        // (num/den)^{n/2}: integer part times √(num/den) when n is odd;
        // √(num/den) = √(num·den)/den = s√d/den.
        let h = n.div_euclid(2);
        let odd = n.rem_euclid(2) == 1;
        let base = qrat(num, den);
        let mut val = base.pow(h as i32);
        if odd {
            // When ab is a perfect square (d = 1) the root is rational.
            let root = if d <= 1 {
                Quad::from_rat(rat(s as i64, den))
            } else {
                Quad::new(Rat::zero(), rat(s as i64, den), d as u32)
            };
            val = &val * &root;
        }
        val
    };
    let second_lambda = if d <= 1 {
        Quad::from_int(2 * s as i64)
    } else {
        Quad::new(Rat::zero(), rint(2 * s as i64), d as u32)
    };
    let second = SecondEigenPair {
        lambda: Some(second_lambda),
        lambda_numeric: 2.0 * ((a * b) as f64).sqrt(),
        xi: Some(Arc::new(move |n| half_pow(ai, bi, n))),
        eta: Some(Arc::new(move |n| half_pow(bi, ai, n))),
    };
    let diagram = Diagram::stationary(matrix.clone()).with_band(BandSpec::constant(1, a + b));
    Ok(CatalogEntry {
        id: "a2",
        title: format!("two-sided hopping family, a={a}, b={b}"),
        params: echo_params(&[("a", Value::from(a)), ("b", Value::from(b))]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(ai + bi)),
            xi: Some(Arc::new(|_| Quad::one())),
            eta: Some(Arc::new(|_| Quad::one())),
            second: Some(second),
            recurrence: Some(RecurrenceVariant::NullRecurrent),
            xi_sum: Some(XiSum::Divergent),
            ..Oracle::default()
        },
        properties: vec!["period-2", "two-eigenpairs", "at-least-two-invariant-measures"],
    })
}

fn entry_a3(b: u64, c: u64, alpha: u64) -> Result<CatalogEntry, CatalogError> {
    if b == 0 || c == 0 || alpha < 2 {
        return Err(CatalogError::ParamOutOfRange(format!(
            "a3 requires b ≥ 1, c ≥ 1, alpha ≥ 2 (got b={b}, c={c}, alpha={alpha})"
        )));
    }
    let ac = alpha * c;
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "a3",
        move |j| match j {
            1 => vec![(1, b + ac), (2, c)],
            2 => vec![(1, ac), (2, b), (3, c)],
            j => vec![(j - 1, ac), (j, b), (j + 1, c)],
        },
        |r| RowSupport::Bounded {
            lo: (r - 1).max(1),
            hi: r + 1,
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a3".into(),
        params: echo_params(&[
            ("b", Value::from(b)),
            ("c", Value::from(c)),
            ("alpha", Value::from(alpha)),
        ]),
    });
    let alpha_i = alpha as i64;
    let xi: ExactVec = Arc::new(move |n: Vertex| {
        // ξ_n = α^{1−n}.
        Quad::from_rat(rat(1, 1) * rat(alpha_i, 1).pow((1 - n) as i32))
    });
    let diagram = Diagram::stationary(matrix.clone());
    Ok(CatalogEntry {
        id: "a3",
        title: format!("one-sided drift family, b={b}, c={c}, alpha={alpha}"),
        params: echo_params(&[
            ("b", Value::from(b)),
            ("c", Value::from(c)),
            ("alpha", Value::from(alpha)),
        ]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int((b + c + ac) as i64)),
            xi: Some(xi),
            eta: Some(Arc::new(|_| Quad::one())),
            recurrence: Some(RecurrenceVariant::PositiveRecurrent),
            // Σ_{n≥1} α^{1−n} = α/(α−1).
            xi_sum: Some(XiSum::Finite(qrat(alpha_i, alpha_i - 1))),
            ..Oracle::default()
        },
        properties: vec!["equal-column-sums"],
    })
}

fn entry_a4(b: u64, r: u64, alpha: i64, beta: i64) -> Result<CatalogEntry, CatalogError> {
    let ri = r as i64;
    if r == 0 || alpha.abs() >= ri || beta.abs() >= ri {
        return Err(CatalogError::ParamOutOfRange(format!(
            "a4 requires r ≥ 1 and |alpha|, |beta| < r (got b={b}, r={r}, alpha={alpha}, beta={beta})"
        )));
    }
    let bu = b as i64;
    let as_u = |x: i64| -> u64 { u64::try_from(x).expect("entry must be non-negative") };
    let (rpa, rma, rpb, rmb) = (ri + alpha, ri - alpha, ri + beta, ri - beta);
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "a4",
        move |j| match j {
            1 => vec![(1, as_u(bu + ri + alpha)), (2, as_u(rma))],
            2 => vec![(1, as_u(rpb)), (2, b), (3, as_u(rmb))],
            j if j % 2 == 1 => vec![(j - 1, as_u(rpa)), (j, b), (j + 1, as_u(rma))],
            j => vec![(j - 1, as_u(rpb)), (j, b), (j + 1, as_u(rmb))],
        },
        |rr| RowSupport::Bounded {
            lo: (rr - 1).max(1),
            hi: rr + 1,
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a4".into(),
        params: echo_params(&[
            ("b", Value::from(b)),
            ("r", Value::from(r)),
            ("alpha", Value::from(alpha)),
            ("beta", Value::from(beta)),
        ]),
    });
    // ξ_1 = 1, ξ_{2n} = (r−α)^n (r−β)^{n−1} / ((r+α)^{n−1}(r+β)^n),
    // ξ_{2n+1} = ((r−α)(r−β))^n / ((r+α)(r+β))^n.
    let xi: ExactVec = Arc::new(move |m: Vertex| {
        assert!(m >= 1);
        if m == 1 {
            return Quad::one();
        }
        if m % 2 == 0 {
            let n = (m / 2) as i32;
            let val = rat(rma, 1).pow(n) * rat(rmb, 1).pow(n - 1)
                / (rat(rpa, 1).pow(n - 1) * rat(rpb, 1).pow(n));
            Quad::from_rat(val)
        } else {
            let n = ((m - 1) / 2) as i32;
            Quad::from_rat((rat(rma, 1) * rat(rmb, 1) / (rat(rpa, 1) * rat(rpb, 1))).pow(n))
        }
    });
    // Summable iff q₁q₂ < 1 with q₁ = (r−α)/(r+β), q₂ = (r−β)/(r+α).
    let summable = rma * rmb < rpa * rpb;
    let xi_sum = if summable {
        XiSum::Finite(qrat(2 * ri + beta - alpha, ri + beta))
    } else {
        XiSum::Divergent
    };
    let diagram = Diagram::stationary(matrix.clone());
    Ok(CatalogEntry {
        id: "a4",
        title: format!("alternating-band family, b={b}, r={r}, alpha={alpha}, beta={beta}"),
        params: echo_params(&[
            ("b", Value::from(b)),
            ("r", Value::from(r)),
            ("alpha", Value::from(alpha)),
            ("beta", Value::from(beta)),
        ]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(bu + 2 * ri)),
            xi: Some(xi),
            eta: Some(Arc::new(|_| Quad::one())),
            recurrence: summable.then_some(RecurrenceVariant::PositiveRecurrent),
            xi_sum: Some(xi_sum),
            ..Oracle::default()
        },
        properties: vec!["equal-column-sums-away-from-boundary"],
    })
}

fn entry_a5() -> CatalogEntry {
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "a5",
        |j| vec![(1, 1), (j + 1, 1)],
        |i| {
            if i == 1 {
                RowSupport::Unbounded
            } else {
                RowSupport::Bounded { lo: i - 1, hi: i - 1 }
            }
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a5".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "a5",
        title: "renewal matrix".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(2)),
            // Probability-normalized: ξ_k = 2^{−k}, Σξ = 1.
            xi: Some(Arc::new(|k| Quad::from_rat(rat(1, 2).pow(k as i32)))),
            eta: Some(Arc::new(|_| Quad::one())),
            recurrence: Some(RecurrenceVariant::PositiveRecurrent),
            xi_sum: Some(XiSum::Finite(Quad::one())),
            ..Oracle::default()
        },
        properties: vec!["probability-eigenvector", "unique-invariant-probability-measure"],
    }
}

fn entry_a6() -> CatalogEntry {
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "a6",
        |j| {
            if j % 2 == 1 {
                vec![(1, 1), (j + 1, 1)]
            } else {
                vec![(1, 1), (2, 1), (j + 1, 1)]
            }
        },
        |i| match i {
            1 | 2 => RowSupport::Unbounded,
            i => RowSupport::Bounded { lo: i - 1, hi: i - 1 },
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "a6".into(),
        params: BTreeMap::new(),
    });
    // λ = 1+√2; ξ₁ = √2−1 and ξ_n = 2(√2−1)^n for n ≥ 2 (Σξ = 1);
    // η alternates 1, √2, 1, √2, …
    let inv_lambda = Quad::surd(-1, 1, 2); // √2 − 1 = 1/λ
    let xi: ExactVec = Arc::new(move |n: Vertex| {
        if n == 1 {
            inv_lambda.clone()
        } else {
            &Quad::from_int(2) * &inv_lambda.pow(n as i32)
        }
    });
    let eta: ExactVec = Arc::new(|n: Vertex| {
        if n % 2 == 1 {
            Quad::one()
        } else {
            Quad::surd(0, 1, 2)
        }
    });
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "a6",
        title: "pair renewal matrix".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::surd(1, 1, 2)),
            xi: Some(xi),
            eta: Some(eta),
            recurrence: Some(RecurrenceVariant::PositiveRecurrent),
            xi_sum: Some(XiSum::Finite(Quad::one())),
            ..Oracle::default()
        },
        properties: vec!["probability-eigenvector", "surd-eigenvalue"],
    }
}

/// Published-orientation kernel for the return-sequence family: the first
/// column holds the whole sequence (unbounded support), every other column
/// has the single entry 1 on its subdiagonal. Forward (row-driven) powers
/// only.
struct ReturnSequenceKernel {
    cs: Vec<u64>,
}

impl ReturnSequenceKernel {
    fn c(&self, k: Vertex) -> u64 {
        // c_{k−1} for 1-indexed row k, cycling the parameter list.
        self.cs[((k - 1) as usize) % self.cs.len()]
    }
}

impl MatrixKernel for ReturnSequenceKernel {
    fn index_set(&self) -> IndexSet {
        IndexSet::Naturals
    }

    fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
        assert!(col != 1, "column 1 has unbounded support");
        vec![(col - 1, 1)]
    }

    fn column_is_finite(&self, col: Vertex) -> bool {
        col != 1
    }

    fn row_support(&self, row: Vertex) -> RowSupport {
        RowSupport::Bounded { lo: 1, hi: row + 1 }
    }

    fn entry(&self, row: Vertex, col: Vertex) -> u64 {
        if col == 1 {
            self.c(row)
        } else if col == row + 1 {
            1
        } else {
            0
        }
    }

    fn prefer_forward_powers(&self) -> bool {
        true
    }
}

/// Transpose of the above: finite columns everywhere, so it is a valid
/// diagram incidence matrix (the vertical column over vertex 1 realizes an
/// odometer when all c_k = 1).
struct ReturnSequenceTransposeKernel {
    cs: Vec<u64>,
}

impl MatrixKernel for ReturnSequenceTransposeKernel {
    fn index_set(&self) -> IndexSet {
        IndexSet::Naturals
    }

    fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
        let c = self.cs[((col - 1) as usize) % self.cs.len()];
        let mut out = Vec::new();
        if c > 0 {
            out.push((1, c));
        }
        out.push((col + 1, 1));
        out
    }

    fn row_support(&self, row: Vertex) -> RowSupport {
        if row == 1 {
            RowSupport::Unbounded
        } else {
            RowSupport::Bounded { lo: row - 1, hi: row - 1 }
        }
    }
}

fn entry_a7(cs: Vec<u64>) -> Result<CatalogEntry, CatalogError> {
    if cs.is_empty() || cs.iter().all(|&c| c == 0) {
        return Err(CatalogError::ParamOutOfRange(
            "a7 requires a non-empty return sequence with a positive entry".into(),
        ));
    }
    let matrix = Matrix::new(
        Arc::new(ReturnSequenceKernel { cs: cs.clone() }),
        MatrixDescriptor::Catalog {
            name: "a7".into(),
            params: echo_params(&[(
                "c",
                Value::from(cs.iter().map(|&c| Value::from(c)).collect::<Vec<_>>()),
            )]),
        },
    );
    let transpose = Matrix::new(
        Arc::new(ReturnSequenceTransposeKernel { cs: cs.clone() }),
        MatrixDescriptor::Opaque {
            label: "a7-transpose".into(),
        },
    );
    let diagram = Diagram::stationary(transpose);

    // λ solves Σ_{k≥0} c_k λ^{−(k+1)} = 1. With the cycling sequence the
    // series has the closed form S_L(λ)/(1 − λ^{−L}); bisect on λ > 1.
    let len = cs.len();
    let f = |lambda: f64| -> f64 {
        let head: f64 = cs
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 / lambda.powi(k as i32 + 1))
            .sum();
        head / (1.0 - lambda.powi(-(len as i32)))
    };
    let max_c = *cs.iter().max().unwrap();
    let (mut lo, mut hi) = (1.0 + 1e-12, max_c as f64 + 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_numeric = 0.5 * (lo + hi);
    let all_ones = cs.iter().all(|&c| c == 1);

    // η_k = λ^{1−k}; ξ by the forward recurrence ξ_{k+1} = λξ_k − c_{k−1}
    // from ξ₁ = 1.
    let eta_numeric: NumericVec = Arc::new(move |k| lambda_numeric.powi(1 - k as i32));
    let cs2 = cs.clone();
    let xi_numeric: NumericVec = Arc::new(move |k| {
        let mut xi = 1.0f64;
        for i in 1..k {
            xi = lambda_numeric * xi - cs2[((i - 1) as usize) % cs2.len()] as f64;
        }
        xi
    });
    let (lambda, xi, eta): (Option<Quad>, Option<ExactVec>, Option<ExactVec>) = if all_ones {
        (
            Some(Quad::from_int(2)),
            Some(Arc::new(|_| Quad::one())),
            Some(Arc::new(|k| Quad::from_rat(rat(1, 2).pow(k as i32 - 1)))),
        )
    } else {
        (None, None, None)
    };
    Ok(CatalogEntry {
        id: "a7",
        title: format!("return-sequence family, c={cs:?} (cycled)"),
        params: echo_params(&[(
            "c",
            Value::from(cs.iter().map(|&c| Value::from(c)).collect::<Vec<_>>()),
        )]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda,
            lambda_numeric: Some(lambda_numeric),
            xi,
            eta,
            xi_numeric: Some(xi_numeric),
            eta_numeric: Some(eta_numeric),
            recurrence: Some(RecurrenceVariant::PositiveRecurrent),
            xi_sum: all_ones.then_some(XiSum::Divergent),
            ..Oracle::default()
        },
        properties: vec!["published-orientation-has-unbounded-column", "diagram-uses-transpose"],
    })
}

// ---------------------------------------------------------------------------
// Counterexamples and special diagrams
// ---------------------------------------------------------------------------

fn entry_no_measure() -> CatalogEntry {
    // Growing diagonal 2, 3, 4, … plus a subdiagonal of ones: ancestor
    // cones concentrate all mass, so no tail-invariant measure assigns
    // finite positive values to cylinders.
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "no_measure",
        |v| vec![(v, v as u64 + 1), (v + 1, 1)],
        |r| RowSupport::Bounded {
            lo: (r - 1).max(1),
            hi: r,
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "no_measure".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "no_measure",
        title: "growing-diagonal diagram without tail-invariant measures".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle::default(),
        properties: vec!["no-tail-invariant-measure", "cone-collapse"],
    }
}

fn entry_compressible() -> CatalogEntry {
    // Level n holds a binary tree 1..2^n plus an infinite spine 2^n + k.
    // Tree vertices receive one edge from their parent and one from the
    // spine head; spine vertices receive edges only from the spine. Under
    // the left-to-right order every successor edge has a spine source, so
    // the adic image never enters the cylinder over the tree root.
    let rule = |n: usize| {
        assert!(n < 40, "level index too deep for the doubling construction");
        let pow = 1i64 << n;
        let pow_next = 1i64 << (n + 1);
        Matrix::from_columns(
            IndexSet::Naturals,
            "compressible",
            move |u| {
                if u <= pow_next {
                    vec![((u + 1) / 2, 1), (pow + 1, 1)]
                } else {
                    let k = u - pow_next;
                    if k == 1 {
                        vec![(pow + 1, 2), (pow + 2, 1)]
                    } else {
                        vec![(pow + k - 1, 1), (pow + k, 2), (pow + k + 1, 1)]
                    }
                }
            },
            move |s| {
                if s <= pow {
                    RowSupport::Bounded {
                        lo: 2 * s - 1,
                        hi: 2 * s,
                    }
                } else if s == pow + 1 {
                    RowSupport::Bounded {
                        lo: 1,
                        hi: pow_next + 2,
                    }
                } else {
                    let k = s - pow;
                    RowSupport::Bounded {
                        lo: pow_next + k - 1,
                        hi: pow_next + k + 1,
                    }
                }
            },
        )
    };
    let diagram = Diagram::from_rule(IndexSet::Naturals, rule);
    CatalogEntry {
        id: "compressible",
        title: "tree-plus-spine diagram with a compressible adic map".into(),
        params: BTreeMap::new(),
        matrix: diagram.level_matrix(0),
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle::default(),
        properties: vec![
            "no-maximal-paths",
            "adic-image-misses-root-cylinder",
            "no-invariant-probability-measure",
        ],
    }
}

fn entry_infinite_perron() -> CatalogEntry {
    // Tridiagonal on the integers with diagonal |m|^{|m|} (1 at the
    // origin): the truncated spectral radius grows without bound. Entries
    // saturate at u64::MAX, which only understates the growth.
    let diag = |m: Vertex| -> u64 {
        let a = m.unsigned_abs();
        if a == 0 {
            1
        } else {
            a.saturating_pow(a.min(u32::MAX as u64) as u32).max(1)
        }
    };
    let matrix = Matrix::from_columns(
        IndexSet::Integers,
        "infinite_perron",
        move |c| vec![(c - 1, 1), (c, diag(c)), (c + 1, 1)],
        |r| RowSupport::Bounded { lo: r - 1, hi: r + 1 },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "infinite_perron".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "infinite_perron",
        title: "super-exponential diagonal with infinite eigenvalue".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle::default(),
        properties: vec!["infinite-perron-value"],
    }
}

fn entry_slanted() -> CatalogEntry {
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "slanted",
        |j| vec![(1, 1), (j + 1, 1), (j + 2, 1)],
        |r| {
            if r == 1 {
                RowSupport::Unbounded
            } else {
                RowSupport::Bounded {
                    lo: (r - 2).max(1),
                    hi: r - 1,
                }
            }
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "slanted".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    let order = EdgeOrder::from_table(OrderTable::from_json(include_str!(
        "../data/order_slanted.json"
    )));
    CatalogEntry {
        id: "slanted",
        title: "full-first-row diagram with empty extreme path sets".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order,
        oracle: Oracle::default(),
        properties: vec!["empty-extreme-paths", "minimal-homeomorphism"],
    }
}

fn entry_alternating() -> CatalogEntry {
    let mut bands = BTreeMap::new();
    bands.insert(-1, 1u64);
    bands.insert(0, 2);
    bands.insert(1, 1);
    let matrix = Matrix::banded(
        IndexSet::Naturals,
        bands,
        MatrixDescriptor::Catalog {
            name: "alternating".into(),
            params: BTreeMap::new(),
        },
    );
    let diagram = Diagram::stationary(matrix.clone());
    let order = EdgeOrder::from_table(OrderTable::from_json(include_str!(
        "../data/order_alternating.json"
    )));
    CatalogEntry {
        id: "alternating",
        title: "tridiagonal diagram with a two-periodic order".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order,
        oracle: Oracle::default(),
        properties: vec!["alternating-order", "telescopes-to-empty-extremes"],
    }
}

fn entry_both_discontinuous() -> CatalogEntry {
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "both_discontinuous",
        |v| match v {
            1 => vec![(1, 2), (2, 1)],
            2 => vec![(2, 1), (3, 1), (4, 1)],
            v => vec![(2, 1), (v + 1, 1), (v + 2, 1)],
        },
        |r| match r {
            1 => RowSupport::Bounded { lo: 1, hi: 1 },
            2 => RowSupport::Unbounded,
            3 => RowSupport::Bounded { lo: 2, hi: 2 },
            4 => RowSupport::Bounded { lo: 2, hi: 3 },
            r => RowSupport::Bounded { lo: r - 2, hi: r - 1 },
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "both_discontinuous".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    let order = EdgeOrder::from_table(OrderTable::from_json(include_str!(
        "../data/order_both_discontinuous.json"
    )));
    CatalogEntry {
        id: "both_discontinuous",
        title: "unique extreme paths; adic map and inverse both discontinuous".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order,
        oracle: Oracle::default(),
        properties: vec!["unique-extreme-paths", "forward-discontinuous", "inverse-discontinuous"],
    }
}

fn entry_inverse_discontinuous() -> CatalogEntry {
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "inverse_discontinuous",
        |v| match v {
            1 => vec![(1, 2)],
            2 => vec![(1, 1), (2, 1), (3, 1), (4, 1)],
            v => vec![(2, 1), (v + 1, 1), (v + 2, 1)],
        },
        |r| match r {
            1 => RowSupport::Bounded { lo: 1, hi: 2 },
            2 => RowSupport::Unbounded,
            3 => RowSupport::Bounded { lo: 2, hi: 2 },
            4 => RowSupport::Bounded { lo: 2, hi: 3 },
            r => RowSupport::Bounded { lo: r - 2, hi: r - 1 },
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "inverse_discontinuous".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    let order = EdgeOrder::from_table(OrderTable::from_json(include_str!(
        "../data/order_inverse_discontinuous.json"
    )));
    CatalogEntry {
        id: "inverse_discontinuous",
        title: "unique extreme paths; forward adic map continuous, inverse not".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order,
        oracle: Oracle::default(),
        properties: vec!["unique-extreme-paths", "forward-continuous", "inverse-discontinuous"],
    }
}

fn entry_continuous_vershik() -> CatalogEntry {
    // Two incoming edges at every vertex, from v − t_n and v + t_n with
    // t_0 = 1 and t_n = 2^{n−1}: each offset equals the sum of all previous
    // offsets, the exact boundary case where the adic map extends to a
    // homeomorphism by pairing maximal with minimal paths vertex by vertex.
    let t = |n: usize| -> i64 {
        assert!(n < 60, "level too deep for the doubling offsets");
        if n == 0 {
            1
        } else {
            1i64 << (n - 1)
        }
    };
    let rule = move |n: usize| {
        let tn = t(n);
        let mut bands = BTreeMap::new();
        bands.insert(-tn, 1u64);
        bands.insert(tn, 1);
        Matrix::banded(
            IndexSet::Integers,
            bands,
            MatrixDescriptor::Opaque {
                label: format!("doubling offsets, level {n}"),
            },
        )
    };
    let diagram = Diagram::from_rule(IndexSet::Integers, rule)
        .with_band(BandSpec::from_fns(t, |_| 2));
    CatalogEntry {
        id: "continuous_vershik",
        title: "doubling-offset diagram whose adic map extends to a homeomorphism".into(),
        params: BTreeMap::new(),
        matrix: diagram.level_matrix(0),
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle::default(),
        properties: vec![
            "band-equals-partial-sums",
            "homeomorphic-extension",
            "vertex-pairing",
        ],
    }
}

fn entry_uniform(t: i64) -> Result<CatalogEntry, CatalogError> {
    if t < 1 {
        return Err(CatalogError::ParamOutOfRange(format!(
            "uniform requires t ≥ 1 (got {t})"
        )));
    }
    let mut bands = BTreeMap::new();
    for off in -t..=t {
        bands.insert(off, 1u64);
    }
    let matrix = Matrix::banded(
        IndexSet::Integers,
        bands,
        MatrixDescriptor::Catalog {
            name: "uniform".into(),
            params: echo_params(&[("t", Value::from(t))]),
        },
    );
    let diagram = Diagram::stationary(matrix.clone())
        .with_band(BandSpec::constant(t, (2 * t + 1) as u64));
    Ok(CatalogEntry {
        id: "uniform",
        title: format!("uniformly banded diagram, offsets -{t}..{t}"),
        params: echo_params(&[("t", Value::from(t))]),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle::default(),
        properties: vec!["uniformly-bounded-band", "every-maximal-path-discontinuity"],
    })
}

// ---------------------------------------------------------------------------
// Isomorphic pair
// ---------------------------------------------------------------------------

fn entry_iso_line() -> CatalogEntry {
    let mut bands = BTreeMap::new();
    bands.insert(-1, 1u64);
    bands.insert(0, 2);
    bands.insert(1, 1);
    let matrix = Matrix::banded(
        IndexSet::Integers,
        bands,
        MatrixDescriptor::Catalog {
            name: "iso_line".into(),
            params: BTreeMap::new(),
        },
    );
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "iso_line",
        title: "tridiagonal (1,2,1) diagram on the integers".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(4)),
            xi: Some(Arc::new(|_| Quad::one())),
            eta: Some(Arc::new(|_| Quad::one())),
            xi_sum: Some(XiSum::Divergent),
            ..Oracle::default()
        },
        properties: vec!["isomorphism-pair"],
    }
}

fn entry_iso_folded() -> CatalogEntry {
    // The integer line folded onto the naturals by 0,−1,1,−2,2,… ↦ 1,2,3,4,5,…
    let matrix = Matrix::from_columns(
        IndexSet::Naturals,
        "iso_folded",
        |v| match v {
            1 => vec![(1, 2), (2, 1), (3, 1)],
            2 => vec![(1, 1), (2, 2), (4, 1)],
            3 => vec![(1, 1), (3, 2), (5, 1)],
            v => vec![(v - 2, 1), (v, 2), (v + 2, 1)],
        },
        |r| match r {
            1 => RowSupport::Bounded { lo: 1, hi: 3 },
            2 => RowSupport::Bounded { lo: 1, hi: 4 },
            3 => RowSupport::Bounded { lo: 1, hi: 5 },
            r => RowSupport::Bounded { lo: r - 2, hi: r + 2 },
        },
    )
    .with_descriptor(MatrixDescriptor::Catalog {
        name: "iso_folded".into(),
        params: BTreeMap::new(),
    });
    let diagram = Diagram::stationary(matrix.clone());
    CatalogEntry {
        id: "iso_folded",
        title: "integer line diagram folded onto the naturals".into(),
        params: BTreeMap::new(),
        matrix,
        diagram,
        order: EdgeOrder::left_to_right(),
        oracle: Oracle {
            lambda: Some(Quad::from_int(4)),
            xi: Some(Arc::new(|_| Quad::one())),
            eta: Some(Arc::new(|_| Quad::one())),
            xi_sum: Some(XiSum::Divergent),
            ..Oracle::default()
        },
        properties: vec!["isomorphism-pair"],
    }
}

/// The isomorphism witness between `iso_line` and `iso_folded`: the
/// level-independent vertex bijection v ↦ 2v+1 (v ≥ 0), v ↦ −2v (v < 0)
/// with the copy-preserving induced edge map.
pub fn isomorphism_pair() -> (Diagram, Diagram, IsoWitness) {
    let line = entry_iso_line().diagram;
    let folded = entry_iso_folded().diagram;
    let witness = IsoWitness {
        vertex_map: Arc::new(|_level, v| if v >= 0 { 2 * v + 1 } else { -2 * v }),
        edge_map: EdgeMapRule::InducedByVertexMap,
    };
    (line, folded, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::verify_isomorphism;
    use crate::matrix::Window;
    use crate::spectral::{verify_left_exact, verify_right_exact};

    fn exact_pair_checks(entry: &CatalogEntry, window: Window) {
        let lambda = entry.oracle.lambda.clone().expect("exact eigenvalue");
        let xi = entry.oracle.xi.clone().expect("exact right vector");
        let eta = entry.oracle.eta.clone().expect("exact left vector");
        let right = verify_right_exact(&entry.matrix, &lambda, &*xi, window);
        assert!(
            right.all_zero,
            "{}: right residual at row {:?}",
            entry.id, right.first_violation
        );
        assert!(right.rows_checked > 0);
        let left = verify_left_exact(&entry.matrix, &lambda, &*eta, window);
        assert!(
            left.all_zero,
            "{}: left residual at column {:?}",
            entry.id, left.first_violation
        );
    }

    #[test]
    fn a1_exact_eigendata() {
        let e = entry_a1(1, 1).unwrap();
        exact_pair_checks(&e, Window::new(-25, 25));
        // ξ symmetric: ξ_2 = ξ_{−3} = 1/4 for a=b=1.
        let xi = e.oracle.xi.clone().unwrap();
        assert_eq!(xi(2), qrat(1, 4));
        assert_eq!(xi(-3), qrat(1, 4));
        let e2 = entry_a1(1, 2).unwrap();
        exact_pair_checks(&e2, Window::new(-25, 25));
    }

    #[test]
    fn a2_both_eigenpairs_exact() {
        let e = entry_a2(1, 2).unwrap();
        exact_pair_checks(&e, Window::new(-25, 25));
        let second = e.oracle.second.clone().unwrap();
        let lambda2 = second.lambda.clone().unwrap();
        assert_eq!(lambda2, Quad::surd(0, 2, 2)); // 2√2
        let xi2 = second.xi.clone().unwrap();
        let eta2 = second.eta.clone().unwrap();
        let right = verify_right_exact(&e.matrix, &lambda2, &*xi2, Window::new(-20, 20));
        assert!(right.all_zero, "{:?}", right.first_violation);
        let left = verify_left_exact(&e.matrix, &lambda2, &*eta2, Window::new(-20, 20));
        assert!(left.all_zero, "{:?}", left.first_violation);
    }

    #[test]
    fn a3_a4_exact_eigendata() {
        let e = entry_a3(1, 1, 2).unwrap();
        assert_eq!(e.oracle.lambda.clone().unwrap(), Quad::from_int(4));
        exact_pair_checks(&e, Window::new(1, 50));
        let e = entry_a4(0, 2, 1, 0).unwrap();
        assert_eq!(e.oracle.lambda.clone().unwrap(), Quad::from_int(4));
        exact_pair_checks(&e, Window::new(1, 50));
        match e.oracle.xi_sum.clone().unwrap() {
            XiSum::Finite(total) => assert_eq!(total, qrat(3, 2)),
            XiSum::Divergent => panic!("expected finite sum"),
        }
    }

    #[test]
    fn a5_a6_exact_eigendata() {
        let e = entry_a5();
        exact_pair_checks(&e, Window::new(1, 50));
        let e = entry_a6();
        exact_pair_checks(&e, Window::new(1, 50));
        // Probability normalization: partial sums approach 1 from below.
        let xi = e.oracle.xi.clone().unwrap();
        let total: f64 = (1..=60).map(|n| xi(n).to_f64()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a7_all_ones_is_the_doubling_odometer() {
        let e = entry_a7(vec![1]).unwrap();
        assert_eq!(e.oracle.lambda.clone().unwrap(), Quad::from_int(2));
        assert!((e.oracle.lambda_numeric.unwrap() - 2.0).abs() < 1e-9);
        // ξ ≡ 1 for the published orientation.
        let xi = e.oracle.xi_numeric.clone().unwrap();
        for k in 1..=20 {
            assert!((xi(k) - 1.0).abs() < 1e-6, "xi({k}) = {}", xi(k));
        }
        // Published-orientation truncation on [1,3].
        assert_eq!(
            e.matrix.truncate(Window::new(1, 3)),
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![1, 0, 0]]
        );
        // Exact eigendata in the published orientation.
        exact_pair_checks(&e, Window::new(1, 40));
    }

    #[test]
    fn a7_general_lambda_solves_return_equation() {
        let e = entry_a7(vec![2, 1]).unwrap();
        let l = e.oracle.lambda_numeric.unwrap();
        // Σ c_k/λ^{k+1} over the cycled sequence must be 1.
        let mut sum = 0.0;
        for k in 0..200 {
            let c = [2.0, 1.0][k % 2];
            sum += c / l.powi(k as i32 + 1);
        }
        assert!((sum - 1.0).abs() < 1e-9, "λ={l}, sum={sum}");
    }

    #[test]
    fn a2_truncation_matches_hand_matrix() {
        let e = entry_a2(2, 3).unwrap();
        assert_eq!(
            e.matrix.truncate(Window::new(-1, 1)),
            vec![vec![0, 3, 0], vec![2, 0, 3], vec![0, 2, 0]]
        );
    }

    #[test]
    fn resolve_addresses() {
        let e = resolve("catalog:a1?a=1&b=2").unwrap();
        assert_eq!(e.id, "a1");
        assert_eq!(
            e.oracle.lambda.clone().unwrap(),
            Quad::from_int(5)
        );
        let e = resolve("a7?c=1,2,1").unwrap();
        assert_eq!(e.id, "a7");
        assert!(resolve("nope").is_err());
        assert!(resolve("a1?zz=3").is_err());
        assert!(resolve("a4?r=1&alpha=1").is_err()); // |alpha| < r violated
    }

    #[test]
    fn figure_orders_are_total_on_their_fibers() {
        for id in ["slanted", "alternating", "both_discontinuous", "inverse_discontinuous"] {
            let e = resolve(id).unwrap();
            for level in 0..3 {
                for v in 1..=8 {
                    let fiber = e.order.fiber(&e.diagram, level, v);
                    let count: u64 = e
                        .diagram
                        .incoming(level, v)
                        .into_iter()
                        .map(|(_, m)| m)
                        .sum();
                    assert_eq!(fiber.len() as u64, count, "{id}: fiber of {v} at {level}");
                }
            }
        }
    }

    #[test]
    fn isomorphism_witness_verifies() {
        let (line, folded, witness) = isomorphism_pair();
        match verify_isomorphism(&line, &folded, &witness, 4, Window::new(-8, 8)) {
            crate::diagram::IsoVerdict::VerifiedToDepth(d) => assert_eq!(d, 4),
            crate::diagram::IsoVerdict::Violation { level, detail } => {
                panic!("violation at level {level}: {detail}")
            }
        }
    }

    #[test]
    fn compressible_levels_have_consistent_counts() {
        let e = entry_compressible();
        // Tree vertex 3 at level 2 receives its parent edge (from 2) and a
        // spine-head edge (from 2^1+1 = 3).
        let inc = e.diagram.incoming(1, 3);
        assert_eq!(inc, vec![(2, 1), (3, 1)]);
        // Spine head at level 2 is 2^2+1 = 5: double edge from old head 3,
        // single from 4.
        let inc = e.diagram.incoming(1, 5);
        assert_eq!(inc, vec![(3, 2), (4, 1)]);
    }

    #[test]
    fn doubling_offsets_satisfy_boundary_condition() {
        let e = entry_continuous_vershik();
        let band = e.diagram.band().unwrap();
        // Each offset equals the sum of all earlier offsets, so no offset is
        // ever strictly below a trailing partial sum — the exact boundary
        // case where the adic map stays continuous.
        for m in 1..12 {
            let full: i64 = (0..m).map(|i| band.t(i)).sum();
            assert_eq!(band.t(m), full);
            for n in 1..m {
                let tail: i64 = (n..m).map(|i| band.t(i)).sum();
                assert!(band.t(m) >= tail);
            }
        }
    }
}
