//! Countably-infinite non-negative integer matrices with structured supports.
//!
//! A matrix `A = (a_{w,v})` here plays the role of the transposed incidence
//! matrix of a graded graph with countably infinite vertex levels: the entry
//! `a_{w,v}` counts the edges from vertex `w` on one level to vertex `v` on
//! the next. The single structural axiom is that **every column has finite
//! support** — each vertex has finitely many incoming edges — while rows may
//! be infinite (a vertex may emit edges to infinitely many targets).
//!
//! Everything downstream (path counting, heights, Perron data, measures)
//! leans on that asymmetry: all exact computations walk *backwards* through
//! finite column supports and therefore terminate, even though the matrix is
//! infinite. Powers and path counts use arbitrary-precision integers because
//! entries of `A^n` grow like `λ^n`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Vertex index. Levels are identified either with the integers or with the
/// positive naturals, so a signed machine integer is enough for any window a
/// desk-scale computation can touch.
pub type Vertex = i64;

/// Which countable index set the rows/columns (and every diagram level) use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSet {
    /// Two-sided: vertices are all integers.
    Integers,
    /// One-sided: vertices are 1, 2, 3, ...
    Naturals,
}

impl IndexSet {
    /// Is `v` a valid vertex for this index set?
    pub fn contains(self, v: Vertex) -> bool {
        match self {
            IndexSet::Integers => true,
            IndexSet::Naturals => v >= 1,
        }
    }

    /// Clamp a window to the valid vertex range.
    pub fn clamp(self, w: Window) -> Window {
        match self {
            IndexSet::Integers => w,
            IndexSet::Naturals => Window::new(w.lo.max(1), w.hi.max(1)),
        }
    }
}

/// An inclusive, finite range of vertex indices used to truncate infinite
/// objects for display, numerics, and finite-horizon verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vertex,
    pub hi: Vertex,
}

impl Window {
    pub fn new(lo: Vertex, hi: Vertex) -> Self {
        assert!(lo <= hi, "window must satisfy lo <= hi (got {lo}..{hi})");
        Window { lo, hi }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.lo..=self.hi
    }

    /// Widen the window by `pad` on both sides (respecting the index set).
    pub fn padded(&self, pad: i64, index_set: IndexSet) -> Window {
        index_set.clamp(Window::new(self.lo - pad, self.hi + pad))
    }
}

/// How far a row's support is known to extend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSupport {
    /// The row is zero outside `[lo, hi]`.
    Bounded { lo: Vertex, hi: Vertex },
    /// The row provably has infinitely many non-zero entries (e.g. a vertex
    /// with an edge to every vertex of the next level).
    Unbounded,
}

/// The defining data of an infinite matrix: finite columns plus a row-support
/// oracle. Implementations must be pure — the same query always returns the
/// same answer — so memoization and parallel use are safe.
pub trait MatrixKernel: Send + Sync {
    fn index_set(&self) -> IndexSet;

    /// Complete (finite) support of a column: all `(row, value)` with
    /// `value > 0`, sorted by row.
    fn column(&self, col: Vertex) -> Vec<(Vertex, u64)>;

    /// A sound over-approximation of the row's support. `Bounded` must cover
    /// every non-zero entry of the row.
    fn row_support(&self, row: Vertex) -> RowSupport;

    /// Single entry; the default scans the (finite) column.
    fn entry(&self, row: Vertex, col: Vertex) -> u64 {
        self.column(col)
            .into_iter()
            .find(|&(r, _)| r == row)
            .map(|(_, v)| v)
            .unwrap_or(0)
    }

    /// Whether the column's support is certified finite. Almost every matrix
    /// returns true everywhere; a matrix with an unbounded column (legal as a
    /// matrix, not as a diagram incidence) overrides this, and `column` must
    /// then never be called for that column.
    fn column_is_finite(&self, _col: Vertex) -> bool {
        true
    }

    /// Matrices with an unbounded column but bounded rows compute powers
    /// source-forward instead of target-backward.
    fn prefer_forward_powers(&self) -> bool {
        false
    }
}

/// Errors raised by matrix construction and queries.
#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error("column {0} support cannot be certified finite")]
    ColumnSupportUnbounded(Vertex),
    #[error("no return to vertex {vertex} within horizon {horizon}")]
    NoReturnFound { vertex: Vertex, horizon: u32 },
    #[error("invalid matrix descriptor: {0}")]
    BadDescriptor(String),
}

// ---------------------------------------------------------------------------
// Serializable descriptors
// ---------------------------------------------------------------------------

/// Serializable description of a matrix. Round-trips bit-exactly through
/// JSON (`serde_json` with ordered maps). See `schemas/matrix_descriptor.md`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixDescriptor {
    /// Constant values along a finite set of diagonals: `a_{r,c} =
    /// entries[c - r]` when `c - r` is a listed offset, else 0.
    Banded {
        index_set: IndexSet,
        offsets: Vec<i64>,
        /// Offset (as decimal string, for JSON key stability) -> value.
        entries: BTreeMap<String, u64>,
    },
    /// A named catalog family with parameters.
    Catalog {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, serde_json::Value>,
    },
    /// Column-oriented closed-form support pattern: the first rule whose
    /// column interval contains `c` decides column `c`.
    Rows {
        index_set: IndexSet,
        pattern: Vec<ColumnRule>,
    },
    /// Built programmatically; carries only a label. Not reconstructible
    /// from JSON (reports embed it for provenance only).
    Opaque { label: String },
}

/// One rule of a `Rows` pattern: for columns `c` in `[from, to]`
/// (unbounded above when `to` is absent), the column support is the listed
/// entries. Row references are either fixed vertices or offsets from `c`,
/// so every column is finite by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnRule {
    pub from: Vertex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<Vertex>,
    pub entries: Vec<ColumnEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnEntry {
    pub row: RowRef,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowRef {
    /// Row `c + offset` for column `c`.
    Offset(i64),
    /// A fixed row regardless of the column.
    Fixed(Vertex),
}

// ---------------------------------------------------------------------------
// Matrix value
// ---------------------------------------------------------------------------

/// An immutable countably-infinite non-negative integer matrix. Cheap to
/// clone (the kernel is shared); all operations are pure.
#[derive(Clone)]
pub struct Matrix {
    kernel: Arc<dyn MatrixKernel>,
    descriptor: MatrixDescriptor,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl Matrix {
    pub fn new(kernel: Arc<dyn MatrixKernel>, descriptor: MatrixDescriptor) -> Self {
        Matrix { kernel, descriptor }
    }

    /// Wrap closures as a matrix kernel (used by the catalog).
    pub fn from_columns<C, R>(
        index_set: IndexSet,
        label: &str,
        column: C,
        row_support: R,
    ) -> Self
    where
        C: Fn(Vertex) -> Vec<(Vertex, u64)> + Send + Sync + 'static,
        R: Fn(Vertex) -> RowSupport + Send + Sync + 'static,
    {
        struct ClosureKernel<C, R> {
            index_set: IndexSet,
            column: C,
            row_support: R,
        }
        impl<C, R> MatrixKernel for ClosureKernel<C, R>
        where
            C: Fn(Vertex) -> Vec<(Vertex, u64)> + Send + Sync,
            R: Fn(Vertex) -> RowSupport + Send + Sync,
        {
            fn index_set(&self) -> IndexSet {
                self.index_set
            }
            fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
                let mut entries = (self.column)(col);
                entries.retain(|&(_, v)| v > 0);
                entries.sort_by_key(|&(r, _)| r);
                entries
            }
            fn row_support(&self, row: Vertex) -> RowSupport {
                (self.row_support)(row)
            }
        }
        Matrix::new(
            Arc::new(ClosureKernel {
                index_set,
                column,
                row_support,
            }),
            MatrixDescriptor::Opaque {
                label: label.to_string(),
            },
        )
    }

    /// Build a matrix from a serializable descriptor. `Catalog` descriptors
    /// are resolved by the caller (see the catalog module) and rejected here.
    pub fn from_descriptor(descriptor: &MatrixDescriptor) -> Result<Matrix, MatrixError> {
        match descriptor {
            MatrixDescriptor::Banded {
                index_set,
                offsets,
                entries,
            } => {
                let mut map: BTreeMap<i64, u64> = BTreeMap::new();
                for (k, &v) in entries {
                    let off: i64 = k.parse().map_err(|_| {
                        MatrixError::BadDescriptor(format!("non-integer band offset key {k:?}"))
                    })?;
                    if !offsets.contains(&off) {
                        return Err(MatrixError::BadDescriptor(format!(
                            "entry for offset {off} not in offsets list"
                        )));
                    }
                    map.insert(off, v);
                }
                for off in offsets {
                    if !map.contains_key(off) {
                        return Err(MatrixError::BadDescriptor(format!(
                            "offset {off} has no entry value"
                        )));
                    }
                }
                Ok(Matrix::banded(*index_set, map, descriptor.clone()))
            }
            MatrixDescriptor::Rows { index_set, pattern } => {
                Ok(Matrix::rows(*index_set, pattern.clone(), descriptor.clone()))
            }
            MatrixDescriptor::Catalog { name, .. } => Err(MatrixError::BadDescriptor(format!(
                "catalog descriptor {name:?} must be resolved through the catalog"
            ))),
            MatrixDescriptor::Opaque { label } => Err(MatrixError::BadDescriptor(format!(
                "opaque descriptor {label:?} is not constructible"
            ))),
        }
    }

    /// Constant-band matrix: `a_{r,c} = bands[c - r]`.
    pub fn banded(
        index_set: IndexSet,
        bands: BTreeMap<i64, u64>,
        descriptor: MatrixDescriptor,
    ) -> Matrix {
        struct BandedKernel {
            index_set: IndexSet,
            bands: BTreeMap<i64, u64>,
        }
        impl MatrixKernel for BandedKernel {
            fn index_set(&self) -> IndexSet {
                self.index_set
            }
            fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
                let mut out = Vec::new();
                for (&off, &v) in &self.bands {
                    if v == 0 {
                        continue;
                    }
                    let row = col - off;
                    if self.index_set.contains(row) {
                        out.push((row, v));
                    }
                }
                out.sort_by_key(|&(r, _)| r);
                out
            }
            fn row_support(&self, row: Vertex) -> RowSupport {
                let lo = self.bands.keys().min().copied().unwrap_or(0);
                let hi = self.bands.keys().max().copied().unwrap_or(0);
                RowSupport::Bounded {
                    lo: row + lo,
                    hi: row + hi,
                }
            }
            fn entry(&self, row: Vertex, col: Vertex) -> u64 {
                if !self.index_set.contains(row) || !self.index_set.contains(col) {
                    return 0;
                }
                self.bands.get(&(col - row)).copied().unwrap_or(0)
            }
        }
        Matrix::new(Arc::new(BandedKernel { index_set, bands }), descriptor)
    }

    fn rows(index_set: IndexSet, pattern: Vec<ColumnRule>, descriptor: MatrixDescriptor) -> Matrix {
        struct RowsKernel {
            index_set: IndexSet,
            pattern: Vec<ColumnRule>,
        }
        impl RowsKernel {
            fn rule_for(&self, col: Vertex) -> Option<&ColumnRule> {
                self.pattern
                    .iter()
                    .find(|r| r.from <= col && r.to.map_or(true, |t| col <= t))
            }
        }
        impl MatrixKernel for RowsKernel {
            fn index_set(&self) -> IndexSet {
                self.index_set
            }
            fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
                let Some(rule) = self.rule_for(col) else {
                    return Vec::new();
                };
                let mut out: BTreeMap<Vertex, u64> = BTreeMap::new();
                for e in &rule.entries {
                    let row = match e.row {
                        RowRef::Offset(d) => col + d,
                        RowRef::Fixed(r) => r,
                    };
                    if e.value > 0 && self.index_set.contains(row) {
                        *out.entry(row).or_insert(0) += e.value;
                    }
                }
                out.into_iter().collect()
            }
            fn row_support(&self, row: Vertex) -> RowSupport {
                let mut lo = Vertex::MAX;
                let mut hi = Vertex::MIN;
                let mut any = false;
                for rule in &self.pattern {
                    for e in &rule.entries {
                        if e.value == 0 {
                            continue;
                        }
                        match e.row {
                            RowRef::Fixed(r) if r == row => {
                                // The fixed row is hit by every column of the
                                // rule's interval.
                                if rule.to.is_none() {
                                    return RowSupport::Unbounded;
                                }
                                any = true;
                                lo = lo.min(rule.from);
                                hi = hi.max(rule.to.unwrap());
                            }
                            RowRef::Fixed(_) => {}
                            RowRef::Offset(d) => {
                                let c = row - d;
                                if rule.from <= c && rule.to.map_or(true, |t| c <= t) {
                                    any = true;
                                    lo = lo.min(c);
                                    hi = hi.max(c);
                                }
                            }
                        }
                    }
                }
                if any {
                    RowSupport::Bounded { lo, hi }
                } else {
                    // Zero row as far as the pattern knows.
                    RowSupport::Bounded { lo: row, hi: row }
                }
            }
        }
        Matrix::new(Arc::new(RowsKernel { index_set, pattern }), descriptor)
    }

    pub fn index_set(&self) -> IndexSet {
        self.kernel.index_set()
    }

    pub fn descriptor(&self) -> &MatrixDescriptor {
        &self.descriptor
    }

    /// Attach a descriptor (used by the catalog so reports carry the entry id).
    pub fn with_descriptor(mut self, descriptor: MatrixDescriptor) -> Self {
        self.descriptor = descriptor;
        self
    }

    /// All non-zero entries of a column, sorted by row. Panics if the column
    /// is not certified finite; use [`Matrix::try_column_entries`] when the
    /// matrix may have unbounded columns.
    pub fn column_entries(&self, col: Vertex) -> Vec<(Vertex, u64)> {
        assert!(
            self.kernel.column_is_finite(col),
            "column {col} has unbounded support"
        );
        self.kernel.column(col)
    }

    /// Fallible column accessor for matrices that may have unbounded columns.
    pub fn try_column_entries(&self, col: Vertex) -> Result<Vec<(Vertex, u64)>, MatrixError> {
        if self.kernel.column_is_finite(col) {
            Ok(self.kernel.column(col))
        } else {
            Err(MatrixError::ColumnSupportUnbounded(col))
        }
    }

    /// True when every column has certified-finite support within the window
    /// probe (a requirement for serving as a diagram incidence).
    pub fn columns_finite_on(&self, window: Window) -> bool {
        self.index_set()
            .clamp(window)
            .iter()
            .all(|c| self.kernel.column_is_finite(c))
    }

    pub fn row_support(&self, row: Vertex) -> RowSupport {
        self.kernel.row_support(row)
    }

    pub fn entry(&self, row: Vertex, col: Vertex) -> u64 {
        self.kernel.entry(row, col)
    }

    /// Non-zero entries of a row inside the window, plus a flag telling
    /// whether the row has support outside the window (rows may be infinite).
    pub fn row_entries(&self, row: Vertex, window: Window) -> (Vec<(Vertex, u64)>, bool) {
        let window = self.index_set().clamp(window);
        let mut out = Vec::new();
        for col in window.iter() {
            let v = self.entry(row, col);
            if v > 0 {
                out.push((col, v));
            }
        }
        let exceeds = match self.row_support(row) {
            RowSupport::Unbounded => true,
            RowSupport::Bounded { lo, hi } => {
                // Probe the certified support outside the window for an
                // actual non-zero entry (the hint is an over-approximation).
                let mut found = false;
                let mut c = lo;
                while c <= hi {
                    if !window.contains(c) && self.entry(row, c) > 0 {
                        found = true;
                        break;
                    }
                    c += 1;
                }
                found
            }
        };
        (out, exceeds)
    }

    /// Dense truncation to a window: `result[ri][ci] = a_{lo+ri, lo+ci}`.
    /// Entry-based, so it works even for matrices with unbounded columns.
    pub fn truncate(&self, window: Window) -> Vec<Vec<u64>> {
        let window = self.index_set().clamp(window);
        let n = window.len();
        let mut dense = vec![vec![0u64; n]; n];
        for (ri, row) in window.iter().enumerate() {
            for (ci, col) in window.iter().enumerate() {
                dense[ri][ci] = self.entry(row, col);
            }
        }
        dense
    }

    /// Exact entry of `A^n`. Computed target-backward through finite column
    /// supports (terminates because every column is finite); matrices flagged
    /// forward-preferred (unbounded column, bounded rows) go source-forward.
    pub fn power_entry(&self, n: u32, source: Vertex, target: Vertex) -> BigUint {
        assert!(n >= 1, "power_entry requires n >= 1");
        if self.kernel.prefer_forward_powers() {
            let row = self.power_row(n, source);
            return row.get(&target).cloned().unwrap_or_else(BigUint::zero);
        }
        let col = self.power_column(n, target);
        col.get(&source).cloned().unwrap_or_else(BigUint::zero)
    }

    /// The full row of `A^n` at `source`, computed forward through bounded
    /// row supports.
    pub fn power_row(&self, n: u32, source: Vertex) -> HashMap<Vertex, BigUint> {
        let mut vec: HashMap<Vertex, BigUint> = HashMap::new();
        vec.insert(source, BigUint::one());
        for _ in 0..n {
            vec = self.push_forward(&vec);
        }
        vec
    }

    /// One forward step: given weights `u` on sources, return
    /// `(uᵀA)_v = Σ_w u_w a_{w,v}`. Requires bounded row supports.
    pub fn push_forward(&self, u: &HashMap<Vertex, BigUint>) -> HashMap<Vertex, BigUint> {
        let mut out: HashMap<Vertex, BigUint> = HashMap::new();
        for (&w, weight) in u {
            if weight.is_zero() {
                continue;
            }
            let RowSupport::Bounded { lo, hi } = self.row_support(w) else {
                panic!("forward powers require bounded rows (row {w} is unbounded)");
            };
            for c in lo..=hi {
                let a = self.entry(w, c);
                if a > 0 {
                    *out.entry(c).or_insert_with(BigUint::zero) += weight * BigUint::from(a);
                }
            }
        }
        out
    }

    /// The full column of `A^n` at `target`: all `(w, (A^n)_{w,target})`.
    /// Exact, finite, and the workhorse of path counting and heights.
    pub fn power_column(&self, n: u32, target: Vertex) -> HashMap<Vertex, BigUint> {
        let mut vec: HashMap<Vertex, BigUint> = HashMap::new();
        vec.insert(target, BigUint::one());
        for _ in 0..n {
            vec = self.pull_back(&vec);
        }
        vec
    }

    /// One backward step: given weights `u` on targets, return
    /// `(A u)_w = Σ_c a_{w,c} u_c` — weights on sources. Finite because each
    /// column is.
    pub fn pull_back(&self, u: &HashMap<Vertex, BigUint>) -> HashMap<Vertex, BigUint> {
        let mut out: HashMap<Vertex, BigUint> = HashMap::new();
        for (&c, weight) in u {
            if weight.is_zero() {
                continue;
            }
            for (w, a) in self.column_entries(c) {
                *out.entry(w).or_insert_with(BigUint::zero) += weight * BigUint::from(a);
            }
        }
        out
    }

    /// Floating-point backward step for stochastic/real vectors.
    pub fn pull_back_f64(&self, u: &HashMap<Vertex, f64>, scale: impl Fn(Vertex, Vertex, u64) -> f64) -> HashMap<Vertex, f64> {
        let mut out: HashMap<Vertex, f64> = HashMap::new();
        for (&c, &weight) in u {
            if weight == 0.0 {
                continue;
            }
            for (w, a) in self.column_entries(c) {
                *out.entry(w).or_insert(0.0) += weight * scale(w, c, a);
            }
        }
        out
    }

    /// `gcd { n <= n_max : (A^n)_{v,v} > 0 }`, the period of `v` within the
    /// probed horizon.
    pub fn period(&self, v: Vertex, n_max: u32) -> Result<u32, MatrixError> {
        let mut g: u64 = 0;
        let mut col: HashMap<Vertex, BigUint> = HashMap::new();
        col.insert(v, BigUint::one());
        for n in 1..=n_max {
            col = self.pull_back(&col);
            if col.get(&v).map_or(false, |x| !x.is_zero()) {
                g = num_integer::gcd(g, n as u64);
                if g == 1 {
                    return Ok(1);
                }
            }
        }
        if g == 0 {
            Err(MatrixError::NoReturnFound {
                vertex: v,
                horizon: n_max,
            })
        } else {
            Ok(g as u32)
        }
    }
}

// ---------------------------------------------------------------------------
// Telescoping (products of consecutive matrices)
// ---------------------------------------------------------------------------

/// The product `A_0 A_1 ⋯ A_{k-1}` of finitely many matrices, exposed again
/// as a single matrix with finite columns. This is exactly the level matrix
/// of a telescoped diagram: a column of the product lists all multi-level
/// ancestors of a vertex with multiplicity.
pub fn product(factors: &[Matrix]) -> Matrix {
    assert!(!factors.is_empty(), "product of zero matrices");
    struct ProductKernel {
        factors: Vec<Matrix>,
    }
    impl MatrixKernel for ProductKernel {
        fn index_set(&self) -> IndexSet {
            self.factors[0].index_set()
        }
        fn column(&self, col: Vertex) -> Vec<(Vertex, u64)> {
            // Backward through the factors, rightmost first.
            let mut u: HashMap<Vertex, BigUint> = HashMap::new();
            u.insert(col, BigUint::one());
            for m in self.factors.iter().rev() {
                u = m.pull_back(&u);
            }
            let mut out: Vec<(Vertex, u64)> = u
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(r, v)| (r, v.to_u64().expect("telescoped entry exceeds u64")))
                .collect();
            out.sort_by_key(|&(r, _)| r);
            out
        }
        fn row_support(&self, row: Vertex) -> RowSupport {
            let mut lo = row;
            let mut hi = row;
            for m in &self.factors {
                // Accumulate the widest one-step reach of any row in [lo, hi].
                match (m.row_support(lo), m.row_support(hi)) {
                    (RowSupport::Bounded { lo: a, .. }, RowSupport::Bounded { hi: b, .. }) => {
                        lo = a;
                        hi = b;
                    }
                    _ => return RowSupport::Unbounded,
                }
            }
            RowSupport::Bounded { lo, hi }
        }
    }
    let index_set = factors[0].index_set();
    for m in factors {
        assert!(
            m.index_set() == index_set,
            "telescoped factors must share an index set"
        );
    }
    Matrix::new(
        Arc::new(ProductKernel {
            factors: factors.to_vec(),
        }),
        MatrixDescriptor::Opaque {
            label: "product".to_string(),
        },
    )
}

/// Telescope a level sequence along strictly increasing cuts starting at 0:
/// the new level `k` matrix is the product of the original matrices between
/// consecutive cuts.
pub fn telescope(levels: &dyn Fn(usize) -> Matrix, cuts: &[usize]) -> Result<Vec<Matrix>, MatrixError> {
    if cuts.first() != Some(&0) {
        return Err(MatrixError::BadDescriptor(
            "telescoping cuts must start at 0".to_string(),
        ));
    }
    if !cuts.windows(2).all(|w| w[0] < w[1]) {
        return Err(MatrixError::BadDescriptor(
            "telescoping cuts must be strictly increasing".to_string(),
        ));
    }
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let factors: Vec<Matrix> = (w[0]..w[1]).map(|n| levels(n)).collect();
        out.push(product(&factors));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Finite-window connectivity
// ---------------------------------------------------------------------------

/// Verdict of the finite-window irreducibility probe. Never an absolute
/// claim — only "connected with the budget we had".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    IrreducibleOnWindow,
    NotConnected { from: Vertex, to: Vertex },
}

/// Strong-connectivity check of the directed graph on window vertices, using
/// paths of length at most `path_bound` that stay inside a padded window
/// (padding = `path_bound` times the widest observed band offset, so no path
/// is cut off artificially).
pub fn irreducible_on_window(matrix: &Matrix, window: Window, path_bound: u32) -> Connectivity {
    let window = matrix.index_set().clamp(window);
    // Estimate the band width from the window's columns.
    let mut band = 1i64;
    for c in window.iter() {
        if let Ok(entries) = matrix.try_column_entries(c) {
            for (r, _) in entries {
                band = band.max((r - c).abs());
            }
        }
    }
    let padded = window.padded(band * path_bound as i64, matrix.index_set());
    for start in window.iter() {
        // BFS along edges source -> target; a step w -> v exists when
        // a_{w,v} > 0, discovered by scanning columns of the padded window.
        let mut dist: HashMap<Vertex, u32> = HashMap::new();
        dist.insert(start, 0);
        let mut queue: VecDeque<Vertex> = VecDeque::new();
        queue.push_back(start);
        while let Some(w) = queue.pop_front() {
            let d = dist[&w];
            if d == path_bound {
                continue;
            }
            let (row, _) = matrix.row_entries(w, padded);
            for (v, _) in row {
                if !dist.contains_key(&v) {
                    dist.insert(v, d + 1);
                    queue.push_back(v);
                }
            }
        }
        for goal in window.iter() {
            if !dist.contains_key(&goal) {
                return Connectivity::NotConnected {
                    from: start,
                    to: goal,
                };
            }
        }
    }
    Connectivity::IrreducibleOnWindow
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// Lossy conversion of a big integer to `f64`, accurate to f64 precision even
/// far beyond `u64` range.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `num / den` as f64, computed stably for huge operands.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    // Shift both down so the larger fits comfortably in f64.
    let bits = num.bits().max(den.bits());
    if bits <= 900 {
        return big_to_f64(num) / big_to_f64(den);
    }
    let shift = bits - 900;
    big_to_f64(&(num >> shift)) / big_to_f64(&(den >> shift))
}

/// Natural logarithm of a big integer (0 maps to -inf).
pub fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 900 {
        big_to_f64(x).ln()
    } else {
        let shift = bits - 64;
        big_to_f64(&(x >> shift)).ln() + (shift as f64) * std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_walk() -> Matrix {
        // a_{i,i±1} = 1 on the integers.
        let mut bands = BTreeMap::new();
        bands.insert(-1i64, 1u64);
        bands.insert(1i64, 1u64);
        Matrix::banded(
            IndexSet::Integers,
            bands,
            MatrixDescriptor::Opaque {
                label: "walk".into(),
            },
        )
    }

    #[test]
    fn walk_power_entries_are_binomial() {
        let m = simple_walk();
        // (A^4)_{0,0} = C(4,2) = 6.
        assert_eq!(m.power_entry(4, 0, 0), BigUint::from(6u32));
        assert_eq!(m.power_entry(2, 0, 0), BigUint::from(2u32));
        assert_eq!(m.power_entry(1, 0, 1), BigUint::from(1u32));
    }

    #[test]
    fn period_of_walk_is_two() {
        let m = simple_walk();
        assert_eq!(m.period(0, 6).unwrap(), 2);
    }

    #[test]
    fn diagonal_band_is_disconnected() {
        let mut bands = BTreeMap::new();
        bands.insert(0i64, 2u64);
        let m = Matrix::banded(
            IndexSet::Integers,
            bands,
            MatrixDescriptor::Opaque {
                label: "diag".into(),
            },
        );
        assert!(matches!(
            irreducible_on_window(&m, Window::new(0, 3), 5),
            Connectivity::NotConnected { .. }
        ));
        assert_eq!(m.period(0, 4).unwrap(), 1);
    }

    #[test]
    fn rows_pattern_round_trips_json() {
        let desc = MatrixDescriptor::Rows {
            index_set: IndexSet::Naturals,
            pattern: vec![ColumnRule {
                from: 1,
                to: None,
                entries: vec![
                    ColumnEntry {
                        row: RowRef::Fixed(1),
                        value: 1,
                    },
                    ColumnEntry {
                        row: RowRef::Offset(1),
                        value: 1,
                    },
                ],
            }],
        };
        let json = serde_json::to_string(&desc).unwrap();
        let back: MatrixDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(desc, back);
        assert_eq!(json, serde_json::to_string(&back).unwrap());
    }
}
