//! Graded graphs with countably infinite levels ("generalized Bratteli
//! diagrams") and their path machinery.
//!
//! A diagram is a sequence of level matrices `A_n` where `(A_n)_{w,v}` counts
//! the edges from vertex `w` on level `n` to vertex `v` on level `n+1`.
//! Columns of `A_n` are the incoming-edge lists and are always finite; this
//! is what makes path counts, heights, and ancestor cones exactly computable
//! even though every level is infinite.
//!
//! Heights `H⁽ⁿ⁾_v` — the number of finite paths from level 0 into `v` — are
//! computed by backward dynamic programming through the finite ancestor cone,
//! so every returned value is exact (arbitrary precision), not a truncation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::matrix::{IndexSet, Matrix, Vertex, Window};

// ---------------------------------------------------------------------------
// Band data (bounded size)
// ---------------------------------------------------------------------------

/// Per-level band parameters of a bounded-size diagram: `t_n` bounds the
/// horizontal offset of any edge at level `n` (sources of edges into `v` lie
/// in `[v−t_n, v+t_n]`, with the extreme offsets realized), and `L_n` bounds
/// the number of incoming edges of any level-`n+1` vertex.
#[derive(Clone)]
pub struct BandSpec {
    t: Arc<dyn Fn(usize) -> i64 + Send + Sync>,
    l: Arc<dyn Fn(usize) -> u64 + Send + Sync>,
}

impl fmt::Debug for BandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BandSpec(t0={}, L0={})", self.t(0), self.l(0))
    }
}

impl BandSpec {
    pub fn constant(t: i64, l: u64) -> BandSpec {
        assert!(t >= 1 && l >= 1);
        BandSpec {
            t: Arc::new(move |_| t),
            l: Arc::new(move |_| l),
        }
    }

    pub fn from_fns(
        t: impl Fn(usize) -> i64 + Send + Sync + 'static,
        l: impl Fn(usize) -> u64 + Send + Sync + 'static,
    ) -> BandSpec {
        BandSpec {
            t: Arc::new(t),
            l: Arc::new(l),
        }
    }

    pub fn t(&self, level: usize) -> i64 {
        (self.t)(level)
    }

    pub fn l(&self, level: usize) -> u64 {
        (self.l)(level)
    }

    /// `Σ_{i=a}^{b-1} t_i`.
    pub fn t_sum(&self, levels: std::ops::Range<usize>) -> i64 {
        levels.map(|i| self.t(i)).sum()
    }

    /// `Π_{i=a}^{b-1} L_i` as a big integer.
    pub fn l_product(&self, levels: std::ops::Range<usize>) -> BigUint {
        let mut p = BigUint::one();
        for i in levels {
            p *= BigUint::from(self.l(i));
        }
        p
    }
}

// ---------------------------------------------------------------------------
// Diagram
// ---------------------------------------------------------------------------

/// Level sequence of a diagram.
#[derive(Clone)]
pub enum Levels {
    /// Every level uses the same matrix.
    Stationary(Matrix),
    /// Explicit prefix; levels past the prefix come from the rule.
    Sequence {
        prefix: Vec<Matrix>,
        rule: Arc<dyn Fn(usize) -> Matrix + Send + Sync>,
    },
}

/// A generalized Bratteli diagram: an index set shared by all levels, the
/// level matrices, and (optionally) bounded-size band data.
#[derive(Clone)]
pub struct Diagram {
    index_set: IndexSet,
    levels: Levels,
    band: Option<BandSpec>,
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagram")
            .field("index_set", &self.index_set)
            .field("stationary", &matches!(self.levels, Levels::Stationary(_)))
            .field("band", &self.band)
            .finish()
    }
}

impl Diagram {
    pub fn stationary(matrix: Matrix) -> Diagram {
        let index_set = matrix.index_set();
        Diagram {
            index_set,
            levels: Levels::Stationary(matrix),
            band: None,
        }
    }

    pub fn from_rule(
        index_set: IndexSet,
        rule: impl Fn(usize) -> Matrix + Send + Sync + 'static,
    ) -> Diagram {
        Diagram {
            index_set,
            levels: Levels::Sequence {
                prefix: Vec::new(),
                rule: Arc::new(rule),
            },
            band: None,
        }
    }

    pub fn with_band(mut self, band: BandSpec) -> Diagram {
        self.band = Some(band);
        self
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn band(&self) -> Option<&BandSpec> {
        self.band.as_ref()
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.levels, Levels::Stationary(_))
    }

    /// The matrix between levels `n` and `n+1`.
    pub fn level_matrix(&self, n: usize) -> Matrix {
        match &self.levels {
            Levels::Stationary(m) => m.clone(),
            Levels::Sequence { prefix, rule } => {
                if n < prefix.len() {
                    prefix[n].clone()
                } else {
                    rule(n)
                }
            }
        }
    }

    /// Incoming edges of vertex `v` on level `n+1`: sorted `(source, count)`.
    pub fn incoming(&self, edge_level: usize, v: Vertex) -> Vec<(Vertex, u64)> {
        self.level_matrix(edge_level).column_entries(v)
    }

    /// Exact number of paths from `w` at level `m` to `v` at level `n`.
    pub fn count_paths(&self, m: usize, w: Vertex, n: usize, v: Vertex) -> BigUint {
        assert!(m < n, "count_paths requires source level below target level");
        let u = self.ancestor_weights(m, n, v);
        u.get(&w).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Weights `(A_m ⋯ A_{n−1})_{·,v}` — the number of paths from each level-
    /// `m` vertex into `v` at level `n`. Finite because columns are.
    pub fn ancestor_weights(&self, m: usize, n: usize, v: Vertex) -> HashMap<Vertex, BigUint> {
        let mut u: HashMap<Vertex, BigUint> = HashMap::new();
        u.insert(v, BigUint::one());
        for lev in (m..n).rev() {
            u = self.level_matrix(lev).pull_back(&u);
        }
        u
    }

    /// Exact height `H⁽ⁿ⁾_v = |E(V₀, v)|`: the number of finite paths from
    /// level 0 into `v` at level `n` (over all starting vertices).
    pub fn height(&self, n: usize, v: Vertex) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        self.ancestor_weights(0, n, v).values().sum()
    }

    /// Heights for every vertex of a window at level `n`. All values exact.
    pub fn height_vector(&self, n: usize, window: Window) -> HeightVector {
        let window = self.index_set.clamp(window);
        let values = window.iter().map(|v| (v, self.height(n, v))).collect();
        HeightVector { level: n, values }
    }

    /// Telescope along strictly increasing cuts starting at 0.
    pub fn telescope(&self, cuts: &[usize]) -> Result<Diagram, crate::matrix::MatrixError> {
        let this = self.clone();
        let products = crate::matrix::telescope(&move |n| this.level_matrix(n), cuts)?;
        let cuts_owned: Vec<usize> = cuts.to_vec();
        let this2 = self.clone();
        let band = self.band.as_ref().map(|b| {
            let b1 = b.clone();
            let b2 = b.clone();
            let cuts_t = cuts_owned.clone();
            let cuts_l = cuts_owned.clone();
            BandSpec::from_fns(
                move |k| {
                    let (a, z) = segment(&cuts_t, k);
                    b1.t_sum(a..z)
                },
                move |k| {
                    let (a, z) = segment(&cuts_l, k);
                    use num_traits::ToPrimitive;
                    b2.l_product(a..z).to_u64().unwrap_or(u64::MAX)
                },
            )
        });
        let rule_cuts = cuts_owned;
        let mut d = Diagram {
            index_set: self.index_set,
            levels: Levels::Sequence {
                prefix: products,
                rule: Arc::new(move |k| {
                    // Beyond the explicit cuts, extend with single levels.
                    let last = *rule_cuts.last().unwrap();
                    let offset = last + (k - (rule_cuts.len() - 1));
                    this2.level_matrix(offset)
                }),
            },
            band: None,
        };
        d.band = band;
        Ok(d)
    }

    /// Ancestor / descendant cone of a vertex, from the band data.
    pub fn cone_bounds(&self, n: usize, v: Vertex, direction: ConeDirection) -> ConeBounds {
        let band = self.band.as_ref().expect("cone_bounds requires band data");
        let (range, count) = match direction {
            ConeDirection::Ancestors => {
                let s = band.t_sum(0..n);
                ((v - s, v + s), band.l_product(0..n))
            }
            ConeDirection::Descendants { steps } => {
                let s = band.t_sum(n..n + steps);
                ((v - s, v + s), band.l_product(n..n + steps))
            }
        };
        ConeBounds {
            lo: range.0,
            hi: range.1,
            path_count_bound: count,
        }
    }
}

fn segment(cuts: &[usize], k: usize) -> (usize, usize) {
    if k + 1 < cuts.len() {
        (cuts[k], cuts[k + 1])
    } else {
        let last = *cuts.last().unwrap();
        let off = last + (k - (cuts.len() - 1));
        (off, off + 1)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ConeDirection {
    Ancestors,
    Descendants { steps: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeBounds {
    pub lo: Vertex,
    pub hi: Vertex,
    #[serde(serialize_with = "crate::report::ser_biguint")]
    pub path_count_bound: BigUint,
}

#[derive(Debug, Clone)]
pub struct HeightVector {
    pub level: usize,
    pub values: Vec<(Vertex, BigUint)>,
}

impl HeightVector {
    pub fn get(&self, v: Vertex) -> Option<&BigUint> {
        self.values.iter().find(|(w, _)| *w == v).map(|(_, h)| h)
    }
}

// ---------------------------------------------------------------------------
// Edges and finite paths
// ---------------------------------------------------------------------------

/// A single edge of the diagram. `copy` distinguishes the parallel edges
/// when the multiplicity between `source` and `target` exceeds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub level: usize,
    pub source: Vertex,
    pub target: Vertex,
    pub copy: u32,
}

/// A level-consecutive list of edges starting at `start_level`; defines the
/// cylinder set of all infinite paths extending it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitePath {
    pub start_level: usize,
    pub edges: Vec<Edge>,
}

impl FinitePath {
    pub fn new(start_level: usize, edges: Vec<Edge>) -> FinitePath {
        let p = FinitePath { start_level, edges };
        p.assert_consistent();
        p
    }

    pub fn assert_consistent(&self) {
        for (i, e) in self.edges.iter().enumerate() {
            assert_eq!(e.level, self.start_level + i, "edge level mismatch");
            if i > 0 {
                assert_eq!(
                    e.source,
                    self.edges[i - 1].target,
                    "path not level-consecutive at level {}",
                    e.level
                );
            }
        }
    }

    /// Validate multiplicities against a diagram.
    pub fn validate(&self, diagram: &Diagram) -> bool {
        self.edges.iter().all(|e| {
            let mult = diagram.level_matrix(e.level).entry(e.source, e.target);
            mult > 0 && u64::from(e.copy) < mult
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Level just past the last edge (the range level of the path).
    pub fn end_level(&self) -> usize {
        self.start_level + self.edges.len()
    }

    pub fn range_vertex(&self) -> Option<Vertex> {
        self.edges.last().map(|e| e.target)
    }

    pub fn source_vertex(&self) -> Option<Vertex> {
        self.edges.first().map(|e| e.source)
    }

    /// Concatenate with a path starting where this one ends.
    pub fn concat(&self, other: &FinitePath) -> FinitePath {
        assert_eq!(other.start_level, self.end_level());
        if let (Some(v), Some(w)) = (self.range_vertex(), other.source_vertex()) {
            assert_eq!(v, w, "concatenation endpoints differ");
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().copied());
        FinitePath::new(self.start_level, edges)
    }
}

// ---------------------------------------------------------------------------
// Transitivity witness
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum WitnessError {
    #[error("no connecting path from vertex {from} at level {level} to vertex {to} within horizon {horizon}")]
    NoWitnessWithinHorizon {
        from: Vertex,
        level: usize,
        to: Vertex,
        horizon: usize,
    },
    #[error("vertex {0} has no witnessed return of length {1}")]
    NoReturn(Vertex, usize),
}

/// Constructive transitivity: a finite path from the range of a cylinder to a
/// designated vertex `i` at a deeper level that is a multiple of `i`'s return
/// length `k`. Concatenated with the `k`-periodic return path through `i`,
/// it shows the tail class of that periodic path enters the cylinder.
pub fn transitive_witness(
    diagram: &Diagram,
    cylinder: &FinitePath,
    vertical_vertex: Vertex,
    return_length: usize,
    horizon: usize,
) -> Result<FinitePath, WitnessError> {
    assert!(diagram.is_stationary(), "transitivity witness is for stationary diagrams");
    assert!(return_length >= 1);
    let matrix = diagram.level_matrix(0);
    // Check the return f^(k)_ii > 0 exists at all.
    if matrix
        .power_entry(return_length as u32, vertical_vertex, vertical_vertex)
        .is_zero()
    {
        return Err(WitnessError::NoReturn(vertical_vertex, return_length));
    }
    let from = cylinder.range_vertex().unwrap_or(vertical_vertex);
    let level = cylinder.end_level();
    // Find the smallest h ≤ horizon with h ≡ −level (mod k) reachable:
    // (A^h)_{from, i} > 0; then the witness ends at a level divisible by k.
    for h in 1..=horizon {
        if (level + h) % return_length != 0 {
            continue;
        }
        if !matrix
            .power_entry(h as u32, from, vertical_vertex)
            .is_zero()
        {
            return Ok(realize_path(diagram, level, from, h, vertical_vertex));
        }
    }
    Err(WitnessError::NoWitnessWithinHorizon {
        from,
        level,
        to: vertical_vertex,
        horizon,
    })
}

/// Materialize one concrete path of length `h` from `w` at `level` to `v`,
/// assuming `(A^h)_{w,v} > 0`. Greedy: at each step pick the least next
/// vertex that still reaches the target.
pub fn realize_path(
    diagram: &Diagram,
    level: usize,
    w: Vertex,
    h: usize,
    v: Vertex,
) -> FinitePath {
    let mut edges = Vec::with_capacity(h);
    let mut cur = w;
    for step in 0..h {
        let remaining = h - step - 1;
        let lev = level + step;
        let matrix = diagram.level_matrix(lev);
        // Candidate next vertices u with an edge cur→u; need (A^rem)_{u,v}>0.
        let reach = diagram.ancestor_weights(lev + 1, level + h, v);
        let mut next = None;
        let mut candidates: Vec<Vertex> = if remaining == 0 {
            vec![v]
        } else {
            let mut c: Vec<Vertex> = reach.keys().copied().collect();
            c.sort();
            c
        };
        candidates.retain(|&u| matrix.entry(cur, u) > 0);
        if let Some(&u) = candidates.first() {
            next = Some(u);
        }
        let u = next.expect("realize_path called without reachability");
        edges.push(Edge {
            level: lev,
            source: cur,
            target: u,
            copy: 0,
        });
        cur = u;
    }
    FinitePath::new(level, edges)
}

// ---------------------------------------------------------------------------
// Slanting sets Z_w^±
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slant {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlantingVerdict {
    ConsistentThroughDepth(usize),
    Violated { level: usize },
}

/// Membership test for the slanting set `Z_w^+` (resp. `Z_w^−`): the path's
/// range at every probed level `k` must satisfy `r(x_k) ≥ w + Σ_{i≤k} t_i`
/// (resp. `≤ w − Σ`). These sets are tail-invariant and witness
/// non-minimality of the tail relation on bounded-size diagrams.
pub fn slanting_membership(
    diagram: &Diagram,
    path: &FinitePath,
    w: Vertex,
    sign: Slant,
) -> SlantingVerdict {
    let band = diagram.band().expect("slanting sets require band data");
    assert_eq!(path.start_level, 0, "slanting sets are defined from level 0");
    let mut sum = 0i64;
    for (k, e) in path.edges.iter().enumerate() {
        sum += band.t(k);
        let ok = match sign {
            Slant::Plus => e.target >= w + sum,
            Slant::Minus => e.target <= w - sum,
        };
        if !ok {
            return SlantingVerdict::Violated { level: k };
        }
    }
    SlantingVerdict::ConsistentThroughDepth(path.len())
}

// ---------------------------------------------------------------------------
// Isomorphism-witness verification
// ---------------------------------------------------------------------------

/// A vertex map per level plus an edge map; the edge map defaults to "the
/// c-th parallel edge maps to the c-th parallel edge", which is well defined
/// exactly when the vertex maps preserve multiplicities.
#[derive(Clone)]
pub struct IsoWitness {
    pub vertex_map: Arc<dyn Fn(usize, Vertex) -> Vertex + Send + Sync>,
    pub edge_map: EdgeMapRule,
}

#[derive(Clone)]
pub enum EdgeMapRule {
    /// h(c-th edge from w into v) = c-th edge from g(w) into g(v).
    InducedByVertexMap,
    Explicit(Arc<dyn Fn(&Edge) -> Edge + Send + Sync>),
}

#[derive(Debug, Clone, Serialize)]
pub enum IsoVerdict {
    VerifiedToDepth(usize),
    Violation { level: usize, detail: String },
}

/// Check an isomorphism witness between two diagrams through `depth` levels
/// on a vertex window: vertex maps injective on the window, multiplicities
/// intertwined (`f_{v,w} = f'_{g v, g w}`), and the edge map compatible with
/// source/range.
pub fn verify_isomorphism(
    a: &Diagram,
    b: &Diagram,
    witness: &IsoWitness,
    depth: usize,
    window: Window,
) -> IsoVerdict {
    for level in 0..depth {
        let g_src = |v: Vertex| (witness.vertex_map)(level, v);
        let g_dst = |v: Vertex| (witness.vertex_map)(level + 1, v);
        // Injectivity probe on the window.
        let window_a = a.index_set().clamp(window);
        let mut seen = HashMap::new();
        for v in window_a.iter() {
            if let Some(prev) = seen.insert(g_src(v), v) {
                return IsoVerdict::Violation {
                    level,
                    detail: format!("vertex map not injective: {prev} and {v} both map to {}", g_src(v)),
                };
            }
        }
        let ma = a.level_matrix(level);
        let mb = b.level_matrix(level);
        for v in window_a.iter() {
            for (wv, mult) in ma.column_entries(v) {
                let mult_b = mb.entry(g_src(wv), g_dst(v));
                if mult_b != mult {
                    return IsoVerdict::Violation {
                        level,
                        detail: format!(
                            "multiplicity mismatch: {mult} edges {wv}->{v} vs {mult_b} edges {}->{}",
                            g_src(wv),
                            g_dst(v)
                        ),
                    };
                }
                // Edge-map compatibility on every copy.
                for copy in 0..mult as u32 {
                    let e = Edge {
                        level,
                        source: wv,
                        target: v,
                        copy,
                    };
                    let he = match &witness.edge_map {
                        EdgeMapRule::InducedByVertexMap => Edge {
                            level,
                            source: g_src(wv),
                            target: g_dst(v),
                            copy,
                        },
                        EdgeMapRule::Explicit(f) => f(&e),
                    };
                    if he.source != g_src(wv) || he.target != g_dst(v) || he.level != level {
                        return IsoVerdict::Violation {
                            level,
                            detail: format!("edge map does not intertwine source/range at {e:?}"),
                        };
                    }
                    if u64::from(he.copy) >= mb.entry(he.source, he.target) {
                        return IsoVerdict::Violation {
                            level,
                            detail: format!("edge map exceeds multiplicity at {e:?}"),
                        };
                    }
                }
            }
        }
    }
    IsoVerdict::VerifiedToDepth(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixDescriptor;
    use std::collections::BTreeMap;

    fn walk_diagram() -> Diagram {
        let mut bands = BTreeMap::new();
        bands.insert(-1i64, 1u64);
        bands.insert(1i64, 1u64);
        let m = Matrix::banded(
            IndexSet::Integers,
            bands,
            MatrixDescriptor::Opaque { label: "walk".into() },
        );
        Diagram::stationary(m).with_band(BandSpec::constant(1, 2))
    }

    #[test]
    fn walk_heights_are_binomial_sums() {
        let d = walk_diagram();
        // H^(n)_v = Σ_w (A^n)_{w,v} = 2^n for the two-sided walk.
        assert_eq!(d.height(4, 0), BigUint::from(16u32));
        assert_eq!(d.height(0, 3), BigUint::one());
    }

    #[test]
    fn count_paths_matches_power() {
        let d = walk_diagram();
        assert_eq!(d.count_paths(0, 0, 2, 0), BigUint::from(2u32));
        assert_eq!(d.count_paths(1, 0, 3, 2), BigUint::one());
    }

    #[test]
    fn cone_bounds_track_band() {
        let d = walk_diagram();
        let c = d.cone_bounds(3, 0, ConeDirection::Ancestors);
        assert_eq!((c.lo, c.hi), (-3, 3));
        assert_eq!(c.path_count_bound, BigUint::from(8u32));
    }

    #[test]
    fn telescoping_preserves_counts() {
        let d = walk_diagram();
        let t = d.telescope(&[0, 2, 4]).unwrap();
        // One telescoped level = two original levels.
        assert_eq!(t.count_paths(0, 0, 1, 0), d.count_paths(0, 0, 2, 0));
        assert_eq!(t.count_paths(0, 0, 2, 0), d.count_paths(0, 0, 4, 0));
        assert_eq!(t.band().unwrap().t(0), 2);
    }

    #[test]
    fn identity_isomorphism_verifies() {
        let d = walk_diagram();
        let w = IsoWitness {
            vertex_map: Arc::new(|_, v| v),
            edge_map: EdgeMapRule::InducedByVertexMap,
        };
        assert!(matches!(
            verify_isomorphism(&d, &d, &w, 4, Window::new(-5, 5)),
            IsoVerdict::VerifiedToDepth(4)
        ));
        let shifted = IsoWitness {
            vertex_map: Arc::new(|lev, v| if lev == 2 { v + 1 } else { v }),
            edge_map: EdgeMapRule::InducedByVertexMap,
        };
        assert!(matches!(
            verify_isomorphism(&d, &d, &shifted, 4, Window::new(-5, 5)),
            IsoVerdict::Violation { .. }
        ));
    }
}
