//! Edge orders, minimal/maximal path machinery, the Vershik successor map,
//! and constructive (dis)continuity witnesses.
//!
//! An order assigns to every vertex `v` of every level `n+1` a total order on
//! its (finitely many) incoming edges — the pairs `(source, copy)`. The
//! Vershik map sends a path to its lexicographic successor: find the lowest
//! level whose edge has a successor in its fiber, advance it, and restart
//! everything below along minimal edges. Infinite paths are represented as a
//! finite prefix plus a tail rule, so a step only ever edits a finite prefix;
//! where a verdict depends on unseen levels the result is depth-bounded
//! (`MaximalThroughDepth`), never a guess.
//!
//! The module also provides the two constructive continuity results for
//! left-to-right orders on bounded-size diagrams: a witness pair proving
//! every maximal path is a discontinuity point when the band grows slower
//! than its own partial sums, and a modulus-of-continuity probe for the
//! complementary construction where the band equals its partial sums.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagram::{BandSpec, Diagram, Edge, FinitePath};
use crate::matrix::{RowSupport, Vertex, Window};

// ---------------------------------------------------------------------------
// Orders
// ---------------------------------------------------------------------------

/// One incoming edge of a fixed vertex: the pair (source vertex, parallel
/// copy index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeKey {
    pub source: Vertex,
    pub copy: u32,
}

/// A total order on the incoming edges of every vertex. `rank` must be
/// injective on each fiber; lower rank = smaller edge (rank 0 is minimal).
#[derive(Clone)]
pub struct EdgeOrder {
    name: String,
    rank: Arc<dyn Fn(usize, Vertex, EdgeKey) -> u64 + Send + Sync>,
}

impl fmt::Debug for EdgeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeOrder({})", self.name)
    }
}

impl EdgeOrder {
    /// Left-to-right: order by source vertex, parallel copies in copy order.
    pub fn left_to_right() -> EdgeOrder {
        EdgeOrder {
            name: "left-to-right".into(),
            // Sources fit comfortably in 2^32; shift to make room for copies.
            rank: Arc::new(|_, _, k| (((k.source as i64 + (1 << 40)) as u64) << 16) | k.copy as u64),
        }
    }

    /// Order from an explicit label rule (labels as drawn in a figure:
    /// 0 minimal).
    pub fn from_labels(
        name: &str,
        rank: impl Fn(usize, Vertex, EdgeKey) -> u64 + Send + Sync + 'static,
    ) -> EdgeOrder {
        EdgeOrder {
            name: name.into(),
            rank: Arc::new(rank),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The ordered fiber of `v` at edge level `level`: all incoming edge
    /// keys, minimal first. Panics if the rank rule is not injective on the
    /// fiber.
    pub fn fiber(&self, diagram: &Diagram, level: usize, v: Vertex) -> Vec<EdgeKey> {
        let mut keys: Vec<EdgeKey> = Vec::new();
        for (source, mult) in diagram.incoming(level, v) {
            for copy in 0..mult as u32 {
                keys.push(EdgeKey { source, copy });
            }
        }
        keys.sort_by_key(|&k| (self.rank)(level, v, k));
        for pair in keys.windows(2) {
            assert!(
                (self.rank)(level, v, pair[0]) != (self.rank)(level, v, pair[1]),
                "order is not total on the fiber of vertex {v} at level {level}"
            );
        }
        keys
    }

    /// Position of an edge inside its fiber (0 = minimal).
    pub fn position(&self, diagram: &Diagram, edge: &Edge) -> usize {
        let key = EdgeKey {
            source: edge.source,
            copy: edge.copy,
        };
        self.fiber(diagram, edge.level, edge.target)
            .iter()
            .position(|&k| k == key)
            .expect("edge not present in its own fiber")
    }

    /// The next-larger edge into the same vertex, if any.
    pub fn successor_edge(&self, diagram: &Diagram, edge: &Edge) -> Option<Edge> {
        let fiber = self.fiber(diagram, edge.level, edge.target);
        let pos = self.position(diagram, edge);
        fiber.get(pos + 1).map(|k| Edge {
            level: edge.level,
            source: k.source,
            target: edge.target,
            copy: k.copy,
        })
    }

    /// The next-smaller edge into the same vertex, if any.
    pub fn predecessor_edge(&self, diagram: &Diagram, edge: &Edge) -> Option<Edge> {
        let fiber = self.fiber(diagram, edge.level, edge.target);
        let pos = self.position(diagram, edge);
        pos.checked_sub(1).map(|p| Edge {
            level: edge.level,
            source: fiber[p].source,
            target: edge.target,
            copy: fiber[p].copy,
        })
    }

    pub fn minimal_edge_into(&self, diagram: &Diagram, level: usize, v: Vertex) -> Edge {
        let k = *self
            .fiber(diagram, level, v)
            .first()
            .unwrap_or_else(|| panic!("vertex {v} at level {} has no incoming edges", level + 1));
        Edge {
            level,
            source: k.source,
            target: v,
            copy: k.copy,
        }
    }

    pub fn maximal_edge_into(&self, diagram: &Diagram, level: usize, v: Vertex) -> Edge {
        let k = *self
            .fiber(diagram, level, v)
            .last()
            .unwrap_or_else(|| panic!("vertex {v} at level {} has no incoming edges", level + 1));
        Edge {
            level,
            source: k.source,
            target: v,
            copy: k.copy,
        }
    }

    /// The unique all-minimal finite path from level 0 into `v` at level `n`
    /// (the lexicographically least element of `E(V₀, v)`).
    pub fn minimal_path_into(&self, diagram: &Diagram, v: Vertex, n: usize) -> FinitePath {
        self.extreme_path_into(diagram, v, n, Side::Min)
    }

    /// The unique all-maximal finite path from level 0 into `v` at level `n`.
    pub fn maximal_path_into(&self, diagram: &Diagram, v: Vertex, n: usize) -> FinitePath {
        self.extreme_path_into(diagram, v, n, Side::Max)
    }

    fn extreme_path_into(&self, diagram: &Diagram, v: Vertex, n: usize, side: Side) -> FinitePath {
        let mut edges: Vec<Edge> = Vec::with_capacity(n);
        let mut cur = v;
        for level in (0..n).rev() {
            let e = match side {
                Side::Min => self.minimal_edge_into(diagram, level, cur),
                Side::Max => self.maximal_edge_into(diagram, level, cur),
            };
            cur = e.source;
            edges.push(e);
        }
        edges.reverse();
        FinitePath::new(0, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Min,
    Max,
}

// ---------------------------------------------------------------------------
// Declarative order tables (orders transcribed from drawings into data)
// ---------------------------------------------------------------------------

/// A declarative edge-order description: for each vertex-selector case, the
/// full incoming fiber as an ordered list of (source, copy) items. Stored as
/// JSON data files so hand-transcribed label tables live outside the code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderTable {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// When true, cases are matched per level parity (orders that alternate
    /// between two label schemes level by level).
    #[serde(default)]
    pub alternating: bool,
    pub cases: Vec<OrderCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderCase {
    /// Required level parity (only meaningful when `alternating`).
    #[serde(default)]
    pub parity: Option<usize>,
    pub target: TargetSel,
    /// The ordered fiber, minimal edge first.
    pub fiber: Vec<FiberItem>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSel {
    /// Exactly this vertex.
    Fixed(Vertex),
    /// Any vertex ≥ this bound.
    Min(Vertex),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FiberItem {
    pub source: SourceSel,
    #[serde(default)]
    pub copy: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSel {
    /// Absolute vertex.
    Fixed(Vertex),
    /// Relative to the target vertex.
    Offset(i64),
}

impl OrderTable {
    pub fn from_json(json: &str) -> OrderTable {
        serde_json::from_str(json).expect("malformed order table")
    }

    fn case(&self, level: usize, target: Vertex) -> &OrderCase {
        self.cases
            .iter()
            .find(|c| {
                (!self.alternating || c.parity.map_or(true, |p| p == level % 2))
                    && match c.target {
                        TargetSel::Fixed(v) => v == target,
                        TargetSel::Min(v) => target >= v,
                    }
            })
            .unwrap_or_else(|| {
                panic!(
                    "order table {:?} has no case for target {target} at level {level}",
                    self.name
                )
            })
    }

    /// The position of an edge key in the declared fiber of its target.
    fn rank(&self, level: usize, target: Vertex, key: EdgeKey) -> u64 {
        let case = self.case(level, target);
        case.fiber
            .iter()
            .position(|item| {
                let source = match item.source {
                    SourceSel::Fixed(v) => v,
                    SourceSel::Offset(k) => target + k,
                };
                source == key.source && item.copy == key.copy
            })
            .unwrap_or_else(|| {
                panic!(
                    "order table {:?} does not list edge ({}, copy {}) into {target}",
                    self.name, key.source, key.copy
                )
            }) as u64
    }
}

impl EdgeOrder {
    /// Order backed by a declarative table.
    pub fn from_table(table: OrderTable) -> EdgeOrder {
        let name = table.name.clone();
        EdgeOrder {
            name,
            rank: Arc::new(move |level, target, key| table.rank(level, target, key)),
        }
    }
}

// ---------------------------------------------------------------------------
// Ordered (infinite) paths
// ---------------------------------------------------------------------------

/// Rule generating the edges of a path beyond its explicit prefix.
#[derive(Clone)]
pub enum TailRule {
    /// Keep taking the 0-copy loop at a fixed vertex (requires a positive
    /// diagonal entry at every level).
    Vertical(Vertex),
    /// Arbitrary rule: given the edge level and the current vertex, produce
    /// the next edge (must have that source).
    Rule(Arc<dyn Fn(usize, Vertex) -> Edge + Send + Sync>),
}

impl fmt::Debug for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Vertical(v) => write!(f, "Vertical({v})"),
            TailRule::Rule(_) => write!(f, "Rule(..)"),
        }
    }
}

/// Finite representation of an infinite path: an explicit prefix starting at
/// level 0 plus a tail rule.
#[derive(Debug, Clone)]
pub struct OrderedPath {
    pub prefix: FinitePath,
    pub tail: TailRule,
}

impl OrderedPath {
    pub fn new(prefix: FinitePath, tail: TailRule) -> OrderedPath {
        assert_eq!(prefix.start_level, 0, "ordered paths start at level 0");
        OrderedPath { prefix, tail }
    }

    /// All edges through level `depth − 1` (prefix edges, then tail-generated).
    pub fn materialize(&self, depth: usize) -> Vec<Edge> {
        let mut edges: Vec<Edge> = self.prefix.edges.clone();
        edges.truncate(depth);
        while edges.len() < depth {
            let level = edges.len();
            let cur = edges
                .last()
                .map(|e| e.target)
                .unwrap_or_else(|| match &self.tail {
                    TailRule::Vertical(v) => *v,
                    TailRule::Rule(_) => panic!("tail rule with empty prefix needs a start vertex"),
                });
            let e = match &self.tail {
                TailRule::Vertical(v) => Edge {
                    level,
                    source: *v,
                    target: *v,
                    copy: 0,
                },
                TailRule::Rule(f) => f(level, cur),
            };
            assert_eq!(e.source, cur, "tail rule produced a disconnected edge");
            assert_eq!(e.level, level, "tail rule produced a mislevelled edge");
            edges.push(e);
        }
        edges
    }

    pub fn start_vertex(&self, depth_hint: usize) -> Vertex {
        self.materialize(depth_hint.max(1))[0].source
    }
}

/// Metric on the path space: `2^{−N}` where `N` is the first level at which
/// the paths disagree (distance 1 when they differ already at level 0).
/// Returns `None` when they agree through the whole compared depth.
pub fn path_distance(a: &[Edge], b: &[Edge]) -> Option<f64> {
    let depth = a.len().min(b.len());
    (0..depth).find(|&i| a[i] != b[i]).map(|n| 0.5f64.powi(n as i32))
}

// ---------------------------------------------------------------------------
// Vershik map
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum StepResult {
    Image(OrderedPath),
    /// Every probed edge was extreme; the path may lie in `X_max` (forward)
    /// or `X_min` (inverse).
    ExtremeThroughDepth(usize),
}

impl StepResult {
    pub fn unwrap_image(self) -> OrderedPath {
        match self {
            StepResult::Image(p) => p,
            StepResult::ExtremeThroughDepth(d) => {
                panic!("path was extreme through depth {d}")
            }
        }
    }
}

/// One application of the Vershik successor map, probing at most
/// `depth_limit` levels for a non-maximal edge.
pub fn vershik_step(
    diagram: &Diagram,
    order: &EdgeOrder,
    path: &OrderedPath,
    depth_limit: usize,
) -> StepResult {
    step_impl(diagram, order, path, depth_limit, Side::Max)
}

/// One application of the inverse map (predecessor): finds the lowest
/// non-minimal edge, replaces it by its predecessor, and prepends the
/// maximal path into the predecessor's source.
pub fn vershik_inverse_step(
    diagram: &Diagram,
    order: &EdgeOrder,
    path: &OrderedPath,
    depth_limit: usize,
) -> StepResult {
    step_impl(diagram, order, path, depth_limit, Side::Min)
}

fn step_impl(
    diagram: &Diagram,
    order: &EdgeOrder,
    path: &OrderedPath,
    depth_limit: usize,
    extreme: Side,
) -> StepResult {
    let edges = path.materialize(depth_limit);
    for (m, e) in edges.iter().enumerate() {
        let replacement = match extreme {
            Side::Max => order.successor_edge(diagram, e),
            Side::Min => order.predecessor_edge(diagram, e),
        };
        let Some(e2) = replacement else { continue };
        // Restart below level m along the opposite-extreme path into the
        // replacement's source; keep everything above m unchanged.
        let restart = match extreme {
            Side::Max => order.minimal_path_into(diagram, e2.source, m),
            Side::Min => order.maximal_path_into(diagram, e2.source, m),
        };
        let mut new_edges = restart.edges;
        new_edges.push(e2);
        new_edges.extend(edges[m + 1..].iter().copied());
        return StepResult::Image(OrderedPath::new(
            FinitePath::new(0, new_edges),
            path.tail.clone(),
        ));
    }
    StepResult::ExtremeThroughDepth(depth_limit)
}

// ---------------------------------------------------------------------------
// Brute-force oracle on finite truncations
// ---------------------------------------------------------------------------

/// All finite paths from level 0 into `v` at level `n` (finite because
/// ancestor cones are).
pub fn enumerate_paths_into(diagram: &Diagram, v: Vertex, n: usize) -> Vec<FinitePath> {
    fn go(diagram: &Diagram, v: Vertex, n: usize, acc: &mut Vec<FinitePath>, suffix: &mut Vec<Edge>) {
        if n == 0 {
            let edges: Vec<Edge> = suffix.iter().rev().copied().collect();
            acc.push(FinitePath::new(0, edges));
            return;
        }
        for (source, mult) in diagram.incoming(n - 1, v) {
            for copy in 0..mult as u32 {
                suffix.push(Edge {
                    level: n - 1,
                    source,
                    target: v,
                    copy,
                });
                go(diagram, source, n - 1, acc, suffix);
                suffix.pop();
            }
        }
    }
    let mut acc = Vec::new();
    go(diagram, v, n, &mut acc, &mut Vec::new());
    acc
}

/// Adic comparison of two equal-range paths: compare at the *largest* level
/// where they differ, by fiber rank.
pub fn adic_cmp(
    diagram: &Diagram,
    order: &EdgeOrder,
    a: &FinitePath,
    b: &FinitePath,
) -> std::cmp::Ordering {
    assert_eq!(a.len(), b.len());
    for i in (0..a.len()).rev() {
        if a.edges[i] != b.edges[i] {
            // Both edges end at the same vertex (everything above agrees).
            debug_assert_eq!(a.edges[i].target, b.edges[i].target);
            let pa = order.position(diagram, &a.edges[i]);
            let pb = order.position(diagram, &b.edges[i]);
            return pa.cmp(&pb);
        }
    }
    std::cmp::Ordering::Equal
}

// ---------------------------------------------------------------------------
// Extreme paths and emptiness certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ExtremePathReport {
    pub minimal: ExtremeVerdict,
    pub maximal: ExtremeVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub enum ExtremeVerdict {
    /// Path stubs all of whose edges are extreme through the probed depth,
    /// one per surviving level-0 start vertex in the window.
    Stubs(Vec<FinitePath>),
    /// No chain of extreme edges starting in the window survives.
    Empty(EmptinessCertificate),
}

#[derive(Debug, Clone, Serialize)]
pub struct EmptinessCertificate {
    pub window: (Vertex, Vertex),
    pub depth: usize,
    /// Every observed extreme transition strictly decreased the vertex index;
    /// on a one-sided diagram this upgrades window evidence to a proof by
    /// infinite descent.
    pub strictly_decreasing: bool,
    pub detail: String,
}

/// Find all targets `v` (within a scan pad of `s`) whose extreme incoming
/// edge has source `s` — the one-step continuations of an extreme path.
pub fn extreme_transitions(
    diagram: &Diagram,
    order: &EdgeOrder,
    level: usize,
    s: Vertex,
    side: Side,
    scan: Window,
) -> Vec<Edge> {
    let matrix = diagram.level_matrix(level);
    let candidates: Vec<Vertex> = match matrix.row_support(s) {
        RowSupport::Bounded { lo, hi } => (lo.max(scan.lo)..=hi.min(scan.hi)).collect(),
        RowSupport::Unbounded => scan.iter().collect(),
    };
    let mut out = Vec::new();
    for v in candidates {
        if !diagram.index_set().contains(v) || matrix.entry(s, v) == 0 {
            continue;
        }
        let e = match side {
            Side::Min => order.minimal_edge_into(diagram, level, v),
            Side::Max => order.maximal_edge_into(diagram, level, v),
        };
        if e.source == s {
            out.push(e);
        }
    }
    out
}

/// Depth-first search for infinite minimal/maximal paths: follow chains of
/// extreme edges from every window vertex. Chains that survive to `depth`
/// become stubs; if every chain dies, an emptiness certificate is issued.
pub fn extreme_paths(
    diagram: &Diagram,
    order: &EdgeOrder,
    window: Window,
    depth: usize,
) -> ExtremePathReport {
    ExtremePathReport {
        minimal: extreme_side(diagram, order, window, depth, Side::Min),
        maximal: extreme_side(diagram, order, window, depth, Side::Max),
    }
}

fn extreme_side(
    diagram: &Diagram,
    order: &EdgeOrder,
    window: Window,
    depth: usize,
    side: Side,
) -> ExtremeVerdict {
    let window = diagram.index_set().clamp(window);
    let scan = window.padded(depth as i64 * 4, diagram.index_set());
    let mut stubs: Vec<FinitePath> = Vec::new();
    let mut decreasing = true;
    let mut dead_ends = 0usize;

    // Iterative DFS over (level, vertex, path-so-far).
    for start in window.iter() {
        let mut stack: Vec<(usize, Vertex, Vec<Edge>)> = vec![(0, start, Vec::new())];
        while let Some((level, s, path)) = stack.pop() {
            if level == depth {
                stubs.push(FinitePath::new(0, path));
                continue;
            }
            let steps = extreme_transitions(diagram, order, level, s, side, scan);
            if steps.is_empty() {
                dead_ends += 1;
                continue;
            }
            for e in steps {
                if e.target >= s {
                    decreasing = false;
                }
                let mut p = path.clone();
                p.push(e);
                stack.push((level + 1, e.target, p));
            }
        }
    }
    if stubs.is_empty() {
        ExtremeVerdict::Empty(EmptinessCertificate {
            window: (window.lo, window.hi),
            depth,
            strictly_decreasing: decreasing,
            detail: format!(
                "all extreme-edge chains from {} start vertices died ({} dead ends){}",
                window.len(),
                dead_ends,
                if decreasing {
                    "; every transition strictly decreased the vertex index"
                } else {
                    ""
                }
            ),
        })
    } else {
        ExtremeVerdict::Stubs(stubs)
    }
}

/// The infinite all-maximal (resp. all-minimal) path from a level-0 vertex of
/// a bounded-size left-to-right diagram: targets march left (resp. right) by
/// `t_n` per level. Panics if the expected extreme edge is missing.
pub fn banded_extreme_path(
    diagram: &Diagram,
    order: &EdgeOrder,
    band: &BandSpec,
    w: Vertex,
    side: Side,
) -> OrderedPath {
    let diagram2 = diagram.clone();
    let order2 = order.clone();
    let band2 = band.clone();
    let rule = move |level: usize, cur: Vertex| -> Edge {
        let t = band2.t(level);
        let target = match side {
            // Maximal edge into v has source v + t, so from cur go to cur − t.
            Side::Max => cur - t,
            Side::Min => cur + t,
        };
        let e = match side {
            Side::Max => order2.maximal_edge_into(&diagram2, level, target),
            Side::Min => order2.minimal_edge_into(&diagram2, level, target),
        };
        assert_eq!(
            e.source, cur,
            "band data promises an extreme edge at offset t={t} from {cur}"
        );
        e
    };
    // Seed the prefix with one edge so the start vertex is explicit.
    let first = rule(0, w);
    OrderedPath::new(FinitePath::new(0, vec![first]), TailRule::Rule(Arc::new(rule)))
}

// ---------------------------------------------------------------------------
// Discontinuity witness (left-to-right, bounded size)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub enum DiscontinuityOutcome {
    Witness {
        n: usize,
        k: usize,
        epsilon: f64,
        distance_x_to_xprime: f64,
        distance_x_to_xdoubleprime: f64,
        image_distance: f64,
        image_start_vertices: (Vertex, Vertex),
    },
    /// `t_{n+k} < t_n + … + t_{n+k−1}` failed for every probed `k`.
    ConditionFails { n: usize, probed_k: usize },
}

/// Replays the proof that every infinite maximal path is a discontinuity
/// point of the Vershik map on a bounded-size diagram with left-to-right
/// order whose band sequence satisfies `t_{n+k} < Σ_{i=n}^{n+k−1} t_i`:
/// inside the ε-ball of the maximal path `x` it constructs
///  * `x′` — copy `x` to level n−1, then take the minimal edge out of
///    `r(x_{n−1})`, and
///  * `x″` — copy `x` to level n+k−1, then take the minimal edge out of
///    `r(x_{n+k−1})`,
/// whose images start at different level-0 vertices, so their distance is 1.
pub fn discontinuity_witness(
    diagram: &Diagram,
    order: &EdgeOrder,
    x_max: &OrderedPath,
    epsilon: f64,
    k_horizon: usize,
) -> DiscontinuityOutcome {
    let band = diagram.band().expect("discontinuity witness requires band data");
    // Smallest n with 2^{1−n} < ε, i.e. the ball around x at depth n.
    let mut n = 1usize;
    while 0.5f64.powi(n as i32 - 1) >= epsilon {
        n += 1;
    }
    // Find k with t_{n+k} < sum of the k previous t's.
    let mut chosen_k = None;
    for k in 1..=k_horizon {
        let sum: i64 = (n..n + k).map(|i| band.t(i)).sum();
        if band.t(n + k) < sum {
            chosen_k = Some(k);
            break;
        }
    }
    let Some(k) = chosen_k else {
        return DiscontinuityOutcome::ConditionFails {
            n,
            probed_k: k_horizon,
        };
    };

    let depth = n + k + 2;
    let x_edges = x_max.materialize(depth);
    let x_prime = deviate_minimally(diagram, order, &x_edges, n);
    let x_dprime = deviate_minimally(diagram, order, &x_edges, n + k);

    let compare_depth = depth + 2;
    let y_prime = vershik_step(diagram, order, &x_prime, depth).unwrap_image();
    let y_dprime = vershik_step(diagram, order, &x_dprime, depth).unwrap_image();
    let yp = y_prime.materialize(compare_depth);
    let yd = y_dprime.materialize(compare_depth);
    DiscontinuityOutcome::Witness {
        n,
        k,
        epsilon,
        distance_x_to_xprime: path_distance(&x_edges, &x_prime.materialize(depth)).unwrap_or(0.0),
        distance_x_to_xdoubleprime: path_distance(&x_edges, &x_dprime.materialize(depth))
            .unwrap_or(0.0),
        image_distance: path_distance(&yp, &yd).unwrap_or(0.0),
        image_start_vertices: (yp[0].source, yd[0].source),
    }
}

/// Copy `base` through level m−1, then take the minimal edge *out of* the
/// level-m vertex (the minimal edge into the target it leads to), continuing
/// below with further minimal edges out of each vertex.
fn deviate_minimally(
    diagram: &Diagram,
    order: &EdgeOrder,
    base: &[Edge],
    m: usize,
) -> OrderedPath {
    let band = diagram.band().expect("requires band data");
    let diagram2 = diagram.clone();
    let order2 = order.clone();
    let band2 = band.clone();
    let rule = move |level: usize, cur: Vertex| -> Edge {
        // Minimal edge with source cur: into target cur + t_level.
        let e = order2.minimal_edge_into(&diagram2, level, cur + band2.t(level));
        assert_eq!(e.source, cur);
        e
    };
    let mut edges: Vec<Edge> = base[..m].to_vec();
    let cur = if m == 0 { base[0].source } else { base[m - 1].target };
    edges.push(rule(m, cur));
    OrderedPath::new(FinitePath::new(0, edges), TailRule::Rule(Arc::new(rule)))
}

// ---------------------------------------------------------------------------
// Continuity probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ContinuitySample {
    pub m: usize,
    pub distance_to_extreme: f64,
    pub image_distance_to_paired: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityTable {
    pub direction: ProbeDirection,
    pub samples: Vec<ContinuitySample>,
    /// True when every sample's image landed within its sample distance of
    /// the paired extreme path (the modulus expected of a continuous
    /// extension).
    pub modulus_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeDirection {
    Forward,
    Inverse,
}

/// Probe the (forward or inverse) Vershik map near an extreme path: for each
/// `M`, deform the extreme path at level `M` (via `deviate`), apply the map,
/// and measure the image's distance to the paired opposite-extreme path.
#[allow(clippy::too_many_arguments)]
pub fn continuity_probe(
    diagram: &Diagram,
    order: &EdgeOrder,
    extreme: &OrderedPath,
    paired: &OrderedPath,
    ms: &[usize],
    deviate: impl Fn(usize) -> OrderedPath,
    direction: ProbeDirection,
    extra_depth: usize,
) -> ContinuityTable {
    let mut samples = Vec::new();
    let mut modulus_holds = true;
    for &m in ms {
        let depth = m + extra_depth;
        let sample = deviate(m);
        let d_x = path_distance(&extreme.materialize(depth), &sample.materialize(depth))
            .unwrap_or(0.0);
        let image = match direction {
            ProbeDirection::Forward => vershik_step(diagram, order, &sample, depth),
            ProbeDirection::Inverse => vershik_inverse_step(diagram, order, &sample, depth),
        }
        .unwrap_image();
        let d_img = path_distance(&image.materialize(depth), &paired.materialize(depth))
            .unwrap_or(0.0);
        if d_img > d_x {
            modulus_holds = false;
        }
        samples.push(ContinuitySample {
            m,
            distance_to_extreme: d_x,
            image_distance_to_paired: d_img,
        });
    }
    ContinuityTable {
        direction,
        samples,
        modulus_holds,
    }
}

// ---------------------------------------------------------------------------
// Telescoped orders
// ---------------------------------------------------------------------------

/// The order induced on a telescoped diagram: incoming composite edges of a
/// vertex are the multi-level paths into it across the collapsed segment,
/// compared top-down (last original edge first). Returns, for a telescoped
/// level `k`, the rank rule to pair with the telescoped diagram, where the
/// composite copy index enumerates the parallel segment paths between a
/// fixed (source, target) pair in canonical (source-lexicographic) order.
pub fn telescoped_order(base: &Diagram, base_order: &EdgeOrder, cuts: &[usize]) -> EdgeOrder {
    let cuts: Vec<usize> = cuts.to_vec();
    let base = base.clone();
    let base_order = base_order.clone();
    EdgeOrder::from_labels("telescoped", move |k, v, key| {
        let (a, z) = if k + 1 < cuts.len() {
            (cuts[k], cuts[k + 1])
        } else {
            let last = *cuts.last().unwrap();
            let off = last + (k - (cuts.len() - 1));
            (off, off + 1)
        };
        // Enumerate all segment paths into v, canonically keyed.
        let paths = segment_paths(&base, v, a, z);
        // Composite copy index of `key`: position among paths with the same
        // start source in canonical order.
        let mine: Vec<&Vec<Edge>> = paths
            .iter()
            .filter(|p| p[0].source == key.source)
            .collect();
        let path = mine
            .get(key.copy as usize)
            .unwrap_or_else(|| panic!("composite copy {} out of range", key.copy));
        // Rank: adic position among all segment paths into v.
        let mut sorted: Vec<&Vec<Edge>> = paths.iter().collect();
        sorted.sort_by(|p, q| {
            for i in (0..p.len()).rev() {
                if p[i] != q[i] {
                    let pa = base_order.position(&base, &p[i]);
                    let pb = base_order.position(&base, &q[i]);
                    return pa.cmp(&pb);
                }
            }
            std::cmp::Ordering::Equal
        });
        sorted.iter().position(|p| *p == *path).unwrap() as u64
    })
}

/// All paths from level `a` to `v` at level `z` of the base diagram, sorted
/// canonically (by source, then edge copies bottom-up).
fn segment_paths(base: &Diagram, v: Vertex, a: usize, z: usize) -> Vec<Vec<Edge>> {
    fn go(base: &Diagram, v: Vertex, a: usize, n: usize, suffix: &mut Vec<Edge>, acc: &mut Vec<Vec<Edge>>) {
        if n == a {
            acc.push(suffix.iter().rev().copied().collect());
            return;
        }
        for (source, mult) in base.incoming(n - 1, v) {
            for copy in 0..mult as u32 {
                suffix.push(Edge {
                    level: n - 1,
                    source,
                    target: v,
                    copy,
                });
                go(base, source, a, n - 1, suffix, acc);
                suffix.pop();
            }
        }
    }
    let mut acc = Vec::new();
    go(base, v, a, z, &mut Vec::new(), &mut acc);
    acc.sort_by_key(|p| {
        (
            p[0].source,
            p.iter().map(|e| (e.source, e.copy)).collect::<Vec<_>>(),
        )
    });
    acc
}
