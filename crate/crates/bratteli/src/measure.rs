//! Tail-invariant measures on path spaces: exact cylinder values from an
//! eigenpair, inverse-limit measure vectors for general diagrams (with
//! cone-collapse detection), Kakutani–Rokhlin tower measures, the
//! normalized (λₙ, μ̂⁽ⁿ⁾, Ĥ⁽ⁿ⁾) sequences, induced stochastic matrices,
//! and the frequency / height-ratio / measure-ratio limit identities as
//! numerical checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{Diagram, FinitePath};
use crate::exact::Quad;
use crate::matrix::{big_ratio, Matrix, Vertex, Window};
use crate::spectral::EigenPair;

#[derive(Debug, Error)]
pub enum MeasureError {
    /// Deepening the inverse-limit seed pushes all mass off every fixed
    /// window: evidence that no tail-invariant measure with finite positive
    /// cylinder values exists.
    #[error(
        "cone collapse: after {depths_probed} deepening steps the sup-normalized \
         mass on [{lo}, {hi}] fell to {last_mass:.3e}"
    )]
    ConeCollapse {
        lo: Vertex,
        hi: Vertex,
        depths_probed: usize,
        last_mass: f64,
    },
    #[error("inverse-limit iterates not Cauchy at tolerance {tol:.3e} (last gap {last_gap:.3e})")]
    NotCauchy { tol: f64, last_gap: f64 },
    #[error("measure vectors are not summable at level 0; probability normalization impossible")]
    NotProbability,
}

// ---------------------------------------------------------------------------
// Heights and path counts (exact)
// ---------------------------------------------------------------------------

/// Memoized exact path counts from level 0: `H⁽ⁿ⁾_v` is the number of
/// finite paths from any level-0 vertex into `v ∈ Vₙ` (all level-0 seeds
/// weighted 1). Heights grow like λⁿ, so they are kept as big integers.
pub struct HeightCache {
    diagram: Diagram,
    memo: Mutex<HashMap<(usize, Vertex), Arc<BigUint>>>,
}

impl HeightCache {
    pub fn new(diagram: &Diagram) -> HeightCache {
        HeightCache {
            diagram: diagram.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn height(&self, level: usize, v: Vertex) -> Arc<BigUint> {
        if level == 0 {
            return Arc::new(BigUint::one());
        }
        if let Some(h) = self.memo.lock().unwrap().get(&(level, v)) {
            return h.clone();
        }
        let mut total = BigUint::zero();
        for (w, m) in self.diagram.incoming(level - 1, v) {
            total += &*self.height(level - 1, w) * BigUint::from(m);
        }
        let total = Arc::new(total);
        self.memo
            .lock()
            .unwrap()
            .insert((level, v), total.clone());
        total
    }

    pub fn height_f64(&self, level: usize, v: Vertex) -> f64 {
        crate::matrix::big_to_f64(&self.height(level, v))
    }
}

/// Exact number of paths from `w ∈ V_{from}` to `v ∈ V_{to}`.
pub fn path_count(
    diagram: &Diagram,
    from_level: usize,
    w: Vertex,
    to_level: usize,
    v: Vertex,
) -> BigUint {
    assert!(from_level <= to_level);
    // Backward dynamic program over the (finite) incoming lists.
    let mut counts: HashMap<Vertex, BigUint> = HashMap::new();
    counts.insert(v, BigUint::one());
    for level in (from_level..to_level).rev() {
        let mut next: HashMap<Vertex, BigUint> = HashMap::new();
        for (target, c) in &counts {
            for (source, m) in diagram.incoming(level, *target) {
                *next.entry(source).or_default() += c * BigUint::from(m);
            }
        }
        counts = next;
    }
    counts.remove(&w).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Measure vectors
// ---------------------------------------------------------------------------

/// A tail-invariant measure presented as its cylinder-value vectors:
/// `levels[n][v]` is the measure of any cylinder over a path from level 0
/// ending at `v ∈ Vₙ`. Consistent by construction: pushing level n+1
/// through the incidence matrix reproduces level n.
#[derive(Debug, Clone)]
pub struct MeasureVectors {
    pub levels: Vec<HashMap<Vertex, f64>>,
    /// Seed depth of the deepest inverse-limit probe (0 for closed forms).
    pub seed_depth: usize,
    /// Sup-distance between the last two deepening probes on the
    /// comparison window (0 for closed forms).
    pub cauchy_gap: f64,
}

impl MeasureVectors {
    pub fn value(&self, level: usize, v: Vertex) -> f64 {
        self.levels
            .get(level)
            .and_then(|m| m.get(&v))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Rescale so the level-0 cylinder values sum to 1 over the computed
    /// support (the probability normalization `⟨p⁽⁰⁾, H⁽⁰⁾⟩ = 1` with unit
    /// level-0 heights).
    pub fn into_probability(mut self) -> Result<MeasureVectors, MeasureError> {
        let total: f64 = self.levels[0].values().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(MeasureError::NotProbability);
        }
        for level in &mut self.levels {
            for val in level.values_mut() {
                *val /= total;
            }
        }
        Ok(self)
    }

    /// Max Kolmogorov-consistency defect on the window: the level-n value
    /// at `w` must equal the weighted sum of its one-level extensions.
    pub fn consistency_defect(&self, diagram: &Diagram, window: Window) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.depth() {
            let mut pushed: HashMap<Vertex, f64> = HashMap::new();
            for (v, p) in &self.levels[n + 1] {
                for (w, m) in diagram.incoming(n, *v) {
                    *pushed.entry(w).or_default() += m as f64 * p;
                }
            }
            for w in window.iter() {
                let lhs = self.value(n, w);
                if lhs == 0.0 && !pushed.contains_key(&w) {
                    continue;
                }
                worst = worst.max((lhs - pushed.get(&w).copied().unwrap_or(0.0)).abs());
            }
        }
        worst
    }
}

/// Exact measure of a cylinder from a closed-form eigenpair: a path of
/// length n ending at vertex v has measure ξ_v / λⁿ, independent of the
/// path taken (tail invariance).
pub fn stationary_cylinder_measure(
    lambda: &Quad,
    xi: &dyn Fn(Vertex) -> Quad,
    cylinder: &FinitePath,
) -> Quad {
    let n = cylinder.end_level() as i32;
    let v = cylinder
        .range_vertex()
        .expect("cylinder must contain at least one edge");
    assert_eq!(cylinder.start_level, 0, "cylinder must start at level 0");
    &xi(v) / &lambda.pow(n)
}

/// Measure vectors of a stationary diagram from its eigenpair:
/// `p⁽ⁿ⁾_v = ξ_v / λⁿ` on the window.
pub fn stationary_measure_vectors(
    pair: &EigenPair,
    depth: usize,
    window: Window,
) -> MeasureVectors {
    let mut levels = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let scale = pair.lambda.powi(n as i32);
        let mut m = HashMap::new();
        for v in window.iter() {
            if pair.xi.has_entry(v) {
                m.insert(v, pair.xi.value(v) / scale);
            }
        }
        levels.push(m);
    }
    MeasureVectors {
        levels,
        seed_depth: 0,
        cauchy_gap: 0.0,
    }
}

// ---------------------------------------------------------------------------
// Inverse-limit construction
// ---------------------------------------------------------------------------

/// Seed vector placed at the deep level before pulling back.
#[derive(Clone)]
pub enum Seed {
    /// Uniform mass on the padded seed window (mirrors the cone
    /// construction directly).
    Uniform,
    /// Mass aligned to a given profile — used to separate multiple
    /// invariant measures when the diagram has several eigenpairs.
    Aligned(Arc<dyn Fn(Vertex) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct InverseLimitConfig {
    /// Window on which convergence is judged (and on which cone collapse
    /// is detected).
    pub window: Window,
    /// Seed depths to probe, shallow to deep; consecutive probes are
    /// compared in sup norm on the window.
    pub depth_schedule: Vec<usize>,
    /// Per-level widening of the seed window beyond `window` (offset reach
    /// of a single level; the diagram band `t` when one is declared).
    pub pad_per_level: i64,
    pub seed: Seed,
    pub tol: f64,
    /// Window mass (relative to the global sup) below which the probe
    /// counts as collapsing.
    pub collapse_tol: f64,
}

impl InverseLimitConfig {
    pub fn new(window: Window, depth_schedule: Vec<usize>, tol: f64) -> InverseLimitConfig {
        InverseLimitConfig {
            window,
            depth_schedule,
            pad_per_level: 1,
            seed: Seed::Uniform,
            tol,
            collapse_tol: 1e-6,
        }
    }
}

fn pull_back_level(
    diagram: &Diagram,
    edge_level: usize,
    p_next: &HashMap<Vertex, f64>,
) -> HashMap<Vertex, f64> {
    let mut out: HashMap<Vertex, f64> = HashMap::new();
    for (v, p) in p_next {
        if *p == 0.0 {
            continue;
        }
        for (w, m) in diagram.incoming(edge_level, *v) {
            *out.entry(w).or_default() += m as f64 * p;
        }
    }
    out
}

fn window_profile(p: &HashMap<Vertex, f64>, window: Window) -> (Vec<f64>, f64) {
    // Values on the window normalized to window-sup 1, and the sup of the
    // normalized profile over the window *interior* (endpoints excluded).
    // A measure that exists has a stable positive interior profile; when
    // all mass races toward the window boundary (and beyond, for any
    // window), the interior sup decays to 0 with depth — the cone-collapse
    // signature. Normalizing by the window sup (not the global sup) keeps
    // σ-finite measures that grow off-window, like tilted two-sided
    // families, from being misdiagnosed.
    let vals: Vec<f64> = window
        .iter()
        .map(|v| p.get(&v).copied().unwrap_or(0.0))
        .collect();
    let wsup = vals.iter().cloned().fold(0.0f64, f64::max);
    let profile: Vec<f64> = if wsup > 0.0 {
        vals.iter().map(|x| x / wsup).collect()
    } else {
        vals
    };
    let interior_sup = if profile.len() > 2 {
        profile[1..profile.len() - 1]
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
    } else {
        profile.iter().cloned().fold(0.0f64, f64::max)
    };
    (profile, interior_sup)
}

/// Approximate the tail-invariant measure vectors of a diagram by the
/// inverse-limit (cone) construction: place a seed at a deep level, pull it
/// back through the incidence matrices, renormalize, and deepen until the
/// level-0 profile is Cauchy on the window. Levels `0..=target_depth` of
/// the deepest probe are returned, rescaled so `‖p⁽⁰⁾‖∞ = 1` on the
/// window.
pub fn invariant_vectors(
    diagram: &Diagram,
    target_depth: usize,
    config: &InverseLimitConfig,
) -> Result<MeasureVectors, MeasureError> {
    assert!(!config.depth_schedule.is_empty());
    let window = config.window;
    let mut prev_profile: Option<Vec<f64>> = None;
    let mut last_gap = f64::INFINITY;
    let mut last_mass = f64::NAN;
    let mut collapsing = true;
    let mut best: Option<MeasureVectors> = None;

    for &depth in config.depth_schedule.iter() {
        assert!(depth > target_depth, "seed depth must exceed target depth");
        let pad = config.pad_per_level * depth as i64;
        let seed_window = diagram
            .index_set()
            .clamp(Window::new(window.lo - pad, window.hi + pad));
        let mut p: HashMap<Vertex, f64> = HashMap::new();
        for v in seed_window.iter() {
            let val = match &config.seed {
                Seed::Uniform => 1.0,
                Seed::Aligned(f) => f(v),
            };
            if val > 0.0 {
                p.insert(v, val);
            }
        }
        // Pull back, renormalizing by the sup each level to stay in f64
        // range; renormalization only rescales the whole family.
        let mut at_target: Option<HashMap<Vertex, f64>> = None;
        for edge_level in (0..depth).rev() {
            let mut next = pull_back_level(diagram, edge_level, &p);
            let sup = next.values().cloned().fold(0.0f64, f64::max);
            if sup > 0.0 {
                for val in next.values_mut() {
                    *val /= sup;
                }
            }
            if edge_level == target_depth {
                at_target = Some(next.clone());
            }
            p = next;
        }
        let (profile, interior_sup) = window_profile(&p, window);
        last_mass = interior_sup;
        collapsing = interior_sup < config.collapse_tol;
        if let Some(prev) = &prev_profile {
            last_gap = profile
                .iter()
                .zip(prev.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
        }
        prev_profile = Some(profile);

        // Re-derive a clean, exactly consistent family by one pull-back of
        // the level-target_depth vector (the per-level renormalizations
        // above only changed the overall scale), then rescale so the
        // level-0 window sup is 1.
        let mut clean = vec![HashMap::new(); target_depth + 1];
        clean[target_depth] = at_target.expect("depth exceeds target depth");
        for n in (0..target_depth).rev() {
            clean[n] = pull_back_level(diagram, n, &clean[n + 1]);
        }
        let sup0: f64 = window
            .iter()
            .map(|v| clean[0].get(&v).copied().unwrap_or(0.0))
            .fold(0.0, f64::max);
        if sup0 > 0.0 {
            for level in &mut clean {
                for val in level.values_mut() {
                    *val /= sup0;
                }
            }
        }
        best = Some(MeasureVectors {
            levels: clean,
            seed_depth: depth,
            cauchy_gap: last_gap,
        });
    }

    if collapsing {
        return Err(MeasureError::ConeCollapse {
            lo: window.lo,
            hi: window.hi,
            depths_probed: config.depth_schedule.len(),
            last_mass,
        });
    }
    if last_gap > config.tol {
        return Err(MeasureError::NotCauchy {
            tol: config.tol,
            last_gap,
        });
    }
    Ok(best.expect("schedule is non-empty"))
}

// ---------------------------------------------------------------------------
// Towers
// ---------------------------------------------------------------------------

/// Measure of the Kakutani–Rokhlin tower over `v ∈ Vₙ`: cylinder value at
/// `v` times the tower height.
pub fn tower_measure(
    measure: &MeasureVectors,
    heights: &HeightCache,
    v: Vertex,
    n: usize,
) -> f64 {
    measure.value(n, v) * heights.height_f64(n, v)
}

/// Total tower mass at level n over the measure's computed support
/// (equals 1 for a probability measure, up to window truncation).
pub fn tower_total(measure: &MeasureVectors, heights: &HeightCache, n: usize) -> f64 {
    measure.levels[n]
        .iter()
        .map(|(v, p)| p * heights.height_f64(n, *v))
        .sum()
}

// ---------------------------------------------------------------------------
// Normalized sequences (λₙ, μ̂, Ĥ)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NormalizedSequences {
    /// λₙ = ‖μ⁽ⁿ⁾‖∞ / ‖μ⁽ⁿ⁺¹⁾‖∞, all > 1 for a probability measure.
    pub lambdas: Vec<f64>,
    /// μ̂⁽ⁿ⁾ = μ⁽ⁿ⁾/‖μ⁽ⁿ⁾‖∞.
    pub mu_hat: Vec<HashMap<Vertex, f64>>,
    /// Ĥ⁽ⁿ⁾ = H⁽ⁿ⁾/⟨μ̂⁽ⁿ⁾, H⁽ⁿ⁾⟩, so ⟨μ̂⁽ⁿ⁾, Ĥ⁽ⁿ⁾⟩ = 1.
    pub h_hat: Vec<HashMap<Vertex, f64>>,
    /// ⟨μ̂⁽ⁿ⁾, Ĥ⁽ⁿ⁾⟩ as actually computed (≡ 1 up to rounding).
    pub pairings: Vec<f64>,
    /// ‖μ⁽ⁿ⁾‖∞ over the computed support.
    pub sup_norms: Vec<f64>,
}

impl NormalizedSequences {
    /// Rebuild the cylinder-value vector at level n from the normalized
    /// family: `p⁽ⁿ⁾ = ‖μ⁽⁰⁾‖∞ · μ̂⁽ⁿ⁾ / (λ₀⋯λₙ₋₁)` (the reconstruction
    /// identity; the leading factor is 1 when μ̂⁽⁰⁾ = μ⁽⁰⁾).
    pub fn reconstruct(&self, n: usize) -> HashMap<Vertex, f64> {
        let scale: f64 = self.sup_norms[0] / self.lambdas[..n].iter().product::<f64>();
        self.mu_hat[n]
            .iter()
            .map(|(v, m)| (*v, m * scale))
            .collect()
    }

    /// Max deviation of the reconstruction from the original vectors.
    pub fn round_trip_error(&self, measure: &MeasureVectors) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.mu_hat.len() {
            for (v, rebuilt) in self.reconstruct(n) {
                worst = worst.max((rebuilt - measure.value(n, v)).abs());
            }
        }
        worst
    }
}

/// Compute the normalized family of a (probability) measure.
pub fn normalized_sequences(
    measure: &MeasureVectors,
    heights: &HeightCache,
) -> NormalizedSequences {
    let depth = measure.depth();
    let mut sup_norms = Vec::with_capacity(depth + 1);
    let mut mu_hat = Vec::with_capacity(depth + 1);
    let mut h_hat = Vec::with_capacity(depth + 1);
    let mut pairings = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let sup = measure.levels[n].values().cloned().fold(0.0f64, f64::max);
        sup_norms.push(sup);
        let hat: HashMap<Vertex, f64> = measure.levels[n]
            .iter()
            .map(|(v, p)| (*v, p / sup))
            .collect();
        let pairing: f64 = hat
            .iter()
            .map(|(v, m)| m * heights.height_f64(n, *v))
            .sum();
        let hh: HashMap<Vertex, f64> = hat
            .keys()
            .map(|v| (*v, heights.height_f64(n, *v) / pairing))
            .collect();
        let check: f64 = hat.iter().map(|(v, m)| m * hh[v]).sum();
        mu_hat.push(hat);
        h_hat.push(hh);
        pairings.push(check);
    }
    let lambdas = (0..depth)
        .map(|n| sup_norms[n] / sup_norms[n + 1])
        .collect();
    NormalizedSequences {
        lambdas,
        mu_hat,
        h_hat,
        pairings,
        sup_norms,
    }
}

// ---------------------------------------------------------------------------
// Induced stochastic matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochKind {
    /// `P̂ₙ(w→v) = aₙ(w,v) μ̂⁽ⁿ⁺¹⁾_v / (λₙ μ̂⁽ⁿ⁾_w)`: rows indexed by
    /// level-n vertices, transitions go one level down the diagram.
    PHat,
    /// `Gₙ(v→w) = aₙ(w,v) H⁽ⁿ⁾_w / H⁽ⁿ⁺¹⁾_v`: rows indexed by level-(n+1)
    /// vertices, transitions climb toward level 0.
    G,
}

#[derive(Debug, Clone)]
pub struct LevelStochastic {
    pub level: usize,
    pub kind: StochKind,
    pub rows: HashMap<Vertex, Vec<(Vertex, f64)>>,
}

impl LevelStochastic {
    pub fn max_row_defect(&self) -> f64 {
        self.rows
            .values()
            .map(|row| (row.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-level stochastic matrices induced by a measure (kind `PHat`) or by
/// the heights alone (kind `G`).
pub fn stochastic_sequence(
    diagram: &Diagram,
    measure: &MeasureVectors,
    heights: &HeightCache,
    kind: StochKind,
) -> Vec<LevelStochastic> {
    let normalized = normalized_sequences(measure, heights);
    let mut out = Vec::new();
    for n in 0..measure.depth() {
        let mut rows: HashMap<Vertex, Vec<(Vertex, f64)>> = HashMap::new();
        match kind {
            StochKind::PHat => {
                for (v, mv) in &normalized.mu_hat[n + 1] {
                    for (w, m) in diagram.incoming(n, *v) {
                        let Some(mw) = normalized.mu_hat[n].get(&w) else {
                            continue;
                        };
                        rows.entry(w).or_default().push((
                            *v,
                            m as f64 * mv / (normalized.lambdas[n] * mw),
                        ));
                    }
                }
            }
            StochKind::G => {
                for v in measure.levels[n + 1].keys() {
                    let hv = heights.height_f64(n + 1, *v);
                    let row: Vec<(Vertex, f64)> = diagram
                        .incoming(n, *v)
                        .into_iter()
                        .map(|(w, m)| (w, m as f64 * heights.height_f64(n, w) / hv))
                        .collect();
                    rows.insert(*v, row);
                }
            }
        }
        out.push(LevelStochastic {
            level: n,
            kind,
            rows,
        });
    }
    out
}

/// Check `Cₙ s⁽ⁿ⁺¹⁾ = s⁽ⁿ⁾` (Cₙ the transpose of the height-induced
/// stochastic matrix, s⁽ⁿ⁾ the tower-measure probability vector). Returns
/// the worst absolute defect over the probed levels and window.
pub fn tower_recursion_defect(
    diagram: &Diagram,
    measure: &MeasureVectors,
    heights: &HeightCache,
    window: Window,
) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..measure.depth() {
        // (Cₙ s⁽ⁿ⁺¹⁾)_w = Σ_v Gₙ(v→w) s⁽ⁿ⁺¹⁾_v.
        let mut pushed: HashMap<Vertex, f64> = HashMap::new();
        for v in measure.levels[n + 1].keys() {
            let s_v = tower_measure(measure, heights, *v, n + 1);
            let hv = heights.height_f64(n + 1, *v);
            for (w, m) in diagram.incoming(n, *v) {
                *pushed.entry(w).or_default() +=
                    m as f64 * heights.height_f64(n, w) / hv * s_v;
            }
        }
        for w in window.iter() {
            let direct = tower_measure(measure, heights, w, n);
            if direct == 0.0 && !pushed.contains_key(&w) {
                continue;
            }
            worst = worst.max((pushed.get(&w).copied().unwrap_or(0.0) - direct).abs());
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Limit identities
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NuIteration {
    /// ν⁽ⁿ⁾ for n = 0..=n_max, starting from ν⁽⁰⁾ = ξ.
    pub iterates: Vec<HashMap<Vertex, f64>>,
    /// Max deviation at each n from the closed form ν⁽ⁿ⁾_v = ξ_v H⁽ⁿ⁾_v/λⁿ.
    pub closed_form_errors: Vec<f64>,
    /// Sup distance at each n to the limit ξ_v η_v / ⟨η, ξ⟩ on the window.
    pub limit_errors: Vec<f64>,
    /// |Σ_v ν⁽ⁿ⁾_v − 1| at each n (probability is preserved).
    pub mass_defects: Vec<f64>,
}

/// Iterate the row-stochastic matrix `p(w→v) = a(w,v) ξ_v/(λ ξ_w)` from
/// ν⁽⁰⁾ = ξ and compare against both the per-step closed form and the
/// positive-recurrent limit ξ_v η_v.
pub fn nu_iteration(
    matrix: &Matrix,
    diagram: &Diagram,
    pair: &EigenPair,
    n_max: usize,
    window: Window,
) -> NuIteration {
    let heights = HeightCache::new(diagram);
    let xi = |v: Vertex| pair.xi.value(v);
    let eta = |v: Vertex| pair.eta.value(v);
    let lambda = pair.lambda;
    let scan = window;
    let eta_dot_xi: f64 = scan.iter().map(|v| eta(v) * xi(v)).sum();

    let mut nu: HashMap<Vertex, f64> = scan
        .iter()
        .filter(|v| xi(*v) > 0.0)
        .map(|v| (v, xi(v)))
        .collect();
    let mut iterates = vec![nu.clone()];
    let mut closed_form_errors = vec![0.0];
    let mut limit_errors = vec![limit_error(&nu, &xi, &eta, eta_dot_xi, window)];
    let mut mass_defects = vec![(nu.values().sum::<f64>() - 1.0).abs()];

    for n in 1..=n_max {
        let mut next: HashMap<Vertex, f64> = HashMap::new();
        for (w, val) in &nu {
            let (entries, _complete) = matrix.row_entries(*w, scan);
            for (v, a) in entries {
                let xw = xi(*w);
                if xw > 0.0 && xi(v) > 0.0 {
                    *next.entry(v).or_default() += val * a as f64 * xi(v) / (lambda * xw);
                }
            }
        }
        nu = next;
        // Closed form: ν⁽ⁿ⁾_v = ξ_v H⁽ⁿ⁾_v / λⁿ (the λⁿ-scaled count of
        // paths into v from anywhere).
        let mut cf_err = 0.0f64;
        for (v, val) in &nu {
            let target = xi(*v) * heights.height_f64(n, *v) / lambda.powi(n as i32);
            cf_err = cf_err.max((val - target).abs());
        }
        closed_form_errors.push(cf_err);
        limit_errors.push(limit_error(&nu, &xi, &eta, eta_dot_xi, window));
        mass_defects.push((nu.values().sum::<f64>() - 1.0).abs());
        iterates.push(nu.clone());
    }
    NuIteration {
        iterates,
        closed_form_errors,
        limit_errors,
        mass_defects,
    }
}

fn limit_error(
    nu: &HashMap<Vertex, f64>,
    xi: &dyn Fn(Vertex) -> f64,
    eta: &dyn Fn(Vertex) -> f64,
    eta_dot_xi: f64,
    window: Window,
) -> f64 {
    window
        .iter()
        .map(|v| {
            let target = xi(v) * eta(v) / eta_dot_xi;
            (nu.get(&v).copied().unwrap_or(0.0) - target).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct RatioSequence {
    pub terms: Vec<(usize, f64)>,
    pub target: f64,
    pub final_error: f64,
}

/// Exact height ratios `H⁽ⁿ⁾_w / H⁽ⁿ⁺¹⁾_v` against the limit
/// `η_w / (λ η_v)`.
pub fn height_ratio_limit(
    diagram: &Diagram,
    pair: &EigenPair,
    w: Vertex,
    v: Vertex,
    n_max: usize,
) -> RatioSequence {
    let heights = HeightCache::new(diagram);
    let eta = |u: Vertex| pair.eta.value(u);
    let target = eta(w) / (pair.lambda * eta(v));
    let terms: Vec<(usize, f64)> = (1..=n_max)
        .map(|n| {
            (
                n,
                big_ratio(&heights.height(n, w), &heights.height(n + 1, v)),
            )
        })
        .collect();
    let final_error = terms
        .last()
        .map(|(_, r)| (r - target).abs())
        .unwrap_or(f64::NAN);
    RatioSequence {
        terms,
        target,
        final_error,
    }
}

/// Empirical cylinder frequency: paths from `w ∈ Vₙ` into a deep vertex
/// `v ∈ V_N`, divided by all paths into `v`, against the measure value
/// ξ_w/λⁿ. The numerical content of unique ergodicity.
pub fn frequency_check(
    diagram: &Diagram,
    pair: &EigenPair,
    w: Vertex,
    n: usize,
    deep_vertex: Vertex,
    horizon: usize,
) -> RatioSequence {
    let heights = HeightCache::new(diagram);
    let target = pair.xi.value(w) / pair.lambda.powi(n as i32);
    let mut terms = Vec::new();
    for big_n in (n + 1)..=horizon {
        let count = path_count(diagram, n, w, big_n, deep_vertex);
        let h = heights.height(big_n, deep_vertex);
        terms.push((big_n, big_ratio(&count, &h)));
    }
    let final_error = terms
        .last()
        .map(|(_, r)| (r - target).abs())
        .unwrap_or(f64::NAN);
    RatioSequence {
        terms,
        target,
        final_error,
    }
}

/// Measure-ratio limit for two cylinders ending at `(v₁, n₁)` and
/// `(v₂, n₂)`: path counts into a common deep vertex satisfy
/// `a⁽ᴺ⁻ⁿ¹⁾(v₁→u) / a⁽ᴺ⁻ⁿ²⁾(v₂→u) → (ξ_{v₁}/ξ_{v₂}) λ^{n₂−n₁}` — the
/// σ-finite uniqueness identity (assumes conservativity, which is not
/// checkable from finite data).
pub fn ratio_limit_check(
    diagram: &Diagram,
    pair: &EigenPair,
    (v1, n1): (Vertex, usize),
    (v2, n2): (Vertex, usize),
    deep_vertex: Vertex,
    horizon: usize,
) -> RatioSequence {
    let target = pair.xi.value(v1) / pair.xi.value(v2)
        * pair.lambda.powi(n2 as i32 - n1 as i32);
    let mut terms = Vec::new();
    for big_n in (n1.max(n2) + 1)..=horizon {
        let c1 = path_count(diagram, n1, v1, big_n, deep_vertex);
        let c2 = path_count(diagram, n2, v2, big_n, deep_vertex);
        if c2.is_zero() {
            continue;
        }
        terms.push((big_n, big_ratio(&c1, &c2)));
    }
    let final_error = terms
        .last()
        .map(|(_, r)| (r - target).abs())
        .unwrap_or(f64::NAN);
    RatioSequence {
        terms,
        target,
        final_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::diagram::Edge;
    use crate::exact::rat;

    fn cylinder_of_length(diagram: &Diagram, depth: usize, end: Vertex) -> FinitePath {
        // Any path of the given length ending at `end` (greedy backward).
        let mut vertices = vec![end];
        for level in (0..depth).rev() {
            let (w, _) = diagram.incoming(level, vertices[0])[0];
            vertices.insert(0, w);
        }
        let edges = (0..depth)
            .map(|i| Edge {
                level: i,
                source: vertices[i],
                target: vertices[i + 1],
                copy: 0,
            })
            .collect();
        FinitePath::new(0, edges)
    }

    #[test]
    fn cylinder_measure_exact_walk() {
        let e = catalog::resolve("a1?a=1&b=1").unwrap();
        let lambda = e.oracle.lambda.clone().unwrap();
        let xi = e.oracle.xi.clone().unwrap();
        let path = cylinder_of_length(&e.diagram, 2, 0);
        let m = stationary_cylinder_measure(&lambda, &*xi, &path);
        assert_eq!(m, Quad::from_rat(rat(1, 9)));
    }

    #[test]
    fn renewal_towers_are_probability() {
        let e = catalog::resolve("a5").unwrap();
        let pair = e.eigen_pair().unwrap();
        let measure = stationary_measure_vectors(&pair, 8, Window::new(1, 80));
        let heights = HeightCache::new(&e.diagram);
        for n in 0..=8 {
            let total = tower_total(&measure, &heights, n);
            assert!((total - 1.0).abs() < 1e-9, "n={n}: {total}");
        }
    }

    #[test]
    fn inverse_limit_recovers_renewal_eigenvector() {
        let e = catalog::resolve("a5").unwrap();
        let window = Window::new(1, 30);
        let config = InverseLimitConfig::new(window, vec![20, 30, 44], 1e-8);
        let measure = invariant_vectors(&e.diagram, 4, &config).unwrap();
        // Sup-normalized on the window: ξ_v/ξ_1 = 2^{1−v}.
        for v in 1..=30 {
            let expected = 2.0f64.powi(1 - v as i32);
            assert!(
                (measure.value(0, v) - expected).abs() < 1e-8,
                "v={v}: {} vs {expected}",
                measure.value(0, v)
            );
        }
        assert!(measure.consistency_defect(&e.diagram, window) < 1e-12);
    }

    #[test]
    fn growing_diagonal_collapses() {
        let e = catalog::resolve("no_measure").unwrap();
        let config = InverseLimitConfig::new(Window::new(1, 20), vec![120, 240, 360], 1e-8);
        match invariant_vectors(&e.diagram, 3, &config) {
            Err(MeasureError::ConeCollapse { .. }) => {}
            other => panic!("expected cone collapse, got {other:?}"),
        }
    }

    #[test]
    fn hopping_family_has_two_measures() {
        let e = catalog::resolve("a2?a=1&b=2").unwrap();
        let window = Window::new(-10, 10);
        let second = e.oracle.second.clone().unwrap();
        let xi2 = second.xi.clone().unwrap();
        let mut flat = InverseLimitConfig::new(window, vec![25, 40], 1e-6);
        flat.seed = Seed::Aligned(Arc::new(|_| 1.0f64));
        let mut tilted = InverseLimitConfig::new(window, vec![25, 40], 1e-6);
        tilted.seed = Seed::Aligned(Arc::new(move |v| xi2(v).to_f64()));
        let m1 = invariant_vectors(&e.diagram, 2, &flat).unwrap();
        let m2 = invariant_vectors(&e.diagram, 2, &tilted).unwrap();
        // The two families have genuinely different shapes on the window.
        let mut max_rel_gap = 0.0f64;
        for v in window.iter() {
            let (a, b) = (m1.value(0, v), m2.value(0, v));
            if a > 0.0 && b > 0.0 {
                max_rel_gap = max_rel_gap.max((a / b - 1.0).abs());
            }
        }
        assert!(max_rel_gap > 0.10, "gap {max_rel_gap}");
    }

    #[test]
    fn normalized_family_identities() {
        let e = catalog::resolve("a5").unwrap();
        let pair = e.eigen_pair().unwrap();
        let measure = stationary_measure_vectors(&pair, 6, Window::new(1, 60));
        let heights = HeightCache::new(&e.diagram);
        let family = normalized_sequences(&measure, &heights);
        for l in &family.lambdas {
            assert!((*l - 2.0).abs() < 1e-12);
        }
        for p in &family.pairings {
            assert!((p - 1.0).abs() < 1e-10);
        }
        assert!(family.round_trip_error(&measure) < 1e-12);
    }

    #[test]
    fn stochastic_rows_and_tower_recursion() {
        let e = catalog::resolve("a5").unwrap();
        let pair = e.eigen_pair().unwrap();
        let measure = stationary_measure_vectors(&pair, 8, Window::new(1, 80));
        let heights = HeightCache::new(&e.diagram);
        for kind in [StochKind::PHat, StochKind::G] {
            for level in stochastic_sequence(&e.diagram, &measure, &heights, kind) {
                assert!(level.max_row_defect() < 1e-12, "{kind:?} at {}", level.level);
            }
        }
        let defect = tower_recursion_defect(&e.diagram, &measure, &heights, Window::new(1, 40));
        assert!(defect < 1e-10, "defect {defect}");
    }

    #[test]
    fn nu_iteration_converges_for_renewal() {
        let e = catalog::resolve("a5").unwrap();
        let pair = e.eigen_pair().unwrap();
        let report = nu_iteration(&e.matrix, &e.diagram, &pair, 40, Window::new(1, 200));
        for err in &report.closed_form_errors {
            assert!(*err < 1e-12, "closed-form defect {err}");
        }
        for defect in &report.mass_defects {
            assert!(*defect < 1e-9, "mass defect {defect}");
        }
        assert!(report.limit_errors[40] < 1e-3);
        // ν converges to ξ itself here (η constant, ⟨η,ξ⟩ = 1).
        assert!((report.iterates[40][&1] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn height_ratio_and_frequency_limits() {
        let e = catalog::resolve("a5").unwrap();
        let pair = e.eigen_pair().unwrap();
        let r = height_ratio_limit(&e.diagram, &pair, 1, 1, 30);
        assert!((r.target - 0.5).abs() < 1e-15);
        assert!(r.final_error < 1e-3, "err {}", r.final_error);

        let f = frequency_check(&e.diagram, &pair, 1, 1, 1, 40);
        assert!((f.target - 0.25).abs() < 1e-15);
        assert!(f.final_error < 1e-3, "err {}", f.final_error);
    }

    #[test]
    fn ratio_limit_matches_closed_forms() {
        // Pair renewal: same level, v₁=2, v₂=3 → ξ₂/ξ₃ = 1+√2.
        let e = catalog::resolve("a6").unwrap();
        let pair = e.eigen_pair().unwrap();
        let r = ratio_limit_check(&e.diagram, &pair, (2, 1), (3, 1), 1, 40);
        assert!((r.target - (1.0 + 2.0f64.sqrt())).abs() < 1e-12);
        assert!(r.final_error < 1e-3, "err {}", r.final_error);

        // Positive-recurrent lazy walk: v₁=0 at level 1, v₂=1 at level 2 →
        // (ξ₀/ξ₁)·λ = 2·5 = 10; convergence is geometric here (the
        // symmetric a=b case converges only at the 1/N central-limit rate).
        let e = catalog::resolve("a1?a=1&b=2").unwrap();
        let pair = e.eigen_pair().unwrap();
        let r = ratio_limit_check(&e.diagram, &pair, (0, 1), (1, 2), 0, 60);
        assert!((r.target - 10.0).abs() < 1e-12);
        assert!(r.final_error < 1e-3, "err {}", r.final_error);
    }
}
