//! Command-line interface to the `bratteli` library: spectral analysis,
//! tail-invariant measures, Vershik dynamics, path counting, random walks,
//! constructive witnesses, invariant verification, and DOT rendering for
//! generalized Bratteli diagrams.
//!
//! Exit codes: 0 on success, 1 on computational failure (no eigenvalue,
//! cone collapse, missing witness, failed verification), 2 on configuration
//! errors (bad flags, unparseable descriptors or JSON).

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use bratteli::catalog::{self, CatalogEntry, XiSum};
use bratteli::diagram::{
    slanting_membership, transitive_witness, Diagram, Edge, FinitePath, Slant,
};
use bratteli::measure::{
    invariant_vectors, normalized_sequences, stationary_cylinder_measure,
    stationary_measure_vectors, stochastic_sequence, tower_total, HeightCache, InverseLimitConfig,
    MeasureError, StochKind,
};
use bratteli::order::{
    banded_extreme_path, continuity_probe, discontinuity_witness, extreme_paths, vershik_step,
    vershik_inverse_step, DiscontinuityOutcome, EdgeOrder, OrderTable, OrderedPath, ProbeDirection,
    Side, StepResult, TailRule,
};
use bratteli::report::{envelope, render_dot};
use bratteli::spectral::{
    classify_recurrence, column_sum_bounds, perron_estimate, right_eigenvector,
    stochastic_from_eigenpair, truncated_spectral_radius, verify_left_exact, verify_right_exact,
    EigenPair, EigenVector, Provenance,
};
use bratteli::{IndexSet, Matrix, MatrixDescriptor, Vertex, Window};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

enum CliError {
    /// Bad configuration (unknown ids, unparseable files/JSON/flags) — exit 2.
    Config(String),
    /// Computation failed honestly (divergence, collapse, no witness) — exit 1.
    Compute(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> CliError {
        CliError::Config(e.to_string())
    }
    fn compute(e: impl std::fmt::Display) -> CliError {
        CliError::Compute(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "bratteli",
    version,
    about = "Spectral analysis, invariant measures, and Vershik dynamics on generalized Bratteli diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureMode {
    Eigen,
    InverseLimit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    Transitive,
    Discontinuity,
    Continuity,
    Slanting,
    Extreme,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Args, Clone)]
struct DiagramArg {
    /// Diagram source: a catalog address (`a5`, `catalog:a1?a=1&b=2`) or a
    /// path to a JSON matrix descriptor (see schemas/matrix_descriptor.md).
    #[arg(long)]
    diagram: String,
}

#[derive(Args, Clone)]
struct WindowArg {
    /// Vertex window `lo:hi` for truncated computations and display.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Args, Clone)]
struct OrderArg {
    /// Edge order: `left-to-right`, `slanted`, or `file:<path>` pointing at
    /// an order-table JSON.
    #[arg(long, default_value = "left-to-right")]
    order: String,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue estimate, column-sum bounds, and recurrence classification.
    Analyze {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// Anchor vertex for diagonal power entries (defaults to the
        /// smallest natural or to 0 on the integers).
        #[arg(long, allow_hyphen_values = true)]
        anchor: Option<Vertex>,
        /// Power-entry horizon.
        #[arg(long, default_value_t = 60)]
        horizon: u32,
        /// Report exact (closed-form) eigendata and exact residual checks
        /// when the diagram carries them.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Tail-invariant measure vectors and cylinder values.
    Measure {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// `eigen`: closed-form/windowed eigenvector measure.
        /// `inverse-limit`: deep-seed pull-back construction.
        #[arg(long, value_enum, default_value_t = MeasureMode::Eigen)]
        mode: MeasureMode,
        /// Number of levels of measure vectors to report.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// A cylinder as JSON: {"start_level":0,"edges":[{"source":..,"target":..,"copy":..},..]}.
        #[arg(long)]
        cylinder: Option<String>,
        /// Inverse-limit seed depths to probe, comma-separated and
        /// increasing (defaults to a schedule scaled from --depth). A
        /// no-measure verdict (cone collapse) needs deep probes.
        #[arg(long)]
        probes: Option<String>,
        /// Report the cylinder value exactly (requires closed-form eigendata).
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Iterate the Vershik successor (or predecessor) map from an extreme path.
    Vershik {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        order: OrderArg,
        /// Level-`depth` vertex whose minimal (forward) or maximal
        /// (inverse) path seeds the iteration.
        #[arg(long, default_value_t = 1)]
        vertex: Vertex,
        /// Path depth to materialize and probe.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Number of successor/predecessor applications.
        #[arg(long, default_value_t = 5)]
        steps: usize,
        /// Iterate the inverse (predecessor) map instead.
        #[arg(long)]
        inverse: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Exact path counts from level 0 (heights).
    Heights {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// Level to report.
        #[arg(long, default_value_t = 5)]
        level: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Seeded random walk of the eigenvector-induced Markov chain.
    Walk {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// RNG seed; the report is byte-identical for a fixed seed+config.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of steps.
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Start vertex (defaults to the anchor).
        #[arg(long, allow_hyphen_values = true)]
        start: Option<Vertex>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Constructive witnesses: transitivity, (dis)continuity, slanting sets,
    /// extreme-path existence/emptiness.
    Witness {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        window: WindowArg,
        #[arg(long, value_enum)]
        kind: WitnessKind,
        /// Cylinder JSON (transitive, slanting).
        #[arg(long)]
        cylinder: Option<String>,
        /// Designated vertex: vertical-return vertex (transitive), start of
        /// the extreme path (discontinuity/continuity), base vertex `w`
        /// (slanting).
        #[arg(long, default_value_t = 1)]
        vertex: Vertex,
        /// Return length of the vertical path (transitive).
        #[arg(long, default_value_t = 1)]
        return_length: usize,
        /// Search horizon in levels.
        #[arg(long, default_value_t = 60)]
        horizon: usize,
        /// Ball radius ε for the discontinuity construction.
        #[arg(long, default_value_t = 0.125)]
        epsilon: f64,
        /// Map direction for continuity probes.
        #[arg(long, value_enum, default_value_t = Direction::Forward)]
        direction: Direction,
        /// Deepest deformation level for continuity probes (probes 3..=M).
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Slant sign for slanting-set membership.
        #[arg(long, default_value = "plus")]
        sign: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Run the invariant suite against a diagram; exit 0 iff all checks pass.
    Verify {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// Levels of measure machinery to exercise.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Render the first levels of a diagram as Graphviz DOT.
    Render {
        #[command(flatten)]
        diagram: DiagramArg,
        #[command(flatten)]
        window: WindowArg,
        /// Number of levels to draw.
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Dot)]
        output: OutputFormat,
    },
    /// Browse the built-in diagram catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List catalog ids with one-line summaries.
    List {
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        output: OutputFormat,
    },
    /// Show one entry (accepts parameters: `show "a1?a=1&b=2"`).
    Show {
        id: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
}

// ---------------------------------------------------------------------------
// Shared resolution helpers
// ---------------------------------------------------------------------------

/// A resolved diagram source: catalog entries keep their oracle; raw
/// descriptors get a stationary diagram over the descriptor matrix.
struct Source {
    entry: Option<CatalogEntry>,
    matrix: Matrix,
    diagram: Diagram,
    config_echo: Value,
}

fn load_source(spec: &str) -> CliResult<Source> {
    let looks_like_file =
        spec.ends_with(".json") || spec.starts_with("./") || spec.starts_with('/');
    if looks_like_file {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Config(format!("cannot read {spec}: {e}")))?;
        let descriptor: MatrixDescriptor = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad matrix descriptor in {spec}: {e}")))?;
        if let MatrixDescriptor::Catalog { name, params } = &descriptor {
            let entry = catalog::get(name, params).map_err(CliError::config)?;
            return Ok(source_from_entry(entry, spec));
        }
        let matrix = Matrix::from_descriptor(&descriptor).map_err(CliError::config)?;
        let diagram = Diagram::stationary(matrix.clone());
        let config_echo = json!({"diagram": spec, "descriptor": descriptor});
        Ok(Source {
            entry: None,
            matrix,
            diagram,
            config_echo,
        })
    } else {
        let entry = catalog::resolve(spec).map_err(CliError::config)?;
        Ok(source_from_entry(entry, spec))
    }
}

fn source_from_entry(entry: CatalogEntry, spec: &str) -> Source {
    let config_echo = json!({
        "diagram": spec,
        "catalog_id": entry.id,
        "params": entry.params,
    });
    Source {
        matrix: entry.matrix.clone(),
        diagram: entry.diagram.clone(),
        entry: Some(entry),
        config_echo,
    }
}

fn load_order(spec: &str, source: &Source) -> CliResult<EdgeOrder> {
    match spec {
        "left-to-right" => Ok(EdgeOrder::left_to_right()),
        "slanted" => {
            // The catalog entry may carry its own (figure) order; prefer it,
            // else fall back to the canonical slanted example's table.
            if let Some(entry) = &source.entry {
                if entry.order.name() != "left-to-right" {
                    return Ok(entry.order.clone());
                }
            }
            Ok(catalog::get("slanted", &BTreeMap::new())
                .map_err(CliError::config)?
                .order)
        }
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| CliError::Config(format!(
                    "unknown order {other:?}: expected left-to-right, slanted, or file:<path>"
                )))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read order table {path}: {e}")))?;
            Ok(EdgeOrder::from_table(OrderTable::from_json(&text)))
        }
    }
}

fn parse_window(arg: &Option<String>, index_set: IndexSet) -> CliResult<Window> {
    match arg {
        None => Ok(default_window(index_set)),
        Some(s) => {
            let (lo, hi) = s
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("window must be lo:hi, got {s:?}")))?;
            let lo: Vertex = lo
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("bad window low end {lo:?}: {e}")))?;
            let hi: Vertex = hi
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("bad window high end {hi:?}: {e}")))?;
            if lo > hi {
                return Err(CliError::Config(format!("empty window {s:?}")));
            }
            Ok(index_set.clamp(Window::new(lo, hi)))
        }
    }
}

fn default_window(index_set: IndexSet) -> Window {
    match index_set {
        IndexSet::Integers => Window::new(-20, 20),
        IndexSet::Naturals => Window::new(1, 40),
    }
}

fn default_anchor(index_set: IndexSet) -> Vertex {
    match index_set {
        IndexSet::Integers => 0,
        IndexSet::Naturals => 1,
    }
}

fn parse_cylinder(json_text: &str, diagram: &Diagram) -> CliResult<FinitePath> {
    let v: Value = serde_json::from_str(json_text)
        .map_err(|e| CliError::Config(format!("bad cylinder JSON: {e}")))?;
    let start_level = v
        .get("start_level")
        .and_then(Value::as_u64)
        .unwrap_or(0) as usize;
    let edges_json = v
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("cylinder JSON needs an \"edges\" array".into()))?;
    let mut edges = Vec::with_capacity(edges_json.len());
    for (i, e) in edges_json.iter().enumerate() {
        let field = |k: &str| -> CliResult<i64> {
            e.get(k)
                .and_then(Value::as_i64)
                .ok_or_else(|| CliError::Config(format!("cylinder edge {i} missing integer {k:?}")))
        };
        edges.push(Edge {
            level: start_level + i,
            source: field("source")?,
            target: field("target")?,
            copy: e.get("copy").and_then(Value::as_u64).unwrap_or(0) as u32,
        });
    }
    let path = FinitePath::new(start_level, edges);
    if !path.validate(diagram) {
        return Err(CliError::Config(
            "cylinder path uses edges the diagram does not have".into(),
        ));
    }
    Ok(path)
}

/// The matrix spectral routines can iterate: the published orientation when
/// its columns are finite on the window, otherwise the diagram's (transposed)
/// level matrix, whose columns are finite by construction. Returns the matrix
/// and whether it is the transpose (then ξ and η trade places).
fn analysis_matrix(source: &Source, window: Window) -> (Matrix, bool) {
    if source.matrix.columns_finite_on(window) {
        (source.matrix.clone(), false)
    } else {
        (source.diagram.level_matrix(0), true)
    }
}

/// An eigenpair for the diagram: the catalog closed form when available,
/// otherwise a windowed numeric pair (estimate λ, then inverse iteration).
/// Oriented to match `analysis_matrix` (ξ and η swapped for a transpose).
fn obtain_eigen_pair(source: &Source, window: Window, anchor: Vertex) -> CliResult<EigenPair> {
    let (_, transposed) = analysis_matrix(source, window);
    if let Some(pair) = source.entry.as_ref().and_then(|e| e.eigen_pair()) {
        if transposed {
            return Ok(EigenPair {
                lambda: pair.lambda,
                lambda_exact: pair.lambda_exact,
                xi: pair.eta,
                eta: pair.xi,
                provenance: pair.provenance,
            });
        }
        return Ok(pair);
    }
    let (matrix, _) = analysis_matrix(source, window);
    let est = perron_estimate(&matrix, anchor, 60, window, 1e12).map_err(CliError::compute)?;
    let (xi, residual) =
        right_eigenvector(&matrix, est.lambda, window, anchor, 3).map_err(CliError::compute)?;
    let (eta, _) = bratteli::spectral::left_eigenvector(&matrix, est.lambda, window, anchor, 3)
        .map_err(CliError::compute)?;
    Ok(EigenPair {
        lambda: est.lambda,
        lambda_exact: None,
        xi: EigenVector::from_numeric(xi),
        eta: EigenVector::from_numeric(eta),
        provenance: Provenance::Windowed {
            lo: window.lo,
            hi: window.hi,
            residual,
        },
    })
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

fn emit(report: Value, output: OutputFormat) {
    let text = match output {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).unwrap();
            s.push('\n');
            s
        }
        OutputFormat::Table => {
            let mut s = String::new();
            table_string(&report, 0, &mut s);
            s
        }
        OutputFormat::Dot => {
            // DOT payloads carry the graph under report.dot; anything else
            // degrades to the table renderer.
            if let Some(dot) = report.pointer("/report/dot").and_then(Value::as_str) {
                dot.to_string()
            } else {
                let mut s = String::new();
                table_string(&report, 0, &mut s);
                s
            }
        }
    };
    // A closed pipe (e.g. piping into `head`) is not an error worth dying on.
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn table_string(v: &Value, indent: usize, out: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        table_string(val, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {val}");
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}-");
                        table_string(item, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}- {item}");
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{other}");
        }
    }
}

fn window_json(w: Window) -> Value {
    json!({"lo": w.lo, "hi": w.hi})
}

fn path_json(p: &FinitePath) -> Value {
    serde_json::to_value(p).unwrap()
}

fn vec_on_window(f: impl Fn(Vertex) -> f64, w: Window) -> Value {
    let m: BTreeMap<String, f64> = w.iter().map(|v| (v.to_string(), f(v))).collect();
    json!(m)
}

// ---------------------------------------------------------------------------
// Subcommand handlers
// ---------------------------------------------------------------------------

fn cmd_analyze(
    diagram: DiagramArg,
    window: Option<String>,
    anchor: Option<Vertex>,
    horizon: u32,
    exact: bool,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let anchor = anchor.unwrap_or_else(|| default_anchor(source.matrix.index_set()));
    let (iter_matrix, transposed) = analysis_matrix(&source, w);
    let est = perron_estimate(&iter_matrix, anchor, horizon, w, 1e15);

    let mut report = serde_json::Map::new();
    report.insert("anchor".into(), json!(anchor));
    report.insert("window".into(), window_json(w));

    let mut lambda_for_class;
    match &est {
        Ok(e) => {
            lambda_for_class = Some(e.lambda);
            report.insert(
                "perron".into(),
                json!({
                    "lambda_estimate": e.lambda,
                    "period": e.period,
                    "root_sequence_tail": e.sequence.iter().rev().take(3).rev().collect::<Vec<_>>(),
                    "ratio_sequence_tail": e.ratio_sequence.iter().rev().take(3).rev().collect::<Vec<_>>(),
                }),
            );
        }
        Err(e) => {
            // Unbounded column sums: fall back to the truncated spectral
            // radius, which is still a certified lower bound.
            let tsr = truncated_spectral_radius(&iter_matrix, w, 200);
            report.insert(
                "perron".into(),
                json!({
                    "error": e.to_string(),
                    "truncated_spectral_radius_lower_bound": tsr,
                }),
            );
            lambda_for_class = Some(tsr);
        }
    }

    if source.matrix.columns_finite_on(w) {
        let bounds = column_sum_bounds(&source.matrix, w);
        report.insert("column_sum_bounds".into(), serde_json::to_value(&bounds).unwrap());
    }

    let oracle = source.entry.as_ref().map(|e| &e.oracle);
    if let Some(o) = oracle {
        if let Some(l) = o.lambda_f64() {
            lambda_for_class = Some(l);
            report.insert("lambda_closed_form".into(), json!(l));
        }
        if exact {
            let mut exact_obj = serde_json::Map::new();
            if let Some(l) = &o.lambda {
                exact_obj.insert("lambda".into(), json!(l.to_string()));
            }
            if let (Some(l), Some(xi)) = (&o.lambda, &o.xi) {
                let xi = xi.clone();
                let res = verify_right_exact(&source.matrix, l, &*xi, w);
                exact_obj.insert(
                    "right_residual_zero_on_bounded_rows".into(),
                    json!(res.all_zero),
                );
                exact_obj.insert("rows_checked".into(), json!(res.rows_checked));
            }
            if let (Some(l), Some(eta)) = (&o.lambda, &o.eta) {
                let eta = eta.clone();
                let res = verify_left_exact(&source.matrix, l, &*eta, w);
                exact_obj.insert("left_residual_zero".into(), json!(res.all_zero));
            }
            match &o.xi_sum {
                Some(XiSum::Finite(s)) => {
                    exact_obj.insert("xi_sum".into(), json!(s.to_string()));
                }
                Some(XiSum::Divergent) => {
                    exact_obj.insert("xi_sum".into(), json!("divergent"));
                }
                None => {}
            }
            report.insert("exact".into(), Value::Object(exact_obj));
        }
    }

    if let Some(lambda) = lambda_for_class {
        // The eigenpair must match the iterated matrix's orientation.
        let pair = obtain_eigen_pair(&source, w, anchor).ok();
        let _ = transposed;
        let mut class = classify_recurrence(
            &iter_matrix,
            lambda,
            anchor,
            horizon.max(200),
            w.padded(40, source.matrix.index_set()),
            pair.as_ref(),
            1e-9,
        );
        if let Some(variant) = source.entry.as_ref().and_then(|e| e.oracle.recurrence) {
            class = class.with_analytic(variant, "catalog closed form");
        }
        report.insert(
            "recurrence".into(),
            json!({
                "variant": format!("{:?}", class.variant),
                "certificate": class.certificate,
                "analytic_override": class.analytic_override,
                "partial_sum_final": class.partial_sums.last(),
            }),
        );
    }

    let mut config = source.config_echo.clone();
    merge(&mut config, json!({
        "command": "analyze", "anchor": anchor, "horizon": horizon,
        "exact": exact, "window": window_json(w),
    }));
    emit(envelope(config, Value::Object(report)), output);
    Ok(())
}

fn cmd_measure(
    diagram: DiagramArg,
    window: Option<String>,
    mode: MeasureMode,
    depth: usize,
    cylinder: Option<String>,
    probes: Option<String>,
    exact: bool,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let anchor = default_anchor(source.matrix.index_set());

    let mut report = serde_json::Map::new();
    report.insert("mode".into(), json!(match mode {
        MeasureMode::Eigen => "eigen",
        MeasureMode::InverseLimit => "inverse-limit",
    }));
    report.insert("window".into(), window_json(w));

    let vectors = match mode {
        MeasureMode::Eigen => {
            let pair = obtain_eigen_pair(&source, w, anchor)?;
            report.insert("lambda".into(), json!(pair.lambda));
            stationary_measure_vectors(&pair, depth, w)
        }
        MeasureMode::InverseLimit => {
            let schedule = match &probes {
                Some(text) => {
                    let parsed: Result<Vec<usize>, _> =
                        text.split(',').map(|s| s.trim().parse()).collect();
                    let s = parsed
                        .map_err(|e| CliError::Config(format!("bad --probes {text:?}: {e}")))?;
                    if s.len() < 2 || s.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(CliError::Config(
                            "--probes needs at least two strictly increasing depths".into(),
                        ));
                    }
                    s
                }
                None => {
                    let base = (3 * depth).max(24);
                    vec![base, base + base / 2, 2 * base]
                }
            };
            let config = InverseLimitConfig::new(w, schedule.clone(), 1e-8);
            report.insert("depth_schedule".into(), json!(schedule));
            match invariant_vectors(&source.diagram, depth, &config) {
                Ok(v) => v,
                Err(e @ MeasureError::ConeCollapse { .. }) => {
                    report.insert("no_measure".into(), json!(e.to_string()));
                    let mut config = source.config_echo.clone();
                    merge(&mut config, json!({
                        "command": "measure", "mode": "inverse-limit", "depth": depth,
                        "window": window_json(w),
                    }));
                    emit(envelope(config, Value::Object(report)), output);
                    return Err(CliError::compute(e));
                }
                Err(e) => return Err(CliError::compute(e)),
            }
        }
    };

    let mut levels = Vec::new();
    for n in 0..=vectors.depth().min(depth) {
        levels.push(vec_on_window(|v| vectors.value(n, v), w));
    }
    report.insert("measure_vectors".into(), json!(levels));

    let heights = HeightCache::new(&source.diagram);
    let towers: Vec<f64> = (0..=depth.min(vectors.depth()))
        .map(|n| tower_total(&vectors, &heights, n))
        .collect();
    report.insert("tower_totals".into(), json!(towers));

    if let Some(cyl_text) = &cylinder {
        let path = parse_cylinder(cyl_text, &source.diagram)?;
        let mut cyl_obj = serde_json::Map::new();
        cyl_obj.insert("path".into(), path_json(&path));
        let oracle = source.entry.as_ref().map(|e| &e.oracle);
        if let (Some(o), true) = (oracle, path.start_level == 0) {
            if let (Some(l), Some(xi)) = (&o.lambda, &o.xi) {
                let xi = xi.clone();
                let value = stationary_cylinder_measure(l, &*xi, &path);
                if exact {
                    cyl_obj.insert("value_exact".into(), json!(value.to_string()));
                }
                cyl_obj.insert("value".into(), json!(value.to_f64()));
            }
        }
        if !cyl_obj.contains_key("value") {
            if exact {
                return Err(CliError::Compute(
                    "exact cylinder values need closed-form eigendata (catalog diagrams)".into(),
                ));
            }
            // Numeric fallback: measure of the cylinder = p^{(n)}_v where
            // v is the path's range (one path contributes measure
            // p-of-end-vertex split among the paths into it... for the
            // eigenvector measure every cylinder of the same length into v
            // has equal mass p^{(n)}_v).
            let v = path
                .range_vertex()
                .ok_or_else(|| CliError::Config("empty cylinder".into()))?;
            let n = path.end_level();
            if n <= vectors.depth() {
                cyl_obj.insert("value".into(), json!(vectors.value(n, v)));
            }
        }
        report.insert("cylinder".into(), Value::Object(cyl_obj));
    }

    let mut config = source.config_echo.clone();
    merge(&mut config, json!({
        "command": "measure",
        "mode": match mode { MeasureMode::Eigen => "eigen", MeasureMode::InverseLimit => "inverse-limit" },
        "depth": depth, "exact": exact, "window": window_json(w),
        "cylinder": cylinder,
    }));
    emit(envelope(config, Value::Object(report)), output);
    Ok(())
}

fn cmd_vershik(
    diagram: DiagramArg,
    order_arg: OrderArg,
    vertex: Vertex,
    depth: usize,
    steps: usize,
    inverse: bool,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let order = load_order(&order_arg.order, &source)?;
    if !source.matrix.index_set().contains(vertex) {
        return Err(CliError::Config(format!("vertex {vertex} is outside the index set")));
    }

    // Seed: the minimal (forward) / maximal (inverse) finite path into the
    // chosen vertex, continued vertically when the diagram allows it.
    let seed_path = if inverse {
        order.maximal_path_into(&source.diagram, vertex, depth)
    } else {
        order.minimal_path_into(&source.diagram, vertex, depth)
    };
    let tail = TailRule::Vertical(vertex);
    let has_loop = source.diagram.level_matrix(depth).entry(vertex, vertex) > 0;
    if !has_loop {
        return Err(CliError::Compute(format!(
            "vertex {vertex} has no loop at level {depth}; choose a vertex with a vertical path"
        )));
    }
    let mut current = OrderedPath::new(seed_path, tail);

    let mut trajectory = Vec::new();
    trajectory.push(path_json(&FinitePath::new(0, current.materialize(depth))));
    let mut extreme_at = None;
    for step in 0..steps {
        let result = if inverse {
            vershik_inverse_step(&source.diagram, &order, &current, depth)
        } else {
            vershik_step(&source.diagram, &order, &current, depth)
        };
        match result {
            StepResult::Image(next) => {
                trajectory.push(path_json(&FinitePath::new(0, next.materialize(depth))));
                current = next;
            }
            StepResult::ExtremeThroughDepth(d) => {
                extreme_at = Some(json!({"step": step, "extreme_through_depth": d}));
                break;
            }
        }
    }

    let report = json!({
        "order": order.name(),
        "direction": if inverse { "inverse" } else { "forward" },
        "depth": depth,
        "trajectory": trajectory,
        "stopped_extreme": extreme_at,
    });
    let mut config = source.config_echo.clone();
    merge(&mut config, json!({
        "command": "vershik", "order": order_arg.order, "vertex": vertex,
        "depth": depth, "steps": steps, "inverse": inverse,
    }));
    emit(envelope(config, report), output);
    Ok(())
}

fn cmd_heights(
    diagram: DiagramArg,
    window: Option<String>,
    level: usize,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let heights = HeightCache::new(&source.diagram);
    let values: BTreeMap<String, String> = w
        .iter()
        .map(|v| (v.to_string(), heights.height(level, v).to_string()))
        .collect();
    let report = json!({"level": level, "window": window_json(w), "heights": values});
    let mut config = source.config_echo.clone();
    merge(&mut config, json!({"command": "heights", "level": level, "window": window_json(w)}));
    emit(envelope(config, report), output);
    Ok(())
}

fn cmd_walk(
    diagram: DiagramArg,
    window: Option<String>,
    seed: u64,
    steps: usize,
    start: Option<Vertex>,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let anchor = default_anchor(source.matrix.index_set());
    let start = start.unwrap_or(anchor);
    let pair = obtain_eigen_pair(&source, w, anchor)?;
    let (matrix, _) = analysis_matrix(&source, w);
    let scan = w.padded(10, source.matrix.index_set());
    let chain = stochastic_from_eigenpair(&matrix, &pair, w, scan).map_err(CliError::compute)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start;
    let mut visits: BTreeMap<Vertex, u64> = BTreeMap::new();
    let mut returns = 0u64;
    let mut leaks = 0u64;
    for _ in 0..steps {
        let row = chain.row_distribution(cur, scan);
        let total: f64 = row.iter().map(|(_, p)| p).sum();
        if total <= 0.0 {
            leaks += 1;
            break;
        }
        // Draw within the scanned mass; renormalizing keeps the walk inside
        // the scan window (the leaked tail is reported separately).
        let mut u: f64 = rng.gen::<f64>() * total;
        let mut next = row.last().map(|(v, _)| *v).unwrap_or(cur);
        for (v, p) in &row {
            if u < *p {
                next = *v;
                break;
            }
            u -= *p;
        }
        cur = next;
        *visits.entry(cur).or_default() += 1;
        if cur == start {
            returns += 1;
        }
    }

    let visit_freq: BTreeMap<String, f64> = visits
        .iter()
        .map(|(v, c)| (v.to_string(), *c as f64 / steps as f64))
        .collect();
    let report = json!({
        "lambda": pair.lambda,
        "start": start,
        "steps": steps,
        "final_vertex": cur,
        "returns_to_start": returns,
        "empirical_return_frequency": returns as f64 / steps as f64,
        "visit_frequencies": visit_freq,
        "killed_by_leak": leaks > 0,
    });
    let mut config = source.config_echo.clone();
    merge(&mut config, json!({
        "command": "walk", "seed": seed, "steps": steps, "start": start,
        "window": window_json(w),
    }));
    emit(envelope(config, report), output);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    diagram: DiagramArg,
    order_arg: OrderArg,
    window: Option<String>,
    kind: WitnessKind,
    cylinder: Option<String>,
    vertex: Vertex,
    return_length: usize,
    horizon: usize,
    epsilon: f64,
    direction: Direction,
    levels: usize,
    sign: String,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let order = load_order(&order_arg.order, &source)?;
    let w = parse_window(&window, source.matrix.index_set())?;

    let (report, ok) = match kind {
        WitnessKind::Transitive => {
            let cyl_text = cylinder
                .as_ref()
                .ok_or_else(|| CliError::Config("transitive witness needs --cylinder".into()))?;
            let path = parse_cylinder(cyl_text, &source.diagram)?;
            match transitive_witness(&source.diagram, &path, vertex, return_length, horizon) {
                Ok(witness) => (
                    json!({
                        "kind": "transitive",
                        "cylinder": path_json(&path),
                        "vertical_vertex": vertex,
                        "return_length": return_length,
                        "witness": path_json(&witness),
                        "lands_at_level": witness.end_level(),
                    }),
                    true,
                ),
                Err(e) => (json!({"kind": "transitive", "error": e.to_string()}), false),
            }
        }
        WitnessKind::Discontinuity => {
            let band = source
                .diagram
                .band()
                .ok_or_else(|| CliError::Compute("discontinuity witness needs band data".into()))?
                .clone();
            let x_max = banded_extreme_path(&source.diagram, &order, &band, vertex, Side::Max);
            let outcome = discontinuity_witness(&source.diagram, &order, &x_max, epsilon, horizon);
            let ok = matches!(outcome, DiscontinuityOutcome::Witness { .. });
            (
                json!({"kind": "discontinuity", "epsilon": epsilon, "outcome": outcome}),
                ok,
            )
        }
        WitnessKind::Continuity => {
            let band = source
                .diagram
                .band()
                .ok_or_else(|| CliError::Compute("continuity probe needs band data".into()))?
                .clone();
            let (side, dir) = match direction {
                Direction::Forward => (Side::Max, ProbeDirection::Forward),
                Direction::Inverse => (Side::Min, ProbeDirection::Inverse),
            };
            let extreme = banded_extreme_path(&source.diagram, &order, &band, vertex, side);
            let paired = banded_extreme_path(
                &source.diagram,
                &order,
                &band,
                vertex,
                match side {
                    Side::Max => Side::Min,
                    Side::Min => Side::Max,
                },
            );
            let ms: Vec<usize> = (3..=levels.max(3)).collect();
            let diagram2 = source.diagram.clone();
            let order2 = order.clone();
            let band2 = band.clone();
            let extreme2 = extreme.clone();
            let deviate = move |m: usize| -> OrderedPath {
                // Copy the extreme path through level m−1, then continue with
                // the opposite-extreme marching rule from the level-m vertex.
                let edges = extreme2.materialize(m);
                let cur = edges.last().map(|e| e.target).unwrap_or(vertex);
                let d = diagram2.clone();
                let o = order2.clone();
                let b = band2.clone();
                let opposite = match side {
                    Side::Max => Side::Min,
                    Side::Min => Side::Max,
                };
                let rule = move |level: usize, cur: Vertex| -> Edge {
                    let t = b.t(level);
                    let target = match opposite {
                        Side::Max => cur - t,
                        Side::Min => cur + t,
                    };
                    match opposite {
                        Side::Max => o.maximal_edge_into(&d, level, target),
                        Side::Min => o.minimal_edge_into(&d, level, target),
                    }
                };
                let first = rule(m, cur);
                let mut all = edges;
                all.push(first);
                OrderedPath::new(FinitePath::new(0, all), TailRule::Rule(Arc::new(rule)))
            };
            let table = continuity_probe(
                &source.diagram,
                &order,
                &extreme,
                &paired,
                &ms,
                deviate,
                dir,
                6,
            );
            let ok = table.modulus_holds;
            (json!({"kind": "continuity", "table": table}), ok)
        }
        WitnessKind::Slanting => {
            let cyl_text = cylinder
                .as_ref()
                .ok_or_else(|| CliError::Config("slanting membership needs --cylinder".into()))?;
            let path = parse_cylinder(cyl_text, &source.diagram)?;
            let slant = match sign.as_str() {
                "plus" => Slant::Plus,
                "minus" => Slant::Minus,
                other => {
                    return Err(CliError::Config(format!(
                        "sign must be plus or minus, got {other:?}"
                    )))
                }
            };
            let verdict = slanting_membership(&source.diagram, &path, vertex, slant);
            let ok = matches!(
                verdict,
                bratteli::diagram::SlantingVerdict::ConsistentThroughDepth(_)
            );
            (
                json!({"kind": "slanting", "w": vertex, "sign": sign, "verdict": verdict}),
                ok,
            )
        }
        WitnessKind::Extreme => {
            let rep = extreme_paths(&source.diagram, &order, w, horizon.min(40));
            (json!({"kind": "extreme", "report": rep}), true)
        }
    };

    let mut config = source.config_echo.clone();
    merge(&mut config, json!({
        "command": "witness", "kind": match kind {
            WitnessKind::Transitive => "transitive",
            WitnessKind::Discontinuity => "discontinuity",
            WitnessKind::Continuity => "continuity",
            WitnessKind::Slanting => "slanting",
            WitnessKind::Extreme => "extreme",
        },
        "order": order_arg.order, "vertex": vertex, "horizon": horizon,
    }));
    emit(envelope(config, report), output);
    if ok {
        Ok(())
    } else {
        Err(CliError::Compute("witness construction failed (see report)".into()))
    }
}

fn cmd_verify(
    diagram: DiagramArg,
    window: Option<String>,
    depth: usize,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let anchor = default_anchor(source.matrix.index_set());

    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(json!({"check": name, "pass": pass, "detail": detail}));
    };

    // 1. Exact eigen residuals, when the diagram carries closed forms.
    if let Some(entry) = &source.entry {
        if let (Some(l), Some(xi)) = (&entry.oracle.lambda, &entry.oracle.xi) {
            let xi = xi.clone();
            let res = verify_right_exact(&source.matrix, l, &*xi, w);
            push(
                "right_eigenvector_exact",
                res.all_zero,
                format!("{} bounded rows, residual exactly zero: {}", res.rows_checked, res.all_zero),
            );
        }
        if let (Some(l), Some(eta)) = (&entry.oracle.lambda, &entry.oracle.eta) {
            let eta = eta.clone();
            let res = verify_left_exact(&source.matrix, l, &*eta, w);
            push(
                "left_eigenvector_exact",
                res.all_zero,
                format!("{} columns, residual exactly zero: {}", res.rows_checked, res.all_zero),
            );
        }
    }

    // 2. Eigen measure machinery (needs some eigenpair; numeric fallback).
    match obtain_eigen_pair(&source, w, anchor) {
        Ok(pair) => {
            let vectors = stationary_measure_vectors(&pair, depth, w);
            let defect = vectors.consistency_defect(&source.diagram, w);
            push(
                "measure_consistency",
                defect < 1e-6,
                format!("max |p⁽ⁿ⁾ − Aₙp⁽ⁿ⁺¹⁾| on interior = {defect:.3e}"),
            );

            let heights = HeightCache::new(&source.diagram);
            {
                let seq = normalized_sequences(&vectors, &heights);
                {
                    let lambdas_ok = seq.lambdas.iter().all(|l| *l > 1.0);
                    push(
                        "norming_sequence_exceeds_one",
                        lambdas_ok,
                        format!("λₙ = {:?}", seq.lambdas),
                    );
                    let pairing_err = seq
                        .pairings
                        .iter()
                        .map(|p| (p - 1.0).abs())
                        .fold(0.0f64, f64::max);
                    push(
                        "pairing_normalization",
                        pairing_err < 1e-8,
                        format!("max |⟨μ̂,Ĥ⟩ − 1| = {pairing_err:.3e}"),
                    );
                    let rt = seq.round_trip_error(&vectors);
                    push(
                        "reconstruction_round_trip",
                        rt < 1e-10,
                        format!("max reconstruction error = {rt:.3e}"),
                    );
                }
            }

            let stoch = stochastic_sequence(&source.diagram, &vectors, &heights, StochKind::G);
            let worst = stoch
                .iter()
                .map(|s| s.max_row_defect())
                .fold(0.0f64, f64::max);
            push(
                "path_transition_rows_stochastic",
                worst < 1e-8,
                format!("max row defect = {worst:.3e}"),
            );
        }
        Err(CliError::Compute(msg)) | Err(CliError::Config(msg)) => {
            push("eigen_pair", false, msg);
        }
    }

    let all_pass = checks
        .iter()
        .all(|c| c["pass"].as_bool().unwrap_or(false));
    let report = json!({
        "window": window_json(w),
        "checks": checks,
        "all_pass": all_pass,
    });
    let mut config = source.config_echo.clone();
    merge(&mut config, json!({"command": "verify", "depth": depth, "window": window_json(w)}));
    emit(envelope(config, report), output);
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Compute("verification failed (see report)".into()))
    }
}

fn cmd_render(
    diagram: DiagramArg,
    window: Option<String>,
    levels: usize,
    output: OutputFormat,
) -> CliResult<()> {
    let source = load_source(&diagram.diagram)?;
    let w = parse_window(&window, source.matrix.index_set())?;
    let dot = render_dot(&source.diagram, levels, w);
    match output {
        OutputFormat::Dot => {
            use std::io::Write;
            let _ = std::io::stdout().write_all(dot.as_bytes());
        }
        _ => {
            let mut config = source.config_echo.clone();
            merge(&mut config, json!({"command": "render", "levels": levels, "window": window_json(w)}));
            emit(envelope(config, json!({"dot": dot})), output);
        }
    }
    Ok(())
}

fn cmd_catalog(action: CatalogAction) -> CliResult<()> {
    match action {
        CatalogAction::List { output } => {
            let entries: Vec<Value> = catalog::list()
                .into_iter()
                .map(|(id, summary)| json!({"id": id, "summary": summary}))
                .collect();
            match output {
                OutputFormat::Table => {
                    use std::io::Write;
                    let mut text = String::new();
                    for e in &entries {
                        use std::fmt::Write as _;
                        let _ = writeln!(
                            text,
                            "{:<24} {}",
                            e["id"].as_str().unwrap(),
                            e["summary"].as_str().unwrap()
                        );
                    }
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
                _ => emit(
                    envelope(json!({"command": "catalog list"}), json!({"entries": entries})),
                    output,
                ),
            }
            Ok(())
        }
        CatalogAction::Show { id, output } => {
            let entry = catalog::resolve(&id).map_err(CliError::config)?;
            let oracle = &entry.oracle;
            let report = json!({
                "id": entry.id,
                "title": entry.title,
                "params": entry.params,
                "properties": entry.properties,
                "index_set": entry.matrix.index_set(),
                "lambda": oracle.lambda_f64(),
                "lambda_exact": oracle.lambda.as_ref().map(|l| l.to_string()),
                "recurrence": oracle.recurrence.map(|r| format!("{r:?}")),
                "xi_sum": match &oracle.xi_sum {
                    Some(XiSum::Finite(s)) => json!(s.to_string()),
                    Some(XiSum::Divergent) => json!("divergent"),
                    None => Value::Null,
                },
                "descriptor": entry.matrix.descriptor(),
            });
            emit(envelope(json!({"command": "catalog show", "id": id}), report), output);
            Ok(())
        }
    }
}

/// Shallow-merge `extra`'s keys into `config` (both must be objects).
fn merge(config: &mut Value, extra: Value) {
    if let (Value::Object(base), Value::Object(more)) = (config, extra) {
        for (k, v) in more {
            base.insert(k, v);
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze { diagram, window, anchor, horizon, exact, output } => {
            cmd_analyze(diagram, window.window, anchor, horizon, exact, output)
        }
        Command::Measure { diagram, window, mode, depth, cylinder, probes, exact, output } => {
            cmd_measure(diagram, window.window, mode, depth, cylinder, probes, exact, output)
        }
        Command::Vershik { diagram, order, vertex, depth, steps, inverse, output } => {
            cmd_vershik(diagram, order, vertex, depth, steps, inverse, output)
        }
        Command::Heights { diagram, window, level, output } => {
            cmd_heights(diagram, window.window, level, output)
        }
        Command::Walk { diagram, window, seed, steps, start, output } => {
            cmd_walk(diagram, window.window, seed, steps, start, output)
        }
        Command::Witness {
            diagram, order, window, kind, cylinder, vertex, return_length,
            horizon, epsilon, direction, levels, sign, output,
        } => cmd_witness(
            diagram, order, window.window, kind, cylinder, vertex, return_length,
            horizon, epsilon, direction, levels, sign, output,
        ),
        Command::Verify { diagram, window, depth, output } => {
            cmd_verify(diagram, window.window, depth, output)
        }
        Command::Render { diagram, window, levels, output } => {
            cmd_render(diagram, window.window, levels, output)
        }
        Command::Catalog { action } => cmd_catalog(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
