//! Report plumbing: deterministic JSON serialization helpers shared by the
//! library types and the CLI.

use num_bigint::BigUint;
use serde::ser::Serializer;
use serde_json::{json, Map, Value};

use crate::diagram::Diagram;
use crate::matrix::Window;

/// Serialize a big integer as a decimal string (JSON numbers cannot hold
/// arbitrary precision).
pub fn ser_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Serialize an optional big integer as a decimal string.
pub fn ser_biguint_opt<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Wrap a report payload in the standard envelope: the library version, the
/// echoed configuration that produced it, and the payload itself. Key order
/// is fixed, so serializing the envelope is byte-deterministic for a fixed
/// config (including any seed recorded inside it).
pub fn envelope(config: Value, payload: Value) -> Value {
    let mut map = Map::new();
    map.insert("library".into(), json!("bratteli"));
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("config".into(), config);
    map.insert("report".into(), payload);
    Value::Object(map)
}

/// Render the first `levels` levels of a diagram, restricted to `window` on
/// every level, as a Graphviz DOT digraph. Vertices are grouped into one
/// rank per level; parallel edges are collapsed into a single arrow labelled
/// with the multiplicity when it exceeds one. Edges whose source lies
/// outside the window are drawn from a small boundary stub so the picture
/// never silently drops incoming multiplicity.
pub fn render_dot(diagram: &Diagram, levels: usize, window: Window) -> String {
    let window = diagram.index_set().clamp(window);
    let mut out = String::new();
    out.push_str("digraph bratteli {\n");
    out.push_str("  rankdir=TB;\n  node [shape=circle, fontsize=10];\n");
    for n in 0..=levels {
        out.push_str(&format!("  {{ rank=same;"));
        for v in window.iter() {
            out.push_str(&format!(" \"L{n}_{v}\" [label=\"{v}\"];"));
        }
        out.push_str(" }\n");
    }
    for n in 0..levels {
        let mut stubs = 0usize;
        for v in window.iter() {
            for (w, m) in diagram.incoming(n, v) {
                let src = if window.contains(w) {
                    format!("\"L{n}_{w}\"")
                } else {
                    stubs += 1;
                    let stub = format!("\"L{n}_ext{stubs}\"");
                    out.push_str(&format!(
                        "  {stub} [label=\"{w}\", shape=plaintext, fontcolor=gray];\n"
                    ));
                    stub
                };
                let next = n + 1;
                if m > 1 {
                    out.push_str(&format!("  {src} -> \"L{next}_{v}\" [label=\"{m}\"];\n"));
                } else {
                    out.push_str(&format!("  {src} -> \"L{next}_{v}\";\n"));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::collections::BTreeMap;

    #[test]
    fn dot_render_is_well_formed_and_deterministic() {
        let entry = catalog::get("a5", &BTreeMap::new()).unwrap();
        let a = render_dot(&entry.diagram, 3, Window::new(1, 5));
        let b = render_dot(&entry.diagram, 3, Window::new(1, 5));
        assert_eq!(a, b);
        assert!(a.starts_with("digraph bratteli {"));
        assert!(a.trim_end().ends_with('}'));
        // Every level-n+1 vertex in the window has its full incoming list.
        assert!(a.contains("-> \"L1_1\""));
        assert!(a.contains("-> \"L3_4\""));
    }

    #[test]
    fn envelope_embeds_version_and_config() {
        let e = envelope(serde_json::json!({"seed": 7}), serde_json::json!({"x": 1}));
        assert_eq!(e["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(e["config"]["seed"], 7);
        assert_eq!(e["report"]["x"], 1);
    }
}
