//! Graphviz export.

use std::fmt::Write;

use crate::graph::Graph;
use crate::hyperplanes::Hyperplanes;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text for `g`; with `coloring`, all edges of one hyperplane get the
/// same HSV colour. Vertices are listed in lexicographic order and edges in
/// lexicographic order of their endpoints.
pub fn export_dot(g: &Graph, coloring: Option<&Hyperplanes>) -> String {
    let mut out = String::from("graph G {\n");
    for name in g.names() {
        let _ = writeln!(out, "  {};", quote(name));
    }
    for &(u, v) in g.edges() {
        let _ = write!(out, "  {} -- {}", quote(g.name(u)), quote(g.name(v)));
        if let Some(hs) = coloring {
            let class = hs.class_of(g, u, v).expect("edge has a hyperplane");
            let hue = class as f64 / hs.len().max(1) as f64;
            let _ = write!(out, " [color=\"{hue:.3} 0.850 0.850\"]");
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}
