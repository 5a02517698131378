use std::fmt::Write;

use super::FoliationMovie;

/// Graphviz rendering of the tiling: vertices, saddles, and the prongs
/// joining each saddle to its corners. bc saddles are drawn dashed.
pub fn export_dot(movie: &FoliationMovie) -> String {
    let mut out = String::from("graph foliation {\n");
    for v in &movie.vertices {
        let _ = writeln!(out, "  v{} [label=\"{}{}\"];", v.id, v.id, v.parity.symbol());
    }
    for (t, tr) in movie.transitions.iter().enumerate() {
        let style = if tr.is_bc() { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  s{t} [shape=box, label=\"s{t}{}\"{style}];", tr.parity.symbol());
        for c in tr.corners() {
            let _ = writeln!(out, "  s{t} -- v{c};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::grid_fixture;

    #[test]
    fn lists_every_prong() {
        let g = grid_fixture(4).unwrap();
        let dot = export_dot(&g);
        assert_eq!(dot.matches(" -- ").count(), 32);
        assert!(dot.starts_with("graph foliation {"));
    }
}
