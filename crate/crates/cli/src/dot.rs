use std::fmt::Write;

use gsd_core::lp::TAU_SIGN;
use gsd_core::stats::FrontResult;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Strict ε-dominance among subjects, as used for front exclusion.
fn strict(margins: &[Vec<f64>], epsilon: f64, i: usize, j: usize) -> bool {
    i != j && margins[i][j] >= epsilon - TAU_SIGN && margins[j][i] < -epsilon - TAU_SIGN
}

/// Hasse digraph of the empirical strict dominance: an edge `a -> b` means
/// `a` dominates `b` with no subject in between. Front members are drawn bold.
pub fn front_dot(result: &FrontResult, graph_name: &str) -> String {
    let n = result.subjects.len();
    let m = &result.margins;
    let eps = result.epsilon;
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(graph_name)).unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    for s in &result.subjects {
        let style = if result.gsd_front.contains(s) { " [style=bold, peripheries=2]" } else { "" };
        writeln!(out, "  {}{};", quote(s), style).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if strict(m, eps, i, j) && !(0..n).any(|k| strict(m, eps, i, k) && strict(m, eps, k, j)) {
                writeln!(out, "  {} -> {};", quote(&result.subjects[i]), quote(&result.subjects[j])).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
