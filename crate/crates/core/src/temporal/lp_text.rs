//! CPLEX LP text rendering of a temporal system, for checking with an
//! external solver.

use std::fmt::Write;

use super::TemporalProblem;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpModel {
    /// Maximize the delay on one arc.
    MaxDelay(usize),
    /// One delay variable per arc, weight 1 on the given arc and 0 elsewhere.
    WeightedDelays(usize),
    /// Constraints only.
    Feasibility,
}

pub(super) fn render<S: Scalar>(p: &TemporalProblem<S>, model: &LpModel) -> String {
    let mut out = String::new();
    let with_delay = |a: usize| match model {
        LpModel::MaxDelay(k) => a == *k,
        LpModel::WeightedDelays(_) => true,
        LpModel::Feasibility => false,
    };
    match model {
        LpModel::MaxDelay(a) | LpModel::WeightedDelays(a) => {
            let _ = writeln!(out, "\\ {}", p.nodes().len());
            out.push_str("Maximize\n obj:");
            match model {
                LpModel::WeightedDelays(_) => {
                    for k in 0..p.arcs().len() {
                        let w = if k == *a { 1 } else { 0 };
                        let _ = write!(out, " + {w} d{k}");
                    }
                }
                _ => {
                    let _ = write!(out, " d{a}");
                }
            }
            out.push('\n');
        }
        LpModel::Feasibility => {
            out.push_str("Minimize\n obj: 0 t0\n");
        }
    }
    out.push_str("Subject To\n");
    for (k, arc) in p.arcs().iter().enumerate() {
        let d = if with_delay(k) { format!(" - d{k}") } else { String::new() };
        let _ = writeln!(
            out,
            " arc{k}: t{} - t{}{d} >= {}",
            arc.head,
            arc.tail,
            arc.min_gap.as_f64()
        );
    }
    for (k, s) in p.syncs().iter().enumerate() {
        let _ = writeln!(out, " syncu{k}: t{} - t{} <= {}", s.special, s.copy, s.beta.as_f64());
        let _ = writeln!(out, " syncl{k}: t{} - t{} >= {}", s.special, s.copy, -s.alpha.as_f64());
    }
    out.push_str("Bounds\n");
    for (k, n) in p.nodes().iter().enumerate() {
        match n.window {
            Some((l, u)) => {
                let _ = writeln!(out, " {} <= t{k} <= {}", l.as_f64().max(0.0), u.as_f64());
            }
            None => {
                let _ = writeln!(out, " t{k} >= 0");
            }
        }
    }
    for k in 0..p.arcs().len() {
        if with_delay(k) {
            let _ = writeln!(out, " d{k} >= 0");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::VehicleClass;

    #[test]
    fn renders_single_arc_model() {
        let mut p = TemporalProblem::<f64>::new();
        let s = p.add_node(0, VehicleClass::Regular, None);
        let c = p.add_node(4, VehicleClass::Regular, Some((10.0, 50.0)));
        p.add_arc(s, c, VehicleClass::Regular, 10.0);
        let text = p.to_lp_text(&LpModel::MaxDelay(0));
        assert!(text.contains("Maximize\n obj: d0"));
        assert!(text.contains("arc0: t1 - t0 - d0 >= 10"));
        assert!(text.contains("10 <= t1 <= 50"));
        assert!(text.ends_with("End\n"));
        let f = p.to_lp_text(&LpModel::Feasibility);
        assert!(!f.contains("d0"));
    }
}
