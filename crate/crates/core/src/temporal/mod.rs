//! Temporal feasibility over a fixed routing skeleton.
//!
//! A skeleton's timing constraints (windows, synchronization windows and
//! travel precedences) form a system of difference constraints. Maximum
//! arc delays, earliest/latest service bounds, insertion feasibility and
//! schedules are all answered as shortest-path questions on that system.

mod apsp;
mod lp_text;

use thiserror::Error;

use crate::instance::{Instance, VehicleClass};
use crate::scalar::{le_tol, Scalar};

pub use apsp::{DistanceMatrix, MAX_CLOSURE};
pub use lp_text::LpModel;

/// The constraint system admits no solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("temporal constraint system is infeasible")]
pub struct Infeasible;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("special customer {0} is routed but its regular copy is not")]
    UnpairedSpecial(usize),
    #[error("vertex {0} appears more than once")]
    Duplicate(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalNode<S> {
    pub vertex: usize,
    pub class: VehicleClass,
    /// `l <= tau <= u`; only nodes of regular routes carry one.
    pub window: Option<(S, S)>,
}

/// Precedence `tau_head >= tau_tail + min_gap`, where `min_gap` is the
/// tail's service time plus the travel time for the arc's vehicle class.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalArc<S> {
    pub tail: usize,
    pub head: usize,
    pub class: VehicleClass,
    pub min_gap: S,
}

/// `-alpha <= tau_special - tau_copy <= beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncRow<S> {
    pub special: usize,
    pub copy: usize,
    pub alpha: S,
    pub beta: S,
}

/// Maximum delay on one arc together with the earliest start of its tail
/// and the latest start of its head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcDelay<S> {
    pub delta: S,
    pub et: S,
    pub lt: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcDelayTable<S> {
    pub entries: Vec<ArcDelay<S>>,
}

impl<S: Scalar> ArcDelayTable<S> {
    pub fn get(&self, arc: usize) -> ArcDelay<S> {
        self.entries[arc]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemporalProblem<S> {
    nodes: Vec<TemporalNode<S>>,
    arcs: Vec<TemporalArc<S>>,
    syncs: Vec<SyncRow<S>>,
    routes: Vec<Vec<usize>>,
}

impl<S: Scalar> TemporalProblem<S> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            arcs: Vec::new(),
            syncs: Vec::new(),
            routes: Vec::new(),
        }
    }

    /// Builds the system for a set of routes. Each path lists instance
    /// vertices from start depot to end depot; depots get one node per route.
    pub fn from_paths<'a, I>(inst: &Instance<S>, paths: I) -> Result<Self, SkeletonError>
    where
        I: IntoIterator<Item = (VehicleClass, &'a [usize])>,
    {
        let mut p = Self::new();
        let mut node_of = vec![None; inst.len()];
        for (class, path) in paths {
            let mut route = Vec::with_capacity(path.len());
            for (pos, &v) in path.iter().enumerate() {
                let depot = pos == 0 || pos + 1 == path.len();
                let window = match class {
                    VehicleClass::Regular => inst.vertex(v).window,
                    VehicleClass::Special => None,
                };
                let k = p.add_node(v, class, window);
                if !depot {
                    if node_of[v].is_some() {
                        return Err(SkeletonError::Duplicate(v));
                    }
                    node_of[v] = Some(k);
                }
                route.push(k);
            }
            for k in 1..route.len() {
                let (a, b) = (path[k - 1], path[k]);
                let gap = inst.service(class, a) + inst.travel(a, b);
                p.add_arc(route[k - 1], route[k], class, gap);
            }
            p.routes.push(route);
        }
        for (k, node) in p.nodes.clone().iter().enumerate() {
            if node.class == VehicleClass::Special && inst.is_special(node.vertex) {
                let copy = node_of[inst.copy_of(node.vertex)].ok_or(SkeletonError::UnpairedSpecial(node.vertex))?;
                let slack = inst.vertex(node.vertex).sync.expect("special customer has sync slack");
                p.add_sync(k, copy, slack.alpha, slack.beta);
            }
        }
        Ok(p)
    }

    pub fn add_node(&mut self, vertex: usize, class: VehicleClass, window: Option<(S, S)>) -> usize {
        self.nodes.push(TemporalNode { vertex, class, window });
        self.nodes.len() - 1
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, class: VehicleClass, min_gap: S) -> usize {
        self.arcs.push(TemporalArc {
            tail,
            head,
            class,
            min_gap,
        });
        self.arcs.len() - 1
    }

    pub fn add_sync(&mut self, special: usize, copy: usize, alpha: S, beta: S) {
        self.syncs.push(SyncRow {
            special,
            copy,
            alpha,
            beta,
        });
    }

    pub fn nodes(&self) -> &[TemporalNode<S>] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[TemporalArc<S>] {
        &self.arcs
    }

    pub fn syncs(&self) -> &[SyncRow<S>] {
        &self.syncs
    }

    /// Node indices of each route built by [`TemporalProblem::from_paths`].
    pub fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    /// Index of the arc `tail -> head`, if present.
    pub fn arc_between(&self, tail: usize, head: usize) -> Option<usize> {
        self.arcs.iter().position(|a| a.tail == tail && a.head == head)
    }

    /// Edges of the distance graph; graph node `k + 1` is problem node `k`
    /// and graph node 0 is the time origin.
    pub fn edges(&self) -> Vec<(usize, usize, S)> {
        let mut e = Vec::with_capacity(2 * self.nodes.len() + self.arcs.len() + 2 * self.syncs.len());
        for (k, node) in self.nodes.iter().enumerate() {
            let g = k + 1;
            let lower = node.window.map_or(S::zero(), |w| w.0.max(S::zero()));
            e.push((g, 0, -lower));
            if let Some((_, u)) = node.window {
                e.push((0, g, u));
            }
        }
        for a in &self.arcs {
            e.push((a.head + 1, a.tail + 1, -a.min_gap));
        }
        for s in &self.syncs {
            e.push((s.copy + 1, s.special + 1, s.beta));
            e.push((s.special + 1, s.copy + 1, s.alpha));
        }
        e
    }

    fn graph_size(&self) -> usize {
        self.nodes.len() + 1
    }

    /// Bellman-Ford with every node as a zero-distance source.
    pub fn is_feasible(&self) -> bool {
        let n = self.graph_size();
        let edges = self.edges();
        let mut dist = vec![S::zero(); n];
        for round in 0..=n {
            let mut changed = false;
            for &(u, v, w) in &edges {
                let cand = dist[u] + w;
                if cand < dist[v] - S::tol() {
                    dist[v] = cand;
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
            if round == n {
                break;
            }
        }
        false
    }

    fn shortest_from(&self, source: usize, edges: &[(usize, usize, S)]) -> Vec<S> {
        let n = self.graph_size();
        let mut dist = vec![S::infinity(); n];
        dist[source] = S::zero();
        for _ in 0..n {
            let mut changed = false;
            for &(u, v, w) in edges {
                if dist[u] == S::infinity() {
                    continue;
                }
                let cand = dist[u] + w;
                if cand < dist[v] {
                    dist[v] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Largest delay that can be inserted on `arc` after serving its tail
    /// while keeping every constraint satisfied; infinite when unbounded.
    pub fn max_delay_single(&self, arc: usize) -> Result<S, Infeasible> {
        if !self.is_feasible() {
            return Err(Infeasible);
        }
        let a = &self.arcs[arc];
        let dist = self.shortest_from(a.tail + 1, &self.edges());
        Ok(dist[a.head + 1] - a.min_gap)
    }

    /// All-pairs distances of the system (graph indexing, origin at 0).
    pub fn distance_matrix(&self) -> Result<DistanceMatrix<S>, Infeasible> {
        self.distance_matrix_with_capacity(0)
    }

    /// Same as [`TemporalProblem::distance_matrix`], reserving room for
    /// `capacity` nodes so later incremental additions do not reallocate.
    pub fn distance_matrix_with_capacity(&self, capacity: usize) -> Result<DistanceMatrix<S>, Infeasible> {
        let n = self.graph_size();
        DistanceMatrix::from_edges(n, &self.edges(), capacity.max(n))
    }

    /// Maximum delay, earliest tail start and latest head start for every arc.
    pub fn max_delays_all(&self) -> Result<ArcDelayTable<S>, Infeasible> {
        let m = self.distance_matrix()?;
        Ok(ArcDelayTable {
            entries: self
                .arcs
                .iter()
                .map(|a| ArcDelay {
                    delta: m.get(a.tail + 1, a.head + 1) - a.min_gap,
                    et: m.earliest(a.tail + 1),
                    lt: m.latest(a.head + 1),
                })
                .collect(),
        })
    }

    /// Earliest schedule: every start time as small as the constraints allow,
    /// indexed by problem node.
    pub fn schedule(&self) -> Result<Vec<S>, Infeasible> {
        let n = self.nodes.len();
        let mut tau: Vec<S> = self
            .nodes
            .iter()
            .map(|nd| nd.window.map_or(S::zero(), |w| w.0.max(S::zero())))
            .collect();
        // tau[to] >= tau[from] + c
        let mut lower: Vec<(usize, usize, S)> = self.arcs.iter().map(|a| (a.tail, a.head, a.min_gap)).collect();
        for s in &self.syncs {
            lower.push((s.copy, s.special, -s.alpha));
            lower.push((s.special, s.copy, -s.beta));
        }
        let mut settled = false;
        for _ in 0..=n {
            let mut changed = false;
            for &(f, t, c) in &lower {
                let cand = tau[f] + c;
                let slack = S::epsilon() * (S::one() + tau[t].abs());
                if cand > tau[t] + slack {
                    tau[t] = cand;
                    changed = true;
                }
            }
            if !changed {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Infeasible);
        }
        for (t, nd) in tau.iter().zip(&self.nodes) {
            if let Some((_, u)) = nd.window {
                if !le_tol(*t, u) {
                    return Err(Infeasible);
                }
            }
        }
        Ok(tau)
    }

    /// The system with special customer `special` inserted on regular arc
    /// `regular_arc` (its copy) and special arc `special_arc`.
    pub fn with_special_inserted(
        &self,
        inst: &Instance<S>,
        special: usize,
        regular_arc: usize,
        special_arc: usize,
    ) -> Self {
        let copy = inst.copy_of(special);
        let mut p = self.clone();
        let r = p.add_node(copy, VehicleClass::Regular, inst.vertex(copy).window);
        let j = p.add_node(special, VehicleClass::Special, None);
        p.split_arc(inst, regular_arc, r);
        p.split_arc(inst, special_arc, j);
        let slack = inst.vertex(special).sync.expect("special customer has sync slack");
        p.add_sync(j, r, slack.alpha, slack.beta);
        p.arcs.retain(|a| a.min_gap.is_finite());
        p
    }

    /// The system with regular vertex `v` inserted on arc `arc`.
    pub fn with_regular_inserted(&self, inst: &Instance<S>, v: usize, arc: usize) -> Self {
        let mut p = self.clone();
        let k = p.add_node(v, VehicleClass::Regular, inst.vertex(v).window);
        p.split_arc(inst, arc, k);
        p.arcs.retain(|a| a.min_gap.is_finite());
        p
    }

    // Replaces arc `arc` by tail -> mid -> head; the old arc is marked for removal.
    fn split_arc(&mut self, inst: &Instance<S>, arc: usize, mid: usize) {
        let a = self.arcs[arc].clone();
        let (tv, mv, hv) = (self.nodes[a.tail].vertex, self.nodes[mid].vertex, self.nodes[a.head].vertex);
        let c = a.class;
        self.add_arc(a.tail, mid, c, inst.service(c, tv) + inst.travel(tv, mv));
        self.add_arc(mid, a.head, c, inst.service(c, mv) + inst.travel(mv, hv));
        self.arcs[arc].min_gap = S::infinity();
    }

    /// F3 verdict: can `special` be inserted on the two given arcs?
    pub fn check_special_insertion(
        &self,
        inst: &Instance<S>,
        special: usize,
        regular_arc: usize,
        special_arc: usize,
    ) -> bool {
        debug_assert_eq!(self.arcs[regular_arc].class, VehicleClass::Regular);
        debug_assert_eq!(self.arcs[special_arc].class, VehicleClass::Special);
        self.with_special_inserted(inst, special, regular_arc, special_arc)
            .is_feasible()
    }

    pub fn to_lp_text(&self, model: &LpModel) -> String {
        lp_text::render(self, model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;

    /// start depot -> c (window [10, 50], service 5) -> end depot (due 100),
    /// 10 time units per leg.
    fn single_route() -> TemporalProblem<f64> {
        let mut p = TemporalProblem::new();
        let s = p.add_node(0, VehicleClass::Regular, None);
        let c = p.add_node(4, VehicleClass::Regular, Some((10.0, 50.0)));
        let e = p.add_node(1, VehicleClass::Regular, Some((0.0, 100.0)));
        p.add_arc(s, c, VehicleClass::Regular, 10.0);
        p.add_arc(c, e, VehicleClass::Regular, 15.0);
        p
    }

    #[test]
    fn max_delay_on_first_leg() {
        let p = single_route();
        assert_eq!(p.max_delay_single(0).unwrap(), 40.0);
        // Second leg: c can start at 10 at the earliest, end depot is due at 100.
        assert_eq!(p.max_delay_single(1).unwrap(), 75.0);
        let table = p.max_delays_all().unwrap();
        assert_eq!(table.get(0).delta, 40.0);
        assert_eq!(table.get(0).et, 0.0);
        assert_eq!(table.get(0).lt, 50.0);
        assert_eq!(table.get(1).delta, 75.0);
    }

    #[test]
    fn tight_window_means_zero_delay() {
        let mut p = TemporalProblem::new();
        let s = p.add_node(0, VehicleClass::Regular, Some((0.0, 0.0)));
        let c = p.add_node(4, VehicleClass::Regular, Some((10.0, 10.0)));
        p.add_arc(s, c, VehicleClass::Regular, 10.0);
        assert_eq!(p.max_delay_single(0).unwrap(), 0.0);
        assert_eq!(p.max_delays_all().unwrap().get(0).delta, 0.0);
    }

    #[test]
    fn violated_window_is_infeasible_everywhere() {
        let mut p = TemporalProblem::new();
        let s = p.add_node(0, VehicleClass::Regular, None);
        let c = p.add_node(4, VehicleClass::Regular, Some((0.0, 5.0)));
        p.add_arc(s, c, VehicleClass::Regular, 10.0);
        assert!(!p.is_feasible());
        assert_eq!(p.max_delay_single(0), Err(Infeasible));
        assert_eq!(p.max_delays_all(), Err(Infeasible));
        assert_eq!(p.schedule(), Err(Infeasible));
    }

    #[test]
    fn unbounded_delay_is_infinite() {
        let mut p = TemporalProblem::<f64>::new();
        let s = p.add_node(2, VehicleClass::Special, None);
        let e = p.add_node(3, VehicleClass::Special, None);
        p.add_arc(s, e, VehicleClass::Special, 0.0);
        assert!(p.max_delay_single(0).unwrap().is_infinite());
        assert!(p.max_delays_all().unwrap().get(0).delta.is_infinite());
    }

    #[test]
    fn tight_chain_schedule() {
        let mut p = TemporalProblem::new();
        let a = p.add_node(0, VehicleClass::Regular, None);
        let b = p.add_node(4, VehicleClass::Regular, Some((0.0, 500.0)));
        let c = p.add_node(5, VehicleClass::Regular, Some((0.0, 500.0)));
        p.add_arc(a, b, VehicleClass::Regular, 12.0);
        p.add_arc(b, c, VehicleClass::Regular, 7.5);
        assert_eq!(p.schedule().unwrap(), vec![0.0, 12.0, 19.5]);
    }

    #[test]
    fn waiting_for_window_opening() {
        // Vehicle would arrive at 70, window opens at 100: thirty units of waiting.
        let mut p = TemporalProblem::new();
        let a = p.add_node(0, VehicleClass::Regular, None);
        let b = p.add_node(4, VehicleClass::Regular, Some((100.0, 200.0)));
        p.add_arc(a, b, VehicleClass::Regular, 70.0);
        let tau = p.schedule().unwrap();
        assert_eq!(tau[b], 100.0);
        assert_eq!(tau[b] - (tau[a] + 70.0), 30.0);
    }

    #[test]
    fn waiting_for_synchronization() {
        // Regular vehicle starts the copy at 100; the special vehicle could
        // start at 55. With alpha = 0 it waits 45 units.
        let mut p = TemporalProblem::new();
        let rs = p.add_node(0, VehicleClass::Regular, None);
        let copy = p.add_node(6, VehicleClass::Regular, Some((100.0, 200.0)));
        let ss = p.add_node(2, VehicleClass::Special, None);
        let sp = p.add_node(5, VehicleClass::Special, None);
        p.add_arc(rs, copy, VehicleClass::Regular, 20.0);
        p.add_arc(ss, sp, VehicleClass::Special, 55.0);
        p.add_sync(sp, copy, 0.0, 10.0);
        let tau = p.schedule().unwrap();
        assert_eq!(tau[copy], 100.0);
        assert_eq!(tau[sp], tau[copy]);
        assert_eq!(tau[sp] - (tau[ss] + 55.0), 45.0);
    }

    fn paired_instance() -> Instance<f64> {
        InstanceBuilder::new("pair", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 1)
            .regular(10.0, 0.0, 1.0, 0.0, (0.0, 1000.0))
            .special(0.0, 10.0, 1.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap()
    }

    #[test]
    fn from_paths_links_sync_pairs() {
        let inst = paired_instance();
        let reg = [0usize, 4, 6, 1];
        let spe = [2usize, 5, 3];
        let p = TemporalProblem::from_paths(
            &inst,
            [(VehicleClass::Regular, &reg[..]), (VehicleClass::Special, &spe[..])],
        )
        .unwrap();
        assert_eq!(p.nodes().len(), 7);
        assert_eq!(p.arcs().len(), 5);
        assert_eq!(p.syncs().len(), 1);
        assert_eq!(p.nodes()[p.syncs()[0].copy].vertex, 6);
        assert!(p.is_feasible());
    }

    #[test]
    fn unpaired_special_is_rejected() {
        let inst = paired_instance();
        let reg = [0usize, 4, 1];
        let spe = [2usize, 5, 3];
        let err = TemporalProblem::from_paths(
            &inst,
            [(VehicleClass::Regular, &reg[..]), (VehicleClass::Special, &spe[..])],
        )
        .unwrap_err();
        assert_eq!(err, SkeletonError::UnpairedSpecial(5));
    }

    #[test]
    fn special_insertion_verdicts() {
        let inst = paired_instance();
        let reg = [0usize, 1];
        let spe = [2usize, 3];
        let p = TemporalProblem::from_paths(
            &inst,
            [(VehicleClass::Regular, &reg[..]), (VehicleClass::Special, &spe[..])],
        )
        .unwrap();
        assert!(p.check_special_insertion(&inst, 5, 0, 1));

        // Force the special visit at least 11 units after its copy.
        let tight: Instance<f64> = InstanceBuilder::new("tight", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 1)
            .special(0.0, 10.0, 1.0, 0.0, (10.0, 10.0), (0.0, 10.0))
            .build()
            .unwrap();
        let mut q = TemporalProblem::new();
        let rs = q.add_node(0, VehicleClass::Regular, None);
        let re = q.add_node(1, VehicleClass::Regular, Some((0.0, 1000.0)));
        let ss = q.add_node(2, VehicleClass::Special, Some((11.0, 11.0)));
        let se = q.add_node(3, VehicleClass::Special, None);
        q.add_arc(rs, re, VehicleClass::Regular, 0.0);
        q.add_arc(ss, se, VehicleClass::Special, 0.0);
        // copy is pinned at 10 by its window, special cannot start before 11 + 10.
        assert!(!q.check_special_insertion(&tight, 4, 0, 1));
    }

    #[test]
    fn generic_over_f32() {
        let mut p = TemporalProblem::<f32>::new();
        let s = p.add_node(0, VehicleClass::Regular, None);
        let c = p.add_node(4, VehicleClass::Regular, Some((10.0, 50.0)));
        p.add_arc(s, c, VehicleClass::Regular, 10.0);
        assert_eq!(p.max_delay_single(0).unwrap(), 40.0f32);
        assert_eq!(p.schedule().unwrap(), vec![0.0f32, 10.0]);
    }
}
