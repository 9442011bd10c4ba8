//! Partial solution with an all-pairs distance matrix over its temporal
//! constraints, updated incrementally on insertion.

use crate::instance::{Instance, VehicleClass};
use crate::scalar::{pos, Scalar};
use crate::solution::{Route, Solution, SolutionError};
use crate::temporal::{ArcDelay, DistanceMatrix, Infeasible, SkeletonError, TemporalProblem};

/// An insertion position. `pos` is the index of the arc tail in the route path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Regular { route: usize, pos: usize },
    Special { regular: (usize, usize), special: (usize, usize) },
}

#[derive(Debug, Clone)]
struct StateRoute<S> {
    class: VehicleClass,
    path: Vec<usize>,
    /// Matrix node of every path position.
    nodes: Vec<usize>,
    load: S,
}

#[derive(Debug, Clone)]
pub struct RoutingState<'a, S> {
    inst: &'a Instance<S>,
    routes: Vec<StateRoute<S>>,
    matrix: DistanceMatrix<S>,
    location: Vec<Option<(usize, usize)>>,
}

impl<'a, S: Scalar> RoutingState<'a, S> {
    /// State over the non-empty routes plus one spare empty route per class
    /// while vehicles remain.
    pub fn new(inst: &'a Instance<S>, routes: &[Route]) -> Result<Self, SolutionError> {
        let mut st = Self {
            inst,
            routes: routes
                .iter()
                .filter(|r| !r.is_empty())
                .map(|r| StateRoute {
                    class: r.class,
                    path: r.path.clone(),
                    nodes: Vec::new(),
                    load: r.load(inst),
                })
                .collect(),
            matrix: DistanceMatrix::origin_only(1),
            location: vec![None; inst.len()],
        };
        st.rebuild()?;
        Ok(st)
    }

    pub fn empty(inst: &'a Instance<S>) -> Self {
        Self::new(inst, &[]).expect("empty routes are feasible")
    }

    pub fn from_solution(inst: &'a Instance<S>, sol: &Solution<S>) -> Result<Self, SolutionError> {
        Self::new(inst, &sol.routes)
    }

    pub fn instance(&self) -> &'a Instance<S> {
        self.inst
    }

    /// Drops emptied routes, restores spare routes and recomputes the matrix.
    pub fn rebuild(&mut self) -> Result<(), SolutionError> {
        self.routes.retain(|r| r.path.len() > 2);
        for class in VehicleClass::ALL {
            if self.routes.iter().filter(|r| r.class == class).count() < self.inst.fleet(class) {
                self.routes.push(StateRoute {
                    class,
                    path: vec![self.inst.start_depot(class), self.inst.end_depot(class)],
                    nodes: Vec::new(),
                    load: S::zero(),
                });
            }
        }
        let problem = self.temporal_problem()?;
        let n = problem.nodes().len() + 1;
        self.matrix = problem.distance_matrix_with_capacity(n + 2 * self.inst.customer_count() + 8)?;
        for (r, nodes) in self.routes.iter_mut().zip(problem.routes()) {
            r.nodes = nodes.iter().map(|&k| k + 1).collect();
        }
        self.location.iter_mut().for_each(|l| *l = None);
        for (ri, r) in self.routes.iter().enumerate() {
            for (k, &v) in r.path.iter().enumerate().skip(1).take(r.path.len() - 2) {
                self.location[v] = Some((ri, k));
            }
        }
        Ok(())
    }

    /// Temporal system of the current routes; problem node `k` is matrix node `k + 1`.
    pub fn temporal_problem(&self) -> Result<TemporalProblem<S>, SkeletonError> {
        TemporalProblem::from_paths(self.inst, self.routes.iter().map(|r| (r.class, r.path.as_slice())))
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    pub fn route_class(&self, route: usize) -> VehicleClass {
        self.routes[route].class
    }

    /// Number of vehicles a route stands for: one for a used route, every
    /// unused vehicle of the class for the spare.
    pub fn multiplicity(&self, route: usize) -> usize {
        let r = &self.routes[route];
        if r.path.len() > 2 {
            return 1;
        }
        let used = self.routes.iter().filter(|x| x.class == r.class && x.path.len() > 2).count();
        self.inst.fleet(r.class) - used
    }

    pub fn path(&self, route: usize) -> &[usize] {
        &self.routes[route].path
    }

    pub fn load(&self, route: usize) -> S {
        self.routes[route].load
    }

    pub fn location(&self, v: usize) -> Option<(usize, usize)> {
        self.location[v]
    }

    pub fn is_routed(&self, v: usize) -> bool {
        self.location[v].is_some()
    }

    pub fn matrix(&self) -> &DistanceMatrix<S> {
        &self.matrix
    }

    /// Delay data of the arc leaving position `pos` of `route`.
    #[inline]
    pub fn arc_delay(&self, route: usize, pos: usize) -> ArcDelay<S> {
        let r = &self.routes[route];
        let (a, b) = (r.nodes[pos], r.nodes[pos + 1]);
        let (va, vb) = (r.path[pos], r.path[pos + 1]);
        let gap = self.inst.service(r.class, va) + self.inst.travel(va, vb);
        ArcDelay {
            delta: self.matrix.get(a, b) - gap,
            et: self.matrix.earliest(a),
            lt: self.matrix.latest(b),
        }
    }

    pub fn cost(&self) -> S {
        self.routes
            .iter()
            .map(|r| r.path.windows(2).map(|w| self.inst.travel(w[0], w[1])).sum::<S>())
            .sum()
    }

    /// Removes customers (and the copies of special ones) from their routes
    /// without touching the matrix; call [`RoutingState::rebuild`] afterwards.
    pub fn detach(&mut self, requests: &[usize]) {
        for &c in requests {
            let mut vs = vec![c];
            if self.inst.is_special(c) {
                vs.push(self.inst.copy_of(c));
            }
            for v in vs {
                if let Some((ri, _)) = self.location[v].take() {
                    let r = &mut self.routes[ri];
                    let k = r.path.iter().position(|&x| x == v).expect("located vertex on route");
                    r.path.remove(k);
                    if r.class == VehicleClass::Regular {
                        r.load -= self.inst.demand(v);
                    }
                }
            }
        }
    }

    fn window_edges(&self, class: VehicleClass, v: usize) -> (Option<S>, S) {
        match (class, self.inst.vertex(v).window) {
            (VehicleClass::Regular, Some((l, u))) => (Some(u), -pos(l)),
            _ => (None, S::zero()),
        }
    }

    // Adds vertex `v` to the matrix between the tail and head nodes of the arc.
    fn add_between(&mut self, route: usize, pos: usize, v: usize, extra_in: &[(usize, S)], extra_out: &[(usize, S)]) -> Result<usize, Infeasible> {
        let r = &self.routes[route];
        let class = r.class;
        let (a, b) = (r.nodes[pos], r.nodes[pos + 1]);
        let (va, vb) = (r.path[pos], r.path[pos + 1]);
        let g1 = self.inst.service(class, va) + self.inst.travel(va, v);
        let g2 = self.inst.service(class, v) + self.inst.travel(v, vb);
        let (upper, lower) = self.window_edges(class, v);
        let mut incoming = vec![(b, -g2)];
        if let Some(u) = upper {
            incoming.push((0, u));
        }
        incoming.extend_from_slice(extra_in);
        let mut outgoing = vec![(a, -g1), (0, lower)];
        outgoing.extend_from_slice(extra_out);
        self.matrix.add_node(&incoming, &outgoing)
    }

    fn splice(&mut self, route: usize, pos: usize, v: usize, node: usize) {
        let class = self.routes[route].class;
        let was_empty = self.routes[route].path.len() == 2;
        {
            let r = &mut self.routes[route];
            r.path.insert(pos + 1, v);
            r.nodes.insert(pos + 1, node);
            if class == VehicleClass::Regular {
                r.load += self.inst.demand(v);
            }
        }
        for (k, &x) in self.routes[route].path.iter().enumerate().skip(pos + 1) {
            if self.location[x].is_some() || x == v {
                self.location[x] = Some((route, k));
            }
        }
        if was_empty && self.routes.iter().filter(|r| r.class == class).count() < self.inst.fleet(class) {
            self.open_spare(class);
        }
    }

    fn open_spare(&mut self, class: VehicleClass) {
        let (s, e) = (self.inst.start_depot(class), self.inst.end_depot(class));
        let ns = self.matrix.add_node(&[], &[(0, S::zero())]).expect("start depot adds freely");
        let (upper, lower) = self.window_edges(class, e);
        let gap = self.inst.service(class, s) + self.inst.travel(s, e);
        let incoming: Vec<(usize, S)> = upper.map(|u| (0, u)).into_iter().collect();
        let ne = self
            .matrix
            .add_node(&incoming, &[(0, lower), (ns, -gap)])
            .expect("empty route is feasible");
        self.routes.push(StateRoute {
            class,
            path: vec![s, e],
            nodes: vec![ns, ne],
            load: S::zero(),
        });
    }

    pub fn insert_regular(&mut self, v: usize, route: usize, pos: usize) -> Result<(), Infeasible> {
        debug_assert_eq!(self.routes[route].class, VehicleClass::Regular);
        let node = self.add_between(route, pos, v, &[], &[])?;
        self.splice(route, pos, v, node);
        Ok(())
    }

    /// Exact verdict for inserting special customer `j` with its copy.
    pub fn special_fits(&self, j: usize, regular: (usize, usize), special: (usize, usize)) -> bool {
        let inst = self.inst;
        let r = inst.copy_of(j);
        let slack = inst.vertex(j).sync.expect("special customer has sync slack");
        let rr = &self.routes[regular.0];
        let sr = &self.routes[special.0];
        let (a1, b1) = (rr.nodes[regular.1], rr.nodes[regular.1 + 1]);
        let (va1, vb1) = (rr.path[regular.1], rr.path[regular.1 + 1]);
        let (a2, b2) = (sr.nodes[special.1], sr.nodes[special.1 + 1]);
        let (va2, vb2) = (sr.path[special.1], sr.path[special.1 + 1]);
        let reg = VehicleClass::Regular;
        let spe = VehicleClass::Special;
        let (upper_r, lower_r) = self.window_edges(reg, r);
        // local nodes: 0 origin, 1 a1, 2 b1, 3 a2, 4 b2, 5 copy, 6 special
        let mut edges = vec![
            (5, 0, lower_r),
            (5, 1, -(inst.service(reg, va1) + inst.travel(va1, r))),
            (2, 5, -(inst.service(reg, r) + inst.travel(r, vb1))),
            (6, 0, S::zero()),
            (6, 3, -(inst.service(spe, va2) + inst.travel(va2, j))),
            (4, 6, -(inst.service(spe, j) + inst.travel(j, vb2))),
            (5, 6, slack.beta),
            (6, 5, slack.alpha),
        ];
        if let Some(u) = upper_r {
            edges.push((0, 5, u));
        }
        self.matrix.closure_feasible(&[0, a1, b1, a2, b2], 2, &edges)
    }

    pub fn insert_special(&mut self, j: usize, regular: (usize, usize), special: (usize, usize)) -> Result<(), Infeasible> {
        let inst = self.inst;
        let r = inst.copy_of(j);
        let slack = inst.vertex(j).sync.expect("special customer has sync slack");
        let mut trial = self.matrix.clone();
        std::mem::swap(&mut trial, &mut self.matrix);
        let result = (|| {
            let nr = self.add_between(regular.0, regular.1, r, &[], &[])?;
            let nj = self.add_between(special.0, special.1, j, &[(nr, slack.beta)], &[(nr, slack.alpha)])?;
            Ok((nr, nj))
        })();
        match result {
            Ok((nr, nj)) => {
                self.splice(regular.0, regular.1, r, nr);
                // the regular splice may have opened a spare route; indices of
                // existing routes are unchanged
                self.splice(special.0, special.1, j, nj);
                Ok(())
            }
            Err(e) => {
                self.matrix = trial;
                Err(e)
            }
        }
    }

    pub fn apply(&mut self, j: usize, mv: Move) -> Result<(), Infeasible> {
        match mv {
            Move::Regular { route, pos } => self.insert_regular(j, route, pos),
            Move::Special { regular, special } => self.insert_special(j, regular, special),
        }
    }

    /// Routes padded with empty ones up to the fleet sizes, regular first.
    pub fn to_routes(&self) -> Vec<Route> {
        let mut out = Vec::new();
        for class in VehicleClass::ALL {
            let mut n = 0;
            for r in self.routes.iter().filter(|r| r.class == class && r.path.len() > 2) {
                out.push(Route {
                    class,
                    path: r.path.clone(),
                });
                n += 1;
            }
            for _ in n..self.inst.fleet(class) {
                out.push(Route::empty(self.inst, class));
            }
        }
        out
    }

    pub fn to_solution(&self) -> Result<Solution<S>, SolutionError> {
        Solution::from_routes(self.inst, self.to_routes())
    }
}
