//! Exhaustive solver for tiny instances.
//!
//! Regular routes are enumerated first: items (regular customers and copies)
//! are placed in index order into any position of an existing route or into
//! a new route, which yields every set of visit sequences exactly once.
//! Special routes are enumerated the same way for each complete regular
//! assignment, and every leaf is checked with the full temporal system.

use thiserror::Error;

use crate::instance::{Instance, VehicleClass};
use crate::scalar::{le_tol, pos, Scalar};
use crate::solution::{Route, Solution};
use crate::temporal::TemporalProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyLimit {
    pub customers: usize,
    pub specials: usize,
    pub vehicles: usize,
}

impl Default for TinyLimit {
    fn default() -> Self {
        Self {
            customers: 7,
            specials: 3,
            vehicles: 3,
        }
    }
}

/// Bound on enumerated leaves.
pub const MAX_ASSIGNMENTS: f64 = 1e8;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("instance exceeds the exact-solver limits: {0}")]
    TooLarge(String),
}

/// Number of ways to arrange `n` labelled items into at most `k` non-empty
/// unordered sequences.
pub fn sequence_sets(n: usize, k: usize) -> f64 {
    // Lah numbers L(n, j) = C(n-1, j-1) n! / j!
    let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
    let choose = |a: usize, b: usize| fact(a) / (fact(b) * fact(a - b));
    if n == 0 {
        return 1.0;
    }
    (1..=k.min(n)).map(|j| choose(n - 1, j - 1) * fact(n) / fact(j)).sum()
}

struct Search<'a, S> {
    inst: &'a Instance<S>,
    prune_by_cost: bool,
    best_cost: S,
    best: Option<Vec<Route>>,
}

impl<S: Scalar> Search<'_, S> {
    fn route_cost(&self, path: &[usize]) -> S {
        path.windows(2).map(|w| self.inst.travel(w[0], w[1])).sum()
    }

    fn cost(&self, routes: &[Vec<usize>], class: VehicleClass) -> S {
        let (s, e) = (self.inst.start_depot(class), self.inst.end_depot(class));
        routes
            .iter()
            .map(|r| {
                let mut p = Vec::with_capacity(r.len() + 2);
                p.push(s);
                p.extend_from_slice(r);
                p.push(e);
                self.route_cost(&p)
            })
            .sum()
    }

    /// Windows along one regular route, ignoring synchronization.
    fn windows_ok(&self, route: &[usize]) -> bool {
        let inst = self.inst;
        let c = VehicleClass::Regular;
        let mut prev = inst.start_depot(c);
        let mut t = S::zero();
        for &v in route.iter().chain(std::iter::once(&inst.end_depot(c))) {
            t = t + inst.service(c, prev) + inst.travel(prev, v);
            if let Some((l, u)) = inst.vertex(v).window {
                t = t.max(pos(l));
                if !le_tol(t, u) {
                    return false;
                }
            }
            prev = v;
        }
        true
    }

    fn bound_exceeded(&self, cost: S) -> bool {
        self.prune_by_cost && cost - S::tol() * (S::one() + cost.abs()) > self.best_cost
    }

    fn regular(&mut self, items: &[usize], k: usize, routes: &mut Vec<Vec<usize>>, specials: &[usize]) {
        let inst = self.inst;
        let reg_cost = self.cost(routes, VehicleClass::Regular);
        if self.bound_exceeded(reg_cost) {
            return;
        }
        if k == items.len() {
            let mut sroutes = Vec::new();
            self.special(specials, 0, &mut sroutes, routes, reg_cost);
            return;
        }
        let v = items[k];
        for ri in 0..routes.len() {
            let load: S = routes[ri].iter().map(|&x| inst.demand(x)).sum();
            if !le_tol(load + inst.demand(v), inst.capacity()) {
                continue;
            }
            for p in 0..=routes[ri].len() {
                routes[ri].insert(p, v);
                if self.windows_ok(&routes[ri]) {
                    self.regular(items, k + 1, routes, specials);
                }
                routes[ri].remove(p);
            }
        }
        if routes.len() < inst.fleet(VehicleClass::Regular) && le_tol(inst.demand(v), inst.capacity()) {
            routes.push(vec![v]);
            if self.windows_ok(&routes[routes.len() - 1]) {
                self.regular(items, k + 1, routes, specials);
            }
            routes.pop();
        }
    }

    fn special(&mut self, items: &[usize], k: usize, routes: &mut Vec<Vec<usize>>, regular: &[Vec<usize>], reg_cost: S) {
        let inst = self.inst;
        let total = reg_cost + self.cost(routes, VehicleClass::Special);
        if self.bound_exceeded(total) {
            return;
        }
        if k == items.len() {
            if self.best.is_some() && total >= self.best_cost {
                return;
            }
            let all = self.assemble(regular, routes);
            let problem = TemporalProblem::from_paths(inst, all.iter().map(|r| (r.class, r.path.as_slice())))
                .expect("every special customer is paired");
            if problem.schedule().is_ok() {
                self.best_cost = total;
                self.best = Some(all);
            }
            return;
        }
        let v = items[k];
        for ri in 0..routes.len() {
            for p in 0..=routes[ri].len() {
                routes[ri].insert(p, v);
                self.special(items, k + 1, routes, regular, reg_cost);
                routes[ri].remove(p);
            }
        }
        if routes.len() < inst.fleet(VehicleClass::Special) {
            routes.push(vec![v]);
            self.special(items, k + 1, routes, regular, reg_cost);
            routes.pop();
        }
    }

    fn assemble(&self, regular: &[Vec<usize>], special: &[Vec<usize>]) -> Vec<Route> {
        let mut out = Vec::new();
        for (class, list) in [(VehicleClass::Regular, regular), (VehicleClass::Special, special)] {
            for r in list {
                let mut path = vec![self.inst.start_depot(class)];
                path.extend_from_slice(r);
                path.push(self.inst.end_depot(class));
                out.push(Route { class, path });
            }
            for _ in list.len()..self.inst.fleet(class) {
                out.push(Route::empty(self.inst, class));
            }
        }
        out
    }
}

/// Optimal solution of a tiny instance, or `None` when it has no feasible
/// solution.
pub fn solve_exact<S: Scalar>(inst: &Instance<S>, limit: &TinyLimit) -> Result<Option<Solution<S>>, ExactError> {
    let specials: Vec<usize> = inst.requests().iter().copied().filter(|&c| inst.is_special(c)).collect();
    let regular_items: Vec<usize> = inst
        .requests()
        .iter()
        .map(|&c| if inst.is_special(c) { inst.copy_of(c) } else { c })
        .collect();
    let reg_fleet = inst.fleet(VehicleClass::Regular).min(regular_items.len());
    let spe_fleet = inst.fleet(VehicleClass::Special).min(specials.len());
    if inst.customer_count() > limit.customers {
        return Err(ExactError::TooLarge(format!("{} customers", inst.customer_count())));
    }
    if specials.len() > limit.specials {
        return Err(ExactError::TooLarge(format!("{} special customers", specials.len())));
    }
    if reg_fleet > limit.vehicles || spe_fleet > limit.vehicles {
        return Err(ExactError::TooLarge("too many vehicles".into()));
    }
    let size = sequence_sets(regular_items.len(), reg_fleet) * sequence_sets(specials.len(), spe_fleet);
    if size >= MAX_ASSIGNMENTS {
        return Err(ExactError::TooLarge(format!("{size:.0} assignments")));
    }
    let mut search = Search {
        inst,
        prune_by_cost: !inst.truncates_distances(),
        best_cost: S::infinity(),
        best: None,
    };
    let mut routes = Vec::new();
    search.regular(&regular_items, 0, &mut routes, &specials);
    Ok(search
        .best
        .map(|r| Solution::from_routes(inst, r).expect("leaf was checked feasible")))
}
