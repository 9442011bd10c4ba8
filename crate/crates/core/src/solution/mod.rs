//! Routes, schedules and costs of complete solutions.

mod io;
mod validate;

use thiserror::Error;

use crate::instance::{Instance, VehicleClass};
use crate::scalar::Scalar;
use crate::temporal::{Infeasible, SkeletonError, TemporalProblem};

pub use io::{read_solution, write_solution, RouteRecord, SolutionFile, SolutionMeta};
pub use validate::{validate, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    pub class: VehicleClass,
    /// Visit sequence including the start and end depot.
    pub path: Vec<usize>,
}

impl Route {
    pub fn empty<S: Scalar>(inst: &Instance<S>, class: VehicleClass) -> Self {
        Self {
            class,
            path: vec![inst.start_depot(class), inst.end_depot(class)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 2
    }

    /// Customers on the route, depots excluded.
    pub fn visits(&self) -> &[usize] {
        if self.path.len() < 2 {
            return &[];
        }
        &self.path[1..self.path.len() - 1]
    }

    pub fn cost<S: Scalar>(&self, inst: &Instance<S>) -> S {
        self.path.windows(2).map(|w| inst.travel(w[0], w[1])).sum()
    }

    pub fn load<S: Scalar>(&self, inst: &Instance<S>) -> S {
        match self.class {
            VehicleClass::Regular => self.visits().iter().map(|&v| inst.demand(v)).sum(),
            VehicleClass::Special => S::zero(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<S> {
    pub routes: Vec<Route>,
    /// Service start per route position, aligned with `Route::path`.
    pub schedule: Vec<Vec<S>>,
    pub cost: S,
}

impl<S: Scalar> Solution<S> {
    /// Builds a solution from routes, computing the earliest schedule.
    pub fn from_routes(inst: &Instance<S>, routes: Vec<Route>) -> Result<Self, SolutionError> {
        let problem = TemporalProblem::from_paths(inst, routes.iter().map(|r| (r.class, r.path.as_slice())))?;
        let tau = problem.schedule()?;
        let schedule = problem
            .routes()
            .iter()
            .map(|nodes| nodes.iter().map(|&k| tau[k]).collect())
            .collect();
        let cost = total_cost(inst, &routes);
        Ok(Self {
            routes,
            schedule,
            cost,
        })
    }

    /// All routes empty: one per vehicle of each class.
    pub fn empty(inst: &Instance<S>) -> Self {
        let routes = VehicleClass::ALL
            .iter()
            .flat_map(|&c| (0..inst.fleet(c)).map(move |_| c))
            .map(|c| Route::empty(inst, c))
            .collect();
        Self::from_routes(inst, routes).expect("empty routes are feasible")
    }

    pub fn routes_of(&self, class: VehicleClass) -> impl Iterator<Item = &Route> {
        self.routes.iter().filter(move |r| r.class == class)
    }

    /// Every request served, special customers on both fleets.
    pub fn is_complete(&self, inst: &Instance<S>) -> bool {
        let mut seen = vec![0u32; inst.len()];
        for r in &self.routes {
            for &v in r.visits() {
                seen[v] += 1;
            }
        }
        inst.requests().iter().all(|&c| {
            seen[c] == 1 && (!inst.is_special(c) || seen[inst.copy_of(c)] == 1)
        })
    }

    /// Service start of vertex `v`, if visited.
    pub fn start_time(&self, v: usize) -> Option<S> {
        self.routes.iter().zip(&self.schedule).find_map(|(r, t)| {
            let k = r.visits().iter().position(|&x| x == v)?;
            Some(t[k + 1])
        })
    }
}

pub fn total_cost<S: Scalar>(inst: &Instance<S>, routes: &[Route]) -> S {
    routes.iter().map(|r| r.cost(inst)).sum()
}

/// Cost of visiting `i` between `a` and `b` instead of going directly.
#[inline]
pub fn insertion_cost<S: Scalar>(inst: &Instance<S>, a: usize, i: usize, b: usize) -> S {
    inst.travel(a, i) + inst.travel(i, b) - inst.travel(a, b)
}
