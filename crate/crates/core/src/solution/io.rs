//! Solution files: TOML with run metadata and one table per non-empty route.

use serde::{Deserialize, Serialize};

use super::{Route, Solution};
use crate::instance::{Instance, InstanceError, VehicleClass};
use crate::scalar::Scalar;

pub const SOLUTION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionMeta {
    pub seed: u64,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format_version: u32,
    pub instance: String,
    pub seed: u64,
    pub iterations: u64,
    pub cost: f64,
    #[serde(default, rename = "route")]
    pub routes: Vec<RouteRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub class: VehicleClass,
    /// Vehicle number within its class.
    pub vehicle: usize,
    /// Path including both depots.
    pub visits: Vec<usize>,
    pub times: Vec<f64>,
}

impl SolutionFile {
    pub fn from_solution<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>, meta: &SolutionMeta) -> Self {
        let mut next = [0usize; 2];
        let mut routes = Vec::new();
        for (r, t) in sol.routes.iter().zip(&sol.schedule) {
            let slot = &mut next[r.class as usize];
            let vehicle = *slot;
            *slot += 1;
            if r.is_empty() {
                continue;
            }
            routes.push(RouteRecord {
                class: r.class,
                vehicle,
                visits: r.path.clone(),
                times: t.iter().map(|x| x.as_f64()).collect(),
            });
        }
        Self {
            format_version: SOLUTION_FORMAT_VERSION,
            instance: inst.name().to_string(),
            seed: meta.seed,
            iterations: meta.iterations,
            cost: sol.cost.as_f64(),
            routes,
        }
    }

    /// Rebuilds the stored solution verbatim (times are not recomputed) so the
    /// validator sees exactly what was written. Missing vehicles become empty
    /// routes.
    pub fn into_solution<S: Scalar>(self, inst: &Instance<S>) -> Result<(Solution<S>, SolutionMeta), InstanceError> {
        if self.format_version != SOLUTION_FORMAT_VERSION {
            return Err(InstanceError::Format(format!(
                "unsupported solution format version {}",
                self.format_version
            )));
        }
        if self.instance != inst.name() {
            return Err(InstanceError::Format(format!(
                "solution is for instance {} but {} was given",
                self.instance,
                inst.name()
            )));
        }
        let mut routes = Vec::new();
        let mut schedule = Vec::new();
        for class in VehicleClass::ALL {
            let mut recs: Vec<&RouteRecord> = self.routes.iter().filter(|r| r.class == class).collect();
            recs.sort_by_key(|r| r.vehicle);
            let slots = inst.fleet(class).max(recs.last().map_or(0, |r| r.vehicle + 1));
            let mut it = recs.into_iter().peekable();
            for v in 0..slots {
                match it.peek() {
                    Some(r) if r.vehicle == v => {
                        let r = it.next().expect("peeked");
                        if r.visits.len() != r.times.len() {
                            return Err(InstanceError::Format(format!(
                                "{} vehicle {v}: {} visits but {} times",
                                class.name(),
                                r.visits.len(),
                                r.times.len()
                            )));
                        }
                        if let Some(&bad) = r.visits.iter().find(|&&x| x >= inst.len()) {
                            return Err(InstanceError::Format(format!("unknown vertex {bad}")));
                        }
                        routes.push(Route {
                            class,
                            path: r.visits.clone(),
                        });
                        schedule.push(r.times.iter().map(|&x| S::of(x)).collect());
                    }
                    Some(r) if r.vehicle < v => {
                        return Err(InstanceError::Format(format!(
                            "{} vehicle {} listed twice",
                            class.name(),
                            r.vehicle
                        )))
                    }
                    _ => {
                        routes.push(Route::empty(inst, class));
                        schedule.push(vec![S::zero(), S::zero()]);
                    }
                }
            }
        }
        let sol = Solution {
            routes,
            schedule,
            cost: S::of(self.cost),
        };
        Ok((
            sol,
            SolutionMeta {
                seed: self.seed,
                iterations: self.iterations,
            },
        ))
    }
}

pub fn write_solution<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>, meta: &SolutionMeta) -> String {
    toml::to_string(&SolutionFile::from_solution(inst, sol, meta)).expect("solution file serializes")
}

pub fn read_solution<S: Scalar>(inst: &Instance<S>, text: &str) -> Result<(Solution<S>, SolutionMeta), InstanceError> {
    let file: SolutionFile = toml::from_str(text).map_err(|e| InstanceError::Format(e.to_string()))?;
    file.into_solution(inst)
}
