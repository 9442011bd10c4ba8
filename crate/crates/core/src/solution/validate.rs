//! Independent constraint check of a complete solution against its stored
//! schedule. Shares nothing with the temporal engine.

use std::fmt;

use super::Solution;
use crate::instance::{Instance, VehicleClass};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FleetSize { class: VehicleClass, used: usize, available: usize },
    Endpoints { route: usize },
    WrongDomain { route: usize, vertex: usize },
    ScheduleShape { route: usize },
    Missing { vertex: usize },
    Duplicate { vertex: usize, times: usize },
    Capacity { route: usize, load: f64, capacity: f64 },
    NegativeStart { route: usize, vertex: usize, start: f64 },
    Window { route: usize, vertex: usize, start: f64, window: (f64, f64) },
    Travel { route: usize, from: usize, to: usize, earliest: f64, start: f64 },
    Sync { special: usize, copy: usize, offset: f64, alpha: f64, beta: f64 },
    Cost { stored: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FleetSize { class, used, available } => {
                write!(f, "{used} {} routes but only {available} vehicles", class.name())
            }
            Violation::Endpoints { route } => write!(f, "route {route}: does not start and end at its depot"),
            Violation::WrongDomain { route, vertex } => {
                write!(f, "route {route}: vertex {vertex} cannot be served by this vehicle class")
            }
            Violation::ScheduleShape { route } => write!(f, "route {route}: schedule length differs from path"),
            Violation::Missing { vertex } => write!(f, "vertex {vertex} is not served"),
            Violation::Duplicate { vertex, times } => write!(f, "vertex {vertex} is served {times} times"),
            Violation::Capacity { route, load, capacity } => {
                write!(f, "route {route}: load {load} exceeds capacity {capacity}")
            }
            Violation::NegativeStart { route, vertex, start } => {
                write!(f, "route {route}: vertex {vertex} starts at negative time {start}")
            }
            Violation::Window { route, vertex, start, window } => write!(
                f,
                "route {route}: vertex {vertex} starts at {start}, outside [{}, {}]",
                window.0, window.1
            ),
            Violation::Travel { route, from, to, earliest, start } => write!(
                f,
                "route {route}: vertex {to} starts at {start} but cannot be reached from {from} before {earliest}"
            ),
            Violation::Sync { special, copy, offset, alpha, beta } => write!(
                f,
                "special {special} starts {offset} after copy {copy}, allowed [-{alpha}, {beta}]"
            ),
            Violation::Cost { stored, actual } => write!(f, "stored cost {stored} but routes cost {actual}"),
        }
    }
}

/// Every violated constraint, in a fixed order. Empty means feasible.
pub fn validate<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>) -> Vec<Violation> {
    let tol = S::tol();
    let mut out = Vec::new();
    for class in VehicleClass::ALL {
        let used = sol.routes.iter().filter(|r| r.class == class && !r.is_empty()).count();
        if used > inst.fleet(class) {
            out.push(Violation::FleetSize {
                class,
                used,
                available: inst.fleet(class),
            });
        }
    }

    let mut count = vec![0usize; inst.len()];
    let mut start: Vec<Option<S>> = vec![None; inst.len()];
    for (ri, route) in sol.routes.iter().enumerate() {
        let class = route.class;
        let p = &route.path;
        if p.len() < 2 || p[0] != inst.start_depot(class) || p[p.len() - 1] != inst.end_depot(class) {
            out.push(Violation::Endpoints { route: ri });
            continue;
        }
        if let Some(&v) = route.visits().iter().find(|&&v| !inst.in_domain(class, v) || inst.vertex(v).kind.is_depot()) {
            out.push(Violation::WrongDomain { route: ri, vertex: v });
            continue;
        }
        let Some(tau) = sol.schedule.get(ri).filter(|t| t.len() == p.len()) else {
            out.push(Violation::ScheduleShape { route: ri });
            continue;
        };
        for (&v, &t) in route.visits().iter().zip(&tau[1..]) {
            count[v] += 1;
            start[v] = Some(t);
        }
        if class == VehicleClass::Regular {
            let load = route.load(inst);
            if load > inst.capacity() + tol {
                out.push(Violation::Capacity {
                    route: ri,
                    load: load.as_f64(),
                    capacity: inst.capacity().as_f64(),
                });
            }
        }
        for (k, (&v, &t)) in p.iter().zip(tau).enumerate() {
            if t < -tol {
                out.push(Violation::NegativeStart {
                    route: ri,
                    vertex: v,
                    start: t.as_f64(),
                });
            }
            if class == VehicleClass::Regular && k > 0 {
                if let Some((l, u)) = inst.vertex(v).window {
                    if t < l - tol || t > u + tol {
                        out.push(Violation::Window {
                            route: ri,
                            vertex: v,
                            start: t.as_f64(),
                            window: (l.as_f64(), u.as_f64()),
                        });
                    }
                }
            }
            if k > 0 {
                let a = p[k - 1];
                let earliest = tau[k - 1] + inst.service(class, a) + inst.travel(a, v);
                if t < earliest - tol {
                    out.push(Violation::Travel {
                        route: ri,
                        from: a,
                        to: v,
                        earliest: earliest.as_f64(),
                        start: t.as_f64(),
                    });
                }
            }
        }
    }

    for &c in inst.requests() {
        let mut served = vec![c];
        if inst.is_special(c) {
            served.push(inst.copy_of(c));
        }
        for v in served {
            match count[v] {
                0 => out.push(Violation::Missing { vertex: v }),
                1 => {}
                n => out.push(Violation::Duplicate { vertex: v, times: n }),
            }
        }
        if inst.is_special(c) {
            let copy = inst.copy_of(c);
            if let (Some(ts), Some(tc)) = (start[c], start[copy]) {
                let slack = inst.vertex(c).sync.expect("special customer has sync slack");
                let offset = ts - tc;
                if offset < -slack.alpha - tol || offset > slack.beta + tol {
                    out.push(Violation::Sync {
                        special: c,
                        copy,
                        offset: offset.as_f64(),
                        alpha: slack.alpha.as_f64(),
                        beta: slack.beta.as_f64(),
                    });
                }
            }
        }
    }

    let actual = super::total_cost(inst, &sol.routes);
    if (actual - sol.cost).abs() > tol * (S::one() + actual.abs()) {
        out.push(Violation::Cost {
            stored: sol.cost.as_f64(),
            actual: actual.as_f64(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;
    use crate::solution::Route;

    fn inst() -> Instance<f64> {
        InstanceBuilder::new("v", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 1)
            .capacity(10.0)
            .regular(3.0, 4.0, 5.0, 0.0, (0.0, 1000.0))
            .special(0.0, 10.0, 2.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap()
    }

    fn feasible(inst: &Instance<f64>) -> Solution<f64> {
        Solution::from_routes(
            inst,
            vec![
                Route {
                    class: VehicleClass::Regular,
                    path: vec![0, 4, 6, 1],
                },
                Route {
                    class: VehicleClass::Special,
                    path: vec![2, 5, 3],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn engine_schedule_validates() {
        let inst = inst();
        assert_eq!(validate(&inst, &feasible(&inst)), vec![]);
    }

    #[test]
    fn sync_offset_beyond_beta() {
        let inst = inst();
        let mut s = feasible(&inst);
        let copy_start = s.schedule[0][2];
        s.schedule[1][1] = copy_start + 10.5;
        s.schedule[1][2] = copy_start + 30.0;
        let v = validate(&inst, &s);
        assert!(v.iter().any(|x| matches!(x, Violation::Sync { special: 5, .. })), "{v:?}");
    }

    #[test]
    fn duplicate_and_missing_service() {
        let inst = inst();
        let mut s = feasible(&inst);
        s.routes[0].path = vec![0, 4, 4, 1];
        s.schedule[0] = vec![0.0, 5.0, 5.0, 10.0];
        s.cost = crate::solution::total_cost(&inst, &s.routes);
        let v = validate(&inst, &s);
        assert!(v.contains(&Violation::Duplicate { vertex: 4, times: 2 }));
        assert!(v.contains(&Violation::Missing { vertex: 6 }));
    }

    #[test]
    fn capacity_and_cost() {
        let inst = inst();
        let mut s = feasible(&inst);
        s.cost += 1.0;
        let v = validate(&inst, &s);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Cost { .. }));

        let tight = InstanceBuilder::new("c", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 1)
            .capacity(6.0)
            .regular(3.0, 4.0, 5.0, 0.0, (0.0, 1000.0))
            .special(0.0, 10.0, 2.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap();
        let s = feasible(&tight);
        assert!(validate(&tight, &s).iter().any(|x| matches!(x, Violation::Capacity { .. })));
    }

    #[test]
    fn window_and_travel() {
        let inst = inst();
        let mut s = feasible(&inst);
        s.schedule[0][1] = 2.0;
        let v = validate(&inst, &s);
        assert!(v.iter().any(|x| matches!(x, Violation::Travel { to: 4, .. })));
        s.schedule[0][1] = 1500.0;
        let v = validate(&inst, &s);
        assert!(v.iter().any(|x| matches!(x, Violation::Window { vertex: 4, .. })));
    }

    #[test]
    fn too_many_routes_and_bad_endpoints() {
        let inst = inst();
        let mut s = feasible(&inst);
        s.routes.push(Route {
            class: VehicleClass::Regular,
            path: vec![0, 4, 1],
        });
        s.schedule.push(vec![0.0, 5.0, 10.0]);
        s.cost = crate::solution::total_cost(&inst, &s.routes);
        let v = validate(&inst, &s);
        assert!(v.iter().any(|x| matches!(x, Violation::FleetSize { used: 2, .. })));
        s.routes[2].path = vec![1, 4, 0];
        let v = validate(&inst, &s);
        assert!(v.contains(&Violation::Endpoints { route: 2 }));
    }
}
