//! Destroy and repair operators with their insertion costs and O(1)
//! feasibility checks.

mod regret;
mod removal;
mod state;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, VehicleClass};
use crate::scalar::{le_tol, pos, Scalar};
use crate::solution::insertion_cost;
use crate::temporal::ArcDelay;

pub use regret::{regret_insert, regret_value, InsertionOutcome, RegretOptions};
pub use removal::{nb_remove_range, relatedness, remove_random, remove_related, remove_worst, removal_gain, RemovalRequest, Relatedness};
pub use state::{Move, RoutingState};

/// Regular insertion rule used by the repair operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularCheck {
    /// Detour plus waiting must fit in the arc's maximum delay and the
    /// arrival must respect the due time.
    Paper,
    /// Exact feasibility of the extended system.
    #[default]
    Exact,
}

/// IC1: cost of visiting `i` between `a` and `b` on a regular route.
pub fn insertion_cost_regular<S: Scalar>(inst: &Instance<S>, i: usize, a: usize, b: usize) -> S {
    insertion_cost(inst, a, i, b)
}

/// IC2: mean of the two route cost increases of a special insertion.
pub fn insertion_cost_special<S: Scalar>(
    inst: &Instance<S>,
    special: usize,
    regular_arc: (usize, usize),
    special_arc: (usize, usize),
) -> S {
    let copy = inst.copy_of(special);
    (insertion_cost(inst, regular_arc.0, copy, regular_arc.1) + insertion_cost(inst, special_arc.0, special, special_arc.1))
        / S::of(2.0)
}

fn gaps<S: Scalar>(inst: &Instance<S>, class: VehicleClass, v: usize, a: usize, b: usize) -> (S, S) {
    (
        inst.service(class, a) + inst.travel(a, v),
        inst.service(class, v) + inst.travel(v, b),
    )
}

/// Window of `v` as seen on a route of `class`, with starts clamped at zero.
fn route_window<S: Scalar>(inst: &Instance<S>, class: VehicleClass, v: usize) -> (S, S) {
    match (class, inst.vertex(v).window) {
        (VehicleClass::Regular, Some((l, u))) => (pos(l), u),
        _ => (S::zero(), S::infinity()),
    }
}

/// Can `v` be inserted on arc `(a, b)` of a route of `class`, given that
/// arc's delay data? Exact when `v` has no other constraints.
pub fn fits_on_arc<S: Scalar>(inst: &Instance<S>, class: VehicleClass, v: usize, a: usize, b: usize, d: &ArcDelay<S>) -> bool {
    let (g1, g2) = gaps(inst, class, v, a, b);
    let (l, u) = route_window(inst, class, v);
    let detour = inst.travel(a, v) + inst.travel(v, b) - inst.travel(a, b);
    let arrival = d.et + g1;
    le_tol(detour + inst.service(class, v), d.delta) && le_tol(arrival, u) && le_tol(arrival.max(l) + g2, d.lt)
}

/// Regular insertion check of `i` on arc `(a, b)`.
pub fn feasible_regular_insertion<S: Scalar>(
    inst: &Instance<S>,
    i: usize,
    a: usize,
    b: usize,
    d: &ArcDelay<S>,
    rule: RegularCheck,
) -> bool {
    match rule {
        RegularCheck::Exact => fits_on_arc(inst, VehicleClass::Regular, i, a, b, d),
        RegularCheck::Paper => {
            let s1 = VehicleClass::Regular;
            let arrival = d.et + inst.service(s1, a) + inst.travel(a, i);
            let (l, u) = route_window(inst, s1, i);
            let wait = pos(l - arrival);
            let detour = inst.travel(a, i) + inst.travel(i, b) - inst.travel(a, b);
            le_tol(detour + wait + inst.service(s1, i), d.delta) && le_tol(arrival, u)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecheckVerdict {
    Pass,
    /// The sync window cannot be met from the bounds.
    SyncBounds,
    /// The copy does not fit on its regular arc.
    RegularDelay,
    /// The special visit does not fit on its special arc.
    SpecialDelay,
    /// The copy cannot arrive before its due time.
    CopyWindow,
}

/// Bounds used by the special-insertion pre-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialBounds<S> {
    pub lb_copy: S,
    pub ub_copy: S,
    pub lb_special: S,
    pub ub_special: S,
    pub wait_copy: S,
    pub wait_special: S,
}

pub fn special_bounds<S: Scalar>(
    inst: &Instance<S>,
    special: usize,
    regular_arc: (usize, usize, &ArcDelay<S>),
    special_arc: (usize, usize, &ArcDelay<S>),
) -> SpecialBounds<S> {
    let r = inst.copy_of(special);
    let slack = inst.vertex(special).sync.expect("special customer has sync slack");
    let (a1, b1, d1) = regular_arc;
    let (a2, b2, d2) = special_arc;
    let (g1r, g2r) = gaps(inst, VehicleClass::Regular, r, a1, b1);
    let (g1j, g2j) = gaps(inst, VehicleClass::Special, special, a2, b2);
    let lb_copy = d1.et + g1r;
    let ub_copy = d1.lt - g2r;
    let lb_special = d2.et + g1j;
    let ub_special = d2.lt - g2j;
    let (l_r, _) = route_window(inst, VehicleClass::Regular, r);
    let wait_tw = pos(l_r - lb_copy);
    let wait_sync_copy = pos(lb_special - slack.beta - lb_copy);
    let wait_sync_special = pos(lb_copy - slack.alpha - lb_special);
    SpecialBounds {
        lb_copy,
        ub_copy,
        lb_special,
        ub_special,
        wait_copy: wait_tw.max(wait_sync_copy),
        wait_special: wait_sync_special,
    }
}

/// O(1) necessary conditions for inserting special customer `special` with
/// its copy on `regular_arc` and itself on `special_arc`. A rejection is
/// always correct; a pass still needs the exact check.
pub fn precheck_special_insertion<S: Scalar>(
    inst: &Instance<S>,
    special: usize,
    regular_arc: (usize, usize, &ArcDelay<S>),
    special_arc: (usize, usize, &ArcDelay<S>),
) -> PrecheckVerdict {
    let r = inst.copy_of(special);
    let slack = inst.vertex(special).sync.expect("special customer has sync slack");
    let b = special_bounds(inst, special, regular_arc, special_arc);
    let tol = S::tol();
    if b.lb_special - b.ub_copy > slack.beta + tol || b.ub_special - b.lb_copy < -slack.alpha - tol {
        return PrecheckVerdict::SyncBounds;
    }
    let (a1, b1, d1) = regular_arc;
    let (a2, b2, d2) = special_arc;
    let detour_r = inst.travel(a1, r) + inst.travel(r, b1) - inst.travel(a1, b1);
    let out_r = inst.service(VehicleClass::Regular, r) + inst.travel(r, b1);
    if !le_tol(detour_r + inst.service(VehicleClass::Regular, r), d1.delta)
        || !le_tol(b.lb_copy + b.wait_copy + out_r, d1.lt)
    {
        return PrecheckVerdict::RegularDelay;
    }
    let detour_j = inst.travel(a2, special) + inst.travel(special, b2) - inst.travel(a2, b2);
    let out_j = inst.service(VehicleClass::Special, special) + inst.travel(special, b2);
    if !le_tol(detour_j + inst.service(VehicleClass::Special, special), d2.delta)
        || !le_tol(b.lb_special + b.wait_special + out_j, d2.lt)
    {
        return PrecheckVerdict::SpecialDelay;
    }
    let (_, u_r) = route_window(inst, VehicleClass::Regular, r);
    if !le_tol(b.lb_copy, u_r) {
        return PrecheckVerdict::CopyWindow;
    }
    PrecheckVerdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;

    fn line() -> Instance<f64> {
        // depot at origin; customers at x = 3, 7 and a special at x = 10
        InstanceBuilder::new("line", (0.0, 0.0), (0.0, 1000.0))
            .fleets(2, 2)
            .regular(3.0, 0.0, 1.0, 0.0, (0.0, 1000.0))
            .regular(7.0, 0.0, 1.0, 0.0, (0.0, 1000.0))
            .special(10.0, 0.0, 1.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap()
    }

    #[test]
    fn regular_cost_formula() {
        let inst: Instance<f64> = InstanceBuilder::new("tri", (0.0, 0.0), (0.0, 100.0))
            .regular(0.0, 10.0, 0.0, 0.0, (0.0, 100.0))
            .regular(3.0, 4.0, 0.0, 0.0, (0.0, 100.0))
            .build()
            .unwrap();
        // c(a,i)=5, c(i,b)=sqrt(45), c(a,b)=10
        let ic = insertion_cost_regular(&inst, 5, 0, 4);
        assert!((ic - (5.0 + 45f64.sqrt() - 10.0)).abs() < 1e-12);
        let inst = line();
        assert_eq!(insertion_cost_regular(&inst, 4, 0, 5), 0.0);
    }

    #[test]
    fn special_cost_is_mean_of_both_deltas() {
        let inst = line();
        // copy between 4 (x=3) and 5 (x=7): detour 6; special from depot to depot: 20.
        let ic = insertion_cost_special(&inst, 6, (4, 5), (2, 3));
        assert_eq!(ic, (6.0 + 20.0) / 2.0);
    }

    #[test]
    fn regular_boundary_equality_fits() {
        let inst = line();
        let d = ArcDelay {
            delta: 0.0,
            et: 0.0,
            lt: 7.0,
        };
        // collinear, no service, no wait
        assert!(feasible_regular_insertion(&inst, 4, 0, 5, &d, RegularCheck::Paper));
        assert!(feasible_regular_insertion(&inst, 4, 0, 5, &d, RegularCheck::Exact));
    }

    #[test]
    fn late_arrival_rejected() {
        let inst: Instance<f64> = InstanceBuilder::new("late", (0.0, 0.0), (0.0, 1000.0))
            .regular(10.0, 0.0, 1.0, 0.0, (0.0, 5.0))
            .build()
            .unwrap();
        let d = ArcDelay {
            delta: 1000.0,
            et: 0.0,
            lt: 1000.0,
        };
        assert!(!feasible_regular_insertion(&inst, 4, 0, 1, &d, RegularCheck::Paper));
        assert!(!feasible_regular_insertion(&inst, 4, 0, 1, &d, RegularCheck::Exact));
    }

    #[test]
    fn sync_boundary_passes_and_wait_formula() {
        let inst = line();
        let j = 6;
        let r = inst.copy_of(j);
        // regular arc: copy can start no later than ub_copy = lt - s - t
        let d1 = ArcDelay {
            delta: 1000.0,
            et: 0.0,
            lt: 20.0,
        };
        // special arc tail earliest start chosen so lb_special - ub_copy = beta
        let ub_copy = 20.0 - inst.travel(r, 1);
        let lb_target = ub_copy + 10.0;
        let d2 = ArcDelay {
            delta: 1000.0,
            et: lb_target - inst.travel(2, j),
            lt: 1000.0,
        };
        let b = special_bounds(&inst, j, (0, 1, &d1), (2, 3, &d2));
        assert_eq!(b.lb_special - b.ub_copy, 10.0);
        assert_ne!(precheck_special_insertion(&inst, j, (0, 1, &d1), (2, 3, &d2)), PrecheckVerdict::SyncBounds);
    }

    #[test]
    fn sync_wait_of_copy() {
        // lb_special = 100, beta = 10, lb_copy = 80: the copy waits 10.
        let inst: Instance<f64> = InstanceBuilder::new("w", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 1)
            .special(0.0, 0.0, 1.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap();
        let d1 = ArcDelay {
            delta: 1000.0,
            et: 80.0,
            lt: 1000.0,
        };
        let d2 = ArcDelay {
            delta: 1000.0,
            et: 100.0,
            lt: 1000.0,
        };
        let b = special_bounds(&inst, 4, (0, 1, &d1), (2, 3, &d2));
        assert_eq!((b.lb_copy, b.lb_special), (80.0, 100.0));
        assert_eq!(b.wait_copy, 10.0);
        assert_eq!(b.wait_special, 0.0);
    }
}
