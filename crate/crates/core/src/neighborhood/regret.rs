//! Regret-k insertion.

use rand::Rng;

use super::state::{Move, RoutingState};
use super::{feasible_regular_insertion, fits_on_arc, insertion_cost_special, precheck_special_insertion, PrecheckVerdict, RegularCheck};
use crate::instance::VehicleClass;
use crate::scalar::{le_tol, Scalar};
use crate::solution::insertion_cost;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretOptions<S> {
    pub k: usize,
    /// Half-width of the uniform noise added to each candidate cost; zero disables noise.
    pub noise: S,
    pub regular_check: RegularCheck,
}

impl<S: Scalar> RegretOptions<S> {
    pub fn plain(k: usize) -> Self {
        Self {
            k,
            noise: S::zero(),
            regular_check: RegularCheck::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InsertionOutcome {
    /// Special candidates that passed the pre-check.
    pub prechecks_passed: u64,
    /// Special candidates rejected by the pre-check.
    pub prechecks_rejected: u64,
    /// Passed candidates that the exact check then rejected.
    pub exact_rejected: u64,
}

/// Best option of one request on one route (or route pair).
#[derive(Debug, Clone, Copy)]
struct Option_<S> {
    cost: S,
    mv: Move,
    /// Vehicles (or vehicle pairs) this option stands for.
    mult: usize,
}

/// RV = sum over the k best route costs of their difference to the best.
/// `None` when fewer than k routes are available.
pub fn regret_value<S: Scalar>(sorted_costs: &[S], k: usize) -> Option<S> {
    if sorted_costs.len() < k || k == 0 {
        return None;
    }
    let f1 = sorted_costs[0];
    Some(sorted_costs[..k].iter().map(|&f| f - f1).sum())
}

fn noisy<S: Scalar, R: Rng>(cost: S, noise: S, rng: &mut R) -> S {
    if noise > S::zero() {
        let n = S::of(rng.gen_range(-1.0..=1.0)) * noise;
        (cost + n).max(S::zero())
    } else {
        cost
    }
}

/// Inserts every pending request by regret-k. On failure the requests that
/// could not be placed anywhere are returned; the state then holds a partial
/// solution.
pub fn regret_insert<S: Scalar, R: Rng>(
    state: &mut RoutingState<'_, S>,
    pending: &mut Vec<usize>,
    opts: &RegretOptions<S>,
    stats: &mut InsertionOutcome,
    rng: &mut R,
) -> Result<(), Vec<usize>> {
    while !pending.is_empty() {
        let mut choice: Option<(usize, usize, S, S, Move)> = None; // (idx, options, rv, f1, mv)
        let mut stranded = Vec::new();
        for (idx, &c) in pending.iter().enumerate() {
            let mut options = route_options(state, c, opts, stats, rng);
            if options.is_empty() {
                stranded.push(c);
                continue;
            }
            options.sort_by(|a, b| a.cost.partial_cmp(&b.cost).expect("finite costs"));
            let costs: Vec<S> = options
                .iter()
                .flat_map(|o| std::iter::repeat_n(o.cost, o.mult.min(opts.k)))
                .collect();
            let f1 = costs[0];
            let rv = regret_value(&costs, opts.k);
            let n = options.iter().map(|o| o.mult).sum::<usize>();
            let better = match (&choice, rv) {
                (None, _) => true,
                (Some((_, cn, crv, cf1, _)), Some(rv)) => {
                    // requests short of k routes come first
                    if *cn < opts.k {
                        false
                    } else {
                        rv > *crv || (rv == *crv && f1 < *cf1)
                    }
                }
                (Some((_, cn, _, cf1, _)), None) => *cn >= opts.k || n < *cn || (n == *cn && f1 < *cf1),
            };
            if better {
                choice = Some((idx, n, rv.unwrap_or(S::zero()), f1, options[0].mv));
            }
        }
        if !stranded.is_empty() {
            return Err(stranded);
        }
        let (idx, _, _, _, mv) = choice.expect("pending is not empty");
        let c = pending.remove(idx);
        state
            .apply(c, mv)
            .expect("insertion checked feasible against the current matrix");
    }
    Ok(())
}

fn route_options<S: Scalar, R: Rng>(
    state: &RoutingState<'_, S>,
    c: usize,
    opts: &RegretOptions<S>,
    stats: &mut InsertionOutcome,
    rng: &mut R,
) -> Vec<Option_<S>> {
    let inst = state.instance();
    let mut out = Vec::new();
    if !inst.is_special(c) {
        for ri in 0..state.route_count() {
            if state.route_class(ri) != VehicleClass::Regular || !le_tol(state.load(ri) + inst.demand(c), inst.capacity()) {
                continue;
            }
            let path = state.path(ri);
            let mut best: Option<Option_<S>> = None;
            for p in 0..path.len() - 1 {
                let (a, b) = (path[p], path[p + 1]);
                let d = state.arc_delay(ri, p);
                if !feasible_regular_insertion(inst, c, a, b, &d, opts.regular_check) {
                    continue;
                }
                let cost = noisy(insertion_cost(inst, a, c, b), opts.noise, rng);
                if best.is_none_or(|o| cost < o.cost) {
                    best = Some(Option_ {
                        cost,
                        mv: Move::Regular { route: ri, pos: p },
                        mult: state.multiplicity(ri),
                    });
                }
            }
            out.extend(best);
        }
        return out;
    }

    // Candidate positions passing the single-sided conditions, grouped by route.
    let r = inst.copy_of(c);
    let mut reg: Vec<(usize, Vec<(usize, S)>)> = Vec::new();
    let mut spe: Vec<(usize, Vec<(usize, S)>)> = Vec::new();
    for ri in 0..state.route_count() {
        let class = state.route_class(ri);
        let v = match class {
            VehicleClass::Regular => {
                if !le_tol(state.load(ri) + inst.demand(r), inst.capacity()) {
                    continue;
                }
                r
            }
            VehicleClass::Special => c,
        };
        let path = state.path(ri);
        let mut list = Vec::new();
        for p in 0..path.len() - 1 {
            let (a, b) = (path[p], path[p + 1]);
            if fits_on_arc(inst, class, v, a, b, &state.arc_delay(ri, p)) {
                list.push((p, insertion_cost(inst, a, v, b)));
            }
        }
        if !list.is_empty() {
            match class {
                VehicleClass::Regular => reg.push((ri, list)),
                VehicleClass::Special => spe.push((ri, list)),
            }
        }
    }
    let two = S::of(2.0);
    let mut cands: Vec<(S, usize, usize)> = Vec::new();
    for (r1, l1) in &reg {
        for (r2, l2) in &spe {
            cands.clear();
            for &(p1, c1) in l1 {
                for &(p2, c2) in l2 {
                    cands.push(((c1 + c2) / two, p1, p2));
                }
            }
            // stable: ties keep enumeration order
            cands.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite costs"));
            let mut best: Option<Option_<S>> = None;
            for &(cost, p1, p2) in &cands {
                if let Some(b) = best {
                    if cost - opts.noise >= b.cost {
                        break;
                    }
                }
                let path1 = state.path(*r1);
                let path2 = state.path(*r2);
                let d1 = state.arc_delay(*r1, p1);
                let d2 = state.arc_delay(*r2, p2);
                let verdict = precheck_special_insertion(
                    inst,
                    c,
                    (path1[p1], path1[p1 + 1], &d1),
                    (path2[p2], path2[p2 + 1], &d2),
                );
                if verdict != PrecheckVerdict::Pass {
                    stats.prechecks_rejected += 1;
                    continue;
                }
                stats.prechecks_passed += 1;
                if !state.special_fits(c, (*r1, p1), (*r2, p2)) {
                    stats.exact_rejected += 1;
                    continue;
                }
                debug_assert!(
                    (insertion_cost_special(inst, c, (path1[p1], path1[p1 + 1]), (path2[p2], path2[p2 + 1])) - cost).abs()
                        <= S::tol()
                );
                let cost = noisy(cost, opts.noise, rng);
                if best.is_none_or(|o| cost < o.cost) {
                    best = Some(Option_ {
                        cost,
                        mv: Move::Special {
                            regular: (*r1, p1),
                            special: (*r2, p2),
                        },
                        mult: state.multiplicity(*r1) * state.multiplicity(*r2),
                    });
                }
            }
            out.extend(best);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, InstanceBuilder};
    use crate::solution::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regret_values() {
        assert_eq!(regret_value(&[10.0, 14.0, 20.0], 2), Some(4.0));
        assert_eq!(regret_value(&[10.0, 14.0, 20.0], 3), Some(14.0));
        assert_eq!(regret_value(&[10.0, 14.0, 20.0], 1), Some(0.0));
        assert_eq!(regret_value(&[10.0], 2), None);
    }

    fn small() -> Instance<f64> {
        InstanceBuilder::new("small", (0.0, 0.0), (0.0, 300.0))
            .fleets(3, 2)
            .capacity(20.0)
            .regular(10.0, 0.0, 5.0, 5.0, (0.0, 200.0))
            .regular(20.0, 5.0, 5.0, 5.0, (30.0, 100.0))
            .regular(-10.0, 5.0, 5.0, 5.0, (0.0, 250.0))
            .special(0.0, 15.0, 5.0, 5.0, (20.0, 120.0), (0.0, 10.0))
            .build()
            .unwrap()
    }

    #[test]
    fn all_k_build_valid_solutions() {
        let inst = small();
        for k in 1..=3 {
            let mut st = RoutingState::empty(&inst);
            let mut pending = inst.requests().to_vec();
            let mut stats = InsertionOutcome::default();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            regret_insert(&mut st, &mut pending, &RegretOptions::plain(k), &mut stats, &mut rng).unwrap();
            let sol = st.to_solution().unwrap();
            assert!(sol.is_complete(&inst));
            assert_eq!(validate(&inst, &sol), vec![], "k = {k}");
        }
    }

    #[test]
    fn stranded_request_reported() {
        let inst: Instance<f64> = InstanceBuilder::new("far", (0.0, 0.0), (0.0, 100.0))
            .fleets(1, 1)
            .regular(10.0, 0.0, 1.0, 0.0, (0.0, 100.0))
            .regular(500.0, 0.0, 1.0, 0.0, (0.0, 100.0))
            .build()
            .unwrap();
        let mut st = RoutingState::empty(&inst);
        let mut pending = inst.requests().to_vec();
        let err = regret_insert(
            &mut st,
            &mut pending,
            &RegretOptions::plain(2),
            &mut InsertionOutcome::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert_eq!(err, vec![5]);
    }

    #[test]
    fn regret_one_is_cheapest_insertion() {
        // one vehicle, customers on a ray: the route is an out-and-back of length 20
        let inst: Instance<f64> = InstanceBuilder::new("cheap", (0.0, 0.0), (0.0, 1000.0))
            .fleets(1, 0)
            .regular(10.0, 0.0, 1.0, 0.0, (0.0, 1000.0))
            .regular(3.0, 0.0, 1.0, 0.0, (0.0, 1000.0))
            .build()
            .unwrap();
        let mut st = RoutingState::empty(&inst);
        let mut pending = inst.requests().to_vec();
        regret_insert(
            &mut st,
            &mut pending,
            &RegretOptions::plain(1),
            &mut InsertionOutcome::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(st.cost(), 20.0);
        assert_eq!(st.path(0).len(), 4);
    }
}
