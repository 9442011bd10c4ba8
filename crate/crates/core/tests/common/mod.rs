//! Independent oracles shared by the integration tests: an LP model of the
//! timing constraints built straight from instance data, random feasible
//! skeletons and a brute-force optimum for tiny instances.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use minilp::{ComparisonOp, Error as LpError, OptimizationDirection, Problem, Variable};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vrpsc::instance::random::{random_instance, RandomParams};
use vrpsc::instance::{parse_vrptw, transform, Instance, TransformOptions, VehicleClass};
use vrpsc::solution::Route;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn solomon(name: &str, customers: Option<usize>, ns: f64) -> Instance<f64> {
    let path = data_dir().join("solomon").join(format!("{name}.txt"));
    let raw = parse_vrptw(&fs::read_to_string(&path).unwrap()).unwrap();
    let opts = TransformOptions {
        customers,
        ..TransformOptions::with_ns(ns)
    };
    transform(&raw, &opts).unwrap()
}

pub fn homberger(name: &str, ns: f64) -> Instance<f64> {
    let path = data_dir().join("homberger").join(format!("{name}.txt"));
    let raw = parse_vrptw(&fs::read_to_string(&path).unwrap()).unwrap();
    transform(&raw, &TransformOptions::with_ns(ns)).unwrap()
}

/// Solomon files of the 25-customer suite, minus the ones excluded from the
/// class averages.
pub fn solomon_names() -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(data_dir().join("solomon"))
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .filter(|n| !["C101", "C105", "C106"].contains(&n.as_str()))
        .collect();
    names.sort();
    names
}

struct Lp {
    problem: Problem,
    vars: Vec<Vec<Variable>>,
}

/// tau per route position; windows on regular routes, tau >= 0 everywhere,
/// travel precedences and one sync pair per routed special customer.
fn build_lp(inst: &Instance<f64>, routes: &[Route], objective: Option<(usize, usize)>) -> Lp {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let mut vars = Vec::new();
    for (ri, r) in routes.iter().enumerate() {
        let mut vs = Vec::new();
        for (p, &v) in r.path.iter().enumerate() {
            let obj = match objective {
                Some((or, op)) if or == ri && op == p => -1.0,
                Some((or, op)) if or == ri && op + 1 == p => 1.0,
                _ => 0.0,
            };
            let bounds = match (r.class, inst.vertex(v).window) {
                (VehicleClass::Regular, Some((l, u))) => (l.max(0.0), u),
                _ => (0.0, f64::INFINITY),
            };
            vs.push(problem.add_var(obj, bounds));
        }
        for p in 1..r.path.len() {
            let (a, b) = (r.path[p - 1], r.path[p]);
            let gap = inst.service(r.class, a) + inst.travel(a, b);
            problem.add_constraint([(vs[p], 1.0), (vs[p - 1], -1.0)], ComparisonOp::Ge, gap);
        }
        vars.push(vs);
    }
    let find = |class: VehicleClass, v: usize| {
        routes.iter().enumerate().find_map(|(ri, r)| {
            if r.class != class {
                return None;
            }
            let n = r.path.len();
            r.path[1..n - 1].iter().position(|&x| x == v).map(|p| (ri, p + 1))
        })
    };
    for &c in inst.requests() {
        if !inst.is_special(c) {
            continue;
        }
        if let (Some((r1, p1)), Some((r2, p2))) = (find(VehicleClass::Regular, inst.copy_of(c)), find(VehicleClass::Special, c)) {
            let s = inst.vertex(c).sync.unwrap();
            let diff = [(vars[r2][p2], 1.0), (vars[r1][p1], -1.0)];
            problem.add_constraint(diff, ComparisonOp::Ge, -s.alpha);
            problem.add_constraint(diff, ComparisonOp::Le, s.beta);
        }
    }
    Lp { problem, vars }
}

pub fn lp_feasible(inst: &Instance<f64>, routes: &[Route]) -> bool {
    match build_lp(inst, routes, None).problem.solve() {
        Ok(_) => true,
        Err(LpError::Infeasible) => false,
        Err(e) => panic!("unexpected LP outcome: {e:?}"),
    }
}

/// Largest extra delay on the arc leaving position `pos` of route `route`;
/// `None` when the skeleton is infeasible.
pub fn lp_max_delay(inst: &Instance<f64>, routes: &[Route], route: usize, pos: usize) -> Option<f64> {
    let lp = build_lp(inst, routes, Some((route, pos)));
    let r = &routes[route];
    let (a, b) = (r.path[pos], r.path[pos + 1]);
    let gap = inst.service(r.class, a) + inst.travel(a, b);
    match lp.problem.solve() {
        Ok(sol) => Some(sol.objective() - gap),
        Err(LpError::Unbounded) => Some(f64::INFINITY),
        Err(LpError::Infeasible) => None,
    }
}

pub fn with_insert(routes: &[Route], route: usize, pos: usize, v: usize) -> Vec<Route> {
    let mut out = routes.to_vec();
    out[route].path.insert(pos + 1, v);
    out
}

fn close(inst: &Instance<f64>, class: VehicleClass, visits: &[usize]) -> Route {
    let mut path = vec![inst.start_depot(class)];
    path.extend_from_slice(visits);
    path.push(inst.end_depot(class));
    Route { class, path }
}

/// Instance shape for oracle comparisons: at most 6 customers, 2 special.
pub fn tiny_params(rng: &mut impl Rng, max_customers: usize) -> RandomParams {
    let customers = rng.gen_range(2..=max_customers);
    RandomParams {
        customers,
        specials: rng.gen_range(0..=2.min(customers)),
        regular_fleet: rng.gen_range(1..=3),
        special_fleet: rng.gen_range(1..=2),
        ..RandomParams::default()
    }
}

/// A random instance together with a random routing that the LP oracle
/// accepts. Visits per skeleton stay within `max_visits`, depots included.
pub fn random_skeleton(seed: u64, max_visits: usize) -> Option<(Instance<f64>, Vec<Route>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reg_fleet = rng.gen_range(1..=3);
    let spe_fleet = rng.gen_range(1..=2);
    let budget = max_visits - 2 * (reg_fleet + spe_fleet);
    let specials = rng.gen_range(0..=3.min(budget / 2));
    let customers = rng.gen_range(specials.max(1)..=(budget - specials).min(14));
    let params = RandomParams {
        customers,
        specials,
        regular_fleet: reg_fleet,
        special_fleet: spe_fleet,
        horizon: rng.gen_range(300.0..=800.0),
        capacity: 1000.0,
        ..RandomParams::default()
    };
    let inst = random_instance::<f64, _>(&mut rng, &params).ok()?;
    for _ in 0..200 {
        let mut reg: Vec<usize> = inst
            .requests()
            .iter()
            .map(|&c| if inst.is_special(c) { inst.copy_of(c) } else { c })
            .collect();
        reg.shuffle(&mut rng);
        let mut spe: Vec<usize> = inst.requests().iter().copied().filter(|&c| inst.is_special(c)).collect();
        spe.shuffle(&mut rng);
        let mut routes = Vec::new();
        for (class, items, fleet) in [(VehicleClass::Regular, reg, reg_fleet), (VehicleClass::Special, spe, spe_fleet)] {
            let mut parts = vec![Vec::new(); fleet];
            for v in items {
                parts[rng.gen_range(0..fleet)].push(v);
            }
            for p in parts {
                routes.push(close(&inst, class, &p));
            }
        }
        // order by window start to raise the hit rate
        for r in routes.iter_mut() {
            if r.class == VehicleClass::Regular && rng.gen_bool(0.8) {
                let n = r.path.len();
                r.path[1..n - 1].sort_by(|&a, &b| {
                    let wa = inst.vertex(a).window.unwrap().0;
                    let wb = inst.vertex(b).window.unwrap().0;
                    wa.partial_cmp(&wb).unwrap()
                });
            }
        }
        if lp_feasible(&inst, &routes) {
            return Some((inst, routes));
        }
    }
    None
}

fn route_cost(inst: &Instance<f64>, r: &Route) -> f64 {
    r.path.windows(2).map(|w| inst.travel(w[0], w[1])).sum()
}

fn capacity_ok(inst: &Instance<f64>, r: &Route) -> bool {
    r.class == VehicleClass::Special || r.path.iter().map(|&v| inst.demand(v)).sum::<f64>() <= inst.capacity() + 1e-9
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Every split of a permutation into `k` consecutive, possibly empty, pieces.
fn splits(perm: &[usize], k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 1 {
        return vec![vec![perm.to_vec()]];
    }
    let mut out = Vec::new();
    for cut in 0..=perm.len() {
        for mut rest in splits(&perm[cut..], k - 1) {
            rest.insert(0, perm[..cut].to_vec());
            out.push(rest);
        }
    }
    out
}

/// Optimum by listing every permutation and cut of the regular and special
/// items, with LP feasibility on each candidate. Exponential; only for a
/// handful of customers.
pub fn brute_force(inst: &Instance<f64>) -> Option<f64> {
    let reg_items: Vec<usize> = inst
        .requests()
        .iter()
        .map(|&c| if inst.is_special(c) { inst.copy_of(c) } else { c })
        .collect();
    let spe_items: Vec<usize> = inst.requests().iter().copied().filter(|&c| inst.is_special(c)).collect();
    let reg_fleet = inst.fleet(VehicleClass::Regular);
    let spe_fleet = inst.fleet(VehicleClass::Special);
    let mut spe_options: Vec<(f64, Vec<Route>)> = Vec::new();
    for perm in permutations(&spe_items) {
        for split in splits(&perm, spe_fleet.max(1)) {
            if spe_fleet == 0 && !perm.is_empty() {
                continue;
            }
            let routes: Vec<Route> = split.iter().map(|p| close(inst, VehicleClass::Special, p)).collect();
            let cost = routes.iter().map(|r| route_cost(inst, r)).sum();
            spe_options.push((cost, routes));
        }
    }
    spe_options.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best: Option<f64> = None;
    for perm in permutations(&reg_items) {
        for split in splits(&perm, reg_fleet.max(1)) {
            let reg: Vec<Route> = split.iter().map(|p| close(inst, VehicleClass::Regular, p)).collect();
            if !reg.iter().all(|r| capacity_ok(inst, r)) {
                continue;
            }
            let reg_cost: f64 = reg.iter().map(|r| route_cost(inst, r)).sum();
            if best.is_some_and(|b| reg_cost >= b) {
                continue;
            }
            if !lp_feasible(inst, &reg) {
                continue;
            }
            for (spe_cost, spe) in &spe_options {
                let total = reg_cost + spe_cost;
                if best.is_some_and(|b| total >= b - 1e-9) {
                    break;
                }
                let mut all = reg.clone();
                all.extend(spe.iter().cloned());
                if lp_feasible(inst, &all) {
                    best = Some(total);
                    break;
                }
            }
        }
    }
    best
}
