//! Random, related and worst removal. A special customer and its copy are
//! removed together and count as one request.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::scalar::Scalar;
use crate::solution::{insertion_cost, Route, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalRequest {
    pub count: usize,
    pub p_related: f64,
    pub p_worst: f64,
    /// Weights of start time, distance, demand and type in the relatedness.
    pub lambda: [f64; 4],
}

impl RemovalRequest {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            p_related: 6.0,
            p_worst: 3.0,
            lambda: [4.0, 2.0, 1.0, 4.0],
        }
    }
}

/// Inclusive range of requests removed per destroy step for an instance
/// with `requests` requests: 4 to min(40, 0.4 n), shrunk to fit tiny instances.
pub fn nb_remove_range(requests: usize) -> (usize, usize) {
    let lower = requests.min(4);
    let upper = lower.max(40.min(requests * 2 / 5));
    (lower, upper)
}

fn rank_pick<R: Rng>(len: usize, p: f64, rng: &mut R) -> usize {
    let y: f64 = rng.gen();
    ((y.powf(p) * len as f64).floor() as usize).min(len - 1)
}

/// Relatedness data of one complete solution.
#[derive(Debug, Clone)]
pub struct Relatedness<S> {
    tau: Vec<S>,
    max_time: S,
    lambda: [S; 4],
}

impl<S: Scalar> Relatedness<S> {
    pub fn new(inst: &Instance<S>, sol: &Solution<S>, lambda: [f64; 4]) -> Self {
        let mut tau = vec![S::zero(); inst.len()];
        for (r, t) in sol.routes.iter().zip(&sol.schedule) {
            for (&v, &x) in r.path.iter().zip(t) {
                tau[v] = x;
            }
        }
        let max_time = inst.requests().iter().map(|&c| tau[c]).fold(S::zero(), S::max);
        Self {
            tau,
            max_time,
            lambda: lambda.map(S::of),
        }
    }

    pub fn start(&self, v: usize) -> S {
        self.tau[v]
    }

    /// Lower means more related.
    pub fn get(&self, inst: &Instance<S>, i: usize, j: usize) -> S {
        relatedness(inst, self.lambda, (self.tau[i], self.tau[j]), self.max_time, i, j)
    }
}

fn ratio<S: Scalar>(x: S, max: S) -> S {
    if max > S::zero() {
        x / max
    } else {
        S::zero()
    }
}

/// Weighted sum of normalized differences in start time, position, demand
/// and type between requests `i` and `j`.
pub fn relatedness<S: Scalar>(inst: &Instance<S>, lambda: [S; 4], tau: (S, S), max_time: S, i: usize, j: usize) -> S {
    let time = ratio((tau.0 - tau.1).abs(), max_time);
    let dist = ratio(inst.travel(i, j), inst.max_customer_distance());
    let dem = ratio((inst.demand(i) - inst.demand(j)).abs(), inst.max_demand());
    let kind = if inst.is_special(i) == inst.is_special(j) { S::zero() } else { S::one() };
    lambda[0] * time + lambda[1] * dist + lambda[2] * dem + lambda[3] * kind
}

pub fn remove_random<R: Rng>(requests: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    let n = count.min(requests.len());
    requests.choose_multiple(rng, n).copied().collect()
}

pub fn remove_related<S: Scalar, R: Rng>(
    inst: &Instance<S>,
    rel: &Relatedness<S>,
    requests: &[usize],
    req: &RemovalRequest,
    rng: &mut R,
) -> Vec<usize> {
    let n = req.count.min(requests.len());
    if n == 0 {
        return Vec::new();
    }
    let mut left = requests.to_vec();
    let first = left.remove(rng.gen_range(0..left.len()));
    let mut removed = vec![first];
    while removed.len() < n {
        let anchor = removed[rng.gen_range(0..removed.len())];
        let mut scored: Vec<(S, usize)> = left.iter().enumerate().map(|(k, &c)| (rel.get(inst, anchor, c), k)).collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite relatedness").then(a.1.cmp(&b.1)));
        let pick = scored[rank_pick(scored.len(), req.p_related, rng)].1;
        removed.push(left.remove(pick));
    }
    removed
}

/// Cost saved by taking request `c` (and its copy) out of the routes.
pub fn removal_gain<S: Scalar>(inst: &Instance<S>, routes: &[Route], c: usize) -> S {
    let mut vs = vec![c];
    if inst.is_special(c) {
        vs.push(inst.copy_of(c));
    }
    let mut gain = S::zero();
    for v in vs {
        for r in routes {
            if let Some(k) = r.path.iter().position(|&x| x == v) {
                gain += insertion_cost(inst, r.path[k - 1], v, r.path[k + 1]);
            }
        }
    }
    gain
}

pub fn remove_worst<S: Scalar, R: Rng>(
    inst: &Instance<S>,
    routes: &[Route],
    requests: &[usize],
    req: &RemovalRequest,
    rng: &mut R,
) -> Vec<usize> {
    let n = req.count.min(requests.len());
    let mut routes = routes.to_vec();
    let mut left = requests.to_vec();
    let mut removed = Vec::with_capacity(n);
    while removed.len() < n {
        let mut scored: Vec<(S, usize)> =
            left.iter().enumerate().map(|(k, &c)| (removal_gain(inst, &routes, c), k)).collect();
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite costs").then(a.1.cmp(&b.1)));
        let pick = scored[rank_pick(scored.len(), req.p_worst, rng)].1;
        let c = left.remove(pick);
        let mut vs = vec![c];
        if inst.is_special(c) {
            vs.push(inst.copy_of(c));
        }
        for r in &mut routes {
            r.path.retain(|x| !vs.contains(x));
        }
        removed.push(c);
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{InstanceBuilder, VehicleClass};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst() -> Instance<f64> {
        InstanceBuilder::new("rm", (0.0, 0.0), (0.0, 1000.0))
            .fleets(2, 1)
            .capacity(100.0)
            .regular(5.0, 0.0, 3.0, 0.0, (0.0, 1000.0))
            .regular(10.0, 0.0, 4.0, 0.0, (0.0, 1000.0))
            .regular(5.0, 5.0, 9.0, 0.0, (0.0, 1000.0))
            .special(0.0, 8.0, 2.0, 0.0, (0.0, 1000.0), (0.0, 10.0))
            .build()
            .unwrap()
    }

    fn sol(inst: &Instance<f64>) -> Solution<f64> {
        Solution::from_routes(
            inst,
            vec![
                Route {
                    class: VehicleClass::Regular,
                    path: vec![0, 4, 5, 6, 1],
                },
                Route {
                    class: VehicleClass::Regular,
                    path: vec![0, 8, 1],
                },
                Route {
                    class: VehicleClass::Special,
                    path: vec![2, 7, 3],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn removal_range() {
        assert_eq!(nb_remove_range(25), (4, 10));
        assert_eq!(nb_remove_range(100), (4, 40));
        assert_eq!(nb_remove_range(200), (4, 40));
        assert_eq!(nb_remove_range(6), (4, 4));
        assert_eq!(nb_remove_range(3), (3, 3));
    }

    #[test]
    fn rank_zero_when_y_small() {
        struct Zero;
        impl rand::RngCore for Zero {
            fn next_u32(&mut self) -> u32 {
                0
            }
            fn next_u64(&mut self) -> u64 {
                0
            }
            fn fill_bytes(&mut self, d: &mut [u8]) {
                d.fill(0)
            }
            fn try_fill_bytes(&mut self, d: &mut [u8]) -> Result<(), rand::Error> {
                d.fill(0);
                Ok(())
            }
        }
        assert_eq!(rank_pick(10, 6.0, &mut Zero), 0);
        // most expensive first: the lone special has the largest detour
        let inst = inst();
        let s = sol(&inst);
        let mut req = RemovalRequest::new(1);
        req.p_worst = 3.0;
        let picked = remove_worst(&inst, &s.routes, inst.requests(), &req, &mut Zero);
        assert_eq!(picked, vec![7]);
    }

    #[test]
    fn self_relatedness_is_zero_and_symmetric() {
        let inst = inst();
        let s = sol(&inst);
        let rel = Relatedness::new(&inst, &s, [4.0, 2.0, 1.0, 4.0]);
        for &i in inst.requests() {
            assert_eq!(rel.get(&inst, i, i), 0.0);
            for &j in inst.requests() {
                assert_eq!(rel.get(&inst, i, j), rel.get(&inst, j, i));
                assert!(rel.get(&inst, i, j) <= 11.0);
            }
        }
    }

    #[test]
    fn gain_of_collinear_detour() {
        let inst = inst();
        let s = sol(&inst);
        // 4(5,0) -> 5(10,0) -> 6(5,5): 5 + sqrt(50) - 5
        let expect = 50f64.sqrt();
        assert!((removal_gain(&inst, &s.routes, 5) - expect).abs() < 1e-12);
        // special: both detours
        let g = removal_gain(&inst, &s.routes, 7);
        assert!((g - 32.0).abs() < 1e-12);
    }

    #[test]
    fn exact_counts_without_duplicates() {
        let inst = inst();
        let s = sol(&inst);
        let rel = Relatedness::new(&inst, &s, [4.0, 2.0, 1.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for count in 0..=5 {
            let req = RemovalRequest::new(count);
            for out in [
                remove_random(inst.requests(), count, &mut rng),
                remove_related(&inst, &rel, inst.requests(), &req, &mut rng),
                remove_worst(&inst, &s.routes, inst.requests(), &req, &mut rng),
            ] {
                assert_eq!(out.len(), count.min(4));
                let mut u = out.clone();
                u.sort();
                u.dedup();
                assert_eq!(u.len(), out.len());
                assert!(out.iter().all(|c| inst.requests().contains(c)));
            }
        }
    }
}
