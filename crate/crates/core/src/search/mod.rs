//! Adaptive large neighborhood search with simulated-annealing acceptance.

mod bank;
mod config;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::neighborhood::{
    nb_remove_range, regret_insert, remove_random, remove_related, remove_worst, InsertionOutcome, RegretOptions,
    Relatedness, RemovalRequest, RoutingState,
};
use crate::scalar::Scalar;
use crate::solution::{Route, Solution};

pub use bank::OperatorBank;
pub use config::{ConfigError, SearchConfig};

pub const REMOVAL_OPS: [&str; 3] = ["random", "related", "worst"];
pub const INSERTION_OPS: [&str; 3] = ["regret-1", "regret-2", "regret-3"];
const NOISE_OPS: [&str; 2] = ["noise", "plain"];

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("no initial solution: {} requests could not be inserted", stranded.len())]
    NoInitialSolution { stranded: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    NewBest,
    Improved,
    Accepted,
    Rejected,
    RepairFailed,
}

/// One line of the search trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub removal: String,
    pub insertion: String,
    pub noise: bool,
    pub removed: usize,
    pub outcome: Outcome,
    /// Cost of the repaired solution; absent when repair failed.
    pub candidate: Option<f64>,
    pub current: f64,
    pub best: f64,
}

pub fn write_trace<W: Write>(out: &mut W, trace: &[TraceRecord]) -> io::Result<()> {
    for r in trace {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Hooks called while the search runs.
pub trait Observer<S> {
    fn iteration(&mut self, _record: &TraceRecord) {}
    /// Called with the initial solution and with every new best solution.
    fn incumbent(&mut self, _solution: &Solution<S>) {}
}

impl<S> Observer<S> for () {}

#[derive(Debug, Clone)]
pub struct SearchResult<S> {
    pub initial: Solution<S>,
    pub best: Solution<S>,
    pub trace: Vec<TraceRecord>,
    pub insertion_stats: InsertionOutcome,
    pub removal_weights: Vec<f64>,
    pub insertion_weights: Vec<f64>,
}

fn filtered(routes: &[Route], drop: &[usize]) -> Vec<Route> {
    routes
        .iter()
        .map(|r| Route {
            class: r.class,
            path: r.path.iter().copied().filter(|v| !drop.contains(v)).collect(),
        })
        .collect()
}

fn fingerprint(routes: &[Route]) -> u64 {
    let mut paths: Vec<&Vec<usize>> = routes.iter().filter(|r| !r.is_empty()).map(|r| &r.path).collect();
    paths.sort();
    let mut h = DefaultHasher::new();
    paths.hash(&mut h);
    h.finish()
}

/// Regret-2 construction from empty routes. Later attempts shuffle the
/// request order, cycle through k = 1..3 and add growing cost noise.
pub fn initial_solution<S: Scalar, R: Rng>(
    inst: &Instance<S>,
    cfg: &SearchConfig,
    rng: &mut R,
    stats: &mut InsertionOutcome,
) -> Result<Solution<S>, SearchError> {
    let mut order = inst.requests().to_vec();
    let mut stranded = Vec::new();
    for attempt in 0..=cfg.initial_retries {
        let mut opts = RegretOptions::plain(2);
        opts.regular_check = cfg.regular_check;
        if attempt > 0 {
            order.shuffle(rng);
            opts.k = 1 + attempt as usize % 3;
            let scale = (attempt as f64 / cfg.initial_retries.max(1) as f64).max(cfg.noise);
            opts.noise = S::of(scale) * inst.max_distance();
        }
        let mut state = RoutingState::empty(inst);
        let mut pending = order.clone();
        match regret_insert(&mut state, &mut pending, &opts, stats, rng) {
            Ok(()) => {
                if let Ok(sol) = state.to_solution() {
                    return Ok(sol);
                }
            }
            Err(s) => stranded = s,
        }
    }
    Err(SearchError::NoInitialSolution { stranded })
}

pub fn run<S: Scalar>(inst: &Instance<S>, cfg: &SearchConfig) -> Result<SearchResult<S>, SearchError> {
    run_observed(inst, cfg, &mut ())
}

pub fn run_observed<S: Scalar, O: Observer<S>>(
    inst: &Instance<S>,
    cfg: &SearchConfig,
    observer: &mut O,
) -> Result<SearchResult<S>, SearchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stats = InsertionOutcome::default();
    let initial = initial_solution(inst, cfg, &mut rng, &mut stats)?;
    observer.incumbent(&initial);

    let mut removal = OperatorBank::new(&REMOVAL_OPS, cfg.reaction, cfg.weight_floor);
    let mut insertion = OperatorBank::new(&INSERTION_OPS, cfg.reaction, cfg.weight_floor);
    let mut noise_bank = OperatorBank::new(&NOISE_OPS, cfg.reaction, cfg.weight_floor);

    let requests = inst.requests().to_vec();
    let (auto_lo, auto_hi) = nb_remove_range(requests.len());
    let lo = cfg.remove_min.unwrap_or(auto_lo).min(requests.len());
    let hi = cfg.remove_max.unwrap_or(auto_hi).min(requests.len()).max(lo);
    let noise_width = S::of(cfg.noise) * inst.max_distance();
    let mut temperature = if cfg.start_temperature > 0.0 {
        -cfg.start_temperature * initial.cost.as_f64() / 0.5f64.ln()
    } else {
        0.0
    };

    let mut current = initial.clone();
    let mut best = initial.clone();
    let mut relatedness = Relatedness::new(inst, &current, cfg.lambda);
    let mut visited = HashSet::new();
    visited.insert(fingerprint(&current.routes));
    let mut trace = Vec::with_capacity(cfg.iterations as usize);

    for it in 0..cfg.iterations {
        let count = if hi > 0 { rng.gen_range(lo..=hi) } else { 0 };
        let ro = removal.select(&mut rng);
        let io = insertion.select(&mut rng);
        let no = noise_bank.select(&mut rng);
        let req = RemovalRequest {
            count,
            p_related: cfg.p_related,
            p_worst: cfg.p_worst,
            lambda: cfg.lambda,
        };
        let removed = match ro {
            0 => remove_random(&requests, count, &mut rng),
            1 => remove_related(inst, &relatedness, &requests, &req, &mut rng),
            _ => remove_worst(inst, &current.routes, &requests, &req, &mut rng),
        };
        let mut drop = removed.clone();
        drop.extend(removed.iter().filter(|&&c| inst.is_special(c)).map(|&c| inst.copy_of(c)));

        let opts = RegretOptions {
            k: io + 1,
            noise: if no == 0 { noise_width } else { S::zero() },
            regular_check: cfg.regular_check,
        };
        let candidate = RoutingState::new(inst, &filtered(&current.routes, &drop))
            .ok()
            .and_then(|mut state| {
                let mut pending = removed.clone();
                regret_insert(&mut state, &mut pending, &opts, &mut stats, &mut rng).ok()?;
                state.to_solution().ok()
            });

        let (outcome, cand_cost) = match candidate {
            None => (Outcome::RepairFailed, None),
            Some(cand) => {
                let c = cand.cost;
                let fresh = visited.insert(fingerprint(&cand.routes));
                let accept = if c < current.cost {
                    true
                } else if temperature > 0.0 {
                    let p = (-(c - current.cost).as_f64() / temperature).exp();
                    rng.gen::<f64>() < p
                } else {
                    false
                };
                let outcome = if c < best.cost {
                    Outcome::NewBest
                } else if !accept {
                    Outcome::Rejected
                } else if c < current.cost {
                    Outcome::Improved
                } else {
                    Outcome::Accepted
                };
                let score = match outcome {
                    Outcome::NewBest => cfg.scores[0],
                    Outcome::Improved if fresh => cfg.scores[1],
                    Outcome::Accepted if fresh => cfg.scores[2],
                    _ => 0.0,
                };
                if accept {
                    if outcome == Outcome::NewBest {
                        best = cand.clone();
                        observer.incumbent(&best);
                    }
                    current = cand;
                    relatedness = Relatedness::new(inst, &current, cfg.lambda);
                }
                removal.record(ro, score);
                insertion.record(io, score);
                noise_bank.record(no, score);
                (outcome, Some(c.as_f64()))
            }
        };
        if outcome == Outcome::RepairFailed {
            removal.record(ro, 0.0);
            insertion.record(io, 0.0);
            noise_bank.record(no, 0.0);
        }

        let record = TraceRecord {
            iteration: it + 1,
            removal: REMOVAL_OPS[ro].to_string(),
            insertion: INSERTION_OPS[io].to_string(),
            noise: no == 0,
            removed: removed.len(),
            outcome,
            candidate: cand_cost,
            current: current.cost.as_f64(),
            best: best.cost.as_f64(),
        };
        observer.iteration(&record);
        trace.push(record);

        temperature *= cfg.cooling;
        if (it + 1) % cfg.segment == 0 {
            removal.update();
            insertion.update();
            noise_bank.update();
        }
    }

    Ok(SearchResult {
        initial,
        best,
        trace,
        insertion_stats: stats,
        removal_weights: removal.weights().to_vec(),
        insertion_weights: insertion.weights().to_vec(),
    })
}
