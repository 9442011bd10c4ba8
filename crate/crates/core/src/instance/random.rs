//! Seeded generator for small synthetic instances (exact-oracle scale).

use rand::Rng;

use super::{Instance, InstanceBuilder, InstanceError};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RandomParams {
    pub customers: usize,
    pub specials: usize,
    pub regular_fleet: usize,
    pub special_fleet: usize,
    pub capacity: f64,
    /// Depot due time.
    pub horizon: f64,
    /// Side of the square customers are placed in.
    pub extent: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            customers: 6,
            specials: 2,
            regular_fleet: 3,
            special_fleet: 2,
            capacity: 30.0,
            horizon: 240.0,
            extent: 50.0,
            alpha: 0.0,
            beta: 10.0,
        }
    }
}

/// Integer coordinates, demands and windows; the first `specials` customers
/// are special.
pub fn random_instance<S: Scalar, R: Rng>(rng: &mut R, p: &RandomParams) -> Result<Instance<S>, InstanceError> {
    if p.specials > p.customers {
        return Err(InstanceError::InvalidArgument("more specials than customers".into()));
    }
    let depot = (p.extent / 2.0).round();
    let mut b = InstanceBuilder::new(
        format!("rand-{}-{}", p.customers, p.specials),
        (S::of(depot), S::of(depot)),
        (S::zero(), S::of(p.horizon)),
    )
    .capacity(S::of(p.capacity))
    .fleets(p.regular_fleet, p.special_fleet);
    let extent = p.extent.max(1.0) as i64;
    for k in 0..p.customers {
        let x = rng.gen_range(0..=extent) as f64;
        let y = rng.gen_range(0..=extent) as f64;
        let d0 = ((x - depot).powi(2) + (y - depot).powi(2)).sqrt();
        let demand = rng.gen_range(1..=10) as f64;
        let service = rng.gen_range(0..=10) as f64;
        let latest_start = (p.horizon - d0 - service).floor().max(d0.ceil());
        let ready = rng.gen_range(0.0..=(latest_start * 0.7)).floor().max(0.0);
        let width = rng.gen_range(20.0..=(p.horizon / 2.0).max(21.0)).floor();
        let due = (ready + width).min(latest_start).max(d0.ceil());
        let ready = ready.min(due);
        let w = (S::of(ready), S::of(due));
        b = if k < p.specials {
            b.special(S::of(x), S::of(y), S::of(demand), S::of(service), w, (S::of(p.alpha), S::of(p.beta)))
        } else {
            b.regular(S::of(x), S::of(y), S::of(demand), S::of(service), w)
        };
    }
    b.build()
}
