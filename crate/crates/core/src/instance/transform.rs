use super::{Instance, InstanceBuilder, InstanceError, Provenance, RawVrptw, SyncSlack};
use crate::scalar::Scalar;

/// Settings for turning a VRPTW file into a synchronized instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformOptions {
    /// Fraction of customers that become special, in (0, 1].
    pub ns: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Keep only the first `n` customers of the file.
    pub customers: Option<usize>,
    /// Defaults to the vehicle count of the file header.
    pub regular_fleet: Option<usize>,
    /// Defaults to the regular fleet size.
    pub special_fleet: Option<usize>,
    /// Truncate travel times to one decimal.
    pub truncate_distances: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            ns: 0.05,
            alpha: 0.0,
            beta: 10.0,
            customers: None,
            regular_fleet: None,
            special_fleet: None,
            truncate_distances: false,
        }
    }
}

impl TransformOptions {
    pub fn with_ns(ns: f64) -> Self {
        Self {
            ns,
            ..Self::default()
        }
    }
}

/// 1-based customer positions that become special: customer 1, then every
/// `floor(1/ns)`-th customer until `ceil(ns * n)` are chosen.
pub fn special_positions(n: usize, ns: f64) -> Result<Vec<usize>, InstanceError> {
    if !(ns > 0.0 && ns <= 1.0) {
        return Err(InstanceError::InvalidArgument(format!("ns must lie in (0, 1], got {ns}")));
    }
    // Guard against products such as 0.05 * 100 landing a hair above an integer.
    let count = (ns * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let step = (1.0 / ns + 1e-9).floor() as usize;
    let positions: Vec<usize> = (0..count).map(|k| 1 + k * step).collect();
    if count > n || positions.last().is_some_and(|&p| p > n) {
        return Err(InstanceError::InvalidArgument(format!(
            "ns = {ns} selects more special customers than the {n} available"
        )));
    }
    Ok(positions)
}

pub fn transform<S: Scalar>(raw: &RawVrptw, opts: &TransformOptions) -> Result<Instance<S>, InstanceError> {
    if opts.alpha < 0.0 || opts.beta < 0.0 {
        return Err(InstanceError::InvalidArgument("alpha and beta must be non-negative".into()));
    }
    let raw = match opts.customers {
        Some(n) if n > raw.customers.len() => {
            return Err(InstanceError::InvalidArgument(format!(
                "{n} customers requested but {} has only {}",
                raw.name,
                raw.customers.len()
            )))
        }
        Some(n) => raw.truncated(n),
        None => raw.clone(),
    };
    let n = raw.customers.len();
    let positions = special_positions(n, opts.ns)?;
    let regular_fleet = opts.regular_fleet.unwrap_or(raw.vehicles);
    let special_fleet = opts.special_fleet.unwrap_or(regular_fleet);

    let d = &raw.depot;
    let mut builder = InstanceBuilder::new(
        format!("{}-{}-{}", raw.name, n, positions.len()),
        (S::of(d.x), S::of(d.y)),
        (S::of(d.ready), S::of(d.due)),
    )
    .capacity(S::of(raw.capacity))
    .fleets(regular_fleet, special_fleet)
    .truncate_distances(opts.truncate_distances)
    .provenance(Provenance {
        source: raw.name.clone(),
        ns: opts.ns,
        alpha: opts.alpha,
        beta: opts.beta,
        customers: n,
    });
    let mut special = positions.iter().peekable();
    for (k, c) in raw.customers.iter().enumerate() {
        let sync = if special.peek() == Some(&&(k + 1)) {
            special.next();
            Some(SyncSlack {
                alpha: S::of(opts.alpha),
                beta: S::of(opts.beta),
            })
        } else {
            None
        };
        builder = builder.customer(super::CustomerSpec {
            x: S::of(c.x),
            y: S::of(c.y),
            demand: S::of(c.demand),
            service: S::of(c.service),
            ready: S::of(c.ready),
            due: S::of(c.due),
            sync,
            source_id: c.id,
        });
    }
    builder.build()
}
