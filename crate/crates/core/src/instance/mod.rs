//! Immutable problem data: vertices, fleets and travel matrices.
//!
//! Vertex indices are fixed by construction: the four depot vertices come
//! first (regular start, regular end, special start, special end), followed
//! by the customers in source order, followed by the regular-route copies of
//! the special customers.

mod format;
pub mod random;
mod solomon;
mod transform;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use format::{read_instance, write_instance, InstanceFile};
pub use solomon::{parse_vrptw, RawRow, RawVrptw};
pub use transform::{transform, TransformOptions};

pub const DEPOT_START_REGULAR: usize = 0;
pub const DEPOT_END_REGULAR: usize = 1;
pub const DEPOT_START_SPECIAL: usize = 2;
pub const DEPOT_END_SPECIAL: usize = 3;
pub const FIRST_CUSTOMER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleClass {
    Regular,
    Special,
}

impl VehicleClass {
    pub const ALL: [VehicleClass; 2] = [VehicleClass::Regular, VehicleClass::Special];

    pub fn name(self) -> &'static str {
        match self {
            VehicleClass::Regular => "regular",
            VehicleClass::Special => "special",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    DepotStartRegular,
    DepotEndRegular,
    DepotStartSpecial,
    DepotEndSpecial,
    RegularCustomer,
    SpecialCopy,
    SpecialCustomer,
}

impl VertexKind {
    pub fn is_depot(self) -> bool {
        matches!(
            self,
            VertexKind::DepotStartRegular
                | VertexKind::DepotEndRegular
                | VertexKind::DepotStartSpecial
                | VertexKind::DepotEndSpecial
        )
    }
}

/// Allowed offset of a special visit relative to its regular copy:
/// `copy - alpha <= special <= copy + beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncSlack<S> {
    pub alpha: S,
    pub beta: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<S> {
    pub id: usize,
    pub kind: VertexKind,
    pub x: S,
    pub y: S,
    pub demand: S,
    pub service_regular: S,
    pub service_special: S,
    pub window: Option<(S, S)>,
    /// Regular copy of a special customer.
    pub mirror: Option<usize>,
    pub sync: Option<SyncSlack<S>>,
    /// Customer number in the source benchmark file.
    pub source_id: usize,
}

impl<S: Scalar> Vertex<S> {
    pub fn service(&self, class: VehicleClass) -> S {
        match class {
            VehicleClass::Regular => self.service_regular,
            VehicleClass::Special => self.service_special,
        }
    }
}

/// How an instance was derived from a benchmark file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub ns: f64,
    pub alpha: f64,
    pub beta: f64,
    pub customers: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("vertex {vertex}: {message}")]
    Invariant { vertex: usize, message: String },
    #[error("instance file: {0}")]
    Format(String),
}

#[derive(Debug, Clone)]
pub struct Instance<S> {
    name: String,
    vertices: Vec<Vertex<S>>,
    regular_fleet: usize,
    special_fleet: usize,
    capacity: S,
    truncate_distances: bool,
    provenance: Option<Provenance>,
    travel: Vec<S>,
    requests: Vec<usize>,
    copy_owner: Vec<Option<usize>>,
    max_customer_distance: S,
    max_demand: S,
}

impl<S: Scalar> Instance<S> {
    /// Assembles an instance from an explicit vertex table, checking every
    /// structural invariant and computing the travel matrix.
    pub fn from_parts(
        name: impl Into<String>,
        vertices: Vec<Vertex<S>>,
        regular_fleet: usize,
        special_fleet: usize,
        capacity: S,
        truncate_distances: bool,
        provenance: Option<Provenance>,
    ) -> Result<Self, InstanceError> {
        let fail = |vertex: usize, message: &str| InstanceError::Invariant {
            vertex,
            message: message.to_string(),
        };
        let depot_kinds = [
            VertexKind::DepotStartRegular,
            VertexKind::DepotEndRegular,
            VertexKind::DepotStartSpecial,
            VertexKind::DepotEndSpecial,
        ];
        if vertices.len() < FIRST_CUSTOMER {
            return Err(InstanceError::Format("fewer than four depot vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(fail(i, "vertex ids must be consecutive from 0"));
            }
            if i < FIRST_CUSTOMER {
                if v.kind != depot_kinds[i] {
                    return Err(fail(i, "depot vertices must occupy ids 0..4 in canonical order"));
                }
                if v.service_regular != S::zero() || v.service_special != S::zero() {
                    return Err(fail(i, "depot service time must be zero"));
                }
            } else if v.kind.is_depot() {
                return Err(fail(i, "depot kind outside the depot block"));
            }
            if let Some((l, u)) = v.window {
                if l > u {
                    return Err(fail(i, "window lower bound exceeds upper bound"));
                }
            }
            if v.kind == VertexKind::SpecialCustomer {
                if v.window.is_some() {
                    return Err(fail(i, "special customers carry no own window"));
                }
                if v.sync.is_none() {
                    return Err(fail(i, "special customer without sync slack"));
                }
            }
            if v.demand < S::zero() {
                return Err(fail(i, "negative demand"));
            }
        }
        let depot = &vertices[DEPOT_START_REGULAR];
        for d in 1..FIRST_CUSTOMER {
            if vertices[d].x != depot.x || vertices[d].y != depot.y {
                return Err(fail(d, "depot copies must share the depot location"));
            }
        }
        let mut copy_owner = vec![None; vertices.len()];
        for v in &vertices {
            match (v.kind, v.mirror) {
                (VertexKind::SpecialCustomer, Some(m)) => {
                    let copy = vertices.get(m).ok_or_else(|| fail(v.id, "mirror out of range"))?;
                    if copy.kind != VertexKind::SpecialCopy {
                        return Err(fail(v.id, "mirror must be a special copy"));
                    }
                    if copy.x != v.x || copy.y != v.y {
                        return Err(fail(v.id, "mirror must share the customer location"));
                    }
                    if copy_owner[m].is_some() {
                        return Err(fail(m, "copy mirrored by two special customers"));
                    }
                    copy_owner[m] = Some(v.id);
                }
                (VertexKind::SpecialCustomer, None) => {
                    return Err(fail(v.id, "special customer without mirror"))
                }
                (_, Some(_)) => return Err(fail(v.id, "only special customers have a mirror")),
                _ => {}
            }
        }
        for v in &vertices {
            if v.kind == VertexKind::SpecialCopy && copy_owner[v.id].is_none() {
                return Err(fail(v.id, "orphan special copy"));
            }
        }
        if regular_fleet == 0 {
            return Err(InstanceError::InvalidArgument("regular fleet must be non-empty".into()));
        }
        let has_special = vertices.iter().any(|v| v.kind == VertexKind::SpecialCustomer);
        if has_special && special_fleet == 0 {
            return Err(InstanceError::InvalidArgument(
                "special customers present but no special vehicle".into(),
            ));
        }

        let n = vertices.len();
        let mut travel = vec![S::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = vertices[i].x - vertices[j].x;
                let dy = vertices[i].y - vertices[j].y;
                let mut d = (dx * dx + dy * dy).sqrt();
                if truncate_distances {
                    let ten = S::of(10.0);
                    d = (d * ten).floor() / ten;
                }
                travel[i * n + j] = d;
                travel[j * n + i] = d;
            }
        }
        let requests: Vec<usize> = vertices
            .iter()
            .filter(|v| matches!(v.kind, VertexKind::RegularCustomer | VertexKind::SpecialCustomer))
            .map(|v| v.id)
            .collect();
        let mut max_customer_distance = S::zero();
        for &a in &requests {
            for &b in &requests {
                max_customer_distance = max_customer_distance.max(travel[a * n + b]);
            }
        }
        let max_demand = requests
            .iter()
            .map(|&r| vertices[r].demand)
            .fold(S::zero(), S::max);

        Ok(Self {
            name: name.into(),
            vertices,
            regular_fleet,
            special_fleet,
            capacity,
            truncate_distances,
            provenance,
            travel,
            requests,
            copy_owner,
            max_customer_distance,
            max_demand,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn truncates_distances(&self) -> bool {
        self.truncate_distances
    }

    pub fn vertices(&self) -> &[Vertex<S>] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> &Vertex<S> {
        &self.vertices[i]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn capacity(&self) -> S {
        self.capacity
    }

    pub fn fleet(&self, class: VehicleClass) -> usize {
        match class {
            VehicleClass::Regular => self.regular_fleet,
            VehicleClass::Special => self.special_fleet,
        }
    }

    pub fn start_depot(&self, class: VehicleClass) -> usize {
        match class {
            VehicleClass::Regular => DEPOT_START_REGULAR,
            VehicleClass::Special => DEPOT_START_SPECIAL,
        }
    }

    pub fn end_depot(&self, class: VehicleClass) -> usize {
        match class {
            VehicleClass::Regular => DEPOT_END_REGULAR,
            VehicleClass::Special => DEPOT_END_SPECIAL,
        }
    }

    /// Customers to be served: regular customers and special customers (not
    /// their copies), in source order.
    pub fn requests(&self) -> &[usize] {
        &self.requests
    }

    pub fn customer_count(&self) -> usize {
        self.requests.len()
    }

    pub fn special_count(&self) -> usize {
        self.requests.iter().filter(|&&r| self.is_special(r)).count()
    }

    #[inline]
    pub fn is_special(&self, v: usize) -> bool {
        self.vertices[v].kind == VertexKind::SpecialCustomer
    }

    /// Regular copy of special customer `v`.
    #[inline]
    pub fn copy_of(&self, v: usize) -> usize {
        self.vertices[v].mirror.expect("special customer has a mirror")
    }

    /// Special customer owning regular copy `v`.
    #[inline]
    pub fn owner_of(&self, v: usize) -> Option<usize> {
        self.copy_owner[v]
    }

    /// Whether vertex `v` belongs to the vertex set routed by class `class`
    /// (V1+ for regular vehicles, V2+ for special ones).
    pub fn in_domain(&self, class: VehicleClass, v: usize) -> bool {
        let Some(vx) = self.vertices.get(v) else {
            return false;
        };
        match class {
            VehicleClass::Regular => matches!(
                vx.kind,
                VertexKind::DepotStartRegular
                    | VertexKind::DepotEndRegular
                    | VertexKind::RegularCustomer
                    | VertexKind::SpecialCopy
            ),
            VehicleClass::Special => matches!(
                vx.kind,
                VertexKind::DepotStartSpecial
                    | VertexKind::DepotEndSpecial
                    | VertexKind::SpecialCustomer
            ),
        }
    }

    /// Travel time (equal to travel cost) between `i` and `j` for a vehicle of
    /// class `class`. Panics if either vertex is outside the class's domain.
    pub fn distance(&self, class: VehicleClass, i: usize, j: usize) -> S {
        assert!(
            self.in_domain(class, i) && self.in_domain(class, j),
            "vertices ({i}, {j}) outside the {} travel matrix",
            class.name()
        );
        self.travel(i, j)
    }

    /// Unchecked travel lookup for the hot path.
    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> S {
        self.travel[i * self.vertices.len() + j]
    }

    #[inline]
    pub fn service(&self, class: VehicleClass, v: usize) -> S {
        self.vertices[v].service(class)
    }

    #[inline]
    pub fn demand(&self, v: usize) -> S {
        self.vertices[v].demand
    }

    pub fn max_customer_distance(&self) -> S {
        self.max_customer_distance
    }

    pub fn max_demand(&self) -> S {
        self.max_demand
    }

    /// Largest travel time in the instance, depots included.
    pub fn max_distance(&self) -> S {
        self.travel.iter().copied().fold(S::zero(), S::max)
    }
}

/// One customer row for [`InstanceBuilder`].
#[derive(Debug, Clone, Copy)]
pub struct CustomerSpec<S> {
    pub x: S,
    pub y: S,
    pub demand: S,
    pub service: S,
    pub ready: S,
    pub due: S,
    /// `Some` makes the customer special.
    pub sync: Option<SyncSlack<S>>,
    pub source_id: usize,
}

/// Assembles instances in the canonical vertex layout from a depot and a
/// list of customers.
#[derive(Debug, Clone)]
pub struct InstanceBuilder<S> {
    name: String,
    depot: (S, S),
    depot_window: (S, S),
    customers: Vec<CustomerSpec<S>>,
    capacity: S,
    regular_fleet: usize,
    special_fleet: usize,
    truncate: bool,
    provenance: Option<Provenance>,
}

impl<S: Scalar> InstanceBuilder<S> {
    pub fn new(name: impl Into<String>, depot: (S, S), depot_window: (S, S)) -> Self {
        Self {
            name: name.into(),
            depot,
            depot_window,
            customers: Vec::new(),
            capacity: S::infinity(),
            regular_fleet: 1,
            special_fleet: 1,
            truncate: false,
            provenance: None,
        }
    }

    pub fn capacity(mut self, q: S) -> Self {
        self.capacity = q;
        self
    }

    pub fn fleets(mut self, regular: usize, special: usize) -> Self {
        self.regular_fleet = regular;
        self.special_fleet = special;
        self
    }

    pub fn truncate_distances(mut self, on: bool) -> Self {
        self.truncate = on;
        self
    }

    pub fn provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn customer(mut self, c: CustomerSpec<S>) -> Self {
        self.customers.push(c);
        self
    }

    pub fn regular(self, x: S, y: S, demand: S, service: S, window: (S, S)) -> Self {
        let source_id = self.customers.len() + 1;
        self.customer(CustomerSpec {
            x,
            y,
            demand,
            service,
            ready: window.0,
            due: window.1,
            sync: None,
            source_id,
        })
    }

    pub fn special(self, x: S, y: S, demand: S, service: S, window: (S, S), slack: (S, S)) -> Self {
        let source_id = self.customers.len() + 1;
        self.customer(CustomerSpec {
            x,
            y,
            demand,
            service,
            ready: window.0,
            due: window.1,
            sync: Some(SyncSlack {
                alpha: slack.0,
                beta: slack.1,
            }),
            source_id,
        })
    }

    pub fn build(self) -> Result<Instance<S>, InstanceError> {
        let (dx, dy) = self.depot;
        let zero = S::zero();
        let depot = |id: usize, kind: VertexKind, window: Option<(S, S)>| Vertex {
            id,
            kind,
            x: dx,
            y: dy,
            demand: zero,
            service_regular: zero,
            service_special: zero,
            window,
            mirror: None,
            sync: None,
            source_id: 0,
        };
        let mut vertices = vec![
            depot(DEPOT_START_REGULAR, VertexKind::DepotStartRegular, None),
            depot(DEPOT_END_REGULAR, VertexKind::DepotEndRegular, Some(self.depot_window)),
            depot(DEPOT_START_SPECIAL, VertexKind::DepotStartSpecial, None),
            depot(DEPOT_END_SPECIAL, VertexKind::DepotEndSpecial, None),
        ];
        let n_customers = self.customers.len();
        let mut copies = Vec::new();
        for (k, c) in self.customers.iter().enumerate() {
            let id = FIRST_CUSTOMER + k;
            let base = Vertex {
                id,
                kind: VertexKind::RegularCustomer,
                x: c.x,
                y: c.y,
                demand: c.demand,
                service_regular: c.service,
                service_special: c.service,
                window: Some((c.ready, c.due)),
                mirror: None,
                sync: None,
                source_id: c.source_id,
            };
            match c.sync {
                None => vertices.push(base),
                Some(slack) => {
                    let copy_id = FIRST_CUSTOMER + n_customers + copies.len();
                    copies.push(Vertex {
                        id: copy_id,
                        kind: VertexKind::SpecialCopy,
                        ..base.clone()
                    });
                    vertices.push(Vertex {
                        kind: VertexKind::SpecialCustomer,
                        window: None,
                        mirror: Some(copy_id),
                        sync: Some(slack),
                        ..base
                    });
                }
            }
        }
        vertices.extend(copies);
        Instance::from_parts(
            self.name,
            vertices,
            self.regular_fleet,
            self.special_fleet,
            self.capacity,
            self.truncate,
            self.provenance,
        )
    }
}
