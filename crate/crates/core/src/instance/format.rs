//! VRPSC instance files: TOML with a metadata header and one table per vertex.
//! Travel matrices are not stored; they are recomputed from coordinates.

use serde::{Deserialize, Serialize};

use super::{Instance, InstanceError, Provenance, SyncSlack, Vertex, VertexKind};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Provenance>,
    pub fleet: FleetRecord,
    #[serde(rename = "vertex")]
    pub vertices: Vec<VertexRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetRecord {
    pub regular: usize,
    pub special: usize,
    /// Absent means unlimited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    #[serde(default)]
    pub truncate_distances: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub kind: VertexKind,
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub s1: f64,
    pub s2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub source_id: usize,
}

impl InstanceFile {
    pub fn from_instance<S: Scalar>(inst: &Instance<S>) -> Self {
        let capacity = inst.capacity();
        Self {
            format_version: FORMAT_VERSION,
            name: inst.name().to_string(),
            transform: inst.provenance().cloned(),
            fleet: FleetRecord {
                regular: inst.fleet(super::VehicleClass::Regular),
                special: inst.fleet(super::VehicleClass::Special),
                capacity: capacity.is_finite().then(|| capacity.as_f64()),
                truncate_distances: inst.truncates_distances(),
            },
            vertices: inst
                .vertices()
                .iter()
                .map(|v| VertexRecord {
                    id: v.id,
                    kind: v.kind,
                    x: v.x.as_f64(),
                    y: v.y.as_f64(),
                    q: v.demand.as_f64(),
                    s1: v.service_regular.as_f64(),
                    s2: v.service_special.as_f64(),
                    l: v.window.map(|w| w.0.as_f64()),
                    u: v.window.map(|w| w.1.as_f64()),
                    mirror: v.mirror,
                    alpha: v.sync.map(|s| s.alpha.as_f64()),
                    beta: v.sync.map(|s| s.beta.as_f64()),
                    source_id: v.source_id,
                })
                .collect(),
        }
    }

    pub fn into_instance<S: Scalar>(self) -> Result<Instance<S>, InstanceError> {
        if self.format_version != FORMAT_VERSION {
            return Err(InstanceError::Format(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for r in self.vertices {
            let window = match (r.l, r.u) {
                (Some(l), Some(u)) => Some((S::of(l), S::of(u))),
                (None, None) => None,
                _ => {
                    return Err(InstanceError::Invariant {
                        vertex: r.id,
                        message: "window needs both l and u".into(),
                    })
                }
            };
            let sync = match (r.alpha, r.beta) {
                (Some(a), Some(b)) => Some(SyncSlack {
                    alpha: S::of(a),
                    beta: S::of(b),
                }),
                (None, None) => None,
                _ => {
                    return Err(InstanceError::Invariant {
                        vertex: r.id,
                        message: "sync slack needs both alpha and beta".into(),
                    })
                }
            };
            vertices.push(Vertex {
                id: r.id,
                kind: r.kind,
                x: S::of(r.x),
                y: S::of(r.y),
                demand: S::of(r.q),
                service_regular: S::of(r.s1),
                service_special: S::of(r.s2),
                window,
                mirror: r.mirror,
                sync,
                source_id: r.source_id,
            });
        }
        Instance::from_parts(
            self.name,
            vertices,
            self.fleet.regular,
            self.fleet.special,
            self.fleet.capacity.map(S::of).unwrap_or_else(S::infinity),
            self.fleet.truncate_distances,
            self.transform,
        )
    }
}

pub fn write_instance<S: Scalar>(inst: &Instance<S>) -> String {
    toml::to_string(&InstanceFile::from_instance(inst)).expect("instance file serializes")
}

pub fn read_instance<S: Scalar>(text: &str) -> Result<Instance<S>, InstanceError> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| InstanceError::Format(e.to_string()))?;
    file.into_instance()
}
