//! Vehicle routing with synchronization constraints: instance model,
//! temporal feasibility engine, adaptive large neighborhood search and a
//! small exact solver for verification.

pub mod bench;
pub mod exact;
pub mod instance;
pub mod neighborhood;
pub mod scalar;
pub mod search;
pub mod solution;
pub mod temporal;

pub use scalar::Scalar;

pub type InstanceF64 = instance::Instance<f64>;
pub type InstanceF32 = instance::Instance<f32>;
pub type TemporalProblemF64 = temporal::TemporalProblem<f64>;
pub type SolutionF64 = solution::Solution<f64>;
pub type SolutionF32 = solution::Solution<f32>;
