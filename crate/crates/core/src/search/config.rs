use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::neighborhood::RegularCheck;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Search parameters. Every field has a default, so a config file only needs
/// the values it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub iterations: u64,
    pub seed: u64,
    /// Inclusive bounds on requests removed per iteration; derived from the
    /// instance size when absent.
    pub remove_min: Option<usize>,
    pub remove_max: Option<usize>,
    /// Relatedness weights: start time, distance, demand, type.
    pub lambda: [f64; 4],
    pub p_related: f64,
    pub p_worst: f64,
    /// Start temperature accepts a solution this fraction worse than the
    /// initial one with probability 0.5. Zero gives pure descent.
    pub start_temperature: f64,
    pub cooling: f64,
    /// Noise half-width as a fraction of the largest distance.
    pub noise: f64,
    /// Scores for a new best, an improvement and an accepted worse solution.
    pub scores: [f64; 3],
    pub reaction: f64,
    pub segment: u64,
    pub weight_floor: f64,
    pub initial_retries: u32,
    pub regular_check: RegularCheck,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            iterations: 25_000,
            seed: 0,
            remove_min: None,
            remove_max: None,
            lambda: [4.0, 2.0, 1.0, 4.0],
            p_related: 6.0,
            p_worst: 3.0,
            start_temperature: 0.05,
            cooling: 0.99975,
            noise: 0.025,
            scores: [33.0, 9.0, 13.0],
            reaction: 0.1,
            segment: 100,
            weight_floor: 1e-3,
            initial_retries: 20,
            regular_check: RegularCheck::Exact,
        }
    }
}

impl SearchConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling must lie in (0, 1)");
        }
        if self.start_temperature < 0.0 || self.noise < 0.0 {
            return bad("start_temperature and noise must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.reaction) {
            return bad("reaction must lie in [0, 1]");
        }
        if self.segment == 0 {
            return bad("segment must be positive");
        }
        if self.weight_floor <= 0.0 {
            return bad("weight_floor must be positive");
        }
        if self.p_related < 0.0 || self.p_worst < 0.0 {
            return bad("randomization exponents must be non-negative");
        }
        if let (Some(a), Some(b)) = (self.remove_min, self.remove_max) {
            if a > b {
                return bad("remove_min exceeds remove_max");
            }
        }
        Ok(())
    }
}
