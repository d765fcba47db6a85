use serde::{Deserialize, Serialize};

/// Environment variable that multiplies every default tolerance.
pub const TOLERANCE_SCALE_ENV: &str = "FQH_TOLERANCE_SCALE";

/// Numerical tolerances for input validation and degeneracy clustering.
///
/// `cluster` is relative: the absolute clustering threshold for an operator
/// `A` is `cluster * max(1, ||A||_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub psd: f64,
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-9,
            psd: 1e-9,
            cluster: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            hermiticity: self.hermiticity * factor,
            trace: self.trace * factor,
            psd: self.psd * factor,
            cluster: self.cluster * factor,
        }
    }

    /// Defaults scaled by `FQH_TOLERANCE_SCALE` when it is set to a positive number.
    pub fn from_env() -> Self {
        let scale = std::env::var(TOLERANCE_SCALE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|s| s.is_finite() && *s > 0.0)
            .unwrap_or(1.0);
        Self::default().scaled(scale)
    }

    pub fn cluster_threshold(&self, frobenius_norm: f64) -> f64 {
        self.cluster * frobenius_norm.max(1.0)
    }
}
