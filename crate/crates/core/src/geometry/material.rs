use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropic Hooke material given by its Lamé pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("mu must be > 0, got {mu}")));
        }
        Ok(Self { lambda, mu })
    }

    /// Young's modulus E = μ(3λ+2μ)/(λ+μ).
    pub fn young(&self) -> f64 {
        self.mu * (3.0 * self.lambda + 2.0 * self.mu) / (self.lambda + self.mu)
    }

    /// Poisson ratio ν = λ/(2(λ+μ)).
    pub fn poisson(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }
}
