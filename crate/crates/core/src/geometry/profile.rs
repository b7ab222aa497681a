use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length and thickness parameter of the tapered rod. The cross-section at
/// height x₃ is ε·ρ_ε(x₃)·ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodProfile {
    pub length: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taper {
    /// ρ_ε(x₃) = 1 − (x₃/L)(1 − ε/L)
    Eps,
    /// ρ(x₃) = 1 − x₃/L
    Limit,
}

impl RodProfile {
    pub fn new(length: f64, epsilon: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("rod length must be positive, got {length}")));
        }
        if !(epsilon > 0.0 && epsilon < length / 2.0) {
            return Err(Error::Domain(format!(
                "epsilon must satisfy 0 < eps < L/2, got eps = {epsilon}, L = {length}"
            )));
        }
        Ok(Self { length, epsilon })
    }

    /// ρ_ε without the domain check.
    #[inline]
    pub fn rho_eps(&self, x3: f64) -> f64 {
        1.0 - (x3 / self.length) * (1.0 - self.epsilon / self.length)
    }

    /// dρ_ε/dx₃.
    #[inline]
    pub fn rho_eps_slope(&self) -> f64 {
        -(1.0 - self.epsilon / self.length) / self.length
    }

    #[inline]
    pub fn rho(&self, x3: f64) -> f64 {
        1.0 - x3 / self.length
    }

    /// Physical half-scale ε·ρ_ε(x₃) of the section at height x₃.
    #[inline]
    pub fn scale(&self, x3: f64) -> f64 {
        self.epsilon * self.rho_eps(x3)
    }
}

pub fn taper_eval(profile: &RodProfile, x3: f64, which: Taper) -> Result<f64> {
    if !(0.0..=profile.length).contains(&x3) {
        return Err(Error::Domain(format!("x3 = {x3} outside [0, {}]", profile.length)));
    }
    Ok(match which {
        Taper::Eps => profile.rho_eps(x3),
        Taper::Limit => profile.rho(x3),
    })
}
