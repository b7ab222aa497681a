use serde::{Deserialize, Serialize};

use super::piecewise::PiecewisePoly;
use crate::error::{Error, Result};

/// Line force densities f and moment densities g along the rod, each a
/// piecewise polynomial in x₃. JSON keys are `f1`..`f3`, `g1`..`g3`; each
/// holds a list of `{"interval": [a, b], "coeffs": [c0, c1, ...]}` with
/// coefficients of the global monomials x₃ⁿ. Missing keys mean zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceProfile {
    #[serde(default)]
    pub f1: PiecewisePoly,
    #[serde(default)]
    pub f2: PiecewisePoly,
    #[serde(default)]
    pub f3: PiecewisePoly,
    #[serde(default)]
    pub g1: PiecewisePoly,
    #[serde(default)]
    pub g2: PiecewisePoly,
    #[serde(default)]
    pub g3: PiecewisePoly,
}

/// The four unit-load benchmark cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadCase {
    Stretch,
    Bending1,
    Bending2,
    Torsion,
}

impl LoadCase {
    pub const ALL: [LoadCase; 4] = [LoadCase::Stretch, LoadCase::Bending1, LoadCase::Bending2, LoadCase::Torsion];

    pub fn name(&self) -> &'static str {
        match self {
            LoadCase::Stretch => "stretch",
            LoadCase::Bending1 => "bending1",
            LoadCase::Bending2 => "bending2",
            LoadCase::Torsion => "torsion",
        }
    }

    /// f₃ ≡ 1, f₁ ≡ 1, f₂ ≡ 1 or g₃ ≡ 1 respectively.
    pub fn unit_forces(&self, length: f64) -> ForceProfile {
        let one = PiecewisePoly::constant(length, 1.0);
        let mut f = ForceProfile::default();
        match self {
            LoadCase::Stretch => f.f3 = one,
            LoadCase::Bending1 => f.f1 = one,
            LoadCase::Bending2 => f.f2 = one,
            LoadCase::Torsion => f.g3 = one,
        }
        f
    }
}

impl std::str::FromStr for LoadCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LoadCase::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::Parse(format!("unknown load case '{s}' (expected stretch, bending1, bending2, torsion)"))
        })
    }
}

impl ForceProfile {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("force profile: {e}")))?;
        for c in f.components() {
            PiecewisePoly::new(c.segments().to_vec())?;
        }
        Ok(f)
    }

    /// f₁, f₂, f₃
    pub fn f(&self, i: usize) -> &PiecewisePoly {
        match i {
            1 => &self.f1,
            2 => &self.f2,
            3 => &self.f3,
            _ => panic!("force index must be 1..=3"),
        }
    }

    /// g₁, g₂, g₃
    pub fn g(&self, i: usize) -> &PiecewisePoly {
        match i {
            1 => &self.g1,
            2 => &self.g2,
            3 => &self.g3,
            _ => panic!("moment index must be 1..=3"),
        }
    }

    pub fn components(&self) -> [&PiecewisePoly; 6] {
        [&self.f1, &self.f2, &self.f3, &self.g1, &self.g2, &self.g3]
    }

    pub fn validate(&self, length: f64) -> Result<()> {
        for c in self.components() {
            PiecewisePoly::new(c.segments().to_vec())?;
            c.validate(length)?;
        }
        Ok(())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.components().iter().flat_map(|c| c.breakpoints()).collect()
    }

    /// a·self + b·other, componentwise.
    pub fn combine(&self, a: f64, other: &Self, b: f64, length: f64) -> Self {
        Self {
            f1: self.f1.combine(a, &other.f1, b, length),
            f2: self.f2.combine(a, &other.f2, b, length),
            f3: self.f3.combine(a, &other.f3, b, length),
            g1: self.g1.combine(a, &other.g1, b, length),
            g2: self.g2.combine(a, &other.g2, b, length),
            g3: self.g3.combine(a, &other.g3, b, length),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_json() {
        let f = ForceProfile::from_json(r#"{"f3": [{"interval": [0, 1], "coeffs": [1, 0.5]}]}"#).unwrap();
        assert!((f.f3.eval(0.5) - 1.25).abs() < 1e-15);
        assert!(f.f1.is_zero());
        assert!(ForceProfile::from_json(r#"{"h": []}"#).is_err());
        assert!(ForceProfile::from_json(r#"{"f1": [{"interval": [1, 0], "coeffs": [1]}]}"#).is_err());
    }
}
