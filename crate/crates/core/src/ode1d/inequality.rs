//! Weighted Poincaré-type inequalities on (0, L) with ρ = 1 − x₃/L,
//! checked by exact integration of piecewise polynomials.

use serde::{Deserialize, Serialize};

use super::piecewise::{merge_breaks, PiecewisePoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightedInequality {
    /// ‖φ‖ ≤ 2L‖ρφ'‖
    H1Rho,
    /// ‖ρφ‖ ≤ (2L/3)‖ρ²φ'‖
    H1Rho2,
    /// ‖ρφ'‖ ≤ (2L/3)‖ρ²φ''‖
    H2Rho2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub which: WeightedInequality,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs, or 0 when both vanish.
    pub ratio: f64,
    pub holds: bool,
}

/// Evaluate both sides for `phi` on (0, L). Requires φ(0) = 0, and also
/// φ'(0) = 0 for [`WeightedInequality::H2Rho2`].
pub fn check_weighted_inequality(
    which: WeightedInequality,
    phi: &PiecewisePoly,
    length: f64,
) -> Result<InequalityReport> {
    phi.validate(length)?;
    let b = merge_breaks(length, &[phi.breakpoints()]);
    let f = phi.to_loglaurent(length, &b);
    let df = f.derivative();
    let tol = 1e-12 * (1.0 + f.pieces.iter().flat_map(|p| p.terms()).map(|t| t.2.abs()).fold(0.0, f64::max));
    if f.eval(0.0).abs() > tol {
        return Err(Error::Precondition(format!("sample must vanish at 0, got {}", f.eval(0.0))));
    }
    if which == WeightedInequality::H2Rho2 && df.eval(0.0).abs() > tol * length.recip().max(1.0) {
        return Err(Error::Precondition(format!("sample slope must vanish at 0, got {}", df.eval(0.0))));
    }
    let c = 2.0 * length / 3.0;
    let (lhs, rhs) = match which {
        WeightedInequality::H1Rho => (f.weighted_inner(&f, 0)?, 2.0 * length * df.weighted_inner(&df, 2)?.sqrt()),
        WeightedInequality::H1Rho2 => (f.weighted_inner(&f, 2)?, c * df.weighted_inner(&df, 4)?.sqrt()),
        WeightedInequality::H2Rho2 => {
            let d2 = df.derivative();
            (df.weighted_inner(&df, 2)?, c * d2.weighted_inner(&d2, 4)?.sqrt())
        }
    };
    let lhs = lhs.max(0.0).sqrt();
    let ratio = if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    };
    Ok(InequalityReport { which, lhs, rhs, ratio, holds: lhs <= rhs * (1.0 + 1e-12) })
}
