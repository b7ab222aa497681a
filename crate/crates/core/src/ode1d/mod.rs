//! The degenerate limit problems along the rod axis.
//!
//! Loads are piecewise polynomials in x₃. The reference solver rewrites
//! every integrand in s = ρ = 1 − x₃/L, where the weights ρ², ρ⁴ are
//! monomials and repeated antidifferentiation stays inside the class
//! Σ c sᵏ lnᵐ s; results are exact up to rounding. A weighted FEM gives an
//! independent approximation.

mod exact;
mod fem;
mod forces;
mod inequality;
mod loglaurent;
mod piecewise;

pub use exact::{
    energy_identity, solve_bending, solve_stretch, solve_torsion_rotation, AxialField, BendingField, ElasticTerms,
    EnergyReport, Limit1DSolution, LimitField, LimitModel, LimitSolution, LimitState, SectionConstants,
    TorsionCoefficient,
};
pub use fem::{solve_weighted_fem_1d, solve_weighted_fem_all, Problem1D};
pub use forces::{ForceProfile, LoadCase};
pub use inequality::{check_weighted_inequality, InequalityReport, WeightedInequality};
pub use loglaurent::LogLaurent;
pub use piecewise::{PiecewiseLL, PiecewisePoly, PolySegment};
