//! Numerical toolkit for the asymptotic one-dimensional model of a linearly
//! tapered elastic rod.
//!
//! The rod occupies Ω_ε = {(x₁, x₂, x₃) : 0 < x₃ < L, (x₁, x₂) ∈ ερ_ε(x₃)ω}
//! with ρ_ε(x₃) = 1 − (x₃/L)(1 − ε/L). The crate provides:
//!
//! * [`geometry`]: exact polygon moments and the principal frame of ω,
//! * [`mesh`]: ear clipping and red refinement of ω,
//! * [`fem2d`]: the Saint-Venant torsion function χ, the torsional
//!   stiffness K, plane warping, and the limit stress matrix T,
//! * [`ode1d`]: the degenerate limit problems for stretching, bending and
//!   torsion, solved exactly and by weighted finite elements,
//! * [`decomposition`]: the elementary displacement, the rescaling operator
//!   and numerical probes of the a priori estimates,
//! * [`verify3d`]: a small 3D elasticity solver on the tapered rod used to
//!   check convergence towards the 1D limit.
//!
//! All quantities are nondimensional and the model is scale covariant.

// NaN-rejecting `!(x > 0.0)` guards and index loops over small fixed
// arrays are deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod decomposition;
pub mod error;
pub mod fem2d;
pub mod geometry;
pub mod mesh;
pub mod ode1d;
pub mod quadrature;
pub mod sparse;
pub mod verify3d;

pub use error::{Error, Result};
pub use geometry::{
    polygon_moments, principal_frame, shapes, taper_eval, CrossSection, Material, Moments, Point2, Polygon, RodProfile,
    Taper,
};
pub use mesh::{refine, triangulate, TriMesh};
