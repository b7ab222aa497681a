//! A small tetrahedral (P1 or P2) elasticity solver on the tapered rod Ω_ε, used to
//! watch the 3D solution approach the 1D limit as ε decreases.

mod compare;
mod mesh3d;
mod solve3d;

pub use compare::{extract_layers, slope_discrepancy, ConvergenceReport, ConvergenceRow, ConvergenceSetup, LayerState};
pub use mesh3d::{build_tapered_mesh, ElementOrder, LayerSpec, TaperedMesh3D, TET_EDGES};
pub use solve3d::{applied_force, solve_elasticity_3d, strain_norm_sq, Elastic3DSolution, Elastic3DSystem};
