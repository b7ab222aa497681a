//! P1 finite elements on the reference section: the torsion function χ and
//! the stiffness K, plane warping under an affine axial stress, and the
//! limit stress matrix T.

mod stress;
mod torsion;
mod warping;

pub use stress::{energy_density, energy_density_split, limit_stress, stress_from_state, LimitStressT, Sym3};
pub use torsion::{
    solve_torsion, stiffness_bound_check, torsion_rhs, torsion_rhs_functional, StiffnessBound, TorsionSolution,
};
pub use warping::{solve_plane_warping, AffineSource, PlaneWarpingSolution};

use crate::mesh::TriMesh;

/// ∫_T x_a x_b over triangle `t` for (a, b) in {(0,0), (1,1), (0,1)}.
pub(crate) fn triangle_second_moments(mesh: &TriMesh, t: usize) -> [f64; 3] {
    let p = mesh.vertices(t);
    let area = mesh.signed_area(t);
    let q = |a: usize, b: usize| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += p[i][a] * p[j][b] * if i == j { 2.0 } else { 1.0 };
            }
        }
        s * area / 12.0
    };
    [q(0, 0), q(1, 1), q(0, 1)]
}

/// I₁ and I₂ of the meshed domain.
pub fn mesh_inertia(mesh: &TriMesh) -> (f64, f64) {
    (0..mesh.triangle_count()).fold((0.0, 0.0), |(a, b), t| {
        let m = triangle_second_moments(mesh, t);
        (a + m[0], b + m[1])
    })
}
