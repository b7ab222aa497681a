use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh_inertia;
use crate::error::{Error, Result};
use crate::geometry::CrossSection;
use crate::mesh::TriMesh;
use crate::sparse::{rcm_order, refine, SkylineLdlt, TripletBuilder};

/// Nodal torsion function χ with the stiffness K = I₁ + I₂ − ‖∇χ‖².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorsionSolution {
    pub mesh: TriMesh,
    pub chi: Vec<f64>,
    pub stiffness: f64,
    pub gradient_norm_sq: f64,
    /// I₁, I₂ integrated on the mesh.
    pub mesh_inertia: [f64; 2],
    /// ∫_ω χ after the solve.
    pub mean_residual: f64,
    /// Relative residual of the saddle-point system.
    pub residual: f64,
}

impl TorsionSolution {
    /// ∇χ on the triangle containing `p`, if any.
    pub fn gradient_at(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let t = self.mesh.locate(p)?;
        Some(self.element_gradient(t))
    }

    pub fn element_gradient(&self, t: usize) -> [f64; 2] {
        let g = self.mesh.gradients(t);
        let tri = self.mesh.triangles[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += self.chi[tri[k]] * g[k][0];
            out[1] += self.chi[tri[k]] * g[k][1];
        }
        out
    }

    /// Mesh plus a χ column, in the mesh text format.
    pub fn to_text(&self) -> String {
        self.mesh.to_text(&[&self.chi])
    }
}

/// Element load vector of ψ ↦ ∫(X₂∂₁ψ − X₁∂₂ψ); the integrand is linear,
/// so the centroid rule is exact.
fn element_rhs(mesh: &TriMesh, t: usize) -> [f64; 3] {
    let p = mesh.vertices(t);
    let area = mesh.signed_area(t);
    let xc = (p[0][0] + p[1][0] + p[2][0]) / 3.0;
    let yc = (p[0][1] + p[1][1] + p[2][1]) / 3.0;
    let g = mesh.gradients(t);
    [0, 1, 2].map(|k| area * (yc * g[k][0] - xc * g[k][1]))
}

/// Assembled right-hand side of the torsion problem.
pub fn torsion_rhs(mesh: &TriMesh) -> Vec<f64> {
    let mut b = vec![0.0; mesh.node_count()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let be = element_rhs(mesh, t);
        for k in 0..3 {
            b[tri[k]] += be[k];
        }
    }
    b
}

/// The torsion load functional applied to the basis function of `node`.
pub fn torsion_rhs_functional(mesh: &TriMesh, node: usize) -> Result<f64> {
    if node >= mesh.node_count() {
        return Err(Error::Domain(format!("node {node} out of range ({} nodes)", mesh.node_count())));
    }
    Ok(mesh
        .triangles
        .iter()
        .enumerate()
        .filter_map(|(t, tri)| tri.iter().position(|&i| i == node).map(|k| element_rhs(mesh, t)[k]))
        .sum())
}

/// P1 Galerkin solution of the torsion problem with the mean of χ fixed by
/// a Lagrange multiplier.
pub fn solve_torsion(mesh: &TriMesh) -> Result<TorsionSolution> {
    let n = mesh.node_count();
    if n < 3 || mesh.triangle_count() == 0 {
        return Err(Error::Solver("torsion: empty mesh".into()));
    }
    let elems: Vec<([[f64; 3]; 3], [f64; 3], f64)> = (0..mesh.triangle_count())
        .into_par_iter()
        .map(|t| {
            let g = mesh.gradients(t);
            let area = mesh.signed_area(t);
            let mut ke = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    ke[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
            (ke, element_rhs(mesh, t), area / 3.0)
        })
        .collect();
    let mut trip = TripletBuilder::with_capacity(n + 1, 12 * mesh.triangle_count());
    let mut rhs = vec![0.0; n + 1];
    for ((ke, be, c), tri) in elems.iter().zip(&mesh.triangles) {
        for i in 0..3 {
            rhs[tri[i]] += be[i];
            trip.add_sym(tri[i], n, *c);
            for j in 0..3 {
                trip.add(tri[i], tri[j], ke[i][j]);
            }
        }
    }
    let a = trip.build();
    let primal: Vec<usize> = (0..n).collect();
    let mut order = rcm_order(&a, &primal);
    if order.len() != n {
        return Err(Error::Solver("torsion: ordering lost nodes".into()));
    }
    let deferred = order.pop().unwrap();
    order.push(n);
    order.push(deferred);
    let f = SkylineLdlt::factor(&a, order).map_err(|e| Error::Solver(format!("torsion: {e} (disconnected mesh?)")))?;
    let x = refine(&a, &f, &rhs);
    let residual = a.relative_residual(&x, &rhs);
    let chi = x[..n].to_vec();
    let grad_sq: f64 = mesh
        .triangles
        .iter()
        .zip(&elems)
        .map(|(tri, (ke, _, _))| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += chi[tri[i]] * ke[i][j] * chi[tri[j]];
                }
            }
            s
        })
        .sum();
    let (i1, i2) = mesh_inertia(mesh);
    let mean_residual = mesh.integrate(&chi);
    Ok(TorsionSolution {
        mesh: mesh.clone(),
        chi,
        stiffness: i1 + i2 - grad_sq,
        gradient_norm_sq: grad_sq,
        mesh_inertia: [i1, i2],
        mean_residual,
        residual,
    })
}

/// Outcome of checking 0 < K ≤ I₁ + I₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessBound {
    pub stiffness: f64,
    pub bound: f64,
    pub slack: f64,
    pub ratio: f64,
}

pub fn stiffness_bound_check(sol: &TorsionSolution, section: &CrossSection) -> Result<StiffnessBound> {
    let bound = section.polar_inertia();
    let k = sol.stiffness;
    let report = StiffnessBound { stiffness: k, bound, slack: bound - k, ratio: k / bound };
    // the mesh inertia equals the polygon inertia up to rounding
    let tol = 1e-10 * bound;
    if !(k > 0.0) || k > bound + tol {
        return Err(Error::Invariant(format!("torsion stiffness K = {k} violates 0 < K <= I1 + I2 = {bound}")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{principal_frame, shapes, Polygon};
    use crate::mesh::{triangulate, triangulate_levels};

    #[test]
    fn reference_triangle_rhs() {
        let p = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let m = crate::mesh::ear_clip(&p).unwrap();
        let b: Vec<f64> = (0..3).map(|i| torsion_rhs_functional(&m, i).unwrap()).collect();
        assert!(b[0].abs() < 1e-16);
        assert!((b[1] - 1.0 / 6.0).abs() < 1e-16);
        assert!((b[2] + 1.0 / 6.0).abs() < 1e-16);
        assert!(torsion_rhs_functional(&m, 3).is_err());
    }

    #[test]
    fn square_rhs_sums_to_zero() {
        let s = principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap();
        let m = triangulate(&s, 0.1).unwrap();
        let b = torsion_rhs(&m);
        assert!(b.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn disc_rhs_is_small() {
        let s = principal_frame(&shapes::disc(1.0, 128).unwrap()).unwrap();
        let m = triangulate_levels(&s, 2).unwrap();
        let b = torsion_rhs(&m);
        let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        // boundary nodes only see the polygonal defect
        assert!(scale < 1e-3, "{scale}");
    }

    #[test]
    fn rectangle_section_bound() {
        let s = principal_frame(&shapes::rectangle(2.0, 1.0).unwrap()).unwrap();
        let m = triangulate(&s, 0.1).unwrap();
        let sol = solve_torsion(&m).unwrap();
        let r = stiffness_bound_check(&sol, &s).unwrap();
        assert!(r.ratio > 0.0 && r.ratio < 1.0);
        assert!(sol.residual < 1e-10);
        let chimax = sol.chi.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(sol.mean_residual.abs() < 1e-10 * s.area * chimax);
    }
}
