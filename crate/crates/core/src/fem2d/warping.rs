use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Material;
use crate::mesh::TriMesh;
use crate::sparse::{refine, SaddleOrdering, SkylineLdlt, TripletBuilder};

/// Axial stress T₃₃ = a₀ + a₁X₁ + a₂X₂ on one section. For the limit rod
/// a₀ = ρU₃', a₁ = −ρ²U₁'', a₂ = −ρ²U₂''.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineSource {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl AffineSource {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.a0 + self.a1 * x[0] + self.a2 * x[1]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneWarpingSolution {
    pub mesh: TriMesh,
    pub ubar1: Vec<f64>,
    pub ubar2: Vec<f64>,
    pub t33_source: AffineSource,
    /// ∫ū₁, ∫ū₂, ∫(X₁ū₂ − X₂ū₁)
    pub constraint_residuals: [f64; 3],
    pub residual: f64,
}

impl PlaneWarpingSolution {
    /// Displacement gradient [[∂₁ū₁, ∂₂ū₁], [∂₁ū₂, ∂₂ū₂]] on triangle `t`.
    pub fn element_gradient(&self, t: usize) -> [[f64; 2]; 2] {
        let g = self.mesh.gradients(t);
        let tri = self.mesh.triangles[t];
        let mut out = [[0.0; 2]; 2];
        for k in 0..3 {
            for d in 0..2 {
                out[0][d] += self.ubar1[tri[k]] * g[k][d];
                out[1][d] += self.ubar2[tri[k]] * g[k][d];
            }
        }
        out
    }
}

/// P1 solution of the plane elasticity problem
/// ∫ σ(ū):∇φ = −∫ λ T₃₃ div φ, with the three rigid motions removed by
/// multipliers.
pub fn solve_plane_warping(mesh: &TriMesh, material: &Material, source: AffineSource) -> Result<PlaneWarpingSolution> {
    let n = mesh.node_count();
    if n < 3 {
        return Err(Error::Solver("plane warping: empty mesh".into()));
    }
    let (lam, mu) = (material.lambda, material.mu);
    let nd = 2 * n;
    let elems: Vec<([[f64; 6]; 6], [f64; 6], [[f64; 6]; 3])> = (0..mesh.triangle_count())
        .into_par_iter()
        .map(|t| {
            let g = mesh.gradients(t);
            let p = mesh.vertices(t);
            let area = mesh.signed_area(t);
            let mut ke = [[0.0; 6]; 6];
            for i in 0..3 {
                for j in 0..3 {
                    let (a, b) = (g[i], g[j]);
                    ke[2 * i][2 * j] = area * ((lam + 2.0 * mu) * a[0] * b[0] + mu * a[1] * b[1]);
                    ke[2 * i + 1][2 * j + 1] = area * ((lam + 2.0 * mu) * a[1] * b[1] + mu * a[0] * b[0]);
                    ke[2 * i][2 * j + 1] = area * (lam * a[0] * b[1] + mu * a[1] * b[0]);
                    ke[2 * i + 1][2 * j] = area * (lam * a[1] * b[0] + mu * a[0] * b[1]);
                }
            }
            let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
            let tc = source.eval(centroid);
            let mut fe = [0.0; 6];
            for i in 0..3 {
                fe[2 * i] = -lam * tc * area * g[i][0];
                fe[2 * i + 1] = -lam * tc * area * g[i][1];
            }
            let sx: f64 = p.iter().map(|q| q[0]).sum();
            let sy: f64 = p.iter().map(|q| q[1]).sum();
            let mut ce = [[0.0; 6]; 3];
            for i in 0..3 {
                ce[0][2 * i] = area / 3.0;
                ce[1][2 * i + 1] = area / 3.0;
                ce[2][2 * i + 1] = area / 12.0 * (p[i][0] + sx);
                ce[2][2 * i] = -area / 12.0 * (p[i][1] + sy);
            }
            (ke, fe, ce)
        })
        .collect();
    let mut trip = TripletBuilder::with_capacity(nd + 3, 48 * mesh.triangle_count());
    let mut rhs = vec![0.0; nd + 3];
    for ((ke, fe, ce), tri) in elems.iter().zip(&mesh.triangles) {
        let dof = |k: usize| 2 * tri[k / 2] + k % 2;
        for i in 0..6 {
            rhs[dof(i)] += fe[i];
            for (r, row) in ce.iter().enumerate() {
                if row[i] != 0.0 {
                    trip.add_sym(dof(i), nd + r, row[i]);
                }
            }
            for j in 0..6 {
                trip.add(dof(i), dof(j), ke[i][j]);
            }
        }
    }
    let a = trip.build();
    let deferred = rigid_anchor(mesh);
    let f = SkylineLdlt::factor(&a, SaddleOrdering::build(&a, nd, &deferred))
        .map_err(|e| Error::Solver(format!("plane warping: {e}")))?;
    let x = refine(&a, &f, &rhs);
    let residual = a.relative_residual(&x, &rhs);
    let ubar1: Vec<f64> = (0..n).map(|i| x[2 * i]).collect();
    let ubar2: Vec<f64> = (0..n).map(|i| x[2 * i + 1]).collect();
    let mut cres = [0.0; 3];
    for ((_, _, ce), tri) in elems.iter().zip(&mesh.triangles) {
        for i in 0..6 {
            let v = x[2 * tri[i / 2] + i % 2];
            for r in 0..3 {
                cres[r] += ce[r][i] * v;
            }
        }
    }
    Ok(PlaneWarpingSolution {
        mesh: mesh.clone(),
        ubar1,
        ubar2,
        t33_source: source,
        constraint_residuals: cres,
        residual,
    })
}

// Three displacement unknowns that pin the rigid motions: both components
// at node p and the component at node q most sensitive to a rotation about p.
fn rigid_anchor(mesh: &TriMesh) -> Vec<usize> {
    let p = 0usize;
    let a = mesh.nodes[p];
    let (q, _) = mesh
        .nodes
        .iter()
        .enumerate()
        .map(|(i, b)| (i, (b[0] - a[0]).hypot(b[1] - a[1])))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let d = [mesh.nodes[q][0] - a[0], mesh.nodes[q][1] - a[1]];
    // rotation about p moves q along (−d₂, d₁)
    let c = if d[1].abs() >= d[0].abs() { 0 } else { 1 };
    vec![2 * p, 2 * p + 1, 2 * q + c]
}
