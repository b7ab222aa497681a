use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh3d::{ElementOrder, TaperedMesh3D, TET_EDGES};
use crate::error::{Error, Result};
use crate::geometry::Material;
use crate::ode1d::ForceProfile;
use crate::quadrature::TetRule;
use crate::sparse::{rcm_order, refine, CsrMatrix, SkylineLdlt, TripletBuilder};

/// Volume force density on Ω_ε built from line loads f and moment loads g:
/// F = (ε²f₁ − x₂g₃, ε²f₂ + x₁g₃, εf₃ + x₁g₁ + x₂g₂).
pub fn applied_force(forces: &ForceProfile, epsilon: f64, x: [f64; 3]) -> [f64; 3] {
    let z = x[2];
    let (f1, f2, f3) = (forces.f1.eval(z), forces.f2.eval(z), forces.f3.eval(z));
    let (g1, g2, g3) = (forces.g1.eval(z), forces.g2.eval(z), forces.g3.eval(z));
    let e2 = epsilon * epsilon;
    [e2 * f1 - x[1] * g3, e2 * f2 + x[0] * g3, epsilon * f3 + x[0] * g1 + x[1] * g2]
}

/// P1 gradients of the four barycentric functions.
pub(crate) fn tet_gradients(p: [[f64; 3]; 4]) -> ([[f64; 3]; 4], f64) {
    let d = |i: usize| [p[i][0] - p[0][0], p[i][1] - p[0][1], p[i][2] - p[0][2]];
    let j = [d(1), d(2), d(3)];
    // rows of J⁻¹ᵀ via cofactors: ∇λ_i for i = 1..3
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    let cross =
        |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let g1 = cross(j[1], j[2]).map(|v| v / det);
    let g2 = cross(j[2], j[0]).map(|v| v / det);
    let g3 = cross(j[0], j[1]).map(|v| v / det);
    let g0 = [0, 1, 2].map(|k| -(g1[k] + g2[k] + g3[k]));
    ([g0, g1, g2, g3], det / 6.0)
}

/// Degree-2 rule on the tetrahedron, weights summing to one.
fn degree2_rule() -> [([f64; 4], f64); 4] {
    let (a, b) = (0.585_410_196_624_968_5, 0.138_196_601_125_010_5);
    [([a, b, b, b], 0.25), ([b, a, b, b], 0.25), ([b, b, a, b], 0.25), ([b, b, b, a], 0.25)]
}

/// Shape values and gradients of the 4 or 10 nodal basis functions at the
/// barycentric point `l`; midpoints follow `TET_EDGES`.
pub(crate) fn shape(order: ElementOrder, l: [f64; 4], g: &[[f64; 3]; 4]) -> (Vec<f64>, Vec<[f64; 3]>) {
    match order {
        ElementOrder::Linear => (l.to_vec(), g.to_vec()),
        ElementOrder::Quadratic => {
            let mut n = Vec::with_capacity(10);
            let mut d = Vec::with_capacity(10);
            for a in 0..4 {
                n.push(l[a] * (2.0 * l[a] - 1.0));
                d.push(g[a].map(|v| (4.0 * l[a] - 1.0) * v));
            }
            for [a, b] in TET_EDGES {
                n.push(4.0 * l[a] * l[b]);
                d.push([0, 1, 2].map(|k| 4.0 * (l[a] * g[b][k] + l[b] * g[a][k])));
            }
            (n, d)
        }
    }
}

fn quadrature(order: ElementOrder) -> Vec<([f64; 4], f64)> {
    match order {
        ElementOrder::Linear => vec![([0.25; 4], 1.0)],
        ElementOrder::Quadratic => degree2_rule().to_vec(),
    }
}

/// Element stiffness for ℰ(u) = ∫ λ(tr γ)² + 2μ Σ γ_ij², i.e. uᵀKu = ℰ.
fn element_stiffness(order: ElementOrder, p: [[f64; 3]; 4], m: &Material) -> Vec<f64> {
    let (g, vol) = tet_gradients(p);
    let (lam, mu) = (m.lambda, m.mu);
    let nn = if order == ElementOrder::Linear { 4 } else { 10 };
    let dim = 3 * nn;
    let mut k = vec![0.0; dim * dim];
    for (l, w) in quadrature(order) {
        let (_, d) = shape(order, l, &g);
        let wv = w * vol;
        for a in 0..nn {
            for b in 0..nn {
                let gg = d[a][0] * d[b][0] + d[a][1] * d[b][1] + d[a][2] * d[b][2];
                for i in 0..3 {
                    for j in 0..3 {
                        // λ ∂_i φ_a ∂_j φ_b + μ (∂_j φ_a ∂_i φ_b + δ_ij ∇φ_a·∇φ_b)
                        let mut v = lam * d[a][i] * d[b][j] + mu * d[a][j] * d[b][i];
                        if i == j {
                            v += mu * gg;
                        }
                        k[(3 * a + i) * dim + 3 * b + j] += wv * v;
                    }
                }
            }
        }
    }
    k
}

/// Assembled and factored stiffness of a tapered mesh with the base
/// clamped; shared by all load cases on that mesh.
pub struct Elastic3DSystem {
    pub mesh: TaperedMesh3D,
    pub material: Material,
    pub matrix: CsrMatrix,
    factor: SkylineLdlt,
    /// Free-node number of each node, `None` on the clamped base; dofs
    /// are 3·free + component.
    free: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Elastic3DSolution {
    /// Nodal displacements, clamped nodes included (zero).
    pub displacement: Vec<[f64; 3]>,
    /// ℰ(u) = uᵀKu.
    pub energy: f64,
    /// ∫ F·u.
    pub work: f64,
    pub residual: f64,
    /// ‖(∇u)_S‖² on Ω_ε.
    pub strain_norm_sq: f64,
}

impl Elastic3DSolution {
    pub fn energy_gap(&self) -> f64 {
        let s = self.energy.abs().max(self.work.abs());
        if s == 0.0 {
            0.0
        } else {
            (self.energy - self.work).abs() / s
        }
    }
}

impl Elastic3DSystem {
    pub fn assemble(mesh: TaperedMesh3D, material: Material) -> Result<Self> {
        let mut free = vec![Some(0); mesh.node_count()];
        for i in mesh.clamped_nodes() {
            free[i] = None;
        }
        let mut nfree = 0;
        for f in free.iter_mut().flatten() {
            *f = nfree;
            nfree += 1;
        }
        if nfree == 0 {
            return Err(Error::Precondition("mesh has no free nodes".into()));
        }
        let order = mesh.order;
        let blocks: Vec<Vec<f64>> = (0..mesh.tets.len())
            .into_par_iter()
            .map(|t| element_stiffness(order, mesh.tet_vertices(t), &material))
            .collect();
        let mut tb = TripletBuilder::with_capacity(3 * nfree, blocks.iter().map(Vec::len).sum());
        for (t, k) in blocks.iter().enumerate() {
            let v = mesh.element_nodes(t);
            let dim = 3 * v.len();
            for (a, fa) in v.iter().map(|&i| free[i]).enumerate() {
                let Some(fa) = fa else { continue };
                for (b, fb) in v.iter().map(|&i| free[i]).enumerate() {
                    let Some(fb) = fb else { continue };
                    for i in 0..3 {
                        for j in 0..3 {
                            tb.add(3 * fa + i, 3 * fb + j, k[(3 * a + i) * dim + 3 * b + j]);
                        }
                    }
                }
            }
        }
        let matrix = tb.build();
        let all: Vec<usize> = (0..matrix.dim()).collect();
        let factor = SkylineLdlt::factor(&matrix, rcm_order(&matrix, &all))?;
        if factor.negative_pivots() > 0 {
            return Err(Error::Solver(format!("stiffness has {} negative pivots", factor.negative_pivots())));
        }
        Ok(Self { mesh, material, matrix, factor, free })
    }

    pub fn dof_count(&self) -> usize {
        self.matrix.dim()
    }

    /// Consistent load vector ∫F·φ over the free dofs.
    pub fn load_vector(&self, forces: &ForceProfile) -> Vec<f64> {
        let eps = self.mesh.profile.epsilon;
        let order = self.mesh.order;
        let p_deg = if order == ElementOrder::Linear { 1 } else { 2 };
        let deg = forces.components().iter().map(|c| c.degree()).max().unwrap_or(0) + 1 + p_deg;
        let rule = TetRule::collapsed((deg + 3).div_ceil(2));
        let mesh = &self.mesh;
        let parts: Vec<Vec<f64>> = (0..mesh.tets.len())
            .into_par_iter()
            .map(|t| {
                let p = mesh.tet_vertices(t);
                let (g, vol) = tet_gradients(p);
                let mut fe = Vec::new();
                for (b, w) in &rule.points {
                    let x = [0, 1, 2].map(|k| b[0] * p[0][k] + b[1] * p[1][k] + b[2] * p[2][k] + b[3] * p[3][k]);
                    let f = applied_force(forces, eps, x);
                    let (n, _) = shape(order, *b, &g);
                    fe.resize(3 * n.len(), 0.0);
                    for (a, na) in n.iter().enumerate() {
                        for i in 0..3 {
                            fe[3 * a + i] += w * vol * na * f[i];
                        }
                    }
                }
                fe
            })
            .collect();
        let mut rhs = vec![0.0; self.dof_count()];
        for (t, fe) in parts.iter().enumerate() {
            for (a, v) in mesh.element_nodes(t).into_iter().enumerate() {
                if let Some(f) = self.free[v] {
                    for i in 0..3 {
                        rhs[3 * f + i] += fe[3 * a + i];
                    }
                }
            }
        }
        rhs
    }

    pub fn solve(&self, forces: &ForceProfile) -> Result<Elastic3DSolution> {
        forces.validate(self.mesh.profile.length)?;
        let b = self.load_vector(forces);
        let x = refine(&self.matrix, &self.factor, &b);
        let residual = self.matrix.relative_residual(&x, &b);
        if residual > 1e-9 {
            return Err(Error::Solver(format!("3D residual {residual:e} exceeds 1e-9")));
        }
        let energy = self.matrix.bilinear(&x, &x);
        let work: f64 = b.iter().zip(&x).map(|(p, q)| p * q).sum();
        let mut displacement = vec![[0.0; 3]; self.mesh.node_count()];
        for (d, f) in displacement.iter_mut().zip(&self.free) {
            if let Some(f) = f {
                *d = [x[3 * f], x[3 * f + 1], x[3 * f + 2]];
            }
        }
        let strain_norm_sq = strain_norm_sq(&self.mesh, &displacement);
        Ok(Elastic3DSolution { displacement, energy, work, residual, strain_norm_sq })
    }
}

/// ‖(∇u)_S‖² of a finite element field on the mesh.
pub fn strain_norm_sq(mesh: &TaperedMesh3D, u: &[[f64; 3]]) -> f64 {
    let order = mesh.order;
    let parts: Vec<f64> = (0..mesh.tets.len())
        .into_par_iter()
        .map(|t| {
            let (g, vol) = tet_gradients(mesh.tet_vertices(t));
            let nodes = mesh.element_nodes(t);
            let mut s = 0.0;
            for (l, w) in quadrature(order) {
                let (_, d) = shape(order, l, &g);
                let mut grad = [[0.0; 3]; 3];
                for (a, &v) in nodes.iter().enumerate() {
                    for i in 0..3 {
                        for j in 0..3 {
                            grad[i][j] += u[v][i] * d[a][j];
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let e = 0.5 * (grad[i][j] + grad[j][i]);
                        s += w * vol * e * e;
                    }
                }
            }
            s
        })
        .collect();
    parts.iter().sum()
}

/// Assemble, factor and solve one load case.
pub fn solve_elasticity_3d(
    mesh: TaperedMesh3D,
    material: Material,
    forces: &ForceProfile,
) -> Result<Elastic3DSolution> {
    Elastic3DSystem::assemble(mesh, material)?.solve(forces)
}
