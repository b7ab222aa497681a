use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::mesh3d::{build_tapered_mesh, ElementOrder, LayerSpec, TaperedMesh3D};
use super::solve3d::{Elastic3DSolution, Elastic3DSystem};
use crate::error::{Error, Result};
use crate::fem2d::{mesh_inertia, solve_torsion};
use crate::geometry::{CrossSection, Material, RodProfile};
use crate::mesh::{triangulate_levels, TriMesh};
use crate::ode1d::{LimitField, LimitModel, LoadCase, SectionConstants};
use crate::quadrature::TriangleRule;

/// Cross-section averages of a 3D field on one layer plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerState {
    pub z: f64,
    pub ucal: [f64; 3],
    pub rcal: [f64; 3],
}

/// 𝒰 and ℛ on every layer plane, integrating the trace of the finite
/// element field exactly on the reference section.
pub fn extract_layers(mesh: &TaperedMesh3D, u: &[[f64; 3]]) -> Vec<LayerState> {
    let base = &mesh.base;
    let n2 = base.node_count();
    let area = base.area();
    let (i1, i2) = mesh_inertia(base);
    let rule = TriangleRule::collapsed(3);
    let quadratic = mesh.order == ElementOrder::Quadratic;
    mesh.layers
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let s = mesh.profile.scale(z);
            let mut m = [0.0; 3];
            // ∫X₁u₂ − X₂u₁, ∫X₂u₃, ∫X₁u₃
            let (mut t3, mut x2u3, mut x1u3) = (0.0, 0.0, 0.0);
            for t in 0..base.triangle_count() {
                let tri = base.triangles[t];
                let a = base.signed_area(t);
                let x = tri.map(|i| base.nodes[i]);
                let v = tri.map(|i| u[k * n2 + i]);
                let e = quadratic.then(|| mesh.tri_edges[t].map(|j| u[mesh.plane_mid(k, j)]));
                for (l, w) in &rule.points {
                    let (n, nm) = if quadratic {
                        (l.map(|li| li * (2.0 * li - 1.0)), [4.0 * l[0] * l[1], 4.0 * l[1] * l[2], 4.0 * l[0] * l[2]])
                    } else {
                        (*l, [0.0; 3])
                    };
                    let mut val = [0.0; 3];
                    for c in 0..3 {
                        val[c] = (0..3).map(|q| n[q] * v[q][c]).sum();
                        if let Some(e) = e {
                            val[c] += (0..3).map(|q| nm[q] * e[q][c]).sum::<f64>();
                        }
                    }
                    let p = [0, 1].map(|d| l[0] * x[0][d] + l[1] * x[1][d] + l[2] * x[2][d]);
                    let wa = w * a;
                    for c in 0..3 {
                        m[c] += wa * val[c];
                    }
                    t3 += wa * (p[0] * val[1] - p[1] * val[0]);
                    x2u3 += wa * p[1] * val[2];
                    x1u3 += wa * p[0] * val[2];
                }
            }
            LayerState { z, ucal: m.map(|v| v / area), rcal: [x2u3 / (i2 * s), -x1u3 / (i1 * s), t3 / ((i1 + i2) * s)] }
        })
        .collect()
}

/// The extracted quantity compared with the limit for each load case and
/// the power of ρ weighting its slope.
fn case_quantity(case: LoadCase, eps: f64, st: &LayerState) -> f64 {
    match case {
        LoadCase::Stretch => st.ucal[2] / eps,
        LoadCase::Bending1 => st.ucal[0],
        LoadCase::Bending2 => st.ucal[1],
        LoadCase::Torsion => st.rcal[2],
    }
}

fn limit_quantity(case: LoadCase, f: &dyn LimitField, z: f64) -> Result<f64> {
    let s = f.state(z)?;
    Ok(match case {
        LoadCase::Stretch => s.u[2],
        LoadCase::Bending1 => s.u[0],
        LoadCase::Bending2 => s.u[1],
        LoadCase::Torsion => s.r3,
    })
}

fn slope_weight(case: LoadCase) -> i32 {
    match case {
        LoadCase::Torsion => 2,
        _ => 1,
    }
}

/// Relative weighted discrepancy of layer slopes:
/// ‖ρ^w (q' − Q')‖ / ‖ρ^w Q'‖ with difference quotients over each layer.
pub fn slope_discrepancy(
    case: LoadCase,
    mesh: &TaperedMesh3D,
    layers: &[LayerState],
    limit: &dyn LimitField,
) -> Result<f64> {
    let p = &mesh.profile;
    if (limit.length() - p.length).abs() > 1e-12 * p.length {
        return Err(Error::Precondition(format!(
            "limit length {} differs from rod length {}",
            limit.length(),
            p.length
        )));
    }
    let w = slope_weight(case);
    let (mut num, mut den) = (0.0, 0.0);
    for pair in layers.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let dz = b.z - a.z;
        let r = p.rho(0.5 * (a.z + b.z)).powi(2 * w);
        let q = (case_quantity(case, p.epsilon, b) - case_quantity(case, p.epsilon, a)) / dz;
        let lq = (limit_quantity(case, limit, b.z)? - limit_quantity(case, limit, a.z)?) / dz;
        num += dz * r * (q - lq).powi(2);
        den += dz * r * lq * lq;
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub case: LoadCase,
    pub discrepancy: f64,
    /// ℰ(u^ε)/ε⁴.
    pub scaled_energy: f64,
    pub limit_energy: f64,
    /// |ℰ/ε⁴ − limit energy|.
    pub energy_gap: f64,
    /// (ℰ/ε⁴) / limit energy.
    pub energy_ratio: f64,
    /// Relative gap between ℰ(u) and ∫F·u.
    pub energy_relation_gap: f64,
    /// ℰ(u) / (2μ‖(∇u)_S‖²), at least 1 when λ ≥ 0.
    pub coercivity_ratio: f64,
    pub residual: f64,
    pub dofs: usize,
    pub layers: usize,
    pub base_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "epsilon,case,discrepancy,energy_gap,scaled_energy,limit_energy,energy_ratio,dofs,layers,base_nodes\n",
        );
        for r in &self.rows {
            writeln!(
                s,
                "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                r.epsilon,
                r.case.name(),
                r.discrepancy,
                r.energy_gap,
                r.scaled_energy,
                r.limit_energy,
                r.energy_ratio,
                r.dofs,
                r.layers,
                r.base_nodes
            )
            .unwrap();
        }
        s
    }

    /// Rows of one case ordered by decreasing ε.
    pub fn case_rows(&self, case: LoadCase) -> Vec<&ConvergenceRow> {
        let mut v: Vec<&ConvergenceRow> = self.rows.iter().filter(|r| r.case == case).collect();
        v.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
        v
    }

    /// Whether the discrepancy strictly decreases as ε decreases.
    pub fn monotone(&self, case: LoadCase) -> bool {
        self.case_rows(case).windows(2).all(|w| w[1].discrepancy < w[0].discrepancy)
    }
}

/// Everything a convergence study needs besides the ε list.
#[derive(Debug, Clone)]
pub struct ConvergenceSetup {
    pub base: TriMesh,
    pub material: Material,
    pub length: f64,
    /// Torsional stiffness K of the section used by the limit model.
    pub stiffness: f64,
    pub layers: LayerSpec,
    pub order: ElementOrder,
}

impl ConvergenceSetup {
    /// Quadratic tets on a section refined `levels` times, one section
    /// width per layer; K from the same section refined twice more.
    pub fn new(section: &CrossSection, material: Material, length: f64, levels: usize) -> Result<Self> {
        let base = triangulate_levels(section, levels)?;
        let stiffness = solve_torsion(&triangulate_levels(section, levels + 2)?)?.stiffness;
        Ok(Self {
            base,
            material,
            length,
            stiffness,
            layers: LayerSpec::GradedAspect { aspect: 1.0, min_layers: 8 },
            order: ElementOrder::Quadratic,
        })
    }

    pub fn limit_model(&self) -> Result<LimitModel> {
        let (i1, i2) = mesh_inertia(&self.base);
        let c = SectionConstants { area: self.base.area(), inertia1: i1, inertia2: i2, stiffness: self.stiffness };
        LimitModel::new(self.length, self.material, c)
    }

    /// One factorization per ε, one solve per load case.
    pub fn run(&self, epsilons: &[f64], cases: &[LoadCase]) -> Result<ConvergenceReport> {
        let model = self.limit_model()?;
        let limits = cases.iter().map(|c| model.solve(&c.unit_forces(self.length))).collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for &eps in epsilons {
            let profile = RodProfile::new(self.length, eps)?;
            let mesh = build_tapered_mesh(&self.base, profile, self.layers, self.order)?;
            let system = Elastic3DSystem::assemble(mesh, self.material)?;
            for (case, limit) in cases.iter().zip(&limits) {
                let sol = system.solve(&case.unit_forces(self.length))?;
                rows.push(self.row(&system, &sol, *case, limit)?);
            }
        }
        Ok(ConvergenceReport { rows })
    }

    fn row(
        &self,
        system: &Elastic3DSystem,
        sol: &Elastic3DSolution,
        case: LoadCase,
        limit: &crate::ode1d::LimitSolution,
    ) -> Result<ConvergenceRow> {
        let mesh = &system.mesh;
        let eps = mesh.profile.epsilon;
        let layers = extract_layers(mesh, &sol.displacement);
        let discrepancy = slope_discrepancy(case, mesh, &layers, limit)?;
        let limit_energy = limit.energy()?.elastic_total;
        let scaled_energy = sol.energy / eps.powi(4);
        let coercivity_ratio =
            if sol.strain_norm_sq > 0.0 { sol.energy / (2.0 * self.material.mu * sol.strain_norm_sq) } else { 1.0 };
        Ok(ConvergenceRow {
            epsilon: eps,
            case,
            discrepancy,
            scaled_energy,
            limit_energy,
            energy_gap: (scaled_energy - limit_energy).abs(),
            energy_ratio: scaled_energy / limit_energy,
            energy_relation_gap: sol.energy_gap(),
            coercivity_ratio,
            residual: sol.residual,
            dofs: system.dof_count(),
            layers: mesh.layers.len() - 1,
            base_nodes: mesh.nodes_per_layer(),
        })
    }
}
