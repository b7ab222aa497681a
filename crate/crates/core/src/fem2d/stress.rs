//! The limit matrix T of rescaled symmetric gradients and the energy
//! density it carries.

use super::torsion::TorsionSolution;
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, Material};
use crate::ode1d::{LimitField, LimitState};

pub type Sym3 = [[f64; 3]; 3];

/// T at (X₁, X₂, x₃) from a limit state, ρ = 1 − x₃/L and ∇χ(X).
pub fn stress_from_state(s: &LimitState, rho: f64, x: [f64; 2], grad_chi: [f64; 2], nu: f64) -> Sym3 {
    let r2 = rho * rho;
    let t33 = rho * s.du[2] - r2 * (x[0] * s.d2u[0] + x[1] * s.d2u[1]);
    let t13 = (-x[1] + grad_chi[0]) * 0.5 * r2 * s.dr3;
    let t23 = (x[0] + grad_chi[1]) * 0.5 * r2 * s.dr3;
    let t11 = -nu * t33;
    [[t11, 0.0, t13], [0.0, t11, t23], [t13, t23, t33]]
}

/// Evaluator of T over Ω = ω × [0, L].
pub struct LimitStressT<'a> {
    field: &'a dyn LimitField,
    torsion: &'a TorsionSolution,
    section: &'a CrossSection,
    nu: f64,
}

impl<'a> LimitStressT<'a> {
    pub fn new(
        field: &'a dyn LimitField,
        torsion: &'a TorsionSolution,
        material: &Material,
        section: &'a CrossSection,
    ) -> Self {
        Self { field, torsion, section, nu: material.poisson() }
    }

    pub fn eval(&self, p: [f64; 3]) -> Result<Sym3> {
        let l = self.field.length();
        let x = [p[0], p[1]];
        if !(0.0..=l).contains(&p[2]) || !self.section.polygon.contains(x, 1e-12) {
            return Err(Error::Domain(format!("point {p:?} is outside the reference rod")));
        }
        let state = self.field.state(p[2])?;
        // A point on the polygon may miss the mesh by rounding; ∇χ is then
        // taken from the nearest-centroid triangle.
        let g = self.torsion.gradient_at(x).unwrap_or_else(|| {
            let m = &self.torsion.mesh;
            let t = (0..m.triangle_count())
                .min_by(|&a, &b| dist2(centroid(m.vertices(a)), x).total_cmp(&dist2(centroid(m.vertices(b)), x)))
                .expect("mesh has triangles");
            self.torsion.element_gradient(t)
        });
        Ok(stress_from_state(&state, 1.0 - p[2] / l, x, g, self.nu))
    }
}

fn centroid(v: [[f64; 2]; 3]) -> [f64; 2] {
    [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0]
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// T at one point.
pub fn limit_stress(
    field: &dyn LimitField,
    torsion: &TorsionSolution,
    material: &Material,
    section: &CrossSection,
    point: [f64; 3],
) -> Result<Sym3> {
    LimitStressT::new(field, torsion, material, section).eval(point)
}

/// λ tr(T)² + 2μ Σ T_ij².
pub fn energy_density(t: &Sym3, m: &Material) -> f64 {
    let tr = t[0][0] + t[1][1] + t[2][2];
    let sq: f64 = t.iter().flatten().map(|v| v * v).sum();
    m.lambda * tr * tr + 2.0 * m.mu * sq
}

/// E T₃₃² + E/((1+ν)(1−2ν)) (T₁₁ + T₂₂ + 2νT₃₃)² + E/(2(1+ν)) [(T₁₁ − T₂₂)² + 4(T₁₂² + T₁₃² + T₂₃²)].
///
/// Equals [`energy_density`] when T₁₁ = T₂₂ = −νT₃₃, which is the case for
/// the limit T; it is not an identity for general symmetric T.
pub fn energy_density_split(t: &Sym3, m: &Material) -> f64 {
    let e = m.young();
    let nu = m.poisson();
    let a = t[0][0] + t[1][1] + 2.0 * nu * t[2][2];
    let d = t[0][0] - t[1][1];
    let shear = t[0][1].powi(2) + t[0][2].powi(2) + t[1][2].powi(2);
    e * t[2][2].powi(2) + e / ((1.0 + nu) * (1.0 - 2.0 * nu)) * a * a + e / (2.0 * (1.0 + nu)) * (d * d + 4.0 * shear)
}
