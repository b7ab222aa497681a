use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{add, cross, sub, Field3D, Mat3, Vec3};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, RodProfile};
use crate::mesh::ear_clip;
use crate::quadrature::{gauss_on, TriangleRule};

/// Quadrature on the reference section ω: the ear-clipped triangulation
/// with a collapsed Gauss rule per triangle.
#[derive(Debug, Clone)]
pub struct SectionQuadrature {
    pub points: Vec<([f64; 2], f64)>,
    pub area: f64,
    pub inertia1: f64,
    pub inertia2: f64,
}

impl SectionQuadrature {
    /// `order` Gauss points per direction, exact to degree 2·order − 2.
    pub fn new(section: &CrossSection, order: usize) -> Result<Self> {
        let mesh = ear_clip(&section.polygon)?;
        let rule = TriangleRule::collapsed(order);
        let mut points = Vec::with_capacity(mesh.triangle_count() * rule.points.len());
        for t in 0..mesh.triangle_count() {
            let v = mesh.vertices(t);
            let a = mesh.signed_area(t);
            for (b, w) in &rule.points {
                let x = [0, 1].map(|k| b[0] * v[0][k] + b[1] * v[1][k] + b[2] * v[2][k]);
                points.push((x, w * a));
            }
        }
        let sum = |f: &dyn Fn([f64; 2]) -> f64| points.iter().map(|(x, w)| w * f(*x)).sum::<f64>();
        let area = sum(&|_| 1.0);
        let inertia1 = sum(&|x| x[0] * x[0]);
        let inertia2 = sum(&|x| x[1] * x[1]);
        Ok(Self { points, area, inertia1, inertia2 })
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points.iter().map(|(x, w)| w * f(*x)).sum()
    }
}

/// The physical rod Ω_ε with quadrature on sections and along the axis.
#[derive(Debug, Clone)]
pub struct RodDomain {
    pub profile: RodProfile,
    pub section: SectionQuadrature,
    /// Gauss points and weights on (0, L).
    pub axial: Vec<(f64, f64)>,
}

impl RodDomain {
    pub fn new(
        profile: RodProfile,
        section: &CrossSection,
        section_order: usize,
        axial_pieces: usize,
        axial_order: usize,
    ) -> Result<Self> {
        if axial_pieces == 0 || axial_order == 0 {
            return Err(Error::Precondition("axial quadrature needs at least one point".into()));
        }
        let l = profile.length;
        let axial = (0..axial_pieces)
            .flat_map(|k| {
                let a = l * k as f64 / axial_pieces as f64;
                let b = l * (k + 1) as f64 / axial_pieces as f64;
                gauss_on(axial_order, a, b)
            })
            .collect();
        Ok(Self { profile, section: SectionQuadrature::new(section, section_order)?, axial })
    }

    /// Defaults sized for polynomial fields of moderate degree.
    pub fn standard(profile: RodProfile, section: &CrossSection) -> Result<Self> {
        Self::new(profile, section, 6, 16, 8)
    }

    /// ∫_{Ω_ε} f, with f evaluated at physical points.
    pub fn integrate(&self, f: impl Fn(Vec3) -> f64 + Sync) -> f64 {
        let parts: Vec<f64> = self
            .axial
            .par_iter()
            .map(|&(x3, w3)| {
                let s = self.profile.scale(x3);
                w3 * s * s * self.section.integrate(|p| f([s * p[0], s * p[1], x3]))
            })
            .collect();
        parts.iter().sum()
    }
}

/// 𝒰, ℛ and their x₃-derivatives on one section.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SectionState {
    pub x3: f64,
    pub ucal: Vec3,
    pub rcal: Vec3,
    pub ducal: Vec3,
    pub drcal: Vec3,
}

/// The elementary displacement U_e = 𝒰(x₃) + ℛ(x₃) ∧ (x₁e₁ + x₂e₂) of a
/// field on Ω_ε. Derivatives in x₃ use the chain rule through the
/// dilation of the section, so they are as exact as the section rule.
pub struct ElementaryDisplacement<'a, F: Field3D + ?Sized> {
    pub field: &'a F,
    pub domain: &'a RodDomain,
}

pub fn elementary_decompose<'a, F: Field3D + ?Sized>(
    field: &'a F,
    domain: &'a RodDomain,
) -> ElementaryDisplacement<'a, F> {
    ElementaryDisplacement { field, domain }
}

impl<F: Field3D + ?Sized> ElementaryDisplacement<'_, F> {
    pub fn at(&self, x3: f64) -> SectionState {
        let p = &self.domain.profile;
        let q = &self.domain.section;
        let s = p.scale(x3);
        let ds = p.epsilon * p.rho_eps_slope();
        // Integrals over ω of u(sX), X∧u moments, and their total x₃-derivatives.
        let mut m = [0.0; 3];
        let mut dm = [0.0; 3];
        let mut j = [0.0; 3];
        let mut dj = [0.0; 3];
        for &(x, w) in &q.points {
            let xp = [s * x[0], s * x[1], x3];
            let u = self.field.value(xp);
            let g = self.field.gradient(xp);
            let du: Vec3 = std::array::from_fn(|i| ds * (x[0] * g[i][0] + x[1] * g[i][1]) + g[i][2]);
            for i in 0..3 {
                m[i] += w * u[i];
                dm[i] += w * du[i];
            }
            // [X ∧ u]: (X₂u₃, −X₁u₃, X₁u₂ − X₂u₁)
            let mo = |u: Vec3| [x[1] * u[2], -x[0] * u[2], x[0] * u[1] - x[1] * u[0]];
            let (a, b) = (mo(u), mo(du));
            for i in 0..3 {
                j[i] += w * a[i];
                dj[i] += w * b[i];
            }
        }
        let c = [q.inertia2, q.inertia1, q.inertia1 + q.inertia2];
        let ucal = m.map(|v| v / q.area);
        let ducal = dm.map(|v| v / q.area);
        let rcal: Vec3 = std::array::from_fn(|i| j[i] / (c[i] * s));
        let drcal: Vec3 = std::array::from_fn(|i| dj[i] / (c[i] * s) - ds * j[i] / (c[i] * s * s));
        SectionState { x3, ucal, rcal, ducal, drcal }
    }

    /// U_e at a physical point.
    pub fn elementary(&self, x: Vec3) -> Vec3 {
        let st = self.at(x[2]);
        add(st.ucal, cross(st.rcal, [x[0], x[1], 0.0]))
    }

    /// ū = u − U_e.
    pub fn warping(&self, x: Vec3) -> Vec3 {
        sub(self.field.value(x), self.elementary(x))
    }

    /// ū and ∇ū given the section state at x₃ = x[2].
    pub fn warping_with_gradient(&self, st: &SectionState, x: Vec3) -> (Vec3, Mat3) {
        let xy = [x[0], x[1], 0.0];
        let ue = add(st.ucal, cross(st.rcal, xy));
        let mut g = self.field.gradient(x);
        let c1 = cross(st.rcal, [1.0, 0.0, 0.0]);
        let c2 = cross(st.rcal, [0.0, 1.0, 0.0]);
        let c3 = add(st.ducal, cross(st.drcal, xy));
        for i in 0..3 {
            g[i][0] -= c1[i];
            g[i][1] -= c2[i];
            g[i][2] -= c3[i];
        }
        (sub(self.field.value(x), ue), g)
    }

    pub fn sample(&self, grid: &[f64]) -> Vec<SectionState> {
        grid.par_iter().map(|&x3| self.at(x3)).collect()
    }
}

/// Relative residuals of the six orthogonality conditions of the warping
/// on one section: ∫ū_i, ∫(x₁ū₂ − x₂ū₁), ∫x₁ū₃, ∫x₂ū₃. Each is divided by
/// the same functional applied to |u|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityResidual {
    pub x3: f64,
    pub residuals: [f64; 6],
}

impl OrthogonalityResidual {
    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

pub fn warping_orthogonality<F: Field3D + ?Sized>(
    e: &ElementaryDisplacement<'_, F>,
    grid: &[f64],
) -> Vec<OrthogonalityResidual> {
    let q = &e.domain.section;
    grid.par_iter()
        .map(|&x3| {
            let st = e.at(x3);
            let s = e.domain.profile.scale(x3);
            let mut r = [0.0; 6];
            let mut scale = [0.0; 6];
            for &(p, w) in &q.points {
                let x = [s * p[0], s * p[1], x3];
                let u = e.field.value(x);
                let ub = sub(u, add(st.ucal, cross(st.rcal, [x[0], x[1], 0.0])));
                let f = [ub[0], ub[1], ub[2], x[0] * ub[1] - x[1] * ub[0], x[0] * ub[2], x[1] * ub[2]];
                let a = u.map(f64::abs);
                let h = x[0].hypot(x[1]);
                let g = [a[0], a[1], a[2], h * (a[0] + a[1]), h * a[2], h * a[2]];
                for k in 0..6 {
                    r[k] += w * f[k];
                    scale[k] += w * g[k];
                }
            }
            let residuals = std::array::from_fn(|k| if scale[k] > 0.0 { r[k] / scale[k] } else { r[k] });
            OrthogonalityResidual { x3, residuals }
        })
        .collect()
}
