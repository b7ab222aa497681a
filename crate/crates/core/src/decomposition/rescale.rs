use serde::{Deserialize, Serialize};

use super::decompose::RodDomain;
use super::field::{norm_sq, Field3D, Mat3, Vec3};
use crate::geometry::RodProfile;

/// Π_ε φ on the reference rod Ω = ω × (0, L):
/// (Π_ε φ)(X₁, X₂, x₃) = φ(ερ_ε(x₃)X₁, ερ_ε(x₃)X₂, x₃).
pub struct Rescaled<'a, F: Field3D + ?Sized> {
    pub field: &'a F,
    pub profile: RodProfile,
}

pub fn rescale<F: Field3D + ?Sized>(field: &F, profile: RodProfile) -> Rescaled<'_, F> {
    Rescaled { field, profile }
}

impl<F: Field3D + ?Sized> Rescaled<'_, F> {
    fn physical(&self, x: Vec3) -> Vec3 {
        let s = self.profile.scale(x[2]);
        [s * x[0], s * x[1], x[2]]
    }
}

impl<F: Field3D + ?Sized> Field3D for Rescaled<'_, F> {
    fn value(&self, x: Vec3) -> Vec3 {
        self.field.value(self.physical(x))
    }

    /// ∂/∂X_α = ερ_ε Π(∂φ/∂x_α) and
    /// ∂/∂x₃ = ερ_ε'(X₁Π(∂φ/∂x₁) + X₂Π(∂φ/∂x₂)) + Π(∂φ/∂x₃).
    fn gradient(&self, x: Vec3) -> Mat3 {
        let p = &self.profile;
        let s = p.scale(x[2]);
        let ds = p.epsilon * p.rho_eps_slope();
        let g = self.field.gradient(self.physical(x));
        g.map(|r| [s * r[0], s * r[1], ds * (x[0] * r[0] + x[1] * r[1]) + r[2]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormIdentity {
    /// ‖Π_ε φ‖ on Ω.
    pub rescaled: f64,
    /// (1/ε)‖φ/ρ_ε‖ on Ω_ε.
    pub physical: f64,
    pub relative_gap: f64,
}

/// Both sides of ‖Π_εφ‖_{L²(Ω)} = (1/ε)‖φ/ρ_ε‖_{L²(Ω_ε)}. The two sides
/// use different quadratures: `reference` integrates on Ω directly, and
/// `physical` on Ω_ε through the dilation Jacobian.
pub fn norm_identity<F: Field3D + ?Sized>(field: &F, reference: &RodDomain, physical: &RodDomain) -> NormIdentity {
    let p = reference.profile;
    let r = rescale(field, p);
    let q = &reference.section;
    let lhs: f64 =
        reference.axial.iter().map(|&(x3, w3)| w3 * q.integrate(|x| norm_sq(r.value([x[0], x[1], x3])))).sum();
    let pp = physical.profile;
    let rhs = physical.integrate(|x| norm_sq(field.value(x)) / pp.rho_eps(x[2]).powi(2)) / (pp.epsilon * pp.epsilon);
    let (lhs, rhs) = (lhs.sqrt(), rhs.sqrt());
    let scale = lhs.max(rhs);
    NormIdentity {
        rescaled: lhs,
        physical: rhs,
        relative_gap: if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale },
    }
}
