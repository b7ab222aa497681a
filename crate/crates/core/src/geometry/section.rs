use serde::{Deserialize, Serialize};

use super::polygon::{polygon_moments, Point2, Polygon};
use crate::error::Result;

/// A cross-section ω expressed in its principal frame: centroid at the
/// origin and ∫x₁x₂ = 0, with I₁ = ∫x₁² ≥ I₂ = ∫x₂².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub polygon: Polygon,
    pub area: f64,
    pub inertia1: f64,
    pub inertia2: f64,
    /// Angle θ such that the stored polygon is R(−θ)(p − centroid_shift).
    pub rotation_applied: f64,
    pub centroid_shift: Point2,
}

impl CrossSection {
    pub fn polar_inertia(&self) -> f64 {
        self.inertia1 + self.inertia2
    }

    /// I_α for α ∈ {1, 2}.
    pub fn inertia(&self, alpha: usize) -> f64 {
        match alpha {
            1 => self.inertia1,
            2 => self.inertia2,
            _ => panic!("inertia index must be 1 or 2, got {alpha}"),
        }
    }

    /// Residual first moments and product of inertia of the stored polygon.
    pub fn frame_residuals(&self) -> Result<[f64; 3]> {
        let m = polygon_moments(&self.polygon)?;
        Ok([m.first[0], m.first[1], m.second[2]])
    }
}

/// Translate and rotate `p` into its principal frame.
pub fn principal_frame(p: &Polygon) -> Result<CrossSection> {
    let m = polygon_moments(p)?;
    let c = m.centroid();
    let [cxx, cyy, cxy] = m.central();
    let spread = (cxx - cyy).hypot(2.0 * cxy);
    let theta = if spread <= 1e-12 * (cxx + cyy) { 0.0 } else { 0.5 * (2.0 * cxy).atan2(cxx - cyy) };
    let (s, co) = theta.sin_cos();
    let vertices: Vec<Point2> = p
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = (v[0] - c[0], v[1] - c[1]);
            [co * x + s * y, -s * x + co * y]
        })
        .collect();
    let polygon = Polygon::new(vertices)?;
    let mm = polygon_moments(&polygon)?;
    Ok(CrossSection {
        polygon,
        area: mm.area,
        inertia1: mm.second[0],
        inertia2: mm.second[1],
        rotation_applied: theta,
        centroid_shift: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rect() -> Polygon {
        Polygon::new(vec![[-1.0, -0.5], [1.0, -0.5], [1.0, 0.5], [-1.0, 0.5]]).unwrap()
    }

    #[test]
    fn centered_square_is_identity() {
        let sq = Polygon::new(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
        let s = principal_frame(&sq).unwrap();
        assert_eq!(s.rotation_applied, 0.0);
        assert_eq!(s.centroid_shift, [0.0, 0.0]);
        assert!((s.inertia1 - 1.0 / 12.0).abs() < 1e-15);
        assert!((s.inertia2 - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn translated_square() {
        let sq = Polygon::new(vec![[2.5, -2.5], [3.5, -2.5], [3.5, -1.5], [2.5, -1.5]]).unwrap();
        let s = principal_frame(&sq).unwrap();
        assert!((s.centroid_shift[0] - 3.0).abs() < 1e-14);
        assert!((s.centroid_shift[1] + 2.0).abs() < 1e-14);
        assert!((s.inertia1 - 1.0 / 12.0).abs() < 1e-13);
        assert_eq!(s.rotation_applied, 0.0);
    }

    #[test]
    fn rotated_rectangle_recovers_inertias() {
        for deg in [30.0, -75.0, 90.0, 135.0] {
            let p = rect().transformed(deg * PI / 180.0, [0.3, -1.2]);
            let s = principal_frame(&p).unwrap();
            assert!((s.inertia1 - 2.0 / 3.0).abs() < 1e-10, "{deg}: {}", s.inertia1);
            assert!((s.inertia2 - 1.0 / 6.0).abs() < 1e-10);
            assert!(s.rotation_applied > -PI / 2.0 && s.rotation_applied <= PI / 2.0);
            let r = s.frame_residuals().unwrap();
            assert!(r.iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn tall_rectangle_is_rotated_a_quarter_turn() {
        let p = Polygon::new(vec![[-0.5, -1.0], [0.5, -1.0], [0.5, 1.0], [-0.5, 1.0]]).unwrap();
        let s = principal_frame(&p).unwrap();
        assert!((s.rotation_applied - PI / 2.0).abs() < 1e-15);
        assert!(s.inertia1 > s.inertia2);
    }

    #[test]
    fn idempotent() {
        let p = rect().transformed(0.4, [1.0, 2.0]);
        let s1 = principal_frame(&p).unwrap();
        let s2 = principal_frame(&s1.polygon).unwrap();
        assert!(s2.rotation_applied.abs() < 1e-12);
        assert!(s2.centroid_shift[0].abs() < 1e-12 && s2.centroid_shift[1].abs() < 1e-12);
    }
}
