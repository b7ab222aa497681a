//! Polygonal stand-ins for the named sections.

use std::f64::consts::PI;

use super::polygon::{Point2, Polygon};
use crate::error::{Error, Result};

/// Regular n-gon inscribed in the circle of the given radius.
pub fn disc(radius: f64, segments: usize) -> Result<Polygon> {
    ellipse(radius, radius, segments)
}

/// Polygon inscribed in the ellipse with semi-axes `a` (along x₁) and `b`.
pub fn ellipse(a: f64, b: f64, segments: usize) -> Result<Polygon> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidGeometry(format!("semi-axes must be positive, got ({a}, {b})")));
    }
    if segments < 3 {
        return Err(Error::InvalidGeometry(format!("need at least 3 segments, got {segments}")));
    }
    let v: Vec<Point2> = (0..segments)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / segments as f64;
            [a * t.cos(), b * t.sin()]
        })
        .collect();
    Polygon::new(v)
}

/// Axis-aligned rectangle centered at the origin.
pub fn rectangle(width: f64, height: f64) -> Result<Polygon> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::InvalidGeometry(format!("rectangle sides must be positive, got ({width}, {height})")));
    }
    let (w, h) = (width / 2.0, height / 2.0);
    Polygon::new(vec![[-w, -h], [w, -h], [w, h], [-w, h]])
}
