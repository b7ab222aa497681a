use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// A simple, counterclockwise polygon. Construction validates the vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon {
    vertices: Vec<Point2>,
}

/// Area, first and second moments of a polygon about the coordinate origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub area: f64,
    /// (∫x₁, ∫x₂)
    pub first: [f64; 2],
    /// (∫x₁², ∫x₂², ∫x₁x₂)
    pub second: [f64; 3],
}

impl Moments {
    pub fn centroid(&self) -> Point2 {
        [self.first[0] / self.area, self.first[1] / self.area]
    }

    /// Second moments about the centroid.
    pub fn central(&self) -> [f64; 3] {
        let c = self.centroid();
        [
            self.second[0] - self.area * c[0] * c[0],
            self.second[1] - self.area * c[1] * c[1],
            self.second[2] - self.area * c[0] * c[1],
        ]
    }
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidGeometry(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
        }
        if let Some(v) = vertices.iter().find(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::InvalidGeometry(format!("non-finite vertex {v:?}")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidGeometry(format!("repeated consecutive vertex at index {i}")));
            }
        }
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "signed area {area} is not positive (vertices must be counterclockwise)"
            )));
        }
        if let Some((i, j)) = first_crossing(&vertices) {
            return Err(Error::InvalidGeometry(format!("polygon is not simple: edges {i} and {j} intersect")));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        d
    }

    /// Rigid image x ↦ R(angle)·x + shift.
    pub fn transformed(&self, angle: f64, shift: Point2) -> Self {
        let (s, c) = angle.sin_cos();
        let vertices =
            self.vertices.iter().map(|v| [c * v[0] - s * v[1] + shift[0], s * v[0] + c * v[1] + shift[1]]).collect();
        Self { vertices }
    }

    /// Is the point inside or on the boundary (within `tol`)?
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if point_segment_distance(p, a, b) <= tol {
                return true;
            }
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

impl TryFrom<Vec<Point2>> for Polygon {
    type Error = Error;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point2> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

pub(crate) fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

// O(n²) test over non-adjacent edge pairs; adjacent edges may only share
// their common vertex, which is checked through collinear overlap.
fn first_crossing(v: &[Point2]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared vertex is fine; a fold-back along the same line is not
                let shared_is_b = j == i + 1;
                let (p, q, r) = if shared_is_b { (a, b, d) } else { (b, a, c) };
                if orient(p, q, r) == 0.0 {
                    let u = [q[0] - p[0], q[1] - p[1]];
                    let w = [r[0] - q[0], r[1] - q[1]];
                    if u[0] * w[0] + u[1] * w[1] < 0.0 {
                        return Some((i, j));
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (ap[0] - t * ab[0]).hypot(ap[1] - t * ab[1])
}

/// Exact polygon integrals of 1, x₁, x₂, x₁², x₂², x₁x₂ by Green's theorem.
pub fn polygon_moments(p: &Polygon) -> Result<Moments> {
    let v = p.vertices();
    let n = v.len();
    let (mut a, mut sx, mut sy, mut ixx, mut iyy, mut ixy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let [x0, y0] = v[i];
        let [x1, y1] = v[(i + 1) % n];
        let cr = x0 * y1 - x1 * y0;
        a += cr;
        sx += (x0 + x1) * cr;
        sy += (y0 + y1) * cr;
        ixx += (x0 * x0 + x0 * x1 + x1 * x1) * cr;
        iyy += (y0 * y0 + y0 * y1 + y1 * y1) * cr;
        ixy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * cr;
    }
    let area = a / 2.0;
    if !(area > 0.0) {
        return Err(Error::InvalidGeometry(format!("degenerate polygon, area {area}")));
    }
    Ok(Moments { area, first: [sx / 6.0, sy / 6.0], second: [ixx / 12.0, iyy / 12.0, ixy / 24.0] })
}
