//! Triangulation of a cross-section and uniform red refinement.
//!
//! Element size is measured as the largest axis-aligned extent of an edge,
//! max(|Δx₁|, |Δx₂|). With that measure the two-triangle unit square has
//! size 1 and each refinement halves it.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polygon::orient, CrossSection, Point2, Polygon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub nodes: Vec<Point2>,
    /// Counterclockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges oriented with the domain on the left.
    pub boundary_edges: Vec<[usize; 2]>,
}

/// Report of structural checks on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshCheck {
    pub min_signed_area: f64,
    pub edges: usize,
    pub euler: i64,
    pub conforming: bool,
}

impl TriMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        0.5 * orient(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Gradients of the three P1 basis functions on triangle `t`.
    pub fn gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [p0, p1, p2] = self.vertices(t);
        let a2 = orient(p0, p1, p2);
        [
            [(p1[1] - p2[1]) / a2, (p2[0] - p1[0]) / a2],
            [(p2[1] - p0[1]) / a2, (p0[0] - p2[0]) / a2],
            [(p0[1] - p1[1]) / a2, (p1[0] - p0[0]) / a2],
        ]
    }

    /// Largest axis-aligned edge extent.
    pub fn size(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(i, j)| {
                let (a, b) = (self.nodes[i], self.nodes[j]);
                (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Longest Euclidean edge.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(i, j)| {
                let (a, b) = (self.nodes[i], self.nodes[j]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .fold(0.0, f64::max)
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().flat_map(|e| [e[0], e[1]]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Structural checks: orientation, edge sharing, Euler characteristic.
    pub fn check(&self) -> MeshCheck {
        let mut edge_use: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for t in &self.triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let e = edge_use.entry((i.min(j), i.max(j))).or_insert((0, 0));
                if i < j {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let mut conforming = true;
        let mut boundary = 0usize;
        for &(fwd, bwd) in edge_use.values() {
            match (fwd, bwd) {
                (1, 1) => {}
                (1, 0) | (0, 1) => boundary += 1,
                _ => conforming = false,
            }
        }
        if boundary != self.boundary_edges.len() {
            conforming = false;
        }
        for e in &self.boundary_edges {
            match edge_use.get(&(e[0].min(e[1]), e[0].max(e[1]))) {
                Some(&(f, b)) if f + b == 1 => {}
                _ => conforming = false,
            }
        }
        let min_signed_area = (0..self.triangles.len()).map(|t| self.signed_area(t)).fold(f64::INFINITY, f64::min);
        let edges = edge_use.len();
        MeshCheck {
            min_signed_area,
            edges,
            euler: self.nodes.len() as i64 - edges as i64 + self.triangles.len() as i64,
            conforming,
        }
    }

    /// Index of a triangle containing `p` (within a relative tolerance).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        let tol = 1e-12;
        (0..self.triangles.len()).find(|&t| {
            let [a, b, c] = self.vertices(t);
            let area2 = orient(a, b, c);
            let s = tol * area2.abs();
            orient(a, b, p) >= -s && orient(b, c, p) >= -s && orient(c, a, p) >= -s
        })
    }

    /// ∫_ω of a nodal P1 field.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.triangles
            .iter()
            .enumerate()
            .map(|(t, tri)| self.signed_area(t) / 3.0 * tri.iter().map(|&i| values[i]).sum::<f64>())
            .sum()
    }

    /// Plain-text export: header "NODES n TRIS m", node lines, triangle
    /// lines. Each entry of `extra` adds a column to the node lines.
    pub fn to_text(&self, extra: &[&[f64]]) -> String {
        let mut s = String::new();
        writeln!(s, "NODES {} TRIS {}", self.nodes.len(), self.triangles.len()).unwrap();
        for (i, p) in self.nodes.iter().enumerate() {
            write!(s, "{:.16e} {:.16e}", p[0], p[1]).unwrap();
            for col in extra {
                write!(s, " {:.16e}", col[i]).unwrap();
            }
            s.push('\n');
        }
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    /// Parse the text format written by [`TriMesh::to_text`] (extra columns
    /// are ignored). Boundary edges are recovered from edge usage.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "NODES" || h[2] != "TRIS" {
            return Err(Error::Parse(format!("bad mesh header '{header}'")));
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
        let (n, m) = (parse_usize(h[1])?, parse_usize(h[3])?);
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let l = lines.next().ok_or_else(|| Error::Parse("truncated node list".into()))?;
            let v: Vec<f64> = l
                .split_whitespace()
                .take(2)
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 2 {
                return Err(Error::Parse(format!("bad node line '{l}'")));
            }
            nodes.push([v[0], v[1]]);
        }
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let l = lines.next().ok_or_else(|| Error::Parse("truncated triangle list".into()))?;
            let v: Vec<usize> = l.split_whitespace().map(parse_usize).collect::<Result<_>>()?;
            if v.len() != 3 || v.iter().any(|&i| i >= n) {
                return Err(Error::Parse(format!("bad triangle line '{l}'")));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *count.entry((i.min(j), i.max(j))).or_default() += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        for t in &triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                if count[&(i.min(j), i.max(j))] == 1 {
                    boundary_edges.push([i, j]);
                }
            }
        }
        Ok(Self { nodes, triangles, boundary_edges })
    }
}

/// Ear-clipping triangulation of a simple counterclockwise polygon. Among
/// the valid ears, the one whose largest angle is smallest is clipped
/// first; ties go to the earliest remaining vertex.
pub fn ear_clip(p: &Polygon) -> Result<TriMesh> {
    let nodes: Vec<Point2> = p.vertices().to_vec();
    let n = nodes.len();
    let mut ring: Vec<usize> = (0..n).collect();
    let mut triangles = Vec::with_capacity(n - 2);
    while ring.len() > 3 {
        let m = ring.len();
        let mut best: Option<(usize, f64)> = None;
        for k in 0..m {
            let (a, b, c) = (ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]);
            if let Some(q) = ear_quality(&nodes, &ring, a, b, c) {
                if best.is_none_or(|(_, bq)| q > bq) {
                    best = Some((k, q));
                }
            }
        }
        let (k, _) =
            best.ok_or_else(|| Error::InvalidGeometry("ear clipping found no ear (polygon not simple?)".into()))?;
        let m = ring.len();
        triangles.push([ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]]);
        ring.remove(k);
    }
    let [a, b, c] = [ring[0], ring[1], ring[2]];
    if orient(nodes[a], nodes[b], nodes[c]) <= 0.0 {
        return Err(Error::InvalidGeometry("ear clipping left a degenerate triangle".into()));
    }
    triangles.push([a, b, c]);
    let boundary_edges = (0..n).map(|i| [i, (i + 1) % n]).collect();
    Ok(TriMesh { nodes, triangles, boundary_edges })
}

/// Cosine of the largest angle of the ear (a, b, c), or None when the ear
/// is reflex, flat, or contains another ring vertex.
fn ear_quality(nodes: &[Point2], ring: &[usize], a: usize, b: usize, c: usize) -> Option<f64> {
    let (pa, pb, pc) = (nodes[a], nodes[b], nodes[c]);
    if orient(pa, pb, pc) <= 0.0 {
        return None;
    }
    for &v in ring {
        if v == a || v == b || v == c {
            continue;
        }
        let q = nodes[v];
        if orient(pa, pb, q) >= 0.0 && orient(pb, pc, q) >= 0.0 && orient(pc, pa, q) >= 0.0 {
            return None;
        }
    }
    let d2 = |p: Point2, q: Point2| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
    let (ab, bc, ca) = (d2(pa, pb), d2(pb, pc), d2(pc, pa));
    let (long, s1, s2) = if ab >= bc && ab >= ca {
        (ab, bc, ca)
    } else if bc >= ca {
        (bc, ab, ca)
    } else {
        (ca, ab, bc)
    };
    Some((s1 + s2 - long) / (2.0 * (s1 * s2).sqrt()))
}

/// Red refinement: every triangle is split into four through its edge
/// midpoints. New nodes are numbered in order of first appearance.
pub fn refine(m: &TriMesh) -> TriMesh {
    let mut nodes = m.nodes.clone();
    let mut mid: HashMap<(usize, usize), usize> =
        HashMap::with_capacity(3 * m.triangles.len() / 2 + m.boundary_edges.len());
    let mut midpoint = |i: usize, j: usize, nodes: &mut Vec<Point2>| -> usize {
        *mid.entry((i.min(j), i.max(j))).or_insert_with(|| {
            let (a, b) = (nodes[i], nodes[j]);
            nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            nodes.len() - 1
        })
    };
    let mut mids = Vec::with_capacity(m.triangles.len());
    for t in &m.triangles {
        let ab = midpoint(t[0], t[1], &mut nodes);
        let bc = midpoint(t[1], t[2], &mut nodes);
        let ca = midpoint(t[2], t[0], &mut nodes);
        mids.push([ab, bc, ca]);
    }
    let triangles: Vec<[usize; 3]> = m
        .triangles
        .par_iter()
        .zip(mids.par_iter())
        .flat_map_iter(|(t, &[ab, bc, ca])| [[t[0], ab, ca], [ab, t[1], bc], [ca, bc, t[2]], [ab, bc, ca]])
        .collect();
    let boundary_edges = m
        .boundary_edges
        .iter()
        .flat_map(|e| {
            let k = midpoint(e[0], e[1], &mut nodes);
            [[e[0], k], [k, e[1]]]
        })
        .collect();
    TriMesh { nodes, triangles, boundary_edges }
}

/// Ear-clip the section polygon, then refine until the element size is at
/// most `target_h`.
pub fn triangulate(section: &CrossSection, target_h: f64) -> Result<TriMesh> {
    if !(target_h > 0.0) {
        return Err(Error::Domain(format!("target_h must be positive, got {target_h}")));
    }
    let mut m = ear_clip(&section.polygon)?;
    while m.size() > target_h * (1.0 + 1e-12) {
        m = refine(&m);
        if m.triangles.len() > 50_000_000 {
            return Err(Error::Mesh("refinement exceeded 5e7 triangles".into()));
        }
    }
    Ok(m)
}

/// Base triangulation refined `levels` times.
pub fn triangulate_levels(section: &CrossSection, levels: usize) -> Result<TriMesh> {
    let mut m = ear_clip(&section.polygon)?;
    for _ in 0..levels {
        m = refine(&m);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{principal_frame, shapes};

    fn unit_square() -> CrossSection {
        principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn square_counts() {
        let m = triangulate(&unit_square(), 1.0).unwrap();
        assert_eq!((m.triangle_count(), m.node_count()), (2, 4));
        let m = triangulate(&unit_square(), 0.5).unwrap();
        assert_eq!((m.triangle_count(), m.node_count()), (8, 9));
        assert_eq!(refine(&m).triangle_count(), 32);
    }

    #[test]
    fn refinement_invariants() {
        let s = principal_frame(&shapes::ellipse(2.0, 1.0, 40).unwrap()).unwrap();
        let mut m = ear_clip(&s.polygon).unwrap();
        for _ in 0..3 {
            let r = refine(&m);
            assert_eq!(r.triangle_count(), 4 * m.triangle_count());
            assert!(((r.max_edge() - 0.5 * m.max_edge()) / m.max_edge()).abs() < 1e-14);
            assert_eq!(r.boundary_nodes().len(), 2 * m.boundary_nodes().len());
            let c = r.check();
            assert!(c.conforming && c.min_signed_area > 0.0 && c.euler == 1);
            assert!((r.area() - s.area).abs() < 1e-12 * s.area);
            m = r;
        }
    }

    #[test]
    fn nonconvex_polygon() {
        let l = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let m = ear_clip(&l).unwrap();
        assert_eq!(m.triangle_count(), 4);
        let c = m.check();
        assert!(c.conforming && c.min_signed_area > 0.0 && c.euler == 1);
        assert!((m.area() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn text_roundtrip() {
        let m = triangulate(&unit_square(), 0.5).unwrap();
        let back = TriMesh::from_text(&m.to_text(&[])).unwrap();
        assert_eq!(back.nodes, m.nodes);
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.boundary_edges.len(), m.boundary_edges.len());
    }
}
