use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RodProfile;
use crate::mesh::TriMesh;

/// Placement of the layer planes x₃ = z_k along the rod.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Uniform {
        n: usize,
    },
    /// ρ_ε(z_k) = (ε/L)^{k/n}: every layer has the same ratio of length to
    /// section size.
    Graded {
        n: usize,
    },
    /// Graded, with n chosen so that each layer is at most `aspect` times
    /// as long as the local section scale ερ_ε.
    GradedAspect {
        aspect: f64,
        min_layers: usize,
    },
}

impl LayerSpec {
    pub fn planes(&self, profile: &RodProfile) -> Result<Vec<f64>> {
        let (l, eps) = (profile.length, profile.epsilon);
        let graded = |n: usize| -> Vec<f64> {
            let q = eps / l;
            (0..=n)
                .map(|k| match k {
                    0 => 0.0,
                    k if k == n => l,
                    _ => l * (1.0 - q.powf(k as f64 / n as f64)) / (1.0 - q),
                })
                .collect()
        };
        let (planes, n) = match *self {
            LayerSpec::Uniform { n } => {
                ((0..=n).map(|k| if k == n { l } else { l * k as f64 / n as f64 }).collect(), n)
            }
            LayerSpec::Graded { n } => (graded(n), n),
            LayerSpec::GradedAspect { aspect, min_layers } => {
                if !(aspect > 0.0) {
                    return Err(Error::Precondition(format!("layer aspect must be positive, got {aspect}")));
                }
                // layer k spans a factor r = (ε/L)^{1/n} in ρ_ε; its length over
                // the section scale at its top is (1/r − 1)·L/(ε(1 − ε/L)).
                let c = l / (eps * (1.0 - eps / l));
                let ln_q = (l / eps).ln();
                let n = (ln_q / (1.0 + aspect / c).ln()).ceil() as usize;
                let n = n.max(min_layers);
                (graded(n), n)
            }
        };
        if n < 8 {
            return Err(Error::Precondition(format!("at least 8 layers are required, got {n}")));
        }
        Ok(planes)
    }
}

/// Polynomial degree of the tetrahedral elements. Linear tets lock badly in
/// bending and torsion of thin rods; quadratic ones reproduce the bilinear
/// Bernoulli–Navier and twist kinematics exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementOrder {
    Linear,
    #[default]
    Quadratic,
}

/// Local edge order of a tetrahedron, matching `TaperedMesh3D::mids`.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Layered tetrahedral mesh of Ω_ε: scaled copies of a section mesh on
/// each plane, prisms split into three tetrahedra.
///
/// Vertex nodes come first, plane by plane. Quadratic meshes append edge
/// midpoints: in-plane edges of every plane, then per layer the vertical
/// edges followed by the side-face diagonals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaperedMesh3D {
    pub base: TriMesh,
    pub profile: RodProfile,
    pub layers: Vec<f64>,
    pub order: ElementOrder,
    pub nodes: Vec<[f64; 3]>,
    pub tets: Vec<[usize; 4]>,
    /// Midpoint nodes of each tet in `TET_EDGES` order; empty when linear.
    pub mids: Vec<[usize; 6]>,
    /// Base edges, sorted pairs.
    pub edges: Vec<[usize; 2]>,
    /// Base edge index of each side of each base triangle, in the order
    /// (0,1), (1,2), (0,2).
    pub tri_edges: Vec<[usize; 3]>,
}

pub(crate) fn tet_volume(p: [[f64; 3]; 4]) -> f64 {
    let d = |i: usize| [p[i][0] - p[0][0], p[i][1] - p[0][1], p[i][2] - p[0][2]];
    let (a, b, c) = (d(1), d(2), d(3));
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])) / 6.0
}

impl TaperedMesh3D {
    pub fn nodes_per_layer(&self) -> usize {
        self.base.node_count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn vertex_count(&self) -> usize {
        self.layers.len() * self.base.node_count()
    }

    /// Node of the midpoint of base edge `e` on plane `k`.
    pub fn plane_mid(&self, k: usize, e: usize) -> usize {
        self.vertex_count() + k * self.edges.len() + e
    }

    /// Nodes lying on the clamped base x₃ = 0.
    pub fn clamped_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.nodes_per_layer()).collect();
        if self.order == ElementOrder::Quadratic {
            v.extend((0..self.edges.len()).map(|e| self.plane_mid(0, e)));
        }
        v
    }

    pub fn tet_vertices(&self, t: usize) -> [[f64; 3]; 4] {
        self.tets[t].map(|i| self.nodes[i])
    }

    /// All nodes of element t: 4 vertices, then 6 midpoints if quadratic.
    pub fn element_nodes(&self, t: usize) -> Vec<usize> {
        let mut v = self.tets[t].to_vec();
        if let Some(m) = self.mids.get(t) {
            v.extend_from_slice(m);
        }
        v
    }

    pub fn volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| tet_volume(self.tet_vertices(t))).sum()
    }

    /// Mesh text format with a z column and 4-index elements (vertex
    /// connectivity; midpoint nodes follow the vertices in the node list).
    pub fn to_text(&self) -> String {
        let mut s = format!("nodes {}\n", self.nodes.len());
        for p in &self.nodes {
            writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]).unwrap();
        }
        writeln!(s, "tetrahedra {}", self.tets.len()).unwrap();
        for t in &self.tets {
            writeln!(s, "{} {} {} {}", t[0], t[1], t[2], t[3]).unwrap();
        }
        s
    }
}

fn base_edges(base: &TriMesh) -> (Vec<[usize; 2]>, Vec<[usize; 3]>, HashMap<[usize; 2], usize>) {
    let mut index = HashMap::new();
    let mut edges = Vec::new();
    let tri_edges = base
        .triangles
        .iter()
        .map(|t| {
            [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]].map(|[a, b]| {
                let key = [a.min(b), a.max(b)];
                *index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                })
            })
        })
        .collect();
    (edges, tri_edges, index)
}

pub fn build_tapered_mesh(
    base: &TriMesh,
    profile: RodProfile,
    layers: LayerSpec,
    order: ElementOrder,
) -> Result<TaperedMesh3D> {
    let z = layers.planes(&profile)?;
    let n2 = base.node_count();
    let (edges, tri_edges, edge_index) = base_edges(base);
    let ne = edges.len();
    let mut nodes = Vec::with_capacity(n2 * z.len());
    for &zk in &z {
        let s = profile.scale(zk);
        nodes.extend(base.nodes.iter().map(|p| [s * p[0], s * p[1], zk]));
    }
    let nv = nodes.len();
    let mid = |a: usize, b: usize, nodes: &[[f64; 3]]| [0, 1, 2].map(|c| 0.5 * (nodes[a][c] + nodes[b][c]));
    if order == ElementOrder::Quadratic {
        for k in 0..z.len() {
            for e in &edges {
                nodes.push(mid(k * n2 + e[0], k * n2 + e[1], &nodes));
            }
        }
        for k in 0..z.len() - 1 {
            for i in 0..n2 {
                nodes.push(mid(k * n2 + i, (k + 1) * n2 + i, &nodes));
            }
            for e in &edges {
                nodes.push(mid(k * n2 + e[0], (k + 1) * n2 + e[1], &nodes));
            }
        }
    }
    // midpoint node of the edge between two vertex nodes
    let mid_node = |a: usize, b: usize| -> usize {
        let (a, b) = (a.min(b), a.max(b));
        let (ka, ia, kb, ib) = (a / n2, a % n2, b / n2, b % n2);
        if ka == kb {
            nv + ka * ne + edge_index[&[ia.min(ib), ia.max(ib)]]
        } else {
            let layer = nv + z.len() * ne + ka * (n2 + ne);
            if ia == ib {
                layer + ia
            } else {
                // side diagonals always join the lower base index below to
                // the higher one above
                debug_assert!(ia < ib);
                layer + n2 + edge_index[&[ia, ib]]
            }
        }
    };
    let mut tets = Vec::with_capacity(3 * base.triangle_count() * (z.len() - 1));
    for k in 0..z.len() - 1 {
        for tri in &base.triangles {
            let mut v = *tri;
            v.sort_unstable();
            let lo = v.map(|i| k * n2 + i);
            let hi = v.map(|i| (k + 1) * n2 + i);
            // Quad faces are cut from the lower-index bottom vertex to the
            // higher-index top vertex, which neighbours agree on.
            for mut t in [[lo[0], lo[1], lo[2], hi[2]], [lo[0], lo[1], hi[1], hi[2]], [lo[0], hi[0], hi[1], hi[2]]] {
                let vol = tet_volume(t.map(|i| nodes[i]));
                if vol < 0.0 {
                    t.swap(0, 1);
                } else if vol == 0.0 {
                    return Err(Error::Mesh(format!("degenerate tetrahedron {t:?} in layer {k}")));
                }
                tets.push(t);
            }
        }
    }
    let mids = match order {
        ElementOrder::Linear => Vec::new(),
        ElementOrder::Quadratic => tets.iter().map(|t| TET_EDGES.map(|[a, b]| mid_node(t[a], t[b]))).collect(),
    };
    Ok(TaperedMesh3D { base: base.clone(), profile, layers: z, order, nodes, tets, mids, edges, tri_edges })
}
