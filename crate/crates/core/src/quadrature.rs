//! Gauss–Legendre rules on intervals and collapsed (Duffy) product rules on
//! simplices. Simplex rules are given in barycentric coordinates with
//! weights normalized to sum to one, so callers multiply by the measure.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    gauss_legendre(n).into_iter().map(|(x, w)| (m + h * x, h * w)).collect()
}

/// Barycentric rule on a triangle, exact for polynomials of degree ≤ 2n − 2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<([f64; 3], f64)>,
}

impl TriangleRule {
    pub fn collapsed(n: usize) -> Self {
        let g = gauss_on(n, 0.0, 1.0);
        let mut points = Vec::with_capacity(n * n);
        for &(u, wu) in &g {
            for &(v, wv) in &g {
                let x = u;
                let y = v * (1.0 - u);
                // reference triangle has area 1/2
                points.push(([1.0 - x - y, x, y], 2.0 * wu * wv * (1.0 - u)));
            }
        }
        Self { points }
    }
}

/// Barycentric rule on a tetrahedron, exact for polynomials of degree ≤ 2n − 3.
#[derive(Debug, Clone)]
pub struct TetRule {
    pub points: Vec<([f64; 4], f64)>,
}

impl TetRule {
    pub fn collapsed(n: usize) -> Self {
        let g = gauss_on(n, 0.0, 1.0);
        let mut points = Vec::with_capacity(n * n * n);
        for &(u, wu) in &g {
            for &(v, wv) in &g {
                for &(w, ww) in &g {
                    let x = u;
                    let y = v * (1.0 - u);
                    let z = w * (1.0 - u) * (1.0 - v);
                    let jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                    points.push(([1.0 - x - y - z, x, y, z], 6.0 * wu * wv * ww * jac));
                }
            }
        }
        Self { points }
    }
}
