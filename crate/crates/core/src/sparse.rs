//! Symmetric sparse assembly and a direct envelope (skyline) LDLᵀ solver.
//!
//! Assembly collects triplets and sums duplicates after a stable sort, so the
//! assembled values do not depend on how element contributions were produced.
//! The factorization does not pivot; callers order saddle-point systems so
//! that every leading block is nonsingular (see [`SaddleOrdering`]).

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Row-major compressed sparse matrix holding both triangles of a symmetric
/// matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates (row, col, value) contributions.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    /// Adds `v` at (i, j) and (j, i).
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.add(i, j, v);
        if i != j {
            self.add(j, i, v);
        }
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// xᵀAy
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// ‖b − Ax‖ / max(‖b‖, ‖A‖∞‖x‖)
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        let r = norm2(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
        let scale = norm2(b).max(self.norm_inf() * norm2(x));
        if scale == 0.0 {
            r
        } else {
            r / scale
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Reverse Cuthill–McKee ordering restricted to `subset` (in the order
/// given, which only matters for tie-breaking). Returns the visiting order.
pub fn rcm_order(a: &CsrMatrix, subset: &[usize]) -> Vec<usize> {
    let n = a.dim();
    let mut in_set = vec![false; n];
    for &i in subset {
        in_set[i] = true;
    }
    let neighbours = |i: usize| -> Vec<usize> { a.row(i).map(|(j, _)| j).filter(|&j| j != i && in_set[j]).collect() };
    let deg: Vec<usize> = (0..n).map(|i| if in_set[i] { neighbours(i).len() } else { 0 }).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(subset.len());
    let mut sorted: Vec<usize> = subset.to_vec();
    sorted.sort_by_key(|&i| (deg[i], i));
    for &seed in &sorted {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &neighbours, &deg, n);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = neighbours(v).into_iter().filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (deg[j], j));
            for j in nb {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, neighbours: &dyn Fn(usize) -> Vec<usize>, deg: &[usize], n: usize) -> usize {
    let mut root = seed;
    let mut ecc = 0usize;
    for _ in 0..8 {
        let levels = bfs_levels(root, neighbours, n);
        let height = levels.len() - 1;
        let last = levels.last().unwrap();
        let cand = *last.iter().min_by_key(|&&j| (deg[j], j)).unwrap();
        if height <= ecc && ecc > 0 {
            break;
        }
        ecc = height;
        if cand == root {
            break;
        }
        root = cand;
    }
    root
}

fn bfs_levels(root: usize, neighbours: &dyn Fn(usize) -> Vec<usize>, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut levels = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for j in neighbours(v) {
                if !seen[j] {
                    seen[j] = true;
                    next.push(j);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// Ordering for a saddle-point system [[A, Cᵀ], [C, 0]] where A has a null
/// space removed by the constraint rows C. The primal unknowns listed in
/// `deferred` are eliminated after the multipliers; all other primal
/// unknowns come first, in RCM order.
pub struct SaddleOrdering;

impl SaddleOrdering {
    pub fn build(a: &CsrMatrix, n_primal: usize, deferred: &[usize]) -> Vec<usize> {
        let primal: Vec<usize> = (0..n_primal).filter(|i| !deferred.contains(i)).collect();
        let mut order = rcm_order(a, &primal);
        order.extend(n_primal..a.dim());
        order.extend_from_slice(deferred);
        order
    }
}

/// LDLᵀ factors of a symmetric matrix stored by rows of the lower envelope.
#[derive(Debug, Clone)]
pub struct SkylineLdlt {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdlt {
    /// Factor `a` after symmetric permutation `perm` (perm[new] = old).
    pub fn factor(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::Solver(format!("ordering has {} entries for dimension {n}", perm.len())));
        }
        let mut inv = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if inv[old] != usize::MAX {
                return Err(Error::Solver("ordering is not a permutation".into()));
            }
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for new in 0..n {
            let old = perm[new];
            first[new] = a.row(old).map(|(j, _)| inv[j]).filter(|&j| j <= new).min().unwrap_or(new);
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; offset[n]];
        let mut diag = vec![0.0; n];
        let mut scale: f64 = 0.0;
        for new in 0..n {
            for (j, v) in a.row(perm[new]) {
                let jn = inv[j];
                if jn < new {
                    lower[offset[new] + jn - first[new]] = v;
                } else if jn == new {
                    diag[new] = v;
                    scale = scale.max(v.abs());
                }
            }
        }
        // Pivots are judged against their own original diagonal so that badly
        // scaled but definite systems pass; zero diagonals (multiplier rows)
        // fall back to the global scale.
        let floor = scale.max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fi = first[i];
            let oi = offset[i];
            for j in fi..i {
                let fj = first[j];
                let oj = offset[j];
                let k0 = fi.max(fj);
                let mut s = 0.0;
                let ri = &lower[oi + k0 - fi..oi + j - fi];
                let rj = &lower[oj + k0 - fj..oj + j - fj];
                for (x, y) in ri.iter().zip(rj) {
                    s += x * y;
                }
                lower[oi + j - fi] -= s;
            }
            let mut d = diag[i];
            let tiny = 1e-14 * if d != 0.0 { d.abs() } else { floor };
            for j in fi..i {
                let g = lower[oi + j - fi];
                let l = g / diag[j];
                d -= g * l;
                lower[oi + j - fi] = l;
            }
            if !(d.abs() > tiny) || !d.is_finite() {
                return Err(Error::Solver(format!(
                    "zero pivot {d:e} at position {i} (unknown {}): matrix is singular",
                    perm[i]
                )));
            }
            diag[i] = d;
        }
        Ok(Self { n, perm, first, offset, lower, diag })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// Number of negative pivots (inertia of the matrix).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in 0..self.n {
            y[i] /= self.diag[i];
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            for (l, v) in row.iter().zip(&mut y[fi..i]) {
                *v -= l * xi;
            }
        }
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Factor in RCM order and solve once, refining by one residual correction.
pub fn solve_spd(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..a.dim()).collect();
    let f = SkylineLdlt::factor(a, rcm_order(a, &all))?;
    Ok(refine(a, &f, b))
}

/// One step of iterative refinement on top of a direct solve.
pub fn refine(a: &CsrMatrix, f: &SkylineLdlt, b: &[f64]) -> Vec<f64> {
    let mut x = f.solve(b);
    let ax = a.mul_vec(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let dx = f.solve(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    x
}
