//! Weighted Galerkin discretizations of the limit problems: P1 for stretch
//! and torsion, C¹ cubic Hermite for bending. Essential conditions are
//! imposed at x₃ = 0 only.
//!
//! The grid x_i = L(1 − (1 − i/n)²) is refined towards the tip. On a
//! uniform grid the degenerate weight costs a log factor in the nodal
//! error at x₃ = L.

use serde::{Deserialize, Serialize};

use super::exact::{Limit1DSolution, LimitModel};
use super::forces::ForceProfile;
use super::piecewise::{merge_breaks, PiecewisePoly};
use crate::error::{Error, Result};
use crate::quadrature::gauss_on;
use crate::sparse::{solve_spd, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem1D {
    Stretch,
    Torsion,
    Bending1,
    Bending2,
}

impl Problem1D {
    pub const ALL: [Problem1D; 4] = [Problem1D::Stretch, Problem1D::Torsion, Problem1D::Bending1, Problem1D::Bending2];
}

/// Gauss points on [a, b] split at the load breakpoints, enough for
/// integrands of degree `deg`.
fn points(a: f64, b: f64, breaks: &[f64], deg: usize) -> Vec<(f64, f64)> {
    let n = deg / 2 + 1;
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.windows(2).flat_map(|w| gauss_on(n, w[0], w[1])).collect()
}

pub(crate) fn grid(length: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { length } else { length * (1.0 - (1.0 - i as f64 / n as f64).powi(2)) }).collect()
}

/// P1 solution of c∫ρ^p u'v' = k∫ρ^p q v, u(0) = 0. Returns nodal values.
fn solve_p1(length: f64, n: usize, p: i32, c: f64, k: f64, q: &PiecewisePoly, breaks: &[f64]) -> Result<Vec<f64>> {
    let x = grid(length, n);
    let rho = |t: f64| 1.0 - t / length;
    let mut tb = TripletBuilder::new(n);
    let mut rhs = vec![0.0; n];
    let deg = q.degree() + p as usize + 1;
    for e in 0..n {
        let (a, b) = (x[e], x[e + 1]);
        let h = b - a;
        let mut kk = 0.0;
        let mut f = [0.0; 2];
        for (t, w) in points(a, b, breaks, deg.max(p as usize)) {
            let wt = rho(t).powi(p);
            kk += w * wt;
            let phi = [(b - t) / h, (t - a) / h];
            let ql = q.eval(t);
            f[0] += w * wt * ql * phi[0];
            f[1] += w * wt * ql * phi[1];
        }
        kk *= c / (h * h);
        // dof i ↔ node i + 1
        let dofs = [e.checked_sub(1), Some(e)];
        let sgn = [[1.0, -1.0], [-1.0, 1.0]];
        for i in 0..2 {
            let Some(di) = dofs[i] else { continue };
            rhs[di] += k * f[i];
            for j in 0..2 {
                if let Some(dj) = dofs[j] {
                    tb.add(di, dj, kk * sgn[i][j]);
                }
            }
        }
    }
    let u = solve_spd(&tb.build(), &rhs)?;
    let mut out = vec![0.0];
    out.extend(u);
    Ok(out)
}

/// Hermite basis on [0, 1]: values, first and second derivatives in ξ.
fn hermite(xi: f64) -> [[f64; 4]; 3] {
    let (x2, x3) = (xi * xi, xi * xi * xi);
    [
        [1.0 - 3.0 * x2 + 2.0 * x3, xi - 2.0 * x2 + x3, 3.0 * x2 - 2.0 * x3, -x2 + x3],
        [-6.0 * xi + 6.0 * x2, 1.0 - 4.0 * xi + 3.0 * x2, 6.0 * xi - 6.0 * x2, -2.0 * xi + 3.0 * x2],
        [-6.0 + 12.0 * xi, -4.0 + 6.0 * xi, 6.0 - 12.0 * xi, -2.0 + 6.0 * xi],
    ]
}

/// Hermite solution of EI∫ρ⁴u''v'' = A∫ρ²f v − I∫ρ⁴g v', u(0) = u'(0) = 0.
/// Returns nodal (value, slope) pairs.
#[allow(clippy::too_many_arguments)]
fn solve_hermite(
    length: f64,
    n: usize,
    ei: f64,
    area: f64,
    inertia: f64,
    f: &PiecewisePoly,
    g: &PiecewisePoly,
    breaks: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let x = grid(length, n);
    let rho = |t: f64| 1.0 - t / length;
    let ndof = 2 * n;
    let mut tb = TripletBuilder::new(ndof);
    let mut rhs = vec![0.0; ndof];
    let deg = f.degree().max(g.degree()) + 8;
    for e in 0..n {
        let (a, b) = (x[e], x[e + 1]);
        let h = b - a;
        let mut ke = [[0.0; 4]; 4];
        let mut fe = [0.0; 4];
        for (t, w) in points(a, b, breaks, deg) {
            let hb = hermite((t - a) / h);
            // physical basis: scale slope functions by h
            let scale = [1.0, h, 1.0, h];
            let r = rho(t);
            let (r2, r4) = (r * r, r.powi(4));
            let (fl, gl) = (f.eval(t), g.eval(t));
            for i in 0..4 {
                let vi = hb[0][i] * scale[i];
                let di = hb[1][i] * scale[i] / h;
                let si = hb[2][i] * scale[i] / (h * h);
                fe[i] += w * (area * r2 * fl * vi - inertia * r4 * gl * di);
                for j in 0..4 {
                    let sj = hb[2][j] * scale[j] / (h * h);
                    ke[i][j] += w * ei * r4 * si * sj;
                }
            }
        }
        let map = |i: usize| -> Option<usize> {
            let node = e + i / 2;
            (node > 0).then(|| 2 * (node - 1) + i % 2)
        };
        for i in 0..4 {
            let Some(di) = map(i) else { continue };
            rhs[di] += fe[i];
            for j in 0..4 {
                if let Some(dj) = map(j) {
                    tb.add(di, dj, ke[i][j]);
                }
            }
        }
    }
    let u = solve_spd(&tb.build(), &rhs)?;
    let mut out = vec![[0.0, 0.0]];
    out.extend(u.chunks(2).map(|c| [c[0], c[1]]));
    Ok(out)
}

/// Nodal average of per-element slopes of a P1 field.
fn nodal_slopes(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let s: Vec<f64> = (0..n).map(|e| (u[e + 1] - u[e]) / (x[e + 1] - x[e])).collect();
    (0..=n)
        .map(|i| match i {
            0 => s[0],
            i if i == n => s[n - 1],
            _ => 0.5 * (s[i - 1] + s[i]),
        })
        .collect()
}

/// Nodal average of per-element second derivatives of a Hermite field.
fn nodal_curvatures(x: &[f64], u: &[[f64; 2]]) -> Vec<f64> {
    let n = x.len() - 1;
    let curv = |e: usize, xi: f64| {
        let h = x[e + 1] - x[e];
        let hb = hermite(xi);
        (hb[2][0] * u[e][0] + hb[2][1] * h * u[e][1] + hb[2][2] * u[e + 1][0] + hb[2][3] * h * u[e + 1][1]) / (h * h)
    };
    (0..=n)
        .map(|i| match i {
            0 => curv(0, 0.0),
            i if i == n => curv(n - 1, 1.0),
            _ => 0.5 * (curv(i - 1, 1.0) + curv(i, 0.0)),
        })
        .collect()
}

/// Weighted FEM solution of one limit problem on `n_elements` elements; only the columns of that problem are filled.
pub fn solve_weighted_fem_1d(
    problem: Problem1D,
    model: &LimitModel,
    forces: &ForceProfile,
    n_elements: usize,
) -> Result<Limit1DSolution> {
    let mut out = Limit1DSolution::with_grid(grid(model.length, n_elements));
    fill(problem, model, forces, n_elements, &mut out)?;
    Ok(out)
}

/// All four problems on one grid.
pub fn solve_weighted_fem_all(model: &LimitModel, forces: &ForceProfile, n_elements: usize) -> Result<Limit1DSolution> {
    let mut out = Limit1DSolution::with_grid(grid(model.length, n_elements));
    for p in Problem1D::ALL {
        fill(p, model, forces, n_elements, &mut out)?;
    }
    Ok(out)
}

fn fill(
    problem: Problem1D,
    model: &LimitModel,
    forces: &ForceProfile,
    n: usize,
    out: &mut Limit1DSolution,
) -> Result<()> {
    if n < 4 {
        return Err(Error::Precondition(format!("weighted FEM needs at least 4 elements, got {n}")));
    }
    let l = model.length;
    forces.validate(l)?;
    let breaks = merge_breaks(l, &[forces.breakpoints()]);
    let c = &model.constants;
    let e = model.material.young();
    let x = out.grid.clone();
    let rho: Vec<f64> = x.iter().map(|t| 1.0 - t / l).collect();
    match problem {
        Problem1D::Stretch => {
            let u = solve_p1(l, n, 2, e, 1.0, &forces.f3, &breaks)?;
            let du = nodal_slopes(&x, &u);
            out.axial_force = du.iter().zip(&rho).map(|(d, r)| r * r * d).collect();
            out.u3 = u;
            out.du3 = du;
        }
        Problem1D::Torsion => {
            let u = solve_p1(l, n, 4, model.torsional_rigidity(), c.polar(), &forces.g3, &breaks)?;
            let du = nodal_slopes(&x, &u);
            out.torque = du.iter().zip(&rho).map(|(d, r)| r.powi(4) * d).collect();
            out.r3 = u;
            out.dr3 = du;
        }
        Problem1D::Bending1 | Problem1D::Bending2 => {
            let alpha = if problem == Problem1D::Bending1 { 1 } else { 2 };
            let ia = c.inertia(alpha);
            let u = solve_hermite(l, n, e * ia, c.area, ia, forces.f(alpha), forces.g(alpha), &breaks)?;
            let curv = nodal_curvatures(&x, &u);
            let moment: Vec<f64> = curv.iter().zip(&rho).map(|(d, r)| r.powi(4) * d).collect();
            let val = u.iter().map(|v| v[0]).collect();
            let slope = u.iter().map(|v| v[1]).collect();
            if alpha == 1 {
                (out.u1, out.du1, out.d2u1, out.moment1) = (val, slope, curv, moment);
            } else {
                (out.u2, out.du2, out.d2u2, out.moment2) = (val, slope, curv, moment);
            }
        }
    }
    Ok(())
}
