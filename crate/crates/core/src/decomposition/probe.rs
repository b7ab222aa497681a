use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::decompose::{elementary_decompose, RodDomain};
use super::field::{frob_sq, norm_sq, sym_norm_sq, Field3D};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, RodProfile};

/// Ratios at or below this are treated as exact zeros.
const ZERO_RATIO: f64 = 1e-9;

/// One inequality at one ε: lhs ≤ C · rhs_scale, where rhs_scale is the
/// power of ε and L times ‖(∇u)_S‖ on Ω_ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub epsilon: f64,
    pub id: String,
    pub lhs: f64,
    pub rhs_scale: f64,
    /// None when both sides vanish.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    /// Nonzero ratios that grow by at most the allowed factor.
    Bounded,
    /// All ratios vanish.
    Zero,
    /// 0/0 at some ε: no strain and no left-hand side.
    Degenerate,
    /// Growth beyond the allowed factor, or a non-finite ratio.
    Grew,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub id: String,
    pub ratios: Vec<Option<f64>>,
    /// Largest factor by which a ratio exceeds an earlier one (ε decreasing).
    pub growth: Option<f64>,
    pub status: ProbeStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateProbe {
    pub family: String,
    pub length: f64,
    pub epsilons: Vec<f64>,
    pub rows: Vec<ProbeRow>,
    pub summary: Vec<ProbeSummary>,
}

impl EstimateProbe {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("family,epsilon,id,lhs,rhs_scale,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map_or("nan".to_string(), |v| format!("{v:.16e}"));
            writeln!(s, "{},{:.16e},{},{:.16e},{:.16e},{ratio}", self.family, r.epsilon, r.id, r.lhs, r.rhs_scale)
                .unwrap();
        }
        s
    }

    /// Whether every ratio is finite and grows by at most `factor`.
    pub fn bounded(&self, factor: f64) -> bool {
        self.summary.iter().all(|s| match s.status {
            ProbeStatus::Grew => false,
            ProbeStatus::Bounded => s.growth.is_some_and(|g| g <= factor),
            _ => true,
        })
    }
}

/// Left-hand sides of all probed inequalities at one ε, with the power of
/// ε and L multiplying ‖(∇u)_S‖ on the right.
fn probe_one<F: Field3D + ?Sized>(field: &F, domain: &RodDomain) -> Result<(f64, Vec<(&'static str, f64, f64)>)> {
    let p = domain.profile;
    let (eps, l) = (p.epsilon, p.length);
    let q = &domain.section;
    let clamp = q.points.iter().map(|(x, _)| norm_sq(field.value([eps * x[0], eps * x[1], 0.0]))).fold(0.0, f64::max);
    if clamp.sqrt() > 1e-12 {
        return Err(Error::Precondition(format!("field is not clamped at x3 = 0 (|u| = {:e})", clamp.sqrt())));
    }
    let e = elementary_decompose(field, domain);
    // [‖S‖², ‖∇u‖², ‖ū/ρ‖², ‖∇ū‖², ‖u₁/ρ‖², ‖u₂/ρ‖², ‖u₃/ρ‖², axis, rot', rot, dU₁, dU₂, dU₃, U₁, U₂, U₃]
    let parts: Vec<[f64; 16]> = {
        use rayon::prelude::*;
        domain
            .axial
            .par_iter()
            .map(|&(x3, w3)| {
                let st = e.at(x3);
                let s = p.scale(x3);
                let r = p.rho_eps(x3);
                let mut a = [0.0; 16];
                for &(xy, w) in &q.points {
                    let x = [s * xy[0], s * xy[1], x3];
                    let g = field.gradient(x);
                    let u = field.value(x);
                    let (ub, gb) = e.warping_with_gradient(&st, x);
                    let vals = [
                        sym_norm_sq(&g),
                        frob_sq(&g),
                        norm_sq(ub) / (r * r),
                        frob_sq(&gb),
                        u[0] * u[0] / (r * r),
                        u[1] * u[1] / (r * r),
                        u[2] * u[2] / (r * r),
                    ];
                    for k in 0..7 {
                        a[k] += w * s * s * vals[k];
                    }
                }
                let axis = [st.ducal[0] - st.rcal[1], st.ducal[1] + st.rcal[0], st.ducal[2]];
                a[7] = r * r * norm_sq(axis);
                a[8] = r.powi(4) * norm_sq(st.drcal);
                a[9] = r * r * norm_sq(st.rcal);
                for k in 0..3 {
                    a[10 + k] = r * r * st.ducal[k].powi(2);
                    a[13 + k] = st.ucal[k].powi(2);
                }
                a.map(|v| v * w3)
            })
            .collect()
    };
    let mut t = [0.0; 16];
    for a in &parts {
        for k in 0..16 {
            t[k] += a[k];
        }
    }
    let n = t.map(|v| v.max(0.0).sqrt());
    let rows = vec![
        ("thm23_warping", n[2], eps),
        ("thm23_axis", n[7], 1.0 / eps),
        ("thm23_rotation_slope", n[8], 1.0 / (eps * eps)),
        ("thm23_warping_gradient", n[3], 1.0),
        ("lem31_rotation", n[9], l / (eps * eps)),
        ("lem31_slope1", n[10], l / (eps * eps)),
        ("lem31_slope2", n[11], l / (eps * eps)),
        ("lem31_slope3", n[12], 1.0 / eps),
        ("lem31_axis1", n[13], l * l / (eps * eps)),
        ("lem31_axis2", n[14], l * l / (eps * eps)),
        ("lem31_axis3", n[15], l / eps),
        ("korn_gradient", n[1], l / eps),
        ("korn_u1", n[4], l * l / eps),
        ("korn_u2", n[5], l * l / eps),
        ("korn_u3", n[6], l),
    ];
    Ok((n[0], rows))
}

/// Evaluate the a priori estimates for `family(ε)` on each ε. The field
/// must vanish on the clamped base x₃ = 0.
pub fn probe_estimates<F: Field3D>(
    name: &str,
    family: impl Fn(f64) -> Result<F>,
    section: &CrossSection,
    length: f64,
    epsilons: &[f64],
) -> Result<EstimateProbe> {
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    for &e in &eps {
        let domain = RodDomain::standard(RodProfile::new(length, e)?, section)?;
        let field = family(e)?;
        let (strain, list) = probe_one(&field, &domain)?;
        let lhs_max = list.iter().map(|r| r.1).fold(0.0, f64::max);
        if strain == 0.0 && lhs_max > 0.0 {
            return Err(Error::Invariant(format!(
                "{name}: zero strain energy but nonzero field at eps = {e} (rigid motion violating the clamp)"
            )));
        }
        for (id, lhs, pw) in list {
            let rhs_scale = pw * strain;
            let ratio = if strain == 0.0 { None } else { Some(lhs / rhs_scale) };
            rows.push(ProbeRow { epsilon: e, id: id.to_string(), lhs, rhs_scale, ratio });
        }
    }
    let ids: Vec<String> = rows.iter().take(rows.len() / eps.len().max(1)).map(|r| r.id.clone()).collect();
    let summary = ids
        .into_iter()
        .map(|id| {
            let ratios: Vec<Option<f64>> = rows.iter().filter(|r| r.id == id).map(|r| r.ratio).collect();
            summarize(id, ratios)
        })
        .collect();
    Ok(EstimateProbe { family: name.to_string(), length, epsilons: eps, rows, summary })
}

fn summarize(id: String, ratios: Vec<Option<f64>>) -> ProbeSummary {
    if ratios.iter().any(Option::is_none) {
        return ProbeSummary { id, ratios, growth: None, status: ProbeStatus::Degenerate };
    }
    let v: Vec<f64> = ratios.iter().map(|r| r.unwrap()).collect();
    if v.iter().any(|r| !r.is_finite()) {
        return ProbeSummary { id, ratios, growth: None, status: ProbeStatus::Grew };
    }
    let nz: Vec<f64> = v.into_iter().filter(|&r| r > ZERO_RATIO).collect();
    if nz.is_empty() {
        return ProbeSummary { id, ratios, growth: Some(1.0), status: ProbeStatus::Zero };
    }
    let mut growth: f64 = 1.0;
    let mut low = f64::INFINITY;
    for r in nz {
        low = low.min(r);
        growth = growth.max(r / low);
    }
    let status = if growth <= 4.0 { ProbeStatus::Bounded } else { ProbeStatus::Grew };
    ProbeSummary { id, ratios, growth: Some(growth), status }
}
