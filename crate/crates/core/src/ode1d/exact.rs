//! Reference solutions of the limit problems by repeated exact
//! antidifferentiation.
//!
//! * stretch:  E ρ²U₃' = ∫ₓᴸ ρ² f₃
//! * torsion:  c_t ρ⁴R₃' = (I₁ + I₂) ∫ₓᴸ ρ⁴ g₃, with c_t the torsional rigidity
//! * bending:  E I_α ρ⁴U_α'' = ∫ₓᴸ (t − x)|ω|ρ² f_α dt − I_α ∫ₓᴸ ρ⁴ g_α
//!
//! with U(0) = 0 (and U_α'(0) = 0). The natural conditions at the tip are
//! built in because every tail integral vanishes at x₃ = L.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::forces::ForceProfile;
use super::piecewise::{merge_breaks, PiecewiseLL, PiecewisePoly};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, Material, RodProfile};

/// Section data entering the limit problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionConstants {
    pub area: f64,
    pub inertia1: f64,
    pub inertia2: f64,
    /// Torsional stiffness K.
    pub stiffness: f64,
}

impl SectionConstants {
    pub fn new(section: &CrossSection, stiffness: f64) -> Self {
        Self { area: section.area, inertia1: section.inertia1, inertia2: section.inertia2, stiffness }
    }

    pub fn polar(&self) -> f64 {
        self.inertia1 + self.inertia2
    }

    pub fn inertia(&self, alpha: usize) -> f64 {
        match alpha {
            1 => self.inertia1,
            2 => self.inertia2,
            _ => panic!("inertia index must be 1 or 2"),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = [self.area, self.inertia1, self.inertia2, self.stiffness].iter().all(|v| *v > 0.0 && v.is_finite());
        if !ok {
            return Err(Error::Precondition(format!("section constants must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Which torsional rigidity multiplies ρ⁴R₃' in the torsion equation and
/// the torsion energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionCoefficient {
    /// c_t = Kμ, the Saint-Venant rigidity obtained from the limit stress
    /// (shear terms T₁₃, T₂₃ counted in both off-diagonal slots).
    #[default]
    Full,
    /// c_t = Kμ/2.
    Half,
}

impl TorsionCoefficient {
    pub fn rigidity(&self, stiffness: f64, mu: f64) -> f64 {
        match self {
            TorsionCoefficient::Full => stiffness * mu,
            TorsionCoefficient::Half => 0.5 * stiffness * mu,
        }
    }
}

/// Everything the limit problems depend on besides the loads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitModel {
    pub length: f64,
    pub material: Material,
    pub constants: SectionConstants,
    #[serde(default)]
    pub torsion: TorsionCoefficient,
}

/// Solution of a second-order limit problem (stretch or torsion).
#[derive(Debug, Clone, PartialEq)]
pub struct AxialField {
    pub value: PiecewiseLL,
    pub slope: PiecewiseLL,
    /// ρ²U₃' or ρ⁴R₃'.
    pub flux: PiecewiseLL,
}

/// Solution of a bending problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BendingField {
    pub value: PiecewiseLL,
    pub slope: PiecewiseLL,
    pub curvature: PiecewiseLL,
    /// ρ⁴U_α''.
    pub moment: PiecewiseLL,
}

impl LimitModel {
    pub fn new(length: f64, material: Material, constants: SectionConstants) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("rod length must be positive, got {length}")));
        }
        constants.check()?;
        Ok(Self { length, material, constants, torsion: TorsionCoefficient::default() })
    }

    pub fn with_torsion_coefficient(mut self, c: TorsionCoefficient) -> Self {
        self.torsion = c;
        self
    }

    pub fn torsional_rigidity(&self) -> f64 {
        self.torsion.rigidity(self.constants.stiffness, self.material.mu)
    }

    fn partition(&self, loads: &[&PiecewisePoly]) -> Result<Vec<f64>> {
        for l in loads {
            l.validate(self.length)?;
        }
        let lists: Vec<Vec<f64>> = loads.iter().map(|l| l.breakpoints()).collect();
        Ok(merge_breaks(self.length, &lists))
    }

    /// Generic second-order problem c·ρ^p u' = ∫ₓᴸ ρ^p q, u(0) = 0.
    fn axial(&self, load: &PiecewisePoly, p: i32, coefficient: f64, breaks: &[f64]) -> Result<AxialField> {
        let q = load.to_loglaurent(self.length, breaks).times_rho_pow(p);
        let flux = q.tail_integral()?.scale(1.0 / coefficient);
        let slope = flux.times_rho_pow(-p);
        slope.tip_value().map_err(|e| Error::Domain(format!("slope: {e}")))?;
        let value = slope.head_integral()?;
        Ok(AxialField { value, slope, flux })
    }

    pub fn stretch(&self, f3: &PiecewisePoly) -> Result<AxialField> {
        let b = self.partition(&[f3])?;
        self.stretch_on(f3, &b)
    }

    fn stretch_on(&self, f3: &PiecewisePoly, b: &[f64]) -> Result<AxialField> {
        self.axial(f3, 2, self.material.young(), b)
    }

    pub fn torsion_rotation(&self, g3: &PiecewisePoly) -> Result<AxialField> {
        let b = self.partition(&[g3])?;
        self.torsion_on(g3, &b)
    }

    fn torsion_on(&self, g3: &PiecewisePoly, b: &[f64]) -> Result<AxialField> {
        let c = self.torsional_rigidity() / self.constants.polar();
        self.axial(g3, 4, c, b)
    }

    pub fn bending(&self, alpha: usize, f: &PiecewisePoly, g: &PiecewisePoly) -> Result<BendingField> {
        if alpha != 1 && alpha != 2 {
            return Err(Error::Precondition(format!("bending direction must be 1 or 2, got {alpha}")));
        }
        let b = self.partition(&[f, g])?;
        self.bending_on(alpha, f, g, &b)
    }

    fn bending_on(&self, alpha: usize, f: &PiecewisePoly, g: &PiecewisePoly, b: &[f64]) -> Result<BendingField> {
        let l = self.length;
        let ia = self.constants.inertia(alpha);
        let ei = self.material.young() * ia;
        let q = f.to_loglaurent(l, b).times_rho_pow(2).scale(self.constants.area);
        let shear = q.tail_integral()?;
        let lever = shear.tail_integral()?;
        let h = g.to_loglaurent(l, b).times_rho_pow(4).scale(ia);
        let couple = h.tail_integral()?;
        let moment = lever.zip(&couple, |a, c| a.add(&c.scale(-1.0))).scale(1.0 / ei);
        let curvature = moment.times_rho_pow(-4);
        curvature.tip_value().map_err(|e| Error::Domain(format!("curvature: {e}")))?;
        let slope = curvature.head_integral()?;
        let value = slope.head_integral()?;
        Ok(BendingField { value, slope, curvature, moment })
    }

    /// Solve all four problems on a common partition.
    pub fn solve(&self, forces: &ForceProfile) -> Result<LimitSolution> {
        let b = self.partition(&forces.components())?;
        Ok(LimitSolution {
            model: *self,
            forces: forces.clone(),
            stretch: self.stretch_on(&forces.f3, &b)?,
            torsion: self.torsion_on(&forces.g3, &b)?,
            bending: [self.bending_on(1, &forces.f1, &forces.g1, &b)?, self.bending_on(2, &forces.f2, &forces.g2, &b)?],
        })
    }
}

/// Stretch solution U₃ for a rod profile (only L is used).
pub fn solve_stretch(
    profile: &RodProfile,
    material: &Material,
    f3: &PiecewisePoly,
    section: &SectionConstants,
) -> Result<AxialField> {
    LimitModel::new(profile.length, *material, *section)?.stretch(f3)
}

/// Torsion rotation R₃ with stiffness `k`, Saint-Venant rigidity Kμ.
pub fn solve_torsion_rotation(
    profile: &RodProfile,
    material: &Material,
    g3: &PiecewisePoly,
    section: &SectionConstants,
    k: f64,
) -> Result<AxialField> {
    if !(k > 0.0) {
        return Err(Error::Precondition(format!("torsional stiffness must be positive, got {k}")));
    }
    let c = SectionConstants { stiffness: k, ..*section };
    LimitModel::new(profile.length, *material, c)?.torsion_rotation(g3)
}

/// Bending deflection U_α.
pub fn solve_bending(
    profile: &RodProfile,
    material: &Material,
    f: &PiecewisePoly,
    g: &PiecewisePoly,
    section: &SectionConstants,
    alpha: usize,
) -> Result<BendingField> {
    LimitModel::new(profile.length, *material, *section)?.bending(alpha, f, g)
}

/// Values of the limit fields and their derivatives at one x₃.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LimitState {
    pub x3: f64,
    pub u: [f64; 3],
    pub du: [f64; 3],
    /// U₁'', U₂''
    pub d2u: [f64; 2],
    pub r3: f64,
    pub dr3: f64,
}

/// Anything that can report the limit state along [0, L].
pub trait LimitField {
    fn length(&self) -> f64;
    fn state(&self, x3: f64) -> Result<LimitState>;
}

/// Exact limit solution for a force profile.
#[derive(Debug, Clone)]
pub struct LimitSolution {
    pub model: LimitModel,
    pub forces: ForceProfile,
    pub stretch: AxialField,
    pub torsion: AxialField,
    pub bending: [BendingField; 2],
}

impl LimitField for LimitSolution {
    fn length(&self) -> f64 {
        self.model.length
    }

    fn state(&self, x3: f64) -> Result<LimitState> {
        let l = self.model.length;
        if !(0.0..=l).contains(&x3) {
            return Err(Error::Domain(format!("x3 = {x3} outside [0, {l}]")));
        }
        let [b1, b2] = &self.bending;
        Ok(LimitState {
            x3,
            u: [b1.value.eval(x3), b2.value.eval(x3), self.stretch.value.eval(x3)],
            du: [b1.slope.eval(x3), b2.slope.eval(x3), self.stretch.slope.eval(x3)],
            d2u: [b1.curvature.eval(x3), b2.curvature.eval(x3)],
            r3: self.torsion.value.eval(x3),
            dr3: self.torsion.slope.eval(x3),
        })
    }
}

impl LimitSolution {
    /// Sample on `n + 1` equally spaced points.
    pub fn sample(&self, n: usize) -> Result<Limit1DSolution> {
        let l = self.model.length;
        let grid: Vec<f64> = (0..=n).map(|i| if i == n { l } else { l * i as f64 / n as f64 }).collect();
        self.sample_at(&grid)
    }

    pub fn sample_at(&self, grid: &[f64]) -> Result<Limit1DSolution> {
        let mut out = Limit1DSolution::with_grid(grid.to_vec());
        for (i, &x) in grid.iter().enumerate() {
            let s = self.state(x)?;
            out.set(i, &s);
            out.axial_force[i] = self.stretch.flux.eval(x);
            out.torque[i] = self.torsion.flux.eval(x);
            out.moment1[i] = self.bending[0].moment.eval(x);
            out.moment2[i] = self.bending[1].moment.eval(x);
        }
        Ok(out)
    }

    /// Elastic energy and force work of the limit problem, both exact.
    pub fn energy(&self) -> Result<EnergyReport> {
        let m = &self.model;
        let c = &m.constants;
        let e = m.material.young();
        let b = &self.stretch.value.breaks;
        let stretch = e * c.area * self.stretch.slope.weighted_inner(&self.stretch.slope, 2)?;
        let bending1 = e * c.inertia1 * self.bending[0].curvature.weighted_inner(&self.bending[0].curvature, 4)?;
        let bending2 = e * c.inertia2 * self.bending[1].curvature.weighted_inner(&self.bending[1].curvature, 4)?;
        let torsion = m.torsional_rigidity() * self.torsion.slope.weighted_inner(&self.torsion.slope, 4)?;
        let load = |p: &PiecewisePoly| p.to_loglaurent(m.length, b);
        let mut work = 0.0;
        work += c.area * load(&self.forces.f1).weighted_inner(&self.bending[0].value, 2)?;
        work += c.area * load(&self.forces.f2).weighted_inner(&self.bending[1].value, 2)?;
        work += c.area * load(&self.forces.f3).weighted_inner(&self.stretch.value, 2)?;
        work += c.polar() * load(&self.forces.g3).weighted_inner(&self.torsion.value, 4)?;
        work -= c.inertia1 * load(&self.forces.g1).weighted_inner(&self.bending[0].slope, 4)?;
        work -= c.inertia2 * load(&self.forces.g2).weighted_inner(&self.bending[1].slope, 4)?;
        Ok(EnergyReport::new(ElasticTerms { stretch, bending1, bending2, torsion }, work))
    }
}

/// The four quadratic terms of the limit energy.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ElasticTerms {
    pub stretch: f64,
    pub bending1: f64,
    pub bending2: f64,
    pub torsion: f64,
}

impl ElasticTerms {
    pub fn total(&self) -> f64 {
        self.stretch + self.bending1 + self.bending2 + self.torsion
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub elastic: ElasticTerms,
    pub elastic_total: f64,
    pub work: f64,
    pub relative_gap: f64,
}

impl EnergyReport {
    pub fn new(elastic: ElasticTerms, work: f64) -> Self {
        let t = elastic.total();
        let scale = t.abs().max(work.abs());
        let relative_gap = if scale == 0.0 { 0.0 } else { (t - work).abs() / scale };
        Self { elastic, elastic_total: t, work, relative_gap }
    }
}

/// Energy identity for a solution, checking that the inputs match those it
/// was solved with.
pub fn energy_identity(
    sol: &LimitSolution,
    forces: &ForceProfile,
    material: &Material,
    section: &SectionConstants,
) -> Result<EnergyReport> {
    if forces != &sol.forces || material != &sol.model.material || section != &sol.model.constants {
        return Err(Error::Precondition("energy identity: inputs differ from those of the solution".into()));
    }
    sol.energy()
}

/// Limit fields sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limit1DSolution {
    pub grid: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub u3: Vec<f64>,
    pub r3: Vec<f64>,
    pub du1: Vec<f64>,
    pub du2: Vec<f64>,
    pub du3: Vec<f64>,
    pub dr3: Vec<f64>,
    pub d2u1: Vec<f64>,
    pub d2u2: Vec<f64>,
    /// ρ²U₃'
    pub axial_force: Vec<f64>,
    /// ρ⁴R₃'
    pub torque: Vec<f64>,
    /// ρ⁴U₁''
    pub moment1: Vec<f64>,
    /// ρ⁴U₂''
    pub moment2: Vec<f64>,
}

impl Limit1DSolution {
    pub fn with_grid(grid: Vec<f64>) -> Self {
        let z = vec![0.0; grid.len()];
        Self {
            grid,
            u1: z.clone(),
            u2: z.clone(),
            u3: z.clone(),
            r3: z.clone(),
            du1: z.clone(),
            du2: z.clone(),
            du3: z.clone(),
            dr3: z.clone(),
            d2u1: z.clone(),
            d2u2: z.clone(),
            axial_force: z.clone(),
            torque: z.clone(),
            moment1: z.clone(),
            moment2: z,
        }
    }

    fn set(&mut self, i: usize, s: &LimitState) {
        self.u1[i] = s.u[0];
        self.u2[i] = s.u[1];
        self.u3[i] = s.u[2];
        self.r3[i] = s.r3;
        self.du1[i] = s.du[0];
        self.du2[i] = s.du[1];
        self.du3[i] = s.du[2];
        self.dr3[i] = s.dr3;
        self.d2u1[i] = s.d2u[0];
        self.d2u2[i] = s.d2u[1];
    }

    /// CSV with columns x3, U1, U2, U3, R3, dU3, d2U1, d2U2, dR3.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x3,U1,U2,U3,R3,dU3,d2U1,d2U2,dR3\n");
        for i in 0..self.grid.len() {
            let row = [
                self.grid[i],
                self.u1[i],
                self.u2[i],
                self.u3[i],
                self.r3[i],
                self.du3[i],
                self.d2u1[i],
                self.d2u2[i],
                self.dr3[i],
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    /// Largest and smallest value of each displacement column.
    pub fn extrema(&self) -> [(f64, f64); 4] {
        let mm = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        [mm(&self.u1), mm(&self.u2), mm(&self.u3), mm(&self.r3)]
    }
}

impl LimitField for Limit1DSolution {
    fn length(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Piecewise-linear interpolation of every column.
    fn state(&self, x3: f64) -> Result<LimitState> {
        let g = &self.grid;
        let n = g.len();
        if n < 2 || x3 < g[0] || x3 > g[n - 1] {
            return Err(Error::Domain(format!("x3 = {x3} outside the sampled grid")));
        }
        let k = g.partition_point(|&v| v <= x3).clamp(1, n - 1);
        let t = (x3 - g[k - 1]) / (g[k] - g[k - 1]);
        let lerp = |v: &[f64]| v[k - 1] + t * (v[k] - v[k - 1]);
        Ok(LimitState {
            x3,
            u: [lerp(&self.u1), lerp(&self.u2), lerp(&self.u3)],
            du: [lerp(&self.du1), lerp(&self.du2), lerp(&self.du3)],
            d2u: [lerp(&self.d2u1), lerp(&self.d2u2)],
            r3: lerp(&self.r3),
            dr3: lerp(&self.dr3),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_model(e_target: f64) -> LimitModel {
        // λ = 0 gives E = 2μ.
        let m = Material::new(0.0, e_target / 2.0).unwrap();
        let c = SectionConstants { area: 1.0, inertia1: 1.0, inertia2: 1.0, stiffness: 1.0 };
        LimitModel::new(1.0, m, c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn stretch_unit_load() {
        let m = unit_model(1.0);
        let s = m.stretch(&PiecewisePoly::constant(1.0, 1.0)).unwrap();
        for x in [0.0, 0.25, 0.5, 0.9, 1.0] {
            assert!(close(s.value.eval(x), (x - x * x / 2.0) / 3.0, 1e-13));
            assert!(close(s.slope.eval(x), (1.0 - x) / 3.0, 1e-13));
        }
        assert!(close(s.value.eval(0.5), 0.125, 1e-14));
        let s2 = unit_model(2.0).stretch(&PiecewisePoly::constant(1.0, 1.0)).unwrap();
        assert!(close(s2.value.eval(0.7), 0.5 * s.value.eval(0.7), 1e-14));
    }

    #[test]
    fn torsion_unit_load_half_convention() {
        // Kμ/2 = 1 with K = 1 means μ = 2.
        let m = Material::new(0.0, 2.0).unwrap();
        let c = SectionConstants { area: 1.0, inertia1: 0.5, inertia2: 0.5, stiffness: 1.0 };
        let model = LimitModel::new(1.0, m, c).unwrap().with_torsion_coefficient(TorsionCoefficient::Half);
        let r = model.torsion_rotation(&PiecewisePoly::constant(1.0, 1.0)).unwrap();
        for x in [0.0, 0.3, 0.8, 1.0] {
            assert!(close(r.value.eval(x), (2.0 * x - x * x) / 10.0, 1e-13));
            assert!(close(r.slope.eval(x), (1.0 - x) / 5.0, 1e-13));
        }
        // the same numbers with the full rigidity at Kμ = 1
        let full = LimitModel::new(1.0, Material::new(0.0, 1.0).unwrap(), c).unwrap();
        let rf = full.torsion_rotation(&PiecewisePoly::constant(1.0, 1.0)).unwrap();
        assert!(close(rf.value.eval(1.0), 0.1, 1e-14));
    }

    #[test]
    fn bending_benchmarks() {
        let m = unit_model(1.0);
        let one = PiecewisePoly::constant(1.0, 1.0);
        let b = m.bending(1, &one, &PiecewisePoly::zero()).unwrap();
        for x in [0.0, 0.4, 1.0] {
            assert!(close(b.moment.eval(x), (1.0 - x).powi(4) / 12.0, 1e-13));
            assert!(close(b.curvature.eval(x), 1.0 / 12.0, 1e-12));
            assert!(close(b.value.eval(x), x * x / 24.0, 1e-13));
        }
        let b = m.bending(2, &PiecewisePoly::zero(), &one).unwrap();
        for x in [0.0, 0.4, 1.0] {
            assert!(close(b.moment.eval(x), -(1.0 - x).powi(5) / 5.0, 1e-13));
            assert!(close(b.value.eval(x), -(3.0 * x * x - x.powi(3)) / 30.0, 1e-13));
        }
    }

    #[test]
    fn energy_identity_stretch() {
        let m = unit_model(1.0);
        let f = ForceProfile { f3: PiecewisePoly::constant(1.0, 1.0), ..Default::default() };
        let sol = m.solve(&f).unwrap();
        let r = sol.energy().unwrap();
        // ∫(1−x)²((1−x)/3)² = 1/45 and ∫(1−x)²(x − x²/2)/3 = 1/45
        assert!(close(r.elastic.stretch, 1.0 / 45.0, 1e-13));
        assert!(close(r.work, 1.0 / 45.0, 1e-13));
        assert!(r.relative_gap < 1e-12);
    }

    #[test]
    fn zero_forces_give_zero() {
        let sol = unit_model(1.0).solve(&ForceProfile::default()).unwrap();
        let s = sol.state(0.6).unwrap();
        assert_eq!(s, LimitState { x3: 0.6, ..Default::default() });
        let e = sol.energy().unwrap();
        assert_eq!((e.elastic_total, e.work, e.relative_gap), (0.0, 0.0, 0.0));
    }
}
