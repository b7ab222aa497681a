//! The stages behind each subcommand and the files they write.

use std::fs;
use std::io;
use std::path::PathBuf;

use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodtaper::decomposition::probe_estimates;
use rodtaper::fem2d::{solve_torsion, stiffness_bound_check, TorsionSolution};
use rodtaper::mesh::triangulate_levels;
use rodtaper::ode1d::{
    check_weighted_inequality, LimitModel, LoadCase, PiecewisePoly, SectionConstants, WeightedInequality,
};
use rodtaper::verify3d::ConvergenceSetup;
use rodtaper::{triangulate, CrossSection};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    fn solver(stage: &str, e: impl Into<anyhow::Error>) -> Self {
        Failure::Solver(e.into().context(format!("{stage} stage")))
    }
}

/// One invariant check reported in `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

pub struct Pipeline {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub quiet: bool,
    pub checks: Vec<Check>,
    summary: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Section,
    Torsion,
    Solve1d,
    Probe,
    Verify3d,
    All,
}

impl Pipeline {
    pub fn new(cfg: RunConfig, out: PathBuf, quiet: bool) -> Self {
        Self { cfg, out, quiet, checks: Vec::new(), summary: Default::default() }
    }

    fn log(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn check(&mut self, name: &str, value: f64, limit: f64, passed: bool) {
        if !passed {
            self.log(format!("check failed: {name} = {value:.3e} (limit {limit:.3e})"));
        }
        self.checks.push(Check { name: name.into(), passed, value, limit });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::Config)
    }

    fn write_json(&self, name: &str, v: &impl Serialize) -> Result<(), Failure> {
        self.write(name, &to_json(v))
    }

    pub fn run(&mut self, stage: Stage) -> Result<(), Failure> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))
            .map_err(Failure::Config)?;
        let section = self.cfg.cross_section().map_err(Failure::Config)?;
        self.section(&section)?;
        if matches!(stage, Stage::Torsion | Stage::Solve1d | Stage::All) {
            let tor = self.torsion(&section)?;
            if stage != Stage::Torsion {
                self.solve1d(&section, &tor)?;
            }
        }
        if stage == Stage::Probe || (stage == Stage::All && self.cfg.outputs.probe) {
            self.probe(&section)?;
        }
        if stage == Stage::Verify3d || (stage == Stage::All && self.cfg.outputs.verify3d) {
            self.verify3d(&section)?;
        }
        self.summary.insert("config".into(), serde_json::to_value(&self.cfg).unwrap());
        self.summary.insert("checks".into(), serde_json::to_value(&self.checks).unwrap());
        self.summary.insert("passed".into(), json!(self.passed()));
        let summary = Value::Object(std::mem::take(&mut self.summary));
        self.write_json("summary.json", &summary)
    }

    fn section(&mut self, s: &CrossSection) -> Result<(), Failure> {
        let r = s.frame_residuals().map_err(|e| Failure::solver("section", e))?;
        let scale = s.polar_inertia();
        let worst = r.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale;
        self.check(
            "section.frame_residual",
            worst,
            self.cfg.solver.tolerances.frame,
            worst <= self.cfg.solver.tolerances.frame,
        );
        let v = json!({
            "area": s.area,
            "inertia1": s.inertia1,
            "inertia2": s.inertia2,
            "rotation_applied": s.rotation_applied,
            "centroid_shift": s.centroid_shift,
            "frame_residuals": r,
            "vertices": s.polygon.vertices(),
        });
        self.write_json("section.json", &v)?;
        self.summary.insert("section".into(), json!({"area": s.area, "inertia1": s.inertia1, "inertia2": s.inertia2}));
        self.log(format!("section: |ω| = {:.6}, I1 = {:.6}, I2 = {:.6}", s.area, s.inertia1, s.inertia2));
        Ok(())
    }

    fn torsion(&mut self, s: &CrossSection) -> Result<TorsionSolution, Failure> {
        let mesh = match self.cfg.solver.h2d {
            Some(h) => triangulate(s, h),
            None => triangulate_levels(s, self.cfg.solver.refine_levels),
        }
        .map_err(|e| Failure::solver("mesh", e))?;
        let sol = solve_torsion(&mesh).map_err(|e| Failure::solver("torsion", e))?;
        let tol = self.cfg.solver.tolerances.residual;
        self.check("torsion.residual", sol.residual, tol, sol.residual <= tol);
        let bound = match stiffness_bound_check(&sol, s) {
            Ok(b) => b,
            Err(e) => {
                self.check("torsion.stiffness_bound", sol.stiffness, s.polar_inertia(), false);
                return Err(Failure::solver("torsion", e));
            }
        };
        self.check("torsion.stiffness_bound", sol.stiffness, bound.bound, true);
        let v = json!({
            "stiffness": sol.stiffness,
            "gradient_norm_sq": sol.gradient_norm_sq,
            "mesh_inertia": sol.mesh_inertia,
            "bound": bound.bound,
            "ratio": bound.ratio,
            "residual": sol.residual,
            "mean_residual": sol.mean_residual,
            "nodes": mesh.node_count(),
            "triangles": mesh.triangle_count(),
            "max_edge": mesh.max_edge(),
        });
        self.write_json("torsion.json", &v)?;
        if self.cfg.outputs.mesh {
            self.write("torsion_mesh.txt", &sol.to_text())?;
        }
        self.summary.insert("stiffness".into(), json!(sol.stiffness));
        self.log(format!("torsion: K = {:.8} on {} triangles", sol.stiffness, mesh.triangle_count()));
        Ok(sol)
    }

    fn solve1d(&mut self, s: &CrossSection, tor: &TorsionSolution) -> Result<(), Failure> {
        let cfg = &self.cfg;
        let model = LimitModel::new(
            cfg.rod.length,
            cfg.material().map_err(Failure::Config)?,
            SectionConstants::new(s, tor.stiffness),
        )
        .map_err(|e| Failure::solver("solve1d", e))?
        .with_torsion_coefficient(cfg.solver.torsion_coefficient);
        let sol = model.solve(&cfg.force_profile()).map_err(|e| Failure::solver("solve1d", e))?;
        let sampled = sol.sample(cfg.solver.n_elements_1d).map_err(|e| Failure::solver("solve1d", e))?;
        let energy = sol.energy().map_err(|e| Failure::solver("solve1d", e))?;
        self.write("solution.csv", &sampled.to_csv())?;
        self.write_json("energy.json", &energy)?;
        let tol = cfg.solver.tolerances.energy_gap;
        self.check("solve1d.energy_gap", energy.relative_gap, tol, energy.relative_gap <= tol);
        let ex = sampled.extrema();
        let extrema: serde_json::Map<String, Value> = ["U1", "U2", "U3", "R3"]
            .iter()
            .zip(ex)
            .map(|(k, (lo, hi))| (k.to_string(), json!({"min": lo, "max": hi})))
            .collect();
        self.summary.insert("solution_extrema".into(), Value::Object(extrema));
        self.summary.insert("energy".into(), serde_json::to_value(energy).unwrap());
        self.log(format!("solve1d: energy {:.6e}, relative gap {:.1e}", energy.elastic_total, energy.relative_gap));
        self.inequalities()
    }

    /// Weighted inequalities on random admissible polynomials.
    fn inequalities(&mut self) -> Result<(), Failure> {
        let n = self.cfg.solver.inequality_samples;
        if n == 0 {
            return Ok(());
        }
        let l = self.cfg.rod.length;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut report = serde_json::Map::new();
        for which in [WeightedInequality::H1Rho, WeightedInequality::H1Rho2, WeightedInequality::H2Rho2] {
            let (mut worst, mut violations) = (0.0f64, 0usize);
            for _ in 0..n {
                let mut c: Vec<f64> = (0..=4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                c[0] = 0.0;
                if which == WeightedInequality::H2Rho2 {
                    c[1] = 0.0;
                }
                let r = check_weighted_inequality(which, &PiecewisePoly::polynomial(l, c), l)
                    .map_err(|e| Failure::solver("inequality", e))?;
                worst = worst.max(r.ratio);
                violations += usize::from(!r.holds);
            }
            let name = format!("{which:?}");
            self.check(&format!("inequality.{name}"), violations as f64, 0.0, violations == 0);
            report.insert(name, json!({"samples": n, "max_ratio": worst, "violations": violations}));
        }
        self.summary.insert("inequalities".into(), Value::Object(report));
        Ok(())
    }

    fn probe(&mut self, s: &CrossSection) -> Result<(), Failure> {
        let growth = self.cfg.solver.tolerances.probe_growth;
        let mut csv = String::new();
        let mut all = Vec::new();
        for fam in self.cfg.probe_families().map_err(Failure::Config)? {
            let p = probe_estimates(fam.name(), |_| fam.field(), s, self.cfg.rod.length, &self.cfg.rod.epsilon_list)
                .map_err(|e| Failure::solver("probe", e))?;
            let text = p.to_csv();
            // one header for all families
            csv.push_str(if csv.is_empty() { &text } else { text.split_once('\n').map_or("", |t| t.1) });
            let worst = p.summary.iter().filter_map(|s| s.growth).fold(1.0, f64::max);
            self.check(&format!("probe.{}", fam.name()), worst, growth, p.bounded(growth));
            self.log(format!("probe: {} growth {worst:.3}", fam.name()));
            all.push(p);
        }
        self.write("probe.csv", &csv)?;
        self.write_json("probe.json", &all)?;
        let brief: Vec<Value> = all.iter().map(|p| json!({"family": p.family, "summary": p.summary})).collect();
        self.summary.insert("probe".into(), Value::Array(brief));
        Ok(())
    }

    fn verify3d(&mut self, s: &CrossSection) -> Result<(), Failure> {
        let cfg = &self.cfg;
        let mut setup = ConvergenceSetup::new(
            s,
            cfg.material().map_err(Failure::Config)?,
            cfg.rod.length,
            cfg.solver.verify_levels,
        )
        .map_err(|e| Failure::solver("verify3d", e))?;
        setup.layers = cfg.layer_spec();
        setup.order = cfg.solver.element_order;
        let report = setup.run(&cfg.rod.epsilon_list, &LoadCase::ALL).map_err(|e| Failure::solver("verify3d", e))?;
        self.write("convergence.csv", &report.to_csv())?;
        self.write_json("convergence.json", &report)?;
        for case in LoadCase::ALL {
            let rows = report.case_rows(case);
            let last = rows.last().map_or(f64::NAN, |r| r.discrepancy);
            self.check(&format!("verify3d.monotone.{}", case.name()), last, rows[0].discrepancy, report.monotone(case));
            let tol = self.cfg.solver.tolerances.residual;
            let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
            self.check(&format!("verify3d.residual.{}", case.name()), worst, tol, worst <= tol);
            self.log(format!(
                "verify3d: {} discrepancy {}",
                case.name(),
                rows.iter().map(|r| format!("{:.4}", r.discrepancy)).collect::<Vec<_>>().join(" -> ")
            ));
        }
        self.summary.insert(
            "convergence".into(),
            json!({"order": setup.order, "layers": setup.layers, "stiffness": setup.stiffness, "rows": report.rows}),
        );
        Ok(())
    }
}

/// Pretty JSON with every float written with 17 significant digits.
pub fn to_json(v: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sci(serde_json::ser::PrettyFormatter::new()));
    v.serialize(&mut ser).expect("serializable value");
    buf.push(b'\n');
    String::from_utf8(buf).unwrap()
}

struct Sci<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Sci<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
