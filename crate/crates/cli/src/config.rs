//! Run configuration: one JSON document, optionally patched by dotted
//! `--a.b value` overrides before it is deserialized.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rodtaper::decomposition::FieldFamily;
use rodtaper::ode1d::{ForceProfile, LoadCase, TorsionCoefficient};
use rodtaper::verify3d::{ElementOrder, LayerSpec};
use rodtaper::{principal_frame, shapes, CrossSection, Material, Polygon, RodProfile};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub section: SectionConfig,
    pub rod: RodConfig,
    pub material: MaterialConfig,
    pub forces: ForcesConfig,
    pub solver: SolverConfig,
    pub outputs: OutputConfig,
    /// Seed of the randomized property sweeps.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            section: SectionConfig::default(),
            rod: RodConfig::default(),
            material: MaterialConfig { lambda: 1.0, mu: 1.0 },
            forces: ForcesConfig::Case(LoadCase::Stretch),
            solver: SolverConfig::default(),
            outputs: OutputConfig::default(),
            seed: 0,
        }
    }
}

/// A named shape or an explicit polygon, then rotated by `rotation` radians
/// and shifted by `shift` before the principal frame is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectionConfig {
    /// disc, ellipse, rectangle or polygon
    pub shape: String,
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub width: f64,
    pub height: f64,
    pub segments: Option<usize>,
    pub vertices: Vec<[f64; 2]>,
    pub rotation: f64,
    pub shift: [f64; 2],
}

impl Default for SectionConfig {
    fn default() -> Self {
        Self {
            shape: "disc".into(),
            radius: 1.0,
            a: 2.0,
            b: 1.0,
            width: 1.0,
            height: 1.0,
            segments: None,
            vertices: Vec::new(),
            rotation: 0.0,
            shift: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RodConfig {
    #[serde(rename = "L")]
    pub length: f64,
    pub epsilon_list: Vec<f64>,
}

impl Default for RodConfig {
    fn default() -> Self {
        Self { length: 1.0, epsilon_list: vec![0.2, 0.1, 0.05] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub lambda: f64,
    pub mu: f64,
}

/// Either a unit benchmark case by name or an explicit force profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForcesConfig {
    Case(LoadCase),
    Profile(ForceProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target 2D mesh size; overrides `refine_levels` when set.
    pub h2d: Option<f64>,
    /// Red refinements of the ear-clipped section for the torsion problem.
    pub refine_levels: usize,
    /// Uniformly graded 3D layers; `None` picks them from the local aspect.
    pub n_layers: Option<usize>,
    /// Intervals of the sampling grid of the 1D solution.
    pub n_elements_1d: usize,
    pub torsion_coefficient: TorsionCoefficient,
    /// Refinements of the 3D base section.
    pub verify_levels: usize,
    pub element_order: ElementOrder,
    /// Random admissible polynomials per weighted inequality.
    pub inequality_samples: usize,
    pub tolerances: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            h2d: None,
            refine_levels: 4,
            n_layers: None,
            n_elements_1d: 200,
            torsion_coefficient: TorsionCoefficient::Full,
            verify_levels: 2,
            element_order: ElementOrder::Quadratic,
            inequality_samples: 100,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual of the linear solves.
    pub residual: f64,
    /// Relative gap between elastic energy and force work.
    pub energy_gap: f64,
    /// Principal-frame residuals relative to I₁ + I₂.
    pub frame: f64,
    /// Allowed growth of estimate ratios over the ε sequence.
    pub probe_growth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-10, energy_gap: 1e-8, frame: 1e-10, probe_growth: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Run the estimate probes as part of `all`.
    pub probe: bool,
    /// Run the 3D convergence study as part of `all`.
    pub verify3d: bool,
    /// Write the torsion mesh and χ as text.
    pub mesh: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), probe: true, verify3d: false, mesh: true }
    }
}

impl RunConfig {
    /// Parse `text` (empty means defaults), apply overrides, deserialize.
    pub fn from_json(text: Option<&str>, overrides: &[(String, Value)]) -> Result<Self> {
        let mut v = match text {
            Some(t) => serde_json::from_str(t).context("config is not valid JSON")?,
            None => Value::Object(Default::default()),
        };
        for (path, value) in overrides {
            set_path(&mut v, path, value.clone())?;
        }
        let c: RunConfig = serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            anyhow!("config field '{path}': {}", e.into_inner())
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, Value)]) -> Result<Self> {
        let text = path
            .map(|p| std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display())))
            .transpose()?;
        Self::from_json(text.as_deref(), overrides)
    }

    fn validate(&self) -> Result<()> {
        self.cross_section()?;
        self.material()?;
        let l = self.rod.length;
        if self.rod.epsilon_list.is_empty() {
            bail!("config field 'rod.epsilon_list': at least one epsilon is required");
        }
        for &e in &self.rod.epsilon_list {
            RodProfile::new(l, e).context("config field 'rod.epsilon_list'")?;
        }
        self.force_profile().validate(l).context("config field 'forces'")?;
        if let Some(h) = self.solver.h2d {
            if !(h > 0.0 && h.is_finite()) {
                bail!("config field 'solver.h2d': must be positive, got {h}");
            }
        }
        if self.solver.n_elements_1d == 0 {
            bail!("config field 'solver.n_elements_1d': must be at least 1");
        }
        if self.solver.n_layers == Some(0) {
            bail!("config field 'solver.n_layers': must be at least 1");
        }
        Ok(())
    }

    pub fn polygon(&self) -> Result<Polygon> {
        let s = &self.section;
        let ctx = || format!("config field 'section' (shape '{}')", s.shape);
        let p = match s.shape.as_str() {
            "disc" => shapes::disc(s.radius, s.segments.unwrap_or(128)),
            "ellipse" => shapes::ellipse(s.a, s.b, s.segments.unwrap_or(256)),
            "rectangle" => shapes::rectangle(s.width, s.height),
            "polygon" => Polygon::new(s.vertices.clone()),
            other => bail!(
                "config field 'section.shape': unknown shape '{other}' (expected disc, ellipse, rectangle, polygon)"
            ),
        }
        .with_context(ctx)?;
        Ok(p.transformed(s.rotation, s.shift))
    }

    pub fn cross_section(&self) -> Result<CrossSection> {
        principal_frame(&self.polygon()?).context("config field 'section'")
    }

    pub fn material(&self) -> Result<Material> {
        Material::new(self.material.lambda, self.material.mu).context("config field 'material'")
    }

    pub fn force_profile(&self) -> ForceProfile {
        match &self.forces {
            ForcesConfig::Case(c) => c.unit_forces(self.rod.length),
            ForcesConfig::Profile(p) => p.clone(),
        }
    }

    pub fn layer_spec(&self) -> LayerSpec {
        match self.solver.n_layers {
            Some(n) => LayerSpec::Graded { n },
            None => LayerSpec::GradedAspect { aspect: 1.0, min_layers: 8 },
        }
    }

    /// The clamped families probed by the `probe` stage.
    pub fn probe_families(&self) -> Result<[FieldFamily; 3]> {
        Ok(FieldFamily::clamped_builtins(self.material()?.poisson()))
    }
}

/// Set `root.a.b.c = value`, creating intermediate objects.
fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        bail!("override '{path}': empty key");
    }
    let mut cur = root;
    for (i, k) in keys.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| anyhow!("override '{path}': '{}' is not an object", keys[..i].join(".")))?;
        if i + 1 == keys.len() {
            obj.insert(k.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!()
}

/// Split `--a.b value` / `--a.b=value` pairs. Values are parsed as JSON
/// when possible and kept as strings otherwise.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, Value)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a.strip_prefix("--").ok_or_else(|| anyhow!("unexpected argument '{a}'"))?;
        let (key, raw) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => (key.to_string(), it.next().ok_or_else(|| anyhow!("override '--{key}' needs a value"))?.clone()),
        };
        let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        out.push((key, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_patch_nested_fields() {
        let o = parse_overrides(&["--rod.L".into(), "2".into(), "--section.shape=rectangle".into()]).unwrap();
        let c = RunConfig::from_json(Some(r#"{"rod": {"epsilon_list": [0.3]}}"#), &o).unwrap();
        assert_eq!(c.rod.length, 2.0);
        assert_eq!(c.rod.epsilon_list, vec![0.3]);
        assert_eq!(c.section.shape, "rectangle");
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::from_json(Some(r#"{"solver": {"refine_levels": "x"}}"#), &[]).unwrap_err();
        assert!(e.to_string().contains("solver.refine_levels"), "{e}");
        let e = RunConfig::from_json(Some(r#"{"rod": {"epsilon_list": [0.6]}}"#), &[]).unwrap_err();
        assert!(format!("{e:#}").contains("rod.epsilon_list"), "{e:#}");
        assert!(RunConfig::from_json(Some(r#"{"colour": 1}"#), &[]).is_err());
    }

    #[test]
    fn forces_accept_a_case_name_or_a_profile() {
        let c = RunConfig::from_json(Some(r#"{"forces": "torsion"}"#), &[]).unwrap();
        assert_eq!(c.force_profile(), LoadCase::Torsion.unit_forces(1.0));
        let c =
            RunConfig::from_json(Some(r#"{"forces": {"f1": [{"interval": [0, 1], "coeffs": [2]}]}}"#), &[]).unwrap();
        assert_eq!(c.force_profile().f1.eval(0.5), 2.0);
    }
}
