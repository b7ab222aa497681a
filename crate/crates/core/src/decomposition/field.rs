use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
/// Row i holds ∂u_i/∂x_j.
pub type Mat3 = [[f64; 3]; 3];

/// A displacement field on the physical rod Ω_ε.
pub trait Field3D: Sync {
    fn value(&self, x: Vec3) -> Vec3;

    /// Central differences unless overridden.
    fn gradient(&self, x: Vec3) -> Mat3 {
        let h = 1e-6;
        let mut g = [[0.0; 3]; 3];
        for j in 0..3 {
            let (mut p, mut m) = (x, x);
            p[j] += h;
            m[j] -= h;
            let (up, um) = (self.value(p), self.value(m));
            for i in 0..3 {
                g[i][j] = (up[i] - um[i]) / (2.0 * h);
            }
        }
        g
    }
}

/// c · x₁^a x₂^b x₃^c
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: f64,
    pub powers: [u32; 3],
}

/// Vector field with polynomial components and an exact gradient.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyField {
    pub components: [Vec<PolyTerm>; 3],
}

fn monomial(x: Vec3, p: [u32; 3]) -> f64 {
    x[0].powi(p[0] as i32) * x[1].powi(p[1] as i32) * x[2].powi(p[2] as i32)
}

impl PolyField {
    pub fn term(mut self, component: usize, coeff: f64, powers: [u32; 3]) -> Self {
        self.components[component].push(PolyTerm { coeff, powers });
        self
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().flatten().map(|t| t.powers.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Whether every term carries a factor x₃, so u = 0 on x₃ = 0.
    pub fn is_clamped(&self) -> bool {
        self.components.iter().flatten().all(|t| t.coeff == 0.0 || t.powers[2] > 0)
    }
}

impl Field3D for PolyField {
    fn value(&self, x: Vec3) -> Vec3 {
        std::array::from_fn(|i| self.components[i].iter().map(|t| t.coeff * monomial(x, t.powers)).sum())
    }

    fn gradient(&self, x: Vec3) -> Mat3 {
        let mut g = [[0.0; 3]; 3];
        for (i, comp) in self.components.iter().enumerate() {
            for t in comp {
                for j in 0..3 {
                    if t.powers[j] == 0 {
                        continue;
                    }
                    let mut p = t.powers;
                    p[j] -= 1;
                    g[i][j] += t.coeff * t.powers[j] as f64 * monomial(x, p);
                }
            }
        }
        g
    }
}

/// Named analytic displacement families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldFamily {
    /// (x₃², 0, −2x₁x₃): a Bernoulli-Navier bending field.
    Bending,
    /// (−x₂x₃, x₁x₃, 0): twist with ℛ₃ = x₃.
    Torsion,
    /// (−2νx₁x₃, −2νx₂x₃, x₃²): stretch with lateral contraction.
    Stretch {
        nu: f64,
    },
    /// A + B ∧ x.
    Rigid {
        translation: Vec3,
        rotation: Vec3,
    },
    /// Random coefficients in [−1, 1] on all monomials up to `degree`,
    /// multiplied by x₃ when clamped.
    RandomPolynomial {
        seed: u64,
        degree: u32,
        clamped: bool,
    },
    Zero,
}

impl FieldFamily {
    /// The three clamped families used by the estimate probes.
    pub fn clamped_builtins(nu: f64) -> [FieldFamily; 3] {
        [FieldFamily::Bending, FieldFamily::Torsion, FieldFamily::Stretch { nu }]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FieldFamily::Bending => "bending",
            FieldFamily::Torsion => "torsion",
            FieldFamily::Stretch { .. } => "stretch",
            FieldFamily::Rigid { .. } => "rigid",
            FieldFamily::RandomPolynomial { .. } => "random_polynomial",
            FieldFamily::Zero => "zero",
        }
    }

    pub fn field(&self) -> Result<PolyField> {
        let f = PolyField::default();
        Ok(match *self {
            FieldFamily::Bending => f.term(0, 1.0, [0, 0, 2]).term(2, -2.0, [1, 0, 1]),
            FieldFamily::Torsion => f.term(0, -1.0, [0, 1, 1]).term(1, 1.0, [1, 0, 1]),
            FieldFamily::Stretch { nu } => {
                if !(-1.0..0.5).contains(&nu) {
                    return Err(Error::Domain(format!("Poisson ratio must lie in (-1, 1/2), got {nu}")));
                }
                f.term(0, -2.0 * nu, [1, 0, 1]).term(1, -2.0 * nu, [0, 1, 1]).term(2, 1.0, [0, 0, 2])
            }
            FieldFamily::Rigid { translation: a, rotation: b } => {
                // B ∧ x = (b₂x₃ − b₃x₂, b₃x₁ − b₁x₃, b₁x₂ − b₂x₁)
                f.term(0, a[0], [0, 0, 0])
                    .term(0, b[1], [0, 0, 1])
                    .term(0, -b[2], [0, 1, 0])
                    .term(1, a[1], [0, 0, 0])
                    .term(1, b[2], [1, 0, 0])
                    .term(1, -b[0], [0, 0, 1])
                    .term(2, a[2], [0, 0, 0])
                    .term(2, b[0], [0, 1, 0])
                    .term(2, -b[1], [1, 0, 0])
            }
            FieldFamily::RandomPolynomial { seed, degree, clamped } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut f = f;
                for c in 0..3 {
                    for a in 0..=degree {
                        for b in 0..=degree - a {
                            for k in 0..=degree - a - b {
                                let k = if clamped { k + 1 } else { k };
                                f = f.term(c, rng.gen_range(-1.0..=1.0), [a, b, k]);
                            }
                        }
                    }
                }
                f
            }
            FieldFamily::Zero => f,
        })
    }
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm_sq(a: Vec3) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// Squared Frobenius norm of the symmetric part.
pub(crate) fn sym_norm_sq(g: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let e = 0.5 * (g[i][j] + g[j][i]);
            s += e * e;
        }
    }
    s
}

pub(crate) fn frob_sq(g: &Mat3) -> f64 {
    g.iter().flatten().map(|v| v * v).sum()
}
