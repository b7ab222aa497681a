//! Piecewise functions on [0, L]: polynomial loads in x₃, and exact
//! solution fields stored per piece as [`LogLaurent`] sums in s = 1 − x₃/L.

use serde::{Deserialize, Serialize};

use super::loglaurent::LogLaurent;
use crate::error::{Error, Result};

/// One polynomial piece Σ c_n x₃ⁿ (global monomials) on [a, b].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySegment {
    pub interval: [f64; 2],
    pub coeffs: Vec<f64>,
}

/// Piecewise polynomial in x₃, zero outside the listed segments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PiecewisePoly {
    segments: Vec<PolySegment>,
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(length: f64, c: f64) -> Self {
        Self { segments: vec![PolySegment { interval: [0.0, length], coeffs: vec![c] }] }
    }

    pub fn polynomial(length: f64, coeffs: Vec<f64>) -> Self {
        Self { segments: vec![PolySegment { interval: [0.0, length], coeffs }] }
    }

    /// Segments must be non-overlapping; they are sorted by left end.
    pub fn new(mut segments: Vec<PolySegment>) -> Result<Self> {
        segments.sort_by(|a, b| a.interval[0].total_cmp(&b.interval[0]));
        for s in &segments {
            let [a, b] = s.interval;
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Precondition(format!("load interval [{a}, {b}] is empty or not finite")));
            }
            if s.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Precondition("load coefficients must be finite".into()));
            }
        }
        for w in segments.windows(2) {
            if w[1].interval[0] < w[0].interval[1] {
                return Err(Error::Precondition(format!(
                    "load intervals [{}, {}] and [{}, {}] overlap",
                    w[0].interval[0], w[0].interval[1], w[1].interval[0], w[1].interval[1]
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PolySegment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.coeffs.iter().all(|&c| c == 0.0))
    }

    /// Check that all segments lie in [0, L].
    pub fn validate(&self, length: f64) -> Result<()> {
        for s in &self.segments {
            if s.interval[0] < 0.0 || s.interval[1] > length * (1.0 + 1e-14) {
                return Err(Error::Precondition(format!(
                    "load interval [{}, {}] leaves [0, {length}]",
                    s.interval[0], s.interval[1]
                )));
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.segments.iter().map(|s| s.coeffs.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().flat_map(|s| s.interval).collect()
    }

    /// Value at x₃; at a shared breakpoint the right-hand segment wins.
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for s in &self.segments {
            if x >= s.interval[0] && x <= s.interval[1] {
                v = horner(&s.coeffs, x);
                if x < s.interval[1] {
                    break;
                }
            }
        }
        v
    }

    /// α·self + β·other.
    pub fn combine(&self, a: f64, other: &Self, b: f64, length: f64) -> Self {
        let mut brk = merge_breaks(length, &[self.breakpoints(), other.breakpoints()]);
        brk.dedup();
        let mut segments = Vec::new();
        for w in brk.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let p = self.segment_at(mid).map(|s| s.coeffs.clone()).unwrap_or_default();
            let q = other.segment_at(mid).map(|s| s.coeffs.clone()).unwrap_or_default();
            let n = p.len().max(q.len());
            let coeffs: Vec<f64> =
                (0..n).map(|i| a * p.get(i).copied().unwrap_or(0.0) + b * q.get(i).copied().unwrap_or(0.0)).collect();
            if coeffs.iter().any(|&c| c != 0.0) {
                segments.push(PolySegment { interval: [w[0], w[1]], coeffs });
            }
        }
        Self { segments }
    }

    fn segment_at(&self, x: f64) -> Option<&PolySegment> {
        self.segments.iter().find(|s| x > s.interval[0] && x < s.interval[1])
    }

    /// Restatement on the given partition as polynomials in s = 1 − x/L.
    pub fn to_loglaurent(&self, length: f64, breaks: &[f64]) -> PiecewiseLL {
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                match self.segment_at(mid) {
                    Some(seg) => LogLaurent::from_poly(&poly_x_to_s(&seg.coeffs, length)),
                    None => LogLaurent::zero(),
                }
            })
            .collect();
        PiecewiseLL { length, breaks: breaks.to_vec(), pieces }
    }
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Coefficients in s of Σ c_n xⁿ with x = L(1 − s).
pub(crate) fn poly_x_to_s(c: &[f64], length: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    let mut lpow = 1.0;
    for (n, &cn) in c.iter().enumerate() {
        // (1 − s)^n
        let mut binom = 1.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out[k] += cn * lpow * binom * sign;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        lpow *= length;
    }
    out
}

/// Sorted union of 0, L and the given interior points.
pub(crate) fn merge_breaks(length: f64, lists: &[Vec<f64>]) -> Vec<f64> {
    let mut b = vec![0.0, length];
    for l in lists {
        b.extend(l.iter().copied().filter(|&x| x > 0.0 && x < length));
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * length);
    b
}

/// Piecewise [`LogLaurent`] field on a partition of [0, L]; piece j covers
/// [breaks[j], breaks[j+1]] and is written in s = 1 − x₃/L.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLL {
    pub length: f64,
    pub breaks: Vec<f64>,
    pub pieces: Vec<LogLaurent>,
}

impl PiecewiseLL {
    pub fn zero(length: f64, breaks: &[f64]) -> Self {
        Self { length, breaks: breaks.to_vec(), pieces: vec![LogLaurent::zero(); breaks.len() - 1] }
    }

    fn s_of(&self, x: f64) -> f64 {
        1.0 - x / self.length
    }

    fn piece_index(&self, x: f64) -> usize {
        let m = self.pieces.len();
        let k = self.breaks[1..m].partition_point(|&b| b <= x);
        k.min(m - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let j = self.piece_index(x);
        self.pieces[j].eval(self.s_of(x).max(0.0))
    }

    pub fn map(&self, f: impl Fn(&LogLaurent) -> LogLaurent) -> Self {
        Self { length: self.length, breaks: self.breaks.clone(), pieces: self.pieces.iter().map(f).collect() }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(&LogLaurent, &LogLaurent) -> LogLaurent) -> Self {
        assert_eq!(self.breaks, other.breaks, "piecewise fields on different partitions");
        Self {
            length: self.length,
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().zip(&other.pieces).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Multiply by ρ^j.
    pub fn times_rho_pow(&self, j: i32) -> Self {
        self.map(|p| p.shift(j))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|p| p.scale(a))
    }

    /// d/dx₃.
    pub fn derivative(&self) -> Self {
        let l = self.length;
        self.map(|p| p.derivative().scale(-1.0 / l))
    }

    /// x ↦ ∫ₓᴸ F(t) dt, built from the tip down.
    pub fn tail_integral(&self) -> Result<Self> {
        let l = self.length;
        let m = self.pieces.len();
        let mut pieces = vec![LogLaurent::zero(); m];
        let mut acc = 0.0;
        for j in (0..m).rev() {
            let g = self.pieces[j].antiderivative().scale(l);
            let s_hi = self.s_of(self.breaks[j + 1]);
            let at = if j == m - 1 { g.limit_at_zero()? } else { g.eval(s_hi) };
            let mut p = g;
            p.add_term(0, 0, acc - at);
            let s_lo = self.s_of(self.breaks[j]);
            acc = if j == 0 { 0.0 } else { p.eval(s_lo) };
            pieces[j] = p;
        }
        Ok(Self { length: l, breaks: self.breaks.clone(), pieces })
    }

    /// x ↦ ∫₀ˣ F(t) dt, built from the root up.
    pub fn head_integral(&self) -> Result<Self> {
        let l = self.length;
        let m = self.pieces.len();
        let mut pieces = Vec::with_capacity(m);
        let mut acc = 0.0;
        for j in 0..m {
            let g = self.pieces[j].antiderivative().scale(-l);
            let s_lo = self.s_of(self.breaks[j]);
            let mut p = g.clone();
            p.add_term(0, 0, acc - g.eval(s_lo));
            if j + 1 < m {
                acc = p.eval(self.s_of(self.breaks[j + 1]));
            } else {
                p.limit_at_zero()?;
            }
            pieces.push(p);
        }
        Ok(Self { length: l, breaks: self.breaks.clone(), pieces })
    }

    /// ∫₀ᴸ F dx₃.
    pub fn integral(&self) -> Result<f64> {
        let t = self.tail_integral()?;
        Ok(t.pieces[0].eval(1.0))
    }

    /// ∫₀ᴸ ρ^p F G dx₃.
    pub fn weighted_inner(&self, other: &Self, p: i32) -> Result<f64> {
        self.zip(other, |a, b| a.mul(b).shift(p)).integral()
    }

    /// Value at the tip x₃ = L, an error when unbounded there.
    pub fn tip_value(&self) -> Result<f64> {
        self.pieces.last().unwrap().limit_at_zero()
    }
}
