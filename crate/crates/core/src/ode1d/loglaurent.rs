//! Finite sums Σ c_{k,m} s^k (ln s)^m with integer k and m ≥ 0.
//!
//! This class contains the polynomials, is closed under products, division
//! by powers of s and antidifferentiation, which is all the limit problems
//! need once loads are polynomial in s = ρ(x₃).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogLaurent {
    terms: BTreeMap<(i32, u32), f64>,
}

impl LogLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::zero();
        f.add_term(0, 0, c);
        f
    }

    /// c·s^k (ln s)^m
    pub fn monomial(k: i32, m: u32, c: f64) -> Self {
        let mut f = Self::zero();
        f.add_term(k, m, c);
        f
    }

    /// Polynomial Σ c_k s^k.
    pub fn from_poly(coeffs: &[f64]) -> Self {
        let mut f = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            f.add_term(k as i32, 0, c);
        }
        f
    }

    pub fn add_term(&mut self, k: i32, m: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((k, m)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(k, m));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, f64)> + '_ {
        self.terms.iter().map(|(&(k, m), &c)| (k, m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().map(|&(k, _)| k).min()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.clone();
        for (k, m, c) in other.terms() {
            f.add_term(k, m, c);
        }
        f
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut f = Self::zero();
        for (k, m, c) in self.terms() {
            f.add_term(k, m, a * c);
        }
        f
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut f = Self::zero();
        for (k1, m1, c1) in self.terms() {
            for (k2, m2, c2) in other.terms() {
                f.add_term(k1 + k2, m1 + m2, c1 * c2);
            }
        }
        f
    }

    /// Multiply by s^j.
    pub fn shift(&self, j: i32) -> Self {
        Self { terms: self.terms.iter().map(|(&(k, m), &c)| ((k + j, m), c)).collect() }
    }

    /// d/ds.
    pub fn derivative(&self) -> Self {
        let mut f = Self::zero();
        for (k, m, c) in self.terms() {
            f.add_term(k - 1, m, c * k as f64);
            if m > 0 {
                f.add_term(k - 1, m - 1, c * m as f64);
            }
        }
        f
    }

    /// An antiderivative in s with no added constant.
    pub fn antiderivative(&self) -> Self {
        let mut f = Self::zero();
        for (k, m, c) in self.terms() {
            if k == -1 {
                f.add_term(0, m + 1, c / (m + 1) as f64);
            } else {
                // ∫ s^k ln^m s = s^{k+1} Σ_j (−1)^j m!/(m−j)! ln^{m−j} s / (k+1)^{j+1}
                let kp = (k + 1) as f64;
                let mut falling = 1.0;
                let mut pow = kp;
                for j in 0..=m {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    f.add_term(k + 1, m - j, c * sign * falling / pow);
                    falling *= (m - j) as f64;
                    pow *= kp;
                }
            }
        }
        f
    }

    /// Value at s > 0; at s = 0 the limit is returned (NaN if divergent).
    pub fn eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.limit_at_zero().unwrap_or(f64::NAN);
        }
        let ls = s.ln();
        self.terms().map(|(k, m, c)| c * s.powi(k) * ls.powi(m as i32)).sum()
    }

    /// lim_{s→0⁺}, an error when a term diverges.
    pub fn limit_at_zero(&self) -> Result<f64> {
        let mut v = 0.0;
        for (k, m, c) in self.terms() {
            if k > 0 {
                continue;
            }
            if k == 0 && m == 0 {
                v += c;
            } else {
                return Err(Error::Domain(format!(
                    "term {c:e}·s^{k}·ln^{m}(s) is unbounded at the tip (non-integrable singularity)"
                )));
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num_integral(f: &LogLaurent, a: f64, b: f64) -> f64 {
        crate::quadrature::gauss_on(40, a, b).iter().map(|&(x, w)| w * f.eval(x)).sum()
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let mut f = LogLaurent::zero();
        f.add_term(2, 0, 1.5);
        f.add_term(-1, 0, 0.7);
        f.add_term(-3, 0, 0.2);
        f.add_term(1, 2, -0.4);
        f.add_term(-1, 1, 0.9);
        let g = f.antiderivative();
        let (a, b) = (0.3, 1.7);
        assert!(((g.eval(b) - g.eval(a)) - num_integral(&f, a, b)).abs() < 1e-13);
        let back = g.derivative();
        for s in [0.2, 0.9, 1.3] {
            assert!((back.eval(s) - f.eval(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn limits() {
        let f = LogLaurent::from_poly(&[1.0, 2.0]).add(&LogLaurent::monomial(1, 3, 5.0));
        assert_eq!(f.limit_at_zero().unwrap(), 1.0);
        assert!(LogLaurent::monomial(0, 1, 1.0).limit_at_zero().is_err());
        assert!(LogLaurent::monomial(-2, 0, 1.0).eval(0.0).is_nan());
    }
}
