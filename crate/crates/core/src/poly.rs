//! Dense univariate complex polynomials.

use crate::point::{C64, ZERO};

/// Coefficients in ascending degree: `coeffs[i]` multiplies `z^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly::new(vec![ZERO])
    }

    /// Index of the last coefficient; the caller guarantees it is nonzero
    /// (see [`Poly::has_nonzero_leading`]).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn has_nonzero_leading(&self) -> bool {
        self.leading() != ZERO
    }

    /// True when every coefficient is zero (also for the empty sequence).
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// `p(w) - z` as a new polynomial in `w`.
    pub fn shifted(&self, z: C64) -> Poly {
        let mut c = self.coeffs.clone();
        c[0] -= z;
        Poly::new(c)
    }

    /// Only the constant and leading coefficients are nonzero.
    pub fn is_binomial(&self) -> bool {
        let d = self.degree();
        d >= 1 && self.coeffs[1..d].iter().all(|c| *c == ZERO)
    }

    /// `sum |a_i| r^i`, an upper bound for `|p|` on the closed disc of radius `r`.
    pub fn sup_bound_on_disc(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Radius outside which orbits escape monotonically:
    /// `max(1, (1 + sum_{i<d} |a_i|) / |a_d|)`. The filled Julia set lies inside.
    pub fn escape_radius(&self) -> f64 {
        let d = self.degree();
        let lower: f64 = self.coeffs[..d].iter().map(|c| c.norm()).sum();
        ((1.0 + lower) / self.leading().norm()).max(1.0)
    }
}
