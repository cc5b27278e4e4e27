use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{fmt_gaussian, gauss_real, GaussianRational, Rational};

/// Polynomial function on the dual space. Variable `ν` is `h ↦ h(b_ν)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyOnDual {
    dim: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl PolyOnDual {
    pub fn zero(dim: usize) -> Self {
        PolyOnDual { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    pub fn variable(dim: usize, nu: usize) -> Self {
        Self::monomial(dim, unit(dim, nu), GaussianRational::one())
    }

    pub fn monomial(dim: usize, exponents: Vec<u32>, c: GaussianRational) -> Self {
        assert_eq!(exponents.len(), dim);
        let mut p = Self::zero(dim);
        p.add_term(exponents, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert_with(GaussianRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `∂^β p` with respect to the dual variables.
    pub fn derivative(&self, beta: &[u32]) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e.iter().zip(beta).any(|(a, b)| a < b) {
                continue;
            }
            let mut factor = Rational::one();
            for (&a, &b) in e.iter().zip(beta) {
                for k in 0..b {
                    factor *= Rational::from_integer((a - k).into());
                }
            }
            let reduced: Vec<u32> = e.iter().zip(beta).map(|(a, b)| a - b).collect();
            out.add_term(reduced, c * gauss_real(factor));
        }
        out
    }

    /// Exact value at a functional with Gaussian-rational coordinates.
    pub fn eval_exact(&self, h: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in h.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Real part of the value at a real functional.
    pub fn eval_f64(&self, h: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let re = num_traits::ToPrimitive::to_f64(&c.re).unwrap_or(f64::NAN);
                e.iter().zip(h).fold(re, |acc, (&k, x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
                    .collect();
                if mono.is_empty() {
                    fmt_gaussian(c)
                } else {
                    format!("{}*{}", fmt_gaussian(c), mono.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for PolyOnDual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("y{i}")).collect();
        write!(f, "{}", self.to_string_with(&names))
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[i] = 1;
    e
}
