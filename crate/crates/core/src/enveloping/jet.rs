use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lie_core::LieAlgebra;
use crate::scalar::Rational;

type Exponents = Vec<u32>;

/// Truncated Taylor polynomial at the origin of a function on the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetAtZero {
    dim: usize,
    order: usize,
    coeffs: BTreeMap<Exponents, Rational>,
}

impl JetAtZero {
    pub fn one(dim: usize, order: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0; dim], Rational::one());
        JetAtZero { dim, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Rational {
        self.coeffs.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coefficient(&vec![0; self.dim]).is_one()
    }

    /// Homogeneous part of degree `k` evaluated at `x`.
    pub fn homogeneous_at(&self, k: usize, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() as usize == k)
            .map(|(e, c)| monomial_value(e, c, x))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(e, c)| monomial_value(e, c, x)).fold(Rational::zero(), |a, b| a + b)
    }
}

fn monomial_value(e: &[u32], c: &Rational, x: &[Rational]) -> Rational {
    let mut t = c.clone();
    for (xi, &k) in x.iter().zip(e) {
        for _ in 0..k {
            t *= xi;
        }
    }
    t
}

#[derive(Clone, Debug, PartialEq)]
struct RatPoly {
    terms: BTreeMap<Exponents, Rational>,
}

impl RatPoly {
    fn zero() -> Self {
        RatPoly { terms: BTreeMap::new() }
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn add_scaled(&mut self, other: &RatPoly, s: &Rational) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    fn mul_truncated(&self, other: &RatPoly, max_degree: usize) -> RatPoly {
        let mut out = RatPoly::zero();
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &other.terms {
                if (d1 + e2.iter().sum::<u32>()) as usize > max_degree {
                    continue;
                }
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_integer((k as i64).into()))
}

/// Coefficients `l_1..l_order` of `log((1 - e^{-x})/x) = Σ l_m x^m`.
pub fn log_series_coefficients(order: usize) -> Vec<Rational> {
    // u = (1 - e^{-x})/x - 1 = Σ_{m≥1} (-1)^m x^m/(m+1)!
    let mut u = vec![Rational::zero(); order + 1];
    for (m, slot) in u.iter_mut().enumerate().skip(1) {
        let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
        *slot = sign / factorial(m + 1);
    }
    let mut out = vec![Rational::zero(); order + 1];
    let mut power = vec![Rational::zero(); order + 1];
    power[0] = Rational::one();
    for k in 1..=order {
        let mut next = vec![Rational::zero(); order + 1];
        for (i, pi) in power.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for j in 1..=order - i {
                next[i + j] += pi * &u[j];
            }
        }
        power = next;
        let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
        let w = sign / Rational::from_integer((k as i64).into());
        for (m, c) in power.iter().enumerate() {
            out[m] += c * &w;
        }
    }
    out
}

/// Taylor jet of `det((1 - e^{-ad X})/ad X)^{1/2}` up to total degree `order`.
pub fn duflo_j_jet(algebra: &LieAlgebra, order: usize) -> JetAtZero {
    let n = algebra.dim();
    // ad X as a matrix of linear forms: entry (k, j) = Σ_ν x_ν c_{νj}^k
    let mut ad: Vec<Vec<RatPoly>> = vec![vec![RatPoly::zero(); n]; n];
    for nu in 0..n {
        let mut e = vec![0u32; n];
        e[nu] = 1;
        for j in 0..n {
            for (k, c) in algebra.bracket_basis(nu, j).iter().enumerate() {
                ad[k][j].add_term(e.clone(), c.clone());
            }
        }
    }
    let l = log_series_coefficients(order);
    let mut log_j = RatPoly::zero();
    let mut power = ad.clone();
    let half = Rational::new(1.into(), 2.into());
    for (m, lm) in l.iter().enumerate().skip(1) {
        if m > 1 {
            power = mat_mul(&power, &ad, order);
        }
        let mut tr = RatPoly::zero();
        for (i, row) in power.iter().enumerate() {
            tr.add_scaled(&row[i], &Rational::one());
        }
        log_j.add_scaled(&tr, &(lm * &half));
    }
    let mut jet = RatPoly::zero();
    jet.add_term(vec![0; n], Rational::one());
    let mut term = jet.clone();
    for k in 1..=order {
        term = term.mul_truncated(&log_j, order);
        if term.terms.is_empty() {
            break;
        }
        jet.add_scaled(&term, &(Rational::one() / factorial(k)));
    }
    JetAtZero { dim: n, order, coeffs: jet.terms }
}

fn mat_mul(a: &[Vec<RatPoly>], b: &[Vec<RatPoly>], max_degree: usize) -> Vec<Vec<RatPoly>> {
    let n = a.len();
    let mut out = vec![vec![RatPoly::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].terms.is_empty() {
                continue;
            }
            for j in 0..n {
                if b[k][j].terms.is_empty() {
                    continue;
                }
                let prod = a[i][k].mul_truncated(&b[k][j], max_degree);
                out[i][j].add_scaled(&prod, &Rational::one());
            }
        }
    }
    out
}
