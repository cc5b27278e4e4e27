use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{fmt_gaussian, fmt_rational, gauss_real, gaussian_to_c64, imag_unit, GaussianRational, Rational};

/// `(a, k, m)` for the term `ξ^k e^{aξ} ∂^m`. The derived order is the canonical term order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpKey {
    pub rate: Rational,
    pub xi_power: u32,
    pub order: u32,
}

impl OpKey {
    pub fn identity() -> Self {
        OpKey { rate: Rational::zero(), xi_power: 0, order: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.rate.is_zero() && self.xi_power == 0 && self.order == 0
    }
}

/// Finite sum of `c·ξ^k·e^{aξ}·∂^m` with exact coefficients and rates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpPolyOperator {
    terms: BTreeMap<OpKey, GaussianRational>,
}

impl ExpPolyOperator {
    pub fn zero() -> Self {
        ExpPolyOperator { terms: BTreeMap::new() }
    }

    pub fn term(c: GaussianRational, xi_power: u32, rate: Rational, order: u32) -> Self {
        let mut op = Self::zero();
        op.add_term(OpKey { rate, xi_power, order }, c);
        op
    }

    pub fn scalar(c: GaussianRational) -> Self {
        Self::term(c, 0, Rational::zero(), 0)
    }

    pub fn identity() -> Self {
        Self::scalar(GaussianRational::one())
    }

    /// Multiplication by `ξ`.
    pub fn xi() -> Self {
        Self::term(GaussianRational::one(), 1, Rational::zero(), 0)
    }

    /// `∂_ξ`.
    pub fn partial() -> Self {
        Self::term(GaussianRational::one(), 0, Rational::zero(), 1)
    }

    /// `D_ξ = -i∂_ξ`.
    pub fn d_xi() -> Self {
        Self::term(-imag_unit(), 0, Rational::zero(), 1)
    }

    /// Multiplication by `e^{aξ}`.
    pub fn exp_rate(a: Rational) -> Self {
        Self::term(GaussianRational::one(), 0, a, 0)
    }

    pub fn add_term(&mut self, key: OpKey, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpKey, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// `Some(c)` when the operator is `c·Id`.
    pub fn as_scalar(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&OpKey::identity()).cloned(),
            _ => None,
        }
    }

    pub fn identity_coefficient(&self) -> GaussianRational {
        self.terms.get(&OpKey::identity()).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| gaussian_to_c64(c).norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    /// `self ∘ other` in normal order (functions left, derivatives right).
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let base = ca * cb;
                let m1 = ka.order;
                let k2 = kb.xi_power;
                let a2 = &kb.rate;
                for j in 0..=m1 {
                    let cj = binomial(m1, j);
                    for i in 0..=j.min(k2) {
                        if a2.is_zero() && j > i {
                            continue;
                        }
                        // ∂^j (ξ^{k2} e^{a2 ξ}) contributes C(j,i) k2!/(k2-i)! a2^{j-i} ξ^{k2-i} e^{a2 ξ}
                        let mut factor = &cj * binomial(j, i) * falling(k2, i);
                        for _ in 0..(j - i) {
                            factor *= a2;
                        }
                        let key =
                            OpKey { rate: &ka.rate + a2, xi_power: ka.xi_power + k2 - i, order: m1 - j + kb.order };
                        out.add_term(key, &base * gauss_real(factor));
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn power(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// Value of `(self u)(ξ)` for a test function given by its derivatives at `ξ`.
    pub fn apply_at(&self, xi: f64, derivatives: &[f64]) -> num_complex::Complex<f64> {
        let mut acc = num_complex::Complex::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let coeff =
                gaussian_to_c64(c) * xi.powi(k.xi_power as i32) * (k.rate.to_f64().unwrap_or(f64::NAN) * xi).exp();
            let d = derivatives.get(k.order as usize).copied().unwrap_or(f64::NAN);
            acc += coeff * d;
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

fn falling(n: u32, i: u32) -> Rational {
    (0..i).fold(Rational::one(), |acc, t| acc * Rational::from_integer(BigInt::from(n - t)))
}

impl fmt::Display for ExpPolyOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut factors = vec![fmt_gaussian(c)];
                match k.xi_power {
                    0 => {}
                    1 => factors.push("xi".into()),
                    p => factors.push(format!("xi^{p}")),
                }
                if !k.rate.is_zero() {
                    let r = if k.rate.is_negative() {
                        format!("({})", fmt_rational(&k.rate))
                    } else {
                        fmt_rational(&k.rate)
                    };
                    factors.push(format!("exp({r}*xi)"));
                }
                match k.order {
                    0 => {}
                    1 => factors.push("d".into()),
                    m => factors.push(format!("d^{m}")),
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
