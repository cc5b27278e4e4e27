use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::lie_core::LieAlgebra;
use crate::scalar::{fmt_gaussian, gauss_real, GaussianRational};

/// Element of the enveloping algebra as a combination of ordered monomials
/// `b_0^{k_0} ... b_{n-1}^{k_{n-1}}` in the declared basis order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PbwElement {
    dim: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl PbwElement {
    pub fn zero(dim: usize) -> Self {
        PbwElement { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, GaussianRational::one())
    }

    pub fn generator(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, GaussianRational::one());
        p
    }

    /// Image of an algebra element given in coordinates.
    pub fn from_vector(v: &[GaussianRational]) -> Self {
        let dim = v.len();
        let mut p = Self::zero(dim);
        for (i, c) in v.iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
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
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponents) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &GaussianRational::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-GaussianRational::one());
        out
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: &GaussianRational) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut out = Self::zero(self.dim);
        out.add_assign_scaled(self, s);
        out
    }

    /// Canonical text form, e.g. `1*e1e2 + -1*e3`.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let word: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
                    .collect::<Vec<_>>()
                    .join(" ");
                if word.is_empty() {
                    fmt_gaussian(c)
                } else {
                    format!("{}*{}", fmt_gaussian(c), word)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for PbwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("b{i}")).collect();
        write!(f, "{}", self.to_string_with(&names))
    }
}

/// Rewriting engine for one algebra; caches `monomial * generator` products.
pub struct PbwRewriter<'a> {
    algebra: &'a LieAlgebra,
    brackets: Vec<Vec<Vec<(usize, GaussianRational)>>>,
    cache: HashMap<(Vec<u32>, usize), PbwElement>,
}

impl<'a> PbwRewriter<'a> {
    pub fn new(algebra: &'a LieAlgebra) -> Self {
        let n = algebra.dim();
        let brackets = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        algebra
                            .bracket_basis(i, j)
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(k, c)| (k, gauss_real(c.clone())))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PbwRewriter { algebra, brackets, cache: HashMap::new() }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.algebra
    }

    /// Normal form of `coeff * b_{w_1} ... b_{w_k}`.
    pub fn normalize_word(&mut self, word: &[usize], coeff: GaussianRational) -> PbwElement {
        let mut acc = PbwElement::scalar(self.algebra.dim(), coeff);
        for &k in word {
            acc = self.times_generator(&acc, k);
        }
        acc
    }

    pub fn multiply(&mut self, u: &PbwElement, v: &PbwElement) -> PbwElement {
        let mut out = PbwElement::zero(self.algebra.dim());
        for (e, c) in &v.terms {
            let mut partial = u.scale(c);
            for (k, &mult) in e.iter().enumerate() {
                for _ in 0..mult {
                    partial = self.times_generator(&partial, k);
                }
            }
            out.add_assign_scaled(&partial, &GaussianRational::one());
        }
        out
    }

    pub fn times_generator(&mut self, u: &PbwElement, k: usize) -> PbwElement {
        let mut out = PbwElement::zero(self.algebra.dim());
        for (e, c) in &u.terms {
            let prod = self.monomial_times_generator(e, k);
            out.add_assign_scaled(&prod, c);
        }
        out
    }

    fn monomial_times_generator(&mut self, e: &[u32], k: usize) -> PbwElement {
        let dim = self.algebra.dim();
        let last = e.iter().rposition(|&x| x > 0);
        match last {
            Some(l) if l > k => {}
            _ => {
                let mut f = e.to_vec();
                f[k] += 1;
                let mut p = PbwElement::zero(dim);
                p.add_term(f, GaussianRational::one());
                return p;
            }
        }
        let key = (e.to_vec(), k);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let l = last.unwrap();
        // M b_l b_k = (M b_k) b_l + M [b_l, b_k]
        let mut prefix = e.to_vec();
        prefix[l] -= 1;
        let mk = self.monomial_times_generator(&prefix, k);
        let mut result = self.times_generator(&mk, l);
        let bracket = self.brackets[l][k].clone();
        for (m, c) in bracket {
            let term = self.monomial_times_generator(&prefix, m);
            result.add_assign_scaled(&term, &c);
        }
        self.cache.insert(key, result.clone());
        result
    }
}

/// Normal form of `coeff * b_{w_1} ... b_{w_k}`.
pub fn pbw_normalize(algebra: &LieAlgebra, word: &[usize], coeff: GaussianRational) -> PbwElement {
    PbwRewriter::new(algebra).normalize_word(word, coeff)
}

pub fn uea_multiply(algebra: &LieAlgebra, u: &PbwElement, v: &PbwElement) -> PbwElement {
    PbwRewriter::new(algebra).multiply(u, v)
}
