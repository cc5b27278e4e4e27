//! Structure-constant Lie algebras over the rationals.
//!
//! Bracket tables, subspace computations and the Jacobi check are exact.
//! Group actions ([`ad_exp`], [`coadjoint`]) run over floats.

mod parse;

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{in_span, span_basis, span_rank, Matrix};
use crate::scalar::{fmt_rational, Field, Rational};

pub use parse::{parse_algebra, parse_algebra_lines, LinearDomain, LinearValue};

/// Finite-dimensional Lie algebra given by rational structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    names: Vec<String>,
    params: Vec<(String, Rational)>,
    // structure[i][j] = coordinates of [b_i, b_j]
    structure: Vec<Vec<Vec<Rational>>>,
    subspaces: Vec<SubspaceBasis>,
}

/// Element of the algebra in basis coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<F> {
    pub coeffs: Vec<F>,
}

/// Element of the dual space in dual-basis coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Functional<F> {
    pub coeffs: Vec<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubspaceKind {
    Ideal,
    Subalgebra,
    Plain,
}

/// Linearly independent spanning set of a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub name: String,
    pub vectors: Vec<Vec<Rational>>,
    pub kind: SubspaceKind,
}

/// `exp(t_1 b_{i_1}) ... exp(t_k b_{i_k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupWord<T> {
    pub factors: Vec<(usize, T)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub defect: Vec<Rational>,
}

impl<F: Field> AlgebraElement<F> {
    pub fn zero(dim: usize) -> Self {
        AlgebraElement { coeffs: vec![F::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[i] = F::one();
        e
    }

    pub fn scaled(&self, t: F) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|c| c.clone() * t.clone()).collect() }
    }
}

impl<F: Field> Functional<F> {
    pub fn zero(dim: usize) -> Self {
        Functional { coeffs: vec![F::zero(); dim] }
    }

    pub fn new(coeffs: Vec<F>) -> Self {
        Functional { coeffs }
    }

    pub fn apply(&self, x: &[F]) -> F {
        self.coeffs.iter().zip(x).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

impl<T> GroupWord<T> {
    pub fn new(factors: Vec<(usize, T)>) -> Self {
        GroupWord { factors }
    }

    pub fn empty() -> Self {
        GroupWord { factors: Vec::new() }
    }

    pub fn concat(mut self, other: GroupWord<T>) -> Self {
        self.factors.extend(other.factors);
        self
    }
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        let names = (1..=dim).map(|i| format!("e{i}")).collect();
        Self::with_names(names, Vec::new())
    }

    pub fn with_names(names: Vec<String>, params: Vec<(String, Rational)>) -> Self {
        let n = names.len();
        let zero = vec![Rational::from_integer(0.into()); n];
        LieAlgebra { names, params, structure: vec![vec![zero; n]; n], subspaces: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn params(&self) -> &[(String, Rational)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&Rational> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, q)| q)
    }

    pub fn subspaces(&self) -> &[SubspaceBasis] {
        &self.subspaces
    }

    pub fn subspace(&self, name: &str) -> Option<&SubspaceBasis> {
        self.subspaces.iter().find(|s| s.name == name)
    }

    pub(crate) fn push_subspace(&mut self, s: SubspaceBasis) {
        self.subspaces.push(s);
    }

    /// Coordinates of `[b_i, b_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        &self.structure[i][j]
    }

    /// Sets `[b_i, b_j] = v` and `[b_j, b_i] = -v`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vec<Rational>) {
        assert_eq!(v.len(), self.dim());
        self.structure[j][i] = v.iter().map(|c| -c.clone()).collect();
        self.structure[i][j] = v;
    }

    pub fn bracket<F: Field>(&self, x: &[F], y: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let w = xi.clone() * yj.clone();
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !num_traits::Zero::is_zero(c) {
                        out[k] = out[k].clone() + w.clone() * F::from_rational(c);
                    }
                }
            }
        }
        out
    }

    pub fn describe_vector(&self, v: &[Rational]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(i, c)| format!("{}*{}", fmt_rational(c), self.names[i]))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Structure constants of a subalgebra in the basis `s.vectors`.
    pub fn restrict(&self, s: &SubspaceBasis) -> Result<LieAlgebra> {
        let k = s.vectors.len();
        let coords = Matrix::from_columns(self.dim(), &s.vectors);
        let names = s
            .vectors
            .iter()
            .enumerate()
            .map(|(idx, v)| unit_index(v).map_or_else(|| format!("v{idx}"), |i| self.names[i].clone()))
            .collect();
        let mut sub = LieAlgebra::with_names(names, self.params.clone());
        for i in 0..k {
            for j in (i + 1)..k {
                let b = self.bracket(&s.vectors[i], &s.vectors[j]);
                let c = solve_in_span(&coords, &b)
                    .ok_or_else(|| Error::Model(format!("subspace `{}` is not closed under the bracket", s.name)))?;
                sub.set_bracket(i, j, c);
            }
        }
        Ok(sub)
    }
}

fn unit_index(v: &[Rational]) -> Option<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !num_traits::Zero::is_zero(&v[i])).collect();
    match nz.as_slice() {
        [i] if num_traits::One::is_one(&v[*i]) => Some(*i),
        _ => None,
    }
}

fn solve_in_span(coords: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    let k = coords.cols();
    let n = coords.rows();
    let mut aug = Matrix::zeros(n, k + 1);
    for i in 0..n {
        for j in 0..k {
            aug[(i, j)] = coords[(i, j)].clone();
        }
        aug[(i, k)] = b[i].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rational::from_integer(0.into()); k];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[(row, k)].clone();
    }
    Some(x)
}

impl SubspaceBasis {
    pub fn new(name: impl Into<String>, vectors: Vec<Vec<Rational>>, kind: SubspaceKind) -> Result<Self> {
        let name = name.into();
        if span_rank(&vectors) != vectors.len() {
            return Err(Error::Model(format!("subspace `{name}` has linearly dependent vectors")));
        }
        Ok(SubspaceBasis { name, vectors, kind })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        in_span(&self.vectors, v)
    }

    /// Closed under bracketing with every element of `l`.
    pub fn is_ideal_in(&self, l: &LieAlgebra) -> bool {
        (0..l.dim()).all(|i| {
            let bi = AlgebraElement::<Rational>::basis(l.dim(), i);
            self.vectors.iter().all(|s| self.contains(&l.bracket(&bi.coeffs, s)))
        })
    }

    pub fn is_subalgebra_in(&self, l: &LieAlgebra) -> bool {
        self.vectors.iter().all(|x| self.vectors.iter().all(|y| self.contains(&l.bracket(x, y))))
    }
}

/// All triples `i < j < k` whose Jacobi sum is non-zero.
pub fn check_jacobi(l: &LieAlgebra) -> Vec<JacobiViolation> {
    let n = l.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let e = |a: usize| AlgebraElement::<Rational>::basis(n, a).coeffs;
                let t1 = l.bracket(&e(i), l.bracket_basis(j, k));
                let t2 = l.bracket(&e(j), l.bracket_basis(k, i));
                let t3 = l.bracket(&e(k), l.bracket_basis(i, j));
                let defect: Vec<Rational> = (0..n).map(|m| &t1[m] + &t2[m] + &t3[m]).collect();
                if defect.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                    out.push(JacobiViolation { triple: (i, j, k), defect });
                }
            }
        }
    }
    out
}

/// Matrix of `ad X`; column `j` holds `[X, b_j]`.
pub fn ad_matrix<F: Field>(l: &LieAlgebra, x: &AlgebraElement<F>) -> Matrix<F> {
    let n = l.dim();
    let cols: Vec<Vec<F>> = (0..n).map(|j| l.bracket(&x.coeffs, &AlgebraElement::<F>::basis(n, j).coeffs)).collect();
    Matrix::from_columns(n, &cols)
}

fn one_norm<T: Float + Field>(m: &Matrix<T>) -> T {
    (0..m.cols()).map(|j| (0..m.rows()).fold(T::zero(), |acc, i| acc + m[(i, j)].abs())).fold(T::zero(), T::max)
}

/// `Ad(exp X) = exp(ad X)` by scaling and squaring with a truncated Taylor series.
pub fn ad_exp<T: Float + Field>(l: &LieAlgebra, x: &AlgebraElement<T>) -> Result<Matrix<T>> {
    matrix_exp(&ad_matrix(l, x))
}

pub fn matrix_exp<T: Float + Field>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let norm = one_norm(a);
    let norm_f = norm.to_f64().unwrap_or(f64::INFINITY);
    if !norm_f.is_finite() || norm_f > 700.0 {
        return Err(Error::Overflow(norm_f));
    }
    let mut squarings = 0u32;
    if norm_f > 0.5 {
        squarings = (norm_f / 0.5).log2().ceil() as u32;
    }
    let scale = T::from(2f64.powi(-(squarings as i32))).unwrap();
    let a_s = a.scale(&scale);
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    let tiny = T::from(1e-18).unwrap();
    for k in 1..64 {
        term = term.mul(&a_s).scale(&(T::one() / T::from(k).unwrap()));
        sum = sum.add(&term);
        if one_norm(&term) <= tiny * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    let out_norm = one_norm(&sum).to_f64().unwrap_or(f64::INFINITY);
    if !out_norm.is_finite() {
        return Err(Error::Overflow(norm_f));
    }
    Ok(sum)
}

/// `f ∘ Ad(w)^{-1}`, i.e. the coadjoint action of the group word on `f`.
pub fn coadjoint<T: Float + Field>(l: &LieAlgebra, w: &GroupWord<T>, f: &Functional<T>) -> Result<Functional<T>> {
    let n = l.dim();
    let mut m = Matrix::<T>::identity(n);
    for &(idx, t) in &w.factors {
        let x = AlgebraElement::<T>::basis(n, idx).scaled(-t);
        m = ad_exp(l, &x)?.mul(&m);
    }
    // new_f_j = sum_i f_i M_ij
    Ok(Functional { coeffs: m.transpose().mul_vec(&f.coeffs) })
}

/// Kernel of the form `B_f(X, Y) = f([X, Y])`.
pub fn stabilizer(l: &LieAlgebra, f: &Functional<Rational>) -> SubspaceBasis {
    let n = l.dim();
    let mut b = Matrix::<Rational>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = f.apply(l.bracket_basis(i, j));
        }
    }
    SubspaceBasis { name: "stabilizer".into(), vectors: b.kernel(), kind: SubspaceKind::Subalgebra }
}

pub fn center(l: &LieAlgebra) -> SubspaceBasis {
    let n = l.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        let ad = ad_matrix(l, &AlgebraElement::<Rational>::basis(n, i));
        for r in 0..n {
            rows.push(ad.row(r).to_vec());
        }
    }
    let vectors = if n == 0 { Vec::new() } else { Matrix::from_rows(rows).kernel() };
    SubspaceBasis { name: "center".into(), vectors, kind: SubspaceKind::Ideal }
}

pub fn derived_subalgebra(l: &LieAlgebra) -> SubspaceBasis {
    let n = l.dim();
    let all: Vec<Vec<Rational>> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| l.bracket_basis(i, j).to_vec()).collect();
    SubspaceBasis { name: "derived".into(), vectors: span_basis(&all, n), kind: SubspaceKind::Ideal }
}

/// Ideal whose lower central series reaches zero.
pub fn is_nilpotent_ideal(l: &LieAlgebra, s: &SubspaceBasis) -> bool {
    if !s.is_ideal_in(l) {
        return false;
    }
    let n = l.dim();
    let mut current = s.vectors.clone();
    for _ in 0..=s.dim() {
        if current.is_empty() {
            return true;
        }
        let next: Vec<Vec<Rational>> =
            s.vectors.iter().flat_map(|x| current.iter().map(move |c| l.bracket(x, c))).collect();
        current = span_basis(&next, n);
    }
    current.is_empty()
}

/// `dim(a + b)` for two subspaces.
pub fn sum_dim(a: &SubspaceBasis, b: &SubspaceBasis) -> usize {
    let mut all = a.vectors.clone();
    all.extend(b.vectors.iter().cloned());
    span_rank(&all)
}
