//! One-variable differential operators with exponential-polynomial
//! coefficients and infinitesimal representations built from them.

mod operator;

pub use operator::{ExpPolyOperator, OpKey};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::enveloping::{PbwElement, PolyOnDual};
use crate::error::{Error, Result};
use crate::expr::{eval, exact_call, Domain, ExactDomain, Expr};
use crate::lie_core::LieAlgebra;
use crate::linalg::Matrix;
use crate::scalar::{gauss_real, gaussian_to_c64, imag_unit, GaussianRational, Rational};

/// Expression domain whose values are operators. Besides the scalar lookup
/// it knows `xi`, `d` (for `∂_ξ`), `D` (for `-i∂_ξ`) and `i`; `exp(c*xi)`
/// with real rational `c` is a multiplication operator.
pub struct OperatorDomain<'a> {
    pub scalars: &'a dyn Fn(&str) -> Option<GaussianRational>,
}

impl OperatorDomain<'_> {
    fn exact(&self) -> ExactDomain<'_> {
        ExactDomain { lookup: self.scalars }
    }

    fn scalar_of(&self, v: &ExpPolyOperator, what: &str) -> Result<GaussianRational> {
        v.as_scalar().ok_or_else(|| Error::eval(format!("{what} needs a scalar, got `{v}`")))
    }
}

impl Domain for OperatorDomain<'_> {
    type Value = ExpPolyOperator;

    fn constant(&self, q: &Rational) -> Result<ExpPolyOperator> {
        Ok(ExpPolyOperator::scalar(gauss_real(q.clone())))
    }

    fn variable(&self, name: &str) -> Result<ExpPolyOperator> {
        if let Some(v) = (self.scalars)(name) {
            return Ok(ExpPolyOperator::scalar(v));
        }
        match name {
            "xi" => Ok(ExpPolyOperator::xi()),
            "d" => Ok(ExpPolyOperator::partial()),
            "D" => Ok(ExpPolyOperator::d_xi()),
            "i" => Ok(ExpPolyOperator::scalar(imag_unit())),
            _ => Err(Error::eval(format!("unbound variable `{name}`"))),
        }
    }

    fn add(&self, a: ExpPolyOperator, b: ExpPolyOperator) -> Result<ExpPolyOperator> {
        Ok(a.add(&b))
    }

    fn mul(&self, a: ExpPolyOperator, b: ExpPolyOperator) -> Result<ExpPolyOperator> {
        Ok(a.compose(&b))
    }

    fn neg(&self, a: ExpPolyOperator) -> Result<ExpPolyOperator> {
        Ok(a.neg())
    }

    fn div(&self, a: ExpPolyOperator, b: &Expr) -> Result<ExpPolyOperator> {
        let d = eval(b, &self.exact())?;
        if d.is_zero() {
            return Err(Error::eval("division by zero"));
        }
        Ok(a.scale(&(GaussianRational::one() / d)))
    }

    fn pow(&self, base: ExpPolyOperator, exponent: &Expr) -> Result<ExpPolyOperator> {
        if let Some(c) = base.as_scalar() {
            return Ok(ExpPolyOperator::scalar(self.exact().pow(c, exponent)?));
        }
        let e = eval(exponent, &self.exact())?;
        let n = (e.im.is_zero() && e.re.is_integer() && e.re >= Rational::zero())
            .then(|| num_traits::ToPrimitive::to_u32(&e.re.to_integer()))
            .flatten()
            .ok_or_else(|| Error::eval("operator powers must be non-negative integers"))?;
        Ok(base.power(n))
    }

    fn abs(&self, a: ExpPolyOperator) -> Result<ExpPolyOperator> {
        let c = self.scalar_of(&a, "absolute value")?;
        Ok(ExpPolyOperator::scalar(exact_call("abs", &[c])?))
    }

    fn call(&self, name: &str, args: Vec<ExpPolyOperator>, _raw: &[Expr]) -> Result<ExpPolyOperator> {
        if name == "exp" && args.len() == 1 && args[0].as_scalar().is_none() {
            // exp(s + c ξ) = e^s · e^{cξ}
            let mut rate = Rational::zero();
            let mut shift = GaussianRational::zero();
            for (k, c) in args[0].terms() {
                match (k.rate.is_zero(), k.xi_power, k.order) {
                    (true, 0, 0) => shift = c.clone(),
                    (true, 1, 0) if c.im.is_zero() => rate = c.re.clone(),
                    _ => return Err(Error::eval(format!("cannot exponentiate `{}`", args[0]))),
                }
            }
            let front = exact_call("exp", &[shift])?;
            return Ok(ExpPolyOperator::exp_rate(rate).scale(&front));
        }
        let scalars = args.iter().map(|a| self.scalar_of(a, name)).collect::<Result<Vec<_>>>()?;
        Ok(ExpPolyOperator::scalar(exact_call(name, &scalars)?))
    }
}

pub fn parse_operator(text: &str, scalars: &dyn Fn(&str) -> Option<GaussianRational>) -> Result<ExpPolyOperator> {
    eval(&Expr::parse(text)?, &OperatorDomain { scalars })
}

/// Infinitesimal representation by basis index; `None` outside its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct RepTable {
    pub name: String,
    entries: Vec<Option<ExpPolyOperator>>,
}

impl RepTable {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        RepTable { name: name.into(), entries: vec![None; dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, i: usize, op: ExpPolyOperator) {
        self.entries[i] = Some(op);
    }

    pub fn get(&self, i: usize) -> Option<&ExpPolyOperator> {
        self.entries[i].as_ref()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&i| self.entries[i].is_some()).collect()
    }

    /// Table from the images of arbitrary vectors. A basis vector receives an
    /// entry whenever it lies in the span of the given vectors.
    pub fn from_images(
        name: impl Into<String>,
        dim: usize,
        images: &[(Vec<GaussianRational>, ExpPolyOperator)],
    ) -> Result<Self> {
        let mut t = RepTable::new(name, dim);
        if images.is_empty() {
            return Ok(t);
        }
        let cols: Vec<Vec<GaussianRational>> = images.iter().map(|(v, _)| v.clone()).collect();
        let m = Matrix::from_columns(dim, &cols);
        if m.rank() != images.len() {
            return Err(Error::Model(format!("table `{}` is given on dependent vectors", t.name)));
        }
        for mu in 0..dim {
            let mut e = vec![GaussianRational::zero(); dim];
            e[mu] = GaussianRational::one();
            if let Some(c) = m.solve_any(&e) {
                let mut op = ExpPolyOperator::zero();
                for (cv, (_, img)) in c.iter().zip(images) {
                    op = op.add(&img.scale(cv));
                }
                t.set(mu, op);
            }
        }
        Ok(t)
    }

    /// Image of an algebra vector, if every component is in the domain.
    pub fn image_of(&self, v: &[GaussianRational]) -> Result<ExpPolyOperator> {
        let mut op = ExpPolyOperator::zero();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = self.entries[i]
                .as_ref()
                .ok_or_else(|| Error::MissingRepEntry(format!("`{}` has no entry for basis index {i}", self.name)))?;
            op = op.add(&t.scale(c));
        }
        Ok(op)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismViolation {
    pub pair: (String, String),
    /// `T([X,Y]) - [T(X), T(Y)]`, or `None` when `[X,Y]` leaves the table's domain.
    pub defect: Option<ExpPolyOperator>,
}

/// Pairs of basis elements in the table's domain where the bracket is not respected.
pub fn verify_homomorphism(algebra: &LieAlgebra, table: &RepTable) -> Vec<HomomorphismViolation> {
    let names = algebra.basis_names();
    let dom = table.domain();
    let mut out = Vec::new();
    for (a, &i) in dom.iter().enumerate() {
        for &j in &dom[a + 1..] {
            let br: Vec<GaussianRational> = algebra.bracket_basis(i, j).iter().map(|c| gauss_real(c.clone())).collect();
            let pair = (names[i].clone(), names[j].clone());
            let lhs = match table.image_of(&br) {
                Ok(op) => op,
                Err(_) => {
                    out.push(HomomorphismViolation { pair, defect: None });
                    continue;
                }
            };
            let (x, y) = (table.get(i).unwrap(), table.get(j).unwrap());
            let defect = lhs.sub(&x.commutator(y));
            if !defect.is_zero() {
                out.push(HomomorphismViolation { pair, defect: Some(defect) });
            }
        }
    }
    out
}

/// Multiplicative extension of the table to the enveloping algebra.
pub fn apply_rep(table: &RepTable, w: &PbwElement) -> Result<ExpPolyOperator> {
    let mut out = ExpPolyOperator::zero();
    for (e, c) in w.terms() {
        let mut op = ExpPolyOperator::scalar(c.clone());
        for (k, &mult) in e.iter().enumerate() {
            if mult == 0 {
                continue;
            }
            let t = table
                .get(k)
                .ok_or_else(|| Error::MissingRepEntry(format!("`{}` has no entry for basis index {k}", table.name)))?;
            for _ in 0..mult {
                op = op.compose(t);
            }
        }
        out = out.add(&op);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DufloResidual {
    pub residual: ExpPolyOperator,
    pub residual_norm: f64,
    pub is_scalar: bool,
    pub scalar: Complex<f64>,
    pub exact_scalar: Option<GaussianRational>,
    pub expected: GaussianRational,
}

/// `dπ(W) - p(h)·Id` in normal form.
pub fn duflo_pair_residual(
    table: &RepTable,
    w: &PbwElement,
    p: &PolyOnDual,
    h: &[GaussianRational],
) -> Result<DufloResidual> {
    let image = apply_rep(table, w)?;
    let expected = p.eval_exact(h);
    let residual = image.sub(&ExpPolyOperator::scalar(expected.clone()));
    let exact_scalar = image.as_scalar();
    Ok(DufloResidual {
        residual_norm: residual.max_abs_coefficient(),
        is_scalar: exact_scalar.is_some(),
        scalar: gaussian_to_c64(&image.identity_coefficient()),
        exact_scalar,
        expected,
        residual,
    })
}
