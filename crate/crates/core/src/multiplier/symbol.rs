use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::expr::{eval, Domain, Expr, FloatDomain};
use crate::scalar::Rational;

/// Per-variable exponents `(α, β)` of `ξ^α log^β|ξ|`.
pub type AtomExponents = Vec<(u32, u32)>;

/// Linear combination of separable atoms `Π_k ξ_k^{α_k} log^{β_k}|ξ_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomPoly {
    nvars: usize,
    terms: BTreeMap<AtomExponents, f64>,
}

impl AtomPoly {
    fn constant(nvars: usize, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(vec![(0, 0); nvars], c);
        }
        AtomPoly { nvars, terms }
    }

    fn atom(nvars: usize, k: usize, alpha: u32, beta: u32) -> Self {
        let mut e = vec![(0, 0); nvars];
        e[k] = (alpha, beta);
        let mut terms = BTreeMap::new();
        terms.insert(e, 1.0);
        AtomPoly { nvars, terms }
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&vec![(0, 0); self.nvars]).copied(),
            _ => None,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += c;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = AtomPoly { nvars: self.nvars, terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: AtomExponents = e1.iter().zip(e2).map(|(a, b)| (a.0 + b.0, a.1 + b.1)).collect();
                *out.terms.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AtomExponents, &f64)> {
        self.terms.iter()
    }

    fn eval(&self, xi: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&(alpha, beta), &x) in e.iter().zip(xi) {
                t *= atom_value(alpha, beta, x)?;
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// `ξ^α log^β|ξ|`, extended by its limit 0 at `ξ = 0` when `α ≥ 1`.
pub fn atom_value(alpha: u32, beta: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        return match (alpha, beta) {
            (0, 0) => Ok(1.0),
            (0, _) => Err(Error::SingularSymbol("log|ξ| at ξ = 0".into())),
            _ => Ok(0.0),
        };
    }
    Ok(x.powi(alpha as i32) * x.abs().ln().powi(beta as i32))
}

struct AtomDomain<'a> {
    vars: &'a [String],
    params: &'a BTreeMap<String, f64>,
}

impl AtomDomain<'_> {
    fn var_index(&self, e: &Expr) -> Option<usize> {
        match e {
            Expr::Var(v) => self.vars.iter().position(|x| x == v),
            Expr::Abs(inner) => self.var_index(inner),
            _ => None,
        }
    }
}

impl Domain for AtomDomain<'_> {
    type Value = AtomPoly;

    fn constant(&self, q: &Rational) -> Result<AtomPoly> {
        Ok(AtomPoly::constant(self.vars.len(), q.to_f64().unwrap_or(f64::NAN)))
    }
    fn variable(&self, name: &str) -> Result<AtomPoly> {
        if let Some(k) = self.vars.iter().position(|v| v == name) {
            return Ok(AtomPoly::atom(self.vars.len(), k, 1, 0));
        }
        self.params
            .get(name)
            .map(|&c| AtomPoly::constant(self.vars.len(), c))
            .ok_or_else(|| Error::eval(format!("unbound variable `{name}`")))
    }
    fn add(&self, a: AtomPoly, b: AtomPoly) -> Result<AtomPoly> {
        Ok(a.add(&b))
    }
    fn mul(&self, a: AtomPoly, b: AtomPoly) -> Result<AtomPoly> {
        Ok(a.mul(&b))
    }
    fn neg(&self, a: AtomPoly) -> Result<AtomPoly> {
        Ok(a.scale(-1.0))
    }
    fn div(&self, a: AtomPoly, b: &Expr) -> Result<AtomPoly> {
        let d = eval(b, self)?.as_constant().ok_or_else(|| Error::eval("division by a non-constant"))?;
        Ok(a.scale(1.0 / d))
    }
    fn abs(&self, a: AtomPoly) -> Result<AtomPoly> {
        let c = a.as_constant().ok_or_else(|| Error::eval("|.| of a non-constant"))?;
        Ok(AtomPoly::constant(self.vars.len(), c.abs()))
    }
    fn call_unevaluated(&self, name: &str, raw: &[Expr]) -> Option<Result<AtomPoly>> {
        if name == "log" && raw.len() == 1 {
            if let Some(k) = self.var_index(&raw[0]) {
                return Some(Ok(AtomPoly::atom(self.vars.len(), k, 0, 1)));
            }
        }
        None
    }
    fn call(&self, name: &str, args: Vec<AtomPoly>, raw: &[Expr]) -> Result<AtomPoly> {
        let consts = args
            .iter()
            .map(|a| a.as_constant().ok_or_else(|| Error::eval(format!("`{name}` of a non-constant"))))
            .collect::<Result<Vec<_>>>()?;
        let v = FloatDomain { lookup: &|_| None }.call(name, consts, raw)?;
        Ok(AtomPoly::constant(self.vars.len(), v))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum SymbolKind {
    Atoms(AtomPoly),
    Expr {
        expr: Expr,
        params: BTreeMap<String, f64>,
    },
    /// `ξ^β (1+ξ²)^{-q} |ξ|^r log^s|ξ|` in one variable.
    LogClass {
        beta: u32,
        q: f64,
        r: f64,
        s: u32,
    },
    Product(Box<SymbolFunction>, Box<SymbolFunction>),
}

/// Decay metadata used by the bound scan and the order estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMeta {
    /// Exponent `r` in `|D^γψ| ≤ A_γ |ξ|^{r-|γ|}`.
    pub homogeneity: f64,
    pub log_power: u32,
    pub smooth: bool,
}

/// A function on the dual of the central subspace, away from 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolFunction {
    pub name: String,
    vars: Vec<String>,
    kind: SymbolKind,
    pub reflect: bool,
    pub meta: SymbolMeta,
}

impl fmt::Display for SymbolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl SymbolFunction {
    /// Parses a symbol in the given variables. Separable
    /// `ξ^α log^β|ξ|` combinations are stored exactly as atoms.
    pub fn parse(name: &str, text: &str, vars: &[&str], params: &BTreeMap<String, f64>) -> Result<Self> {
        let expr = Expr::parse(text)?;
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        for v in expr.variables() {
            if !vars.contains(&v) && !params.contains_key(&v) {
                return Err(Error::eval(format!("symbol `{name}`: unbound variable `{v}`")));
            }
        }
        let kind = match eval(&expr, &AtomDomain { vars: &vars, params }) {
            Ok(atoms) => SymbolKind::Atoms(atoms),
            Err(_) => SymbolKind::Expr { expr, params: params.clone() },
        };
        let meta = match &kind {
            SymbolKind::Atoms(a) => {
                let log_power = a.terms().flat_map(|(e, _)| e.iter().map(|x| x.1)).max().unwrap_or(0);
                let degree = a.terms().map(|(e, _)| e.iter().map(|x| x.0).sum::<u32>()).min().unwrap_or(0);
                SymbolMeta { homogeneity: degree as f64, log_power, smooth: log_power == 0 }
            }
            _ => SymbolMeta { homogeneity: 0.0, log_power: 0, smooth: false },
        };
        Ok(SymbolFunction { name: name.into(), vars, kind, reflect: false, meta })
    }

    pub fn log_class(name: &str, beta: u32, q: f64, r: f64, s: u32) -> Self {
        SymbolFunction {
            name: name.into(),
            vars: vec!["xi".into()],
            kind: SymbolKind::LogClass { beta, q, r, s },
            reflect: false,
            meta: SymbolMeta { homogeneity: beta as f64 + r, log_power: s, smooth: false },
        }
    }

    pub fn with_meta(mut self, meta: SymbolMeta) -> Self {
        self.meta = meta;
        self
    }

    /// `ξ ↦ ψ(-ξ)`.
    pub fn reflected(&self) -> Self {
        let mut s = self.clone();
        s.reflect = !s.reflect;
        s
    }

    pub fn product(a: &SymbolFunction, b: &SymbolFunction) -> Result<Self> {
        if a.vars != b.vars {
            return Err(Error::Model(format!("symbols `{a}` and `{b}` live on different variables")));
        }
        let kind = match (&a.kind, &b.kind, a.reflect == b.reflect) {
            (SymbolKind::Atoms(x), SymbolKind::Atoms(y), true) => SymbolKind::Atoms(x.mul(y)),
            _ => SymbolKind::Product(Box::new(a.clone()), Box::new(b.clone())),
        };
        let reflect = matches!(kind, SymbolKind::Atoms(_)) && a.reflect;
        Ok(SymbolFunction {
            name: format!("{}*{}", a.name, b.name),
            vars: a.vars.clone(),
            kind,
            reflect,
            meta: SymbolMeta {
                homogeneity: a.meta.homogeneity + b.meta.homogeneity,
                log_power: a.meta.log_power + b.meta.log_power,
                smooth: a.meta.smooth && b.meta.smooth,
            },
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn atoms(&self) -> Option<&AtomPoly> {
        match &self.kind {
            SymbolKind::Atoms(a) => Some(a),
            _ => None,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if self.reflect {
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            return self.eval_plain(&neg);
        }
        self.eval_plain(xi)
    }

    fn eval_plain(&self, xi: &[f64]) -> Result<f64> {
        match &self.kind {
            SymbolKind::Atoms(a) => a.eval(xi),
            SymbolKind::LogClass { beta, q, r, s } => {
                let x = xi[0];
                if x == 0.0 {
                    return if *beta as f64 + r > 0.0 {
                        Ok(0.0)
                    } else if *s == 0 && *beta == 0 && *r == 0.0 {
                        Ok(1.0)
                    } else {
                        Err(Error::SingularSymbol(format!("`{}` at 0", self.name)))
                    };
                }
                let a = x.abs();
                Ok(x.powi(*beta as i32) * (1.0 + x * x).powf(-q) * a.powf(*r) * a.ln().powi(*s as i32))
            }
            SymbolKind::Expr { expr, params } => {
                let v = self.eval_expr(expr, params, xi)?;
                if v.is_finite() {
                    return Ok(v);
                }
                // limit through both sides of each vanishing coordinate
                let zeros: Vec<usize> = (0..xi.len()).filter(|&k| xi[k] == 0.0).collect();
                if zeros.is_empty() {
                    return Err(Error::SingularSymbol(format!("`{}` is not finite at {xi:?}", self.name)));
                }
                let mut acc = 0.0;
                for sign in [1.0, -1.0] {
                    let mut p = xi.to_vec();
                    for &k in &zeros {
                        p[k] = sign * 1e-300;
                    }
                    acc += self.eval_expr(expr, params, &p)?;
                }
                let v = acc / 2.0;
                if v.is_finite() && v.abs() < 1e-200 {
                    Ok(0.0)
                } else {
                    Err(Error::SingularSymbol(format!("`{}` at {xi:?}", self.name)))
                }
            }
            SymbolKind::Product(a, b) => Ok(a.eval(xi)? * b.eval(xi)?),
        }
    }

    fn eval_expr(&self, expr: &Expr, params: &BTreeMap<String, f64>, xi: &[f64]) -> Result<f64> {
        let lookup = |n: &str| -> Option<f64> {
            self.vars.iter().position(|v| v == n).map(|k| xi[k]).or_else(|| params.get(n).copied())
        };
        eval(expr, &FloatDomain { lookup: &lookup })
    }

    /// Splits into `Σ c · Π_k g_k(ξ_k)` with one-variable factors.
    pub fn separable_terms(&self) -> Result<Vec<(f64, Vec<AxisSymbol>)>> {
        let sign_flip = |alpha: u32| if self.reflect && alpha % 2 == 1 { -1.0 } else { 1.0 };
        match &self.kind {
            SymbolKind::Atoms(a) => Ok(a
                .terms()
                .map(|(e, c)| {
                    let sign: f64 = e.iter().map(|&(al, _)| sign_flip(al)).product();
                    (c * sign, e.iter().map(|&(alpha, beta)| AxisSymbol::Power { alpha, beta }).collect())
                })
                .collect()),
            SymbolKind::Product(a, b) => {
                let (ta, tb) = (a.separable_terms()?, b.separable_terms()?);
                let mut out = Vec::new();
                for (ca, fa) in &ta {
                    for (cb, fb) in &tb {
                        let factors = fa.iter().zip(fb).map(|(x, y)| AxisSymbol::product(x, y)).collect();
                        out.push((ca * cb, factors));
                    }
                }
                Ok(out)
            }
            _ if self.vars.len() == 1 => Ok(vec![(1.0, vec![AxisSymbol::Full(Box::new(self.clone()))])]),
            _ => Err(Error::SingularSymbol(format!("`{}` is not separable", self.name))),
        }
    }
}

/// One-variable factor of a separable symbol.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisSymbol {
    Power { alpha: u32, beta: u32 },
    Full(Box<SymbolFunction>),
    Product(Vec<AxisSymbol>),
}

impl AxisSymbol {
    fn product(a: &AxisSymbol, b: &AxisSymbol) -> AxisSymbol {
        match (a, b) {
            (AxisSymbol::Power { alpha: a1, beta: b1 }, AxisSymbol::Power { alpha: a2, beta: b2 }) => {
                AxisSymbol::Power { alpha: a1 + a2, beta: b1 + b2 }
            }
            _ => AxisSymbol::Product(vec![a.clone(), b.clone()]),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            AxisSymbol::Power { alpha, beta } => atom_value(*alpha, *beta, x),
            AxisSymbol::Full(s) => s.eval(&[x]),
            AxisSymbol::Product(v) => v.iter().map(|f| f.eval(x)).product(),
        }
    }

    /// Polynomial factors and smooth symbols need no dyadic splitting.
    pub fn is_smooth(&self) -> bool {
        match self {
            AxisSymbol::Power { beta, .. } => *beta == 0,
            AxisSymbol::Full(s) => s.meta.smooth,
            AxisSymbol::Product(v) => v.iter().all(AxisSymbol::is_smooth),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, AxisSymbol::Power { alpha: 0, beta: 0 })
    }
}

/// Empirical `A_γ = sup |∂^γψ(ξ)| |ξ|^{γ-r}` over log-spaced samples of `lo ≤ |ξ| ≤ hi`.
pub fn symbol_bound_scan(
    psi: &SymbolFunction,
    r: f64,
    gamma_max: u32,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    if psi.nvars() != 1 {
        return Err(Error::Model("bound scan needs a one-variable symbol".into()));
    }
    let mut out = vec![0f64; gamma_max as usize + 1];
    for i in 0..samples {
        let t = i as f64 / (samples.max(2) - 1) as f64;
        let mag = lo * (hi / lo).powf(t);
        for x in [mag, -mag] {
            for (g, slot) in out.iter_mut().enumerate() {
                let d = finite_derivative(psi, x, g as u32)?;
                if !d.is_finite() {
                    return Err(Error::Overflow(d));
                }
                *slot = slot.max(d.abs() * mag.powf(g as f64 - r));
            }
        }
    }
    Ok(out)
}

fn finite_derivative(psi: &SymbolFunction, x: f64, order: u32) -> Result<f64> {
    if order == 0 {
        return psi.eval(&[x]);
    }
    let h = x.abs() * 2e-3;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=order {
        let offset = (order as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * psi.eval(&[x + offset])?;
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    Ok(acc / h.powi(order as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BTreeMap<String, f64> {
        [("f0".to_string(), 0.75), ("a".to_string(), 0.5)].into_iter().collect()
    }

    #[test]
    fn atom_expansion() {
        let s = SymbolFunction::parse("psi1", "xi1*(f0 - a*log|xi1|)", &["xi1", "xi2"], &params()).unwrap();
        let atoms = s.atoms().unwrap();
        assert_eq!(atoms.terms().count(), 2);
        let x = 3.0f64;
        assert!((s.eval(&[x, 1.0]).unwrap() - x * (0.75 - 0.5 * x.ln())).abs() < 1e-14);
        assert_eq!(s.eval(&[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(s.reflected().eval(&[x, 0.0]).unwrap(), s.eval(&[-x, 0.0]).unwrap());
    }

    #[test]
    fn singular_atom() {
        let s = SymbolFunction::parse("l", "log|xi2|*xi1", &["xi1", "xi2"], &params()).unwrap();
        assert!(matches!(s.eval(&[1.0, 0.0]), Err(Error::SingularSymbol(_))));
        assert_eq!(s.eval(&[0.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn expression_fallback() {
        let s = SymbolFunction::parse("g", "exp(-xi^2/2)", &["xi"], &params()).unwrap();
        assert!(s.atoms().is_none());
        assert!((s.eval(&[1.0]).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let p = SymbolFunction::parse("p0", "|xi|*log|xi|/(1+xi^2)", &["xi"], &params()).unwrap();
        assert_eq!(p.eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn log_class_matches_expression() {
        let lc = SymbolFunction::log_class("psi0", 0, 1.0, 1.0, 1);
        let ex = SymbolFunction::parse("psi0", "|xi|*log|xi|/(1+xi^2)", &["xi"], &params()).unwrap();
        for x in [-7.0, -0.3, 0.01, 2.5, 100.0] {
            assert!((lc.eval(&[x]).unwrap() - ex.eval(&[x]).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn bound_scan_on_homogeneous() {
        let s = SymbolFunction::parse("abs", "|xi|", &["xi"], &params()).unwrap();
        let a = symbol_bound_scan(&s, 1.0, 1, 1e-3, 1e3, 50).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!((a[1] - 1.0).abs() < 1e-6);
        let lc = SymbolFunction::log_class("psi0", 0, 1.0, 1.0, 1);
        let a = symbol_bound_scan(&lc, 0.9, 3, 2f64.powi(-10), 2f64.powi(10), 200).unwrap();
        assert!(a.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn separable_terms_of_product() {
        let p = params();
        let a = SymbolFunction::parse("a", "xi1*log|xi2|", &["xi1", "xi2"], &p).unwrap();
        let b = SymbolFunction::parse("b", "xi2", &["xi1", "xi2"], &p).unwrap();
        let ab = SymbolFunction::product(&a, &b).unwrap();
        let t = ab.separable_terms().unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].1[1], AxisSymbol::Power { alpha: 1, beta: 1 });
        assert_eq!(ab.eval(&[2.0, 0.0]).unwrap(), 0.0);
    }
}
