//! Small arithmetic expression language shared by the algebra and model files.
//!
//! Grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')' | '|' expr '|'
//! ```
//!
//! Numbers are integers or decimals and parse to exact rationals, so `1/2`
//! is the rational one half in every exact domain. One AST is evaluated in
//! several [`Domain`]s: floats, exact Gaussian rationals, differential
//! operators, enveloping-algebra elements and polynomials.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{
    fmt_rational, gauss_real, gaussian_to_c64, imag_unit, parse_rational, rational_from_f64, GaussianRational, Rational,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::eval(format!("unexpected `{}` in `{text}`", p.tokens[p.pos])));
        }
        Ok(e)
    }

    /// Every identifier used as a variable.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Abs(a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Folds a variable-free subexpression to a rational, if possible.
    pub fn constant_value(&self) -> Option<Rational> {
        match self {
            Expr::Num(q) => Some(q.clone()),
            Expr::Neg(a) => a.constant_value().map(|q| -q),
            Expr::Add(a, b) => Some(a.constant_value()? + b.constant_value()?),
            Expr::Sub(a, b) => Some(a.constant_value()? - b.constant_value()?),
            Expr::Mul(a, b) => Some(a.constant_value()? * b.constant_value()?),
            Expr::Div(a, b) => {
                let d = b.constant_value()?;
                if d.is_zero() {
                    None
                } else {
                    Some(a.constant_value()? / d)
                }
            }
            Expr::Abs(a) => a.constant_value().map(|q| q.abs()),
            Expr::Pow(a, b) => {
                let base = a.constant_value()?;
                let e = b.constant_value()?;
                if !e.is_integer() {
                    return None;
                }
                let e = e.to_integer().to_i32()?;
                if e < 0 && base.is_zero() {
                    return None;
                }
                Some(num_traits::pow::Pow::pow(base, e))
            }
            _ => None,
        }
    }

    /// Substitutes variables by other expressions.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Expr>) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(f));
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Abs(a) => Expr::Abs(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, b) => Expr::Pow(sub(a), sub(b)),
            Expr::Call(n, args) => Expr::Call(n.clone(), args.iter().map(|a| a.substitute(f)).collect()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write!(f, "{}", fmt_rational(q)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Pow(a, b) => write!(f, "{a}^{b}"),
            Expr::Abs(a) => write!(f, "|{a}|"),
            Expr::Call(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(q) => write!(f, "{}", fmt_rational(q)),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            // decimals only, so `2e3` never reads as a float literal
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let q = parse_rational(&lit).ok_or_else(|| Error::eval(format!("bad number `{lit}`")))?;
            out.push(Token::Num(q));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()|,".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(Error::eval(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

const FUNCTIONS: [&str; 4] = ["log", "exp", "sqrt", "sgn"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::eval(format!(
                "expected `{c}`, found {}",
                self.peek().map_or("end of input".to_string(), |t| format!("`{t}`"))
            )))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Token::Num(q)) => {
                self.pos += 1;
                Ok(Expr::Num(q))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Expr::Call(name, args))
                } else if FUNCTIONS.contains(&name.as_str()) && self.eat('|') {
                    // log|x| shorthand
                    let e = self.expr()?;
                    self.expect('|')?;
                    Ok(Expr::Call(name, vec![Expr::Abs(Box::new(e))]))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Token::Sym('|')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect('|')?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some(t) => Err(Error::eval(format!("unexpected `{t}`"))),
            None => Err(Error::eval("unexpected end of expression")),
        }
    }
}

/// An evaluation target for [`Expr`].
pub trait Domain {
    type Value: Clone;

    fn constant(&self, q: &Rational) -> Result<Self::Value>;
    fn variable(&self, name: &str) -> Result<Self::Value>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: Self::Value) -> Result<Self::Value>;

    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    fn div(&self, a: Self::Value, b: &Expr) -> Result<Self::Value> {
        // default: only division by constants
        let d = b.constant_value().ok_or_else(|| Error::eval(format!("division by non-constant `{b}`")))?;
        if d.is_zero() {
            return Err(Error::eval("division by zero"));
        }
        let inv = self.constant(&(Rational::from_integer(1.into()) / d))?;
        self.mul(a, inv)
    }

    fn pow(&self, base: Self::Value, exponent: &Expr) -> Result<Self::Value> {
        let e = exponent
            .constant_value()
            .filter(|q| q.is_integer() && !q.is_negative())
            .and_then(|q| q.to_integer().to_u32())
            .ok_or_else(|| Error::eval(format!("exponent `{exponent}` must be a non-negative integer")))?;
        let mut acc = self.constant(&Rational::from_integer(1.into()))?;
        for _ in 0..e {
            acc = self.mul(acc, base.clone())?;
        }
        Ok(acc)
    }

    fn abs(&self, _a: Self::Value) -> Result<Self::Value> {
        Err(Error::eval("absolute value is not available here"))
    }

    fn call(&self, name: &str, _args: Vec<Self::Value>, _raw: &[Expr]) -> Result<Self::Value> {
        Err(Error::eval(format!("function `{name}` is not available here")))
    }

    /// Hook for calls that must see their unevaluated arguments.
    fn call_unevaluated(&self, _name: &str, _raw: &[Expr]) -> Option<Result<Self::Value>> {
        None
    }
}

pub fn eval<D: Domain>(e: &Expr, d: &D) -> Result<D::Value> {
    match e {
        Expr::Num(q) => d.constant(q),
        Expr::Var(v) => d.variable(v),
        Expr::Neg(a) => d.neg(eval(a, d)?),
        Expr::Add(a, b) => d.add(eval(a, d)?, eval(b, d)?),
        Expr::Sub(a, b) => d.sub(eval(a, d)?, eval(b, d)?),
        Expr::Mul(a, b) => d.mul(eval(a, d)?, eval(b, d)?),
        Expr::Div(a, b) => d.div(eval(a, d)?, b),
        Expr::Pow(a, b) => d.pow(eval(a, d)?, b),
        Expr::Abs(a) => d.abs(eval(a, d)?),
        Expr::Call(name, args) => {
            if let Some(v) = d.call_unevaluated(name, args) {
                return v;
            }
            let vals = args.iter().map(|a| eval(a, d)).collect::<Result<Vec<_>>>()?;
            d.call(name, vals, args)
        }
    }
}

/// Real evaluation with named variables.
pub struct FloatDomain<'a> {
    pub lookup: &'a dyn Fn(&str) -> Option<f64>,
}

impl Domain for FloatDomain<'_> {
    type Value = f64;

    fn constant(&self, q: &Rational) -> Result<f64> {
        Ok(q.to_f64().unwrap_or(f64::NAN))
    }
    fn variable(&self, name: &str) -> Result<f64> {
        (self.lookup)(name).ok_or_else(|| Error::eval(format!("unbound variable `{name}`")))
    }
    fn add(&self, a: f64, b: f64) -> Result<f64> {
        Ok(a + b)
    }
    fn sub(&self, a: f64, b: f64) -> Result<f64> {
        Ok(a - b)
    }
    fn mul(&self, a: f64, b: f64) -> Result<f64> {
        Ok(a * b)
    }
    fn neg(&self, a: f64) -> Result<f64> {
        Ok(-a)
    }
    fn div(&self, a: f64, b: &Expr) -> Result<f64> {
        Ok(a / eval(b, self)?)
    }
    fn pow(&self, base: f64, exponent: &Expr) -> Result<f64> {
        let e = eval(exponent, self)?;
        if e.fract() == 0.0 && e.abs() < 64.0 {
            Ok(base.powi(e as i32))
        } else {
            Ok(base.powf(e))
        }
    }
    fn abs(&self, a: f64) -> Result<f64> {
        Ok(a.abs())
    }
    fn call(&self, name: &str, args: Vec<f64>, _raw: &[Expr]) -> Result<f64> {
        let one = |f: fn(f64) -> f64| -> Result<f64> {
            match args.as_slice() {
                [x] => Ok(f(*x)),
                _ => Err(Error::eval(format!("`{name}` takes one argument"))),
            }
        };
        match name {
            "exp" => one(f64::exp),
            "log" => one(f64::ln),
            "sqrt" => one(f64::sqrt),
            "abs" => one(f64::abs),
            "sgn" => one(|x| {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }),
            "min" | "max" => match args.as_slice() {
                [x, y] => Ok(if name == "min" { x.min(*y) } else { x.max(*y) }),
                _ => Err(Error::eval(format!("`{name}` takes two arguments"))),
            },
            _ => Err(Error::eval(format!("unknown function `{name}`"))),
        }
    }
}

/// Evaluates with a variable map given as a closure.
pub fn eval_f64(e: &Expr, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
    eval(e, &FloatDomain { lookup })
}

/// Exact evaluation over Gaussian rationals. Transcendental functions of
/// real arguments return the exact dyadic value of the `f64` result, so
/// repeated evaluation is deterministic. The name `i` is the imaginary unit
/// unless the lookup binds it.
pub struct ExactDomain<'a> {
    pub lookup: &'a dyn Fn(&str) -> Option<GaussianRational>,
}

impl Domain for ExactDomain<'_> {
    type Value = GaussianRational;

    fn constant(&self, q: &Rational) -> Result<GaussianRational> {
        Ok(gauss_real(q.clone()))
    }
    fn variable(&self, name: &str) -> Result<GaussianRational> {
        match (self.lookup)(name) {
            Some(v) => Ok(v),
            None if name == "i" => Ok(imag_unit()),
            None => Err(Error::eval(format!("unbound variable `{name}`"))),
        }
    }
    fn add(&self, a: GaussianRational, b: GaussianRational) -> Result<GaussianRational> {
        Ok(a + b)
    }
    fn mul(&self, a: GaussianRational, b: GaussianRational) -> Result<GaussianRational> {
        Ok(a * b)
    }
    fn neg(&self, a: GaussianRational) -> Result<GaussianRational> {
        Ok(-a)
    }
    fn div(&self, a: GaussianRational, b: &Expr) -> Result<GaussianRational> {
        let d = eval(b, self)?;
        if d.is_zero() {
            return Err(Error::eval("division by zero"));
        }
        Ok(a / d)
    }
    fn pow(&self, base: GaussianRational, exponent: &Expr) -> Result<GaussianRational> {
        let e = eval(exponent, self)?;
        if !e.im.is_zero() {
            return Err(Error::eval("complex exponent"));
        }
        if e.re.is_integer() {
            if let Some(n) = e.re.to_integer().to_i32() {
                if n < 0 && base.is_zero() {
                    return Err(Error::eval("zero to a negative power"));
                }
                return Ok(base.powi(n));
            }
        }
        let x = real_part(&base)?;
        float_to_gauss(x.powf(e.re.to_f64().unwrap_or(f64::NAN)))
    }
    fn abs(&self, a: GaussianRational) -> Result<GaussianRational> {
        if a.im.is_zero() {
            Ok(gauss_real(a.re.abs()))
        } else {
            float_to_gauss(gaussian_to_c64(&a).norm())
        }
    }
    fn call(&self, name: &str, args: Vec<GaussianRational>, _raw: &[Expr]) -> Result<GaussianRational> {
        exact_call(name, &args)
    }
}

fn real_part(z: &GaussianRational) -> Result<f64> {
    if !z.im.is_zero() {
        return Err(Error::eval("real argument expected"));
    }
    Ok(z.re.to_f64().unwrap_or(f64::NAN))
}

fn float_to_gauss(x: f64) -> Result<GaussianRational> {
    rational_from_f64(x).map(gauss_real).ok_or_else(|| Error::eval(format!("non-finite value {x}")))
}

/// Elementary functions on exact real arguments.
pub fn exact_call(name: &str, args: &[GaussianRational]) -> Result<GaussianRational> {
    let one = |f: fn(f64) -> f64| -> Result<GaussianRational> {
        match args {
            [x] => float_to_gauss(f(real_part(x)?)),
            _ => Err(Error::eval(format!("`{name}` takes one argument"))),
        }
    };
    match name {
        "exp" => match args {
            [x] if x.is_zero() => Ok(gauss_real(Rational::from_integer(1.into()))),
            _ => one(f64::exp),
        },
        "log" => match args {
            [x] if x.re.is_zero() || x.re.is_negative() => Err(Error::eval("log of a non-positive number")),
            _ => one(f64::ln),
        },
        "sqrt" => one(f64::sqrt),
        "abs" => match args {
            [x] => Ok(gauss_real(real_part(x).map(|_| x.re.abs())?)),
            _ => Err(Error::eval("`abs` takes one argument")),
        },
        "sgn" => match args {
            [x] => {
                real_part(x)?;
                Ok(gauss_real(x.re.signum()))
            }
            _ => Err(Error::eval("`sgn` takes one argument")),
        },
        "min" | "max" => match args {
            [x, y] => {
                real_part(x)?;
                real_part(y)?;
                let pick_x = (x.re <= y.re) == (name == "min");
                Ok(if pick_x { x.clone() } else { y.clone() })
            }
            _ => Err(Error::eval(format!("`{name}` takes two arguments"))),
        },
        _ => Err(Error::eval(format!("unknown function `{name}`"))),
    }
}

pub fn eval_exact(e: &Expr, lookup: &dyn Fn(&str) -> Option<GaussianRational>) -> Result<GaussianRational> {
    eval(e, &ExactDomain { lookup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn f(text: &str, vars: &[(&str, f64)]) -> f64 {
        let e = Expr::parse(text).unwrap();
        eval_f64(&e, &|n| vars.iter().find(|(k, _)| *k == n).map(|(_, v)| *v)).unwrap()
    }

    #[test]
    fn precedence_and_unary() {
        assert_eq!(f("1 + 2*3", &[]), 7.0);
        assert_eq!(f("-2^2", &[]), -4.0);
        assert_eq!(f("2^-1", &[]), 0.5);
        assert_eq!(f("(1+2)*3", &[]), 9.0);
        assert_eq!(f("1 - 2 - 3", &[]), -4.0);
    }

    #[test]
    fn bars_and_calls() {
        let v = f("x*(f0 - a*log|x|)", &[("x", -2.0), ("f0", 1.0), ("a", 0.5)]);
        assert!((v - (-2.0 * (1.0 - 0.5 * 2f64.ln()))).abs() < 1e-15);
        assert_eq!(f("|a| * |b|", &[("a", -2.0), ("b", -3.0)]), 6.0);
        assert!((f("exp(-(s+t))", &[("s", 1.0), ("t", 1.0)]) - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn constant_folding_is_exact() {
        assert_eq!(Expr::parse("1/2 + 1/3").unwrap().constant_value(), Some(rat(5, 6)));
        assert_eq!(Expr::parse("(2/3)^2").unwrap().constant_value(), Some(rat(4, 9)));
        assert_eq!(Expr::parse("x + 1").unwrap().constant_value(), None);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("a $ b").is_err());
        assert!(Expr::parse("1 2").is_err());
    }

    #[test]
    fn variables_collected() {
        let e = Expr::parse("f0 + a*s - v*(w+x)").unwrap();
        let vars: Vec<_> = e.variables().into_iter().collect();
        assert_eq!(vars, ["a", "f0", "s", "v", "w", "x"]);
    }

    #[test]
    fn exact_domain() {
        let e = Expr::parse("(1/2 + i*x)^2 - 1/3").unwrap();
        let v = eval_exact(&e, &|n| (n == "x").then(|| gauss_real(rat(2, 1)))).unwrap();
        assert_eq!(v, crate::scalar::gauss(rat(1, 4) - rat(4, 1) - rat(1, 3), rat(2, 1)));
        let e = Expr::parse("exp(s) * exp(-s)").unwrap();
        let v = eval_exact(&e, &|_| Some(gauss_real(rat(3, 2)))).unwrap();
        assert!((v.re.to_f64().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(eval_exact(&Expr::parse("exp(0)").unwrap(), &|_| None).unwrap(), gauss_real(rat(1, 1)));
        assert!(eval_exact(&Expr::parse("1/(x-x)").unwrap(), &|_| Some(gauss_real(rat(1, 1)))).is_err());
        assert!(eval_exact(&Expr::parse("log(0)").unwrap(), &|_| None).is_err());
    }
}
