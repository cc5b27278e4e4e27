//! Reader for algebra definition files.
//!
//! ```text
//! # comment
//! dim 3
//! basis e1 e2 e3
//! param a = 1/2
//! bracket [e1,e2] = e3
//! bracket [d,e0] = -a*e6
//! ideal center: e3
//! subalgebra m: e0 e1 e2
//! ```
//!
//! `dim` alone yields an abelian algebra on `e1 .. eN`. Brackets not listed
//! are zero; the reversed bracket is filled in by antisymmetry. Declared
//! ideals and subalgebras are checked for closure.

use num_traits::Zero;

use super::{LieAlgebra, SubspaceBasis, SubspaceKind};
use crate::error::{Error, Result};
use crate::expr::{eval, Domain, Expr};
use crate::scalar::Rational;

pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_algebra_lines(&lines)
}

/// Strips a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

pub fn parse_algebra_lines(lines: &[(usize, &str)]) -> Result<LieAlgebra> {
    let mut dim: Option<(usize, usize)> = None;
    let mut names: Option<Vec<String>> = None;
    let mut params: Vec<(String, Rational)> = Vec::new();
    let mut brackets: Vec<(usize, String, String, Expr)> = Vec::new();
    let mut subspaces: Vec<(usize, String, Vec<String>, SubspaceKind)> = Vec::new();

    for &(lineno, raw) in lines {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "dim" => {
                let n: usize = rest.parse().map_err(|_| Error::parse(lineno, format!("bad dimension `{rest}`")))?;
                if n == 0 {
                    return Err(Error::parse(lineno, "dimension must be positive"));
                }
                dim = Some((lineno, n));
            }
            "basis" => {
                let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if list.is_empty() {
                    return Err(Error::parse(lineno, "empty basis"));
                }
                for (i, n) in list.iter().enumerate() {
                    if !is_ident(n) {
                        return Err(Error::parse(lineno, format!("bad basis name `{n}`")));
                    }
                    if list[..i].contains(n) {
                        return Err(Error::parse(lineno, format!("repeated basis name `{n}`")));
                    }
                }
                names = Some(list);
            }
            "param" => {
                let (name, value) =
                    rest.split_once('=').ok_or_else(|| Error::parse(lineno, "expected `param name = value`"))?;
                let name = name.trim();
                if !is_ident(name) {
                    return Err(Error::parse(lineno, format!("bad parameter name `{name}`")));
                }
                let e = Expr::parse(value).map_err(|e| Error::parse(lineno, e.to_string()))?;
                let lookup = |v: &str| params.iter().find(|(n, _)| n == v).map(|(_, q)| Expr::Num(q.clone()));
                let q = e
                    .substitute(&lookup)
                    .constant_value()
                    .ok_or_else(|| Error::parse(lineno, format!("parameter `{name}` is not a rational constant")))?;
                params.retain(|(n, _)| n != name);
                params.push((name.to_string(), q));
            }
            "bracket" => {
                let (lhs, rhs) =
                    rest.split_once('=').ok_or_else(|| Error::parse(lineno, "expected `bracket [x,y] = ...`"))?;
                let inner = lhs
                    .trim()
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| Error::parse(lineno, "bracket needs `[x,y]`"))?;
                let (x, y) = inner.split_once(',').ok_or_else(|| Error::parse(lineno, "bracket needs `[x,y]`"))?;
                let e = Expr::parse(rhs).map_err(|e| Error::parse(lineno, e.to_string()))?;
                brackets.push((lineno, x.trim().to_string(), y.trim().to_string(), e));
            }
            "ideal" | "subalgebra" | "subspace" => {
                let (name, list) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno, format!("expected `{keyword} name: x y ...`")))?;
                let kind = match keyword {
                    "ideal" => SubspaceKind::Ideal,
                    "subalgebra" => SubspaceKind::Subalgebra,
                    _ => SubspaceKind::Plain,
                };
                let members = list.split_whitespace().map(str::to_string).collect();
                subspaces.push((lineno, name.trim().to_string(), members, kind));
            }
            other => return Err(Error::parse(lineno, format!("unknown keyword `{other}`"))),
        }
    }

    let names = match (names, dim) {
        (Some(n), Some((line, d))) if n.len() != d => {
            return Err(Error::parse(line, format!("dim {d} but {} basis names", n.len())))
        }
        (Some(n), _) => n,
        (None, Some((_, d))) => (1..=d).map(|i| format!("e{i}")).collect(),
        (None, None) => return Err(Error::parse(0, "neither `dim` nor `basis` given")),
    };

    let mut l = LieAlgebra::with_names(names, params);
    let n = l.dim();
    let mut declared: Vec<Option<(usize, Vec<Rational>)>> = vec![None; n * n];
    for (lineno, x, y, e) in &brackets {
        let i = l.index_of(x).ok_or_else(|| Error::UnknownBasis { line: *lineno, name: x.clone() })?;
        let j = l.index_of(y).ok_or_else(|| Error::UnknownBasis { line: *lineno, name: y.clone() })?;
        let v = linear_combination(&l, *lineno, e)?;
        let conflict = || Error::AntisymmetryConflict { line: *lineno, x: x.clone(), y: y.clone() };
        if i == j {
            if v.iter().any(|c| !c.is_zero()) {
                return Err(conflict());
            }
            continue;
        }
        if declared[i * n + j].is_some() {
            return Err(Error::DuplicateBracket { line: *lineno, x: x.clone(), y: y.clone() });
        }
        if let Some((_, prev)) = &declared[j * n + i] {
            let negated: Vec<Rational> = v.iter().map(|c| -c.clone()).collect();
            if *prev != negated {
                return Err(conflict());
            }
        }
        declared[i * n + j] = Some((*lineno, v.clone()));
        l.set_bracket(i, j, v);
    }

    for (lineno, name, members, kind) in subspaces {
        let vectors = members
            .iter()
            .map(|m| {
                let i = l.index_of(m).ok_or_else(|| Error::UnknownBasis { line: lineno, name: m.clone() })?;
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::from_integer(1.into());
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let s = SubspaceBasis::new(name.clone(), vectors, kind).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let closed = match kind {
            SubspaceKind::Ideal => s.is_ideal_in(&l),
            SubspaceKind::Subalgebra => s.is_subalgebra_in(&l),
            SubspaceKind::Plain => true,
        };
        if !closed {
            return Err(Error::parse(lineno, format!("`{name}` is not closed under the bracket")));
        }
        l.push_subspace(s);
    }
    Ok(l)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn linear_combination(l: &LieAlgebra, lineno: usize, e: &Expr) -> Result<Vec<Rational>> {
    let d = LinearDomain { algebra: l };
    match eval(e, &d).map_err(|err| Error::parse(lineno, err.to_string()))? {
        LinearValue::Vector(v) => Ok(v),
        LinearValue::Scalar(q) if q.is_zero() => Ok(vec![Rational::zero(); l.dim()]),
        LinearValue::Scalar(_) => Err(Error::parse(lineno, "bracket value must be a vector")),
    }
}

#[derive(Clone, Debug)]
pub enum LinearValue {
    Scalar(Rational),
    Vector(Vec<Rational>),
}

/// Linear combinations of basis elements with rational and parameter coefficients.
pub struct LinearDomain<'a> {
    pub algebra: &'a LieAlgebra,
}

impl Domain for LinearDomain<'_> {
    type Value = LinearValue;

    fn constant(&self, q: &Rational) -> Result<LinearValue> {
        Ok(LinearValue::Scalar(q.clone()))
    }

    fn variable(&self, name: &str) -> Result<LinearValue> {
        if let Some(i) = self.algebra.index_of(name) {
            let mut v = vec![Rational::zero(); self.algebra.dim()];
            v[i] = Rational::from_integer(1.into());
            return Ok(LinearValue::Vector(v));
        }
        self.algebra
            .param(name)
            .map(|q| LinearValue::Scalar(q.clone()))
            .ok_or_else(|| Error::eval(format!("unknown name `{name}`")))
    }

    fn add(&self, a: LinearValue, b: LinearValue) -> Result<LinearValue> {
        use LinearValue::*;
        match (a, b) {
            (Scalar(x), Scalar(y)) => Ok(Scalar(x + y)),
            (Vector(x), Vector(y)) => Ok(Vector(x.into_iter().zip(y).map(|(p, q)| p + q).collect())),
            (Scalar(s), Vector(v)) | (Vector(v), Scalar(s)) if s.is_zero() => Ok(Vector(v)),
            _ => Err(Error::eval("cannot add a scalar to a vector")),
        }
    }

    fn mul(&self, a: LinearValue, b: LinearValue) -> Result<LinearValue> {
        use LinearValue::*;
        match (a, b) {
            (Scalar(x), Scalar(y)) => Ok(Scalar(x * y)),
            (Scalar(s), Vector(v)) | (Vector(v), Scalar(s)) => Ok(Vector(v.into_iter().map(|c| c * &s).collect())),
            _ => Err(Error::eval("product of two algebra elements in a linear expression")),
        }
    }

    fn neg(&self, a: LinearValue) -> Result<LinearValue> {
        Ok(match a {
            LinearValue::Scalar(x) => LinearValue::Scalar(-x),
            LinearValue::Vector(v) => LinearValue::Vector(v.into_iter().map(|c| -c).collect()),
        })
    }

    fn div(&self, a: LinearValue, b: &Expr) -> Result<LinearValue> {
        match eval(b, self)? {
            LinearValue::Scalar(d) if !d.is_zero() => {
                self.mul(a, LinearValue::Scalar(Rational::from_integer(1.into()) / d))
            }
            _ => Err(Error::eval("division by zero or by a vector")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::check_jacobi;
    use crate::scalar::{rat, rint};

    #[test]
    fn dim_only_is_abelian() {
        let l = parse_algebra("dim 3\n").unwrap();
        assert_eq!(l.dim(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert!(l.bracket_basis(i, j).iter().all(|c| c.is_zero()));
            }
        }
    }

    #[test]
    fn antisymmetry_completed() {
        let l = parse_algebra("basis x y z\nparam a = 3/2\nbracket [x,y] = a*z - y\n").unwrap();
        assert_eq!(l.bracket_basis(0, 1), &[rint(0), rint(-1), rat(3, 2)]);
        assert_eq!(l.bracket_basis(1, 0), &[rint(0), rint(1), rat(-3, 2)]);
        assert!(check_jacobi(&l).is_empty());
    }

    #[test]
    fn conflicting_reverse_bracket() {
        let err = parse_algebra("dim 3\nbracket [e1,e2] = e3\nbracket [e2,e1] = e3\n").unwrap_err();
        assert!(matches!(err, Error::AntisymmetryConflict { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("antisymmetry conflict"));
    }

    #[test]
    fn consistent_reverse_bracket_accepted() {
        assert!(parse_algebra("dim 3\nbracket [e1,e2] = e3\nbracket [e2,e1] = -e3\n").is_ok());
    }

    #[test]
    fn duplicate_bracket() {
        let err = parse_algebra("dim 3\nbracket [e1,e2] = e3\nbracket [e1,e2] = e3\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateBracket { .. }));
    }

    #[test]
    fn unknown_names_and_keywords() {
        assert!(matches!(
            parse_algebra("dim 2\nbracket [e1,q] = e2\n").unwrap_err(),
            Error::UnknownBasis { line: 2, .. }
        ));
        assert!(matches!(parse_algebra("dim 2\nfoo bar\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(parse_algebra("dim 2\nbracket [e1,e2] = e1*e2\n").is_err());
        assert!(parse_algebra("basis a b\ndim 3\n").is_err());
    }

    #[test]
    fn ideal_closure_checked() {
        let text = "basis x y z\nbracket [x,y] = z\nideal c: z\nideal bad: y\n";
        assert!(matches!(parse_algebra(text).unwrap_err(), Error::Parse { line: 4, .. }));
    }

    #[test]
    fn comments_ignored() {
        let l = parse_algebra("# heading\nbasis x y z # trailing\n\nbracket [x,y] = z # note\n").unwrap();
        assert_eq!(l.dim(), 3);
    }
}
