//! Reader for example-model files.
//!
//! A model file is an algebra file extended with single-line declarations
//! and indented blocks:
//!
//! ```text
//! subalgebra m: e0 e1 e2 e3 e4 e5 e6
//! ideal n: e1 e2 e3 e4 e5 e6
//! functional f: e0 = f0, e4 = 1, e5 = 1, e6 = 1
//! central xi1 = e4, xi2 = e5
//! polynomial p1 = e0*e4 - e1*e2
//! element W1 = 1/2*(e1*e2 + e2*e1) - e0*e4
//! symbol psi1 = xi1*(f0 - a*log|xi1|)
//! triple W1 p1 psi1
//! orbit s t v w x
//!   word d:s e0:t e1:v e2:w e3:x
//!   e0 = f0 + a*s - v*(w + x)
//! omega
//!   e6 = 1, e4 > 0
//! rep pi_s orbit s
//!   e1 -> -d
//! witness tail
//!   when e4 = 0
//!   point e0 = u1; e6 = 1
//!   schedule s = n; v = exp(n)
//! ```

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::enveloping::{PbwElement, PbwRewriter, PolyOnDual};
use crate::error::{Error, Result};
use crate::expr::{eval, eval_exact, eval_f64, exact_call, Domain, Expr};
use crate::lie_core::{parse_algebra_lines, LieAlgebra, SubspaceBasis};
use crate::multiplier::SymbolFunction;
use crate::rep_ops::{parse_operator, ExpPolyOperator, RepTable};
use crate::scalar::{gauss_real, imag_unit, GaussianRational, Rational};

const ALGEBRA_KEYWORDS: [&str; 7] = ["dim", "basis", "param", "bracket", "ideal", "subalgebra", "subspace"];
const BLOCK_KEYWORDS: [&str; 6] = ["orbit", "omega", "rep", "witness", "critical", "unresolved"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cmp {
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
}

#[derive(Clone, Debug, PartialEq)]
struct Clause {
    lhs: Expr,
    cmp: Cmp,
    rhs: Expr,
}

/// Conjunction of comparisons such as `e4 > 0, e2*e5 - e3*e4 = 0`.
/// Equalities hold within `1e-8 · max(1, |lhs|, |rhs|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    text: String,
    clauses: Vec<Clause>,
}

pub const CONDITION_TOL: f64 = 1e-8;

impl Condition {
    pub fn parse(text: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        for part in split_top(text, ',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (pos, cmp, len) =
                find_comparison(part).ok_or_else(|| Error::eval(format!("no comparison in `{part}`")))?;
            clauses.push(Clause { lhs: Expr::parse(&part[..pos])?, cmp, rhs: Expr::parse(&part[pos + len..])? });
        }
        if clauses.is_empty() {
            return Err(Error::eval("empty condition"));
        }
        Ok(Condition { text: text.trim().to_string(), clauses })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Clauses that fail at the point, or an evaluation error. NaN values fail.
    pub fn violations(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        for (k, c) in self.clauses.iter().enumerate() {
            let ok = match (eval_f64(&c.lhs, lookup), eval_f64(&c.rhs, lookup)) {
                (Ok(l), Ok(r)) if l.is_finite() && r.is_finite() => {
                    let tol = CONDITION_TOL * 1f64.max(l.abs()).max(r.abs());
                    match c.cmp {
                        Cmp::Eq => (l - r).abs() <= tol,
                        Cmp::Ne => (l - r).abs() > tol,
                        Cmp::Gt => l > r + tol,
                        Cmp::Ge => l >= r - tol,
                        Cmp::Lt => l < r - tol,
                        Cmp::Le => l <= r + tol,
                    }
                }
                _ => false,
            };
            if !ok {
                out.push(split_top(&self.text, ',').get(k).map_or_else(String::new, |s| s.trim().to_string()));
            }
        }
        out
    }

    pub fn holds(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> bool {
        self.violations(lookup).is_empty()
    }
}

fn split_top(text: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

fn find_comparison(s: &str) -> Option<(usize, Cmp, usize)> {
    for (pat, cmp) in
        [("!=", Cmp::Ne), (">=", Cmp::Ge), ("<=", Cmp::Le), ("=", Cmp::Eq), (">", Cmp::Gt), ("<", Cmp::Lt)]
    {
        if let Some(p) = s.find(pat) {
            return Some((p, cmp, pat.len()));
        }
    }
    None
}

/// Closed-form coadjoint orbit through `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSpec {
    pub params: Vec<String>,
    /// Group word as (basis index in the full algebra, parameter name).
    pub word: Vec<(usize, String)>,
    /// One expression per basis element of `m`.
    pub components: Vec<Expr>,
}

/// How a rep table's free symbols are bound.
#[derive(Clone, Debug, PartialEq)]
pub enum RepBinding {
    /// Induced from `f` moved along the listed orbit parameters; the others are 0.
    Orbit(Vec<String>),
    /// Induced from the functional given by `point`.
    Functional { vars: Vec<String>, point: Vec<(usize, Expr)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepSpec {
    pub name: String,
    pub binding: RepBinding,
    pub entries: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub element: String,
    pub polynomial: String,
    pub symbol: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub element: String,
    pub polynomial: String,
    pub tables: Vec<String>,
}

/// Recipe for a functional built from random numbers `u1, u2, ...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSpec {
    pub orbit: Vec<(String, Expr)>,
    pub components: Vec<(usize, Expr)>,
    pub shift: Vec<(usize, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSpec {
    pub name: String,
    pub when: Condition,
    pub point: PointSpec,
    pub schedule: Vec<(String, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSpec {
    pub name: String,
    pub point: PointSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnresolvedSpec {
    pub name: String,
    pub when: Condition,
    pub note: String,
    pub point: PointSpec,
}

#[derive(Clone, Debug)]
pub struct ExampleModel {
    pub name: String,
    pub algebra: LieAlgebra,
    /// The stabilizer ideal with its own structure constants.
    pub m: LieAlgebra,
    /// Indices of the basis of `m` inside the full algebra.
    pub m_indices: Vec<usize>,
    /// `n` in coordinates of `m`.
    pub n: SubspaceBasis,
    pub f: Vec<Rational>,
    pub orbit: OrbitSpec,
    pub omega: Vec<Condition>,
    pub admissible: Option<Condition>,
    pub closure_outside: Option<Condition>,
    pub normalize: Vec<(usize, usize)>,
    pub general_position: Vec<usize>,
    /// Central coordinate names and the `m` index each reads.
    pub central: Vec<(String, usize)>,
    pub polynomials: Vec<(String, PolyOnDual)>,
    pub elements: Vec<(String, PbwElement)>,
    pub symbols: Vec<SymbolFunction>,
    pub triples: Vec<Triple>,
    pub pairs: Vec<PairSpec>,
    pub reps: Vec<RepSpec>,
    pub witnesses: Vec<WitnessSpec>,
    pub criticals: Vec<CriticalSpec>,
    pub unresolved: Vec<UnresolvedSpec>,
}

type Lines<'a> = Vec<(usize, &'a str)>;

fn is_indented(raw: &str) -> bool {
    raw.starts_with(' ') || raw.starts_with('\t')
}

impl ExampleModel {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
        Self::parse(stem, &text)
    }

    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut open = false;
        let mut algebra_lines: Lines = Vec::new();
        let mut singles: Lines = Vec::new();
        let mut blocks: Vec<((usize, &str), Lines)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            if is_indented(raw) {
                match blocks.last_mut() {
                    Some((_, body)) if open => body.push((lineno, line)),
                    _ => return Err(Error::parse(lineno, "indented line outside a block")),
                }
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap_or("");
            open = BLOCK_KEYWORDS.contains(&keyword);
            if ALGEBRA_KEYWORDS.contains(&keyword) {
                algebra_lines.push((lineno, line));
            } else if open {
                blocks.push(((lineno, line), Vec::new()));
            } else {
                singles.push((lineno, line));
            }
        }
        let algebra = parse_algebra_lines(&algebra_lines)?;
        let m_space = algebra
            .subspace("m")
            .ok_or_else(|| Error::Model("model needs a subalgebra or ideal named `m`".into()))?
            .clone();
        let m_indices = m_space
            .vectors
            .iter()
            .map(|v| v.iter().position(|c| !num_traits::Zero::is_zero(c)).unwrap_or(0))
            .collect::<Vec<_>>();
        let m = algebra.restrict(&m_space)?;
        let n_full = algebra.subspace("n").ok_or_else(|| Error::Model("model needs an ideal named `n`".into()))?;
        let n_vectors = n_full
            .vectors
            .iter()
            .map(|v| {
                let k = v.iter().position(|c| !num_traits::Zero::is_zero(c)).unwrap_or(0);
                let pos = m_indices
                    .iter()
                    .position(|&j| j == k)
                    .ok_or_else(|| Error::Model("`n` must lie inside `m`".into()))?;
                let mut out = vec![Rational::from_integer(0.into()); m.dim()];
                out[pos] = Rational::from_integer(1.into());
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = SubspaceBasis::new("n", n_vectors, crate::lie_core::SubspaceKind::Ideal)?;

        let mut model = ExampleModel {
            name: name.to_string(),
            algebra,
            m,
            m_indices,
            n,
            f: Vec::new(),
            orbit: OrbitSpec { params: Vec::new(), word: Vec::new(), components: Vec::new() },
            omega: Vec::new(),
            admissible: None,
            closure_outside: None,
            normalize: Vec::new(),
            general_position: Vec::new(),
            central: Vec::new(),
            polynomials: Vec::new(),
            elements: Vec::new(),
            symbols: Vec::new(),
            triples: Vec::new(),
            pairs: Vec::new(),
            reps: Vec::new(),
            witnesses: Vec::new(),
            criticals: Vec::new(),
            unresolved: Vec::new(),
        };
        for &(lineno, line) in &singles {
            model.single(lineno, line)?;
        }
        for ((lineno, header), body) in &blocks {
            model.block(*lineno, header, body)?;
        }
        model.validate()?;
        Ok(model)
    }

    fn m_index(&self, lineno: usize, name: &str) -> Result<usize> {
        self.m.index_of(name).ok_or_else(|| Error::UnknownBasis { line: lineno, name: name.to_string() })
    }

    pub fn param_f64(&self, name: &str) -> Option<f64> {
        self.algebra.param(name).and_then(|q| q.to_f64())
    }

    pub fn params_f64(&self) -> BTreeMap<String, f64> {
        self.algebra.params().iter().map(|(n, q)| (n.clone(), q.to_f64().unwrap_or(f64::NAN))).collect()
    }

    fn param_exact(&self, name: &str) -> Option<GaussianRational> {
        self.algebra.param(name).map(|q| gauss_real(q.clone()))
    }

    fn exact_rational(&self, lineno: usize, text: &str) -> Result<Rational> {
        let e = Expr::parse(text).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let v = eval_exact(&e, &|n| self.param_exact(n)).map_err(|e| Error::parse(lineno, e.to_string()))?;
        if !num_traits::Zero::is_zero(&v.im) {
            return Err(Error::parse(lineno, "value must be real"));
        }
        Ok(v.re)
    }

    fn single(&mut self, lineno: usize, line: &str) -> Result<()> {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let parse_err = |e: Error| Error::parse(lineno, e.to_string());
        match keyword {
            "name" => self.name = rest.to_string(),
            "functional" => {
                let (_, list) =
                    rest.split_once(':').ok_or_else(|| Error::parse(lineno, "expected `functional f: ...`"))?;
                let mut f = vec![Rational::from_integer(0.into()); self.m.dim()];
                for item in split_top(list, ',') {
                    let (k, v) = item.split_once('=').ok_or_else(|| Error::parse(lineno, "expected `name = value`"))?;
                    let idx = self.m_index(lineno, k.trim())?;
                    f[idx] = self.exact_rational(lineno, v)?;
                }
                self.f = f;
            }
            "central" => {
                for item in split_top(rest, ',') {
                    let (k, v) = item.split_once('=').ok_or_else(|| Error::parse(lineno, "expected `xi = basis`"))?;
                    let idx = self.m_index(lineno, v.trim())?;
                    self.central.push((k.trim().to_string(), idx));
                }
            }
            "general_position" => {
                for nm in rest.split_whitespace() {
                    let idx = self.m_index(lineno, nm)?;
                    self.general_position.push(idx);
                }
            }
            "normalize" => {
                for item in rest.split(';') {
                    let (g, c) = item
                        .split_once("->")
                        .ok_or_else(|| Error::parse(lineno, "expected `generator -> component`"))?;
                    let pair = (self.m_index(lineno, g.trim())?, self.m_index(lineno, c.trim())?);
                    self.normalize.push(pair);
                }
            }
            "admissible" => self.admissible = Some(Condition::parse(rest).map_err(parse_err)?),
            "closure_outside" => self.closure_outside = Some(Condition::parse(rest).map_err(parse_err)?),
            "polynomial" => {
                let (nm, body) = definition(lineno, rest)?;
                let e = Expr::parse(body).map_err(parse_err)?;
                let p = eval(&e, &PolyDomain { model: self }).map_err(parse_err)?;
                self.polynomials.push((nm, p));
            }
            "element" => {
                let (nm, body) = definition(lineno, rest)?;
                let e = Expr::parse(body).map_err(parse_err)?;
                let w = {
                    let d = ElementDomain { model: self, rw: RefCell::new(PbwRewriter::new(&self.m)) };
                    eval(&e, &d).map_err(parse_err)?
                };
                self.elements.push((nm, w));
            }
            "symbol" => {
                let (nm, body) = definition(lineno, rest)?;
                let e = Expr::parse(body).map_err(parse_err)?;
                let used = e.variables();
                let vars: Vec<&str> =
                    self.central.iter().map(|(n, _)| n.as_str()).filter(|n| used.contains(*n)).collect();
                let s = SymbolFunction::parse(&nm, body, &vars, &self.params_f64()).map_err(parse_err)?;
                self.symbols.push(s);
            }
            "triple" => match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                [w, p, s] => self.triples.push(Triple {
                    element: w.to_string(),
                    polynomial: p.to_string(),
                    symbol: s.to_string(),
                }),
                _ => return Err(Error::parse(lineno, "expected `triple ELEMENT POLYNOMIAL SYMBOL`")),
            },
            "pair" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words.as_slice() {
                    [w, p, "on", tables @ ..] if !tables.is_empty() => self.pairs.push(PairSpec {
                        element: w.to_string(),
                        polynomial: p.to_string(),
                        tables: tables.iter().map(|t| t.to_string()).collect(),
                    }),
                    _ => return Err(Error::parse(lineno, "expected `pair ELEMENT POLYNOMIAL on TABLE ...`")),
                }
            }
            other => return Err(Error::parse(lineno, format!("unknown keyword `{other}`"))),
        }
        Ok(())
    }

    fn block(&mut self, lineno: usize, header: &str, body: &[(usize, &str)]) -> Result<()> {
        let words: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |l: usize| move |e: Error| Error::parse(l, e.to_string());
        match words[0] {
            "orbit" => {
                let params: Vec<String> = words[1..].iter().map(|s| s.to_string()).collect();
                let mut components: Vec<Option<Expr>> = vec![None; self.m.dim()];
                let mut word = Vec::new();
                for &(l, line) in body {
                    if let Some(rest) = line.strip_prefix("word ") {
                        for item in rest.split_whitespace() {
                            let (g, p) =
                                item.split_once(':').ok_or_else(|| Error::parse(l, "word items look like `e0:t`"))?;
                            let gi = self
                                .algebra
                                .index_of(g)
                                .ok_or_else(|| Error::UnknownBasis { line: l, name: g.to_string() })?;
                            if !params.iter().any(|q| q == p) {
                                return Err(Error::parse(l, format!("`{p}` is not an orbit parameter")));
                            }
                            word.push((gi, p.to_string()));
                        }
                    } else {
                        let (nm, e) = definition(l, line)?;
                        let idx = self.m_index(l, &nm)?;
                        components[idx] = Some(Expr::parse(e).map_err(parse_err(l))?);
                    }
                }
                let components = components
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        c.ok_or_else(|| {
                            Error::parse(lineno, format!("orbit misses component `{}`", self.m.basis_names()[i]))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.orbit = OrbitSpec { params, word, components };
            }
            "omega" => {
                for &(l, line) in body {
                    self.omega.push(Condition::parse(line).map_err(parse_err(l))?);
                }
            }
            "rep" => {
                let name = words.get(1).ok_or_else(|| Error::parse(lineno, "rep needs a name"))?.to_string();
                let kind = words.get(2).copied().unwrap_or("");
                let vars: Vec<String> = words.iter().skip(3).map(|s| s.to_string()).collect();
                let mut entries = Vec::new();
                let mut point = Vec::new();
                for &(l, line) in body {
                    if let Some(rest) = line.strip_prefix("point ") {
                        point = self.assignments_m(l, rest)?;
                    } else {
                        let (lhs, rhs) =
                            line.split_once("->").ok_or_else(|| Error::parse(l, "expected `element -> operator`"))?;
                        entries.push((lhs.trim().to_string(), rhs.trim().to_string()));
                    }
                }
                let binding = match kind {
                    "orbit" => RepBinding::Orbit(vars),
                    "functional" => RepBinding::Functional { vars, point },
                    _ => return Err(Error::parse(lineno, "expected `rep NAME orbit|functional VARS`")),
                };
                self.reps.push(RepSpec { name, binding, entries });
            }
            "witness" | "critical" | "unresolved" => {
                let name = words.get(1).ok_or_else(|| Error::parse(lineno, "block needs a name"))?.to_string();
                let mut when = None;
                let mut point = PointSpec::default();
                let mut schedule = Vec::new();
                let mut note = String::new();
                for &(l, line) in body {
                    let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
                    let rest = rest.trim();
                    match key {
                        "when" => when = Some(Condition::parse(rest).map_err(parse_err(l))?),
                        "point" => point.components = self.assignments_m(l, rest)?,
                        "shift" => point.shift = self.assignments_m(l, rest)?,
                        "orbit_point" => point.orbit = assignments(l, rest)?,
                        "schedule" => schedule = assignments(l, rest)?,
                        "note" => note = rest.to_string(),
                        _ => return Err(Error::parse(l, format!("unknown entry `{key}`"))),
                    }
                }
                match words[0] {
                    "witness" => {
                        let when = when.ok_or_else(|| Error::parse(lineno, "witness needs `when`"))?;
                        self.witnesses.push(WitnessSpec { name, when, point, schedule });
                    }
                    "critical" => self.criticals.push(CriticalSpec { name, point }),
                    _ => {
                        let when = when.ok_or_else(|| Error::parse(lineno, "unresolved needs `when`"))?;
                        self.unresolved.push(UnresolvedSpec { name, when, note, point });
                    }
                }
            }
            other => return Err(Error::parse(lineno, format!("unknown block `{other}`"))),
        }
        Ok(())
    }

    fn assignments_m(&self, lineno: usize, text: &str) -> Result<Vec<(usize, Expr)>> {
        assignments(lineno, text)?.into_iter().map(|(n, e)| Ok((self.m_index(lineno, &n)?, e))).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.f.is_empty() {
            return Err(Error::Model("model declares no `functional`".into()));
        }
        if self.orbit.components.is_empty() {
            return Err(Error::Model("model declares no `orbit` block".into()));
        }
        for t in &self.triples {
            self.element(&t.element)?;
            self.polynomial(&t.polynomial)?;
            self.symbol(&t.symbol)?;
        }
        for p in &self.pairs {
            self.element(&p.element)?;
            self.polynomial(&p.polynomial)?;
            for t in &p.tables {
                self.rep(t)?;
            }
        }
        Ok(())
    }

    pub fn element(&self, name: &str) -> Result<&PbwElement> {
        self.elements
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w)
            .ok_or_else(|| Error::Model(format!("unknown element `{name}`")))
    }

    pub fn polynomial(&self, name: &str) -> Result<&PolyOnDual> {
        self.polynomials
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Model(format!("unknown polynomial `{name}`")))
    }

    pub fn symbol(&self, name: &str) -> Result<&SymbolFunction> {
        self.symbols.iter().find(|s| s.name == name).ok_or_else(|| Error::Model(format!("unknown symbol `{name}`")))
    }

    pub fn rep(&self, name: &str) -> Result<&RepSpec> {
        self.reps.iter().find(|r| r.name == name).ok_or_else(|| Error::Model(format!("unknown rep table `{name}`")))
    }

    /// The table with its free symbols bound to `values` (in binding order).
    pub fn build_rep(&self, spec: &RepSpec, values: &[GaussianRational]) -> Result<RepTable> {
        let vars = match &spec.binding {
            RepBinding::Orbit(v) => v,
            RepBinding::Functional { vars, .. } => vars,
        };
        if vars.len() != values.len() {
            return Err(Error::Model(format!("`{}` binds {} symbols, got {}", spec.name, vars.len(), values.len())));
        }
        let scalars = |n: &str| -> Option<GaussianRational> {
            vars.iter().position(|v| v == n).map(|k| values[k].clone()).or_else(|| self.param_exact(n))
        };
        let mut images: Vec<(Vec<GaussianRational>, ExpPolyOperator)> = Vec::new();
        let mut direct = true;
        for (lhs, rhs) in &spec.entries {
            let v = self.element_vector(lhs)?;
            let unit = v.iter().filter(|c| !num_traits::Zero::is_zero(*c)).count() == 1
                && v.iter().any(num_traits::One::is_one);
            direct &= unit;
            images.push((v, parse_operator(rhs, &scalars)?));
        }
        if direct {
            let mut t = RepTable::new(spec.name.clone(), self.m.dim());
            for (v, op) in images {
                let i = v.iter().position(num_traits::One::is_one).unwrap_or(0);
                t.set(i, op);
            }
            Ok(t)
        } else {
            RepTable::from_images(spec.name.clone(), self.m.dim(), &images)
        }
    }

    /// Coordinates of a basis name or a degree-one element.
    fn element_vector(&self, name: &str) -> Result<Vec<GaussianRational>> {
        let dim = self.m.dim();
        let zero = gauss_real(Rational::from_integer(0.into()));
        if let Some(i) = self.m.index_of(name) {
            let mut v = vec![zero; dim];
            v[i] = gauss_real(Rational::from_integer(1.into()));
            return Ok(v);
        }
        let w = self.element(name)?;
        let mut v = vec![zero; dim];
        for (exps, c) in w.terms() {
            match exps.iter().sum::<u32>() {
                1 => {
                    let i = exps.iter().position(|&e| e == 1).unwrap_or(0);
                    v[i] = c.clone();
                }
                _ => return Err(Error::Model(format!("`{name}` is not a linear element"))),
            }
        }
        Ok(v)
    }

    /// Exact point of the binding, used as `h` in the Duflo pair check.
    pub fn rep_point(&self, spec: &RepSpec, values: &[Rational]) -> Result<Vec<Rational>> {
        match &spec.binding {
            RepBinding::Orbit(vars) => {
                let mut params = vec![Rational::from_integer(0.into()); self.orbit.params.len()];
                for (v, val) in vars.iter().zip(values) {
                    let k = self
                        .orbit
                        .params
                        .iter()
                        .position(|p| p == v)
                        .ok_or_else(|| Error::Model(format!("`{v}` is not an orbit parameter")))?;
                    params[k] = val.clone();
                }
                self.closed_form_exact(&params)
            }
            RepBinding::Functional { vars, point } => {
                let lookup = |n: &str| -> Option<GaussianRational> {
                    vars.iter()
                        .position(|v| v == n)
                        .map(|k| gauss_real(values[k].clone()))
                        .or_else(|| self.param_exact(n))
                };
                let mut h = vec![Rational::from_integer(0.into()); self.m.dim()];
                for (i, e) in point {
                    h[*i] = real(eval_exact(e, &lookup)?)?;
                }
                Ok(h)
            }
        }
    }

    pub fn closed_form_orbit(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check_orbit_arity(params.len())?;
        let pf = self.params_f64();
        let lookup = |n: &str| -> Option<f64> {
            self.orbit.params.iter().position(|p| p == n).map(|k| params[k]).or_else(|| pf.get(n).copied())
        };
        self.orbit.components.iter().map(|e| eval_f64(e, &lookup)).collect()
    }

    pub fn closed_form_exact(&self, params: &[Rational]) -> Result<Vec<Rational>> {
        self.check_orbit_arity(params.len())?;
        let lookup = |n: &str| -> Option<GaussianRational> {
            self.orbit
                .params
                .iter()
                .position(|p| p == n)
                .map(|k| gauss_real(params[k].clone()))
                .or_else(|| self.param_exact(n))
        };
        self.orbit.components.iter().map(|e| real(eval_exact(e, &lookup)?)).collect()
    }

    fn check_orbit_arity(&self, k: usize) -> Result<()> {
        if k != self.orbit.params.len() {
            return Err(Error::Model(format!("orbit takes {} parameters, got {k}", self.orbit.params.len())));
        }
        Ok(())
    }

    /// Exact functional from a point recipe and random numbers `u1, u2, ...`.
    pub fn eval_point(&self, spec: &PointSpec, u: &[Rational]) -> Result<Vec<Rational>> {
        let lookup = |n: &str| -> Option<GaussianRational> {
            n.strip_prefix('u')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1 && k <= u.len())
                .map(|k| gauss_real(u[k - 1].clone()))
                .or_else(|| self.param_exact(n))
        };
        let mut h = if spec.orbit.is_empty() {
            vec![Rational::from_integer(0.into()); self.m.dim()]
        } else {
            let mut params = vec![Rational::from_integer(0.into()); self.orbit.params.len()];
            for (nm, e) in &spec.orbit {
                let k = self
                    .orbit
                    .params
                    .iter()
                    .position(|p| p == nm)
                    .ok_or_else(|| Error::Model(format!("`{nm}` is not an orbit parameter")))?;
                params[k] = real(eval_exact(e, &lookup)?)?;
            }
            self.closed_form_exact(&params)?
        };
        for (i, e) in &spec.components {
            h[*i] = real(eval_exact(e, &lookup)?)?;
        }
        for (i, e) in &spec.shift {
            h[*i] += real(eval_exact(e, &lookup)?)?;
        }
        Ok(h)
    }

    /// Lookup of basis names (as `h` coordinates) and parameters.
    pub fn point_lookup<'a>(&'a self, h: &'a [f64]) -> impl Fn(&str) -> Option<f64> + 'a {
        move |n: &str| self.m.index_of(n).map(|i| h[i]).or_else(|| self.param_f64(n))
    }

    pub fn in_omega(&self, h: &[f64]) -> bool {
        let lookup = self.point_lookup(h);
        self.omega.iter().any(|c| c.holds(&lookup))
    }

    pub fn is_admissible(&self, h: &[f64]) -> bool {
        let lookup = self.point_lookup(h);
        self.admissible.as_ref().is_none_or(|c| c.holds(&lookup))
    }

    /// Symbol arguments read off the central coordinates of `h`.
    pub fn symbol_args(&self, psi: &SymbolFunction, h: &[f64]) -> Result<Vec<f64>> {
        psi.vars()
            .iter()
            .map(|v| {
                self.central
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, i)| h[*i])
                    .ok_or_else(|| Error::Model(format!("`{v}` is not a central coordinate")))
            })
            .collect()
    }

    /// Central axis positions (in declaration order) used by a symbol.
    pub fn symbol_axes(&self, psi: &SymbolFunction) -> Vec<usize> {
        psi.vars().iter().filter_map(|v| self.central.iter().position(|(n, _)| n == v)).collect()
    }

    /// Exact evaluation of a witness schedule at step `n` for the target `h`.
    pub fn schedule_params(&self, w: &WitnessSpec, h: &[Rational], n: u32) -> Result<Vec<Rational>> {
        let mut bound: Vec<(String, Rational)> = Vec::new();
        for (name, e) in &w.schedule {
            let lookup = |v: &str| -> Option<GaussianRational> {
                if v == "n" {
                    return Some(gauss_real(Rational::from_integer(n.into())));
                }
                bound
                    .iter()
                    .rev()
                    .find(|(b, _)| b == v)
                    .map(|(_, q)| gauss_real(q.clone()))
                    .or_else(|| self.m.index_of(v).map(|i| gauss_real(h[i].clone())))
                    .or_else(|| self.param_exact(v))
            };
            let val = real(eval_exact(e, &lookup)?)?;
            bound.push((name.clone(), val));
        }
        let mut params = vec![Rational::from_integer(0.into()); self.orbit.params.len()];
        for (name, val) in bound {
            let k =
                self.orbit.params.iter().position(|p| *p == name).ok_or_else(|| {
                    Error::Model(format!("schedule assigns `{name}`, which is not an orbit parameter"))
                })?;
            params[k] = val;
        }
        Ok(params)
    }
}

fn real(v: GaussianRational) -> Result<Rational> {
    if num_traits::Zero::is_zero(&v.im) {
        Ok(v.re)
    } else {
        Err(Error::eval("expected a real value"))
    }
}

fn definition(lineno: usize, text: &str) -> Result<(String, &str)> {
    let (n, e) = text.split_once('=').ok_or_else(|| Error::parse(lineno, "expected `name = expression`"))?;
    let n = n.trim();
    if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(Error::parse(lineno, format!("bad name `{n}`")));
    }
    Ok((n.to_string(), e))
}

fn assignments(lineno: usize, text: &str) -> Result<Vec<(String, Expr)>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (n, e) = definition(lineno, item.trim())?;
            Ok((n, Expr::parse(e).map_err(|err| Error::parse(lineno, err.to_string()))?))
        })
        .collect()
}

struct PolyDomain<'a> {
    model: &'a ExampleModel,
}

impl Domain for PolyDomain<'_> {
    type Value = PolyOnDual;

    fn constant(&self, q: &Rational) -> Result<PolyOnDual> {
        Ok(PolyOnDual::constant(self.model.m.dim(), gauss_real(q.clone())))
    }
    fn variable(&self, name: &str) -> Result<PolyOnDual> {
        let dim = self.model.m.dim();
        if let Some(i) = self.model.m.index_of(name) {
            return Ok(PolyOnDual::variable(dim, i));
        }
        if let Ok(p) = self.model.polynomial(name) {
            return Ok(p.clone());
        }
        self.model
            .param_exact(name)
            .map(|c| PolyOnDual::constant(dim, c))
            .ok_or_else(|| Error::eval(format!("unknown name `{name}`")))
    }
    fn add(&self, a: PolyOnDual, b: PolyOnDual) -> Result<PolyOnDual> {
        Ok(a.add(&b))
    }
    fn mul(&self, a: PolyOnDual, b: PolyOnDual) -> Result<PolyOnDual> {
        Ok(a.mul(&b))
    }
    fn neg(&self, a: PolyOnDual) -> Result<PolyOnDual> {
        Ok(a.neg())
    }
    fn div(&self, a: PolyOnDual, b: &Expr) -> Result<PolyOnDual> {
        let d = eval_exact(b, &|n| self.model.param_exact(n))?;
        if num_traits::Zero::is_zero(&d) {
            return Err(Error::eval("division by zero"));
        }
        Ok(a.scale(&(gauss_real(Rational::from_integer(1.into())) / d)))
    }
}

struct ElementDomain<'a> {
    model: &'a ExampleModel,
    rw: RefCell<PbwRewriter<'a>>,
}

impl Domain for ElementDomain<'_> {
    type Value = PbwElement;

    fn constant(&self, q: &Rational) -> Result<PbwElement> {
        Ok(PbwElement::scalar(self.model.m.dim(), gauss_real(q.clone())))
    }
    fn variable(&self, name: &str) -> Result<PbwElement> {
        let dim = self.model.m.dim();
        if let Some(i) = self.model.m.index_of(name) {
            return Ok(PbwElement::generator(dim, i));
        }
        if let Ok(w) = self.model.element(name) {
            return Ok(w.clone());
        }
        if let Some(c) = self.model.param_exact(name) {
            return Ok(PbwElement::scalar(dim, c));
        }
        if name == "i" {
            return Ok(PbwElement::scalar(dim, imag_unit()));
        }
        Err(Error::eval(format!("unknown name `{name}`")))
    }
    fn add(&self, a: PbwElement, b: PbwElement) -> Result<PbwElement> {
        Ok(a.add(&b))
    }
    fn mul(&self, a: PbwElement, b: PbwElement) -> Result<PbwElement> {
        Ok(self.rw.borrow_mut().multiply(&a, &b))
    }
    fn neg(&self, a: PbwElement) -> Result<PbwElement> {
        Ok(a.scale(&gauss_real(Rational::from_integer((-1).into()))))
    }
    fn div(&self, a: PbwElement, b: &Expr) -> Result<PbwElement> {
        let d = eval_exact(b, &|n| self.model.param_exact(n))?;
        if num_traits::Zero::is_zero(&d) {
            return Err(Error::eval("division by zero"));
        }
        Ok(a.scale(&(gauss_real(Rational::from_integer(1.into())) / d)))
    }
    fn call(&self, name: &str, args: Vec<PbwElement>, _raw: &[Expr]) -> Result<PbwElement> {
        let mut scalars = Vec::new();
        for a in &args {
            if a.degree() > 0 {
                return Err(Error::eval(format!("`{name}` needs scalar arguments")));
            }
            scalars.push(
                a.terms()
                    .map(|(_, c)| c.clone())
                    .next()
                    .unwrap_or_else(|| gauss_real(Rational::from_integer(0.into()))),
            );
        }
        Ok(PbwElement::scalar(self.model.m.dim(), exact_call(name, &scalars)?))
    }
}
