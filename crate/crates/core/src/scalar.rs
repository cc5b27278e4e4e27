//! Scalar fields used across the crate.
//!
//! Exact work happens over [`Rational`] and [`GaussianRational`]; group
//! actions and grid numerics run over `f64` (or `f32`).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type GaussianRational = Complex<BigRational>;

/// A field usable by the generic linear algebra in [`crate::linalg`].
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &Rational) -> Self;

    /// Exact zero test for exact fields, tolerance test for floats.
    fn is_negligible(&self) -> bool;

    /// Size used for pivot selection.
    fn magnitude(&self) -> f64;
}

impl Field for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Field for GaussianRational {
    fn from_rational(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::zero())
    }
    fn is_negligible(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
}

const FLOAT_PIVOT_EPS: f64 = 1e-12;

impl Field for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_negligible(&self) -> bool {
        self.abs() < FLOAT_PIVOT_EPS
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Field for f32 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
    fn is_negligible(&self) -> bool {
        (self.abs() as f64) < 1e-6
    }
    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
}

impl Field for Complex<f64> {
    fn from_rational(q: &Rational) -> Self {
        Complex::new(f64::from_rational(q), 0.0)
    }
    fn is_negligible(&self) -> bool {
        self.norm() < FLOAT_PIVOT_EPS
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    Complex::new(re, im)
}

pub fn gauss_real(re: Rational) -> GaussianRational {
    Complex::new(re, Rational::zero())
}

pub fn imag_unit() -> GaussianRational {
    Complex::new(Rational::zero(), Rational::one())
}

/// Exact dyadic rational equal to the given finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn gaussian_to_c64(z: &GaussianRational) -> Complex<f64> {
    Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// Parses `7`, `-3/4`, `0.125` or `1e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = frac_part.len() as i32 + 1 - exponent;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(digits);
    if scale >= 0 {
        q /= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q *= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -q } else { q })
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn fmt_gaussian(z: &GaussianRational) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => fmt_rational(&z.re),
        (true, false) => format!("{}i", fmt_rational(&z.im)),
        (false, false) => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("({}{}{}i)", fmt_rational(&z.re), sign, fmt_rational(&z.im.abs()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rational("-2"), Some(rint(-2)));
        assert_eq!(parse_rational("0.125"), Some(rat(1, 8)));
        assert_eq!(parse_rational("1e-3"), Some(rat(1, 1000)));
        assert_eq!(parse_rational("2.5E2"), Some(rint(250)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn gaussian_division_is_exact() {
        let a = gauss(rint(1), rint(2));
        let b = gauss(rint(3), rint(-1));
        let q = a.clone() / b.clone();
        assert_eq!(q * b, a);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_gaussian(&gauss(rat(1, 2), rint(-1))), "(1/2-1i)");
        assert_eq!(fmt_gaussian(&imag_unit()), "1i");
    }
}
