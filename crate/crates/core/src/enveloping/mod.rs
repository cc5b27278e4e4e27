//! Enveloping algebra in PBW normal form, symmetrization, and the Duflo factor.

mod jet;
mod pbw;
mod poly;

pub use jet::{duflo_j_jet, log_series_coefficients, JetAtZero};
pub use pbw::{pbw_normalize, uea_multiply, PbwElement, PbwRewriter};
pub use poly::PolyOnDual;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lie_core::LieAlgebra;
use crate::scalar::{gauss_real, imag_unit, rint, GaussianRational};

/// Symmetrization with each dual variable `y_ν` read as `i·e_ν`.
pub fn symmetrize(algebra: &LieAlgebra, p: &PolyOnDual) -> PbwElement {
    let mut rw = PbwRewriter::new(algebra);
    symmetrize_with(&mut rw, p)
}

pub fn symmetrize_with(rw: &mut PbwRewriter<'_>, p: &PolyOnDual) -> PbwElement {
    let dim = rw.algebra().dim();
    let mut out = PbwElement::zero(dim);
    for (e, c) in p.terms() {
        let mut word: Vec<usize> =
            e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
        let r = word.len();
        let mut perms = Vec::new();
        loop {
            perms.push(word.clone());
            if !next_permutation(&mut word) {
                break;
            }
        }
        let weight = c * i_power(r) / gauss_real(rint(perms.len() as i64));
        for w in &perms {
            let term = rw.normalize_word(w, weight.clone());
            out.add_assign_scaled(&term, &GaussianRational::one());
        }
    }
    out
}

fn i_power(r: usize) -> GaussianRational {
    match r % 4 {
        0 => GaussianRational::one(),
        1 => imag_unit(),
        2 => -GaussianRational::one(),
        _ => -imag_unit(),
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `q = Σ_α j_α · i^{|α|} · ∂^α p`, the polynomial whose symmetrization is `η(p)`.
pub fn eta_polynomial(p: &PolyOnDual, j: &JetAtZero) -> Result<PolyOnDual> {
    let need = p.degree();
    if j.order() < need {
        return Err(Error::JetOrder { have: j.order(), need });
    }
    let mut q = PolyOnDual::zero(p.dim());
    for (alpha, c) in j.coefficients() {
        let k = alpha.iter().sum::<u32>() as usize;
        if k > need || c.is_zero() {
            continue;
        }
        let d = p.derivative(alpha);
        q = q.add(&d.scale(&(gauss_real(c.clone()) * i_power(k))));
    }
    Ok(q)
}

/// `β` for the trivial jet, the Duflo map for the Duflo jet.
pub fn eta_map(algebra: &LieAlgebra, p: &PolyOnDual, j: &JetAtZero) -> Result<PbwElement> {
    Ok(symmetrize(algebra, &eta_polynomial(p, j)?))
}

/// Degree-1 element `Σ c_ν e_ν` of the enveloping algebra for a real vector.
pub fn pbw_from_rational(v: &[crate::scalar::Rational]) -> PbwElement {
    let g: Vec<GaussianRational> = v.iter().map(|c| gauss_real(c.clone())).collect();
    PbwElement::from_vector(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::parse_algebra;
    use crate::scalar::{gauss, rat};

    fn ex1() -> LieAlgebra {
        parse_algebra(
            "basis d e0 e1 e2 e3 e4 e5 e6\n\
             bracket [e1,e2] = e4\nbracket [e1,e3] = e5\n\
             bracket [e0,e1] = -e1\nbracket [e0,e2] = e2\nbracket [e0,e3] = e3\n\
             bracket [d,e0] = -1/2*e6\nbracket [d,e2] = e2\nbracket [d,e3] = 2*e3\n\
             bracket [d,e4] = e4\nbracket [d,e5] = 2*e5\n",
        )
        .unwrap()
    }

    fn y(dim: usize, i: usize) -> PolyOnDual {
        PolyOnDual::variable(dim, i)
    }

    #[test]
    fn degree_one_picks_up_i() {
        let g = ex1();
        let b = symmetrize(&g, &y(8, 3));
        assert_eq!(b, PbwElement::generator(8, 3).scale(&imag_unit()));
    }

    #[test]
    fn p1_symmetrizes_to_w1() {
        let g = ex1();
        let (e0, e1, e2, e4) = (1, 2, 3, 5);
        let p1 = y(8, e0).mul(&y(8, e4)).add(&y(8, e1).mul(&y(8, e2)).neg());
        let half = gauss_real(rat(1, 2));
        let w1 = pbw_normalize(&g, &[e1, e2], half.clone())
            .add(&pbw_normalize(&g, &[e2, e1], half))
            .sub(&pbw_normalize(&g, &[e0, e4], GaussianRational::one()));
        assert_eq!(symmetrize(&g, &p1), w1);
    }

    #[test]
    fn plain_heisenberg_product() {
        let h = parse_algebra("basis e1 e2 e3\nbracket [e1,e2] = e3\n").unwrap();
        // i^2 = -1 so negate to undo the identification
        let s = symmetrize(&h, &y(3, 0).mul(&y(3, 1))).scale(&-GaussianRational::one());
        let mut want = PbwElement::zero(3);
        want.add_term(vec![1, 1, 0], GaussianRational::one());
        want.add_term(vec![0, 0, 1], gauss_real(rat(-1, 2)));
        assert_eq!(s, want);
    }

    #[test]
    fn trivial_jet_gives_symmetrization() {
        let g = ex1();
        let p = y(8, 1).mul(&y(8, 2)).mul(&y(8, 2)).add(&y(8, 5));
        let j = JetAtZero::one(8, 3);
        assert_eq!(eta_map(&g, &p, &j).unwrap(), symmetrize(&g, &p));
    }

    #[test]
    fn jet_order_too_small() {
        let g = ex1();
        let p = y(8, 1).mul(&y(8, 2));
        let j = duflo_j_jet(&g, 1);
        assert!(matches!(eta_map(&g, &p, &j), Err(Error::JetOrder { have: 1, need: 2 })));
    }

    #[test]
    fn degree_one_on_unimodular_algebra() {
        let sl2 = parse_algebra("basis h x y\nbracket [h,x] = 2*x\nbracket [h,y] = -2*y\nbracket [x,y] = h\n").unwrap();
        let j = duflo_j_jet(&sl2, 2);
        assert!(!j.is_one());
        for i in 0..3 {
            assert_eq!(eta_map(&sl2, &y(3, i), &j).unwrap(), symmetrize(&sl2, &y(3, i)));
        }
    }

    #[test]
    fn degree_one_shift_on_non_unimodular_algebra() {
        let g = ex1();
        let j = duflo_j_jet(&g, 1);
        let got = eta_map(&g, &y(8, 1), &j).unwrap();
        // i·e0 + i·(-1/4)
        let want = symmetrize(&g, &y(8, 1)).add(&PbwElement::scalar(8, gauss(rat(0, 1), rat(-1, 4))));
        assert_eq!(got, want);
    }

    #[test]
    fn permutations_of_multiset() {
        let mut w = vec![0, 0, 1];
        let mut n = 1;
        while next_permutation(&mut w) {
            n += 1;
        }
        assert_eq!(n, 3);
    }
}
