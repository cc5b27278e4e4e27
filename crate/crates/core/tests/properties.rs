use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;

use liekit::enveloping::*;
use liekit::lie_core::*;
use liekit::linalg::Matrix;
use liekit::multiplier::*;
use liekit::orbit_examples::*;
use liekit::rep_ops::*;
use liekit::scalar::{gauss, gauss_real, rat, rint, GaussianRational, Rational};
use liekit::{FloatElement, FloatFunctional, FloatWord};

fn load(name: &str) -> ExampleModel {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(format!("{name}.model"));
    ExampleModel::from_file(&path).unwrap()
}

fn dyadic() -> impl Strategy<Value = f64> {
    (-128i32..=128).prop_map(|k| k as f64 / 64.0)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn small_gaussian() -> impl Strategy<Value = GaussianRational> {
    (small_rational(), small_rational()).prop_map(|(a, b)| gauss(a, b))
}

fn pbw(dim: usize, max_degree: u32) -> impl Strategy<Value = PbwElement> {
    prop::collection::vec((prop::collection::vec(0..=max_degree, dim), small_gaussian()), 1..3).prop_map(move |terms| {
        let mut u = PbwElement::zero(dim);
        for (mut e, c) in terms {
            while e.iter().sum::<u32>() > max_degree {
                let k = e.iter().position(|&x| x > 0).unwrap();
                e[k] -= 1;
            }
            u.add_term(e, c);
        }
        u
    })
}

fn operator() -> impl Strategy<Value = ExpPolyOperator> {
    prop::collection::vec((small_gaussian(), 0u32..3, -2i64..=2, 0u32..3), 1..4).prop_map(|terms| {
        let mut op = ExpPolyOperator::zero();
        for (c, p, r, o) in terms {
            op = op.add(&ExpPolyOperator::term(c, p, rat(r, 2), o));
        }
        op
    })
}

fn max_entry_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.rows() {
        for (x, y) in a.row(i).iter().zip(b.row(i)) {
            m = m.max((x - y).abs());
        }
    }
    m
}

#[test]
fn loaded_algebras_satisfy_jacobi() {
    for name in ["ex1", "ex2_b0", "ex2_b1", "heisenberg"] {
        let m = load(name);
        assert!(check_jacobi(&m.algebra).is_empty(), "{name}");
        assert!(check_jacobi(&m.m).is_empty(), "{name}");
    }
}

#[test]
fn commutator_is_the_bracket() {
    for name in ["ex1", "ex2_b1"] {
        let l = load(name).m;
        let d = l.dim();
        for i in 0..d {
            for j in 0..d {
                let x = PbwElement::generator(d, i);
                let y = PbwElement::generator(d, j);
                let lhs = uea_multiply(&l, &x, &y).sub(&uea_multiply(&l, &y, &x));
                assert_eq!(lhs, pbw_from_rational(l.bracket_basis(i, j)), "{name} {i} {j}");
            }
        }
    }
}

#[test]
fn trivial_jet_matches_symmetrize_up_to_degree_four() {
    let l = load("ex1").m;
    let d = l.dim();
    let one = JetAtZero::one(d, 4);
    let mut rw = PbwRewriter::new(&l);
    let mut count = 0;
    for total in 0..=4u32 {
        for e in compositions(total, d) {
            let p = PolyOnDual::monomial(d, e, GaussianRational::one());
            assert_eq!(eta_map(&l, &p, &one).unwrap(), symmetrize_with(&mut rw, &p));
            count += 1;
        }
    }
    assert_eq!(count, 330);
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn duflo_jet_constant_term() {
    for name in ["ex1", "ex2_b0", "ex2_b1", "heisenberg"] {
        let m = load(name);
        for l in [&m.algebra, &m.m] {
            let j = duflo_j_jet(l, 3);
            assert!(j.coefficient(&vec![0; l.dim()]).is_one(), "{name}");
        }
    }
}

#[test]
fn duflo_jet_is_one_on_nilpotent_algebras() {
    for name in ["ex1", "ex2_b1", "heisenberg"] {
        let m = load(name);
        let n = m.algebra.subspace("n").unwrap().clone();
        let l = m.algebra.restrict(&n).unwrap();
        assert!(duflo_j_jet(&l, 6).is_one(), "{name}");
    }
}

#[test]
fn symmetrize_on_abelian_algebra_is_scaled_identity() {
    let l = LieAlgebra::abelian(3);
    for e in compositions(3, 3) {
        let p = PolyOnDual::monomial(3, e.clone(), gauss_real(rint(2)));
        let mut want = PbwElement::zero(3);
        want.add_term(e, gauss(rint(0), rint(-2)));
        assert_eq!(symmetrize(&l, &p), want);
    }
}

#[test]
fn homomorphism_tables_of_both_examples() {
    for name in ["ex1", "ex2_b0", "ex2_b1"] {
        let m = load(name);
        for spec in &m.reps {
            let k = match &spec.binding {
                RepBinding::Orbit(v) => v.len(),
                RepBinding::Functional { vars, .. } => vars.len(),
            };
            let vals: Vec<GaussianRational> = (0..k).map(|i| gauss_real(rat(i as i64 + 1, 3))).collect();
            let t = m.build_rep(spec, &vals).unwrap();
            assert!(verify_homomorphism(&m.m, &t).is_empty(), "{name} {}", spec.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ad_exp_inverse(x in prop::collection::vec(dyadic(), 8)) {
        let l = load("ex1").algebra;
        let a = ad_exp(&l, &FloatElement { coeffs: x.clone() }).unwrap();
        let b = ad_exp(&l, &FloatElement { coeffs: x.iter().map(|v| -v).collect() }).unwrap();
        prop_assert!(max_entry_diff(&a.mul(&b), &Matrix::identity(8)) <= 1e-12);
    }

    #[test]
    fn coadjoint_is_an_action(
        w1 in prop::collection::vec((0usize..9, dyadic()), 0..=3),
        w2 in prop::collection::vec((0usize..9, dyadic()), 0..=3),
        f in prop::collection::vec(dyadic(), 9),
    ) {
        let l = load("ex2_b1").algebra;
        let f = FloatFunctional::new(f);
        let (a, b) = (FloatWord::new(w1), FloatWord::new(w2));
        let lhs = coadjoint(&l, &a.clone().concat(b.clone()), &f).unwrap();
        let rhs = coadjoint(&l, &a, &coadjoint(&l, &b, &f).unwrap()).unwrap();
        let scale = lhs.coeffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn stabilizer_contains_center(f in prop::collection::vec(small_rational(), 8)) {
        let l = load("ex1").algebra;
        let s = stabilizer(&l, &Functional::new(f));
        for v in &center(&l).vectors {
            prop_assert!(s.contains(v));
        }
    }

    #[test]
    fn closed_form_matches_coadjoint(params in prop::collection::vec(dyadic(), 6), which in 0usize..3) {
        let m = load(["ex1", "ex2_b0", "ex2_b1"][which]);
        let k = m.orbit.params.len();
        let a = closed_form_orbit(&m, &params[..k]).unwrap();
        let b = coadjoint_orbit(&m, &params[..k]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{a:?} {b:?}");
        }
    }

    #[test]
    fn omega_sparsity_ex1(params in prop::collection::vec(dyadic(), 5)) {
        let m = load("ex1");
        let h = closed_form_orbit(&m, &params).unwrap();
        prop_assert!(m.in_omega(&h));
        let p3 = h[2] * h[5] - h[3] * h[4];
        prop_assert!(p3.abs() <= 1e-9 * (1.0 + h[2].abs() + h[3].abs()));
        prop_assert!(h[4] > 0.0 && h[5] > 0.0);
        prop_assert!((h[5].ln() - 2.0 * h[4].ln()).abs() <= 1e-12);
    }

    #[test]
    fn telescoping(xi in 1e-5f64..1e5, scales in 1i32..12) {
        let p = DyadicPartition::new(scales);
        prop_assert!((p.partition_sum(xi) - p.telescoped(xi)).abs() <= 1e-12);
    }

    #[test]
    fn symmetrize_is_linear_and_keeps_degree(p in pbw(7, 3), q in pbw(7, 3), s in small_gaussian()) {
        let l = load("ex1").m;
        let to_poly = |u: &PbwElement| {
            let mut out = PolyOnDual::zero(7);
            for (e, c) in u.terms() {
                out.add_term(e.clone(), c.clone());
            }
            out
        };
        let (pp, qq) = (to_poly(&p), to_poly(&q));
        let lhs = symmetrize(&l, &pp.scale(&s).add(&qq));
        let rhs = symmetrize(&l, &pp).scale(&s).add(&symmetrize(&l, &qq));
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(symmetrize(&l, &pp).degree(), pp.degree());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn uea_multiply_associates(u in pbw(7, 3), v in pbw(7, 3), w in pbw(7, 3)) {
        let l = load("ex1").m;
        let mut rw = PbwRewriter::new(&l);
        let uv = rw.multiply(&u, &v);
        let vw = rw.multiply(&v, &w);
        let left = rw.multiply(&uv, &w);
        let right = rw.multiply(&u, &vw);
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn operator_composition_associates(a in operator(), b in operator(), c in operator()) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn apply_rep_is_functorial(u in pbw(7, 2), v in pbw(7, 2), s in small_rational(), g in small_rational()) {
        let m = load("ex1");
        for spec in &m.reps {
            let vals: Vec<GaussianRational> = match &spec.binding {
                RepBinding::Orbit(_) => vec![gauss_real(s.clone())],
                RepBinding::Functional { vars, .. } => vars.iter().map(|_| gauss_real(g.clone())).collect(),
            };
            let t = m.build_rep(spec, &vals).unwrap();
            let uv = uea_multiply(&m.m, &u, &v);
            let lhs = apply_rep(&t, &uv).unwrap();
            let rhs = apply_rep(&t, &u).unwrap().compose(&apply_rep(&t, &v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn duflo_residuals_vanish(s in small_rational()) {
        let m = load("ex1");
        let spec = m.rep("pi_s").unwrap();
        let t = m.build_rep(spec, &[gauss_real(s.clone())]).unwrap();
        let h: Vec<GaussianRational> = m.rep_point(spec, &[s]).unwrap().into_iter().map(gauss_real).collect();
        for pair in &m.pairs {
            let r = duflo_pair_residual(&t, m.element(&pair.element).unwrap(), m.polynomial(&pair.polynomial).unwrap(), &h).unwrap();
            prop_assert!(r.residual.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn geometric_series_for_m_at_least_one(x in 1e-3f64..=10.0, m in 1.0f64..=3.0) {
        prop_assert!(geometric_series_check(x, m).holds());
    }
}

#[test]
fn multiplier_algebra_property() {
    let params: BTreeMap<String, f64> = [("f0".to_string(), 0.75), ("a".to_string(), 0.5)].into();
    let p1 = SymbolFunction::parse("p", "xi*(f0 - a*log|xi|)", &["xi"], &params).unwrap();
    let p2 = SymbolFunction::parse("q", "xi", &["xi"], &params).unwrap();
    let prod = SymbolFunction::product(&p1, &p2).unwrap();
    let axis = GridAxis::central(4096, 64.0).unwrap();
    let part = DyadicPartition::new(10);
    for (name, a) in battery(&[axis]) {
        let one = apply_multiplier(&prod, &a, &[0], &part, Backend::Fourier).unwrap();
        let inner = apply_multiplier(&p2, &a, &[0], &part, Backend::Fourier).unwrap();
        let two = apply_multiplier(&p1, &inner, &[0], &part, Backend::Fourier).unwrap();
        assert!(one.max_abs_diff(&two) <= 1e-6 * one.sup_norm(), "{name}");
    }
}

#[test]
fn gaussian_battery_is_in_q() {
    let axis = GridAxis::central(4096, 64.0).unwrap();
    for (name, a) in battery(&[axis]) {
        for m in 0..=3 {
            let n = q_seminorm(&a, 1.0, m);
            assert!(n.is_finite() && n > 0.0, "{name} {m}");
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let m = load("ex1");
    let cfg = CheckConfig { samples: 10, ..CheckConfig::default() };
    let a = triple_check(&m, &cfg).unwrap().to_json();
    let b = triple_check(&m, &cfg).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn fail_records_name_their_anchor() {
    let mut m = load("ex1");
    let e1 = m.algebra.index_of("e1").unwrap();
    let e2 = m.algebra.index_of("e2").unwrap();
    let e5 = m.algebra.index_of("e5").unwrap();
    let mut v = vec![Rational::zero(); m.algebra.dim()];
    v[e5] = rint(1);
    m.algebra.set_bracket(e1, e2, v);
    let r = check_jacobi_record(&m);
    assert_eq!(r.status, liekit::report::Status::Fail);
    assert!(!r.anchor.is_empty());
}
