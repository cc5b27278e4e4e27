use liekit::orbit_examples::*;
use liekit::scalar::{rat, rint, Rational};

fn load(name: &str) -> ExampleModel {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(format!("{name}.model"));
    ExampleModel::from_file(&path).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn identity_parameters_give_f() {
    let m = load("ex1");
    let h = closed_form_orbit(&m, &[0.0; 5]).unwrap();
    assert!(close(&h, &[0.75, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 0.0));
    let g = coadjoint_orbit(&m, &[0.0; 5]).unwrap();
    assert!(close(&g, &h, 1e-15));
}

#[test]
fn ex1_s_one_scales_central_components() {
    let m = load("ex1");
    let h = closed_form_orbit(&m, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!((h[4] - (-1f64).exp()).abs() < 1e-15);
    assert!((h[5] - (-2f64).exp()).abs() < 1e-15);
    let g = coadjoint_orbit(&m, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(close(&g, &h, 1e-12));
}

#[test]
fn ex2_e2_component() {
    let m = load("ex2_b0");
    // r s t v w x
    let h = closed_form_orbit(&m, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(h[2], 0.5);
    let g = coadjoint_orbit(&m, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!((g[2] - 0.5).abs() < 1e-12);
}

#[test]
fn normalize_ex1_moves_along_e2() {
    let m = load("ex1");
    let raw = [0.5, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let f = orbit_representative_normalize(&m, &raw).unwrap();
    assert_eq!(f[1], 0.0);
    let expect = liekit::lie_core::coadjoint(
        &m.algebra,
        &liekit::FloatWord::new(vec![(m.m_indices[2], -2.0)]),
        &liekit::FloatFunctional::new({
            let mut v = vec![0.0; m.algebra.dim()];
            for (k, &i) in m.m_indices.iter().enumerate() {
                v[i] = raw[k];
            }
            v
        }),
    )
    .unwrap();
    let back: Vec<f64> = m.m_indices.iter().map(|&i| expect.coeffs[i]).collect();
    assert!(close(&f, &back, 1e-12));
}

#[test]
fn normalize_keeps_normalized_input() {
    let m = load("ex1");
    let f = [0.75, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    assert!(close(&orbit_representative_normalize(&m, &f).unwrap(), &f, 1e-14));
}

#[test]
fn normalize_ex2_moves_along_e1() {
    let m = load("ex2_b0");
    let f = orbit_representative_normalize(&m, &[0.75, 0.0, 0.0, 3.0, 1.0, 1.0, 1.0]).unwrap();
    assert_eq!(f[3], 0.0);
    let g = coadjoint_orbit(&m, &[0.0, 0.0, 0.0, 3.0, 0.0, 0.0]).unwrap();
    assert!((g[3] + 3.0).abs() < 1e-12);
}

#[test]
fn normalize_reports_a_vanishing_component() {
    let m = load("ex1");
    let err = orbit_representative_normalize(&m, &[0.0, 2.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap_err();
    assert!(matches!(err, liekit::Error::VanishingComponent(_)));
}

#[test]
fn orbit_points_have_no_gap() {
    let m = load("ex1");
    let h = closed_form_orbit(&m, &[0.3, -1.0, 0.5, 1.5, -0.25]).unwrap();
    for v in separating_values(&m, &h).unwrap() {
        assert!(v.gap <= 1e-8 * (1.0 + v.p.abs()), "{v:?}");
        assert!(v.admissible);
    }
}

#[test]
fn ex1_critical_point_is_separated_by_p1() {
    let m = load("ex1");
    let h = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let v = separating_values(&m, &h).unwrap();
    assert_eq!(v[0].p, -1.0);
    assert_eq!(v[0].psi, 0.0);
    assert_eq!(v[0].gap, 1.0);
    let c = closure_member(&m, &h).unwrap();
    assert!(!c.member);
}

#[test]
fn ex2_nonadmissible_point_is_flagged() {
    let m = load("ex2_b1");
    let h = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let v = separating_values(&m, &h).unwrap();
    assert!(v.iter().all(|s| !s.admissible));
    assert!(v.iter().all(|s| s.label.contains("t/")));
}

#[test]
fn f_is_a_member() {
    for name in ["ex1", "ex2_b0", "ex2_b1"] {
        let m = load(name);
        let f = to_f64(&m.f);
        let c = closure_member(&m, &f).unwrap();
        assert!(c.member, "{name}");
        assert_eq!(c.certificate, Certificate::Witness("open".into()));
    }
}

#[test]
fn ex1_zero_branch_witness() {
    let m = load("ex1");
    let h: Vec<Rational> = vec![rat(-5, 4), rint(0), rint(0), rint(0), rint(0), rint(0), rint(1)];
    let c = closure_member(&m, &to_f64(&h)).unwrap();
    assert!(c.member);
    let run = witness_sequence(&m, &h, 50).unwrap();
    assert_eq!(run.branch, "zero");
    assert!(run.final_error() <= 1e-6);
    let w = &run.steps[10];
    let (s, v, ww) = (w.params[0], w.params[2], w.params[3]);
    assert!((v - (s / 2.0).exp()).abs() <= 1e-9 * v.abs().max(1.0), "{w:?}");
    assert!((ww - (-s / 2.0).exp() * (0.75 + 0.5 * s + 1.25)).abs() <= 1e-9, "{w:?}");
}

#[test]
fn ex2_nonmember_needs_h3_zero() {
    let m = load("ex2_b1");
    let c = closure_member(&m, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(!c.member);
}

#[test]
fn ex1_h1_branch_schedule() {
    let m = load("ex1");
    let h: Vec<Rational> = vec![rint(1), rint(3), rint(0), rint(0), rint(0), rint(0), rint(1)];
    let run = witness_sequence(&m, &h, 50).unwrap();
    assert_eq!(run.branch, "h1");
    let step = &run.steps[7];
    // s t v w x, with s = n·max(1, 1/b)
    assert_eq!(step.params[0], 7.0);
    assert_eq!(step.params[3], 3.0);
    assert!((step.params[2] - (0.75 + 0.5 * 7.0 - 1.0) / 3.0).abs() < 1e-12);
    let errors: Vec<f64> = run.steps.iter().map(|s| s.error).collect();
    assert!(errors[50] <= 1e-6);
    assert!(errors[50] < errors[5]);
}

#[test]
fn ex2_h2_branch_converges() {
    let m = load("ex2_b0");
    let h: Vec<Rational> = vec![rint(2), rint(0), rat(3, 2), rint(0), rint(0), rint(1), rint(1)];
    let run = witness_sequence(&m, &h, 50).unwrap();
    assert_eq!(run.branch, "h2");
    let step = &run.steps[4];
    assert!((step.params[3] - (3f64).sqrt() * 2f64.exp()).abs() < 1e-9);
    assert!(run.final_error() <= 1e-6);
}

#[test]
fn constant_sequence_at_f() {
    let m = load("ex1");
    let run = witness_sequence(&m, &m.f, 0).unwrap();
    assert_eq!(run.steps[0].error, 0.0);
}

#[test]
fn heisenberg_triple_passes() {
    let m = load("heisenberg");
    let cfg = CheckConfig { samples: 10, ..CheckConfig::default() };
    let r = triple_check(&m, &cfg).unwrap();
    assert!(r.passed(), "{}", r.summary());
}
