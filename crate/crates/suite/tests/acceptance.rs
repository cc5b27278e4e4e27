use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use liekit::enveloping::*;
use liekit::expr::exact_call;
use liekit::lie_core::check_jacobi;
use liekit::multiplier::*;
use liekit::orbit_examples::*;
use liekit::rep_ops::apply_rep;
use liekit::report::{Record, Status};
use liekit::scalar::{gauss_real, rat, rint, GaussianRational, Rational};

const EXAMPLE_MODELS: [&str; 3] = ["ex1", "ex2_b0", "ex2_b1"];

const JACOBI_BUDGET: f64 = 1.0;
const COADJOINT_BUDGET: f64 = 10.0;
const HOMOMORPHISM_BUDGET: f64 = 5.0;
const DUFLO_BUDGET: f64 = 10.0;
const PALEY_BUDGET: f64 = 60.0;
const MULTIPLIER_BUDGET: f64 = 60.0;
const TRIPLE_BUDGET: f64 = 30.0;

const TELESCOPE_TOL: f64 = 1e-12;
const PSI0_SLOPE: f64 = -1.9;
const SLOPE_TOL: f64 = 0.3;
const GEOMETRIC_SAMPLES: usize = 1000;
const Q_R0: f64 = 1.0;
const Q_COUNTER_R0: f64 = 1.5;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

fn load(name: &str) -> ExampleModel {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models").join(format!("{name}.model"));
    ExampleModel::from_file(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn all_pass(records: &[Record]) -> (bool, Vec<String>) {
    let bad: Vec<String> = records.iter().filter(|r| r.status == Status::Fail).map(|r| r.name.clone()).collect();
    (bad.is_empty(), bad)
}

fn jacobi() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in EXAMPLE_MODELS {
        let m = load(name);
        let v = check_jacobi(&m.algebra);
        ok &= v.is_empty();
        detail.push(format!("{name}: {} violations", v.len()));
    }
    let mut m = load("ex1");
    let l = &mut m.algebra;
    let (d, e1, e2, e5) =
        (l.index_of("d").unwrap(), l.index_of("e1").unwrap(), l.index_of("e2").unwrap(), l.index_of("e5").unwrap());
    let b = l.param("b").unwrap().clone();
    let mut v = vec![Rational::zero(); l.dim()];
    v[e5] = Rational::one();
    l.set_bracket(e1, e2, v);
    let mut want = vec![Rational::zero(); l.dim()];
    want[e5] = b - Rational::one();
    let violations = check_jacobi(l);
    let hit = violations.iter().find(|x| x.triple == (d, e1, e2));
    let caught = hit.is_some_and(|x| x.defect == want);
    ok &= caught;
    detail.push(format!(
        "mutated [e1,e2]=e5: defect on (d,e1,e2) = {}",
        hit.map_or("none".into(), |x| l.describe_vector(&x.defect))
    ));
    Outcome::new(ok, detail.join("; "))
}

fn coadjoint(cfg: &CheckConfig) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in EXAMPLE_MODELS {
        let r = check_coadjoint(&load(name), cfg).unwrap();
        ok &= r.status == Status::Pass;
        detail
            .push(format!("{name}: max error {:.2e}", r.measured.get("max_scaled_error").copied().unwrap_or(f64::NAN)));
    }
    Outcome::new(ok, detail.join("; "))
}

fn homomorphisms(cfg: &CheckConfig) -> Outcome {
    let mut records = Vec::new();
    for name in ["ex1", "ex2_b0"] {
        records.extend(check_homomorphisms(&load(name), cfg).unwrap());
    }
    let (ok, bad) = all_pass(&records);
    Outcome::new(ok && records.len() == 4, format!("{} tables, failing {:?}", records.len(), bad))
}

fn symmetrization() -> Outcome {
    let m = load("ex1");
    let beta = symmetrize(&m.m, m.polynomial("p1").unwrap());
    let w1 = m.element("W1").unwrap();
    let mut ok = &beta == w1;
    let mut detail = vec![format!("β(p1) = {}", beta.to_string_with(m.m.basis_names()))];

    let d = m.m.dim();
    let one = JetAtZero::one(d, 4);
    let mut rw = PbwRewriter::new(&m.m);
    let mut monomials = 0;
    let mut mismatched = 0;
    let mut stack = vec![Vec::<u32>::new()];
    while let Some(e) = stack.pop() {
        if e.len() == d {
            let p = PolyOnDual::monomial(d, e, GaussianRational::one());
            if eta_map(&m.m, &p, &one).unwrap() != symmetrize_with(&mut rw, &p) {
                mismatched += 1;
            }
            monomials += 1;
            continue;
        }
        let used: u32 = e.iter().sum();
        for k in 0..=(4 - used) {
            let mut next = e.clone();
            next.push(k);
            stack.push(next);
        }
    }
    ok &= mismatched == 0;
    detail.push(format!("η with j≡1 vs β on {monomials} monomials: {mismatched} differ"));

    for name in ["ex1", "ex2_b0", "heisenberg"] {
        let model = load(name);
        let n = model.algebra.subspace("n").unwrap().clone();
        let nil = model.algebra.restrict(&n).unwrap();
        let is_one = duflo_j_jet(&nil, 6).is_one();
        ok &= is_one;
        detail.push(format!("j on n of {name} to order 6 is 1: {is_one}"));
    }
    Outcome::new(ok, detail.join("; "))
}

fn duflo(cfg: &CheckConfig) -> Outcome {
    let mut records = Vec::new();
    for name in EXAMPLE_MODELS {
        records.extend(check_duflo_pairs(&load(name), cfg).unwrap());
    }
    let (mut ok, bad) = all_pass(&records);
    let mut detail = vec![format!("{} pair/table records, failing {:?}", records.len(), bad)];

    let m = load("ex2_b1");
    let spec = m.rep("pi_rs").unwrap();
    let (f0, a, b) = (rat(3, 4), rat(1, 2), rint(1));
    let mut worst = 0;
    for (r, s) in [(rat(1, 2), rat(-3, 2)), (rint(-1), rat(5, 4)), (rint(0), rint(0))] {
        let t = m.build_rep(spec, &[gauss_real(r.clone()), gauss_real(s.clone())]).unwrap();
        let got = apply_rep(&t, m.element("W1").unwrap()).unwrap().as_scalar();
        let e = exact_call("exp", &[gauss_real(-r.clone())]).unwrap();
        let lin = gauss_real(f0.clone() + a.clone() * r + b.clone() * s);
        let want = e * lin.clone() * lin;
        if got.as_ref() != Some(&want) {
            worst += 1;
        }
    }
    ok &= worst == 0;
    detail.push(format!("dπ_rs(W1) = e^(-r)(f0+ar+bs)^2 mismatches: {worst}"));
    Outcome::new(ok, detail.join("; "))
}

fn littlewood_paley(cfg: &CheckConfig) -> Outcome {
    let part = DyadicPartition::new(cfg.scales);
    let mut tele: f64 = 0.0;
    for k in 0..=4000 {
        let xi = 10f64.powf(-5.0 + 10.0 * k as f64 / 4000.0);
        tele = tele.max((part.partition_sum(xi) - part.telescoped(xi)).abs());
    }
    let mut ok = tele <= TELESCOPE_TOL;
    let mut detail = vec![format!("telescoping {tele:.1e}")];

    let psi0 = SymbolFunction::log_class("psi0", 0, 1.0, 1.0, 1);
    let axis = GridAxis::central(cfg.grid, cfg.extent).unwrap();
    let kern = kernel_from_symbol(&psi0, &part, axis).unwrap();
    let fit = fit_decay(&kern, 1.0, 64.0, 64, -PSI0_SLOPE).unwrap();
    let slope_ok = (fit.slope - PSI0_SLOPE).abs() <= SLOPE_TOL;
    ok &= slope_ok;
    detail.push(format!(
        "ψ0 slope {:.3} (want {PSI0_SLOPE} ± {SLOPE_TOL}), sup |k| z^{} = {:.3}",
        fit.slope, -PSI0_SLOPE, fit.constant
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut broken = 0;
    let mut first = None;
    let mut largest_m: f64 = 0.0;
    for _ in 0..GEOMETRIC_SAMPLES {
        let x = 10.0 * (1.0 - rng.random::<f64>());
        let m = 0.1 + 2.9 * (1.0 - rng.random::<f64>());
        if !geometric_series_check(x, m).holds() {
            broken += 1;
            first.get_or_insert((x, m));
            largest_m = largest_m.max(m);
        }
    }
    ok &= broken == 0;
    detail.push(format!(
        "geometric series bound fails on {broken}/{GEOMETRIC_SAMPLES} samples, first {first:?}, largest failing m {largest_m:.3}"
    ));
    Outcome::new(ok, detail.join("; "))
}

fn multipliers(cfg: &CheckConfig) -> Outcome {
    let mut records = Vec::new();
    for name in ["ex1", "ex2_b1"] {
        records.extend(check_multipliers(&load(name), cfg).unwrap());
    }
    let (ok, bad) = all_pass(&records);
    let worst = |key: &str| records.iter().filter_map(|r| r.measured.get(key)).fold(0.0f64, |m, v| m.max(*v));
    Outcome::new(
        ok,
        format!(
            "identity {:.1e}, backends {:.1e}, calculus {:.1e}, failing {:?}",
            worst("identity_error"),
            worst("backend_disagreement"),
            worst("relative_error"),
            bad
        ),
    )
}

fn triples(cfg: &CheckConfig) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in EXAMPLE_MODELS {
        let m = load(name);
        let mut records = check_orbit_points(&m, cfg).unwrap();
        records.extend(check_critical(&m, cfg).unwrap());
        records.extend(check_witnesses(&m, cfg).unwrap());
        records.push(check_closure_consistency(&m, cfg).unwrap());
        let unresolved = unresolved_records(&m, cfg).unwrap();
        let (pass, bad) = all_pass(&records);
        let open = unresolved.iter().filter(|r| r.status == Status::Unresolved).count();
        let want_open = usize::from(name == "ex2_b1");
        ok &= pass && open == want_open && unresolved.len() == want_open;
        detail.push(format!("{name}: {} records, failing {:?}, {open} unresolved", records.len(), bad));
    }
    Outcome::new(ok, detail.join("; "))
}

fn q_space() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut worst_drift: f64 = 0.0;
    for m in 0..=3 {
        for extent in [32.0, 64.0] {
            let axis = GridAxis::central((extent * 64.0) as usize, extent).unwrap();
            for (name, a) in battery(&[axis]) {
                let n = q_seminorm(&a, Q_R0, m);
                ok &= n.is_finite();
                if extent == 64.0 {
                    let small = GridAxis::central(2048, 32.0).unwrap();
                    let b = battery(&[small]).into_iter().find(|(k, _)| *k == name).unwrap().1;
                    let n_small = q_seminorm(&b, Q_R0, m);
                    worst_drift = worst_drift.max((n - n_small).abs() / n);
                }
            }
        }
    }
    ok &= worst_drift <= 1e-6;
    detail.push(format!("battery N_0..N_3 stable under doubling, drift {worst_drift:.1e}"));

    let mut norms = Vec::new();
    for k in 0..5 {
        let extent = 16.0 * 2f64.powi(k);
        let x = GridAxis::new(16, 4.0, AxisRole::X).unwrap();
        let z = GridAxis::central((extent * 8.0) as usize, extent).unwrap();
        let a = GridFunction::from_fn(vec![x, z], |p| {
            let t = p[0] / 3.0;
            let bump = if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 };
            C64::new(bump / (1.0 + p[1] * p[1]), 0.0)
        });
        norms.push(q_seminorm(&a, Q_COUNTER_R0, 0));
    }
    let grows = norms.windows(2).all(|w| w[1] > w[0] * 1.2);
    ok &= grows;
    detail.push(format!(
        "(1+z^2)^-1 N_0 across extents 16..256: {}",
        norms.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")
    ));
    Outcome::new(ok, detail.join("; "))
}

fn timed(budget: Option<f64>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration, bool) {
    let t = Instant::now();
    let o = f();
    let e = t.elapsed();
    let within = budget.is_none_or(|b| e.as_secs_f64() < b);
    (o, e, within)
}

fn main() -> ExitCode {
    let cfg = CheckConfig::default();
    let runs: Vec<(&str, Option<f64>, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("jacobi", Some(JACOBI_BUDGET), Box::new(jacobi)),
        ("coadjoint agreement", Some(COADJOINT_BUDGET), Box::new(|| coadjoint(&cfg))),
        ("homomorphisms", Some(HOMOMORPHISM_BUDGET), Box::new(|| homomorphisms(&cfg))),
        ("symmetrization anchor", None, Box::new(symmetrization)),
        ("duflo pairs", Some(DUFLO_BUDGET), Box::new(|| duflo(&cfg))),
        ("littlewood-paley", Some(PALEY_BUDGET), Box::new(|| littlewood_paley(&cfg))),
        ("multiplier identity", Some(MULTIPLIER_BUDGET), Box::new(|| multipliers(&cfg))),
        ("separating triples", Some(TRIPLE_BUDGET), Box::new(|| triples(&cfg))),
        ("q-space", None, Box::new(q_space)),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in runs.into_iter().enumerate() {
        let (o, elapsed, within) = timed(budget, f);
        let pass = o.ok && within;
        failed += usize::from(!pass);
        let limit = budget.map_or(String::new(), |b| format!(" / {b:.0}s"));
        println!(
            "criterion {}: {} {name} [{:.2}s{limit}] {}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
