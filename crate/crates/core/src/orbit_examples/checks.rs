use num_traits::Zero;
use rayon::prelude::*;

use super::model::{ExampleModel, RepBinding, RepSpec};
use super::ops::*;
use crate::error::Result;
use crate::lie_core::{check_jacobi, stabilizer, sum_dim, Functional};
use crate::multiplier::{
    apply_multiplier, central_derivative, multiply_by_symbol, Backend, DyadicPartition, GridAxis, SymbolFunction, C64,
};
use crate::rep_ops::{duflo_pair_residual, verify_homomorphism, RepTable};
use crate::report::{Record, Report, Status};
use crate::scalar::{gauss_real, GaussianRational, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
    /// Points on a one-variable multiplier axis.
    pub grid: usize,
    pub extent: f64,
    pub scales: i32,
    pub tol_multiplier: f64,
    pub witness_steps: u32,
    pub witness_samples: usize,
    /// Half-width of each axis for symbols in several variables.
    pub multivar_extent: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            samples: 100,
            seed: 0,
            grid: 16384,
            extent: 256.0,
            scales: 10,
            tol_multiplier: 1e-6,
            witness_steps: 50,
            witness_samples: 4,
            multivar_extent: 16.0,
        }
    }
}

pub const COADJOINT_TOL: f64 = 1e-9;
pub const WITNESS_TOL: f64 = 1e-6;
pub const CRITICAL_RATIO: f64 = 0.1;
pub const BACKEND_TOL: f64 = 1e-5;
pub const CALCULUS_TOL: f64 = 1e-4;
pub const CALCULUS_WINDOW: f64 = 8.0;

pub fn check_jacobi_record(model: &ExampleModel) -> Record {
    let v = check_jacobi(&model.algebra);
    let mut r =
        Record::new("jacobi", "structure constants satisfy the Jacobi identity", Status::from_bool(v.is_empty()))
            .measure("violations", v.len() as f64);
    if let Some(first) = v.first() {
        r = r.note(format!("{first:?}"));
    }
    r
}

pub fn check_stabilizer(model: &ExampleModel) -> Record {
    let f = Functional { coeffs: model.f.clone() };
    let stab = stabilizer(&model.m, &f);
    let rank = sum_dim(&stab, &model.n);
    let general = model.general_position.iter().all(|&i| !model.f[i].is_zero());
    Record::new(
        "stabilizer",
        "m = m_f + n and f is nonzero on the declared one-dimensional ideals",
        Status::from_bool(rank == model.m.dim() && general),
    )
    .measure("rank_mf_plus_n", rank as f64)
    .measure("dim_m", model.m.dim() as f64)
    .measure("dim_mf", stab.dim() as f64)
}

pub fn check_coadjoint(model: &ExampleModel, cfg: &CheckConfig) -> Result<Record> {
    let mut sampler = Sampler::new(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let params = to_f64(&sampler.dyadics(model.orbit.params.len()));
        let a = closed_form_orbit(model, &params)?;
        let b = coadjoint_orbit(model, &params)?;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs() / 1f64.max(y.abs()));
        }
    }
    Ok(Record::new(
        "coadjoint_closed_form",
        "closed-form orbit components equal the matrix-exponential coadjoint action",
        Status::from_bool(worst <= COADJOINT_TOL),
    )
    .measure("max_scaled_error", worst)
    .measure("samples", cfg.samples as f64)
    .tolerance("max_scaled_error", COADJOINT_TOL))
}

fn binding_vars(spec: &RepSpec) -> usize {
    match &spec.binding {
        RepBinding::Orbit(v) => v.len(),
        RepBinding::Functional { vars, .. } => vars.len(),
    }
}

fn bound_table(model: &ExampleModel, spec: &RepSpec, values: &[Rational]) -> Result<RepTable> {
    let g: Vec<GaussianRational> = values.iter().cloned().map(gauss_real).collect();
    model.build_rep(spec, &g)
}

pub fn check_homomorphisms(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut sampler = Sampler::new(cfg.seed ^ 0x686f6d);
    for spec in &model.reps {
        let mut violations = 0;
        let mut note = String::new();
        let trials = cfg.samples.clamp(1, 5);
        for _ in 0..trials {
            let values = sampler.dyadics(binding_vars(spec));
            let t = bound_table(model, spec, &values)?;
            let v = verify_homomorphism(&model.m, &t);
            if let Some(first) = v.first() {
                note = format!("{first:?}");
            }
            violations += v.len();
        }
        out.push(
            Record::new(
                format!("homomorphism/{}", spec.name),
                "the table respects every bracket of m exactly",
                Status::from_bool(violations == 0),
            )
            .measure("violations", violations as f64)
            .measure("bindings", trials as f64)
            .note(note),
        );
    }
    Ok(out)
}

pub fn check_duflo_pairs(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (k, pair) in model.pairs.iter().enumerate() {
        let w = model.element(&pair.element)?;
        let p = model.polynomial(&pair.polynomial)?;
        for table in &pair.tables {
            let spec = model.rep(table)?;
            let mut sampler = Sampler::new(cfg.seed.wrapping_add(k as u64));
            let mut worst: f64 = 0.0;
            let mut nonscalar = 0;
            for _ in 0..cfg.samples {
                let values = sampler.dyadics(binding_vars(spec));
                let t = bound_table(model, spec, &values)?;
                let h: Vec<GaussianRational> = model.rep_point(spec, &values)?.into_iter().map(gauss_real).collect();
                let r = duflo_pair_residual(&t, w, p, &h)?;
                if !r.residual.is_zero() {
                    nonscalar += 1;
                    worst = worst.max(r.residual_norm);
                }
            }
            out.push(
                Record::new(
                    format!("duflo_pair/{}/{}/{}", pair.element, pair.polynomial, table),
                    "dπ(W) = p(h)·Id exactly for the representation attached to h",
                    Status::from_bool(nonscalar == 0),
                )
                .measure("nonzero_residuals", nonscalar as f64)
                .measure("max_residual_coefficient", worst)
                .measure("bindings", cfg.samples as f64)
                .tolerance("max_residual_coefficient", 0.0),
            );
        }
    }
    Ok(out)
}

pub fn check_orbit_points(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut sampler = Sampler::new(cfg.seed ^ 0x6f7262);
    let mut worst_gap: f64 = 0.0;
    let mut outside = 0;
    for _ in 0..cfg.samples {
        let (_, h) = sample_orbit_point(model, &mut sampler)?;
        let hf = to_f64(&h);
        if !model.in_omega(&hf) {
            outside += 1;
        }
        for v in separating_values(model, &hf)? {
            worst_gap = worst_gap.max(v.gap / v.scale);
        }
    }
    Ok(vec![
        Record::new(
            "omega_membership",
            "orbit points satisfy the closure constraints Ω",
            Status::from_bool(outside == 0),
        )
        .measure("outside", outside as f64)
        .measure("samples", cfg.samples as f64),
        Record::new(
            "orbit_gaps",
            "p(h) = ψ(h restricted to the center) on the orbit",
            Status::from_bool(worst_gap <= GAP_TOL),
        )
        .measure("max_gap_over_scale", worst_gap)
        .tolerance("max_gap_over_scale", GAP_TOL),
    ])
}

pub fn check_critical(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (k, c) in model.criticals.iter().enumerate() {
        let mut sampler = Sampler::new(cfg.seed ^ (0x637269 + k as u64));
        let mut least: f64 = f64::INFINITY;
        let mut outside = 0;
        for _ in 0..cfg.samples.min(20) {
            let h = to_f64(&sample_point(model, &c.point, &mut sampler)?);
            if !model.in_omega(&h) {
                outside += 1;
            }
            let best = separating_values(model, &h)?.iter().map(|v| v.gap / v.scale).fold(0.0, f64::max);
            least = least.min(best);
        }
        out.push(
            Record::new(
                format!("critical/{}", c.name),
                "some triple separates each critical point of Ω from the orbit closure",
                Status::from_bool(least > CRITICAL_RATIO && outside == 0),
            )
            .measure("min_best_gap_over_scale", least)
            .measure("outside_omega", outside as f64)
            .tolerance("min_best_gap_over_scale", CRITICAL_RATIO),
        );
    }
    Ok(out)
}

pub fn check_witnesses(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (k, w) in model.witnesses.iter().enumerate() {
        let mut sampler = Sampler::new(cfg.seed ^ (0x776974 + k as u64));
        let targets = (0..cfg.witness_samples)
            .map(|_| sample_point(model, &w.point, &mut sampler))
            .collect::<Result<Vec<_>>>()?;
        let runs = targets
            .par_iter()
            .map(|h| -> Result<(bool, f64)> {
                let hf = to_f64(h);
                let v = closure_member(model, &hf)?;
                let right_branch = v.member && v.certificate == Certificate::Witness(w.name.clone());
                Ok((right_branch, witness_sequence(model, h, cfg.witness_steps)?.final_error()))
            })
            .collect::<Result<Vec<_>>>()?;
        let misrouted = runs.iter().filter(|(ok, _)| !ok).count();
        let worst = runs.iter().map(|(_, e)| *e).fold(0.0, f64::max);
        out.push(
            Record::new(
                format!("witness/{}", w.name),
                "the branch recipe produces orbit points converging to the target",
                Status::from_bool(misrouted == 0 && worst <= WITNESS_TOL),
            )
            .measure("final_error", worst)
            .measure("misrouted_targets", misrouted as f64)
            .measure("steps", cfg.witness_steps as f64)
            .tolerance("final_error", WITNESS_TOL),
        );
    }
    Ok(out)
}

pub fn check_closure_consistency(model: &ExampleModel, cfg: &CheckConfig) -> Result<Record> {
    let mut sampler = Sampler::new(cfg.seed ^ 0x636c6f);
    let mut wrong = Vec::new();
    for _ in 0..cfg.samples.min(20) {
        let (_, h) = sample_orbit_point(model, &mut sampler)?;
        if !closure_member(model, &to_f64(&h))?.member {
            wrong.push("orbit point rejected".to_string());
        }
    }
    for c in &model.criticals {
        let h = to_f64(&sample_point(model, &c.point, &mut sampler)?);
        if closure_member(model, &h)?.member {
            wrong.push(format!("critical `{}` accepted", c.name));
        }
    }
    for u in &model.unresolved {
        let h = to_f64(&sample_point(model, &u.point, &mut sampler)?);
        if closure_member(model, &h)?.member {
            wrong.push(format!("`{}` point accepted", u.name));
        }
    }
    let mut off = to_f64(&model.f);
    if let Some(last) = off.last_mut() {
        *last += 1.0;
    }
    if closure_member(model, &off)?.certificate != Certificate::OutsideOmega {
        wrong.push("point off Ω accepted".into());
    }
    Ok(Record::new(
        "closure_consistency",
        "orbit points are members; critical and off-Ω points are not",
        Status::from_bool(wrong.is_empty()),
    )
    .measure("inconsistencies", wrong.len() as f64)
    .note(wrong.join("; ")))
}

/// Axes for a symbol in `k` variables: the configured grid for one
/// variable, otherwise about `grid^{1/k}` points per axis on the smaller
/// extent.
pub fn multiplier_axes(cfg: &CheckConfig, k: usize) -> Result<Vec<GridAxis>> {
    if k == 1 {
        return Ok(vec![GridAxis::central(cfg.grid, cfg.extent)?]);
    }
    let per = (cfg.grid as f64).powf(1.0 / k as f64).log2().floor().max(5.0) as u32;
    (0..k).map(|_| GridAxis::central(1 << per, cfg.multivar_extent)).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MultiplierErrors {
    /// `max ‖(T_ψ a)^ - ψ·â‖ / ‖â‖` over the battery.
    pub identity: f64,
    /// `max ‖T_ψ^{(i)} a - T_ψ^{(ii)} a‖ / ‖T_ψ^{(i)} a‖`.
    pub backends: f64,
}

pub fn multiplier_errors(psi: &SymbolFunction, cfg: &CheckConfig) -> Result<MultiplierErrors> {
    let axes = multiplier_axes(cfg, psi.nvars())?;
    let idx: Vec<usize> = (0..axes.len()).collect();
    let part = DyadicPartition::new(cfg.scales);
    let mut e = MultiplierErrors::default();
    for (_, a) in battery(&axes) {
        let phys = apply_multiplier(psi, &a, &idx, &part, Backend::Physical)?;
        let four = apply_multiplier(psi, &a, &idx, &part, Backend::Fourier)?;
        let mut hat = a.clone();
        let mut chat = phys.clone();
        for &ax in &idx {
            hat.fourier_axis(ax);
            chat.fourier_axis(ax);
        }
        let norm = hat.sup_norm();
        multiply_by_symbol(psi, &mut hat, &idx)?;
        e.identity = e.identity.max(chat.max_abs_diff(&hat) / norm);
        let fnorm = four.sup_norm().max(f64::MIN_POSITIVE);
        e.backends = e.backends.max(phys.max_abs_diff(&four) / fnorm);
    }
    Ok(e)
}

/// `(-i∂ a)^` against `ξ·â` on `|ξ| ≤ 8`, relative to `sup |ξ·â|` there.
pub fn functional_calculus_error(cfg: &CheckConfig) -> Result<f64> {
    let axis = GridAxis::central(cfg.grid, cfg.extent)?;
    let mut worst: f64 = 0.0;
    for (_, a) in battery(&[axis]) {
        let mut d = central_derivative(&a, 0);
        d.data.iter_mut().for_each(|v| *v *= C64::new(0.0, -1.0));
        d.fourier_axis(0);
        let mut hat = a.clone();
        hat.fourier_axis(0);
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for (m, (x, y)) in d.data.iter().zip(&hat.data).enumerate() {
            let xi = axis.freq(m);
            if xi.abs() <= CALCULUS_WINDOW {
                num = num.max((x - y * xi).norm());
                den = den.max((y * xi).norm());
            }
        }
        worst = worst.max(num / den);
    }
    Ok(worst)
}

pub fn check_multipliers(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for t in &model.triples {
        // the closure argument multiplies by ψ(-ξ)
        let psi = model.symbol(&t.symbol)?.reflected();
        let e = multiplier_errors(&psi, cfg)?;
        out.push(
            Record::new(
                format!("multiplier/{}", t.symbol),
                "the synthesized kernel realizes multiplication by ψ(-ξ) on the partial transform",
                Status::from_bool(e.identity <= cfg.tol_multiplier && e.backends <= BACKEND_TOL),
            )
            .measure("identity_error", e.identity)
            .measure("backend_disagreement", e.backends)
            .tolerance("identity_error", cfg.tol_multiplier)
            .tolerance("backend_disagreement", BACKEND_TOL),
        );
    }
    let fc = functional_calculus_error(cfg)?;
    out.push(
        Record::new(
            "functional_calculus",
            "the central derivative acts as multiplication by ⟨ξ,Z⟩",
            Status::from_bool(fc <= CALCULUS_TOL),
        )
        .measure("relative_error", fc)
        .tolerance("relative_error", CALCULUS_TOL),
    );
    Ok(out)
}

pub fn unresolved_records(model: &ExampleModel, cfg: &CheckConfig) -> Result<Vec<Record>> {
    let mut sampler = Sampler::new(cfg.seed ^ 0x756e72);
    let mut out = Vec::new();
    for u in &model.unresolved {
        let h = to_f64(&sample_point(model, &u.point, &mut sampler)?);
        let lookup = model.point_lookup(&h);
        let mut r = Record::new(
            format!("unresolved/{}", u.name),
            format!("region {}", u.when.text()),
            if u.when.holds(&lookup) { Status::Unresolved } else { Status::Fail },
        )
        .note(u.note.clone());
        for (name, v) in model.m.basis_names().iter().zip(&h) {
            r = r.measure(&format!("sample_{name}"), *v);
        }
        out.push(r);
    }
    Ok(out)
}

pub fn triple_check(model: &ExampleModel, cfg: &CheckConfig) -> Result<Report> {
    let mut report = Report::new(format!("triple/{}", model.name));
    report.push(check_jacobi_record(model));
    report.push(check_stabilizer(model));
    report.push(check_coadjoint(model, cfg)?);
    report.records.extend(check_homomorphisms(model, cfg)?);
    report.records.extend(check_duflo_pairs(model, cfg)?);
    report.records.extend(check_orbit_points(model, cfg)?);
    report.records.extend(check_critical(model, cfg)?);
    report.records.extend(check_witnesses(model, cfg)?);
    report.push(check_closure_consistency(model, cfg)?);
    report.records.extend(check_multipliers(model, cfg)?);
    report.records.extend(unresolved_records(model, cfg)?);
    let ok = report.passed();
    report.push(Record::new("verdict", "kernel non-inclusion certified at desk scale", Status::from_bool(ok)));
    Ok(report)
}
