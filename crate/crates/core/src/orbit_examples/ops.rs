use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::{ExampleModel, PointSpec, WitnessSpec};
use crate::error::{Error, Result};
use crate::lie_core::{coadjoint, Functional, GroupWord};
use crate::multiplier::{GridAxis, GridFunction, C64};
use crate::scalar::Rational;

/// Tolerance on `|p(h) - ψ(h)|` relative to [`SeparatingValue::scale`].
pub const GAP_TOL: f64 = 1e-8;

pub fn closed_form_orbit(model: &ExampleModel, params: &[f64]) -> Result<Vec<f64>> {
    model.closed_form_orbit(params)
}

/// The orbit point of `params` computed by the matrix-exponential action on
/// the full algebra, with `f` extended by zero, read back on `m`.
pub fn coadjoint_orbit(model: &ExampleModel, params: &[f64]) -> Result<Vec<f64>> {
    let word = GroupWord::new(
        model
            .orbit
            .word
            .iter()
            .map(|(g, p)| {
                let k = model.orbit.params.iter().position(|q| q == p).unwrap_or(0);
                (*g, params[k])
            })
            .collect(),
    );
    let f = Functional { coeffs: extend(model, &to_f64(&model.f)) };
    let g = coadjoint(&model.algebra, &word, &f)?;
    Ok(model.m_indices.iter().map(|&i| g.coeffs[i]).collect())
}

fn extend(model: &ExampleModel, h: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; model.algebra.dim()];
    for (k, &i) in model.m_indices.iter().enumerate() {
        full[i] = h[k];
    }
    full
}

pub fn to_f64(h: &[Rational]) -> Vec<f64> {
    h.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Applies the model's `normalize` moves: each moves along one generator of
/// `m` far enough to zero one component.
pub fn orbit_representative_normalize(model: &ExampleModel, f_raw: &[f64]) -> Result<Vec<f64>> {
    let mut f = f_raw.to_vec();
    let names = model.m.basis_names();
    for &(g, c) in &model.normalize {
        let gi = model.m_indices[g];
        let at = |f: &[f64], t: f64| -> Result<Vec<f64>> {
            let full = Functional { coeffs: extend(model, f) };
            let moved = coadjoint(&model.algebra, &GroupWord::new(vec![(gi, t)]), &full)?;
            Ok(model.m_indices.iter().map(|&i| moved.coeffs[i]).collect())
        };
        let v0 = at(&f, 0.0)?[c];
        let slope = at(&f, 1.0)?[c] - v0;
        let scale = f.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if slope.abs() <= 1e-12 * scale {
            return Err(Error::VanishingComponent(format!("moving along {} cannot change {}", names[g], names[c])));
        }
        let t = -v0 / slope;
        let next = at(&f, t)?;
        if next[c].abs() > 1e-9 * scale {
            return Err(Error::Model(format!("move along {} is not affine in {}", names[g], names[c])));
        }
        f = next;
        f[c] = 0.0;
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatingValue {
    pub label: String,
    pub p: f64,
    pub psi: f64,
    pub gap: f64,
    /// `max(1, |p|, |ψ|)`
    pub scale: f64,
    pub admissible: bool,
}

impl SeparatingValue {
    pub fn agrees(&self) -> bool {
        self.gap <= GAP_TOL * self.scale
    }
}

pub fn separating_values(model: &ExampleModel, h: &[f64]) -> Result<Vec<SeparatingValue>> {
    let admissible = model.is_admissible(h);
    model
        .triples
        .iter()
        .map(|t| {
            let p = model.polynomial(&t.polynomial)?.eval_f64(h);
            let psi_fn = model.symbol(&t.symbol)?;
            let psi = psi_fn.eval(&model.symbol_args(psi_fn, h)?)?;
            let gap = (p - psi).abs();
            Ok(SeparatingValue {
                label: format!("{}/{}/{}", t.element, t.polynomial, t.symbol),
                p,
                psi,
                gap,
                scale: 1f64.max(p.abs()).max(psi.abs()),
                admissible,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Certificate {
    /// The witness branch whose recipe converges to `h`.
    Witness(String),
    /// A triple whose two sides differ at `h`.
    Gap {
        triple: String,
        gap: f64,
        scale: f64,
    },
    OutsideOmega,
    /// Clauses of the non-admissible characterization that fail.
    ClosureOutside(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureVerdict {
    pub member: bool,
    pub certificate: Certificate,
}

pub fn closure_member(model: &ExampleModel, h: &[f64]) -> Result<ClosureVerdict> {
    if !model.in_omega(h) {
        return Ok(ClosureVerdict { member: false, certificate: Certificate::OutsideOmega });
    }
    if model.is_admissible(h) {
        for v in separating_values(model, h)? {
            if !v.agrees() {
                return Ok(ClosureVerdict {
                    member: false,
                    certificate: Certificate::Gap { triple: v.label, gap: v.gap, scale: v.scale },
                });
            }
        }
    } else if let Some(c) = &model.closure_outside {
        let bad = c.violations(&model.point_lookup(h));
        if !bad.is_empty() {
            return Ok(ClosureVerdict { member: false, certificate: Certificate::ClosureOutside(bad) });
        }
    }
    let w = select_branch(model, h)?;
    Ok(ClosureVerdict { member: true, certificate: Certificate::Witness(w.name.clone()) })
}

pub fn select_branch<'a>(model: &'a ExampleModel, h: &[f64]) -> Result<&'a WitnessSpec> {
    let lookup = model.point_lookup(h);
    model.witnesses.iter().find(|w| w.when.holds(&lookup)).ok_or_else(|| Error::NoBranch(format!("{h:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessStep {
    pub n: u32,
    pub params: Vec<f64>,
    pub point: Vec<f64>,
    /// `max_ν |f_n(e_ν) - h_ν|`
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessRun {
    pub branch: String,
    pub steps: Vec<WitnessStep>,
}

impl WitnessRun {
    pub fn final_error(&self) -> f64 {
        self.steps.last().map_or(f64::INFINITY, |s| s.error)
    }
}

/// Runs the recipe of the branch covering `h` for `n = 0..=n_max`. Schedules
/// and orbit points are evaluated exactly, so no cancellation enters the
/// error.
pub fn witness_sequence(model: &ExampleModel, h: &[Rational], n_max: u32) -> Result<WitnessRun> {
    let hf = to_f64(h);
    let w = select_branch(model, &hf)?;
    let mut steps = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let params = model.schedule_params(w, h, n)?;
        let point = model.closed_form_exact(&params)?;
        let error =
            point.iter().zip(h).map(|(a, b)| (a - b).abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
        steps.push(WitnessStep { n, params: to_f64(&params), point: to_f64(&point), error });
    }
    Ok(WitnessRun { branch: w.name.clone(), steps })
}

/// Seeded source of the dyadic numbers `u1, u2, ...` in `[-2, 2]`.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn dyadic(&mut self) -> Rational {
        Rational::new(self.rng.random_range(-128i64..=128).into(), 64.into())
    }

    pub fn dyadics(&mut self, k: usize) -> Vec<Rational> {
        (0..k).map(|_| self.dyadic()).collect()
    }
}

pub const POINT_DRAWS: usize = 8;

pub fn sample_point(model: &ExampleModel, spec: &PointSpec, sampler: &mut Sampler) -> Result<Vec<Rational>> {
    let u = sampler.dyadics(POINT_DRAWS);
    model.eval_point(spec, &u)
}

/// Orbit point with exact closed-form components at random parameters.
pub fn sample_orbit_point(model: &ExampleModel, sampler: &mut Sampler) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let params = sampler.dyadics(model.orbit.params.len());
    let h = model.closed_form_exact(&params)?;
    Ok((params, h))
}

pub fn is_zero_vector(h: &[Rational]) -> bool {
    h.iter().all(Zero::is_zero)
}

/// Five test functions: a Gaussian, a shifted Gaussian times a linear
/// factor, a modulated Gaussian, a compact bump and an odd Gaussian moment.
/// On several axes each is the product of its one-axis copies.
pub fn battery(axes: &[GridAxis]) -> Vec<(&'static str, GridFunction)> {
    let one: [(&'static str, fn(f64) -> f64); 5] = [
        ("gaussian", |z| (-z * z / 2.0).exp()),
        ("shifted", |z| (-(z - 1.0) * (z - 1.0)).exp() * (1.0 + z / 4.0)),
        ("modulated", |z| (3.0 * z).cos() * (-z * z / 4.0).exp()),
        ("bump", |z| {
            let t = z / 3.0;
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        }),
        ("odd", |z| z * (-z * z / 8.0).exp()),
    ];
    one.iter()
        .map(|&(name, f)| {
            (name, GridFunction::from_fn(axes.to_vec(), |p| C64::new(p.iter().map(|&z| f(z)).product(), 0.0)))
        })
        .collect()
}
