use super::fd::centered;
use super::grid::{AxisRole, GridFunction, C64};
use super::kernel::grid_kernel;
use super::partition::DyadicPartition;
use super::symbol::{AxisSymbol, SymbolFunction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Multiply the partial transform by `ψ` and invert.
    Fourier,
    /// Convolve with the shell-synthesized kernel along each symbol axis.
    Physical,
}

fn check_axes(psi: &SymbolFunction, a: &GridFunction, axes: &[usize]) -> Result<()> {
    if axes.len() != psi.nvars() {
        return Err(Error::Grid(format!(
            "`{}` has {} variables but {} axes were given",
            psi.name,
            psi.nvars(),
            axes.len()
        )));
    }
    for (i, &ax) in axes.iter().enumerate() {
        if ax >= a.axes.len() {
            return Err(Error::Grid(format!("axis {ax} out of range")));
        }
        if a.axes[ax].role == AxisRole::X {
            return Err(Error::Grid(format!("axis {ax} is not central")));
        }
        if axes[..i].contains(&ax) {
            return Err(Error::Grid(format!("axis {ax} repeated")));
        }
    }
    Ok(())
}

/// `T_ψ a`, the multiplier acting on the listed central axes. Every other
/// axis is carried along as a parameter.
pub fn apply_multiplier(
    psi: &SymbolFunction,
    a: &GridFunction,
    axes: &[usize],
    part: &DyadicPartition,
    backend: Backend,
) -> Result<GridFunction> {
    check_axes(psi, a, axes)?;
    match backend {
        Backend::Fourier => {
            let mut b = a.clone();
            for &ax in axes {
                b.fourier_axis(ax);
            }
            multiply_by_symbol(psi, &mut b, axes)?;
            for &ax in axes {
                b.inverse_fourier_axis(ax);
            }
            Ok(b)
        }
        Backend::Physical => physical(psi, a, axes, part),
    }
}

/// Multiplies a function already transformed along `axes` by `ψ(ξ)`.
pub fn multiply_by_symbol(psi: &SymbolFunction, b: &mut GridFunction, axes: &[usize]) -> Result<()> {
    let mut freq = vec![0.0; b.axes.len()];
    let mut xi = vec![0.0; axes.len()];
    let mut cache: Option<(Vec<f64>, f64)> = None;
    for idx in 0..b.len() {
        b.frequency_of(idx, &mut freq);
        for (slot, &ax) in xi.iter_mut().zip(axes) {
            *slot = freq[ax];
        }
        let v = match &cache {
            Some((k, v)) if *k == xi => *v,
            _ => {
                let v = psi.eval(&xi)?;
                cache = Some((xi.clone(), v));
                v
            }
        };
        b.data[idx] *= v;
    }
    Ok(())
}

fn physical(psi: &SymbolFunction, a: &GridFunction, axes: &[usize], part: &DyadicPartition) -> Result<GridFunction> {
    let terms = psi.separable_terms()?;
    let mut kernels: Vec<(AxisSymbol, usize, Vec<C64>)> = Vec::new();
    let mut out = GridFunction::zeros(a.axes.clone());
    for (coef, factors) in terms {
        let mut t = a.clone();
        for (factor, &ax) in factors.iter().zip(axes) {
            if factor.is_identity() {
                continue;
            }
            let pos = match kernels.iter().position(|(f, x, _)| f == factor && *x == ax) {
                Some(p) => p,
                None => {
                    kernels.push((factor.clone(), ax, grid_kernel(factor, part, a.axes[ax])?));
                    kernels.len() - 1
                }
            };
            convolve_axis(&mut t, ax, &kernels[pos].2);
        }
        for (o, v) in out.data.iter_mut().zip(&t.data) {
            *o += v * coef;
        }
    }
    Ok(out)
}

/// Circular convolution `h Σ_l K[(k-l) mod n] a_l` along one axis, skipping
/// zero samples of `a`.
pub fn convolve_axis(a: &mut GridFunction, axis: usize, lag_kernel: &[C64]) {
    let n = a.axes[axis].n;
    let h = a.axes[axis].spacing();
    let mut out = vec![C64::new(0.0, 0.0); n];
    a.map_lines(axis, |line| {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (l, &v) in line.iter().enumerate() {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let v = v * h;
            let (tail, head) = lag_kernel.split_at(n - l);
            for (o, k) in out[..l].iter_mut().zip(head) {
                *o += k * v;
            }
            for (o, k) in out[l..].iter_mut().zip(tail) {
                *o += k * v;
            }
        }
        line.copy_from_slice(&out);
    });
}

/// Centered difference `∂_z a` along `axis` (7-point stencil); the three
/// samples at each end are set to zero.
pub fn central_derivative(a: &GridFunction, axis: usize) -> GridFunction {
    let ax = a.axes[axis];
    let w = centered(1, 3, ax.spacing());
    let mut out = a.clone();
    out.map_lines(axis, |line| {
        let src = line.to_vec();
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = if k < 3 || k + 3 >= src.len() {
                C64::new(0.0, 0.0)
            } else {
                w.iter().enumerate().map(|(s, c)| src[k + s - 3] * c).sum()
            };
        }
    });
    out
}

/// `N_m(a) = Σ_{|β|≤m} sup (1+|z|)^{n+r0} |∂_z^β a|` over the central axes,
/// derivatives by [`central_derivative`].
pub fn q_seminorm(a: &GridFunction, r0: f64, m: u32) -> f64 {
    let central = a.central_axes();
    let weight_exp = central.len() as f64 + r0;
    let mut point = vec![0.0; a.axes.len()];
    let weight: Vec<f64> = (0..a.len())
        .map(|idx| {
            a.point_of(idx, &mut point);
            let z = central.iter().map(|&c| point[c] * point[c]).sum::<f64>().sqrt();
            (1.0 + z).powf(weight_exp)
        })
        .collect();
    let mut total = 0.0;
    // each derivative carries the first axis slot it may still differentiate
    let mut layer = vec![(a.clone(), 0usize)];
    for order in 0..=m {
        for (g, _) in &layer {
            total += g.data.iter().zip(&weight).map(|(v, w)| w * v.norm()).fold(0.0, f64::max);
        }
        if order == m {
            break;
        }
        let mut next = Vec::new();
        for (g, first) in &layer {
            for (slot, &c) in central.iter().enumerate().skip(*first) {
                next.push((central_derivative(g, c), slot));
            }
        }
        layer = next;
    }
    total
}

/// Both sides of the dyadic geometric-series estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricCheck {
    /// `Σ_{2^j ≤ 1/x} 2^{jm}`
    pub lhs_low: f64,
    /// `2 x^{-m}`
    pub bound_low: f64,
    /// `Σ_{2^j > 1/x} 2^{-jm}`
    pub lhs_high: f64,
    /// `2 x^m`
    pub bound_high: f64,
}

impl GeometricCheck {
    pub fn holds(&self) -> bool {
        self.lhs_low <= self.bound_low && self.lhs_high <= self.bound_high
    }
}

pub fn geometric_series_check(x: f64, m: f64) -> GeometricCheck {
    let inv = 1.0 / x;
    let mut top = inv.log2().floor() as i32;
    while 2f64.powi(top + 1) <= inv {
        top += 1;
    }
    while 2f64.powi(top) > inv {
        top -= 1;
    }
    let lhs_low = dyadic_tail(|k| 2f64.powf((top - k) as f64 * m));
    let lhs_high = dyadic_tail(|k| 2f64.powf(-((top + 1 + k) as f64) * m));
    GeometricCheck { lhs_low, bound_low: 2.0 * x.powf(-m), lhs_high, bound_high: 2.0 * x.powf(m) }
}

fn dyadic_tail(term: impl Fn(i32) -> f64) -> f64 {
    let mut sum = 0.0;
    for k in 0.. {
        let t = term(k);
        if k > 0 && (t < 1e-18 * sum || t == 0.0) {
            break;
        }
        sum += t;
    }
    sum
}
