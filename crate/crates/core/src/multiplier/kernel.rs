use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::grid::{GridAxis, C64};
use super::partition::DyadicPartition;
use super::symbol::{AxisSymbol, SymbolFunction};
use crate::error::{Error, Result};

/// Kernel samples `k(z_k)` on every point of one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel1d {
    pub axis: GridAxis,
    pub values: Vec<C64>,
}

impl Kernel1d {
    pub fn coords(&self) -> Vec<f64> {
        self.axis.coords()
    }

    /// Nearest grid sample to `z`.
    pub fn nearest(&self, z: f64) -> (f64, C64) {
        let h = self.axis.spacing();
        let k = ((z + self.axis.extent) / h).round().clamp(0.0, (self.axis.n - 1) as f64) as usize;
        (self.axis.coord(k), self.values[k])
    }

    /// Centered first difference `k'(z_k)`, zero at the two ends.
    pub fn derivative(&self) -> Kernel1d {
        let h = self.axis.spacing();
        let n = self.axis.n;
        let mut values = vec![C64::new(0.0, 0.0); n];
        for k in 1..n - 1 {
            values[k] = (self.values[k + 1] - self.values[k - 1]) / (2.0 * h);
        }
        Kernel1d { axis: self.axis, values }
    }
}

const GL8_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Composite 8-point Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for (x, wt) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            out.push((mid - x * w / 2.0, wt * w / 2.0));
            out.push((mid + x * w / 2.0, wt * w / 2.0));
        }
    }
    out
}

/// How one dyadic shell was turned into kernel samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellMethod {
    /// Gauss–Legendre quadrature evaluated at every grid point.
    Quadrature,
    /// Riemann sum on the frequency lattice `ℓΔξ`, folded modulo the grid size.
    Folded,
}

/// Method used for shell `j`: wide shells get quadrature, narrow ones the folded sum.
pub fn shell_method(j: i32) -> ShellMethod {
    if j <= 0 {
        ShellMethod::Quadrature
    } else {
        ShellMethod::Folded
    }
}

/// `k = Σ_j F^{-1}(ψ δ_j)` on the axis. Smooth symbols skip the partition
/// and are transformed in one piece over `|ξ| ≤ 2^{L+1}`.
pub fn kernel_from_symbol(psi: &SymbolFunction, part: &DyadicPartition, axis: GridAxis) -> Result<Kernel1d> {
    if psi.nvars() != 1 {
        return Err(Error::Model(format!("kernel of `{psi}` needs a one-variable symbol")));
    }
    if axis.extent < 8.0 {
        return Err(Error::Aliasing(format!("extent {} is below 8; shell kernels would wrap", axis.extent)));
    }
    let g = |x: f64| psi.eval(&[x]);
    let n = axis.n;
    let mut total = vec![C64::new(0.0, 0.0); n];
    if psi.meta.smooth {
        let r = part.outer_radius();
        let k = folded(&g, &|_| 1.0, -r, r, axis)?;
        add_into(&mut total, &k);
        return Ok(Kernel1d { axis, values: total });
    }
    for j in part.shells() {
        let (lo, hi) = DyadicPartition::shell_support(j);
        let weight = |x: f64| part.delta_j(j, x.abs());
        let k = match shell_method(j) {
            ShellMethod::Quadrature => quadrature(&g, &weight, lo, hi, axis)?,
            ShellMethod::Folded => folded(&g, &weight, -hi, hi, axis)?,
        };
        add_into(&mut total, &k);
    }
    Ok(Kernel1d { axis, values: total })
}

fn add_into(acc: &mut [C64], v: &[C64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn quadrature(
    g: &dyn Fn(f64) -> Result<f64>,
    weight: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    axis: GridAxis,
) -> Result<Vec<C64>> {
    // quarter of an oscillation at the outermost grid point per panel
    let panel = (PI / 2.0) / axis.extent;
    let panels = (((hi - lo) / panel).ceil() as usize).max(8);
    let mut nodes = Vec::new();
    for (x, w) in gauss_legendre(lo, hi, panels) {
        for s in [x, -x] {
            let c = w * weight(s) * g(s)? / (2.0 * PI);
            if c != 0.0 {
                nodes.push((s, c));
            }
        }
    }
    let n = axis.n;
    let h = axis.spacing();
    let mut out = vec![C64::new(0.0, 0.0); n];
    const CHUNK: usize = 256;
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        let z0 = axis.coord(start);
        for &(xi, c) in &nodes {
            let mut p = C64::from_polar(c, xi * z0);
            let step = C64::from_polar(1.0, xi * h);
            for slot in &mut out[start..end] {
                *slot += p;
                p *= step;
            }
        }
    }
    Ok(out)
}

fn folded(
    g: &dyn Fn(f64) -> Result<f64>,
    weight: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    axis: GridAxis,
) -> Result<Vec<C64>> {
    let n = axis.n as i64;
    let dxi = axis.freq_step();
    let lmin = (lo / dxi).floor() as i64;
    let lmax = (hi / dxi).ceil() as i64;
    let mut bins = vec![C64::new(0.0, 0.0); axis.n];
    for l in lmin..=lmax {
        let xi = l as f64 * dxi;
        let w = weight(xi);
        if w == 0.0 {
            continue;
        }
        let c = dxi / (2.0 * PI) * w * g(xi)?;
        let sign = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        bins[l.rem_euclid(n) as usize] += C64::new(sign * c, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(axis.n).process(&mut bins);
    Ok(bins)
}

/// Periodic kernel by lag `K[d]` reproducing the multiplier exactly on the
/// grid frequencies: `h Σ_l K[(k-l) mod n] a_l` has transform `g(ξ_m) â_m`.
pub fn grid_kernel(factor: &AxisSymbol, part: &DyadicPartition, axis: GridAxis) -> Result<Vec<C64>> {
    let n = axis.n;
    let smooth = factor.is_smooth();
    if !smooth {
        let (lo, hi) = part.plateau();
        if axis.freq_step() < lo || axis.nyquist() > hi {
            return Err(Error::Aliasing(format!(
                "grid frequencies [{:.3e}, {:.3e}] leave the partition plateau [{lo:.3e}, {hi:.3e}]",
                axis.freq_step(),
                axis.nyquist()
            )));
        }
    }
    let freqs = axis.freqs();
    let mut total = vec![C64::new(0.0, 0.0); n];
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let scale = 1.0 / (n as f64 * axis.spacing());
    let mut run = |weights: &dyn Fn(f64) -> f64| -> Result<()> {
        let mut spec = vec![C64::new(0.0, 0.0); n];
        let mut any = false;
        for (m, &xi) in freqs.iter().enumerate() {
            let w = weights(xi);
            if w != 0.0 {
                spec[m] = C64::new(w * factor.eval(xi)?, 0.0);
                any = true;
            }
        }
        if !any {
            return Ok(());
        }
        fft.process(&mut spec);
        for (d, v) in spec.iter().enumerate() {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            total[d] += v * (sign * scale);
        }
        Ok(())
    };
    if smooth {
        run(&|_| 1.0)?;
    } else {
        for j in part.shells() {
            run(&|xi: f64| part.delta_j(j, xi.abs()))?;
        }
    }
    Ok(total)
}

/// Log–log regression of `|k|` against `z` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// `sup |k(z)| z^{decay}` over the window.
    pub constant: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_decay(kernel: &Kernel1d, lo: f64, hi: f64, samples: usize, decay: f64) -> Result<SlopeFit> {
    if !(lo > 0.0 && hi > lo) || hi > kernel.axis.extent {
        return Err(Error::Grid(format!("fit window [{lo}, {hi}] is not inside the grid")));
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    for i in 0..samples {
        let t = i as f64 / (samples.max(2) - 1) as f64;
        let (z, v) = kernel.nearest(lo * (hi / lo).powf(t));
        if points.last().map(|p| p.0) != Some(z) && z >= lo && z <= hi {
            points.push((z, v.norm()));
        }
    }
    let usable: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(z, a)| (z.ln(), a.ln())).collect();
    if usable.len() < 2 {
        return Err(Error::Grid("not enough nonzero samples to fit".into()));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let constant = points.iter().map(|&(z, a)| a * z.powf(decay)).fold(0.0, f64::max);
    Ok(SlopeFit { slope, intercept: my - slope * mx, constant, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::symbol::SymbolMeta;
    use std::collections::BTreeMap;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = gauss_legendre(0.0, 2.0, 3);
        let v: f64 = q.iter().map(|(x, w)| w * x.powi(15)).sum();
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_kernel() {
        let psi = SymbolFunction::parse("g", "exp(-xi^2/2)", &["xi"], &BTreeMap::new())
            .unwrap()
            .with_meta(SymbolMeta { homogeneity: 0.0, log_power: 0, smooth: true });
        let axis = GridAxis::central(1024, 16.0).unwrap();
        let k = kernel_from_symbol(&psi, &DyadicPartition::new(10), axis).unwrap();
        for (z, v) in axis.coords().iter().zip(&k.values) {
            let want = (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
            assert!((v - C64::new(want, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn quadrature_and_folding_agree_on_a_narrow_shell() {
        let axis = GridAxis::central(2048, 128.0).unwrap();
        let part = DyadicPartition::new(4);
        let g = |x: f64| Ok(x * x.abs().ln());
        let w = |x: f64| part.delta_j(1, x.abs());
        let a = quadrature(&g, &w, 1.0, 4.0, axis).unwrap();
        let b = folded(&g, &w, -4.0, 4.0, axis).unwrap();
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            if axis.coord(k).abs() <= 32.0 {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_kernel_guard() {
        let f = AxisSymbol::Power { alpha: 1, beta: 1 };
        let narrow = GridAxis::central(1 << 14, 256.0).unwrap();
        assert!(grid_kernel(&f, &DyadicPartition::new(4), narrow).is_err());
        assert!(grid_kernel(&f, &DyadicPartition::new(10), narrow).is_ok());
    }

    #[test]
    fn slope_of_power_law() {
        let axis = GridAxis::central(4096, 128.0).unwrap();
        let values = axis
            .coords()
            .iter()
            .map(|z| C64::new(if *z == 0.0 { 0.0 } else { 3.0 * z.abs().powf(-1.5) }, 0.0))
            .collect();
        let k = Kernel1d { axis, values };
        let fit = fit_decay(&k, 1.0, 64.0, 40, 1.5).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.constant - 3.0).abs() < 1e-9);
    }
}
