use super::fd::centered;
use super::grid::{GridAxis, GridFunction, C64};
use super::kernel::Kernel1d;
use crate::error::{Error, Result};

/// `⟨u,φ⟩ = ∫_{|y|<B} k (φ - P_{m-1}φ) + ∫_{|y|≥B} k φ + Σ_β c_β φ^{(β)}(0)`
/// for a kernel sampled on one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedDistribution {
    pub kernel: Kernel1d,
    pub order: u32,
    pub radius: f64,
    pub tail_c: f64,
    pub tail_exp: f64,
    /// Coefficients `c_β` of the point part supported at 0.
    pub point_masses: Vec<f64>,
    /// `∫_{|y|<B} k(y) y^β / β!` for `β < m`.
    moments: Vec<C64>,
    weights: Vec<(isize, C64)>,
}

const INNER_RADIUS: f64 = 1.0;

pub fn regularize(kernel: Kernel1d, m: u32, tail_c: f64, tail_exp: f64) -> Result<RegularizedDistribution> {
    if tail_exp <= 1.0 {
        return Err(Error::Grid(format!("tail exponent {tail_exp} is not integrable")));
    }
    let axis = kernel.axis;
    let h = axis.spacing();
    let steps = (INNER_RADIUS / h).round().max(1.0) as isize;
    let radius = steps as f64 * h;
    refinement_check(&kernel, m, steps)?;
    let origin = axis.origin() as isize;
    let n = axis.n as isize;
    let mut weights = Vec::new();
    let mut moments = vec![C64::new(0.0, 0.0); m as usize];
    for l in 0..n {
        let s = l - origin;
        let k = kernel.values[l as usize];
        if s == 0 {
            if m == 0 && k.norm().is_finite() {
                weights.push((0, k * h));
            }
            continue;
        }
        let end = if l == 0 || l == n - 1 { 0.5 } else { 1.0 };
        if k != C64::new(0.0, 0.0) {
            weights.push((s, k * (h * end)));
        }
        if s.abs() <= steps {
            let w = if s.abs() == steps { 0.5 } else { 1.0 };
            let y = s as f64 * h;
            let mut p = 1.0;
            for (beta, slot) in moments.iter_mut().enumerate() {
                if beta > 0 {
                    p *= y / beta as f64;
                }
                *slot += k * (w * h * p);
            }
        }
    }
    Ok(RegularizedDistribution {
        kernel,
        order: m,
        radius,
        tail_c,
        tail_exp,
        point_masses: Vec::new(),
        moments,
        weights,
    })
}

/// Rejects `m` when the weighted inner integral `∫_h^B |k||y|^m` changes by
/// more than 15% between steps `h` and `2h`.
fn refinement_check(kernel: &Kernel1d, m: u32, steps: isize) -> Result<()> {
    let axis = kernel.axis;
    let h = axis.spacing();
    let origin = axis.origin() as isize;
    let sample = |s: isize| {
        let idx = origin + s;
        if idx < 0 || idx >= axis.n as isize {
            return 0.0;
        }
        kernel.values[idx as usize].norm() * (s.abs() as f64 * h).powi(m as i32)
    };
    let fine: f64 = (1..=steps).map(|s| (sample(s) + sample(-s)) * h).sum();
    let coarse: f64 = (1..=steps / 2).map(|s| (sample(2 * s) + sample(-2 * s)) * 2.0 * h).sum();
    if fine > 0.0 && (fine - coarse).abs() > 0.15 * fine {
        return Err(Error::Grid(format!(
            "order {m} is too small: inner integral moves from {coarse:.4e} to {fine:.4e} under refinement"
        )));
    }
    Ok(())
}

impl RegularizedDistribution {
    /// `δ` at the origin: zero kernel and `c_0 = 1`.
    pub fn point_mass(axis: GridAxis) -> Self {
        RegularizedDistribution {
            kernel: Kernel1d { axis, values: vec![C64::new(0.0, 0.0); axis.n] },
            order: 0,
            radius: 0.0,
            tail_c: 0.0,
            tail_exp: f64::INFINITY,
            point_masses: vec![1.0],
            moments: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn with_point_masses(mut self, c: Vec<f64>) -> Self {
        self.point_masses = c;
        self
    }

    /// `∫_{|y|>E} C|y|^{-e}`, the mass the tail model places beyond the grid.
    pub fn tail_mass(&self) -> f64 {
        if self.tail_c == 0.0 {
            return 0.0;
        }
        let e = self.tail_exp;
        2.0 * self.tail_c * self.kernel.axis.extent.powf(1.0 - e) / (e - 1.0)
    }

    /// Pairing with samples of `φ` on the kernel's axis.
    pub fn pair(&self, phi: &[C64]) -> Result<C64> {
        let axis = self.kernel.axis;
        if phi.len() != axis.n {
            return Err(Error::Grid(format!("test function has {} samples, axis has {}", phi.len(), axis.n)));
        }
        let origin = axis.origin() as isize;
        Ok(self.pair_with(|s| {
            let idx = origin + s;
            if idx < 0 || idx >= axis.n as isize {
                C64::new(0.0, 0.0)
            } else {
                phi[idx as usize]
            }
        }))
    }

    /// Pairing with `φ` given by its value at offset `s` (the point `s·h`).
    fn pair_with(&self, phi: impl Fn(isize) -> C64) -> C64 {
        let h = self.kernel.axis.spacing();
        let mut acc: C64 = self.weights.iter().map(|&(s, w)| w * phi(s)).sum();
        let derivs = self.moments.len().max(self.point_masses.len());
        for beta in 0..derivs {
            let d = derivative_at_origin(&phi, beta, h);
            if let Some(mo) = self.moments.get(beta) {
                acc -= mo * d;
            }
            if let Some(c) = self.point_masses.get(beta) {
                acc += d * *c;
            }
        }
        acc
    }
}

fn derivative_at_origin(phi: &impl Fn(isize) -> C64, beta: usize, h: f64) -> C64 {
    if beta == 0 {
        return phi(0);
    }
    let half = 3 + beta / 2;
    centered(beta, half, h).iter().enumerate().map(|(k, c)| phi(k as isize - half as isize) * *c).sum()
}

/// `(u∗a)(z) = ⟨u, a(z - ·)⟩` at every grid point, along `axis`.
pub fn convolve_regularized(u: &RegularizedDistribution, a: &GridFunction, axis: usize) -> Result<GridFunction> {
    if a.axes[axis].n != u.kernel.axis.n || a.axes[axis].extent != u.kernel.axis.extent {
        return Err(Error::Grid("distribution and function live on different axes".into()));
    }
    let mut out = a.clone();
    let mut src = vec![C64::new(0.0, 0.0); a.axes[axis].n];
    let n = src.len() as isize;
    out.map_lines(axis, |line| {
        src.copy_from_slice(line);
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = u.pair_with(|s| {
                let idx = k as isize - s;
                if idx < 0 || idx >= n {
                    C64::new(0.0, 0.0)
                } else {
                    src[idx as usize]
                }
            });
        }
    });
    Ok(out)
}

/// Least `m` with `sup_{[h,2h]} |z|^m|k| ≤ 10 sup_{[1/2,1]} |z|^m|k|`, capped by
/// the least integer above `n/2 + r`.
pub fn estimate_order(kernel: &Kernel1d, dim: usize, r: f64) -> u32 {
    let cap = order_cap(dim, r);
    let axis = kernel.axis;
    let h = axis.spacing();
    let coords = axis.coords();
    let sup_on = |lo: f64, hi: f64, m: u32| {
        coords
            .iter()
            .zip(&kernel.values)
            .filter(|(z, _)| z.abs() >= lo - 1e-12 && z.abs() <= hi + 1e-12)
            .map(|(z, v)| z.abs().powi(m as i32) * v.norm())
            .fold(0.0, f64::max)
    };
    (0..cap).find(|&m| sup_on(h, 2.0 * h, m) <= 10.0 * sup_on(0.5, 1.0, m)).unwrap_or(cap)
}

/// `min{q ∈ ℕ : n/2 + r < q}`.
pub fn order_cap(dim: usize, r: f64) -> u32 {
    (dim as f64 / 2.0 + r).floor() as u32 + 1
}
