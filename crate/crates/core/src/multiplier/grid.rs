use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisRole {
    /// Transverse coordinate, never transformed.
    X,
    /// Central coordinate acted on by the multiplier.
    Central,
    /// Central coordinate carried along as a parameter.
    Spectator,
}

/// Uniform samples `z_k = -E + k h`, `h = 2E/n`, `n` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub n: usize,
    pub extent: f64,
    pub role: AxisRole,
}

impl GridAxis {
    pub fn new(n: usize, extent: f64, role: AxisRole) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("axis size {n} is not a power of two ≥ 4")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::Grid(format!("extent {extent} must be positive")));
        }
        Ok(GridAxis { n, extent, role })
    }

    pub fn central(n: usize, extent: f64) -> Result<Self> {
        Self::new(n, extent, AxisRole::Central)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.coord(k)).collect()
    }

    /// Index of `z = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    pub fn freq_step(&self) -> f64 {
        PI / self.extent
    }

    /// `ξ_m = (m - n/2) Δξ`.
    pub fn freq(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.freq_step()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.freq(m)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }
}

/// Complex samples on a product grid, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub axes: Vec<GridAxis>,
    pub data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    shape: Vec<usize>,
    extent: Vec<f64>,
    roles: Vec<AxisRole>,
    dtype: String,
}

impl GridFunction {
    pub fn zeros(axes: Vec<GridAxis>) -> Self {
        let len = axes.iter().map(|a| a.n).product();
        GridFunction { axes, data: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_fn(axes: Vec<GridAxis>, f: impl Fn(&[f64]) -> C64) -> Self {
        let mut g = Self::zeros(axes);
        let mut point = vec![0.0; g.axes.len()];
        for idx in 0..g.data.len() {
            g.point_of(idx, &mut point);
            g.data[idx] = f(&point);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.axes.len()).rev() {
            out[a] = idx % self.axes[a].n;
            idx /= self.axes[a].n;
        }
    }

    pub fn point_of(&self, idx: usize, out: &mut [f64]) {
        let mut mi = vec![0; self.axes.len()];
        self.multi_index(idx, &mut mi);
        for (a, ax) in self.axes.iter().enumerate() {
            out[a] = ax.coord(mi[a]);
        }
    }

    pub fn frequency_of(&self, idx: usize, out: &mut [f64]) {
        let mut mi = vec![0; self.axes.len()];
        self.multi_index(idx, &mut mi);
        for (a, ax) in self.axes.iter().enumerate() {
            out[a] = ax.freq(mi[a]);
        }
    }

    pub fn central_axes(&self) -> Vec<usize> {
        (0..self.axes.len()).filter(|&a| self.axes[a].role != AxisRole::X).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Start offsets of every line along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        let n = self.axes[axis].n;
        let mut starts = Vec::with_capacity(self.data.len() / n);
        for block in (0..self.data.len()).step_by(stride * n) {
            for off in 0..stride {
                starts.push(block + off);
            }
        }
        starts
    }

    pub fn read_line(&self, axis: usize, start: usize, buf: &mut [C64]) {
        let stride = self.stride(axis);
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = self.data[start + k * stride];
        }
    }

    pub fn write_line(&mut self, axis: usize, start: usize, buf: &[C64]) {
        let stride = self.stride(axis);
        for (k, v) in buf.iter().enumerate() {
            self.data[start + k * stride] = *v;
        }
    }

    /// Applies `f` to every line along `axis`.
    pub fn map_lines(&mut self, axis: usize, mut f: impl FnMut(&mut [C64])) {
        let n = self.axes[axis].n;
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for start in self.line_starts(axis) {
            self.read_line(axis, start, &mut buf);
            f(&mut buf);
            self.write_line(axis, start, &buf);
        }
    }

    /// `â(ξ) ≈ ∫ a(z) e^{-iξz} dz` along one axis.
    pub fn fourier_axis(&mut self, axis: usize) {
        let ax = self.axes[axis];
        let fft = FftPlanner::new().plan_fft_forward(ax.n);
        let h = ax.spacing();
        let half_sign = if (ax.n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.map_lines(axis, |line| {
            alternate(line, 1.0);
            fft.process(line);
            alternate(line, h * half_sign);
        });
    }

    /// Inverse of [`fourier_axis`](Self::fourier_axis).
    pub fn inverse_fourier_axis(&mut self, axis: usize) {
        let ax = self.axes[axis];
        let fft = FftPlanner::new().plan_fft_inverse(ax.n);
        let scale = 1.0 / (ax.n as f64 * ax.spacing());
        let half_sign = if (ax.n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.map_lines(axis, |line| {
            alternate(line, 1.0);
            fft.process(line);
            alternate(line, scale * half_sign);
        });
    }

    /// Partial transform along the central and spectator axes; `x` untouched.
    pub fn partial_central_fft(&self) -> GridFunction {
        let mut out = self.clone();
        for a in self.central_axes() {
            out.fourier_axis(a);
        }
        out
    }

    pub fn partial_central_ifft(&self) -> GridFunction {
        let mut out = self.clone();
        for a in self.central_axes() {
            out.inverse_fourier_axis(a);
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let header = Header {
            shape: self.shape(),
            extent: self.axes.iter().map(|a| a.extent).collect(),
            roles: self.axes.iter().map(|a| a.role).collect(),
            dtype: "complex128-le".into(),
        };
        let text = serde_json::to_vec(&header)?;
        w.write_all(&(text.len() as u64).to_le_bytes())?;
        w.write_all(&text)?;
        for c in &self.data {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut text = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut text)?;
        let header: Header = serde_json::from_slice(&text)?;
        if header.dtype != "complex128-le"
            || header.shape.len() != header.extent.len()
            || header.shape.len() != header.roles.len()
        {
            return Err(Error::Grid("malformed grid header".into()));
        }
        let axes = header
            .shape
            .iter()
            .zip(&header.extent)
            .zip(&header.roles)
            .map(|((&n, &e), &role)| GridAxis::new(n, e, role))
            .collect::<Result<Vec<_>>>()?;
        let mut g = GridFunction::zeros(axes);
        let mut buf = [0u8; 8];
        for c in g.data.iter_mut() {
            r.read_exact(&mut buf)?;
            c.re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            c.im = f64::from_le_bytes(buf);
        }
        Ok(g)
    }
}

fn alternate(line: &mut [C64], scale: f64) {
    for (k, v) in line.iter_mut().enumerate() {
        *v *= if k % 2 == 0 { scale } else { -scale };
    }
}
