//! Complex fields on uniform periodic box grids.
//!
//! Axis `a` with extent `L` and resolution `n` has cell `h = L/n`, points
//! `x_j = (j - n/2) h` and DFT frequencies `k_j = 2π j / L` for `j < n/2`,
//! `2π (j - n) / L` otherwise. Values are stored row-major (last axis
//! fastest). A field in the frequency representation holds raw DFT
//! coefficients in standard FFT order; a multiplier field holds symbol values
//! at the DFT frequencies in the same order.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lorentz::{lorentz_quasinorm, LorentzParams, WeightedSampleSet};
use crate::Complex64;

pub const MAX_AXES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub extent: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(extent: f64, n: usize) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return domain(format!("axis extent must be positive, got {extent}"));
        }
        if !n.is_power_of_two() {
            return domain(format!("axis resolution must be a power of two, got {n}"));
        }
        Ok(Self { extent, n })
    }

    pub fn cell(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.cell()
    }

    pub fn freq(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * PI * m / self.extent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Space,
    Frequency,
}

/// A complex array over a box grid with 1 to 4 axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    axes: Vec<Axis>,
    values: Vec<Complex64>,
    repr: Representation,
}

impl GridField {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_AXES {
            return domain(format!("grids have 1 to {MAX_AXES} axes, got {}", axes.len()));
        }
        for a in &axes {
            Axis::new(a.extent, a.n)?;
        }
        let len: usize = axes.iter().map(|a| a.n).product();
        if values.len() != len {
            return domain(format!("grid expects {len} values, got {}", values.len()));
        }
        Ok(Self { axes, values, repr })
    }

    pub fn zeros(axes: Vec<Axis>, repr: Representation) -> Result<Self> {
        let len: usize = axes.iter().map(|a| a.n).product();
        Self::new(axes, vec![Complex64::new(0.0, 0.0); len], repr)
    }

    /// Samples `f(x)` at every spatial grid point.
    pub fn from_fn<F>(axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut g = Self::zeros(axes, Representation::Space)?;
        let mut x = vec![0.0; g.axes.len()];
        for i in 0..g.values.len() {
            g.coords_into(i, &mut x);
            g.values[i] = f(&x);
        }
        Ok(g)
    }

    /// Evaluates a symbol at every DFT frequency.
    pub fn symbol<F>(axes: Vec<Axis>, m: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut g = Self::zeros(axes, Representation::Frequency)?;
        let mut k = vec![0.0; g.axes.len()];
        for i in 0..g.values.len() {
            g.freqs_into(i, &mut k);
            g.values[i] = m(&k);
        }
        Ok(g)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::cell).product()
    }

    pub fn multi_index(&self, mut i: usize, out: &mut [usize]) {
        for (a, slot) in self.axes.iter().zip(out.iter_mut()).rev() {
            *slot = i % a.n;
            i /= a.n;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        self.axes.iter().zip(idx).fold(0, |acc, (a, &j)| acc * a.n + j)
    }

    pub fn coords_into(&self, i: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_AXES];
        self.multi_index(i, &mut idx[..self.axes.len()]);
        for (d, a) in self.axes.iter().enumerate() {
            out[d] = a.coord(idx[d]);
        }
    }

    pub fn freqs_into(&self, i: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_AXES];
        self.multi_index(i, &mut idx[..self.axes.len()]);
        for (d, a) in self.axes.iter().enumerate() {
            out[d] = a.freq(idx[d]);
        }
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.axes == other.axes
    }

    fn fft(&mut self, inverse: bool) {
        let mut planner = FftPlanner::new();
        let nd = self.axes.len();
        let dims: Vec<usize> = self.axes.iter().map(|a| a.n).collect();
        for axis in 0..nd {
            let n = dims[axis];
            let stride: usize = dims[axis + 1..].iter().product();
            let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let outer = self.values.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = self.values[base + j * stride];
                    }
                    plan.process(&mut line);
                    for (j, v) in line.iter().enumerate() {
                        self.values[base + j * stride] = *v;
                    }
                }
            }
        }
        if inverse {
            let scale = 1.0 / self.values.len() as f64;
            for v in &mut self.values {
                *v *= scale;
            }
        }
    }

    /// Forward DFT (unnormalised).
    pub fn to_frequency(&self) -> Result<GridField> {
        if self.repr != Representation::Space {
            return domain("field is already in the frequency representation");
        }
        let mut g = self.clone();
        g.fft(false);
        g.repr = Representation::Frequency;
        Ok(g)
    }

    /// Inverse DFT (normalised by the number of points).
    pub fn to_space(&self) -> Result<GridField> {
        if self.repr != Representation::Frequency {
            return domain("field is already in the space representation");
        }
        let mut g = self.clone();
        g.fft(true);
        g.repr = Representation::Space;
        Ok(g)
    }

    /// Cell-weighted magnitudes, the substrate for discrete `L^{p,ν}` norms.
    pub fn samples(&self) -> Result<WeightedSampleSet> {
        let w = self.cell_volume();
        WeightedSampleSet::from_complex(&self.values, vec![w; self.values.len()])
    }

    /// `(Σ h^d |f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.values.iter().map(|v| (v.norm() / scale).powf(p)).sum();
        scale * (s * self.cell_volume()).powf(1.0 / p)
    }

    pub fn lorentz_norm(&self, params: LorentzParams) -> Result<f64> {
        lorentz_quasinorm(&self.samples()?, params)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Fraction of `Σ|f|` carried by points within `margin` (a fraction of the
    /// half extent) of the box boundary along some axis.
    pub fn boundary_mass_fraction(&self, margin: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut x = vec![0.0; self.axes.len()];
        let mut edge = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            self.coords_into(i, &mut x);
            let near = self
                .axes
                .iter()
                .zip(&x)
                .any(|(a, &c)| c.abs() >= (1.0 - margin) * 0.5 * a.extent);
            if near {
                edge += v.norm();
            }
        }
        edge / total
    }

    /// Circular shift by whole cells along each axis.
    pub fn shifted(&self, shift: &[i64]) -> Result<GridField> {
        if shift.len() != self.axes.len() {
            return Err(Error::GridMismatch("shift has wrong number of axes".into()));
        }
        let mut out = self.clone();
        let mut idx = [0usize; MAX_AXES];
        let nd = self.axes.len();
        for i in 0..self.values.len() {
            self.multi_index(i, &mut idx[..nd]);
            for d in 0..nd {
                let n = self.axes[d].n as i64;
                idx[d] = (idx[d] as i64 + shift[d]).rem_euclid(n) as usize;
            }
            let j = self.flat_index(&idx[..nd]);
            out.values[j] = self.values[i];
        }
        Ok(out)
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &GridField, c: Complex64) -> Result<()> {
        if !self.same_grid(other) || self.repr != other.repr {
            return Err(Error::GridMismatch("cannot add fields on different grids".into()));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * c;
        }
        Ok(())
    }
}

/// `n` axes of equal extent and resolution.
pub fn cube(ndim: usize, extent: f64, n: usize) -> Result<Vec<Axis>> {
    let a = Axis::new(extent, n)?;
    Ok(vec![a; ndim])
}
