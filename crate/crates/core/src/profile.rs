//! Real profiles of one variable with a declared support.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};

/// Natural cubic spline through `(xs[i], ys[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return domain("spline needs at least two points and matching lengths");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("spline abscissae must be strictly increasing");
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return domain("spline ordinates must be finite");
        }
        // tridiagonal solve for second derivatives, natural ends
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * slope / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        Ok(Self { xs, ys, second })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Spline value; clamps to the end values outside the data range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let hi = self.xs.partition_point(|&v| v <= x).min(n - 1);
        let lo = hi - 1;
        let h = self.xs[hi] - self.xs[lo];
        let a = (self.xs[hi] - x) / h;
        let b = (x - self.xs[lo]) / h;
        a * self.ys[lo]
            + b * self.ys[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / 6.0
    }
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one variable that vanishes outside `support`.
///
/// `kinks` lists interior points where the function is not smooth; quadrature
/// rules split their panels there.
#[derive(Clone)]
pub struct Profile1d {
    label: String,
    support: (f64, f64),
    kinks: Vec<f64>,
    f: Func,
}

impl fmt::Debug for Profile1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile1d")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl Profile1d {
    pub fn new<F>(label: impl Into<String>, support: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.into(), support, kinks: Vec::new(), f: Arc::new(f) }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn zero() -> Self {
        Self::new("zero", (0.0, 0.0), |_| 0.0)
    }

    /// `max(0, 1 - |u|/h)`.
    pub fn tent(half_width: f64) -> Self {
        Self::new(format!("tent({half_width})"), (-half_width, half_width), move |u| {
            (1.0 - u.abs() / half_width).max(0.0)
        })
        .with_kinks(vec![-half_width, 0.0, half_width])
    }

    /// Cubic-spline interpolant of samples, zero outside `support`.
    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>, support: (f64, f64)) -> Result<Self> {
        let spline = CubicSpline::new(xs, ys)?;
        Ok(Self::new("sampled", support, move |x| spline.eval(x)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Profile value; exactly zero outside the closed support.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.support.0 || x > self.support.1 {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self {
            label: format!("{}*{c}", self.label),
            support: self.support,
            kinks: self.kinks.clone(),
            f: Arc::new(move |x| c * inner.eval(x)),
        }
    }

    /// `u ↦ f(u - shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let inner = self.clone();
        Self {
            label: format!("{}(.-{shift})", self.label),
            support: (self.support.0 + shift, self.support.1 + shift),
            kinks: self.kinks.iter().map(|k| k + shift).collect(),
            f: Arc::new(move |x| inner.eval(x - shift)),
        }
    }

    /// `x ↦ f(x) g(x)` on the intersection of supports.
    pub fn product(&self, other: &Profile1d) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let lo = self.support.0.max(other.support.0);
        let hi = self.support.1.min(other.support.1);
        let mut kinks = self.kinks.clone();
        kinks.extend_from_slice(&other.kinks);
        Self {
            label: format!("{}*{}", self.label, other.label),
            support: (lo, hi.max(lo)),
            kinks,
            f: Arc::new(move |x| a.eval(x) * b.eval(x)),
        }
    }

    /// True when every value on an `n`-point probe of the support is zero.
    pub fn is_identically_zero(&self, n: usize) -> bool {
        let (a, b) = self.support;
        if b <= a {
            return self.eval(a) == 0.0;
        }
        (0..=n).all(|i| self.eval(a + (b - a) * i as f64 / n as f64) == 0.0)
    }
}
