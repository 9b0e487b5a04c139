//! Bessel functions `J_ν` of integer and half-integer order.
//!
//! Integer orders use the power series for `x <= 4`, Miller's backward
//! recurrence up to `x = 20` and the Hankel asymptotic expansion beyond.
//! Half-integer orders go through spherical Bessel functions: power series
//! below the turning point, upward recurrence from `sin`/`cos` above it.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Argument at which integer orders switch to the asymptotic expansion.
pub const ASYMPTOTIC_SWITCH: f64 = 20.0;

const SERIES_LIMIT: f64 = 4.0;

/// An order `ν ∈ {k/2 : k >= 0}`, stored as `2ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(order: f64) -> Result<Self> {
        let twice = 2.0 * order;
        if !(order >= 0.0 && twice.fract() == 0.0 && twice < 1.0e6) {
            return domain(format!(
                "Bessel order must be a nonnegative integer or half-integer, got {order}"
            ));
        }
        Ok(Self(twice as u32))
    }

    /// Order `d/2 - 1` of the Hankel kernel in dimension `d >= 2`.
    pub fn for_dimension(d: usize) -> Result<Self> {
        if d < 2 {
            return domain(format!("radial transforms need d >= 2, got {d}"));
        }
        Ok(Self(d as u32 - 2))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

/// `J_ν(x)` for `x >= 0`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    let order = BesselOrder::new(order)?;
    if !(x >= 0.0 && x.is_finite()) {
        return domain(format!("Bessel argument must be finite and nonnegative, got {x}"));
    }
    Ok(bessel_j_order(order, x))
}

pub(crate) fn bessel_j_order(order: BesselOrder, x: f64) -> f64 {
    if order.is_integer() {
        jn(order.0 / 2, x)
    } else {
        j_half(order.0 / 2, x)
    }
}

/// `J_ν(x) / x^ν`, continuous at `x = 0` where it equals `1 / (2^ν Γ(ν+1))`.
pub(crate) fn bessel_j_scaled(order: BesselOrder, x: f64) -> f64 {
    let nu = order.value();
    if x < 1.0 {
        // power series of J_ν(x)/x^ν
        let q = -0.25 * x * x;
        let mut term = 1.0 / (2f64.powf(nu) * gamma_half(order.0 + 2));
        let mut sum = term;
        for k in 1..60 {
            term *= q / (k as f64 * (k as f64 + nu));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        bessel_j_order(order, x) / x.powf(nu)
    }
}

/// `Γ(k/2)` for `k >= 1`.
fn gamma_half(k: u32) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut a = if k % 2 == 0 { 1.0 } else { 0.5 };
    while a < k as f64 / 2.0 - 1e-9 {
        g *= a;
        a += 1.0;
    }
    g
}

/// Surface area `|S^{d-1}| = 2 π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d as u32)
}

fn jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        return jn_series(n, x);
    }
    if x >= ASYMPTOTIC_SWITCH {
        if let Some(v) = asymptotic(n as f64, x) {
            return v;
        }
    }
    jn_miller(n, x)
}

fn jn_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..100 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence normalised by `J_0 + 2 Σ J_{2k} = 1`.
fn jn_miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut m = (top + 30.0 + (40.0 * top).sqrt()) as u32;
    m += m % 2;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut result = 0.0;
    let mut k = m;
    while k > 0 {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        // cur holds J_k (unnormalised)
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        if k == n {
            result = cur;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * cur;
        }
    }
    if n == 0 {
        result = cur;
    }
    norm += cur;
    result / norm
}

/// Hankel expansion; `None` when the series does not reach full accuracy.
fn asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let a = term.abs();
        if a > last {
            break;
        }
        last = a;
        // a_k contributes to Q for odd k, P for even k, alternating in pairs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if a < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `J_{l+1/2}(x) = sqrt(2x/π) j_l(x)`.
fn j_half(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (2.0 * x / PI).sqrt() * spherical_j(l, x)
}

fn spherical_j(l: u32, x: f64) -> f64 {
    if x < l as f64 + 2.0 {
        let mut term = 1.0;
        for k in 1..=l {
            term *= x / (2 * k + 1) as f64;
        }
        let q = -0.5 * x * x;
        let mut sum = term;
        for k in 1..200 {
            term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
