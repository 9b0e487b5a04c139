//! Composite Gauss–Legendre quadrature on panels.

use std::sync::OnceLock;

use crate::Complex64;

/// Nodes per panel of the composite rule.
pub const PANEL_NODES: usize = 16;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// The shared 16-point rule.
    pub fn standard() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of a composite rule on `[a, b]` split at `breakpoints`
/// (inside `(a, b)`) with panels no longer than `max_panel`.
pub fn composite_nodes(a: f64, b: f64, breakpoints: &[f64], max_panel: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::standard();
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        if hi <= lo {
            continue;
        }
        let panels = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for j in 0..panels {
            let mid = lo + (j as f64 + 0.5) * h;
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
    }
    (xs, ws)
}

/// `∫_a^b f` with the composite rule.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], max_panel: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (xs, ws) = composite_nodes(a, b, breakpoints, max_panel);
    xs.iter().zip(&ws).map(|(&x, &w)| f(x) * w).sum()
}

/// Real-valued variant of [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, breakpoints: &[f64], max_panel: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (xs, ws) = composite_nodes(a, b, breakpoints, max_panel);
    xs.iter().zip(&ws).map(|(&x, &w)| f(x) * w).sum()
}
