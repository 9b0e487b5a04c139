//! Smooth cutoffs with frozen constants.
//!
//! Every cutoff is assembled from the `C^∞` step
//! `S(x) = e(x) / (e(x) + e(1-x))`, `e(x) = exp(-1/x)` for `x > 0`,
//! which is `0` for `x <= 0` and `1` for `x >= 1`.

use crate::profile::Profile1d;

fn e(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `C^∞` step from 0 (at `x <= 0`) to 1 (at `x >= 1`).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = e(x);
        a / (a + e(1.0 - x))
    }
}

/// Equal to 1 on `[rise_end, fall_start]`, supported in `(lo, hi)`.
pub fn plateau(x: f64, lo: f64, rise_end: f64, fall_start: f64, hi: f64) -> f64 {
    if x <= lo || x >= hi {
        0.0
    } else if x < rise_end {
        smooth_step((x - lo) / (rise_end - lo))
    } else if x <= fall_start {
        1.0
    } else {
        smooth_step((hi - x) / (hi - fall_start))
    }
}

/// Standard mollifier `exp(-1/(1-s²))` on `|s| < 1`.
pub fn mollifier(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// `exp(-1/((r-1/2)(2-r)))` on `(1/2, 2)`, scaled to peak value 1 at `r = 5/4`.
pub fn bump_phi(r: f64) -> f64 {
    let q = (r - 0.5) * (2.0 - r);
    if q <= 0.0 {
        0.0
    } else {
        (1.0 / 0.5625 - 1.0 / q).exp()
    }
}

/// The bump `φ` as a profile on `(1/2, 2)`.
pub fn bump_phi_profile() -> Profile1d {
    Profile1d::new("phi", (0.5, 2.0), bump_phi)
}

/// Bochner–Riesz cutoff `b`: supported in `(-1/4, 4)`, equal to 1 on `[-1/8, 1/8]`.
pub fn br_cutoff(s: f64) -> f64 {
    plateau(s, -0.25, -0.125, 0.125, 4.0)
}

/// Wave cutoff `ϑ`: supported in `(1/8, 8)`, equal to 1 on `[1/5, 5]`.
pub fn wave_cutoff(s: f64) -> f64 {
    plateau(s, 0.125, 0.2, 5.0, 8.0)
}

/// `χ₁`: supported in `(5/8, 17/8)`, equal to 1 on `[3/4, 2]`.
pub fn chi1(s: f64) -> f64 {
    plateau(s, 0.625, 0.75, 2.0, 2.125)
}

/// `χ`: supported in `(-4, 4)`, equal to 1 on `[-3, 3]`.
pub fn chi(s: f64) -> f64 {
    plateau(s, -4.0, -3.0, 3.0, 4.0)
}
