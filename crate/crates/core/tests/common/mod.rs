use conemult::bumps::{mollifier, plateau};
use conemult::profile::Profile1d;

/// Ten compactly supported profiles centred near 1.
pub fn profile_family() -> Vec<Profile1d> {
    let mut v = Vec::new();
    for w in [0.1, 0.15, 0.2, 0.25] {
        v.push(Profile1d::new(format!("mollifier_{w}"), (1.0 - w, 1.0 + w), move |s| mollifier((s - 1.0) / w)));
    }
    for w in [0.1, 0.2] {
        v.push(Profile1d::tent(w).shifted(1.0));
    }
    v.push(Profile1d::new("gauss", (0.75, 1.25), |s| {
        (-200.0 * (s - 1.0).powi(2)).exp() * mollifier(4.0 * (s - 1.0))
    }));
    v.push(Profile1d::new("skew", (0.8, 1.2), |s| (s - 0.8) * mollifier((s - 1.0) / 0.2)));
    v.push(Profile1d::new("oscillating", (0.8, 1.2), |s| (30.0 * s).cos() * mollifier((s - 1.0) / 0.2)));
    v.push(Profile1d::new("plateau", (0.75, 1.25), |s| plateau(s, 0.75, 0.85, 1.15, 1.25)));
    v
}
