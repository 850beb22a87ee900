//! Steady states under weak cross-interactions: two uniform disks of the
//! single-species radius `R = sqrt(a_s/b_s)` whose centres sit `d` apart,
//! with `d / R` fixed by `A / B` alone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model_core::InteractionParams;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `A/B < 1`: the disks coincide.
    FullMix,
    /// `A/B = 1`, the pitchfork point.
    MixThreshold,
    /// `0 < d <= R`.
    Small,
    /// `R < d <= 2R`.
    Intermediate,
    /// `d > 2R`, disjoint disks.
    Separated,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FullMix => "full-mix",
            Regime::MixThreshold => "mix-threshold",
            Regime::Small => "small",
            Regime::Intermediate => "intermediate",
            Regime::Separated => "separated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationSolution {
    pub ratio_ab: f64,
    pub d_over_r: f64,
    pub regime: Regime,
    /// `|A/B(d) - ratio|` at the returned `d`; zero for closed-form regimes.
    pub residual: f64,
}

/// `int_{-gamma}^{gamma} ln(1 + delta^2 - 2 delta cos t) cos t dt` with
/// `gamma = arccos(delta / 2)`.
pub fn log_cos_integral(delta: f64) -> Result<f64> {
    let gamma = (0.5 * delta).clamp(-1.0, 1.0).acos();
    if gamma == 0.0 {
        return Ok(0.0);
    }
    // 1 + delta^2 - 2 delta cos t, written to stay accurate near t = 0.
    let f = |t: f64| ((1.0 - delta).powi(2) + 4.0 * delta * (0.5 * t).sin().powi(2)).ln() * t.cos();
    // Even integrand; the log is singular at t = 0 when delta = 1.
    let mut pts = vec![0.0];
    let mut h = gamma;
    for _ in 0..12 {
        h *= 0.25;
        pts.push(h);
    }
    pts.push(gamma);
    pts.sort_by(f64::total_cmp);
    Ok(2.0 * quad::integrate_breaks(f, &pts, 1e-14, 1e-13)?)
}

/// `gamma - (delta/4) sqrt(4 - delta^2)`.
fn lens_term(delta: f64) -> f64 {
    let gamma = (0.5 * delta).acos();
    gamma - 0.25 * delta * (4.0 - delta * delta).max(0.0).sqrt()
}

fn ratio_intermediate(delta: f64) -> Result<f64> {
    let i = log_cos_integral(delta)?;
    Ok(delta * delta / (1.0 + delta * delta / PI * lens_term(delta) + delta / (2.0 * PI) * i))
}

fn ratio_small(delta: f64) -> Result<f64> {
    let i = log_cos_integral(delta)?;
    Ok(PI * delta / (PI * delta + delta * lens_term(delta) + 0.5 * i))
}

/// `A/B` implied by a separation `d/R` in `(0, 2]`, by the small-`d` branch
/// for `d <= R` and the intermediate branch above.
pub fn ab_ratio_of_d(d_over_r: f64) -> Result<f64> {
    if !(d_over_r > 0.0 && d_over_r <= 2.0) {
        return Err(Error::OutOfRange(d_over_r));
    }
    if d_over_r <= 1.0 {
        ratio_small(d_over_r)
    } else {
        ratio_intermediate(d_over_r)
    }
}

/// Both branches at one point; used for the seam check at `d/R = 1`.
pub fn ab_ratio_branches(d_over_r: f64) -> Result<(f64, f64)> {
    if !(d_over_r > 0.0 && d_over_r <= 2.0) {
        return Err(Error::OutOfRange(d_over_r));
    }
    Ok((ratio_small(d_over_r)?, ratio_intermediate(d_over_r)?))
}

const SCAN_POINTS: usize = 201;

fn check_monotone() -> Result<()> {
    let mut prev = (0.0, 1.0);
    for k in 1..SCAN_POINTS {
        let x = 2.0 * k as f64 / (SCAN_POINTS - 1) as f64;
        let v = ab_ratio_of_d(x)?;
        if v <= prev.1 {
            return Err(Error::BracketingFailure(prev.0, x));
        }
        prev = (x, v);
    }
    Ok(())
}

/// Separation `d/R` for a given `A/B`.
pub fn d_of_ab_ratio(ratio: f64) -> Result<SeparationSolution> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::OutOfRange(ratio));
    }
    let sol = |d: f64, regime, residual| SeparationSolution { ratio_ab: ratio, d_over_r: d, regime, residual };
    if ratio < 1.0 {
        return Ok(sol(0.0, Regime::FullMix, 0.0));
    }
    if ratio == 1.0 {
        return Ok(sol(0.0, Regime::MixThreshold, 0.0));
    }
    if ratio == 4.0 {
        return Ok(sol(2.0, Regime::Intermediate, 0.0));
    }
    if ratio > 4.0 {
        return Ok(sol(ratio.sqrt(), Regime::Separated, 0.0));
    }
    check_monotone()?;
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ab_ratio_of_d(mid)? < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    let residual = (ab_ratio_of_d(d)? - ratio).abs();
    Ok(sol(d, if d <= 1.0 { Regime::Small } else { Regime::Intermediate }, residual))
}

/// `n` solutions for `A/B` evenly spaced in `[ratio_min, ratio_max]`.
pub fn curve_sample(ratio_min: f64, ratio_max: f64, n: usize) -> Result<Vec<SeparationSolution>> {
    if !(ratio_min > 0.0 && ratio_max > ratio_min) || n < 2 {
        return Err(Error::InvalidParams(format!("bad curve range [{ratio_min}, {ratio_max}] x {n}")));
    }
    check_monotone()?;
    (0..n)
        .into_par_iter()
        .map(|k| d_of_ab_ratio(ratio_min + (ratio_max - ratio_min) * k as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingOrder {
    pub radius: f64,
    pub rho: [f64; 2],
    pub warning: Option<String>,
}

/// Single-species disks: density `b_s M_i / (pi a_s)` on radius `sqrt(a_s/b_s)`.
pub fn leading_order_densities(p: &InteractionParams) -> LeadingOrder {
    let warning = (p.eta() > 0.1).then(|| format!("eta = {} is not small", p.eta()));
    LeadingOrder {
        radius: p.self_radius(),
        rho: [p.b_s() * p.m1() / (PI * p.a_s()), p.b_s() * p.m2() / (PI * p.a_s())],
        warning,
    }
}

/// `e_1` component of the cross-force balance between two disks of radius
/// `r` at distance `d`, with the effective cross coefficients of `p`.
/// Zero at a steady separation.
pub fn force_balance(p: &InteractionParams, d: f64) -> Result<f64> {
    let r = p.self_radius();
    let (a, b) = (p.a_c(), p.b_c());
    let delta = d / r;
    if !(delta > 0.0) {
        return Err(Error::OutOfRange(delta));
    }
    let pr4 = PI * PI * r.powi(4);
    if delta > 2.0 {
        return Ok(-a * pr4 / d + b * pr4 * d);
    }
    let lens = -a * PI * d * r * r * lens_term(delta);
    let whole = if delta > 1.0 { -a * pr4 / d } else { -a * PI * PI * d * r * r };
    let boundary = -a * PI * r.powi(3) * 0.5 * log_cos_integral(delta)?;
    Ok(lens + whole + boundary + b * pr4 * d)
}

/// Size of the individual terms in [`force_balance`].
pub fn force_scale(p: &InteractionParams, d: f64) -> f64 {
    let r = p.self_radius();
    let pr4 = PI * PI * r.powi(4);
    p.a_c() * pr4 / d.max(r) + p.b_c() * pr4 * d
}

/// [`force_balance`] by two-dimensional quadrature: the inner integral over
/// the second disk in closed form, the outer one over the first disk in
/// polar coordinates about its centre.
pub fn force_balance_oracle(p: &InteractionParams, d: f64) -> Result<f64> {
    let r = p.self_radius();
    let (a, b) = (p.a_c(), p.b_c());
    // x = (s cos phi, s sin phi), second centre at (d, 0).
    let field = |s: f64, phi: f64| {
        let (dx, dy) = (s * phi.cos() - d, s * phi.sin());
        let q2 = dx * dx + dy * dy;
        let rep = if q2 < r * r { PI * dx } else { PI * r * r * dx / q2 };
        a * rep - b * PI * r * r * dx
    };
    let radial = |phi: f64| -> Result<f64> {
        let mut pts = vec![0.0, r];
        let disc = r * r - (d * phi.sin()).powi(2);
        if disc > 0.0 {
            for s in [d * phi.cos() - disc.sqrt(), d * phi.cos() + disc.sqrt()] {
                if s > 0.0 && s < r {
                    pts.push(s);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        quad::integrate_breaks(|s| field(s, phi) * s, &pts, 1e-13, 1e-12)
    };
    let mut phis = vec![0.0, PI];
    if d > r {
        phis.push((r / d).asin());
    }
    phis.sort_by(f64::total_cmp);
    let mut err = None;
    let v = quad::integrate_breaks(
        |phi| match radial(phi) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        &phis,
        1e-12,
        1e-11,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(2.0 * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert!((ab_ratio_of_d(2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((ab_ratio_of_d(1e-6).unwrap() - 1.0).abs() < 1e-5);
    }
}
