//! Closed-form integrals over a uniform disk of radius `R` centred at the
//! origin, evaluated at a point at distance `r` from the centre.
//!
//! A radially symmetric piecewise constant density is a signed sum of such
//! disks, see [`Layer`].

use std::f64::consts::PI;

/// `int_{|y|<R} ln|x - y| dy`.
pub fn log_integral(r: f64, big_r: f64) -> f64 {
    let a = PI * big_r * big_r;
    if r < big_r {
        0.5 * PI * r * r + a * big_r.ln() - 0.5 * a
    } else {
        a * r.ln()
    }
}

/// `int_{|y|<R} |x - y|^2 dy`.
pub fn sq_dist_integral(r: f64, big_r: f64) -> f64 {
    let a = PI * big_r * big_r;
    a * r * r + 0.5 * a * big_r * big_r
}

/// Radial component of `int_{|y|<R} (x - y) / |x - y|^2 dy`.
pub fn log_grad_radial(r: f64, big_r: f64) -> f64 {
    if r < big_r {
        PI * r
    } else {
        PI * big_r * big_r / r
    }
}

/// Radial component of `int_{|y|<R} (x - y) dy`.
pub fn lin_radial(r: f64, big_r: f64) -> f64 {
    PI * big_r * big_r * r
}

/// Uniform disk of radius `radius` carrying density `density` (may be negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub radius: f64,
    pub density: f64,
}

/// `(K * rho)(r)` for `K = -a ln|x| + b |x|^2 / 2` and `rho` a layer stack.
pub fn potential(layers: &[Layer], a: f64, b: f64, r: f64) -> f64 {
    layers
        .iter()
        .map(|l| l.density * (-a * log_integral(r, l.radius) + 0.5 * b * sq_dist_integral(r, l.radius)))
        .sum()
}

/// Radial component of `(grad K * rho)(r)`.
pub fn potential_grad(layers: &[Layer], a: f64, b: f64, r: f64) -> f64 {
    layers
        .iter()
        .map(|l| l.density * (-a * log_grad_radial(r, l.radius) + b * lin_radial(r, l.radius)))
        .sum()
}

/// Coefficients `(alpha, beta)` with `(grad K * rho)(r) = alpha r + beta / r`
/// on an interval lying inside or outside each layer. `r_probe` picks the
/// interval.
pub fn grad_coefficients(layers: &[Layer], a: f64, b: f64, r_probe: f64) -> (f64, f64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    for l in layers {
        let area = PI * l.radius * l.radius;
        if r_probe < l.radius {
            alpha += l.density * (-a * PI + b * area);
        } else {
            alpha += l.density * b * area;
            beta -= l.density * a * area;
        }
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuity_at_rim() {
        let big_r = 0.7;
        let lo = log_integral(big_r * (1.0 - 1e-12), big_r);
        let hi = log_integral(big_r, big_r);
        assert!((lo - hi).abs() < 1e-10);
        assert!((log_grad_radial(big_r * (1.0 - 1e-12), big_r) - PI * big_r).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        let layers = [Layer { radius: 1.3, density: 0.4 }, Layer { radius: 0.5, density: -0.25 }];
        for &r in &[0.2, 0.9, 2.0] {
            let h = 1e-6;
            let fd = (potential(&layers, 1.5, 0.7, r + h) - potential(&layers, 1.5, 0.7, r - h)) / (2.0 * h);
            let g = potential_grad(&layers, 1.5, 0.7, r);
            assert!((fd - g).abs() < 1e-7, "{r}: {fd} vs {g}");
            let (al, be) = grad_coefficients(&layers, 1.5, 0.7, r);
            assert!((al * r + be / r - g).abs() < 1e-12);
        }
    }
}
