//! First-order integrals over circles carrying a single Fourier mode, with
//! quadrature oracles, and the assembly of `Q_m` from them.
//!
//! The perturbed circle is `p(theta) = R e^{i theta} (1 + eps_N cos(m theta) + i eps_T sin(m theta))`.
//! Planar points are `[x, y]` pairs.

use nalgebra::Matrix6;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::equilibria::{build_equilibrium, target_shape, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model_core::InteractionParams;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedDisk {
    pub radius: f64,
    pub m: u32,
    pub eps_n: f64,
    pub eps_t: f64,
}

impl PerturbedDisk {
    pub fn circle(radius: f64, m: u32) -> Self {
        PerturbedDisk { radius, m, eps_n: 0.0, eps_t: 0.0 }
    }

    pub fn boundary(&self, theta: f64) -> [f64; 2] {
        to_pair(self.p(theta))
    }

    fn p(&self, theta: f64) -> Complex64 {
        let mt = self.m as f64 * theta;
        self.radius * Complex64::from_polar(1.0, theta) * Complex64::new(1.0 + self.eps_n * mt.cos(), self.eps_t * mt.sin())
    }

    fn dp(&self, theta: f64) -> Complex64 {
        let m = self.m as f64;
        let mt = m * theta;
        let e = Complex64::from_polar(1.0, theta);
        let inner = Complex64::new(1.0 + self.eps_n * mt.cos(), self.eps_t * mt.sin());
        let dinner = Complex64::new(-m * self.eps_n * mt.sin(), m * self.eps_t * mt.cos());
        self.radius * e * (Complex64::i() * inner + dinner)
    }
}

fn to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn from_pair(x: [f64; 2]) -> Complex64 {
    Complex64::new(x[0], x[1])
}

/// `int_{Omega} (x - y) dy` to first order in the amplitudes of `omega`.
pub fn attraction_integral(x: [f64; 2], omega: &PerturbedDisk) -> [f64; 2] {
    let r = omega.radius;
    let area = PI * r * r;
    let mut out = [x[0] * area, x[1] * area];
    if omega.m == 1 {
        out[0] -= PI * r.powi(3) * omega.eps_n;
    }
    out
}

/// First-order coefficients `(lead, c_N, c_T)` with
/// `int_{Omega_l} (x - y)/|x - y|^2 dy = pi R_l e^{i theta0} [lead + c_N cos(m theta0) + i c_T sin(m theta0)]`
/// for `x = p_j(theta0)`.
pub fn repulsion_coefficients(on: &PerturbedDisk, omega: &PerturbedDisk) -> (f64, f64, f64) {
    let (rj, rl) = (on.radius, omega.radius);
    let m = omega.m as i32;
    if rl == rj {
        (1.0, 0.0, on.eps_n + on.eps_t)
    } else if rl < rj {
        let b = rl / rj;
        (b, -b * on.eps_n + b.powi(m + 1) * omega.eps_n, b * on.eps_t + b.powi(m + 1) * omega.eps_n)
    } else {
        let b = rj / rl;
        (b, b * on.eps_n - b.powi(m - 1) * omega.eps_n, b * on.eps_t + b.powi(m - 1) * omega.eps_n)
    }
}

/// `int_{Omega_l} (x - y)/|x - y|^2 dy` at `x = p_j(theta0)`, first order in
/// all amplitudes. `on` is the circle carrying `x`; pass `omega` itself for
/// the same circle.
pub fn repulsion_integral(on: &PerturbedDisk, theta0: f64, omega: &PerturbedDisk) -> [f64; 2] {
    let (lead, cn, ct) = repulsion_coefficients(on, omega);
    let mt = omega.m as f64 * theta0;
    let w = Complex64::new(lead + cn * mt.cos(), ct * mt.sin());
    to_pair(PI * omega.radius * Complex64::from_polar(1.0, theta0) * w)
}

/// `int_0^{2pi} ln(1 + alpha^2 - 2 alpha cos(theta - theta0)) e^{i mu theta} dtheta`.
pub fn log_contour_integral(alpha: f64, mu: i32, theta0: f64) -> Result<Complex64> {
    if mu == 0 {
        return Err(Error::ZeroMode);
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")));
    }
    let k = mu.unsigned_abs() as i32;
    let pw = if alpha <= 1.0 { alpha.powi(k) } else { alpha.powi(-k) };
    Ok(-(2.0 * PI / k as f64) * pw * Complex64::from_polar(1.0, mu as f64 * theta0))
}

/// `int_0^{2pi} e^{i mu theta} / (1 + alpha^2 - 2 alpha cos(theta - theta0)) dtheta`, `alpha != 1`.
pub fn rational_contour_integral(alpha: f64, mu: i32, theta0: f64) -> Result<Complex64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")));
    }
    if (alpha - 1.0).abs() <= 1e-6 {
        return Err(Error::NearSingularAlpha(alpha));
    }
    let k = mu.unsigned_abs() as i32;
    let v = if alpha < 1.0 { alpha.powi(k) / (1.0 - alpha * alpha) } else { alpha.powi(-k) / (alpha * alpha - 1.0) };
    Ok(2.0 * PI * v * Complex64::from_polar(1.0, mu as f64 * theta0))
}

/// First-order rational part of the boundary log integral on the circle
/// carrying `x` itself.
pub fn same_circle_rational_part(radius: f64, m: u32, eps_n: f64, eps_t: f64, theta0: f64) -> Complex64 {
    if m == 1 {
        Complex64::new(-0.5 * radius * PI * (eps_n + eps_t), 0.0)
    } else {
        -radius * PI * eps_t * Complex64::from_polar(1.0, -(m as f64 - 1.0) * theta0)
    }
}

/// First-order rational part for `alpha = R_l / R_j != 1`.
pub fn rational_part(on: &PerturbedDisk, omega: &PerturbedDisk, theta0: f64) -> Complex64 {
    let alpha = omega.radius / on.radius;
    let rl = omega.radius;
    let m = omega.m as i32;
    let e = |k: f64| Complex64::from_polar(1.0, k * theta0);
    let (jn, jt, ln, lt) = (on.eps_n, on.eps_t, omega.eps_n, omega.eps_t);
    let mf = m as f64;
    if alpha < 1.0 {
        let pre = -0.5 * rl * PI * alpha * e(1.0);
        if m == 1 {
            pre * ((jn - jt - alpha * (ln - lt)) * e(1.0) + (jn + jt) * e(-1.0))
        } else {
            pre * ((jn - jt - alpha.powi(m) * (ln - lt)) * e(mf) + (jn + jt - alpha.powi(m - 2) * (ln - lt)) * e(-mf))
        }
    } else {
        let pre = 0.5 * rl * PI / alpha * e(1.0);
        if m == 1 {
            pre * ((jn + jt - (ln + lt) / alpha) * e(1.0) + (jn - jt - 2.0 * alpha * ln) * e(-1.0))
        } else {
            pre * ((jn + jt - alpha.powi(-m) * (ln + lt)) * e(mf) + (jn - jt - alpha.powi(2 - m) * (ln + lt)) * e(-mf))
        }
    }
}

/// Oracle for [`log_contour_integral`] and [`rational_contour_integral`]
/// by adaptive quadrature, with the mesh split at `theta0`.
pub fn contour_quadrature<F: Fn(f64) -> f64>(kernel: F, mu: i32, theta0: f64) -> Result<Complex64> {
    let t0 = theta0.rem_euclid(2.0 * PI);
    let mut pts = vec![0.0];
    for k in 1..=6 {
        for s in [-1.0, 1.0] {
            let t = t0 + s * 10f64.powi(-k);
            if t > 0.0 && t < 2.0 * PI {
                pts.push(t);
            }
        }
    }
    if t0 > 0.0 {
        pts.push(t0);
    }
    pts.push(2.0 * PI);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |th: f64| kernel(th - theta0);
    let re = quad::integrate_breaks(|th| f(th) * (mu as f64 * th).cos(), &pts, 1e-12, 1e-12)?;
    let im = quad::integrate_breaks(|th| f(th) * (mu as f64 * th).sin(), &pts, 1e-12, 1e-12)?;
    Ok(Complex64::new(re, im))
}

/// Oracle for [`attraction_integral`]: exact area integral over the
/// perturbed disk through the map `(t, theta) -> t p(theta)`.
pub fn attraction_oracle(x: [f64; 2], omega: &PerturbedDisk) -> Result<[f64; 2]> {
    let xc = from_pair(x);
    let jac = |th: f64| (omega.p(th).conj() * omega.dp(th)).im;
    let g = |th: f64| (0.5 * xc - omega.p(th) / 3.0) * jac(th);
    let re = quad::integrate(|th| g(th).re, 0.0, 2.0 * PI, 1e-13, 1e-13)?;
    let im = quad::integrate(|th| g(th).im, 0.0, 2.0 * PI, 1e-13, 1e-13)?;
    Ok([re, im])
}

/// Oracle for [`repulsion_integral`]: `-oint ln|x - y| n dS` over the exact
/// boundary of `omega`, where `n dS = -i p'(theta) dtheta`. When `x` lies on
/// that boundary the log singularity sits at `theta0` and the mesh is graded
/// towards it.
pub fn repulsion_oracle(on: &PerturbedDisk, theta0: f64, omega: &PerturbedDisk) -> Result<[f64; 2]> {
    let x = on.p(theta0);
    let g = |th: f64| -((x - omega.p(th)).norm().ln()) * (-Complex64::i() * omega.dp(th));
    let t0 = theta0.rem_euclid(2.0 * PI);
    let mut pts = vec![0.0, 2.0 * PI, t0];
    for k in 1..=8 {
        for s in [-1.0, 1.0] {
            let t = t0 + s * 2f64.powi(-2 * k);
            if t > 0.0 && t < 2.0 * PI {
                pts.push(t);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let re = quad::integrate_breaks(|th| g(th).re, &pts, 1e-12, 1e-12)?;
    let im = quad::integrate_breaks(|th| g(th).im, &pts, 1e-12, 1e-12)?;
    Ok([re, im])
}

/// Velocity of the boundary point `p_j(theta0)` of a target with every
/// circle perturbed, divided by `R_j e^{i theta0}`. Circles are ordered
/// outer, gap, disk.
fn scaled_velocity(
    p: &InteractionParams,
    circles: &[PerturbedDisk; 3],
    rho_ann: f64,
    rho_disk: f64,
    j: usize,
    theta0: f64,
) -> Complex64 {
    let on = &circles[j];
    let x = on.boundary(theta0);
    let rep = |l: usize| from_pair(repulsion_integral(on, theta0, &circles[l]));
    let att = |l: usize| from_pair(attraction_integral(x, &circles[l]));
    let (a_s, a_c, b_s, b_c) = (p.a_s(), p.a_c(), p.b_s(), p.b_c());
    let ring_rep = rep(0) - rep(1);
    let ring_att = att(0) - att(1);
    let v = if j < 2 {
        rho_ann * (a_s * ring_rep - b_s * ring_att) + rho_disk * (a_c * rep(2) - b_c * att(2))
    } else {
        rho_disk * (a_s * rep(2) - b_s * att(2)) + rho_ann * (a_c * ring_rep - b_c * ring_att)
    };
    v / (on.radius * Complex64::from_polar(1.0, theta0))
}

/// `Q_m` rebuilt column by column from the first-order integrals at one
/// observation angle `theta0`; `cos(m theta0)` and `sin(m theta0)` must not vanish.
pub fn assemble_q(kind: EquilibriumKind, p: &InteractionParams, m: u32, theta0: f64) -> Result<Matrix6<f64>> {
    if !kind.is_target() {
        return Err(Error::UnsupportedKind);
    }
    if m == 0 {
        return Err(Error::ZeroMode);
    }
    let cfg = build_equilibrium(kind, p)?;
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason));
    }
    let (m_ann, m_disk) = if kind == EquilibriumKind::TargetHeavyIn { (p.m2(), p.m1()) } else { (p.m1(), p.m2()) };
    let t = target_shape(p, m_ann, m_disk);
    let radii = [t.r_out, t.r_gap, t.r_disk];
    let (c, s) = ((m as f64 * theta0).cos(), (m as f64 * theta0).sin());
    if c.abs() < 1e-3 || s.abs() < 1e-3 {
        return Err(Error::InvalidParams(format!("theta0 = {theta0} puts m theta0 near an axis")));
    }
    let base = radii.map(|r| PerturbedDisk::circle(r, m));
    let w0: Vec<Complex64> = (0..3).map(|j| scaled_velocity(p, &base, t.rho_ann, t.rho_disk, j, theta0)).collect();
    let mut q = Matrix6::zeros();
    for col in 0..6 {
        let mut circles = base;
        if col % 2 == 0 {
            circles[col / 2].eps_n = 1.0;
        } else {
            circles[col / 2].eps_t = 1.0;
        }
        for j in 0..3 {
            let w = scaled_velocity(p, &circles, t.rho_ann, t.rho_disk, j, theta0) - w0[j];
            q[(2 * j, col)] = w.re / c;
            q[(2 * j + 1, col)] = w.im / s;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_circle_consistency() {
        let d = PerturbedDisk { radius: 1.3, m: 3, eps_n: 0.02, eps_t: -0.01 };
        let (lead, cn, ct) = repulsion_coefficients(&d, &d);
        assert_eq!((lead, cn), (1.0, 0.0));
        assert!((ct - 0.01).abs() < 1e-15);
    }
}
