//! Model parameters, kernels, the dimensionless phase plane and the
//! admissible constant density values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise distances below this raise [`Error::SingularEvaluation`].
pub const DELTA_MIN: f64 = 1e-12;

/// Default relative tolerance for boundary tags in [`classify_region`].
pub const TAU_REGION: f64 = 1e-9;

/// Physical coefficients of the two-species model.
///
/// Kernels are `K(x) = -a ln|x| + b |x|^2 / 2` with `(a_s, b_s)` within a
/// species and `(eta a_c, eta b_c)` across species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct InteractionParams {
    a_s: f64,
    a_c: f64,
    b_s: f64,
    b_c: f64,
    m1: f64,
    m2: f64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    a_s: f64,
    a_c: f64,
    b_s: f64,
    b_c: f64,
    m1: f64,
    m2: f64,
    #[serde(default = "one")]
    eta: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawParams> for InteractionParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        InteractionParams::new(r.a_s, r.a_c, r.b_s, r.b_c, r.m1, r.m2)?.with_eta(r.eta)
    }
}

impl From<InteractionParams> for RawParams {
    fn from(p: InteractionParams) -> Self {
        RawParams {
            a_s: p.a_s,
            a_c: p.a_c,
            b_s: p.b_s,
            b_c: p.b_c,
            m1: p.m1,
            m2: p.m2,
            eta: p.eta,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl InteractionParams {
    /// Validated constructor with `eta = 1`. Rejects `m1 < m2`.
    pub fn new(a_s: f64, a_c: f64, b_s: f64, b_c: f64, m1: f64, m2: f64) -> Result<Self> {
        for (n, v) in [("a_s", a_s), ("a_c", a_c), ("b_s", b_s), ("b_c", b_c), ("M1", m1), ("M2", m2)] {
            check_positive(n, v)?;
        }
        if m1 < m2 {
            return Err(Error::InvalidParams(format!(
                "species 1 must be the heavier one (M1 = {m1} < M2 = {m2})"
            )));
        }
        Ok(InteractionParams { a_s, a_c, b_s, b_c, m1, m2, eta: 1.0 })
    }

    /// Unit self coefficients and unit light mass: `a_s = b_s = M2 = 1`,
    /// `a_c = A`, `b_c = B`, `M1 = M`.
    pub fn from_phase(a: f64, b: f64, m: f64) -> Result<Self> {
        InteractionParams::new(1.0, a, 1.0, b, m, 1.0)
    }

    /// Same coefficients with a cross-coupling factor `eta` in (0, 1].
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        check_positive("eta", eta)?;
        if eta > 1.0 {
            return Err(Error::InvalidParams(format!("eta must lie in (0, 1], got {eta}")));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn a_s(&self) -> f64 {
        self.a_s
    }
    pub fn b_s(&self) -> f64 {
        self.b_s
    }
    /// Raw cross repulsion coefficient, before the `eta` factor.
    pub fn a_c_raw(&self) -> f64 {
        self.a_c
    }
    /// Raw cross attraction coefficient, before the `eta` factor.
    pub fn b_c_raw(&self) -> f64 {
        self.b_c
    }
    /// Effective cross repulsion `eta a_c`.
    pub fn a_c(&self) -> f64 {
        self.eta * self.a_c
    }
    /// Effective cross attraction `eta b_c`.
    pub fn b_c(&self) -> f64 {
        self.eta * self.b_c
    }
    pub fn m1(&self) -> f64 {
        self.m1
    }
    pub fn m2(&self) -> f64 {
        self.m2
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Single-species disk radius `sqrt(a_s / b_s)`.
    pub fn self_radius(&self) -> f64 {
        (self.a_s / self.b_s).sqrt()
    }
}

/// Dimensionless coordinates `(A, B, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub a: f64,
    pub b: f64,
    pub m: f64,
}

impl PhasePoint {
    pub fn new(a: f64, b: f64, m: f64) -> Result<Self> {
        check_positive("A", a)?;
        check_positive("B", b)?;
        if !(m.is_finite() && m >= 1.0) {
            return Err(Error::InvalidParams(format!("M must be >= 1, got {m}")));
        }
        Ok(PhasePoint { a, b, m })
    }

    /// `c1(B) = (1 + M B) / (B + M)`.
    pub fn c1(&self) -> f64 {
        c1(self.b, self.m)
    }

    /// `c2(B) = (B + M) / (1 + M B)`.
    pub fn c2(&self) -> f64 {
        c2(self.b, self.m)
    }
}

pub fn c1(b: f64, m: f64) -> f64 {
    (1.0 + m * b) / (b + m)
}

pub fn c2(b: f64, m: f64) -> f64 {
    (b + m) / (1.0 + m * b)
}

pub fn to_phase_point(p: &InteractionParams) -> PhasePoint {
    PhasePoint { a: p.a_c() / p.a_s, b: p.b_c() / p.b_s, m: p.m1 / p.m2 }
}

/// Open regions of the phase plane plus the curves separating them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    BoundaryDiagonal,
    BoundaryC1,
    BoundaryC2,
    TriplePoint,
}

impl RegionId {
    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            RegionId::BoundaryDiagonal | RegionId::BoundaryC1 | RegionId::BoundaryC2 | RegionId::TriplePoint
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionId::D1 => "D1",
            RegionId::D2 => "D2",
            RegionId::D3 => "D3",
            RegionId::D4 => "D4",
            RegionId::D5 => "D5",
            RegionId::D6 => "D6",
            RegionId::BoundaryDiagonal => "BoundaryDiagonal",
            RegionId::BoundaryC1 => "BoundaryC1",
            RegionId::BoundaryC2 => "BoundaryC2",
            RegionId::TriplePoint => "TriplePoint",
        }
    }

    /// Membership in a union such as `[D3, D4, D5]`.
    pub fn in_any(self, set: &[RegionId]) -> bool {
        set.contains(&self)
    }
}

/// Classify `q` into D1..D6, or a boundary tag when it lies within the
/// relative tolerance `tau` of `B = A`, `A = c1(B)` or `A = c2(B)`.
pub fn classify_region(q: &PhasePoint, tau: f64) -> RegionId {
    let (a, b) = (q.a, q.b);
    let c1 = q.c1();
    let c2 = q.c2();
    let scale = a.max(b).max(1.0);

    if (a - 1.0).abs() <= 100.0 * tau && (b - 1.0).abs() <= 100.0 * tau {
        return RegionId::TriplePoint;
    }
    if (b - a).abs() <= tau * scale {
        return RegionId::BoundaryDiagonal;
    }
    if (a - c1).abs() <= tau * scale {
        return RegionId::BoundaryC1;
    }
    if (a - c2).abs() <= tau * scale {
        return RegionId::BoundaryC2;
    }

    if b < a {
        if a < c1 {
            RegionId::D1
        } else if c1 < a && a < c2 {
            RegionId::D2
        } else {
            RegionId::D3
        }
    } else if a > c1 {
        RegionId::D4
    } else if c2 < a && a < c1 {
        RegionId::D5
    } else {
        RegionId::D6
    }
}

/// The four admissible `(rho1, rho2)` pairs of a piecewise constant
/// equilibrium: empty, only species 2, only species 1, both species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityQuadruple {
    pub outside: (f64, f64),
    pub only2: (f64, f64),
    pub only1: (f64, f64),
    pub coexist: (f64, f64),
}

/// Species 1 density where it is alone.
pub fn rho1_alone(p: &InteractionParams) -> f64 {
    (p.b_s * p.m1 + p.b_c() * p.m2) / (PI * p.a_s)
}

/// Species 2 density where it is alone.
pub fn rho2_alone(p: &InteractionParams) -> f64 {
    (p.b_c() * p.m1 + p.b_s * p.m2) / (PI * p.a_s)
}

/// Both densities on a region of coexistence.
pub fn coexist_pair(p: &InteractionParams) -> Result<(f64, f64)> {
    let (a_s, b_s, a_c, b_c) = (p.a_s, p.b_s, p.a_c(), p.b_c());
    let den = a_s * a_s - a_c * a_c;
    if den.abs() <= 64.0 * f64::EPSILON * a_s * a_s {
        return Err(Error::CoexistenceSingular(den));
    }
    let s = a_s * b_s - a_c * b_c;
    let x = a_s * b_c - a_c * b_s;
    Ok(((s * p.m1 + x * p.m2) / (PI * den), (x * p.m1 + s * p.m2) / (PI * den)))
}

pub fn equilibrium_densities(p: &InteractionParams) -> Result<DensityQuadruple> {
    Ok(DensityQuadruple {
        outside: (0.0, 0.0),
        only2: (0.0, rho2_alone(p)),
        only1: (rho1_alone(p), 0.0),
        coexist: coexist_pair(p)?,
    })
}

fn kernel_grad(a: f64, b: f64, x: [f64; 2]) -> Result<[f64; 2]> {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2.sqrt() < DELTA_MIN {
        return Err(Error::SingularEvaluation(r2.sqrt()));
    }
    let s = -a / r2 + b;
    Ok([s * x[0], s * x[1]])
}

/// `grad K_s(x) = -a_s x / |x|^2 + b_s x`.
pub fn kernel_grad_self(p: &InteractionParams, x: [f64; 2]) -> Result<[f64; 2]> {
    kernel_grad(p.a_s, p.b_s, x)
}

/// `grad K_c(x)` with the `eta`-scaled cross coefficients.
pub fn kernel_grad_cross(p: &InteractionParams, x: [f64; 2]) -> Result<[f64; 2]> {
    kernel_grad(p.a_c(), p.b_c(), x)
}

/// `K(r) = -a ln r + b r^2 / 2`.
pub fn kernel_value(a: f64, b: f64, r: f64) -> f64 {
    -a * r.ln() + 0.5 * b * r * r
}
