//! Material parameters and closed-form manufactured solutions.

use alloc::format;
use core::f64::consts::PI;

use libm::{cos, exp, sin};

use crate::{Error, Result};

/// Material parameters as given in an experiment description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub lambda_star: f64,
    pub young: f64,
    pub poisson: f64,
    pub alpha: f64,
    pub c0: f64,
    pub permeability: f64,
    pub fluid_viscosity: f64,
    /// ρ_f g, a constant vector.
    pub rho_g: [f64; 2],
}

impl RawParams {
    /// Parameter set of the cubic-in-time benchmark.
    pub fn example41() -> RawParams {
        RawParams {
            lambda_star: 1e-6,
            young: 1e7,
            poisson: 0.4,
            alpha: 0.5,
            c0: 0.5,
            permeability: 1e-9,
            fluid_viscosity: 1.0,
            rho_g: [0.0, 0.0],
        }
    }

    /// Parameter set of the exponential-in-time benchmark (stiffer solid).
    pub fn example42() -> RawParams {
        RawParams { young: 1e9, ..RawParams::example41() }
    }
}

/// Raw parameters plus the Lamé constants and the κ coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub raw: RawParams,
    pub lambda: f64,
    pub mu: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

impl PhysicalParams {
    /// Relaxation time σ = λ* κ₃ of the memory kernel.
    pub fn sigma(&self) -> f64 {
        self.raw.lambda_star * self.kappa3
    }

    /// K / μ_f.
    pub fn mobility(&self) -> f64 {
        self.raw.permeability / self.raw.fluid_viscosity
    }
}

pub fn derive_params(raw: RawParams) -> Result<PhysicalParams> {
    let RawParams { young, poisson, alpha, c0, lambda_star, permeability, fluid_viscosity, .. } = raw;
    if poisson >= 0.5 {
        return Err(Error::IncompressibleLimit { nu: poisson });
    }
    let positive = [
        ("E", young),
        ("nu", poisson),
        ("alpha", alpha),
        ("c0", c0),
        ("lambda_star", lambda_star),
        ("K", permeability),
        ("mu_f", fluid_viscosity),
    ];
    for (name, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("parameter {name} must be finite and positive, got {v}")));
        }
    }
    if !(raw.rho_g[0].is_finite() && raw.rho_g[1].is_finite()) {
        return Err(Error::Config(format!("rho_g must be finite, got {:?}", raw.rho_g)));
    }
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = young / (2.0 * (1.0 + poisson));
    let denom = alpha * alpha + lambda * c0;
    Ok(PhysicalParams {
        raw,
        lambda,
        mu,
        kappa1: alpha / denom,
        kappa2: lambda / denom,
        kappa3: c0 / denom,
    })
}

/// A smooth exact solution of the strong problem together with its data.
///
/// Gradients are indexed `g[c][d] = ∂_d u_c`.
pub trait ExactSolution: Sync {
    fn params(&self) -> &PhysicalParams;
    fn u(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn grad_u(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2];
    fn p(&self, x: [f64; 2], t: f64) -> f64;
    fn grad_p(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn div_u_t(&self, x: [f64; 2], t: f64) -> f64;
    fn body_force(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn source(&self, x: [f64; 2], t: f64) -> f64;

    fn div_u(&self, x: [f64; 2], t: f64) -> f64 {
        let g = self.grad_u(x, t);
        g[0][0] + g[1][1]
    }

    /// Fluid content η = c₀ p + α div u.
    fn eta(&self, x: [f64; 2], t: f64) -> f64 {
        let pp = self.params();
        pp.raw.c0 * self.p(x, t) + pp.raw.alpha * self.div_u(x, t)
    }

    /// Generalized pressure ξ = α p − λ div u − λ* div u_t.
    fn xi(&self, x: [f64; 2], t: f64) -> f64 {
        let pp = self.params();
        pp.raw.alpha * self.p(x, t) - pp.lambda * self.div_u(x, t) - pp.raw.lambda_star * self.div_u_t(x, t)
    }

    /// Boundary traction f₁ = μ ε(u) n + λ div u n + λ* div u_t n − α p n.
    fn traction(&self, x: [f64; 2], t: f64, n: [f64; 2]) -> [f64; 2] {
        let pp = self.params();
        let g = self.grad_u(x, t);
        let e = [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]];
        let s = pp.lambda * (g[0][0] + g[1][1]) + pp.raw.lambda_star * self.div_u_t(x, t) - pp.raw.alpha * self.p(x, t);
        [
            pp.mu * (e[0][0] * n[0] + e[0][1] * n[1]) + s * n[0],
            pp.mu * (e[1][0] * n[0] + e[1][1] * n[1]) + s * n[1],
        ]
    }
}

/// Time factor θ(t) shared by all fields of a separable solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeProfile {
    /// θ = t³
    Cubic,
    /// θ = eᵗ
    Exponential,
}

impl TimeProfile {
    pub fn value(self, t: f64) -> f64 {
        match self {
            TimeProfile::Cubic => t * t * t,
            TimeProfile::Exponential => exp(t),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            TimeProfile::Cubic => 3.0 * t * t,
            TimeProfile::Exponential => exp(t),
        }
    }
}

/// Which formulas supply f and φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingRoute {
    /// Assembled from the analytic derivatives of the shape functions.
    Derived,
    /// Closed-form expressions written out for the cubic benchmark.
    Example41,
    /// Closed-form expressions written out for the exponential benchmark.
    Example42,
}

/// u_c = θ(t)(a_c S + b_c Q), p = θ(t) c C with
/// S = sin πx sin πy, Q = x(x−1)y(y−1), C = cos 2πx cos 2πy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSolution {
    pub params: PhysicalParams,
    pub profile: TimeProfile,
    /// (a, b) for each displacement component.
    pub u_coeffs: [[f64; 2]; 2],
    pub p_coeff: f64,
    pub forcing: ForcingRoute,
}

// value, gradient and Hessian of a spatial shape
struct Shape {
    v: f64,
    g: [f64; 2],
    h: [[f64; 2]; 2],
}

fn shape_s(x: [f64; 2]) -> Shape {
    let (sx, cx, sy, cy) = (sin(PI * x[0]), cos(PI * x[0]), sin(PI * x[1]), cos(PI * x[1]));
    let p2 = PI * PI;
    Shape {
        v: sx * sy,
        g: [PI * cx * sy, PI * sx * cy],
        h: [[-p2 * sx * sy, p2 * cx * cy], [p2 * cx * cy, -p2 * sx * sy]],
    }
}

fn shape_q(x: [f64; 2]) -> Shape {
    let (qx, qy) = (x[0] * (x[0] - 1.0), x[1] * (x[1] - 1.0));
    let (dx, dy) = (2.0 * x[0] - 1.0, 2.0 * x[1] - 1.0);
    Shape { v: qx * qy, g: [dx * qy, qx * dy], h: [[2.0 * qy, dx * dy], [dx * dy, 2.0 * qx]] }
}

fn shape_c(x: [f64; 2]) -> Shape {
    let w = 2.0 * PI;
    let (sx, cx, sy, cy) = (sin(w * x[0]), cos(w * x[0]), sin(w * x[1]), cos(w * x[1]));
    Shape {
        v: cx * cy,
        g: [-w * sx * cy, -w * cx * sy],
        h: [[-w * w * cx * cy, w * w * sx * sy], [w * w * sx * sy, -w * w * cx * cy]],
    }
}

impl SeparableSolution {
    /// u = t³(sin πx sin πy, x(x−1)y(y−1)), p = t³ cos 2πx cos 2πy.
    pub fn example41(params: PhysicalParams) -> SeparableSolution {
        SeparableSolution {
            params,
            profile: TimeProfile::Cubic,
            u_coeffs: [[1.0, 0.0], [0.0, 1.0]],
            p_coeff: 1.0,
            forcing: ForcingRoute::Example41,
        }
    }

    /// u = eᵗ(x(x−1)y(y−1), x(x−1)y(y−1)), p = eᵗ cos 2πx cos 2πy.
    pub fn example42(params: PhysicalParams) -> SeparableSolution {
        SeparableSolution {
            params,
            profile: TimeProfile::Exponential,
            u_coeffs: [[0.0, 1.0], [0.0, 1.0]],
            p_coeff: 1.0,
            forcing: ForcingRoute::Example42,
        }
    }

    pub fn custom(params: PhysicalParams, profile: TimeProfile, u_coeffs: [[f64; 2]; 2], p_coeff: f64) -> SeparableSolution {
        SeparableSolution { params, profile, u_coeffs, p_coeff, forcing: ForcingRoute::Derived }
    }

    pub fn with_forcing(mut self, forcing: ForcingRoute) -> SeparableSolution {
        self.forcing = forcing;
        self
    }

    // spatial parts of u_c: value, gradient, Hessian
    fn u_shape(&self, c: usize, x: [f64; 2]) -> Shape {
        let (s, q) = (shape_s(x), shape_q(x));
        let [a, b] = self.u_coeffs[c];
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = a * s.h[i][j] + b * q.h[i][j];
            }
        }
        Shape { v: a * s.v + b * q.v, g: [a * s.g[0] + b * q.g[0], a * s.g[1] + b * q.g[1]], h }
    }

    fn derived_force(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let pp = &self.params;
        let th = self.profile.value(t);
        let dth = self.profile.derivative(t);
        let u0 = self.u_shape(0, x);
        let u1 = self.u_shape(1, x);
        let lap = [u0.h[0][0] + u0.h[1][1], u1.h[0][0] + u1.h[1][1]];
        // ∇ div of the spatial part
        let gdiv = [u0.h[0][0] + u1.h[1][0], u0.h[0][1] + u1.h[1][1]];
        let gp = shape_c(x).g;
        let mut f = [0.0; 2];
        for c in 0..2 {
            f[c] = -th * (0.5 * pp.mu * (lap[c] + gdiv[c]) + pp.lambda * gdiv[c]) - pp.raw.lambda_star * dth * gdiv[c]
                + pp.raw.alpha * th * self.p_coeff * gp[c];
        }
        f
    }

    fn derived_source(&self, x: [f64; 2], t: f64) -> f64 {
        let pp = &self.params;
        let th = self.profile.value(t);
        let dth = self.profile.derivative(t);
        let c = shape_c(x);
        let div = self.u_shape(0, x).g[0] + self.u_shape(1, x).g[1];
        let lap_p = self.p_coeff * (c.h[0][0] + c.h[1][1]);
        dth * (pp.raw.c0 * self.p_coeff * c.v + pp.raw.alpha * div) - pp.mobility() * th * lap_p
    }
}

// Written-out forcing of the cubic benchmark. Every term of f₂ carries t³
// or t², and the diffusion contribution to φ enters with a plus sign
// (−(K/μ_f)Δp with Δp = −8π² p).
fn example41_force(pp: &PhysicalParams, x: [f64; 2], t: f64) -> [f64; 2] {
    let (mu, la, ls, al) = (pp.mu, pp.lambda, pp.raw.lambda_star, pp.raw.alpha);
    let (x, y) = (x[0], x[1]);
    let p2 = PI * PI;
    let (t2, t3) = (t * t, t * t * t);
    let s = sin(PI * x) * sin(PI * y);
    let cc = cos(PI * x) * cos(PI * y);
    let f1 = t3 * (p2 * (1.5 * mu + la) * s - 2.0 * al * PI * sin(2.0 * PI * x) * cos(2.0 * PI * y))
        + t2 * (3.0 * p2 * ls * s - 3.0 * ls * (2.0 * x - 1.0) * (2.0 * y - 1.0))
        - t3 * (0.5 * mu + la) * (2.0 * x - 1.0) * (2.0 * y - 1.0);
    let f2 = t3 * (-p2 * (0.5 * mu + la) * cc - 2.0 * al * PI * cos(2.0 * PI * x) * sin(2.0 * PI * y))
        + t2 * (-3.0 * p2 * ls * cc - 6.0 * ls * x * (x - 1.0))
        - 2.0 * t3 * (mu + la) * x * (x - 1.0)
        - t3 * mu * y * (y - 1.0);
    [f1, f2]
}

fn example41_source(pp: &PhysicalParams, x: [f64; 2], t: f64) -> f64 {
    let (c0, al) = (pp.raw.c0, pp.raw.alpha);
    let (x, y) = (x[0], x[1]);
    let c = cos(2.0 * PI * x) * cos(2.0 * PI * y);
    3.0 * t * t * (c0 * c + al * PI * cos(PI * x) * sin(PI * y) + al * x * (x - 1.0) * (2.0 * y - 1.0))
        + 8.0 * PI * PI * pp.mobility() * t * t * t * c
}

fn example42_force(pp: &PhysicalParams, x: [f64; 2], t: f64) -> [f64; 2] {
    let (mu, la, ls, al) = (pp.mu, pp.lambda, pp.raw.lambda_star, pp.raw.alpha);
    let (x, y) = (x[0], x[1]);
    let (qx, qy) = (x * (x - 1.0), y * (y - 1.0));
    let dd = (2.0 * x - 1.0) * (2.0 * y - 1.0);
    let et = exp(t);
    let f1 = et
        * (-mu * (2.0 * qy + qx + 0.5 * dd) - (la + ls) * (2.0 * qy + dd)
            - 2.0 * PI * al * sin(2.0 * PI * x) * cos(2.0 * PI * y));
    let f2 = et
        * (-mu * (qy + 2.0 * qx + 0.5 * dd) - (la + ls) * (dd + 2.0 * qx)
            - 2.0 * PI * al * cos(2.0 * PI * x) * sin(2.0 * PI * y));
    [f1, f2]
}

fn example42_source(pp: &PhysicalParams, x: [f64; 2], t: f64) -> f64 {
    let (c0, al) = (pp.raw.c0, pp.raw.alpha);
    let (x, y) = (x[0], x[1]);
    let c = cos(2.0 * PI * x) * cos(2.0 * PI * y);
    exp(t)
        * ((c0 + 8.0 * PI * PI * pp.mobility()) * c
            + al * ((2.0 * x - 1.0) * y * (y - 1.0) + x * (x - 1.0) * (2.0 * y - 1.0)))
}

impl ExactSolution for SeparableSolution {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn u(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let th = self.profile.value(t);
        [th * self.u_shape(0, x).v, th * self.u_shape(1, x).v]
    }

    fn grad_u(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let th = self.profile.value(t);
        let (a, b) = (self.u_shape(0, x).g, self.u_shape(1, x).g);
        [[th * a[0], th * a[1]], [th * b[0], th * b[1]]]
    }

    fn p(&self, x: [f64; 2], t: f64) -> f64 {
        self.profile.value(t) * self.p_coeff * shape_c(x).v
    }

    fn grad_p(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = self.profile.value(t) * self.p_coeff;
        let g = shape_c(x).g;
        [s * g[0], s * g[1]]
    }

    fn div_u_t(&self, x: [f64; 2], t: f64) -> f64 {
        self.profile.derivative(t) * (self.u_shape(0, x).g[0] + self.u_shape(1, x).g[1])
    }

    fn body_force(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        match self.forcing {
            ForcingRoute::Derived => self.derived_force(x, t),
            ForcingRoute::Example41 => example41_force(&self.params, x, t),
            ForcingRoute::Example42 => example42_force(&self.params, x, t),
        }
    }

    fn source(&self, x: [f64; 2], t: f64) -> f64 {
        match self.forcing {
            ForcingRoute::Derived => self.derived_source(x, t),
            ForcingRoute::Example41 => example41_source(&self.params, x, t),
            ForcingRoute::Example42 => example42_source(&self.params, x, t),
        }
    }
}
