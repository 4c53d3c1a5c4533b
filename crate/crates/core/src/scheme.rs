//! Crank–Nicolson and backward Euler steps of the three-field system,
//! memory-integral recursion and pressure recovery.
//!
//! With σ = λ*κ₃ the memory integrals are stored in scaled form
//! Ĵ(t) = ∫₀ᵗ e^{(s−t)/σ} v(s) ds, which stays bounded by t·max|v| for any σ.
//! The unscaled accumulator ∫₀ᵗ e^{s/σ} v ds overflows as soon as t/σ
//! exceeds about 709.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, expm1};

use crate::assembly::{Constraints, DirichletSystem, FormMatrices, LoadVectors};
use crate::fe::DofLayout;
use crate::mms::PhysicalParams;
use crate::sparse::{Coo, Csr, LuOptions, SparseLu};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    CrankNicolson,
    BackwardEuler,
}

/// Quadrature used for the memory integral over one (half) step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelRule {
    /// Trapezoid rule applied to the product e^{s/σ} v(s).
    Trapezoid,
    /// Exact integration of the exponential against the linear interpolant
    /// of v (product integration); accurate for any ratio τ/σ.
    Exponential,
}

/// ∫ over a step of length δ of e^{(s−δ)/σ} v(s) ds ≈ `new`·v(δ) + `old`·v(0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWeights {
    pub new: f64,
    pub old: f64,
    /// e^{−δ/σ}
    pub decay: f64,
}

impl KernelWeights {
    pub fn new(rule: KernelRule, delta: f64, sigma: f64) -> KernelWeights {
        let x = delta / sigma;
        let decay = exp(-x);
        let (new, old) = match rule {
            KernelRule::Trapezoid => (0.5 * delta, 0.5 * delta * decay),
            KernelRule::Exponential if x < 0.1 => {
                // a/σ = Σ_k (−1)^{k+1} x^k/(k+1)!, b/σ = Σ_k (−1)^{k+1} k x^k/(k+1)!
                let (mut a, mut b) = (0.0, 0.0);
                let mut term = 1.0;
                for k in 1..=12 {
                    term *= -x / (k + 1) as f64;
                    a -= term;
                    b -= k as f64 * term;
                }
                (sigma * a, sigma * b)
            }
            KernelRule::Exponential => {
                let g = -expm1(-x) / x;
                (sigma * (1.0 - g), sigma * (g - decay))
            }
        };
        KernelWeights { new, old, decay }
    }
}

/// Ĵ ← decay·Ĵ + new·v_new + old·v_old, in place.
pub fn update_history(j: &mut [f64], v_new: &[f64], v_old: &[f64], w: &KernelWeights) {
    for ((ji, a), b) in j.iter_mut().zip(v_new).zip(v_old) {
        *ji = w.decay * *ji + w.new * a + w.old * b;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub tau: f64,
    pub t_final: f64,
    pub kind: SchemeKind,
    pub kernel: KernelRule,
    pub energy_log: bool,
}

impl SchemeConfig {
    pub fn new(tau: f64, t_final: f64, kind: SchemeKind, kernel: KernelRule) -> SchemeConfig {
        SchemeConfig { tau, t_final, kind, kernel, energy_log: false }
    }

    /// Number of uniform steps; T/τ has to be an integer up to rounding.
    pub fn steps(&self) -> Result<usize> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {}", self.tau)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("final time must be positive, got {}", self.t_final)));
        }
        let ratio = self.t_final / self.tau;
        let n = libm::round(ratio);
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
            return Err(Error::Config(format!(
                "final time {} is not an integer multiple of the time step {}",
                self.t_final, self.tau
            )));
        }
        Ok(n as usize)
    }
}

/// Solution and memory state at time level n.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    pub u: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// Recovered pressure on the P1 space.
    pub p: Vec<f64>,
    pub j_xi: Vec<f64>,
    pub j_eta: Vec<f64>,
    /// e^{−t_n/σ}, the decay applied to the initial-divergence term.
    pub memory_decay: f64,
    pub t: f64,
    pub n: usize,
}

impl StateVec {
    pub fn zeros(layout: &DofLayout) -> StateVec {
        let np = layout.p1_count;
        StateVec {
            u: vec![0.0; layout.u_len()],
            xi: vec![0.0; np],
            eta: vec![0.0; np],
            p: vec![0.0; np],
            j_xi: vec![0.0; np],
            j_eta: vec![0.0; np],
            memory_decay: 1.0,
            t: 0.0,
            n: 0,
        }
    }

    /// a·self + b·other on all vector fields; time data is taken from self.
    pub fn combine(&self, a: f64, other: &StateVec, b: f64) -> StateVec {
        let lin = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        StateVec {
            u: lin(&self.u, &other.u),
            xi: lin(&self.xi, &other.xi),
            eta: lin(&self.eta, &other.eta),
            p: lin(&self.p, &other.p),
            j_xi: lin(&self.j_xi, &other.j_xi),
            j_eta: lin(&self.j_eta, &other.j_eta),
            ..self.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.u, &self.xi, &self.eta, &self.p, &self.j_xi, &self.j_eta]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Everything a step needs besides the state: loads at both time levels,
/// Dirichlet values at the new level and the moments (div u₀, ψ).
#[derive(Debug, Clone, PartialEq)]
pub struct StepData {
    pub load_old: LoadVectors,
    pub load_new: LoadVectors,
    pub dirichlet: Constraints,
    pub div_u0: Vec<f64>,
}

impl StepData {
    pub fn combine(&self, a: f64, other: &StepData, b: f64) -> StepData {
        let lin = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() };
        let load = |x: &LoadVectors, y: &LoadVectors| LoadVectors { u: lin(&x.u, &y.u), p1: lin(&x.p1, &y.p1) };
        let mut dirichlet = self.dirichlet.clone();
        for (k, v) in dirichlet.values.iter_mut().enumerate() {
            *v = a * *v + b * other.dirichlet.values[k];
        }
        StepData {
            load_old: load(&self.load_old, &other.load_old),
            load_new: load(&self.load_new, &other.load_new),
            dirichlet,
            div_u0: lin(&self.div_u0, &other.div_u0),
        }
    }
}

// coefficients of the memory terms for one scheme
#[derive(Debug, Clone, Copy)]
struct MemoryCoefficients {
    // ξ-row: c_div·Bᵀu + c_xi·M(κ₃ξ − κ₁η) on the new level
    c_div: f64,
    c_mem: f64,
    // history weights applied to M·(κ₁Ĵη − κ₃Ĵξ) and M·(κ₁η − κ₃ξ)ⁿ
    c_hist: f64,
    c_old: f64,
    // extra half-weight on the old level (CN only: a·(vⁿ⁺¹ + vⁿ)/2 form)
    c_mem_old: f64,
    // factor in front of e^{−t/σ}(div u₀, ψ)
    c_d0: f64,
    // decay from t_n to the level where the ξ-row is posed
    d0_shift: f64,
}

fn memory_coefficients(params: &PhysicalParams, config: &SchemeConfig) -> MemoryCoefficients {
    let sigma = params.sigma();
    let tau = config.tau;
    match config.kind {
        SchemeKind::CrankNicolson => {
            // posed at t_{n+1/2}, multiplied through by 8σ
            let w = KernelWeights::new(config.kernel, 0.5 * tau, sigma);
            MemoryCoefficients {
                c_div: 4.0 * sigma,
                c_mem: 4.0 * w.new,
                c_hist: 8.0 * w.decay,
                c_old: 8.0 * w.old,
                c_mem_old: 4.0 * w.new,
                c_d0: 8.0 * sigma,
                d0_shift: w.decay,
            }
        }
        SchemeKind::BackwardEuler => {
            // posed at t_{n+1}, multiplied through by σ
            let w = KernelWeights::new(config.kernel, tau, sigma);
            MemoryCoefficients {
                c_div: sigma,
                c_mem: w.new,
                c_hist: w.decay,
                c_old: w.old,
                c_mem_old: 0.0,
                c_d0: sigma,
                d0_shift: w.decay,
            }
        }
    }
}

/// Block matrix over [u | ξ | η] of one step, before boundary conditions.
pub fn build_step_system(forms: &FormMatrices, layout: &DofLayout, params: &PhysicalParams, config: &SchemeConfig) -> Csr {
    let n = layout.total;
    let (xo, eo) = (layout.xi_offset, layout.eta_offset);
    let tau = config.tau;
    let (k1, k2, k3) = (params.kappa1, params.kappa2, params.kappa3);
    let mc = memory_coefficients(params, config);
    // CN averages the diffusion term over both levels
    let theta = match config.kind {
        SchemeKind::CrankNicolson => 0.5,
        SchemeKind::BackwardEuler => 1.0,
    };
    let nnz = forms.a_eps.nnz() + 2 * forms.b_div.nnz() + forms.mixed.nnz() + 4 * forms.mass.nnz();
    let mut c = Coo::with_capacity(n, n, nnz);
    c.push_block(&forms.a_eps, 0, 0, 1.0);
    c.push_block(&forms.b_div, 0, xo, -1.0);
    c.push_block(&forms.b_div_t, xo, 0, mc.c_div);
    c.push_block(&forms.mass, xo, xo, mc.c_mem * k3);
    c.push_block(&forms.mass, xo, eo, -mc.c_mem * k1);
    c.push_block(&forms.mixed, eo, 0, params.raw.lambda_star * k1 / tau);
    c.push_block(&forms.stiffness, eo, xo, theta * k1);
    c.push_block(&forms.mass, eo, eo, 1.0 / tau);
    c.push_block(&forms.stiffness, eo, eo, theta * k2);
    c.to_csr()
}

/// Factorized step operator with Dirichlet elimination, reused every step.
pub struct Stepper<'a> {
    forms: &'a FormMatrices,
    layout: &'a DofLayout,
    params: PhysicalParams,
    config: SchemeConfig,
    system: DirichletSystem,
    lu: SparseLu,
    mass_lu: SparseLu,
    memory: MemoryCoefficients,
    history: KernelWeights,
}

impl core::fmt::Debug for Stepper<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Stepper").field("config", &self.config).field("lu", &self.lu).finish()
    }
}

impl<'a> Stepper<'a> {
    pub fn new(
        forms: &'a FormMatrices,
        layout: &'a DofLayout,
        params: PhysicalParams,
        config: SchemeConfig,
        dirichlet_dofs: &[usize],
    ) -> Result<Stepper<'a>> {
        config.steps()?;
        let a = build_step_system(forms, layout, &params, &config);
        let system = DirichletSystem::new(&a, dirichlet_dofs)?;
        // eliminate displacement unknowns ahead of the P1 fields they couple to
        let priority: Vec<u8> = (0..layout.total).map(|i| u8::from(i >= layout.xi_offset)).collect();
        let lu = SparseLu::factorize_with(&system.matrix, Some(&priority), LuOptions::default())?;
        let mass_lu = SparseLu::factorize(&forms.mass)?;
        Ok(Stepper {
            forms,
            layout,
            params,
            config,
            system,
            lu,
            mass_lu,
            memory: memory_coefficients(&params, &config),
            history: KernelWeights::new(config.kernel, config.tau, params.sigma()),
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn system_matrix(&self) -> &Csr {
        &self.system.matrix
    }

    pub fn mass_solver(&self) -> &SparseLu {
        &self.mass_lu
    }

    /// Right-hand side of the step from `state` and `data`, Dirichlet rows included.
    pub fn rhs(&self, state: &StateVec, data: &StepData) -> Result<Vec<f64>> {
        let l = self.layout;
        let f = self.forms;
        let (k1, k2, k3) = (self.params.kappa1, self.params.kappa2, self.params.kappa3);
        let tau = self.config.tau;
        let mc = &self.memory;
        let np = l.p1_count;
        check_len(&data.load_new.u, l.u_len())?;
        check_len(&data.load_old.u, l.u_len())?;
        check_len(&data.load_new.p1, np)?;
        check_len(&data.load_old.p1, np)?;
        check_len(&data.div_u0, np)?;
        let mut rhs = vec![0.0; l.total];
        let (ru, rest) = rhs.split_at_mut(l.xi_offset);
        let (rx, re) = rest.split_at_mut(np);
        let w_old: Vec<f64> = state.eta.iter().zip(&state.xi).map(|(e, x)| k1 * e - k3 * x).collect();
        let w_hist: Vec<f64> = state.j_eta.iter().zip(&state.j_xi).map(|(e, x)| k1 * e - k3 * x).collect();
        let mem: Vec<f64> = (0..np).map(|i| mc.c_hist * w_hist[i] + mc.c_old * w_old[i]).collect();
        let d0 = mc.c_d0 * state.memory_decay * mc.d0_shift;
        for (r, v) in rx.iter_mut().zip(&data.div_u0) {
            *r = d0 * v;
        }
        match self.config.kind {
            SchemeKind::CrankNicolson => {
                for (r, (a, b)) in ru.iter_mut().zip(data.load_new.u.iter().zip(&data.load_old.u)) {
                    *r = a + b;
                }
                f.a_eps.matvec_add(-1.0, &state.u, ru);
                f.b_div.matvec_add(1.0, &state.xi, ru);

                f.b_div_t.matvec_add(-mc.c_div, &state.u, rx);
                let carried: Vec<f64> = (0..np).map(|i| mc.c_mem_old * w_old[i]).collect();
                f.mass.matvec_add(1.0, &carried, rx);
                f.mass.matvec_add(1.0, &mem, rx);

                for (r, (a, b)) in re.iter_mut().zip(data.load_new.p1.iter().zip(&data.load_old.p1)) {
                    *r = 0.5 * (a + b);
                }
                f.mass.matvec_add(1.0 / tau, &state.eta, re);
                let pv: Vec<f64> = (0..np).map(|i| k1 * state.xi[i] + k2 * state.eta[i]).collect();
                f.stiffness.matvec_add(-0.5, &pv, re);
            }
            SchemeKind::BackwardEuler => {
                ru.copy_from_slice(&data.load_new.u);
                f.mass.matvec_add(1.0, &mem, rx);
                re.copy_from_slice(&data.load_new.p1);
                f.mass.matvec_add(1.0 / tau, &state.eta, re);
            }
        }
        f.mixed.matvec_add(self.params.raw.lambda_star * k1 / tau, &state.u, re);
        self.system.apply(&mut rhs, &data.dirichlet)?;
        Ok(rhs)
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &StateVec, data: &StepData) -> Result<StateVec> {
        let rhs = self.rhs(state, data)?;
        let x = self.lu.solve(&rhs)?;
        let l = self.layout;
        let next_n = state.n + 1;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: next_n });
        }
        let u = x[..l.xi_offset].to_vec();
        let xi = x[l.xi_offset..l.eta_offset].to_vec();
        let eta = x[l.eta_offset..].to_vec();
        let p = self.recover_pressure(&u, &xi, &eta, &state.u)?;
        let mut j_xi = state.j_xi.clone();
        let mut j_eta = state.j_eta.clone();
        update_history(&mut j_xi, &xi, &state.xi, &self.history);
        update_history(&mut j_eta, &eta, &state.eta, &self.history);
        let next = StateVec {
            u,
            xi,
            eta,
            p,
            j_xi,
            j_eta,
            memory_decay: state.memory_decay * self.history.decay,
            t: next_n as f64 * self.config.tau,
            n: next_n,
        };
        if !next.is_finite() {
            return Err(Error::Divergence { step: next_n });
        }
        Ok(next)
    }

    /// p = κ₁ξ + κ₂η + λ*κ₁ q with q the L² projection of div(u − u_old)/τ.
    pub fn recover_pressure(&self, u: &[f64], xi: &[f64], eta: &[f64], u_old: &[f64]) -> Result<Vec<f64>> {
        let du: Vec<f64> = u.iter().zip(u_old).map(|(a, b)| (a - b) / self.config.tau).collect();
        let q = self.mass_lu.solve(&self.forms.b_div_t.matvec(&du))?;
        let pp = &self.params;
        Ok((0..xi.len())
            .map(|i| pp.kappa1 * xi[i] + pp.kappa2 * eta[i] + pp.raw.lambda_star * pp.kappa1 * q[i])
            .collect())
    }
}

fn check_len(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    Ok(())
}

/// σ‖ε(u)‖²_μ + κ₁‖ξ‖² + κ₂‖η‖², i.e. μλ*κ₃(ε(u), ε(u)) + κ₁(ξ, ξ) + κ₂(η, η).
pub fn discrete_energy(state: &StateVec, forms: &FormMatrices, params: &PhysicalParams) -> f64 {
    use crate::sparse::dot;
    params.sigma() * dot(&state.u, &forms.a_eps.matvec(&state.u))
        + params.kappa1 * dot(&state.xi, &forms.mass.matvec(&state.xi))
        + params.kappa2 * dot(&state.eta, &forms.mass.matvec(&state.eta))
}

/// Initial state from projected data: `u0` the elastic projection of u₀,
/// `p0`, `div_u0`, `div_ut0` the L² projections of p₀, div u₀, div u_t(0).
pub fn initial_state(params: &PhysicalParams, u0: Vec<f64>, p0: &[f64], div_u0: &[f64], div_ut0: &[f64]) -> StateVec {
    let r = &params.raw;
    let np = p0.len();
    let eta = (0..np).map(|i| r.c0 * p0[i] + r.alpha * div_u0[i]).collect();
    let xi = (0..np)
        .map(|i| r.alpha * p0[i] - params.lambda * div_u0[i] - r.lambda_star * div_ut0[i])
        .collect();
    StateVec {
        u: u0,
        xi,
        eta,
        p: p0.to_vec(),
        j_xi: vec![0.0; np],
        j_eta: vec![0.0; np],
        memory_decay: 1.0,
        t: 0.0,
        n: 0,
    }
}
