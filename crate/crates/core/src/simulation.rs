//! Runs of the scheme against an exact solution: data at each time level,
//! initialization by projection and the time loop with error tracking.

use alloc::vec::Vec;

use crate::analysis::{error_norms, max_over_time, p2_vector_error, ErrorNorms, ErrorRecord, ERROR_QUADRATURE};
use crate::assembly::{
    assemble_forms, assemble_load, boundary_p1_nodes, boundary_p2_nodes, gravity_load, l2_project_p1, p1_moments,
    strain_moments, Constraints, DirichletSystem, FormMatrices, LoadData, LoadVectors,
};
use crate::fe::DofLayout;
use crate::mesh::{BoundaryTag, TagSet, TriMesh};
use crate::mms::{ExactSolution, PhysicalParams};
use crate::scheme::{discrete_energy, initial_state, SchemeConfig, StateVec, StepData, Stepper};
use crate::sparse::{dot, SparseLu};
use crate::{Error, Result};

/// Default exactness of the rule used for matrices and loads.
pub const ASSEMBLY_QUADRATURE: usize = 5;

/// Where each kind of boundary condition is imposed. Displacement is
/// prescribed on `u_dirichlet` and loaded by tractions on the rest; η is
/// prescribed on `eta_dirichlet` and loaded by the fluid flux on the rest.
///
/// The ξ equation contains no derivatives of ξ and needs no boundary data.
/// Prescribing ξ anyway (`xi_dirichlet`) replaces some of those equations by
/// nodal values; the extra constraint is consistent but inflates the
/// displacement error by an order of magnitude on the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySetup {
    pub u_dirichlet: TagSet,
    pub xi_dirichlet: TagSet,
    pub eta_dirichlet: TagSet,
}

impl Default for BoundarySetup {
    /// Displacement clamped on the right and bottom sides; tractions and
    /// fluxes everywhere else.
    fn default() -> BoundarySetup {
        BoundarySetup {
            u_dirichlet: TagSet::of(&[BoundaryTag::Gamma2, BoundaryTag::Gamma4]),
            xi_dirichlet: TagSet::EMPTY,
            eta_dirichlet: TagSet::EMPTY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureDegrees {
    pub assembly: usize,
    pub error: usize,
}

impl Default for QuadratureDegrees {
    fn default() -> QuadratureDegrees {
        QuadratureDegrees { assembly: ASSEMBLY_QUADRATURE, error: ERROR_QUADRATURE }
    }
}

/// Loads of an exact solution frozen at time `t`.
pub struct ExactLoad<'a> {
    pub exact: &'a dyn ExactSolution,
    pub t: f64,
}

impl LoadData for ExactLoad<'_> {
    fn body_force(&self, x: [f64; 2]) -> [f64; 2] {
        self.exact.body_force(x, self.t)
    }

    fn traction(&self, x: [f64; 2], tag: BoundaryTag) -> [f64; 2] {
        self.exact.traction(x, self.t, tag.outward_normal())
    }

    fn source(&self, x: [f64; 2]) -> f64 {
        self.exact.source(x, self.t)
    }

    // (K/μ_f)(∇p − ρ_f g)·n, the term left over from integrating the
    // diffusion by parts
    fn flux(&self, x: [f64; 2], tag: BoundaryTag) -> f64 {
        let pp = self.exact.params();
        let g = self.exact.grad_p(x, self.t);
        let n = tag.outward_normal();
        let rg = pp.raw.rho_g;
        pp.mobility() * ((g[0] - rg[0]) * n[0] + (g[1] - rg[1]) * n[1])
    }
}

/// Per-step diagnostics of a run. Field norms are L² norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub n: usize,
    pub t: f64,
    pub energy: f64,
    pub u_norm: f64,
    pub xi_norm: f64,
    pub eta_norm: f64,
    pub p_norm: f64,
    pub errors: ErrorNorms,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// One record per time level, t = 0 included.
    pub records: Vec<ErrorRecord>,
    pub diagnostics: Vec<Diagnostic>,
    pub final_state: StateVec,
    /// Maximum over all time levels of each error norm.
    pub max_errors: ErrorNorms,
}

/// Mesh, spaces and matrices of one problem, reusable across schemes and time steps.
pub struct Simulation<'a> {
    pub mesh: &'a TriMesh,
    pub layout: DofLayout,
    pub forms: FormMatrices,
    pub exact: &'a dyn ExactSolution,
    pub boundary: BoundarySetup,
    pub quadrature: QuadratureDegrees,
    dirichlet_dofs: Vec<usize>,
    u_nodes: Vec<usize>,
    xi_nodes: Vec<usize>,
    eta_nodes: Vec<usize>,
    // (div u₀, ψ)
    div_u0: Vec<f64>,
    gravity: Vec<f64>,
}

impl core::fmt::Debug for Simulation<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Simulation")
            .field("dofs", &self.layout.total)
            .field("boundary", &self.boundary)
            .field("quadrature", &self.quadrature)
            .finish()
    }
}

impl<'a> Simulation<'a> {
    pub fn new(
        mesh: &'a TriMesh,
        exact: &'a dyn ExactSolution,
        boundary: BoundarySetup,
        quadrature: QuadratureDegrees,
    ) -> Result<Simulation<'a>> {
        if boundary.u_dirichlet.is_empty() {
            return Err(Error::Config(
                "displacement must be prescribed on at least one side to fix rigid motions".into(),
            ));
        }
        let params = exact.params();
        let layout = DofLayout::new(mesh, 1)?;
        let forms = assemble_forms(mesh, &layout, params.mu, params.mobility(), quadrature.assembly)?;
        let u_nodes = boundary_p2_nodes(mesh, boundary.u_dirichlet);
        let xi_nodes = boundary_p1_nodes(mesh, boundary.xi_dirichlet);
        let eta_nodes = boundary_p1_nodes(mesh, boundary.eta_dirichlet);
        let mut dirichlet_dofs = Vec::with_capacity(2 * u_nodes.len() + xi_nodes.len() + eta_nodes.len());
        for c in 0..2 {
            dirichlet_dofs.extend(u_nodes.iter().map(|&k| layout.u_dof(c, k)));
        }
        dirichlet_dofs.extend(xi_nodes.iter().map(|&k| layout.xi_dof(k)));
        dirichlet_dofs.extend(eta_nodes.iter().map(|&k| layout.eta_dof(k)));
        let div_u0 = p1_moments(mesh, &layout, &|x| exact.div_u(x, 0.0), quadrature.assembly)?;
        let gravity = gravity_load(mesh, &layout, params.mobility(), params.raw.rho_g)?;
        Ok(Simulation {
            mesh,
            layout,
            forms,
            exact,
            boundary,
            quadrature,
            dirichlet_dofs,
            u_nodes,
            xi_nodes,
            eta_nodes,
            div_u0,
            gravity,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        self.exact.params()
    }

    /// Constrained global dofs in the order used by [`Simulation::dirichlet_values`].
    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    /// Exact boundary values at time `t`: u at the clamped P2 nodes and
    /// ξ, η at the prescribed vertices.
    pub fn dirichlet_values(&self, t: f64) -> Constraints {
        let coords = self.layout.p2_coordinates(self.mesh);
        let mut values = Vec::with_capacity(self.dirichlet_dofs.len());
        for c in 0..2 {
            values.extend(self.u_nodes.iter().map(|&k| self.exact.u(coords[k], t)[c]));
        }
        let verts = &self.mesh.vertices;
        values.extend(self.xi_nodes.iter().map(|&k| self.exact.xi(verts[k], t)));
        values.extend(self.eta_nodes.iter().map(|&k| self.exact.eta(verts[k], t)));
        // the node lists are duplicate free, so the checks of Constraints::set are not needed
        Constraints { dofs: self.dirichlet_dofs.clone(), values }
    }

    /// Load vectors at time `t`, gravity included.
    pub fn load(&self, t: f64) -> Result<LoadVectors> {
        let data = ExactLoad { exact: self.exact, t };
        let mut load = assemble_load(
            self.mesh,
            &self.layout,
            &data,
            self.boundary.u_dirichlet.complement(),
            self.boundary.eta_dirichlet.complement(),
            self.quadrature.assembly,
        )?;
        for (l, g) in load.p1.iter_mut().zip(&self.gravity) {
            *l += g;
        }
        Ok(load)
    }

    /// Step data for t_old → t_new; `load_old` may be passed in from the previous step.
    pub fn step_data(&self, t_new: f64, load_old: LoadVectors) -> Result<StepData> {
        Ok(StepData {
            load_old,
            load_new: self.load(t_new)?,
            dirichlet: self.dirichlet_values(t_new),
            div_u0: self.div_u0.clone(),
        })
    }

    /// Elastic projection of u(·, t): μ(ε(R u), ε(v)) = μ(ε(u), ε(v)) with
    /// the exact values on the clamped boundary.
    pub fn ritz_projection(&self, t: f64) -> Result<Vec<f64>> {
        let nu = self.layout.u_len();
        let u_dofs: Vec<usize> = self.dirichlet_dofs.iter().copied().filter(|&d| d < nu).collect();
        let system = DirichletSystem::new(&self.forms.a_eps, &u_dofs)?;
        let lu = SparseLu::factorize(&system.matrix)?;
        let mut rhs = strain_moments(
            self.mesh,
            &self.layout,
            self.params().mu,
            &|x| self.exact.grad_u(x, t),
            self.quadrature.assembly,
        )?;
        let all = self.dirichlet_values(t);
        let c = Constraints { dofs: all.dofs[..u_dofs.len()].to_vec(), values: all.values[..u_dofs.len()].to_vec() };
        system.apply(&mut rhs, &c)?;
        lu.solve(&rhs)
    }

    /// Initial state from the elastic projection of u₀ and L² projections of
    /// p₀, div u₀ and div u_t(0).
    pub fn initial_state(&self, mass_lu: &SparseLu) -> Result<StateVec> {
        let q = self.quadrature.assembly;
        let ex = self.exact;
        let u0 = self.ritz_projection(0.0)?;
        let p0 = l2_project_p1(self.mesh, &self.layout, mass_lu, &|x| ex.p(x, 0.0), q)?;
        let d0 = mass_lu.solve(&self.div_u0)?;
        let dt0 = l2_project_p1(self.mesh, &self.layout, mass_lu, &|x| ex.div_u_t(x, 0.0), q)?;
        Ok(initial_state(self.params(), u0, &p0, &d0, &dt0))
    }

    pub fn stepper(&self, config: SchemeConfig) -> Result<Stepper<'_>> {
        Stepper::new(&self.forms, &self.layout, *self.params(), config, &self.dirichlet_dofs)
    }

    pub fn errors(&self, state: &StateVec) -> Result<ErrorNorms> {
        error_norms(self.mesh, &self.layout, &state.u, &state.p, self.exact, state.t, self.quadrature.error)
    }

    pub fn p1_norm(&self, v: &[f64]) -> f64 {
        libm::sqrt(dot(v, &self.forms.mass.matvec(v)).max(0.0))
    }

    pub fn u_norm(&self, u: &[f64]) -> Result<f64> {
        let zero = p2_vector_error(self.mesh, &self.layout, u, &|_| [0.0; 2], &|_| [[0.0; 2]; 2], self.quadrature.error)?;
        Ok(zero.l2)
    }

    pub fn run(&self, config: SchemeConfig) -> Result<RunOutput> {
        self.run_with(config, &mut |_: &StateVec| {})
    }

    /// Runs to `config.t_final`, calling `observer` on every state including the initial one.
    pub fn run_with(&self, config: SchemeConfig, observer: &mut dyn FnMut(&StateVec)) -> Result<RunOutput> {
        let steps = config.steps()?;
        let stepper = self.stepper(config)?;
        let mut state = self.initial_state(stepper.mass_solver())?;
        let mut records = Vec::with_capacity(steps + 1);
        let mut diagnostics = Vec::with_capacity(steps + 1);
        let mut record = |s: &StateVec, records: &mut Vec<ErrorRecord>| -> Result<()> {
            let errors = self.errors(s)?;
            records.push(ErrorRecord { h: self.mesh.h, tau: config.tau, t: s.t, norms: errors });
            diagnostics.push(Diagnostic {
                n: s.n,
                t: s.t,
                energy: discrete_energy(s, &self.forms, self.params()),
                u_norm: self.u_norm(&s.u)?,
                xi_norm: self.p1_norm(&s.xi),
                eta_norm: self.p1_norm(&s.eta),
                p_norm: self.p1_norm(&s.p),
                errors,
            });
            Ok(())
        };
        record(&state, &mut records)?;
        observer(&state);
        let mut load_old = self.load(0.0)?;
        for n in 0..steps {
            let t_new = (n + 1) as f64 * config.tau;
            let data = self.step_data(t_new, load_old)?;
            state = stepper.step(&state, &data)?;
            load_old = data.load_new;
            record(&state, &mut records)?;
            observer(&state);
        }
        let max_errors = max_over_time(&records)?;
        Ok(RunOutput { records, diagnostics, final_state: state, max_errors })
    }
}
