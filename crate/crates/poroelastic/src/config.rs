//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use poroelastic_core::fe::MAX_QUADRATURE_DEGREE;
use poroelastic_core::mesh::{BoundaryTag, TagSet};
use poroelastic_core::mms::{derive_params, ForcingRoute, PhysicalParams, RawParams, SeparableSolution, TimeProfile};
use poroelastic_core::scheme::{KernelRule, SchemeConfig, SchemeKind};
use poroelastic_core::simulation::{BoundarySetup, QuadratureDegrees, ASSEMBLY_QUADRATURE};
use poroelastic_core::analysis::ERROR_QUADRATURE;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Ex41,
    Ex42,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Cn,
    Be,
}

impl Scheme {
    pub fn kind(self) -> SchemeKind {
        match self {
            Scheme::Cn => SchemeKind::CrankNicolson,
            Scheme::Be => SchemeKind::BackwardEuler,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Cn => "cn",
            Scheme::Be => "be",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Exponential,
    Trapezoid,
}

impl Kernel {
    pub fn rule(self) -> KernelRule {
        match self {
            Kernel::Exponential => KernelRule::Exponential,
            Kernel::Trapezoid => KernelRule::Trapezoid,
        }
    }
}

/// Source of f and φ for the two benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forcing {
    /// Closed-form expressions of the benchmark.
    #[default]
    Written,
    /// Generated from the derivatives of the exact solution.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
}

impl Side {
    fn tag(self) -> BoundaryTag {
        match self {
            Side::Gamma1 => BoundaryTag::Gamma1,
            Side::Gamma2 => BoundaryTag::Gamma2,
            Side::Gamma3 => BoundaryTag::Gamma3,
            Side::Gamma4 => BoundaryTag::Gamma4,
        }
    }
}

fn tags(sides: &[Side]) -> TagSet {
    let v: Vec<BoundaryTag> = sides.iter().map(|s| s.tag()).collect();
    TagSet::of(&v)
}

/// Sides carrying Dirichlet data for each field; the rest get natural data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default = "default_u_sides")]
    pub u_dirichlet: Vec<Side>,
    #[serde(default)]
    pub xi_dirichlet: Vec<Side>,
    #[serde(default)]
    pub eta_dirichlet: Vec<Side>,
}

fn default_u_sides() -> Vec<Side> {
    vec![Side::Gamma2, Side::Gamma4]
}

impl Default for BoundaryConfig {
    fn default() -> BoundaryConfig {
        BoundaryConfig { u_dirichlet: default_u_sides(), xi_dirichlet: Vec::new(), eta_dirichlet: Vec::new() }
    }
}

impl BoundaryConfig {
    pub fn setup(&self) -> BoundarySetup {
        BoundarySetup {
            u_dirichlet: tags(&self.u_dirichlet),
            xi_dirichlet: tags(&self.xi_dirichlet),
            eta_dirichlet: tags(&self.eta_dirichlet),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assembly: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<usize>,
}

/// Overrides of the physical parameters of the chosen example.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub young: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permeability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluid_viscosity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_g: Option<[f64; 2]>,
}

impl ParamOverrides {
    fn apply(&self, mut raw: RawParams) -> RawParams {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut raw.lambda_star, self.lambda_star);
        set(&mut raw.young, self.young);
        set(&mut raw.poisson, self.poisson);
        set(&mut raw.alpha, self.alpha);
        set(&mut raw.c0, self.c0);
        set(&mut raw.permeability, self.permeability);
        set(&mut raw.fluid_viscosity, self.fluid_viscosity);
        if let Some(g) = self.rho_g {
            raw.rho_g = g;
        }
        raw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Cubic,
    Exponential,
}

/// u_c = θ(t)(a_c sin πx sin πy + b_c x(x−1)y(y−1)), p = θ(t) c cos 2πx cos 2πy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSolution {
    #[serde(default)]
    pub profile: Profile,
    pub u_coeffs: [[f64; 2]; 2],
    pub p_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example: Example,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default)]
    pub forcing: Forcing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<Vec<f64>>,
    #[serde(rename = "T_final", alias = "t_final")]
    pub t_final: f64,
    /// Not echoed: it never affects results and outputs stay comparable across directories.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_plots: bool,
    /// Per-step diagnostics CSV for every level.
    #[serde(default = "default_true")]
    pub diagnostics: bool,
    /// Vertex values of all fields at the final time.
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSolution>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

/// What a subcommand needs from the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Single,
    Spatial,
    Temporal,
    Comparison,
}

impl StudyKind {
    pub fn label(self) -> &'static str {
        match self {
            StudyKind::Single => "run",
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
            StudyKind::Comparison => "compare",
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// The configuration as TOML, echoed into every output file.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("<unserializable configuration: {e}>"))
    }

    pub fn raw_params(&self) -> RawParams {
        let base = match self.example {
            Example::Ex42 => RawParams::example42(),
            Example::Ex41 | Example::Custom => RawParams::example41(),
        };
        self.params.apply(base)
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        derive_params(self.raw_params()).map_err(config_error)
    }

    pub fn exact_solution(&self) -> Result<SeparableSolution> {
        let params = self.physical_params()?;
        let route = |written: ForcingRoute| match self.forcing {
            Forcing::Written => written,
            Forcing::Derived => ForcingRoute::Derived,
        };
        Ok(match self.example {
            Example::Ex41 => SeparableSolution::example41(params).with_forcing(route(ForcingRoute::Example41)),
            Example::Ex42 => SeparableSolution::example42(params).with_forcing(route(ForcingRoute::Example42)),
            Example::Custom => {
                let c = self.custom.ok_or_else(|| CliError::Config("example = \"custom\" needs a [custom] section".into()))?;
                let profile = match c.profile {
                    Profile::Cubic => TimeProfile::Cubic,
                    Profile::Exponential => TimeProfile::Exponential,
                };
                SeparableSolution::custom(params, profile, c.u_coeffs, c.p_coeff)
            }
        })
    }

    pub fn quadrature_degrees(&self) -> QuadratureDegrees {
        QuadratureDegrees {
            assembly: self.quadrature.assembly.unwrap_or(ASSEMBLY_QUADRATURE),
            error: self.quadrature.error.unwrap_or(ERROR_QUADRATURE),
        }
    }

    pub fn scheme_config(&self, tau: f64, scheme: Scheme) -> SchemeConfig {
        SchemeConfig::new(tau, self.t_final, scheme.kind(), self.kernel.rule())
    }

    pub fn n_values(&self) -> Vec<usize> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => vec![*n],
            (None, Some(l)) => l.clone(),
            (None, None) => Vec::new(),
        }
    }

    pub fn tau_values(&self) -> Vec<f64> {
        match (&self.tau, &self.tau_list) {
            (Some(t), _) => vec![*t],
            (None, Some(l)) => l.clone(),
            (None, None) => Vec::new(),
        }
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(CliError::Config(m));
        if self.n.is_some() == self.n_list.is_some() {
            return err("exactly one of `n` and `n_list` must be given".into());
        }
        if self.tau.is_some() == self.tau_list.is_some() {
            return err("exactly one of `tau` and `tau_list` must be given".into());
        }
        let ns = self.n_values();
        if ns.is_empty() || ns.contains(&0) {
            return err("mesh subdivisions must be positive".into());
        }
        if ns.windows(2).any(|w| w[1] <= w[0]) {
            return err(format!("`n_list` must be strictly increasing (h strictly decreasing), got {ns:?}"));
        }
        let taus = self.tau_values();
        if taus.is_empty() {
            return err("`tau_list` is empty".into());
        }
        if taus.windows(2).any(|w| !(w[1] < w[0])) {
            return err(format!("`tau_list` must be strictly decreasing, got {taus:?}"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return err(format!("T_final must be positive, got {}", self.t_final));
        }
        for &tau in &taus {
            self.scheme_config(tau, self.scheme).steps().map_err(config_error)?;
        }
        for d in [self.quadrature.assembly, self.quadrature.error].into_iter().flatten() {
            if d == 0 || d > MAX_QUADRATURE_DEGREE {
                return err(format!("quadrature exactness {d} outside 1..={MAX_QUADRATURE_DEGREE}"));
            }
        }
        if self.example == Example::Custom && self.custom.is_none() {
            return err("example = \"custom\" needs a [custom] section".into());
        }
        if self.example != Example::Custom && self.custom.is_some() {
            return err("[custom] is only read when example = \"custom\"".into());
        }
        if self.boundary.u_dirichlet.is_empty() {
            return err("boundary.u_dirichlet must name at least one side".into());
        }
        self.physical_params()?;
        Ok(())
    }

    /// Checks specific to a subcommand.
    pub fn validate_for(&self, study: StudyKind) -> Result<()> {
        let (ns, taus) = (self.n_values().len(), self.tau_values().len());
        let err = |m: &str| Err(CliError::Config(format!("{}: {m}", study.label())));
        match study {
            StudyKind::Single if ns != 1 || taus != 1 => err("needs a single `n` and a single `tau`"),
            StudyKind::Spatial if ns < 2 => err("needs `n_list` with at least two entries"),
            StudyKind::Spatial if taus != 1 => err("needs a single `tau`"),
            StudyKind::Temporal if taus < 2 => err("needs `tau_list` with at least two entries"),
            StudyKind::Temporal if ns != 1 => err("needs a single `n`"),
            StudyKind::Comparison if self.example != Example::Ex42 => err("compares schemes on example = \"ex42\" only"),
            StudyKind::Comparison if ns < 2 => err("needs `n_list` with at least two entries"),
            StudyKind::Comparison if taus != 1 => err("needs a single `tau`"),
            _ => Ok(()),
        }
    }
}
