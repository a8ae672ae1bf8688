//! Time steppers for the non-local model and the local LWR reference.

mod cfl;
mod convolution;
mod flux;
mod run;
mod step;

pub use cfl::{cfl_lambda_godunov, cfl_lambda_local, cfl_lambda_lxf, default_lxf_alpha, godunov_bound};
pub use convolution::{convolve_velocity, ConvolutionBackend, Convolver};
pub use flux::{godunov_flux, LocalGodunovFlux};
pub use run::{run, RunOptions, Simulation};
pub use step::{step_godunov, step_local_godunov, step_lxf, StageTimings, StepContext, Stepper};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Interface velocity times upwind flux factor.
    #[serde(alias = "godunov_nonlocal")]
    Godunov,
    /// Central flux with artificial viscosity.
    #[serde(alias = "lxf_nonlocal")]
    Lxf,
    /// Classical Godunov scheme for the local LWR flux `g v`.
    LocalGodunov,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Godunov => "godunov",
            SchemeKind::Lxf => "lxf",
            SchemeKind::LocalGodunov => "local_godunov",
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "godunov" | "godunov_nonlocal" => Ok(SchemeKind::Godunov),
            "lxf" | "lxf_nonlocal" => Ok(SchemeKind::Lxf),
            "local_godunov" => Ok(SchemeKind::LocalGodunov),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// How the time step is derived from the stability bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// The active scheme's own bound.
    #[default]
    Own,
    /// Minimum of the Godunov and LxF bounds, so both schemes of a
    /// comparison share one time step.
    Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    #[serde(rename = "name")]
    pub scheme: SchemeKind,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default)]
    pub backend: ConvolutionBackend,
    /// LxF viscosity; defaults to `||v|| ||g'||`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub step_rule: StepRule,
    /// Fixed `lambda = tau / h`, checked against the bound instead of derived from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

fn default_cfl_safety() -> f64 {
    1.0
}

impl SchemeConfig {
    pub fn new(scheme: SchemeKind) -> Self {
        Self {
            scheme,
            cfl_safety: 1.0,
            backend: ConvolutionBackend::Fast,
            alpha: None,
            step_rule: StepRule::Own,
            lambda: None,
        }
    }

    pub fn with_backend(mut self, backend: ConvolutionBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    pub fn with_cfl_safety(mut self, safety: f64) -> Self {
        self.cfl_safety = safety;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(crate::Error::config(
                "scheme.cfl_safety",
                format!("must lie in (0, 1], got {}", self.cfl_safety),
            ));
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a >= 0.0) {
                return Err(crate::Error::config("scheme.alpha", format!("must be >= 0, got {a}")));
            }
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(crate::Error::config("scheme.lambda", format!("must be > 0, got {l}")));
            }
        }
        Ok(())
    }
}
