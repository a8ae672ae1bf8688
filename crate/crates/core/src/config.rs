//! TOML experiment descriptions.
//!
//! One document describes a single run; optional `[convergence]` and
//! `[local_limit]` sections turn it into a sweep. See `configs/` for examples
//! and the README for the full schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, InitialData};
use crate::kernel::{quadrature_weights, DiscreteKernel, KernelSpec};
use crate::model::{FluxGFn, ModelSpec, ModelVariant, VelocityFn};
use crate::scheme::{SchemeConfig, SchemeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub variant: ModelVariant,
    pub velocity: VelocityFn,
    #[serde(default = "default_flux_g")]
    pub flux_g: FluxGFn,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
}

fn default_flux_g() -> FluxGFn {
    FluxGFn::Identity
}

fn default_rho_max() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.variant, self.velocity.clone(), self.flux_g.clone(), self.rho_max)
            .map_err(|e| Error::config("model", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_length")]
    pub length: f64,
    pub h: f64,
}

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Final profile CSV, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    /// Per-step diagnostics CSV, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PathBuf>,
    #[serde(default)]
    pub entropy_check: bool,
    /// SVG chart of the final profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Spatial steps, coarse to fine. Row `n` of the table is `h_list[n]`.
    pub h_list: Vec<f64>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<SchemeKind>,
    #[serde(default = "default_reference_scheme")]
    pub reference_scheme: SchemeKind,
    pub reference_h: f64,
}

fn default_schemes() -> Vec<SchemeKind> {
    vec![SchemeKind::Godunov, SchemeKind::Lxf]
}

fn default_reference_scheme() -> SchemeKind {
    SchemeKind::Lxf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalLimitSection {
    pub etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(alias = "T")]
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub kernel: KernelSpec,
    pub grid: GridConfig,
    pub initial: InitialData,
    pub scheme: SchemeConfig,
    pub run: RunSection,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_limit: Option<LocalLimitSection>,
}

/// A validated run: every component built and cross-checked.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: ModelSpec,
    pub kernel_spec: KernelSpec,
    pub kernel: DiscreteKernel,
    pub grid: Grid1D,
    pub initial: InitialData,
    pub scheme: SchemeConfig,
    pub t_final: f64,
}

impl Problem {
    /// Same problem on another grid spacing.
    pub fn with_h(&self, h: f64) -> Result<Problem> {
        let grid = Grid1D::with_spacing(self.grid.length(), h)?;
        let kernel = quadrature_weights(&self.kernel_spec, h)?;
        Ok(Problem {
            grid,
            kernel,
            ..self.clone()
        })
    }

    /// Same problem with a kernel of another length.
    pub fn with_eta(&self, eta: f64) -> Result<Problem> {
        let kernel_spec = KernelSpec {
            eta,
            ..self.kernel_spec.clone()
        };
        let kernel = quadrature_weights(&kernel_spec, self.grid.h())?;
        Ok(Problem {
            kernel_spec,
            kernel,
            ..self.clone()
        })
    }
}

/// Reference run plus the `(scheme, h)` grid of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub base: Problem,
    pub h_list: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    pub reference_scheme: SchemeKind,
    pub reference_h: f64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("<document>", e.to_string().trim_end()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<document>", e.to_string()))
    }

    /// Builds and cross-checks every component.
    pub fn build(&self) -> Result<Problem> {
        let model = self.model.build()?;
        self.kernel
            .validate()
            .map_err(|e| Error::config("kernel", e.to_string()))?;
        let grid = Grid1D::with_spacing(self.grid.length, self.grid.h)
            .map_err(|e| Error::config("grid", e.to_string()))?;
        let kernel = quadrature_weights(&self.kernel, grid.h())?;
        self.initial
            .validate(grid.length(), model.rho_max())
            .map_err(|e| Error::config("initial", e.to_string()))?;
        self.scheme.validate()?;
        let t = self.run.t_final;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::config("run.t_final", format!("must be >= 0, got {t}")));
        }
        Ok(Problem {
            model,
            kernel_spec: self.kernel.clone(),
            kernel,
            grid,
            initial: self.initial.clone(),
            scheme: self.scheme.clone(),
            t_final: t,
        })
    }

    pub fn convergence_config(&self) -> Result<ConvergenceConfig> {
        let base = self.build()?;
        let sec = self
            .convergence
            .as_ref()
            .ok_or_else(|| Error::config("convergence", "section missing"))?;
        if sec.h_list.is_empty() {
            return Err(Error::config("convergence.h_list", "must not be empty"));
        }
        if sec.schemes.is_empty() {
            return Err(Error::config("convergence.schemes", "must not be empty"));
        }
        let href = sec.reference_h;
        if !(href.is_finite() && href > 0.0) {
            return Err(Error::config("convergence.reference_h", format!("must be > 0, got {href}")));
        }
        base.with_h(href)
            .map_err(|e| Error::config("convergence.reference_h", e.to_string()))?;
        for (i, &h) in sec.h_list.iter().enumerate() {
            let field = format!("convergence.h_list[{i}]");
            let ratio = h / href;
            let r = ratio.round();
            if !(r >= 1.0 && (ratio - r).abs() <= 1e-9 * ratio && (r as u64).is_power_of_two()) {
                return Err(Error::config(
                    field,
                    format!("h / reference_h = {ratio} is not a power of two"),
                ));
            }
            base.with_h(h).map_err(|e| Error::config(field, e.to_string()))?;
        }
        Ok(ConvergenceConfig {
            base,
            h_list: sec.h_list.clone(),
            schemes: sec.schemes.clone(),
            reference_scheme: sec.reference_scheme,
            reference_h: href,
        })
    }

    /// The base problem and the validated eta list.
    pub fn local_limit_config(&self) -> Result<(Problem, Vec<f64>)> {
        let base = self.build()?;
        let sec = self
            .local_limit
            .as_ref()
            .ok_or_else(|| Error::config("local_limit", "section missing"))?;
        if sec.etas.is_empty() {
            return Err(Error::config("local_limit.etas", "must not be empty"));
        }
        for (i, &eta) in sec.etas.iter().enumerate() {
            base.with_eta(eta)
                .map_err(|e| Error::config(format!("local_limit.etas[{i}]"), e.to_string()))?;
        }
        Ok((base, sec.etas.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"
[model]
variant = "mean_velocity"
velocity = { family = "affine_one_minus_rho" }

[kernel]
family = "downcast_parabola"
eta = 0.1

[grid]
length = 1.0
h = 0.01

[initial]
kind = "piecewise_constant"
breakpoints = [[0.0, 0.3333333333333333], [0.3333333333333333, 1.0], [0.6666666666666666, 0.3333333333333333]]

[scheme]
name = "godunov"

[run]
t_final = 0.1

[outputs]
profile = "profile.csv"
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::from_toml_str(LINEAR).unwrap();
        let p = cfg.build().unwrap();
        assert_eq!(p.grid.n_cells(), 100);
        assert_eq!(p.kernel.n_cells(), 10);
        assert_eq!(p.scheme.cfl_safety, 1.0);
        assert_eq!(cfg.outputs.profile.as_deref(), Some(Path::new("profile.csv")));
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = RunConfig::from_toml_str(LINEAR).unwrap();
        let once = cfg.to_toml_string().unwrap();
        let again = RunConfig::from_toml_str(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml_string().unwrap(), once);
    }

    #[test]
    fn t_alias_is_accepted() {
        let text = LINEAR.replace("t_final = 0.1", "T = 0.1");
        assert_eq!(RunConfig::from_toml_str(&text).unwrap().run.t_final, 0.1);
    }

    #[test]
    fn non_divisible_eta_is_named() {
        let text = LINEAR.replace("eta = 0.1", "eta = 0.105");
        let err = RunConfig::from_toml_str(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::NonDivisibleEta { .. }));
        let msg = err.to_string();
        assert!(msg.contains("kernel.eta") && msg.contains("grid.h"), "{msg}");
    }

    #[test]
    fn field_paths_in_errors() {
        let text = LINEAR.replace("t_final = 0.1", "t_final = -1.0");
        let err = RunConfig::from_toml_str(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "run.t_final"));

        let text = LINEAR.replace("[scheme]\nname = \"godunov\"", "[scheme]\nname = \"godunov\"\ncfl_safety = 1.5");
        let err = RunConfig::from_toml_str(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "scheme.cfl_safety"));

        let text = LINEAR.replace("h = 0.01", "h = 0.01\nbogus = 1");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn convergence_section_validation() {
        let good = format!(
            "{LINEAR}\n[convergence]\nh_list = [0.02, 0.01]\nreference_h = 0.0025\n"
        );
        let c = RunConfig::from_toml_str(&good).unwrap().convergence_config().unwrap();
        assert_eq!(c.schemes, vec![SchemeKind::Godunov, SchemeKind::Lxf]);
        assert_eq!(c.reference_scheme, SchemeKind::Lxf);

        let bad = format!("{LINEAR}\n[convergence]\nh_list = [0.02, 0.0075]\nreference_h = 0.0025\n");
        let err = RunConfig::from_toml_str(&bad).unwrap().convergence_config().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "convergence.h_list[1]"));
    }

    #[test]
    fn local_limit_section_validation() {
        let good = format!("{LINEAR}\n[local_limit]\netas = [0.1, 0.02]\n");
        let (_, etas) = RunConfig::from_toml_str(&good).unwrap().local_limit_config().unwrap();
        assert_eq!(etas, vec![0.1, 0.02]);
        let bad = format!("{LINEAR}\n[local_limit]\netas = [0.1, 0.015]\n");
        let err = RunConfig::from_toml_str(&bad).unwrap().local_limit_config().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "local_limit.etas[1]"));
    }
}
