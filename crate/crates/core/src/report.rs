//! Per-run bookkeeping: step series, theorem checks, stage timings.

use std::io::Write;

use crate::diagnostics::EntropyResidualReport;
use crate::error::Result;
use crate::scheme::{SchemeKind, StageTimings};

/// Diagnostics of one time level. Step 0 is the projected initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
    pub tv: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    /// Largest entropy-inequality residual of the step that produced this level.
    pub max_entropy_residual: Option<f64>,
}

/// Data recorded on one step for an offline entropy check.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub rho: Vec<f64>,
    /// Interface velocities `V_{j+1/2}` used by the step.
    pub velocity: Vec<f64>,
    pub next: Vec<f64>,
    pub lambda: f64,
}

/// Running suprema and sums needed by the stability constants.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunHistory {
    pub tv_initial: f64,
    pub sup_tv: f64,
    /// `sup_t ||g(rho(t))||_inf`
    pub sup_g_inf: f64,
    /// `sup_t ||g(rho(t))||_L1`
    pub sup_g_l1: f64,
    /// `sum_n tau_n TV(rho^n)`
    pub time_variation: f64,
    /// `sum_n h ||rho^{n+1} - rho^n||_1`, all steps but the last.
    pub space_variation: f64,
    /// The last step's contribution, kept apart from `space_variation`.
    pub last_increment: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

impl RunHistory {
    /// Discrete space-time total variation; the final step contributes only
    /// through its time weight.
    pub fn spacetime_tv(&self) -> f64 {
        self.time_variation + self.space_variation
    }

    pub fn relative_mass_drift(&self) -> f64 {
        let scale = self.mass_initial.abs().max(f64::MIN_POSITIVE);
        (self.mass_final - self.mass_initial).abs() / scale
    }
}

/// Counts of per-step theorem violations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantSummary {
    pub max_principle_violations: usize,
    pub negative_fluxes: usize,
    pub velocity_bound_violations: usize,
    pub tv_growth_violations: usize,
    /// Largest `TV(rho^{n+1}) / ((1 + tau C) TV(rho^n))` seen.
    pub max_tv_growth_ratio: f64,
    pub entropy_violations: usize,
}

impl InvariantSummary {
    pub fn failed(&self) -> bool {
        self.max_principle_violations > 0
            || self.negative_fluxes > 0
            || self.velocity_bound_violations > 0
            || self.tv_growth_violations > 0
            || self.entropy_violations > 0
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |n: usize, what: &str| {
            if n > 0 {
                out.push(format!("{n} {what}"));
            }
        };
        push(self.max_principle_violations, "maximum-principle violations");
        push(self.negative_fluxes, "negative interface fluxes");
        push(self.velocity_bound_violations, "velocities outside [0, v(0)]");
        push(self.tv_growth_violations, "steps exceeding the TV growth bound");
        push(self.entropy_violations, "entropy-inequality violations");
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scheme: SchemeKind,
    pub tau: f64,
    pub lambda: f64,
    pub lambda_bound: f64,
    pub n_steps: usize,
    pub t_final: f64,
    pub steps: Vec<StepRecord>,
    pub history: RunHistory,
    pub invariants: InvariantSummary,
    pub entropy: Option<EntropyResidualReport>,
    pub timings: StageTimings,
    pub trace: Vec<StepTrace>,
}

impl RunReport {
    /// CSV header `step,time,mass,tv,min_rho,max_rho,max_entropy_residual`.
    pub fn write_diagnostics_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,time,mass,tv,min_rho,max_rho,max_entropy_residual")?;
        for r in &self.steps {
            let ent = r.max_entropy_residual.map(|e| e.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.step, r.time, r.mass, r.tv, r.min_rho, r.max_rho, ent
            )?;
        }
        Ok(())
    }
}
