use super::cfl::{cfl_lambda_godunov, cfl_lambda_lxf, finite_lambda};
use super::convolution::check_kernel_grid;
use super::step::{Stepper, CFL_SLACK};
use super::{SchemeConfig, SchemeKind, StepRule};
use crate::diagnostics::{bv_growth_constant, entropy_residual_step, kappa_grid, tv_of, EntropyResidualReport};
use crate::error::{Error, Result};
use crate::grid::{project_initial, total_mass, Grid1D, GridState, InitialData};
use crate::kernel::DiscreteKernel;
use crate::model::{ModelSpec, ModelVariant};
use crate::report::{InvariantSummary, RunHistory, RunReport, StepRecord, StepTrace};

/// Slack on the maximum principle.
const MAX_PRINCIPLE_SLACK: f64 = 1e-14;
/// Entropy residuals above this count as violations.
const ENTROPY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep a [`StepRecord`] per time level.
    pub record_steps: bool,
    /// Evaluate the discrete entropy inequality on every Godunov-type step.
    pub entropy_check: bool,
    /// Count maximum-principle, flux-sign, velocity-bound and TV-growth violations.
    pub check_invariants: bool,
    /// Keep full per-step traces (memory heavy; for tests).
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_steps: false,
            entropy_check: false,
            check_invariants: true,
            record_trace: false,
        }
    }
}

impl RunOptions {
    pub fn checked() -> Self {
        Self {
            record_steps: true,
            entropy_check: true,
            check_invariants: true,
            record_trace: false,
        }
    }
}

/// A time-stepping run in progress.
#[derive(Debug)]
pub struct Simulation {
    model: ModelSpec,
    stepper: Stepper,
    state: GridState,
    next: Vec<f64>,
    tau: f64,
    opts: RunOptions,
    c_bv: f64,
    velocity_cap: f64,
    kappas: Vec<f64>,
    report: RunReport,
}

impl Simulation {
    pub fn new(
        model: &ModelSpec,
        kernel: &DiscreteKernel,
        state: GridState,
        config: &SchemeConfig,
        opts: RunOptions,
    ) -> Result<Self> {
        config.validate()?;
        let h = state.grid.h();
        if config.scheme != SchemeKind::LocalGodunov {
            check_kernel_grid(kernel, h)?;
        }
        let stepper = Stepper::new(model, kernel, state.grid.n_cells(), config)?;
        let bound = match (config.step_rule, config.scheme) {
            (StepRule::Comparison, SchemeKind::Godunov | SchemeKind::Lxf) => {
                cfl_lambda_godunov(model, kernel).min(cfl_lambda_lxf(stepper.alpha()))
            }
            _ => stepper.lambda_bound(),
        };
        let lambda = match config.lambda {
            Some(l) => {
                if l > bound * (1.0 + CFL_SLACK) {
                    return Err(Error::CflViolation { lambda: l, bound });
                }
                l
            }
            None => finite_lambda(bound, config.cfl_safety)?,
        };
        let tv0 = tv_of(&state.rho);
        let mass0 = total_mass(&state);
        let velocity_cap = match model.variant() {
            ModelVariant::MeanVelocity => model.v(0.0) * kernel.w0(),
            ModelVariant::MeanDensity => model.v(0.0),
        };
        let mut sim = Self {
            model: model.clone(),
            next: vec![0.0; state.rho.len()],
            tau: lambda * h,
            opts,
            c_bv: bv_growth_constant(model, kernel),
            velocity_cap,
            kappas: kappa_grid(model.rho_max()),
            report: RunReport {
                scheme: config.scheme,
                tau: lambda * h,
                lambda,
                lambda_bound: bound,
                n_steps: 0,
                t_final: state.time,
                steps: Vec::new(),
                history: RunHistory {
                    tv_initial: tv0,
                    mass_initial: mass0,
                    mass_final: mass0,
                    ..Default::default()
                },
                invariants: InvariantSummary::default(),
                entropy: None,
                timings: Default::default(),
                trace: Vec::new(),
            },
            stepper,
            state,
        };
        sim.observe_level(None);
        if opts.record_steps {
            sim.record(None);
        }
        Ok(sim)
    }

    pub fn state(&self) -> &GridState {
        &self.state
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn report(&self) -> &RunReport {
        &self.report
    }

    pub fn into_parts(mut self) -> (GridState, RunReport) {
        self.report.timings = self.stepper.timings();
        self.report.t_final = self.state.time;
        (self.state, self.report)
    }

    fn observe_level(&mut self, _: Option<()>) {
        let h = self.state.grid.h();
        let hist = &mut self.report.history;
        let tv = tv_of(&self.state.rho);
        hist.sup_tv = hist.sup_tv.max(tv);
        let (mut g_inf, mut g_l1) = (0.0f64, 0.0);
        for &r in &self.state.rho {
            let g = self.model.g(r).abs();
            g_inf = g_inf.max(g);
            g_l1 += g;
        }
        hist.sup_g_inf = hist.sup_g_inf.max(g_inf);
        hist.sup_g_l1 = hist.sup_g_l1.max(h * g_l1);
    }

    fn record(&mut self, entropy: Option<f64>) {
        self.report.steps.push(StepRecord {
            step: self.report.n_steps,
            time: self.state.time,
            mass: total_mass(&self.state),
            tv: tv_of(&self.state.rho),
            min_rho: self.state.min(),
            max_rho: self.state.max(),
            max_entropy_residual: entropy,
        });
    }

    /// One step of length `dt <= tau`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt > self.tau * (1.0 + CFL_SLACK) {
            return Err(Error::CflViolation {
                lambda: dt / self.state.grid.h(),
                bound: self.report.lambda,
            });
        }
        let h = self.state.grid.h();
        let lambda = dt / h;
        self.stepper.advance(&self.state.rho, &mut self.next, lambda);

        let kind = self.stepper.kind();
        let tv_before = tv_of(&self.state.rho);
        let tv_after = tv_of(&self.next);
        let mut entropy = None;

        if self.opts.check_invariants {
            let inv = &mut self.report.invariants;
            if matches!(kind, SchemeKind::Godunov | SchemeKind::Lxf) {
                let cap = self.velocity_cap * (1.0 + 1e-12) + 1e-14;
                inv.velocity_bound_violations += self
                    .stepper
                    .velocity()
                    .iter()
                    .filter(|&&v| !(0.0..=cap).contains(&v))
                    .count();
            }
            if kind == SchemeKind::Godunov {
                let (lo, hi) = (self.state.min(), self.state.max());
                inv.max_principle_violations += self
                    .next
                    .iter()
                    .filter(|&&r| r < lo - MAX_PRINCIPLE_SLACK || r > hi + MAX_PRINCIPLE_SLACK)
                    .count();
                inv.negative_fluxes += self.stepper.flux().iter().filter(|&&f| f < 0.0).count();
                if self.model.variant() == ModelVariant::MeanVelocity {
                    let allowed = (1.0 + dt * self.c_bv) * tv_before;
                    if tv_after > allowed * (1.0 + 1e-12) + 1e-14 {
                        inv.tv_growth_violations += 1;
                    }
                    if allowed > 0.0 {
                        inv.max_tv_growth_ratio = inv.max_tv_growth_ratio.max(tv_after / allowed);
                    }
                }
            }
        }

        if self.opts.entropy_check && kind == SchemeKind::Godunov {
            let r = entropy_residual_step(
                &self.model,
                self.report.n_steps + 1,
                &self.state.rho,
                self.stepper.velocity(),
                &self.next,
                lambda,
                &self.kappas,
            );
            if r.max_residual > ENTROPY_TOL {
                self.report.invariants.entropy_violations += 1;
            }
            self.report
                .entropy
                .get_or_insert_with(EntropyResidualReport::default)
                .merge(&r);
            entropy = Some(r.max_residual);
        }

        if self.opts.record_trace {
            self.report.trace.push(StepTrace {
                rho: self.state.rho.clone(),
                velocity: self.stepper.velocity().to_vec(),
                next: self.next.clone(),
                lambda,
            });
        }

        let increment = h * self
            .state
            .rho
            .iter()
            .zip(&self.next)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
        {
            let hist = &mut self.report.history;
            hist.time_variation += dt * tv_before;
            hist.space_variation += hist.last_increment;
            hist.last_increment = increment;
        }

        std::mem::swap(&mut self.state.rho, &mut self.next);
        self.state.time += dt;
        self.report.n_steps += 1;
        self.report.history.mass_final = total_mass(&self.state);
        self.observe_level(None);
        if self.opts.record_steps {
            self.record(entropy);
        }
        Ok(())
    }

    /// Steps to exactly `t_final`, shortening the last step.
    pub fn advance_to(&mut self, t_final: f64) -> Result<()> {
        let start = self.state.time;
        let span = t_final - start;
        if !(span > 0.0) {
            return Ok(());
        }
        let n = ((span / self.tau) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        for i in 0..n {
            let t_next = if i + 1 == n { t_final } else { start + (i + 1) as f64 * self.tau };
            let dt = t_next - self.state.time;
            self.step(dt.min(self.tau))?;
            self.state.time = t_next;
        }
        Ok(())
    }
}

/// Projects `init` onto `grid` and advances it to `t_final`.
///
/// The kernel is ignored by the local scheme.
pub fn run(
    model: &ModelSpec,
    kernel: &DiscreteKernel,
    grid: &Grid1D,
    init: &InitialData,
    config: &SchemeConfig,
    t_final: f64,
    opts: &RunOptions,
) -> Result<(GridState, RunReport)> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::config("run.t_final", format!("must be >= 0, got {t_final}")));
    }
    init.validate(grid.length(), model.rho_max())?;
    let state = project_initial(init, grid)?;
    let mut sim = Simulation::new(model, kernel, state, config, *opts)?;
    sim.advance_to(t_final)?;
    Ok(sim.into_parts())
}
