use std::time::{Duration, Instant};

use super::cfl::{cfl_lambda_godunov, cfl_lambda_local, cfl_lambda_lxf, default_lxf_alpha};
use super::convolution::{check_kernel_grid, nonlocal_velocity, ConvolutionBackend, Convolver};
use super::flux::LocalGodunovFlux;
use super::{SchemeConfig, SchemeKind};
use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::kernel::DiscreteKernel;
use crate::model::ModelSpec;

/// Relative slack when comparing a requested lambda against its bound.
pub(crate) const CFL_SLACK: f64 = 1e-12;

/// Everything a single explicit step needs besides the state itself.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub model: &'a ModelSpec,
    pub kernel: &'a DiscreteKernel,
    pub tau: f64,
    /// `tau / h`
    pub lambda: f64,
    /// LxF viscosity; `None` selects the default.
    pub alpha: Option<f64>,
}

impl<'a> StepContext<'a> {
    pub fn new(model: &'a ModelSpec, kernel: &'a DiscreteKernel, tau: f64) -> Self {
        Self {
            model,
            kernel,
            tau,
            lambda: tau / kernel.h(),
            alpha: None,
        }
    }

    pub fn with_lambda(model: &'a ModelSpec, kernel: &'a DiscreteKernel, lambda: f64) -> Self {
        Self {
            model,
            kernel,
            tau: lambda * kernel.h(),
            lambda,
            alpha: None,
        }
    }
}

/// Accumulated wall-clock time per stage of the update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub convolution: Duration,
    pub flux: Duration,
    pub update: Duration,
}

/// Reusable single-scheme stepper with its scratch buffers.
///
/// After [`Stepper::advance`], [`Stepper::velocity`] holds the non-local
/// velocities used (interface values `V_{j+1/2}` for the Godunov-type
/// scheme, cell values `V_j` for LxF, empty for the local scheme) and
/// [`Stepper::flux`] the interface fluxes `F_{j+1/2}`.
#[derive(Debug)]
pub struct Stepper {
    model: ModelSpec,
    kind: SchemeKind,
    alpha: f64,
    bound: f64,
    convolver: Option<Convolver>,
    local: Option<LocalGodunovFlux>,
    velocity: Vec<f64>,
    flux: Vec<f64>,
    work: Vec<f64>,
    timings: StageTimings,
}

impl Stepper {
    pub fn new(model: &ModelSpec, kernel: &DiscreteKernel, n_cells: usize, config: &SchemeConfig) -> Result<Self> {
        let m = n_cells;
        let alpha = config.alpha.unwrap_or_else(|| default_lxf_alpha(model));
        let (convolver, local, bound) = match config.scheme {
            SchemeKind::Godunov => (
                Some(Convolver::new(kernel.gamma(), m, 1, config.backend)),
                None,
                cfl_lambda_godunov(model, kernel),
            ),
            SchemeKind::Lxf => (
                Some(Convolver::new(kernel.gamma(), m, 0, config.backend)),
                None,
                cfl_lambda_lxf(alpha),
            ),
            SchemeKind::LocalGodunov => (None, Some(LocalGodunovFlux::new(model)?), cfl_lambda_local(model)),
        };
        let nv = if convolver.is_some() { m } else { 0 };
        Ok(Self {
            model: model.clone(),
            kind: config.scheme,
            alpha,
            bound,
            convolver,
            local,
            velocity: vec![0.0; nv],
            flux: vec![0.0; m],
            work: vec![0.0; m],
            timings: StageTimings::default(),
        })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Largest admissible lambda for this scheme.
    pub fn lambda_bound(&self) -> f64 {
        self.bound
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn flux(&self) -> &[f64] {
        &self.flux
    }

    pub fn timings(&self) -> StageTimings {
        self.timings
    }

    pub fn check_lambda(&self, lambda: f64) -> Result<()> {
        if lambda > self.bound * (1.0 + CFL_SLACK) {
            return Err(Error::CflViolation {
                lambda,
                bound: self.bound,
            });
        }
        Ok(())
    }

    /// One explicit step `rho -> next` in conservation form. No CFL check.
    pub fn advance(&mut self, rho: &[f64], next: &mut [f64], lambda: f64) {
        let m = rho.len();
        debug_assert_eq!(next.len(), m);
        let t0 = Instant::now();
        if let Some(conv) = self.convolver.as_mut() {
            nonlocal_velocity(&self.model, conv, rho, &mut self.work, &mut self.velocity);
        }
        let t1 = Instant::now();
        match self.kind {
            SchemeKind::Godunov => {
                for ((f, &v), &r) in self.flux.iter_mut().zip(&self.velocity).zip(rho) {
                    *f = v * self.model.g(r);
                }
            }
            SchemeKind::Lxf => {
                for ((q, &v), &r) in self.work.iter_mut().zip(&self.velocity).zip(rho) {
                    *q = v * self.model.g(r);
                }
                let half_alpha = 0.5 * self.alpha;
                for j in 0..m {
                    let jp = if j + 1 == m { 0 } else { j + 1 };
                    self.flux[j] = 0.5 * (self.work[j] + self.work[jp]) + half_alpha * (rho[j] - rho[jp]);
                }
            }
            SchemeKind::LocalGodunov => {
                let lf = self.local.as_ref().expect("local flux built for local scheme");
                for j in 0..m {
                    let jp = if j + 1 == m { 0 } else { j + 1 };
                    self.flux[j] = lf.flux(rho[j], rho[jp]);
                }
            }
        }
        let t2 = Instant::now();
        let mut left = self.flux[m - 1];
        for j in 0..m {
            let right = self.flux[j];
            next[j] = rho[j] - lambda * (right - left);
            left = right;
        }
        let t3 = Instant::now();
        self.timings.convolution += t1 - t0;
        self.timings.flux += t2 - t1;
        self.timings.update += t3 - t2;
    }
}

fn single_step(state: &GridState, ctx: &StepContext<'_>, scheme: SchemeKind) -> Result<GridState> {
    if scheme != SchemeKind::LocalGodunov {
        check_kernel_grid(ctx.kernel, state.grid.h())?;
    }
    let mut config = SchemeConfig::new(scheme).with_backend(ConvolutionBackend::Direct);
    config.alpha = ctx.alpha;
    let mut stepper = Stepper::new(ctx.model, ctx.kernel, state.grid.n_cells(), &config)?;
    stepper.check_lambda(ctx.lambda)?;
    let mut next = vec![0.0; state.rho.len()];
    stepper.advance(&state.rho, &mut next, ctx.lambda);
    Ok(GridState {
        grid: state.grid,
        time: state.time + ctx.tau,
        rho: next,
    })
}

/// One step of the Godunov-type scheme.
pub fn step_godunov(state: &GridState, ctx: &StepContext<'_>) -> Result<GridState> {
    single_step(state, ctx, SchemeKind::Godunov)
}

/// One step of the Lax-Friedrichs-type scheme with cell-centred velocities.
pub fn step_lxf(state: &GridState, ctx: &StepContext<'_>) -> Result<GridState> {
    single_step(state, ctx, SchemeKind::Lxf)
}

/// One step of the classical Godunov scheme for the local flux `g v`;
/// the kernel in `ctx` is ignored.
pub fn step_local_godunov(state: &GridState, ctx: &StepContext<'_>) -> Result<GridState> {
    single_step(state, ctx, SchemeKind::LocalGodunov)
}
