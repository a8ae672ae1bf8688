//! Error measures and the executable forms of the scheme's analytical bounds.

use crate::error::{Error, Result};
use crate::grid::{project_initial, Grid1D, GridState, InitialData};
use crate::kernel::DiscreteKernel;
use crate::model::ModelSpec;
use crate::report::{RunHistory, StepTrace};
use crate::scheme::{run, RunOptions, SchemeConfig, SchemeKind};

/// Uniform entropy levels on `[0, rho_max]`.
pub const KAPPA_SAMPLES: usize = 21;

/// Periodic total variation, summed left to right.
pub fn total_variation(state: &GridState) -> f64 {
    tv_of(&state.rho)
}

pub(crate) fn tv_of(rho: &[f64]) -> f64 {
    let m = rho.len();
    (0..m).map(|j| (rho[(j + 1) % m] - rho[j]).abs()).sum()
}

/// `h sum_j |coarse_j - reference(x_j)|`, sampling the reference at the
/// coarse cell centres `x_j = j h`.
pub fn l1_error(coarse: &GridState, reference: &GridState) -> Result<f64> {
    let (cg, rg) = (coarse.grid, reference.grid);
    if (cg.length() - rg.length()).abs() > 1e-12 * cg.length() {
        return Err(Error::IncompatibleGrids(format!(
            "domain lengths differ ({} vs {})",
            cg.length(),
            rg.length()
        )));
    }
    if (coarse.time - reference.time).abs() > 1e-12 * coarse.time.abs().max(1.0) {
        return Err(Error::IncompatibleGrids(format!(
            "states are at different times ({} vs {})",
            coarse.time, reference.time
        )));
    }
    let ratio = cg.h() / rg.h();
    let r = ratio.round();
    if r < 1.0 || (ratio - r).abs() > 1e-9 * ratio {
        return Err(Error::IncompatibleGrids(format!(
            "h ratio {ratio} is not a positive integer"
        )));
    }
    let r = r as usize;
    Ok(cg.h()
        * coarse
            .rho
            .iter()
            .enumerate()
            .map(|(j, c)| (c - reference.rho[j * r]).abs())
            .sum::<f64>())
}

/// Number of strict local extrema of a periodic profile; differences below
/// `1e-12` count as flat.
pub fn count_local_extrema(state: &GridState) -> usize {
    let m = state.rho.len();
    let signs: Vec<i8> = (0..m)
        .filter_map(|j| {
            let d = state.rho[(j + 1) % m] - state.rho[j];
            if d > 1e-12 {
                Some(1)
            } else if d < -1e-12 {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    if signs.is_empty() {
        return 0;
    }
    (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count()
}

/// Largest left-hand side of the discrete entropy inequality seen, and where.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResidualReport {
    pub max_residual: f64,
    /// `(step, cell, kappa)`
    pub argmax: (usize, usize, f64),
    pub samples_checked: usize,
}

impl Default for EntropyResidualReport {
    fn default() -> Self {
        Self {
            max_residual: f64::NEG_INFINITY,
            argmax: (0, 0, 0.0),
            samples_checked: 0,
        }
    }
}

impl EntropyResidualReport {
    pub fn merge(&mut self, other: &EntropyResidualReport) {
        if other.max_residual > self.max_residual {
            self.max_residual = other.max_residual;
            self.argmax = other.argmax;
        }
        self.samples_checked += other.samples_checked;
    }
}

pub fn kappa_grid(rho_max: f64) -> Vec<f64> {
    (0..KAPPA_SAMPLES)
        .map(|i| rho_max * i as f64 / (KAPPA_SAMPLES - 1) as f64)
        .collect()
}

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Residuals of one Godunov step for every cell and every level in `kappas`
/// plus the three state values each cell's inequality involves.
pub fn entropy_residual_step(
    model: &ModelSpec,
    step: usize,
    rho: &[f64],
    velocity: &[f64],
    next: &[f64],
    lambda: f64,
    kappas: &[f64],
) -> EntropyResidualReport {
    let m = rho.len();
    let g = |u: f64| model.g(u);
    // F^k(u) = G(max(u, k)) - G(min(u, k)) with G(u) = V g(u)
    let entropy_flux = |v: f64, u: f64, k: f64| v * (g(u.max(k)) - g(u.min(k)));
    let mut report = EntropyResidualReport::default();
    for j in 0..m {
        let jm = if j == 0 { m - 1 } else { j - 1 };
        let (v_right, v_left) = (velocity[j], velocity[jm]);
        let extra = [rho[jm], rho[j], next[j]];
        for &k in kappas.iter().chain(extra.iter()) {
            let res = (next[j] - k).abs() - (rho[j] - k).abs()
                + lambda * (entropy_flux(v_right, rho[j], k) - entropy_flux(v_left, rho[jm], k))
                + lambda * sgn(next[j] - k) * g(k) * (v_right - v_left);
            report.samples_checked += 1;
            if res > report.max_residual {
                report.max_residual = res;
                report.argmax = (step, j, k);
            }
        }
    }
    report
}

/// Entropy residuals over a recorded trace of Godunov-type steps.
pub fn entropy_residuals(trace: &[StepTrace], model: &ModelSpec, kappas: &[f64]) -> EntropyResidualReport {
    let mut report = EntropyResidualReport::default();
    for (n, t) in trace.iter().enumerate() {
        report.merge(&entropy_residual_step(model, n + 1, &t.rho, &t.velocity, &t.next, t.lambda, kappas));
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    /// Exponential rate of the BV bound, `w(0)(||v'|| ||g|| rho_max + ||v|| ||g'||)`.
    pub c_bv: f64,
    /// Lipschitz rate of the L1 stability estimate.
    pub k: f64,
    /// Right-hand side of the space-time total variation bound.
    pub spacetime_bound: f64,
}

pub fn bv_growth_constant(model: &ModelSpec, kernel: &DiscreteKernel) -> f64 {
    let n = model.compute_norms();
    kernel.w_at_zero() * (n.dv_sup * n.g_sup * model.rho_max() + n.v_sup * n.dg_sup)
}

pub fn stability_constants(
    model: &ModelSpec,
    kernel: &DiscreteKernel,
    history: &RunHistory,
    t_final: f64,
) -> StabilityConstants {
    let n = model.compute_norms();
    let c_bv = bv_growth_constant(model, kernel);
    let k = n.dv_sup
        * (kernel.w_at_zero() * (n.dg_sup * history.sup_tv + 2.0 * history.sup_g_inf)
            + kernel.derivative_sup() * history.sup_g_l1);
    let spacetime_bound = t_final
        * (c_bv * t_final).exp()
        * (1.0 + kernel.w0() * n.dv_sup * n.g_sup + n.v_sup * n.dg_sup)
        * history.tv_initial;
    StabilityConstants {
        c_bv,
        k,
        spacetime_bound,
    }
}

/// Runs the Godunov-type scheme from two initial data and returns
/// `(||rho(T) - sigma(T)||_1, exp(K T) ||rho0 - sigma0||_1)`, with `K`
/// taken from the first run's history.
pub fn lipschitz_stability_check(
    model: &ModelSpec,
    kernel: &DiscreteKernel,
    grid: &Grid1D,
    init_a: &InitialData,
    init_b: &InitialData,
    t_final: f64,
) -> Result<(f64, f64)> {
    let config = SchemeConfig::new(SchemeKind::Godunov);
    let opts = RunOptions::default();
    let a0 = project_initial(init_a, grid)?;
    let b0 = project_initial(init_b, grid)?;
    let d0 = l1_error(&a0, &b0)?;
    let (a, report) = run(model, kernel, grid, init_a, &config, t_final, &opts)?;
    let (b, _) = run(model, kernel, grid, init_b, &config, t_final, &opts)?;
    let consts = stability_constants(model, kernel, &report.history, t_final);
    Ok((l1_error(&a, &b)?, (consts.k * t_final).exp() * d0))
}
