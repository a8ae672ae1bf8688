//! Multi-run experiments: convergence tables, model comparison, local limit.
//!
//! Independent runs are executed on the rayon pool; results are collected
//! in input order, so tables do not depend on the thread count.

use std::io::Write;

use rayon::prelude::*;

use crate::config::{ConvergenceConfig, Problem};
use crate::diagnostics::{count_local_extrema, l1_error};
use crate::error::Result;
use crate::grid::GridState;
use crate::model::ModelVariant;
use crate::report::RunReport;
use crate::scheme::{run, RunOptions, SchemeConfig, SchemeKind, StepRule};

/// Runs `problem` with its own scheme config.
pub fn run_problem(problem: &Problem, opts: &RunOptions) -> Result<(GridState, RunReport)> {
    run(
        &problem.model,
        &problem.kernel,
        &problem.grid,
        &problem.initial,
        &problem.scheme,
        problem.t_final,
        opts,
    )
}

fn sweep_options() -> RunOptions {
    RunOptions {
        check_invariants: false,
        ..RunOptions::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub scheme: SchemeKind,
    pub l1_error: f64,
    /// `log2(e(n-1) / e(n))`; absent on the first row of each scheme.
    pub eoc: Option<f64>,
    /// Time step actually used.
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub reference_scheme: SchemeKind,
    pub reference_h: f64,
    pub reference_tau: f64,
    /// Grouped by scheme in config order, then sorted by `n`.
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Errors of one scheme, ordered by `n`.
    pub fn errors(&self, scheme: SchemeKind) -> Vec<f64> {
        self.rows.iter().filter(|r| r.scheme == scheme).map(|r| r.l1_error).collect()
    }

    pub fn eocs(&self, scheme: SchemeKind) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .filter_map(|r| r.eoc)
            .collect()
    }

    /// Header `n,h,scheme,l1_error,eoc`; the first row of each scheme has an empty eoc.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,h,scheme,l1_error,eoc")?;
        for r in &self.rows {
            let eoc = r.eoc.map(|e| e.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", r.n, r.h, r.scheme, r.l1_error, eoc)?;
        }
        Ok(())
    }
}

/// Comparison-rule config for the sweep: both schemes share
/// `cfl_safety * min(Godunov bound, LxF bound)`.
fn sweep_scheme(base: &SchemeConfig, scheme: SchemeKind) -> SchemeConfig {
    let mut cfg = base.clone().with_step_rule(StepRule::Comparison);
    cfg.scheme = scheme;
    cfg.lambda = None;
    cfg
}

/// Computes the reference once, then every `(scheme, h)` run against it.
pub fn convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceTable> {
    let reference = cfg.base.with_h(cfg.reference_h)?;
    let reference = Problem {
        scheme: sweep_scheme(&cfg.base.scheme, cfg.reference_scheme),
        ..reference
    };
    let (ref_state, ref_report) = run_problem(&reference, &sweep_options())?;

    let jobs: Vec<(SchemeKind, usize, f64)> = cfg
        .schemes
        .iter()
        .flat_map(|&s| cfg.h_list.iter().enumerate().map(move |(n, &h)| (s, n, h)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(scheme, _, h)| {
            let p = cfg.base.with_h(h)?;
            let p = Problem {
                scheme: sweep_scheme(&cfg.base.scheme, scheme),
                ..p
            };
            let (state, report) = run_problem(&p, &sweep_options())?;
            Ok((l1_error(&state, &ref_state)?, report.tau))
        })
        .collect();

    let mut rows = Vec::with_capacity(jobs.len());
    for (&(scheme, n, h), res) in jobs.iter().zip(results) {
        let (err, tau) = res?;
        let eoc = match rows.last() {
            Some(ConvergenceRow { scheme: s, l1_error: prev, .. }) if *s == scheme => Some((prev / err).log2()),
            _ => None,
        };
        rows.push(ConvergenceRow {
            n,
            h,
            scheme,
            l1_error: err,
            eoc,
            tau,
        });
    }
    Ok(ConvergenceTable {
        reference_scheme: cfg.reference_scheme,
        reference_h: cfg.reference_h,
        reference_tau: ref_report.tau,
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub mean_velocity: GridState,
    pub mean_density: GridState,
    pub l1_distance: f64,
    pub extrema_mean_velocity: usize,
    pub extrema_mean_density: usize,
    /// Affine velocity: the two variants coincide.
    pub affine_velocity: bool,
}

/// Runs both model variants with the problem's discretization.
pub fn compare_models(problem: &Problem) -> Result<ModelComparison> {
    let variants = [ModelVariant::MeanVelocity, ModelVariant::MeanDensity];
    let states: Vec<Result<GridState>> = variants
        .par_iter()
        .map(|&v| {
            let p = Problem {
                model: problem.model.with_variant(v),
                ..problem.clone()
            };
            run_problem(&p, &sweep_options()).map(|(s, _)| s)
        })
        .collect();
    let mut states = states.into_iter();
    let mv = states.next().expect("two variants")?;
    let md = states.next().expect("two variants")?;
    Ok(ModelComparison {
        l1_distance: l1_error(&mv, &md)?,
        extrema_mean_velocity: count_local_extrema(&mv),
        extrema_mean_density: count_local_extrema(&md),
        affine_velocity: problem.model.velocity().is_affine(),
        mean_velocity: mv,
        mean_density: md,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLimitRow {
    pub eta: f64,
    pub l1_distance: f64,
}

#[derive(Debug, Clone)]
pub struct LocalLimit {
    pub local: GridState,
    pub nonlocal: Vec<GridState>,
    pub rows: Vec<LocalLimitRow>,
}

impl LocalLimit {
    /// Header `eta,l1_distance`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "eta,l1_distance")?;
        for r in &self.rows {
            writeln!(out, "{},{}", r.eta, r.l1_distance)?;
        }
        Ok(())
    }
}

/// One local Godunov run plus one non-local run per `eta`, each with its
/// own CFL step.
pub fn local_limit(problem: &Problem, etas: &[f64]) -> Result<LocalLimit> {
    let mut local_cfg = problem.scheme.clone();
    local_cfg.scheme = SchemeKind::LocalGodunov;
    local_cfg.lambda = None;
    local_cfg.step_rule = StepRule::Own;
    let local_problem = Problem {
        scheme: local_cfg,
        ..problem.clone()
    };
    let nonlocal_scheme = match problem.scheme.scheme {
        SchemeKind::LocalGodunov => SchemeKind::Godunov,
        s => s,
    };
    let runs: Vec<Result<GridState>> = std::iter::once(None)
        .chain(etas.iter().map(|&e| Some(e)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|eta| match eta {
            None => run_problem(&local_problem, &sweep_options()).map(|(s, _)| s),
            Some(eta) => {
                let mut p = problem.with_eta(*eta)?;
                p.scheme.scheme = nonlocal_scheme;
                run_problem(&p, &sweep_options()).map(|(s, _)| s)
            }
        })
        .collect();
    let mut runs = runs.into_iter();
    let local = runs.next().expect("local run")?;
    let nonlocal: Vec<GridState> = runs.collect::<Result<_>>()?;
    let rows = etas
        .iter()
        .zip(&nonlocal)
        .map(|(&eta, s)| Ok(LocalLimitRow { eta, l1_distance: l1_error(s, &local)? }))
        .collect::<Result<_>>()?;
    Ok(LocalLimit { local, nonlocal, rows })
}
