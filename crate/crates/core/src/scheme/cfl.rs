use crate::error::{Error, Result};
use crate::kernel::DiscreteKernel;
use crate::model::{ModelNorms, ModelSpec};

/// `1 / (gamma_0 ||v'|| ||g|| + ||v|| ||g'||)`; `+inf` when the denominator vanishes.
pub fn godunov_bound(norms: &ModelNorms, gamma0: f64) -> f64 {
    let denom = gamma0 * norms.dv_sup * norms.g_sup + norms.v_sup * norms.dg_sup;
    if denom > 0.0 {
        1.0 / denom
    } else {
        f64::INFINITY
    }
}

/// Largest `lambda = tau / h` keeping the Godunov-type scheme within the
/// maximum principle.
pub fn cfl_lambda_godunov(model: &ModelSpec, kernel: &DiscreteKernel) -> f64 {
    godunov_bound(&model.compute_norms(), kernel.gamma0())
}

/// `||v|| ||g'||`: bounds `|d/drho (V g(rho))|` for any `0 <= V <= ||v||`.
pub fn default_lxf_alpha(model: &ModelSpec) -> f64 {
    let n = model.compute_norms();
    n.v_sup * n.dg_sup
}

/// LxF restriction `lambda alpha <= 1`.
pub fn cfl_lambda_lxf(alpha: f64) -> f64 {
    if alpha > 0.0 {
        1.0 / alpha
    } else {
        f64::INFINITY
    }
}

/// `1 / max |f'|` for the local flux `f = g v`.
pub fn cfl_lambda_local(model: &ModelSpec) -> f64 {
    let speed = model.local_flux().derivative().max_abs_on(0.0, model.rho_max());
    if speed > 0.0 {
        1.0 / speed
    } else {
        f64::INFINITY
    }
}

/// Turns an admissible-lambda bound into a concrete time step multiplier.
pub(crate) fn finite_lambda(bound: f64, safety: f64) -> Result<f64> {
    if bound.is_finite() {
        Ok(bound * safety)
    } else {
        Err(Error::DegenerateModel)
    }
}
