//! Downstream look-ahead kernels and their cell-integrated weights.
//!
//! A kernel `w_eta` lives on `[0, eta]`, is non-negative, non-increasing and
//! carries total mass `w0`. Every family is written as a shape polynomial
//! `p(s)` on the normalized variable `s = x / eta in [0, 1]`:
//!
//! ```text
//! w_eta(x) = w0 * p(x / eta) / (eta * int_0^1 p(s) ds)
//! ```
//!
//! so the mass constraint holds for every `eta` by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Points used by the sampled hypothesis checks.
pub const HYPOTHESIS_SAMPLES: usize = 1001;

/// Relative tolerance on `eta / h` being an integer.
pub const DIVISIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    /// `w_eta = w0 / eta`.
    Constant,
    /// `w_eta(x) = 3 w0 (eta^2 - x^2) / (2 eta^3)`.
    DowncastParabola,
    /// Shape polynomial in `s = x / eta`; normalized to mass `w0`.
    CustomPolynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub eta: f64,
    #[serde(default = "default_w0")]
    pub w0: f64,
}

fn default_w0() -> f64 {
    1.0
}

impl KernelSpec {
    pub fn constant(eta: f64) -> Self {
        Self {
            family: KernelFamily::Constant,
            eta,
            w0: 1.0,
        }
    }

    pub fn parabola(eta: f64) -> Self {
        Self {
            family: KernelFamily::DowncastParabola,
            eta,
            w0: 1.0,
        }
    }

    pub fn custom(coefficients: Vec<f64>, eta: f64) -> Self {
        Self {
            family: KernelFamily::CustomPolynomial { coefficients },
            eta,
            w0: 1.0,
        }
    }

    fn shape(&self) -> Polynomial {
        match &self.family {
            KernelFamily::Constant => Polynomial::constant(1.0),
            KernelFamily::DowncastParabola => Polynomial::new(vec![1.5, 0.0, -1.5]),
            KernelFamily::CustomPolynomial { coefficients } => Polynomial::new(coefficients.clone()),
        }
    }

    fn shape_mass(&self) -> f64 {
        match self.family {
            KernelFamily::Constant | KernelFamily::DowncastParabola => 1.0,
            KernelFamily::CustomPolynomial { .. } => self.shape().integrate(0.0, 1.0),
        }
    }

    /// Scale turning the shape polynomial into `w_eta`.
    fn scale(&self) -> f64 {
        self.w0 / (self.eta * self.shape_mass())
    }

    /// Kernel value; zero outside `[0, eta]`.
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=self.eta).contains(&x) {
            return 0.0;
        }
        self.scale() * self.shape().eval(x / self.eta)
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        if !(0.0..=self.eta).contains(&x) {
            return 0.0;
        }
        self.scale() / self.eta * self.shape().derivative().eval(x / self.eta)
    }

    pub fn w_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// `sup |w_eta'|` on `[0, eta]`.
    pub fn derivative_sup(&self) -> f64 {
        match self.family {
            KernelFamily::Constant => 0.0,
            // |w'| = 3 w0 x / eta^3, largest at x = eta
            KernelFamily::DowncastParabola => 3.0 * self.w0 / (self.eta * self.eta),
            KernelFamily::CustomPolynomial { .. } => {
                self.scale() / self.eta * self.shape().derivative().max_abs_on(0.0, 1.0)
            }
        }
    }

    /// Checks `eta > 0`, `w0 > 0`, and non-negativity / monotonicity of the
    /// kernel on a uniform sample.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidKernel(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(self.w0.is_finite() && self.w0 > 0.0) {
            return Err(Error::InvalidKernel(format!("w0 must be > 0, got {}", self.w0)));
        }
        let shape = self.shape();
        let mass = self.shape_mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "shape polynomial has non-positive mass {mass}"
            )));
        }
        let dshape = shape.derivative();
        let tol = 1e-12 * shape.max_abs_on(0.0, 1.0).max(1.0);
        for i in 0..HYPOTHESIS_SAMPLES {
            let s = i as f64 / (HYPOTHESIS_SAMPLES - 1) as f64;
            if shape.eval(s) < -tol {
                return Err(Error::InvalidKernel(format!(
                    "kernel is negative at x = {}",
                    s * self.eta
                )));
            }
            if dshape.eval(s) > tol {
                return Err(Error::InvalidKernel(format!(
                    "kernel is increasing at x = {}",
                    s * self.eta
                )));
            }
        }
        Ok(())
    }

    /// Number of cells `N = eta / h` covered by the kernel.
    pub fn cells_for(&self, h: f64) -> Result<usize> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("h must be > 0, got {h}")));
        }
        let ratio = self.eta / h;
        let n = ratio.round();
        if (ratio - n).abs() > DIVISIBILITY_TOL * ratio {
            return Err(Error::NonDivisibleEta {
                eta: self.eta,
                h,
                ratio,
            });
        }
        if n < 1.0 {
            return Err(Error::InvalidKernel(format!(
                "kernel shorter than one cell (eta = {}, h = {h})",
                self.eta
            )));
        }
        Ok(n as usize)
    }
}

/// Cell-integrated kernel weights `gamma_k = int_{kh}^{(k+1)h} w_eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    gamma: Vec<f64>,
    h: f64,
    w_at_zero: f64,
    w0: f64,
    derivative_sup: f64,
}

impl DiscreteKernel {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn n_cells(&self) -> usize {
        self.gamma.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn w_at_zero(&self) -> f64 {
        self.w_at_zero
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    /// `sup |w_eta'|`, carried along for the stability constant.
    pub fn derivative_sup(&self) -> f64 {
        self.derivative_sup
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma[0]
    }

    /// Kernel from explicit weights. `w_eta(0)` is taken as `gamma_0 / h`,
    /// the smallest value consistent with `gamma_0 <= h w_eta(0)`.
    pub fn from_weights(gamma: Vec<f64>, h: f64) -> Result<Self> {
        if gamma.is_empty() || gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidKernel("weights must be non-empty and >= 0".into()));
        }
        let w0 = gamma.iter().sum();
        Ok(Self {
            w_at_zero: gamma[0] / h,
            gamma,
            h,
            w0,
            derivative_sup: 0.0,
        })
    }
}

/// Exact cell integrals of the kernel, renormalized so that they sum to `w0`.
pub fn quadrature_weights(spec: &KernelSpec, h: f64) -> Result<DiscreteKernel> {
    spec.validate()?;
    let n = spec.cells_for(h)?;
    let nf = n as f64;
    // antiderivative of the shape in s, divided by its total mass
    let (anti, mass): (Box<dyn Fn(f64) -> f64>, f64) = match &spec.family {
        KernelFamily::Constant => (Box::new(|s| s), 1.0),
        KernelFamily::DowncastParabola => (Box::new(|s| 0.5 * (3.0 * s - s * s * s)), 1.0),
        KernelFamily::CustomPolynomial { coefficients } => {
            let p = Polynomial::new(coefficients.clone()).antiderivative();
            let mass = p.eval(1.0);
            (Box::new(move |s| p.eval(s)), mass)
        }
    };
    let mut gamma: Vec<f64> = (0..n)
        .map(|k| spec.w0 * (anti((k + 1) as f64 / nf) - anti(k as f64 / nf)) / mass)
        .collect();
    if let Some((k, g)) = gamma.iter().enumerate().find(|(_, g)| **g < 0.0) {
        return Err(Error::InvalidKernel(format!("gamma_{k} = {g} is negative")));
    }
    let sum: f64 = gamma.iter().sum();
    let rescale = spec.w0 / sum;
    gamma.iter_mut().for_each(|g| *g *= rescale);
    for k in 1..n {
        if gamma[k] > gamma[k - 1] * (1.0 + 1e-12) {
            return Err(Error::InvalidKernel(format!(
                "weights increase at k = {k} ({} > {})",
                gamma[k],
                gamma[k - 1]
            )));
        }
    }
    Ok(DiscreteKernel {
        gamma,
        h,
        w_at_zero: spec.w_at_zero(),
        w0: spec.w0,
        derivative_sup: spec.derivative_sup(),
    })
}

/// Point samples `w_eta(k h)`, `k = 0..N-1`, as used by the classical
/// Lax-Friedrichs discretization of the convolution.
pub fn lxf_point_weights(spec: &KernelSpec, h: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.cells_for(h)?;
    Ok((0..n).map(|k| spec.eval(k as f64 * h)).collect())
}
