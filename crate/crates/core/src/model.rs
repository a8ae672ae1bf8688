//! Velocity laws, flux factors and the two non-local model variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::HYPOTHESIS_SAMPLES;
use crate::poly::Polynomial;

/// Slack allowed outside `[0, rho_max]` before evaluation is refused.
pub const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    /// Flux `g(rho) * (w * v(rho))`.
    MeanVelocity,
    /// Flux `g(rho) * v(w * rho)`.
    MeanDensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum VelocityFn {
    /// `v = 1 - rho`
    AffineOneMinusRho,
    /// `v = 1 - rho^p`
    PowerOneMinusRhoP { p: u32 },
    CustomPolynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FluxGFn {
    Identity,
    CustomPolynomial { coefficients: Vec<f64> },
}

impl VelocityFn {
    pub fn polynomial(&self) -> Polynomial {
        match self {
            VelocityFn::AffineOneMinusRho => Polynomial::new(vec![1.0, -1.0]),
            VelocityFn::PowerOneMinusRhoP { p } => {
                let mut c = vec![0.0; *p as usize + 1];
                c[0] = 1.0;
                c[*p as usize] -= 1.0;
                Polynomial::new(c)
            }
            VelocityFn::CustomPolynomial { coefficients } => Polynomial::new(coefficients.clone()),
        }
    }

    pub fn is_affine(&self) -> bool {
        self.polynomial().degree() <= 1
    }
}

impl FluxGFn {
    pub fn polynomial(&self) -> Polynomial {
        match self {
            FluxGFn::Identity => Polynomial::new(vec![0.0, 1.0]),
            FluxGFn::CustomPolynomial { coefficients } => Polynomial::new(coefficients.clone()),
        }
    }
}

/// Sup-norms on `[0, rho_max]` entering the CFL condition and the bound constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelNorms {
    pub v_sup: f64,
    pub dv_sup: f64,
    pub g_sup: f64,
    pub dg_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    variant: ModelVariant,
    velocity: VelocityFn,
    flux_g: FluxGFn,
    rho_max: f64,
    v: Polynomial,
    dv: Polynomial,
    g: Polynomial,
    dg: Polynomial,
}

impl ModelSpec {
    pub fn new(variant: ModelVariant, velocity: VelocityFn, flux_g: FluxGFn, rho_max: f64) -> Result<Self> {
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::InvalidModel(format!("rho_max must be > 0, got {rho_max}")));
        }
        if let VelocityFn::PowerOneMinusRhoP { p: 0 } = velocity {
            return Err(Error::InvalidModel("velocity exponent p must be >= 1".into()));
        }
        let v = velocity.polynomial();
        let g = flux_g.polynomial();
        Ok(Self {
            variant,
            dv: v.derivative(),
            dg: g.derivative(),
            v,
            g,
            velocity,
            flux_g,
            rho_max,
        })
    }

    /// Classical LWR choice: `v = 1 - rho`, `g = rho` on `[0, 1]`.
    pub fn lwr_affine(variant: ModelVariant) -> Self {
        Self::new(variant, VelocityFn::AffineOneMinusRho, FluxGFn::Identity, 1.0)
            .expect("static model is valid")
    }

    /// `v = 1 - rho^p`, `g = rho` on `[0, 1]`.
    pub fn lwr_power(variant: ModelVariant, p: u32) -> Self {
        Self::new(variant, VelocityFn::PowerOneMinusRhoP { p }, FluxGFn::Identity, 1.0)
            .expect("static model is valid")
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn with_variant(&self, variant: ModelVariant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn velocity(&self) -> &VelocityFn {
        &self.velocity
    }

    pub fn flux_g(&self) -> &FluxGFn {
        &self.flux_g
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    fn check_range(&self, rho: f64) -> Result<f64> {
        if rho.is_nan() || rho < -RANGE_SLACK || rho > self.rho_max + RANGE_SLACK {
            return Err(Error::OutOfRange {
                rho,
                rho_max: self.rho_max,
            });
        }
        Ok(rho.clamp(0.0, self.rho_max))
    }

    pub fn eval_v(&self, rho: f64) -> Result<f64> {
        Ok(self.v.eval(self.check_range(rho)?))
    }

    pub fn eval_dv(&self, rho: f64) -> Result<f64> {
        Ok(self.dv.eval(self.check_range(rho)?))
    }

    pub fn eval_g(&self, rho: f64) -> Result<f64> {
        Ok(self.g.eval(self.check_range(rho)?))
    }

    pub fn eval_dg(&self, rho: f64) -> Result<f64> {
        Ok(self.dg.eval(self.check_range(rho)?))
    }

    // Unchecked evaluators for the time-stepping loops.

    #[inline]
    pub(crate) fn v(&self, rho: f64) -> f64 {
        self.v.eval(rho)
    }

    #[inline]
    pub(crate) fn g(&self, rho: f64) -> f64 {
        self.g.eval(rho)
    }

    pub fn v_polynomial(&self) -> &Polynomial {
        &self.v
    }

    pub fn g_polynomial(&self) -> &Polynomial {
        &self.g
    }

    /// The local LWR flux `f = g v`.
    pub fn local_flux(&self) -> Polynomial {
        self.g.mul(&self.v)
    }

    pub fn compute_norms(&self) -> ModelNorms {
        let r = self.rho_max;
        let (v_sup, dv_sup) = match self.velocity {
            VelocityFn::AffineOneMinusRho => ((1.0f64).max((1.0 - r).abs()), 1.0),
            VelocityFn::PowerOneMinusRhoP { p } => (
                (1.0f64).max((1.0 - r.powi(p as i32)).abs()),
                p as f64 * r.powi(p as i32 - 1),
            ),
            VelocityFn::CustomPolynomial { .. } => (self.v.max_abs_on(0.0, r), self.dv.max_abs_on(0.0, r)),
        };
        let (g_sup, dg_sup) = match self.flux_g {
            FluxGFn::Identity => (r, 1.0),
            FluxGFn::CustomPolynomial { .. } => (self.g.max_abs_on(0.0, r), self.dg.max_abs_on(0.0, r)),
        };
        ModelNorms {
            v_sup,
            dv_sup,
            g_sup,
            dg_sup,
        }
    }

    /// Samples the hypotheses on a uniform grid over `[0, rho_max]` and
    /// reports the first violating density for each condition.
    pub fn validate_hypotheses(&self) -> HypothesisReport {
        let tol = 1e-12;
        let mut report = HypothesisReport::default();
        for i in 0..HYPOTHESIS_SAMPLES {
            let rho = self.rho_max * i as f64 / (HYPOTHESIS_SAMPLES - 1) as f64;
            let first = |slot: &mut Option<f64>, bad: bool| {
                if bad && slot.is_none() {
                    *slot = Some(rho);
                }
            };
            first(&mut report.v_negative, self.v.eval(rho) < -tol);
            first(&mut report.v_increasing, self.dv.eval(rho) > tol);
            first(&mut report.g_negative, self.g.eval(rho) < -tol);
            first(&mut report.g_decreasing, self.dg.eval(rho) < -tol);
        }
        report
    }
}

/// First violating abscissa per condition; `None` means the condition held
/// at every sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HypothesisReport {
    pub v_negative: Option<f64>,
    pub v_increasing: Option<f64>,
    pub g_negative: Option<f64>,
    pub g_decreasing: Option<f64>,
}

impl HypothesisReport {
    /// Velocity non-negative and non-increasing, flux factor non-negative.
    pub fn h1_holds(&self) -> bool {
        self.v_negative.is_none() && self.v_increasing.is_none() && self.g_negative.is_none()
    }

    /// H1 plus a non-decreasing flux factor.
    pub fn h2_holds(&self) -> bool {
        self.h1_holds() && self.g_decreasing.is_none()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |name: &str, at: Option<f64>| {
            if let Some(rho) = at {
                out.push(format!("{name} at rho = {rho}"));
            }
        };
        push("(H1) v < 0", self.v_negative);
        push("(H1) v' > 0", self.v_increasing);
        push("(H1) g < 0", self.g_negative);
        push("(H2) g' < 0", self.g_decreasing);
        out
    }
}
