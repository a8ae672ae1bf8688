use crate::error::{Error, Result};
use crate::kernel::HYPOTHESIS_SAMPLES;
use crate::model::ModelSpec;
use crate::poly::Polynomial;

/// Godunov-type interface flux `V g(rho_left)`.
///
/// With `V >= 0` and `g` non-decreasing, the min (resp. max) of `V g` over
/// the interval between the two neighbouring states is always taken at the
/// upwind state, so the Riemann case split collapses to this product.
#[inline]
pub fn godunov_flux(rho_left: f64, velocity: f64, model: &ModelSpec) -> f64 {
    velocity * model.g(rho_left)
}

/// Classical Godunov flux for a unimodal local flux `f = g v`.
#[derive(Debug, Clone)]
pub struct LocalGodunovFlux {
    f: Polynomial,
    /// Interior maximum of `f`, if any.
    peak: Option<f64>,
}

impl LocalGodunovFlux {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let f = model.local_flux();
        let df = f.derivative();
        let rho_max = model.rho_max();
        let tol = 1e-12 * df.max_abs_on(0.0, rho_max).max(1.0);
        let mut signs = Vec::new();
        for i in 0..HYPOTHESIS_SAMPLES {
            let rho = rho_max * i as f64 / (HYPOTHESIS_SAMPLES - 1) as f64;
            let d = df.eval(rho);
            let s = if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                continue;
            };
            if signs.last() != Some(&s) {
                signs.push(s);
            }
        }
        let changes = signs.len().saturating_sub(1);
        let unimodal = changes == 0 || (changes == 1 && signs[0] == 1);
        if !unimodal {
            return Err(Error::NonUnimodalFlux(changes));
        }
        let peak = if changes == 1 {
            df.roots_in(0.0, rho_max)
                .into_iter()
                .max_by(|a, b| f.eval(*a).total_cmp(&f.eval(*b)))
        } else {
            None
        };
        Ok(Self { f, peak })
    }

    pub fn peak(&self) -> Option<f64> {
        self.peak
    }

    pub fn f(&self, rho: f64) -> f64 {
        self.f.eval(rho)
    }

    /// `min f` on `[l, r]` if `l <= r`, else `max f` on `[r, l]`.
    #[inline]
    pub fn flux(&self, left: f64, right: f64) -> f64 {
        let fl = self.f.eval(left);
        let fr = self.f.eval(right);
        if left <= right {
            fl.min(fr)
        } else {
            match self.peak {
                Some(p) if right <= p && p <= left => self.f.eval(p),
                _ => fl.max(fr),
            }
        }
    }
}
