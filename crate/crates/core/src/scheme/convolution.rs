//! Periodic discrete convolution of the kernel weights with a cell field.
//!
//! Both backends compute
//!
//! ```text
//! out_j = sum_{k=0}^{N-1} gamma_k * u_{(j + k + offset) mod M}
//! ```
//!
//! `Direct` evaluates the sum literally in O(M N); `Fast` evaluates the
//! same circular cross-correlation through a length-M FFT.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::kernel::DiscreteKernel;
use crate::model::{ModelSpec, ModelVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionBackend {
    Direct,
    #[default]
    Fast,
}

impl std::str::FromStr for ConvolutionBackend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Self::Direct),
            "fast" => Ok(Self::Fast),
            other => Err(format!("unknown backend `{other}` (expected direct or fast)")),
        }
    }
}

struct FftPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// conj(FFT(wrapped weights)) / M
    kernel_hat: Vec<Complex<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

/// Precomputed periodic convolution for one kernel, grid size and offset.
pub struct Convolver {
    gamma: Vec<f64>,
    m: usize,
    offset: usize,
    fft: Option<FftPlan>,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("n", &self.gamma.len())
            .field("m", &self.m)
            .field("offset", &self.offset)
            .field("fast", &self.fft.is_some())
            .finish()
    }
}

impl Convolver {
    pub fn new(gamma: &[f64], m: usize, offset: usize, backend: ConvolutionBackend) -> Self {
        let fft = match backend {
            ConvolutionBackend::Direct => None,
            ConvolutionBackend::Fast => {
                let mut planner = FftPlanner::new();
                let forward = planner.plan_fft_forward(m);
                let inverse = planner.plan_fft_inverse(m);
                // a kernel longer than the domain folds onto itself
                let mut kernel_hat = vec![Complex::new(0.0, 0.0); m];
                for (k, &g) in gamma.iter().enumerate() {
                    kernel_hat[(k + offset) % m].re += g;
                }
                let scratch_len = forward
                    .get_inplace_scratch_len()
                    .max(inverse.get_inplace_scratch_len());
                let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];
                forward.process_with_scratch(&mut kernel_hat, &mut scratch);
                let scale = 1.0 / m as f64;
                kernel_hat.iter_mut().for_each(|c| *c = c.conj() * scale);
                Some(FftPlan {
                    forward,
                    inverse,
                    kernel_hat,
                    buf: vec![Complex::new(0.0, 0.0); m],
                    scratch,
                })
            }
        };
        Self {
            gamma: gamma.to_vec(),
            m,
            offset,
            fft,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn apply(&mut self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.m);
        debug_assert_eq!(out.len(), self.m);
        match &mut self.fft {
            None => {
                let m = self.m;
                for (j, o) in out.iter_mut().enumerate() {
                    let mut idx = (j + self.offset) % m;
                    let mut acc = 0.0;
                    for &g in &self.gamma {
                        acc += g * input[idx];
                        idx += 1;
                        if idx == m {
                            idx = 0;
                        }
                    }
                    *o = acc;
                }
            }
            Some(plan) => {
                for (b, &x) in plan.buf.iter_mut().zip(input) {
                    *b = Complex::new(x, 0.0);
                }
                plan.forward.process_with_scratch(&mut plan.buf, &mut plan.scratch);
                for (b, k) in plan.buf.iter_mut().zip(&plan.kernel_hat) {
                    *b *= k;
                }
                plan.inverse.process_with_scratch(&mut plan.buf, &mut plan.scratch);
                for (o, b) in out.iter_mut().zip(&plan.buf) {
                    *o = b.re;
                }
            }
        }
    }
}

pub(crate) fn check_kernel_grid(kernel: &DiscreteKernel, grid_h: f64) -> Result<()> {
    if (kernel.h() - grid_h).abs() > 1e-12 * grid_h {
        return Err(Error::KernelGridMismatch {
            kernel_h: kernel.h(),
            grid_h,
        });
    }
    Ok(())
}

/// Non-local velocities at interfaces, `V[j] = V_{j+1/2}`.
///
/// Mean-velocity models average `v(rho)` over the window `j+1 ..= j+N`;
/// mean-density models apply `v` to the averaged density.
pub fn convolve_velocity(
    state: &GridState,
    model: &ModelSpec,
    kernel: &DiscreteKernel,
    backend: ConvolutionBackend,
) -> Result<Vec<f64>> {
    check_kernel_grid(kernel, state.grid.h())?;
    let m = state.grid.n_cells();
    let mut conv = Convolver::new(kernel.gamma(), m, 1, backend);
    let mut out = vec![0.0; m];
    let mut input = vec![0.0; m];
    nonlocal_velocity(model, &mut conv, &state.rho, &mut input, &mut out);
    Ok(out)
}

/// Shared by the steppers: `input` is scratch of length M.
pub(crate) fn nonlocal_velocity(
    model: &ModelSpec,
    conv: &mut Convolver,
    rho: &[f64],
    input: &mut [f64],
    out: &mut [f64],
) {
    match model.variant() {
        ModelVariant::MeanVelocity => {
            for (u, &r) in input.iter_mut().zip(rho) {
                *u = model.v(r);
            }
            conv.apply(input, out);
        }
        ModelVariant::MeanDensity => {
            conv.apply(rho, out);
            out.iter_mut().for_each(|x| *x = model.v(*x));
        }
    }
    // transform round-off can leave a stalled region at -1e-17
    out.iter_mut().for_each(|x| *x = x.max(0.0));
}
