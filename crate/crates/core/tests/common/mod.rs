//! Randomized scenarios and property checks shared by the integration tests
//! and the acceptance harness. Each check returns `Ok(detail)` or
//! `Err(detail)`.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use nonlocal_lwr::config::Problem;
use nonlocal_lwr::diagnostics::{bv_growth_constant, l1_error, lipschitz_stability_check, total_variation};
use nonlocal_lwr::experiment::{compare_models, run_problem};
use nonlocal_lwr::grid::total_mass;
use nonlocal_lwr::kernel::quadrature_weights;
use nonlocal_lwr::model::ModelNorms;
use nonlocal_lwr::scheme::{ConvolutionBackend, Stepper};
use nonlocal_lwr::*;

pub type Check = std::result::Result<String, String>;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_kernel(rng: &mut StdRng, eta: f64) -> KernelSpec {
    let w0 = rng.gen_range(0.5..1.5);
    let family = match rng.gen_range(0..3) {
        0 => KernelFamily::Constant,
        1 => KernelFamily::DowncastParabola,
        _ => {
            // 1 - a s - b s^2 with a, b >= 0 and a + b <= 1 is non-negative and non-increasing
            let a = rng.gen_range(0.0..0.6);
            let b = rng.gen_range(0.0..(1.0 - a));
            KernelFamily::CustomPolynomial {
                coefficients: vec![1.0, -a, -b],
            }
        }
    };
    KernelSpec { family, eta, w0 }
}

pub fn random_model(rng: &mut StdRng, unimodal: bool) -> ModelSpec {
    let variant = if rng.gen_bool(0.5) {
        ModelVariant::MeanVelocity
    } else {
        ModelVariant::MeanDensity
    };
    let velocity = match rng.gen_range(0..3) {
        0 => VelocityFn::AffineOneMinusRho,
        1 => VelocityFn::PowerOneMinusRhoP { p: rng.gen_range(2..=5) },
        _ => VelocityFn::CustomPolynomial {
            coefficients: vec![1.0, -0.5, -0.5],
        },
    };
    let flux_g = if unimodal || rng.gen_bool(0.5) {
        FluxGFn::Identity
    } else {
        FluxGFn::CustomPolynomial {
            coefficients: vec![0.0, 1.0, rng.gen_range(0.0..0.5)],
        }
    };
    ModelSpec::new(variant, velocity, flux_g, 1.0).unwrap()
}

pub fn random_initial(rng: &mut StdRng) -> InitialData {
    let pieces = rng.gen_range(2..=6);
    let mut xs: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.01..0.99)).collect();
    xs.push(0.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    InitialData::PiecewiseConstant {
        breakpoints: xs.into_iter().map(|x| (x, rng.gen_range(0.0..1.0))).collect(),
    }
}

/// A CFL-valid problem with `M <= 512`.
pub fn random_problem(rng: &mut StdRng, scheme: SchemeKind) -> Problem {
    let m = [64usize, 100, 128, 200, 256, 512][rng.gen_range(0..6)];
    let grid = Grid1D::new(1.0, m).unwrap();
    let n = rng.gen_range(1..=(m / 8).min(40));
    let eta = n as f64 * grid.h();
    let mut kernel_spec = random_kernel(rng, eta);
    let model = random_model(rng, scheme == SchemeKind::LocalGodunov);
    if model.variant() == ModelVariant::MeanDensity {
        // keep the averaged density inside [0, rho_max]
        kernel_spec.w0 = kernel_spec.w0.min(1.0);
    }
    let kernel = quadrature_weights(&kernel_spec, grid.h()).unwrap();
    let scheme = SchemeConfig::new(scheme).with_cfl_safety(rng.gen_range(0.2..=1.0));
    Problem {
        model,
        kernel_spec,
        kernel,
        grid,
        initial: random_initial(rng),
        scheme,
        t_final: rng.gen_range(0.02..0.2),
    }
}

fn recorded() -> RunOptions {
    RunOptions {
        record_steps: true,
        ..RunOptions::default()
    }
}

pub fn mass_conservation(scenarios: usize) -> Check {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for i in 0..scenarios {
        for scheme in [SchemeKind::Godunov, SchemeKind::Lxf, SchemeKind::LocalGodunov] {
            let p = random_problem(&mut r, scheme);
            let m0 = total_mass(&project_initial(&p.initial, &p.grid).unwrap());
            let (s, _) = run_problem(&p, &RunOptions::default()).map_err(|e| format!("scenario {i}: {e}"))?;
            let drift = (total_mass(&s) - m0).abs() / m0.max(1e-300);
            worst = worst.max(drift);
        }
    }
    let detail = format!("max relative drift {worst:.2e} over {} runs", 3 * scenarios);
    if worst <= 1e-11 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn maximum_principle(scenarios: usize) -> Check {
    let mut r = rng(22);
    for i in 0..scenarios {
        let p = random_problem(&mut r, SchemeKind::Godunov);
        let s0 = project_initial(&p.initial, &p.grid).unwrap();
        let (lo, hi) = (s0.min(), s0.max());
        let (_, rep) = run_problem(&p, &recorded()).map_err(|e| format!("scenario {i}: {e}"))?;
        if rep.invariants.max_principle_violations > 0 {
            return Err(format!("scenario {i}: {} in-step violations", rep.invariants.max_principle_violations));
        }
        for rec in &rep.steps {
            if rec.min_rho < lo - 1e-14 || rec.max_rho > hi + 1e-14 {
                return Err(format!(
                    "scenario {i} step {}: range [{}, {}] outside [{lo}, {hi}]",
                    rec.step, rec.min_rho, rec.max_rho
                ));
            }
        }
    }
    Ok(format!("{scenarios} randomized Godunov runs, zero violations"))
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Literal evaluation of the cell entropy inequality
/// `|u'-k| - |u-k| + lam (F^k_{j+1/2} - F^k_{j-1/2}) + lam sgn(u'-k) g(k) (V_{j+1/2} - V_{j-1/2}) <= 0`
/// with `F^k_{j+1/2} = V_{j+1/2} (g(u_j v k) - g(u_j ^ k))`.
fn entropy_max_residual(model: &ModelSpec, rho: &[f64], vel: &[f64], next: &[f64], lam: f64) -> f64 {
    let g = |u: f64| model.eval_g(u).unwrap();
    let m = rho.len();
    let mut kappas: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut worst = f64::NEG_INFINITY;
    for j in 0..m {
        let jm = (j + m - 1) % m;
        kappas.truncate(21);
        kappas.extend([rho[jm], rho[j], next[j]]);
        for &k in &kappas {
            let f_right = vel[j] * (g(rho[j].max(k)) - g(rho[j].min(k)));
            let f_left = vel[jm] * (g(rho[jm].max(k)) - g(rho[jm].min(k)));
            let res = (next[j] - k).abs() - (rho[j] - k).abs()
                + lam * (f_right - f_left)
                + lam * sgn(next[j] - k) * g(k) * (vel[j] - vel[jm]);
            worst = worst.max(res);
        }
    }
    worst
}

pub fn entropy_inequality(runs: usize) -> Check {
    let mut r = rng(33);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..runs {
        let mut p = random_problem(&mut r, SchemeKind::Godunov);
        p.t_final = p.t_final.min(0.05);
        let opts = RunOptions {
            record_trace: true,
            entropy_check: true,
            ..RunOptions::default()
        };
        let (_, rep) = run_problem(&p, &opts).map_err(|e| format!("run {i}: {e}"))?;
        for t in &rep.trace {
            worst = worst.max(entropy_max_residual(&p.model, &t.rho, &t.velocity, &t.next, t.lambda));
        }
        let lib = rep.entropy.map(|e| e.max_residual).unwrap_or(f64::NEG_INFINITY);
        worst = worst.max(lib);
    }
    let detail = format!("max residual {worst:.2e} over {runs} runs");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn tv_growth(scenarios: usize) -> Check {
    let mut r = rng(44);
    let mut worst_ratio = 0.0f64;
    for i in 0..scenarios {
        let mut p = random_problem(&mut r, SchemeKind::Godunov);
        p.model = p.model.with_variant(ModelVariant::MeanVelocity);
        let c = bv_growth_constant(&p.model, &p.kernel);
        let (s, rep) = run_problem(&p, &recorded()).map_err(|e| format!("scenario {i}: {e}"))?;
        for w in rep.steps.windows(2) {
            let dt = w[1].time - w[0].time;
            let allowed = (1.0 + dt * c) * w[0].tv;
            if w[1].tv > allowed * (1.0 + 1e-12) + 1e-14 {
                return Err(format!("scenario {i} step {}: TV {} > {allowed}", w[1].step, w[1].tv));
            }
            if allowed > 0.0 {
                worst_ratio = worst_ratio.max(w[1].tv / allowed);
            }
        }
        let tv0 = rep.steps[0].tv;
        let cumulative = (c * p.t_final).exp() * tv0;
        if total_variation(&s) > cumulative * (1.0 + 1e-12) + 1e-14 {
            return Err(format!("scenario {i}: final TV {} > {cumulative}", total_variation(&s)));
        }
        if rep.invariants.tv_growth_violations > 0 {
            return Err(format!("scenario {i}: in-run TV check fired"));
        }
    }
    Ok(format!("{scenarios} runs, max per-step ratio {worst_ratio:.6}"))
}

pub fn flux_and_velocity_bounds(scenarios: usize) -> Check {
    let mut r = rng(55);
    for i in 0..scenarios {
        let p = random_problem(&mut r, SchemeKind::Godunov);
        let (_, rep) = run_problem(&p, &RunOptions::default()).map_err(|e| format!("scenario {i}: {e}"))?;
        if rep.invariants.negative_fluxes > 0 || rep.invariants.velocity_bound_violations > 0 {
            return Err(format!("scenario {i}: {:?}", rep.invariants));
        }
        // direct probe on random states in [0, 1]
        let m = p.grid.n_cells();
        let mut st = Stepper::new(&p.model, &p.kernel, m, &p.scheme).unwrap();
        let rho: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..=1.0)).collect();
        let mut next = vec![0.0; m];
        st.advance(&rho, &mut next, 0.1);
        let cap = match p.model.variant() {
            ModelVariant::MeanVelocity => p.kernel.w0(),
            ModelVariant::MeanDensity => 1.0,
        } * p.model.eval_v(0.0).unwrap();
        if let Some(v) = st.velocity().iter().find(|&&v| !(0.0..=cap * (1.0 + 1e-12)).contains(&v)) {
            return Err(format!("scenario {i}: velocity {v} outside [0, {cap}]"));
        }
        if let Some(f) = st.flux().iter().find(|&&f| f < 0.0) {
            return Err(format!("scenario {i}: flux {f} < 0"));
        }
    }
    Ok(format!("{scenarios} runs plus random-state probes"))
}

pub fn affine_coincidence(scenarios: usize) -> Check {
    let mut r = rng(66);
    let mut worst = 0.0f64;
    for i in 0..scenarios {
        let mut p = random_problem(&mut r, SchemeKind::Godunov);
        p.model = ModelSpec::new(
            ModelVariant::MeanVelocity,
            VelocityFn::AffineOneMinusRho,
            p.model.flux_g().clone(),
            1.0,
        )
        .unwrap();
        // the identity needs sum gamma = 1
        p.kernel_spec.w0 = 1.0;
        p.kernel = quadrature_weights(&p.kernel_spec, p.grid.h()).unwrap();
        let c = compare_models(&p).map_err(|e| format!("scenario {i}: {e}"))?;
        worst = worst.max(c.l1_distance);
    }
    let detail = format!("max L1 distance {worst:.2e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn backend_agreement(scenarios: usize) -> Check {
    let mut r = rng(77);
    let mut worst = 0.0f64;
    for i in 0..scenarios {
        let scheme = if i % 2 == 0 { SchemeKind::Godunov } else { SchemeKind::Lxf };
        let mut p = random_problem(&mut r, scheme);
        p.scheme.backend = ConvolutionBackend::Direct;
        let (a, _) = run_problem(&p, &RunOptions::default()).map_err(|e| e.to_string())?;
        p.scheme.backend = ConvolutionBackend::Fast;
        let (b, _) = run_problem(&p, &RunOptions::default()).map_err(|e| e.to_string())?;
        let d = a.rho.iter().zip(&b.rho).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    let detail = format!("max |fast - direct| {worst:.2e}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn weight_properties() -> Check {
    let mut r = rng(88);
    let mut worst_sum = 0.0f64;
    let mut worst_split = 0.0f64;
    for _ in 0..60 {
        let h = 1.0 / [50.0, 64.0, 100.0, 128.0][r.gen_range(0..4)];
        let n = r.gen_range(1..=30);
        let spec = random_kernel(&mut r, n as f64 * h);
        let coarse = quadrature_weights(&spec, h).map_err(|e| e.to_string())?;
        let fine = quadrature_weights(&spec, h / 2.0).map_err(|e| e.to_string())?;
        let sum: f64 = coarse.gamma().iter().sum();
        worst_sum = worst_sum.max((sum - spec.w0).abs() / spec.w0);
        for (k, g) in coarse.gamma().iter().enumerate() {
            let split = fine.gamma()[2 * k] + fine.gamma()[2 * k + 1];
            worst_split = worst_split.max((split - g).abs());
        }
    }
    let detail = format!("|sum - w0| / w0 {worst_sum:.1e}, refinement defect {worst_split:.1e}");
    if worst_sum <= 1e-14 && worst_split <= 1e-14 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn lipschitz_scenarios(count: usize) -> Check {
    let mut r = rng(99);
    let mut worst = 0.0f64;
    for i in 0..count {
        let p = random_problem(&mut r, SchemeKind::Godunov);
        let model = p.model.with_variant(ModelVariant::MeanVelocity);
        let delta = r.gen_range(0.01..0.1);
        let a = random_initial(&mut r);
        let lifted = match &a {
            InitialData::PiecewiseConstant { breakpoints } => InitialData::PiecewiseConstant {
                breakpoints: breakpoints.iter().map(|&(x, v)| (x, (v * (1.0 - delta)))).collect(),
            },
            other => other.clone(),
        };
        let (lhs, rhs) = lipschitz_stability_check(&model, &p.kernel, &p.grid, &a, &lifted, p.t_final)
            .map_err(|e| format!("scenario {i}: {e}"))?;
        if lhs > 1.05 * rhs {
            return Err(format!("scenario {i}: {lhs:e} > 1.05 * {rhs:e}"));
        }
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(format!("{count} pairs, max lhs/rhs {worst:.3}"))
}

pub fn norms_oracle(model: &ModelSpec) -> ModelNorms {
    let mut n = ModelNorms {
        v_sup: 0.0,
        dv_sup: 0.0,
        g_sup: 0.0,
        dg_sup: 0.0,
    };
    for i in 0..=100_000 {
        let r = i as f64 / 100_000.0;
        n.v_sup = n.v_sup.max(model.eval_v(r).unwrap().abs());
        n.dv_sup = n.dv_sup.max(model.eval_dv(r).unwrap().abs());
        n.g_sup = n.g_sup.max(model.eval_g(r).unwrap().abs());
        n.dg_sup = n.dg_sup.max(model.eval_dg(r).unwrap().abs());
    }
    n
}

/// Dense evaluation of the Godunov-type interface flux: min of `V g` on
/// `[l, r]` when `l <= r`, max on `[r, l]` otherwise.
pub fn dense_godunov_flux(model: &ModelSpec, v: f64, l: f64, r: f64) -> f64 {
    let (a, b) = (l.min(r), l.max(r));
    let samples = (0..=2000).map(|i| {
        let u = if i == 2000 { b } else { a + (b - a) * i as f64 / 2000.0 };
        v * model.eval_g(u).unwrap()
    });
    if l <= r {
        samples.fold(f64::INFINITY, f64::min)
    } else {
        samples.fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `V_{j+1/2} = sum_k gamma_k v(rho_{j+k+1})` (mean velocity) or
/// `v(sum_k gamma_k rho_{j+k+1})` (mean density), wrapped periodically.
pub fn literal_interface_velocity(model: &ModelSpec, gamma: &[f64], rho: &[f64]) -> Vec<f64> {
    let m = rho.len();
    (0..m)
        .map(|j| match model.variant() {
            ModelVariant::MeanVelocity => gamma
                .iter()
                .enumerate()
                .map(|(k, g)| g * model.eval_v(rho[(j + k + 1) % m]).unwrap())
                .sum(),
            ModelVariant::MeanDensity => {
                let avg: f64 = gamma.iter().enumerate().map(|(k, g)| g * rho[(j + k + 1) % m]).sum();
                model.eval_v(avg).unwrap()
            }
        })
        .collect()
}

pub fn godunov_flux_oracle(cases: usize) -> Check {
    let mut r = rng(111);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let model = random_model(&mut r, false);
        let v = r.gen_range(0.0..1.5);
        let (a, b) = (r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0));
        let got = scheme::godunov_flux(a, v, &model);
        worst = worst.max((got - dense_godunov_flux(&model, v, a, b)).abs());
    }
    let detail = format!("{cases} cases, max deviation {worst:.1e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn convolution_oracle(cases: usize) -> Check {
    let mut r = rng(222);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let m = r.gen_range(4..=300);
        let grid = Grid1D::new(1.0, m).unwrap();
        let n = r.gen_range(1..=m + 5);
        let spec = random_kernel(&mut r, n as f64 * grid.h());
        let kernel = quadrature_weights(&spec, grid.h()).unwrap();
        let mut model = random_model(&mut r, false);
        if spec.w0 > 1.0 {
            // keep the mean-density argument inside [0, rho_max]
            model = model.with_variant(ModelVariant::MeanVelocity);
        }
        let rho: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..=1.0)).collect();
        let state = GridState::new(grid, rho.clone()).unwrap();
        let want = literal_interface_velocity(&model, kernel.gamma(), &rho);
        for backend in [ConvolutionBackend::Direct, ConvolutionBackend::Fast] {
            let got = scheme::convolve_velocity(&state, &model, &kernel, backend).map_err(|e| e.to_string())?;
            let d = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
    }
    let detail = format!("{cases} random inputs, both backends, max deviation {worst:.1e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn l1_distance(a: &GridState, b: &GridState) -> f64 {
    l1_error(a, b).unwrap()
}
