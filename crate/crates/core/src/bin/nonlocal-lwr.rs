use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nonlocal_lwr::config::{Problem, RunConfig};
use nonlocal_lwr::experiment::{compare_models, convergence_study, local_limit, run_problem};
use nonlocal_lwr::plot::{line_chart, Series};
use nonlocal_lwr::scheme::{cfl_lambda_godunov, cfl_lambda_local, cfl_lambda_lxf, default_lxf_alpha, ConvolutionBackend};
use nonlocal_lwr::{Error, GridState, RunOptions};

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CFL: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "nonlocal-lwr", version, about = "Non-local LWR traffic solvers and experiments")]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run; writes the final profile and optional diagnostics.
    Run(Common),
    /// Error table against a fine reference (needs a [convergence] section).
    Convergence(Common),
    /// Mean-velocity vs mean-density model with the same discretization.
    CompareModels(Common),
    /// Distances to the local LWR solution as eta shrinks (needs [local_limit]).
    LocalLimit(Common),
    /// Check the config and the model hypotheses without running.
    Validate(Common),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Direct,
    Fast,
}

impl From<BackendArg> for ConvolutionBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Direct => ConvolutionBackend::Direct,
            BackendArg::Fast => ConvolutionBackend::Fast,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Evaluate the discrete entropy inequality on every step.
    #[arg(long)]
    entropy_check: bool,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long)]
    cfl_safety: Option<f64>,
    /// Also write SVG charts next to the CSV files.
    #[arg(long)]
    plot: bool,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::from_path(&self.config)?;
        if let Some(b) = self.backend {
            cfg.scheme.backend = b.into();
        }
        if let Some(s) = self.cfl_safety {
            cfg.scheme.cfl_safety = s;
        }
        if self.entropy_check {
            cfg.outputs.entropy_check = true;
        }
        Ok(cfg)
    }

    fn out(&self, name: impl AsRef<Path>) -> Result<PathBuf, Error> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_profile(path: &Path, state: &GridState) -> Result<(), Error> {
    state.write_profile_csv(create(path)?)
}

fn write_plot(path: &Path, title: &str, series: &[Series]) -> Result<(), Error> {
    std::fs::write(path, line_chart(title, "x", "rho", series))?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CflViolation { .. } | Error::DegenerateModel => EXIT_CFL,
        Error::Io(_) => EXIT_OTHER,
        Error::OutOfRange { .. } => EXIT_OTHER,
        _ => EXIT_CONFIG,
    }
}

fn cmd_run(args: &Common) -> Result<u8, Error> {
    let cfg = args.load()?;
    let p = cfg.build()?;
    warn_hypotheses(&p);
    let opts = RunOptions {
        record_steps: true,
        entropy_check: cfg.outputs.entropy_check,
        check_invariants: true,
        record_trace: false,
    };
    let (state, report) = run_problem(&p, &opts)?;

    let profile = cfg.outputs.profile.clone().unwrap_or_else(|| "profile.csv".into());
    write_profile(&args.out(&profile)?, &state)?;
    if let Some(d) = &cfg.outputs.diagnostics {
        report.write_diagnostics_csv(create(&args.out(d)?)?)?;
    }
    if args.plot || cfg.outputs.plot.is_some() {
        let path = cfg.outputs.plot.clone().unwrap_or_else(|| "profile.svg".into());
        let title = format!("{} at T = {}", report.scheme, report.t_final);
        write_plot(&args.out(path)?, &title, &[Series::from_state(report.scheme.name(), &state)])?;
    }

    let t = report.timings;
    println!("scheme        {}", report.scheme);
    println!("cells         {}", p.grid.n_cells());
    println!("steps         {}", report.n_steps);
    println!("tau           {:e} (lambda {} of bound {})", report.tau, report.lambda, report.lambda_bound);
    println!("mass drift    {:e}", report.history.relative_mass_drift());
    println!(
        "timings       convolution {:?}, flux {:?}, update {:?}",
        t.convolution, t.flux, t.update
    );
    if let Some(e) = &report.entropy {
        println!("max entropy residual {:e}", e.max_residual);
    }
    if report.invariants.failed() {
        for line in report.invariants.describe() {
            eprintln!("invariant check failed: {line}");
        }
        return Ok(EXIT_INVARIANT);
    }
    Ok(0)
}

fn cmd_convergence(args: &Common) -> Result<u8, Error> {
    let cfg = args.load()?;
    let c = cfg.convergence_config()?;
    let table = convergence_study(&c)?;
    table.write_csv(create(&args.out("convergence.csv")?)?)?;
    println!(
        "reference: {} at h = {:e}, tau = {:e}",
        table.reference_scheme, table.reference_h, table.reference_tau
    );
    println!("{:>3} {:>12} {:>14} {:>12} {:>8} {:>12}", "n", "h", "scheme", "l1_error", "eoc", "tau");
    for r in &table.rows {
        let eoc = r.eoc.map(|e| format!("{e:.3}")).unwrap_or_default();
        println!(
            "{:>3} {:>12.4e} {:>14} {:>12.4e} {:>8} {:>12.4e}",
            r.n, r.h, r.scheme, r.l1_error, eoc, r.tau
        );
    }
    Ok(0)
}

fn cmd_compare(args: &Common) -> Result<u8, Error> {
    let cfg = args.load()?;
    let p = cfg.build()?;
    let c = compare_models(&p)?;
    if c.affine_velocity {
        eprintln!("warning: affine velocity, the two model variants coincide");
    }
    write_profile(&args.out("profile_mean_velocity.csv")?, &c.mean_velocity)?;
    write_profile(&args.out("profile_mean_density.csv")?, &c.mean_density)?;
    {
        use std::io::Write;
        let mut w = create(&args.out("model_comparison.csv")?)?;
        writeln!(w, "l1_distance,extrema_mean_velocity,extrema_mean_density")?;
        writeln!(w, "{},{},{}", c.l1_distance, c.extrema_mean_velocity, c.extrema_mean_density)?;
    }
    if args.plot {
        write_plot(
            &args.out("model_comparison.svg")?,
            &format!("models at T = {}", p.t_final),
            &[
                Series::from_state("mean velocity", &c.mean_velocity),
                Series::from_state("mean density", &c.mean_density),
            ],
        )?;
    }
    println!("l1 distance            {:e}", c.l1_distance);
    println!("local extrema (mean velocity) {}", c.extrema_mean_velocity);
    println!("local extrema (mean density)  {}", c.extrema_mean_density);
    Ok(0)
}

fn cmd_local_limit(args: &Common) -> Result<u8, Error> {
    let cfg = args.load()?;
    let (p, etas) = cfg.local_limit_config()?;
    let r = local_limit(&p, &etas)?;
    r.write_csv(create(&args.out("local_limit.csv")?)?)?;
    write_profile(&args.out("profile_local.csv")?, &r.local)?;
    for (eta, s) in etas.iter().zip(&r.nonlocal) {
        write_profile(&args.out(format!("profile_eta_{eta:e}.csv"))?, s)?;
    }
    if args.plot {
        let mut series = vec![Series::from_state("local LWR", &r.local)];
        series.extend(etas.iter().zip(&r.nonlocal).map(|(e, s)| Series::from_state(format!("eta = {e:e}"), s)));
        write_plot(&args.out("local_limit.svg")?, &format!("local limit at T = {}", p.t_final), &series)?;
    }
    println!("{:>10} {:>12}", "eta", "l1_distance");
    for row in &r.rows {
        println!("{:>10.1e} {:>12.4e}", row.eta, row.l1_distance);
    }
    Ok(0)
}

fn warn_hypotheses(p: &Problem) -> bool {
    let v = p.model.validate_hypotheses().violations();
    for line in &v {
        eprintln!("warning: {line}");
    }
    v.is_empty()
}

fn cmd_validate(args: &Common) -> Result<u8, Error> {
    let cfg = args.load()?;
    let p = cfg.build()?;
    if cfg.convergence.is_some() {
        cfg.convergence_config()?;
    }
    if cfg.local_limit.is_some() {
        cfg.local_limit_config()?;
    }
    println!("grid          {} cells, h = {}", p.grid.n_cells(), p.grid.h());
    println!("kernel        {} cells, sum gamma = {}", p.kernel.n_cells(), p.kernel.gamma().iter().sum::<f64>());
    println!("lambda bound  godunov {}", cfl_lambda_godunov(&p.model, &p.kernel));
    println!("              lxf     {}", cfl_lambda_lxf(p.scheme.alpha.unwrap_or_else(|| default_lxf_alpha(&p.model))));
    println!("              local   {}", cfl_lambda_local(&p.model));
    if warn_hypotheses(&p) {
        println!("hypotheses    ok");
        Ok(0)
    } else {
        Ok(EXIT_CONFIG)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::CompareModels(a) => cmd_compare(a),
        Command::LocalLimit(a) => cmd_local_limit(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
