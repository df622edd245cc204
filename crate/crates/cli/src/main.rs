use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use poisson_interp::experiment::{parse_config, run_sweep, run_window_study, ExperimentConfig};
use poisson_interp::interp::{assemble, solve_with_tol, DEFAULT_SLACK, SOLVE_TOL};
use poisson_interp::kernels::{GeneralizedKernel, Kernel, PoissonKernel, DEFAULT_RADIAL_TOL};
use poisson_interp::nodes::{
    exponential_gram, generate_lattice, generate_perturbed, riesz_estimate, PerturbationRule,
};
use poisson_interp::spaces::{jinc_function, radial_poly_function, samples_on, BandlimitedFunction};
use poisson_interp::spectral::{
    calibrate_spectral_scale, check_interpolation_identity, error_l2, operator_norm_check,
    tail_bound_check,
};
use poisson_interp::NodeSet;

#[derive(Parser)]
#[command(name = "poisson-interp", version, about = "Poisson-kernel interpolation of band-limited functions")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; tables go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative residual demanded of Gram solves.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a node set and write it in the text node format.
    Nodes(NodesArgs),
    /// Tabulate a kernel as `r,value,abs_err_estimate`.
    Kernel(KernelArgs),
    /// Tabulate a test function in space and on the Fourier side.
    Function(FunctionArgs),
    /// Interpolate a test function on a node file.
    Solve(SolveArgs),
    /// Run a named numeric check and print its JSON report.
    Check(CheckArgs),
    /// Run an α-sweep from the configuration.
    Sweep(PresetArgs),
    /// Measure errors for growing windows at fixed α.
    WindowStudy(WindowArgs),
}

#[derive(Args)]
struct NodesArgs {
    #[arg(long, default_value_t = std::f64::consts::PI)]
    delta: f64,
    #[arg(long, default_value_t = 2)]
    window: u32,
    /// Perturbation radius L; zero gives the exact lattice.
    #[arg(long, default_value_t = 0.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accept L up to 1/20 instead of the Kadec-type bound.
    #[arg(long)]
    allow_relaxed: bool,
    /// Print the finite-section Riesz estimate to stderr.
    #[arg(long)]
    riesz: bool,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Exponent of the generalized kernel; omit for the Poisson kernel.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 51)]
    points: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Indicator,
    RadialPolynomial,
    Zero,
}

#[derive(Args, Clone)]
struct FunctionSpec {
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Indicator)]
    profile: ProfileArg,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    #[arg(long, default_value_t = 0.0)]
    c1: f64,
}

impl FunctionSpec {
    fn build(&self) -> Result<BandlimitedFunction> {
        Ok(match self.profile {
            ProfileArg::Indicator => jinc_function(self.beta)?,
            ProfileArg::RadialPolynomial => radial_poly_function(self.beta, self.c0, self.c1)?,
            ProfileArg::Zero => BandlimitedFunction::zero(self.beta)?,
        })
    }
}

#[derive(Args)]
struct FunctionArgs {
    #[command(flatten)]
    spec: FunctionSpec,
    #[arg(long, default_value_t = 20.0)]
    r_max: f64,
    #[arg(long, default_value_t = 81)]
    points: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// Node file (`j1 j2 x y` lines).
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    omega: Option<f64>,
    #[command(flatten)]
    spec: FunctionSpec,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckName {
    /// Quadrature of the Poisson symbol against the closed-form kernel.
    FourierPair,
    /// Finite-section Riesz constants of the node set.
    Riesz,
    /// Two-sided quadratic-form bounds for a pseudorandom coefficient vector.
    QuadraticForm,
    /// Band-side versus plane-side integrals at a node.
    Identity,
    /// Energy of the interpolant outside the band square.
    TailBound,
    /// L² norm of the interpolant.
    OperatorNorm,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    name: CheckName,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Node index `j1,j2` for the identity check.
    #[arg(long, default_value = "0,0", value_parser = parse_index)]
    node: [i64; 2],
    #[arg(long, default_value_t = DEFAULT_SLACK)]
    slack: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Acceptance,
    Perturbed,
}

#[derive(Args)]
struct PresetArgs {
    /// Built-in configuration used when `--config` is absent.
    #[arg(long, value_enum, default_value_t = Preset::Acceptance)]
    preset: Preset,
}

#[derive(Args)]
struct WindowArgs {
    #[command(flatten)]
    preset: PresetArgs,
    /// Comma-separated ascending windows; defaults to the configuration's.
    #[arg(long, value_delimiter = ',')]
    windows: Vec<u32>,
    #[arg(long)]
    alpha: Option<f64>,
}

fn parse_index(s: &str) -> Result<[i64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `j1,j2`, got `{s}`"));
    }
    let p = |t: &str| t.parse::<i64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([p(parts[0])?, p(parts[1])?])
}

fn kernel_from(alpha: f64, omega: Option<f64>) -> Result<Kernel> {
    Ok(match omega {
        None => PoissonKernel::new(alpha)?.into(),
        Some(w) => GeneralizedKernel::new(alpha, w)?.into(),
    })
}

fn linspace(max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![0.0];
    }
    (0..points).map(|i| max * i as f64 / (points - 1) as f64).collect()
}

/// Writes `text` to `out/name`, or to stdout without an output directory.
fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_config(cli: &Cli, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => match preset.unwrap_or(Preset::Acceptance) {
            Preset::Acceptance => ExperimentConfig::acceptance_preset(),
            Preset::Perturbed => ExperimentConfig::perturbed_preset(),
        },
    };
    if let Some(tol) = cli.tol {
        config.tolerances.solve = tol;
        let problems = config.violations();
        if !problems.is_empty() {
            bail!("invalid --tol: {}", problems.join("; "));
        }
    }
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn run_nodes(cli: &Cli, a: &NodesArgs) -> Result<()> {
    let nodes = if a.radius == 0.0 && !a.allow_relaxed {
        generate_lattice(a.delta, a.window)?
    } else {
        let rule = if a.allow_relaxed {
            PerturbationRule::RelaxedTwentieth
        } else {
            PerturbationRule::Kadec
        };
        generate_perturbed(a.delta, a.window, a.radius, a.seed, rule)?
    };
    if a.riesz {
        let r = riesz_estimate(&exponential_gram(&nodes))?;
        eprintln!("{}", serde_json::to_string(&r)?);
    }
    emit(cli.out.as_deref(), "nodes.txt", &nodes.to_text())
}

fn run_kernel(cli: &Cli, a: &KernelArgs) -> Result<()> {
    let kernel = kernel_from(a.alpha, a.omega)?;
    let mut csv = String::from("r,value,abs_err_estimate\n");
    for r in linspace(a.r_max, a.points) {
        let (value, err) = match kernel {
            Kernel::Poisson(k) => (k.eval_sq(r * r), 0.0),
            Kernel::Generalized(k) => {
                let v = k.eval_radius(r, DEFAULT_RADIAL_TOL)?;
                (v.value, v.abs_err)
            }
        };
        csv.push_str(&format!("{r:e},{value:e},{err:e}\n"));
    }
    emit(cli.out.as_deref(), "kernel.csv", &csv)
}

fn run_function(cli: &Cli, a: &FunctionArgs) -> Result<()> {
    let f = a.spec.build()?;
    let mut csv = String::from("r,spatial,spatial_abs_err,spectral\n");
    for r in linspace(a.r_max, a.points) {
        let v = f.radial_value(r);
        csv.push_str(&format!("{r:e},{:e},{:e},{:e}\n", v.value, v.abs_err, f.spectrum_radial(r)));
    }
    emit(cli.out.as_deref(), "function.csv", &csv)
}

fn read_nodes(path: &Path) -> Result<NodeSet> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    NodeSet::from_text(BufReader::new(file)).with_context(|| format!("in {}", path.display()))
}

fn run_solve(cli: &Cli, a: &SolveArgs) -> Result<()> {
    let nodes = read_nodes(&a.nodes)?;
    let f = a.spec.build()?;
    let kernel = kernel_from(a.alpha, a.omega)?;
    let tol = cli.tol.unwrap_or(SOLVE_TOL);
    let t0 = Instant::now();
    let system = assemble(&nodes, kernel)?;
    let t_assemble = t0.elapsed().as_secs_f64();
    let samples = samples_on(&f, &nodes);
    let t1 = Instant::now();
    let interp = solve_with_tol(&system, &samples, tol)?;
    let t_solve = t1.elapsed().as_secs_f64();
    let report = interp.report().expect("solved interpolants carry a report");

    let mut coeffs = String::from("# j1 j2 a\n");
    for (j, a) in nodes.indices().iter().zip(interp.coefficients()) {
        coeffs.push_str(&format!("{} {} {a:e}\n", j[0], j[1]));
    }
    let summary = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "nodes": nodes.len(),
        "kernel": kernel.label(),
        "function": f.label(),
        "tolerance": tol,
        "relative_residual": report.relative_residual,
        "method": report.method,
        "condition_estimate": report.condition_estimate,
        "iterations": report.iterations,
        "timings_seconds": {"assemble": t_assemble, "solve": t_solve},
    });
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    match cli.out.as_deref() {
        Some(dir) => {
            emit(Some(dir), "coefficients.txt", &coeffs)?;
            emit(Some(dir), "solve.json", &text)
        }
        None => {
            print!("{coeffs}");
            eprint!("{text}");
            Ok(())
        }
    }
}

/// Deterministic coefficient vector in `[-1, 1]` for the quadratic-form check.
fn probe_vector(n: usize) -> Vec<f64> {
    // golden-angle phases never repeat, so no two entries coincide
    (0..n).map(|i| (2.399963229728653 * (i as f64 + 1.0)).cos()).collect()
}

fn run_check(cli: &Cli, a: &CheckArgs) -> Result<()> {
    let report = match a.name {
        CheckName::FourierPair => {
            let x = [1.0, 0.0];
            let c = calibrate_spectral_scale(a.alpha, x)?;
            let expected = 4.0 * std::f64::consts::PI.powi(2);
            let rel = (c / expected - 1.0).abs();
            json!({
                "check": "fourier-pair",
                "inputs": {"alpha": a.alpha, "x": x},
                "measured": c,
                "bound": expected,
                "ratio": c / expected,
                "pass": rel <= 1e-6,
            })
        }
        other => {
            let config = load_config(cli, None)?;
            let nodes = config.node_set()?;
            let riesz = riesz_estimate(&exponential_gram(&nodes))?;
            match other {
                CheckName::Riesz => json!({
                    "check": "riesz",
                    "inputs": {"delta": nodes.delta(), "nodes": nodes.len(), "kind": nodes.kind()},
                    "measured": riesz.b_hat,
                    "bound": serde_json::Value::Null,
                    "ratio": serde_json::Value::Null,
                    "pass": true,
                    "lambda_min": riesz.lambda_min,
                    "lambda_max": riesz.lambda_max,
                }),
                CheckName::QuadraticForm => {
                    let coeffs = probe_vector(nodes.len());
                    let r = poisson_interp::interp::quadratic_form_bounds(&nodes, a.alpha, &coeffs, &riesz, a.slack)?;
                    json!({
                        "check": "quadratic-form",
                        "inputs": {"alpha": a.alpha, "nodes": nodes.len(), "slack": a.slack, "b_hat": riesz.b_hat},
                        "measured": r.q,
                        "bound": [r.lower_bound, r.upper_bound],
                        "ratio": [r.lower_ratio, r.upper_ratio],
                        "pass": r.pass(),
                        "details": r,
                    })
                }
                _ => {
                    let f = config.function()?;
                    let kernel = config.kernel(a.alpha)?;
                    let system = assemble(&nodes, kernel)?;
                    let interp = solve_with_tol(&system, &samples_on(&f, &nodes), config.tolerances.solve)?;
                    match other {
                        CheckName::Identity => {
                            let r = check_interpolation_identity(&f, &interp, a.node, 1e-6)?;
                            json!({
                                "check": "interpolation-identity",
                                "inputs": {"alpha": a.alpha, "node": a.node, "function": f.label()},
                                "measured": r.plane_side,
                                "bound": r.band_side,
                                "ratio": r.relative_difference,
                                "pass": r.pass,
                                "details": r,
                            })
                        }
                        CheckName::TailBound => {
                            let e = error_l2(&f, &interp, config.sweep.truncation_m)?;
                            tail_bound_check(&e, &f, &interp, &riesz, a.slack).to_json()
                        }
                        CheckName::OperatorNorm => {
                            let e = error_l2(&f, &interp, config.sweep.truncation_m)?;
                            operator_norm_check(&e, &f, &interp, &riesz, a.slack).to_json()
                        }
                        _ => unreachable!("handled above"),
                    }
                }
            }
        }
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    emit(cli.out.as_deref(), "check.json", &text)
}

fn run_sweep_cmd(cli: &Cli, a: &PresetArgs) -> Result<()> {
    let config = load_config(cli, Some(a.preset))?;
    let result = run_sweep(&config)?;
    let csv = result.to_csv();
    match cli.out.as_deref() {
        Some(dir) => {
            let prefix = &config.output.prefix;
            emit(Some(dir), &format!("{prefix}.csv"), &csv)?;
            let json = serde_json::to_string_pretty(&result.summary_json(&config))? + "\n";
            emit(Some(dir), &format!("{prefix}.json"), &json)
        }
        None => {
            print!("{csv}");
            match result.fitted_slope.value() {
                Some(s) => eprintln!("fitted_slope = {s:.6}, bound_slope = {:.6}", result.bound_slope),
                None => eprintln!("fitted_slope = not-available, bound_slope = {:.6}", result.bound_slope),
            }
            Ok(())
        }
    }
}

fn run_window_cmd(cli: &Cli, a: &WindowArgs) -> Result<()> {
    let config = load_config(cli, Some(a.preset.preset))?;
    let section = config.window_study.clone();
    let windows = if !a.windows.is_empty() {
        a.windows.clone()
    } else if let Some(s) = &section {
        s.windows.clone()
    } else {
        vec![2, 4, 6]
    };
    if windows.windows(2).any(|w| w[0] >= w[1]) {
        bail!("--windows must be strictly ascending");
    }
    let alpha = a
        .alpha
        .or(section.map(|s| s.alpha))
        .unwrap_or(config.sweep.alpha[0]);
    let study = run_window_study(&config, &windows, alpha)?;
    if study.violations() > 0 {
        eprintln!("warning: l2_total increased with the window {} time(s)", study.violations());
    }
    let csv = study.to_csv();
    match cli.out.as_deref() {
        Some(dir) => {
            emit(Some(dir), "window_study.csv", &csv)?;
            let json = serde_json::to_string_pretty(&json!({
                "version": env!("CARGO_PKG_VERSION"),
                "config": config,
                "result": study,
            }))? + "\n";
            emit(Some(dir), "window_study.json", &json)
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Nodes(a) => run_nodes(&cli, a),
        Command::Kernel(a) => run_kernel(&cli, a),
        Command::Function(a) => run_function(&cli, a),
        Command::Solve(a) => run_solve(&cli, a),
        Command::Check(a) => run_check(&cli, a),
        Command::Sweep(a) => run_sweep_cmd(&cli, a),
        Command::WindowStudy(a) => run_window_cmd(&cli, a),
    }
}
