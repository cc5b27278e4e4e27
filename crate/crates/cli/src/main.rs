use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use liekit::lie_core::{check_jacobi, parse_algebra, LieAlgebra};
use liekit::multiplier::{fit_decay, kernel_from_symbol, DyadicPartition, GridAxis, SymbolFunction};
use liekit::orbit_examples::{
    check_coadjoint, check_duflo_pairs, check_homomorphisms, check_multipliers, closure_member,
    orbit_representative_normalize, sample_point, to_f64, triple_check, witness_sequence, CheckConfig, ExampleModel,
    Sampler,
};
use liekit::report::{Record, Report, Status};
use liekit::{Error, Rational};

#[derive(Parser, Debug)]
#[command(name = "liekit", version, about = "Orbit, representation and multiplier checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Algebra or example-model file.
    #[arg(long, global = true, env = "LIEKIT_MODEL")]
    model: Option<PathBuf>,
    /// Points on a one-variable multiplier axis (power of two).
    #[arg(long, global = true, env = "LIEKIT_GRID", default_value_t = 16384)]
    grid: usize,
    #[arg(long, global = true, env = "LIEKIT_EXTENT", default_value_t = 256.0)]
    extent: f64,
    /// Number of dyadic scales `L`; shells run over `|j| ≤ L`.
    #[arg(long, global = true, env = "LIEKIT_SCALES", default_value_t = 10)]
    scales: i32,
    #[arg(long, global = true, env = "LIEKIT_SAMPLES", default_value_t = 100)]
    samples: usize,
    #[arg(long, global = true, env = "LIEKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "LIEKIT_TOL_MULTIPLIER", default_value_t = 1e-6)]
    tol_multiplier: f64,
    /// Report path; the report goes to stdout when absent.
    #[arg(long, global = true, env = "LIEKIT_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "LIEKIT_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobi identity of the structure constants.
    Jacobi,
    /// Closed-form orbit against the matrix-exponential action.
    Coadjoint,
    /// Homomorphism and Duflo-pair checks of the declared tables.
    DufloPair,
    /// Kernel profile of a one-variable symbol, with a power-law fit.
    Kernel(KernelArgs),
    /// Multiplier identity and backend agreement for the model's symbols.
    Multiplier,
    /// The full separating-triple check.
    Triple,
    /// Witness sequence for one target functional.
    Witness(WitnessArgs),
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Symbol declared in the model; `(1+ξ²)^{-q} ξ^β |ξ|^r log^s|ξ|` otherwise.
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, default_value_t = 0)]
    beta: u32,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long, default_value_t = 1.0)]
    lo: f64,
    #[arg(long, default_value_t = 64.0)]
    hi: f64,
    /// Expected slope; the fit fails when it is off by more than `--slope-tol`.
    #[arg(long, allow_hyphen_values = true)]
    expect_slope: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    slope_tol: f64,
    /// CSV profile `z,re,im,abs` for `z ≥ 0`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    /// Branch whose sample target is used.
    #[arg(long)]
    branch: Option<String>,
    /// Explicit target such as `e0 = 1, e1 = 2, e6 = 1`; other components are 0.
    #[arg(long)]
    point: Option<String>,
    #[arg(long, default_value_t = 50)]
    steps: u32,
    /// CSV with `n`, the orbit parameters and the error.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.opts.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match run(&cli) {
        Ok(report) => {
            eprint!("{}", report.summary());
            if let Err(e) = emit(&report, cli.opts.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for r in report.failures() {
                    eprintln!("FAIL {}: {}", r.name, r.anchor);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> liekit::Result<()> {
    match out {
        Some(p) => fs::write(p, report.to_json())?,
        None => std::io::stdout().write_all(report.to_json().as_bytes())?,
    }
    Ok(())
}

fn config(o: &Opts) -> liekit::Result<CheckConfig> {
    if !o.grid.is_power_of_two() || o.grid < 16 {
        return Err(Error::Model(format!("--grid {} is not a power of two ≥ 16", o.grid)));
    }
    if o.tol_multiplier.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || o.extent.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
    {
        return Err(Error::Model("tolerances and extents must be positive".into()));
    }
    Ok(CheckConfig {
        samples: o.samples,
        seed: o.seed,
        grid: o.grid,
        extent: o.extent,
        scales: o.scales,
        tol_multiplier: o.tol_multiplier,
        ..CheckConfig::default()
    })
}

fn model_path(o: &Opts) -> liekit::Result<&Path> {
    o.model.as_deref().ok_or_else(|| Error::Model("--model is required".into()))
}

fn load_model(o: &Opts) -> liekit::Result<ExampleModel> {
    ExampleModel::from_file(model_path(o)?)
}

/// A plain algebra file, or the algebra part of a model file.
fn load_algebra(o: &Opts) -> liekit::Result<(String, LieAlgebra)> {
    let path = model_path(o)?;
    let text = fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("algebra").to_string();
    let is_model = text.lines().any(|l| l.trim_start().starts_with("functional"));
    if is_model {
        let m = ExampleModel::parse(&name, &text)?;
        Ok((name, m.algebra))
    } else {
        Ok((name, parse_algebra(&text)?))
    }
}

fn run(cli: &Cli) -> liekit::Result<Report> {
    let o = &cli.opts;
    let cfg = config(o)?;
    match &cli.command {
        Command::Jacobi => {
            let (name, l) = load_algebra(o)?;
            let v = check_jacobi(&l);
            let mut report = Report::new(format!("jacobi/{name}"));
            let note = v
                .iter()
                .map(|x| {
                    let n = l.basis_names();
                    format!(
                        "({},{},{}) -> {}",
                        n[x.triple.0],
                        n[x.triple.1],
                        n[x.triple.2],
                        l.describe_vector(&x.defect)
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            report.push(
                Record::new(
                    "jacobi",
                    "structure constants satisfy the Jacobi identity",
                    Status::from_bool(v.is_empty()),
                )
                .measure("violations", v.len() as f64)
                .measure("dim", l.dim() as f64)
                .note(note),
            );
            Ok(report)
        }
        Command::Coadjoint => {
            let model = load_model(o)?;
            let mut report = Report::new(format!("coadjoint/{}", model.name));
            report.push(check_coadjoint(&model, &cfg)?);
            let f = to_f64(&model.f);
            let g = orbit_representative_normalize(&model, &f)?;
            let moved = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            report.push(
                Record::new(
                    "normalize_fixed_point",
                    "the normalized base functional is left unchanged by the normalizing moves",
                    Status::from_bool(moved <= 1e-12),
                )
                .measure("max_change", moved),
            );
            Ok(report)
        }
        Command::DufloPair => {
            let model = load_model(o)?;
            let mut report = Report::new(format!("duflo-pair/{}", model.name));
            report.records.extend(check_homomorphisms(&model, &cfg)?);
            report.records.extend(check_duflo_pairs(&model, &cfg)?);
            Ok(report)
        }
        Command::Kernel(k) => kernel(o, &cfg, k),
        Command::Multiplier => {
            let model = load_model(o)?;
            let mut report = Report::new(format!("multiplier/{}", model.name));
            report.records.extend(check_multipliers(&model, &cfg)?);
            Ok(report)
        }
        Command::Triple => triple_check(&load_model(o)?, &cfg),
        Command::Witness(w) => witness(o, &cfg, w),
    }
}

fn kernel(o: &Opts, cfg: &CheckConfig, k: &KernelArgs) -> liekit::Result<Report> {
    let psi = match &k.symbol {
        Some(name) => {
            let model = load_model(o)?;
            model.symbol(name)?.clone()
        }
        None => SymbolFunction::log_class("psi0", k.beta, k.q, k.r, k.s),
    };
    let axis = GridAxis::central(cfg.grid, cfg.extent)?;
    let kern = kernel_from_symbol(&psi, &DyadicPartition::new(cfg.scales), axis)?;
    if let Some(path) = &k.csv {
        let mut out = String::from("z,re,im,abs\n");
        for (z, v) in axis.coords().iter().zip(&kern.values) {
            if *z >= 0.0 {
                out.push_str(&format!("{z},{},{},{}\n", v.re, v.im, v.norm()));
            }
        }
        fs::write(path, out)?;
    }
    let fit = fit_decay(&kern, k.lo, k.hi, 64, 0.0)?;
    let status = match k.expect_slope {
        Some(want) => Status::from_bool((fit.slope - want).abs() <= k.slope_tol),
        None => Status::Pass,
    };
    let mut rec = Record::new(
        format!("kernel_slope/{}", psi.name),
        "the shell-synthesized kernel decays like a power of |z| on the fit window",
        status,
    )
    .measure("slope", fit.slope)
    .measure("intercept", fit.intercept)
    .measure("lo", k.lo)
    .measure("hi", k.hi);
    if let Some(want) = k.expect_slope {
        rec = rec.measure("expected_slope", want).tolerance("slope", k.slope_tol);
    }
    let mut report = Report::new(format!("kernel/{}", psi.name));
    report.push(rec);
    Ok(report)
}

fn witness(o: &Opts, cfg: &CheckConfig, w: &WitnessArgs) -> liekit::Result<Report> {
    let model = load_model(o)?;
    let h: Vec<Rational> = match (&w.point, &w.branch) {
        (Some(text), _) => parse_point(&model, text)?,
        (None, branch) => {
            let spec = match branch {
                Some(b) => model
                    .witnesses
                    .iter()
                    .find(|x| &x.name == b)
                    .ok_or_else(|| Error::Model(format!("no witness branch `{b}`")))?,
                None => model.witnesses.first().ok_or_else(|| Error::Model("model has no witness branches".into()))?,
            };
            sample_point(&model, &spec.point, &mut Sampler::new(cfg.seed))?
        }
    };
    let hf = to_f64(&h);
    let verdict = closure_member(&model, &hf)?;
    let mut report = Report::new(format!("witness/{}", model.name));
    if !verdict.member {
        report.push(
            Record::new("closure_member", "the target lies in the orbit closure", Status::Fail)
                .note(format!("{:?}", verdict.certificate)),
        );
        return Ok(report);
    }
    let run = witness_sequence(&model, &h, w.steps)?;
    if let Some(path) = &w.csv {
        let mut out = format!("n,{},error\n", model.orbit.params.join(","));
        for s in &run.steps {
            let p: Vec<String> = s.params.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{},{},{}\n", s.n, p.join(","), s.error));
        }
        fs::write(path, out)?;
    }
    let mut rec = Record::new(
        format!("witness/{}", run.branch),
        "the branch recipe produces orbit points converging to the target",
        Status::from_bool(run.final_error() <= liekit::orbit_examples::WITNESS_TOL),
    )
    .measure("final_error", run.final_error())
    .tolerance("final_error", liekit::orbit_examples::WITNESS_TOL);
    for (name, v) in model.m.basis_names().iter().zip(&hf) {
        rec = rec.measure(&format!("target_{name}"), *v);
    }
    report.push(rec);
    Ok(report)
}

fn parse_point(model: &ExampleModel, text: &str) -> liekit::Result<Vec<Rational>> {
    let mut h = vec![Rational::from_integer(0.into()); model.m.dim()];
    for item in text.split(',') {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Model(format!("bad point entry `{item}`")))?;
        let i = model.m.index_of(k.trim()).ok_or_else(|| Error::Model(format!("unknown component `{}`", k.trim())))?;
        h[i] = liekit::scalar::parse_rational(v)
            .ok_or_else(|| Error::Model(format!("`{}` is not a rational", v.trim())))?;
    }
    Ok(h)
}
