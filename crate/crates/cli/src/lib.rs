//! `mwl`: weight generation, sweeps, operator norms and verification suites.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod suites;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mwl_core::complex_interp::{
    extremal_section, omega_complex, theta_norm, InterpParams, StripPoint,
};
use mwl_core::fields::{
    ap_characteristic, write_mwf, Convention, DyadicCubeFamily, GridDomain, MatrixWeightField,
};
use mwl_core::operators::{
    hilbert_operator, iterated_commutator, martingale_operator, operator_norm_weighted_with,
    MartingaleSigns, NormMethod, NormOptions, OperatorRegistry,
};
use mwl_core::real_interp::{sweep_table, CoupleSpec, LogGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::{derive_seed, RunConfig};
use report::{fmt_f64, Report};

#[derive(Parser, Debug)]
#[command(
    name = "mwl",
    version,
    about = "Interpolation of matrix-weighted L^p spaces, numerically"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON run configuration; defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write every configured weight as `<name>.mwf.json`.
    Gen {
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite; exits nonzero iff a check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: Option<String>,
    },
    /// Tabulate a quantity over its natural grid.
    Sweep {
        quantity: SweepQuantity,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        couple: CoupleArgs,
    },
    /// Weighted operator norm of a registered operator.
    Norm {
        /// One of `hilbert`, `martingale`, `log_commutator`.
        #[arg(long, default_value = "hilbert")]
        operator: String,
        /// Configured weight used on both sides.
        #[arg(long, default_value = "sqrt_sine")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact2)]
        method: MethodArg,
        #[arg(long)]
        tilde: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepQuantity {
    KFunctional,
    EFunctional,
    Ap,
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact2,
    Sampled,
}

#[derive(Args, Debug, Clone)]
pub struct CoupleArgs {
    /// Configured weight names for the two endpoints.
    #[arg(long, default_value = "commuting_0")]
    pub w0: String,
    #[arg(long, default_value = "commuting_1")]
    pub w1: String,
    #[arg(long, default_value_t = 2.0)]
    pub p0: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p1: f64,
    /// E-functional index; `p1 / (p1 - p0)` when omitted and `p0 != p1`, else 1.
    #[arg(long)]
    pub alpha: Option<f64>,
}

/// Caps the global rayon pool at `MWL_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MWL_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("MWL_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()?;
    }
    Ok(())
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Builds every configured weight, keyed by file stem.
fn weights(cfg: &RunConfig) -> Result<Vec<(String, MatrixWeightField)>> {
    let d = cfg.domain()?;
    let mut out = Vec::new();
    for (name, recipe) in &cfg.weights {
        out.extend(recipe.build(name, derive_seed(cfg.seed, name), d)?);
    }
    Ok(out)
}

fn weight(cfg: &RunConfig, name: &str) -> Result<MatrixWeightField> {
    weights(cfg)?
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, w)| w)
        .with_context(|| format!("no configured weight named {name:?}"))
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    init_threads()?;
    match cli.command {
        Command::Gen { common } => {
            let cfg = load_config(&common)?;
            std::fs::create_dir_all(&cfg.out)?;
            for (name, w) in weights(&cfg)? {
                let path = cfg.out.join(format!("{name}.mwf.json"));
                write_mwf(&path, &w)?;
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::Verify { common, suite } => {
            let mut cfg = load_config(&common)?;
            if let Some(s) = suite {
                cfg.suite = s;
            }
            verify(&cfg)
        }
        Command::Sweep {
            quantity,
            common,
            couple,
        } => {
            let cfg = load_config(&common)?;
            let table = sweep(&cfg, quantity, &couple)?;
            let stem = format!(
                "sweep_{}",
                quantity.to_possible_value().expect("named").get_name()
            );
            emit(&cfg.out, &stem, common.format, &table)?;
            Ok(0)
        }
        Command::Norm {
            operator,
            weight: wname,
            p,
            method,
            tilde,
            common,
        } => {
            let cfg = load_config(&common)?;
            let table = norm(&cfg, &operator, &wname, p, method, tilde)?;
            emit(&cfg.out, &format!("norm_{operator}"), common.format, &table)?;
            Ok(0)
        }
    }
}

fn verify(cfg: &RunConfig) -> Result<i32> {
    let checks = suites::run_suite(&cfg.suite, cfg)?;
    let report = Report::new(&cfg.suite, cfg.seed, cfg.hash(), checks);
    std::fs::create_dir_all(&cfg.out)?;
    report.write_json(&cfg.out.join(format!("{}.report.json", cfg.suite)))?;
    report.write_csv(std::fs::File::create(
        cfg.out.join(format!("{}.csv", cfg.suite)),
    )?)?;
    for c in &report.body.checks {
        let crit = c
            .criterion
            .map(|k| format!("C{k}"))
            .unwrap_or_else(|| "--".into());
        let status = if c.passed { "PASS" } else { "FAIL" };
        let detail: Vec<String> = c
            .quantities
            .iter()
            .filter(|q| q.limit.is_some())
            .map(|q| format!("{}={:.3e}", q.name, q.value))
            .collect();
        println!(
            "{status} {crit:>3} {}/{} {}",
            c.suite,
            c.name,
            detail.join(" ")
        );
        if let Some(n) = &c.note {
            println!("          note: {n}");
        }
    }
    let failed = report.body.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", report.body.checks.len());
    Ok(if failed == 0 { 0 } else { 1 })
}

/// Header plus rows of numbers.
#[derive(Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn emit(out: &Path, stem: &str, format: Format, table: &Table) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let path = match format {
        Format::Csv => {
            let path = out.join(format!("{stem}.csv"));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
            }
            w.flush()?;
            path
        }
        Format::Json => {
            let path = out.join(format!("{stem}.json"));
            std::fs::write(&path, serde_json::to_string_pretty(table)? + "\n")?;
            path
        }
    };
    println!("{}", path.display());
    Ok(())
}

fn sweep(cfg: &RunConfig, quantity: SweepQuantity, args: &CoupleArgs) -> Result<Table> {
    let d = cfg.domain()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "sweep-input"));
    match quantity {
        SweepQuantity::KFunctional | SweepQuantity::EFunctional => {
            let (w0, w1) = (weight(cfg, &args.w0)?, weight(cfg, &args.w1)?);
            let couple = CoupleSpec::matrix(args.p0, args.p1, &w0, &w1, Convention::Plain)?;
            let alpha = args.alpha.unwrap_or(if args.p0 == args.p1 {
                1.0
            } else {
                args.p1 / (args.p1 - args.p0)
            });
            let f = suites::smooth_function(&mut rng, d, w0.dim());
            let mut t = Table::new(&["t", "k", "e"]);
            for row in sweep_table(&f, &couple, &LogGrid::default(), alpha)? {
                t.rows.push(vec![row.t, row.k, row.e]);
            }
            Ok(t)
        }
        SweepQuantity::Ap => {
            let mut t = Table::new(&["points", "p", "ap"]);
            let recipe = cfg
                .weights
                .get(&args.w0)
                .or_else(|| cfg.weights.get("sqrt_sine"));
            let recipe = recipe.context("ap sweep needs a configured weight (--w0)")?;
            for k in 8..=12 {
                let dk = GridDomain::new(1 << k, cfg.length)?;
                let (_, w) = recipe
                    .build(&args.w0, derive_seed(cfg.seed, &args.w0), dk)?
                    .remove(0);
                for &p in &cfg.p_values {
                    if p > 1.0 {
                        t.rows.push(vec![
                            (1 << k) as f64,
                            p,
                            ap_characteristic(&w, p, &DyadicCubeFamily::full(&dk))?,
                        ]);
                    }
                }
            }
            Ok(t)
        }
        SweepQuantity::Omega => {
            let (w0, w1) = (weight(cfg, &args.w0)?, weight(cfg, &args.w1)?);
            let f = suites::smooth_function(&mut rng, d, w0.dim());
            let h = 1e-5;
            let mut t = Table::new(&[
                "theta",
                "omega_norm",
                "finite_difference_norm",
                "relative_error",
            ]);
            for &theta in &cfg.thetas {
                let params = InterpParams::new(args.p0, args.p1, theta)?;
                let conv = Convention::Plain;
                let norm = theta_norm(&f, &w0, &w1, params, conv)?;
                let at = |z: f64| {
                    extremal_section(&f, &w0, &w1, params, conv, StripPoint::real(z)?, norm)
                };
                let fd = at(theta + h)?.sub(&at(theta - h)?).scale_real(0.5 / h);
                let om = omega_complex(&f, &w0, &w1, params, conv, 1)?;
                t.rows.push(vec![
                    theta,
                    om.l2_norm(),
                    fd.l2_norm(),
                    suites::rel(&fd, &om),
                ]);
            }
            Ok(t)
        }
    }
}

fn norm(
    cfg: &RunConfig,
    operator: &str,
    wname: &str,
    p: f64,
    method: MethodArg,
    tilde: bool,
) -> Result<Table> {
    let d = cfg.domain()?;
    let w = weight(cfg, wname)?;
    let probe_seed = derive_seed(cfg.seed, "norm-probes");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "norm-operators"));
    let mut reg = OperatorRegistry::new();
    let h = hilbert_operator(d.len())?;
    reg.register(h.clone().with_label("hilbert"), d, w.dim(), probe_seed)?;
    reg.register(
        martingale_operator("martingale", MartingaleSigns::random(&mut rng, d.len())?),
        d,
        w.dim(),
        probe_seed,
    )?;
    reg.register(
        iterated_commutator(&w.log(), &h, 1)?.with_label("log_commutator"),
        d,
        w.dim(),
        probe_seed,
    )?;
    let Some(t) = reg.get(operator) else {
        bail!(
            "unknown operator {operator:?}; registered: {}",
            reg.labels().collect::<Vec<_>>().join(", ")
        );
    };
    let method = match method {
        MethodArg::Exact2 => NormMethod::Exact2,
        MethodArg::Sampled => NormMethod::Sampled,
    };
    let conv = if tilde {
        Convention::Tilde
    } else {
        Convention::Plain
    };
    let opts = NormOptions {
        seed: probe_seed,
        ..NormOptions::default()
    };
    let e = operator_norm_weighted_with(t, &w, &w, p, conv, method, &opts)?;
    let mut table = Table::new(&["p", "estimate", "exact", "iterations", "seed"]);
    let exact = if e.certificate == mwl_core::operators::Certificate::Exact {
        1.0
    } else {
        0.0
    };
    table.rows.push(vec![
        p,
        e.estimate,
        exact,
        e.iterations as f64,
        cfg.seed as f64,
    ]);
    Ok(table)
}
