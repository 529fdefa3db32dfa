//! Command-line driver: compute functionals of one density, run the full
//! verification suite, sweep a family toward the equality class, or run the
//! brute-force oracles against the fast paths.
//!
//! Exit codes: 0 on success, 1 on usage/configuration/runtime errors, 2 when
//! the suite reports violated records (or an oracle disagrees).

mod config;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use config::FileConfig;
use lsikit::closed_forms;
use lsikit::cramer;
use lsikit::densities::make_family;
use lsikit::fourier;
use lsikit::functionals::{self, rescale_to_dm};
use lsikit::metrics;
use lsikit::transport::{self, CdfGrid};
use lsikit::verify::{self, run_suite, sequence_diagnostics, Status, SuiteConfig, SweepFamily};
use lsikit::{build_grid, FamilySpec, Reference};
use rand::SeedableRng;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "lsikit", version, about = "Gaussian log-Sobolev deficit toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the functional report (and optional metrics) for one density.
    Compute(ComputeArgs),
    /// Run the inequality suite over a catalog and emit CSV + summary files.
    Verify(VerifyArgs),
    /// Sweep a family parameter and emit a plot-ready CSV.
    Sweep(SweepArgs),
    /// Run a named brute-force oracle against the fast implementation.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct FamilyFlags {
    /// Family name: tilt | scale | mixture | bump | floor.
    #[arg(long)]
    family: String,
    /// Tilt parameter b.
    #[arg(long)]
    b: Option<f64>,
    /// Scale parameter σ.
    #[arg(long)]
    sigma: Option<f64>,
    /// Mixture weight w.
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Bump amplitude.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    /// Floor level α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Shape family for floor (its parameters reuse the flags above).
    #[arg(long)]
    shape: Option<String>,
}

impl FamilyFlags {
    fn spec_for(&self, family: &str) -> anyhow::Result<FamilySpec> {
        let need = |v: Option<f64>, name: &str| {
            v.with_context(|| format!("family '{family}' requires --{name}"))
        };
        Ok(match family {
            "tilt" => FamilySpec::Tilt {
                b: need(self.b, "b")?,
            },
            "scale" => FamilySpec::Scale {
                sigma: need(self.sigma, "sigma")?,
            },
            "mixture" => FamilySpec::Mixture {
                w: need(self.w, "w")?,
                sigma1: need(self.sigma1, "sigma1")?,
                sigma2: need(self.sigma2, "sigma2")?,
            },
            "bump" => FamilySpec::Bump {
                eps: need(self.eps, "eps")?,
                center: self.center.unwrap_or(0.0),
                width: self.width.unwrap_or(1.0),
            },
            "floor" => {
                let shape = self
                    .shape
                    .as_deref()
                    .context("family 'floor' requires --shape")?;
                if shape == "floor" {
                    bail!("floor shapes cannot nest on the command line");
                }
                FamilySpec::Floor {
                    alpha: need(self.alpha, "alpha")?,
                    shape: Box::new(self.spec_for(shape)?),
                }
            }
            other => bail!("unknown family '{other}'"),
        })
    }

    fn spec(&self) -> anyhow::Result<FamilySpec> {
        self.spec_for(&self.family)
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    family: FamilyFlags,
    /// Metrics against the standard Gaussian: w1 w2 tv hellinger kolmogorov
    /// levy prokhorov delta_c (repeatable).
    #[arg(long = "metric")]
    metrics: Vec<String>,
    /// Write the report as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss grid size.
    #[arg(long, default_value_t = 160)]
    nodes: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for records.csv and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Family: scale | bump | tilt | mixture.
    #[arg(long)]
    family: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Geometric spacing instead of linear.
    #[arg(long)]
    log: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// prokhorov_subsets | gaussian_closedforms | fourier_planche |
    /// convolution_closure.
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 8)]
    atoms: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 24301)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Oracle(args) => cmd_oracle(args),
    }
}

/// 17 significant digits, locale-independent.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_compute(args: ComputeArgs) -> anyhow::Result<ExitCode> {
    let spec = args.family.spec()?;
    let grid = build_grid(Reference::Gamma, args.nodes, 0.0)?;
    let f = make_family(&spec, &grid)?;
    let report = functionals::report(&f, &grid)?;
    let mut lines: Vec<(String, String)> = vec![
        ("family".into(), f.label().to_string()),
        ("entropy".into(), fmt(report.entropy)),
        ("fisher".into(), fmt(report.fisher)),
        ("deficit".into(), fmt(report.deficit)),
        ("m2".into(), fmt(report.m2)),
        ("l1_to_one".into(), fmt(report.l1_to_one)),
    ];
    let mut extra = serde_json::Map::new();
    if !args.metrics.is_empty() {
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &grid)?;
        let cfg = CdfGrid::for_densities(&[&f, &one], &grid);
        let mu = transport::cdf_of(&f, &cfg)?;
        let nu = transport::cdf_of(&one, &cfg)?;
        for name in &args.metrics {
            let value = match name.as_str() {
                "w1" => transport::wasserstein(&mu, &nu, 1.0)?,
                "w2" => transport::wasserstein(&mu, &nu, 2.0)?,
                "tv" => metrics::total_variation(&f, &one, &grid)?,
                "hellinger" => metrics::hellinger(&f, &one, &grid)?,
                "kolmogorov" => metrics::kolmogorov(&mu, &nu),
                "levy" => metrics::levy(&mu, &nu),
                "prokhorov" => {
                    let (dmu, _) = metrics::DiscreteMeasure::from_quantiles(&mu, 64, 64)?;
                    let (dnu, _) = metrics::DiscreteMeasure::from_quantiles(&nu, 64, 64)?;
                    metrics::prokhorov(&dmu, &dnu)
                }
                "delta_c" => {
                    let m = Arc::new(build_grid(Reference::M, args.nodes, 0.0)?);
                    functionals::carlen_deficit(&rescale_to_dm(&f, &m)?)?
                }
                other => bail!("unknown metric '{other}'"),
            };
            lines.push((name.clone(), fmt(value)));
            extra.insert(name.clone(), serde_json::json!(value));
        }
    }
    for (k, v) in &lines {
        println!("{k} = {v}");
    }
    if let Some(path) = args.out {
        let mut doc = serde_json::to_value(&report)?;
        doc["family"] = serde_json::json!(f.label());
        for (k, v) in extra {
            doc[&k] = v;
        }
        std::fs::write(&path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn write_records_csv(path: &Path, records: &[verify::InequalityRecord]) -> anyhow::Result<()> {
    let mut out = String::from("name,anchor,lhs,rhs,margin,error_bound,status\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_quote(&r.name),
            csv_quote(&r.anchor),
            fmt(r.lhs),
            fmt(r.rhs),
            fmt(r.margin),
            fmt(r.numerical_error_bound),
            r.status.as_str()
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            FileConfig::parse(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let suite_cfg = cfg.suite_config();
    let catalog = cfg.catalog();
    let output = run_suite(&catalog, &suite_cfg)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    write_records_csv(&args.out_dir.join("records.csv"), &output.records)?;
    let summary_path = args.out_dir.join("summary.json");
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&output.summary)?,
    )
    .with_context(|| format!("writing {}", summary_path.display()))?;
    let s = &output.summary;
    println!(
        "records: {} | holds: {} | holds_within_error: {} | violated: {} | reported_only: {}",
        s.total, s.holds, s.holds_within_error, s.violated, s.reported_only
    );
    for name in &s.flagged_reported {
        println!("flagged (reported-only form came out negative): {name}");
    }
    for (k, v) in &s.empirical_constants {
        println!("empirical {k} = {}", fmt(*v));
    }
    if s.violated > 0 {
        for r in output
            .records
            .iter()
            .filter(|r| r.status == Status::Violated)
        {
            println!(
                "VIOLATED {} margin {} error bound {}",
                r.name,
                fmt(r.margin),
                fmt(r.numerical_error_bound)
            );
        }
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let family = SweepFamily::parse(&args.family)
        .with_context(|| format!("unknown sweep family '{}'", args.family))?;
    if args.steps == 0 {
        bail!("--steps must be at least 1");
    }
    let schedule: Vec<f64> = if args.steps == 1 {
        vec![args.from]
    } else if args.log {
        if args.from <= 0.0 || args.to <= 0.0 {
            bail!("--log spacing needs positive endpoints");
        }
        (0..args.steps)
            .map(|i| {
                args.from * (args.to / args.from).powf(i as f64 / (args.steps - 1) as f64)
            })
            .collect()
    } else {
        (0..args.steps)
            .map(|i| {
                args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64
            })
            .collect()
    };
    let report = sequence_diagnostics(family, &schedule, &SuiteConfig::default())?;
    let mut out =
        String::from("parameter,delta,delta_c,entropy,fisher,w1,w2,d_tv,d_k,l1,l2_dm\n");
    for p in &report.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(p.parameter),
            fmt(p.delta),
            fmt(p.delta_c),
            fmt(p.entropy),
            fmt(p.fisher),
            fmt(p.w1),
            fmt(p.w2),
            fmt(p.tv),
            fmt(p.kolmogorov),
            fmt(p.l1),
            fmt(p.l2_dm),
        ));
    }
    if let Some(e) = report.exponent_l1_vs_delta {
        out.push_str(&format!("# exponent_l1_vs_delta,{}\n", fmt(e)));
        out.push_str(&format!(
            "# l1_delta_quarter_ratio,{}\n",
            fmt(report.l1_delta_quarter_ratio)
        ));
        out.push_str(&format!("# converged,{}\n", report.converged));
    }
    std::fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} points to {} (converged: {})",
        report.points.len(),
        args.out.display(),
        report.converged
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<ExitCode> {
    let (max_disc, tolerance): (f64, f64) = match args.name.as_str() {
        "prokhorov_subsets" => {
            if args.atoms > 12 {
                bail!("--atoms capped at 12 for the exhaustive oracle");
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            let mut worst = 0.0f64;
            for _ in 0..args.trials {
                let (a, b) = metrics::random_discrete_pair(&mut rng, args.atoms.max(1));
                let fast = metrics::prokhorov(&a, &b);
                let slow = metrics::prokhorov_subset_oracle(&a, &b);
                worst = worst.max((fast - slow).abs());
            }
            (worst, 1e-6)
        }
        "gaussian_closedforms" => {
            let grid = build_grid(Reference::Gamma, 160, 0.0)?;
            let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &grid)?;
            let mut worst = 0.0f64;
            for sigma in [0.5, 0.8, 1.25, 2.0] {
                let f = make_family(&FamilySpec::Scale { sigma }, &grid)?;
                let h = functionals::entropy(&f, &grid)?;
                let i = functionals::fisher_information(&f, &grid)?;
                let cfg = CdfGrid::for_densities(&[&f], &grid);
                let mu = transport::cdf_of(&f, &cfg)?;
                let nu = transport::cdf_of(&one, &cfg)?;
                let w1 = transport::wasserstein(&mu, &nu, 1.0)?;
                let w2 = transport::wasserstein(&mu, &nu, 2.0)?;
                worst = worst
                    .max((h - closed_forms::scale::entropy(sigma)).abs())
                    .max((i - closed_forms::scale::fisher(sigma)).abs())
                    .max((i / 2.0 - h - closed_forms::scale::deficit(sigma)).abs())
                    .max((w1 - closed_forms::scale::w1(sigma)).abs())
                    .max((w2 - closed_forms::scale::w2(sigma)).abs());
            }
            (worst, 1e-6)
        }
        "fourier_planche" => {
            let m = Arc::new(build_grid(Reference::M, 160, 0.0)?);
            let mut worst = 0.0f64;
            for a in [0.0, 0.2, 0.45] {
                let h: Vec<num_complex::Complex64> = m
                    .nodes()
                    .iter()
                    .map(|&x| {
                        num_complex::Complex64::new(
                            (1.0 + a * x)
                                * (-std::f64::consts::PI * x * x).exp(),
                            0.0,
                        )
                    })
                    .collect();
                let xis: Vec<f64> = m.nodes().to_vec();
                let hhat = fourier::fourier_quadrature(&m, &h, &xis)?;
                worst = worst.max(fourier::plancherel_drift(&m, &h, &hhat));
            }
            (worst, 1e-6)
        }
        "convolution_closure" => {
            let mut worst = 0.0f64;
            for (s1, s2) in [(1.0, 1.0), (0.8, 1.3), (1.5, 0.7)] {
                let a = cramer::gaussian_density(12.0, 4097, 0.0, s1)?;
                let b = cramer::gaussian_density(12.0, 4097, 0.0, s2)?;
                let c = cramer::convolve(&a, &b)?;
                let s = f64::sqrt(s1 * s1 + s2 * s2);
                worst = worst.max(c.sup_diff(|x| closed_forms::normal_pdf(x, s)));
            }
            (worst, 1e-6)
        }
        other => bail!("unknown oracle '{other}'"),
    };
    let pass = max_disc <= tolerance;
    println!(
        "oracle {}: max discrepancy = {} (tolerance {})",
        args.name,
        fmt(max_disc),
        fmt(tolerance)
    );
    println!("{}", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().flush();
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
