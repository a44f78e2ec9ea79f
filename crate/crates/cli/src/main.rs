//! Experiment driver: load a spectral-measure spec, run one experiment, and
//! emit a deterministic JSON (or CSV) report with an exit code that encodes
//! the convergence status.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use whlab::measure::{weight_measure, wiener_atom_statistic, SpectralMeasure};
use whlab::testfn::TestFunction;
use whlab::{forms, hankel, kernel, laguerre, Error, Status};

#[derive(Parser)]
#[command(name = "whlab", version, about = "Numerical laboratory for semibounded convolution forms")]
struct Cli {
    /// Quadrature target tolerance (default: WHLAB_TOL_OVERRIDE env var, else 1e-12).
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Acceptance threshold for oscillatory cross-check residuals in verdicts.
    #[arg(long, global = true, default_value_t = 1e-5)]
    osc_tol: f64,
    /// Largest |lambda| swept in identity verifications.
    #[arg(long, global = true, default_value_t = 50.0)]
    lambda_max: f64,
    /// Output format (CSV is available for grid-valued experiments only).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize the convolution kernel (or its regularization) on an x grid.
    SynthKernel {
        #[arg(long)]
        measure: PathBuf,
        /// Grid spec a:b:n (n points from a to b inclusive).
        #[arg(long)]
        x_grid: String,
        /// Regularization order; 0 requests the bare kernel.
        #[arg(long, default_value_t = 0)]
        q: u32,
    },
    /// Finite-section eigenvalue extremes against the symbol range.
    Bounds {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Probe closability with shrinking-norm bump sequences at lambda0.
    DefectProbe {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        lambda0: f64,
        /// Comma-separated increasing spreading scales, e.g. 1,2,4,8.
        #[arg(long)]
        scales: String,
    },
    /// Quadratic-form vs Toeplitz-section correspondence on basis vectors.
    Correspondence {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Regularization pipeline: eta profile, annihilating-ODE residual,
    /// leading-coefficient fit, circle coefficients, atom statistic.
    RbPipeline {
        #[arg(long)]
        measure: PathBuf,
        /// Regularization order (default: the smallest admissible).
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
    /// Laguerre identity suite: Laplace closed forms, circle-power identity,
    /// basis orthonormality.
    LaguerreVerify {
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
    /// Laplace-side profile and Hankel-form checks.
    Hankel {
        #[arg(long)]
        measure: PathBuf,
        /// Grid spec a:b:n.
        #[arg(long, default_value = "0.5:10:20")]
        t_grid: String,
        /// Comma-separated subset of cm,closability,forms.
        #[arg(long, default_value = "cm,closability,forms")]
        check: String,
    },
}

#[derive(Serialize)]
struct DiagnosticReport {
    experiment: String,
    inputs: Value,
    results: Value,
    residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
    status: &'static str,
}

impl DiagnosticReport {
    fn exit_code(&self) -> i32 {
        match self.status {
            "converged" => 0,
            "approximate" => 2,
            _ => 1,
        }
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Converged => "converged",
        Status::Approximate => "approximate",
    }
}

/// Verdicts are only meaningful on converged runs.
fn verdict_if(status: Status, text: String) -> Option<String> {
    (status == Status::Converged).then_some(text)
}

fn load_measure(path: &PathBuf) -> anyhow::Result<SpectralMeasure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read measure file {}", path.display()))?;
    let m: SpectralMeasure = serde_json::from_str(&text)
        .with_context(|| format!("measure file {} does not match the schema", path.display()))?;
    m.validate()
        .with_context(|| format!("measure file {} is invalid", path.display()))?;
    Ok(m)
}

fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec must be a:b:n, got {spec:?}");
    }
    let a: f64 = parts[0].parse().context("grid start is not a number")?;
    let b: f64 = parts[1].parse().context("grid end is not a number")?;
    let n: usize = parts[2].parse().context("grid count is not an integer")?;
    if n < 2 || !(b > a) {
        bail!("grid spec needs b > a and at least 2 points, got {spec:?}");
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| a + h * i as f64).collect())
}

fn parse_scales(spec: &str) -> anyhow::Result<Vec<u32>> {
    let scales: Vec<u32> = spec
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("scales must be comma-separated integers, got {spec:?}"))?;
    if scales.len() < 2 || !scales.windows(2).all(|w| w[0] < w[1]) {
        bail!("scales must be increasing with at least two entries, got {spec:?}");
    }
    Ok(scales)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(report) => {
            let code = report.exit_code();
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serialization")
                ),
                Format::Csv => match render_csv(&report) {
                    Some(text) => print!("{text}"),
                    None => {
                        eprintln!("error: CSV output is only available for grid experiments");
                        std::process::exit(1);
                    }
                },
            }
            code
        }
        Err(e) => {
            // Refusals from the analysis layer still produce a report; input
            // and schema errors go to stderr.
            if let Some(err) = e.downcast_ref::<Error>() {
                if matches!(
                    err,
                    Error::Refused(_)
                        | Error::OutOfCorrespondenceRange(_)
                        | Error::NonFiniteWeight { .. }
                ) {
                    let report = DiagnosticReport {
                        experiment: "refused".into(),
                        inputs: Value::Null,
                        results: json!({ "reason": err.to_string() }),
                        residuals: BTreeMap::new(),
                        verdict: None,
                        status: "refused",
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report).expect("report serialization")
                    );
                    std::process::exit(1);
                }
            }
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn rel_tol(cli: &Cli) -> f64 {
    cli.rel_tol
        .or_else(|| std::env::var("WHLAB_TOL_OVERRIDE").ok()?.parse().ok())
        .unwrap_or(1e-12)
}

fn global_flags(cli: &Cli) -> Value {
    json!({
        "rel_tol": rel_tol(cli),
        "osc_tol": cli.osc_tol,
        "lambda_max": cli.lambda_max,
    })
}

fn run(cli: &Cli) -> anyhow::Result<DiagnosticReport> {
    match &cli.cmd {
        Cmd::SynthKernel { measure, x_grid, q } => synth_kernel(cli, measure, x_grid, *q),
        Cmd::Bounds { measure, n } => bounds(cli, measure, *n),
        Cmd::DefectProbe { measure, lambda0, scales } => {
            defect_probe(cli, measure, *lambda0, scales)
        }
        Cmd::Correspondence { measure, n } => correspondence(cli, measure, *n),
        Cmd::RbPipeline { measure, p, n_max } => rb_pipeline(cli, measure, *p, *n_max),
        Cmd::LaguerreVerify { n_max } => laguerre_verify(cli, *n_max),
        Cmd::Hankel { measure, t_grid, check } => hankel_cmd(cli, measure, t_grid, check),
    }
}

fn synth_kernel(
    cli: &Cli,
    path: &PathBuf,
    x_grid: &str,
    q: u32,
) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let grid = parse_grid(x_grid)?;
    let tol = rel_tol(cli);
    let mut rows = Vec::with_capacity(grid.len());
    let mut status = Status::Converged;
    for &x in &grid {
        let v = if q == 0 {
            kernel::synthesize_kernel_with(&m, x, tol)?
        } else {
            kernel::regularized_kernel_with(&m, q, x, tol)?
        };
        status = status.merge(v.status);
        rows.push(json!({
            "x": x,
            "re": v.value.re,
            "im": v.value.im,
            "status": status_str(v.status),
        }));
    }
    Ok(DiagnosticReport {
        experiment: "synth-kernel".into(),
        inputs: json!({
            "measure": m,
            "flags": { "x_grid": x_grid, "q": q, "global": global_flags(cli) },
        }),
        results: json!({ "samples": rows }),
        residuals: BTreeMap::new(),
        verdict: verdict_if(status, format!("synthesized {} kernel samples", grid.len())),
        status: status_str(status),
    })
}

fn bounds(cli: &Cli, path: &PathBuf, n: usize) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let section = forms::toeplitz_section(&m, n)?;
    let (min, max, eigen) = forms::section_spectrum(&section);
    Ok(DiagnosticReport {
        experiment: "bounds".into(),
        inputs: json!({
            "measure": m,
            "flags": { "N": n, "global": global_flags(cli) },
        }),
        results: json!({ "min_eigenvalue": min, "max_eigenvalue": max, "eigenvalues": eigen }),
        residuals: BTreeMap::new(),
        verdict: verdict_if(section.status, format!("eigen-extremes ({min:.6}, {max:.6})")),
        status: status_str(section.status),
    })
}

fn defect_probe(
    cli: &Cli,
    path: &PathBuf,
    lambda0: f64,
    scales: &str,
) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let scales = parse_scales(scales)?;
    let probe = forms::defect_probe(&m, lambda0, &scales)?;
    let verdict = match probe.verdict {
        forms::DefectVerdict::DefectDetected => format!("closability defect at {lambda0}"),
        forms::DefectVerdict::NoDefectDetected => "no defect detected".into(),
    };
    let mut residuals = BTreeMap::new();
    residuals.insert(
        "ratio_growth".into(),
        probe.rows.last().unwrap().ratio / probe.rows.first().unwrap().ratio,
    );
    Ok(DiagnosticReport {
        experiment: "defect-probe".into(),
        inputs: json!({
            "measure": m,
            "flags": { "lambda0": lambda0, "scales": scales, "global": global_flags(cli) },
        }),
        results: json!({ "rows": probe.rows }),
        residuals,
        verdict: verdict_if(probe.status, verdict),
        status: status_str(probe.status),
    })
}

fn correspondence(cli: &Cli, path: &PathBuf, n: usize) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let probes: [(&str, Vec<Complex64>); 3] = [
        ("e0", vec![one]),
        ("e1", vec![Complex64::new(0.0, 0.0), one]),
        ("mixed", vec![half, half]),
    ];
    let mut residuals = BTreeMap::new();
    let mut status = Status::Converged;
    for (name, g) in &probes {
        let r = forms::correspondence_residual(&m, g, n)?;
        status = status.merge(r.status);
        residuals.insert((*name).to_string(), r.value);
    }
    let worst = residuals.values().cloned().fold(0.0, f64::max);
    let verdict = if worst <= cli.osc_tol {
        format!("correspondence holds at N = {n} within {:e}", cli.osc_tol)
    } else {
        format!("correspondence residual {worst:e} exceeds {:e}", cli.osc_tol)
    };
    Ok(DiagnosticReport {
        experiment: "correspondence".into(),
        inputs: json!({
            "measure": m,
            "flags": { "N": n, "global": global_flags(cli) },
        }),
        results: json!({ "worst_residual": worst }),
        residuals,
        verdict: verdict_if(status, verdict),
        status: status_str(status),
    })
}

fn rb_pipeline(
    cli: &Cli,
    path: &PathBuf,
    p: Option<u32>,
    n_max: u32,
) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let p = p.unwrap_or_else(|| m.growth_p().max(1));
    let tol = rel_tol(cli);

    // Coarse profile over [0.1, 5] for the leading-coefficient fit, plus a
    // fine uniform patch around x = 1 for the annihilating-ODE residual.
    let coarse: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    let eta_coarse = kernel::eta_profile_with(&m, p, &coarse, tol)?;
    let fit = kernel::s1_fit(&eta_coarse, p, (0.1, 5.0))?;
    let c0 = fit[0];

    let h = 1e-3;
    let fine: Vec<f64> = (-20..=20).map(|k| 1.0 + h * k as f64).collect();
    let eta_fine = kernel::eta_profile_with(&m, p, &fine, tol)?;
    let ode = kernel::ode_residual(&eta_fine, p, (fine[0], *fine.last().unwrap()))?;

    let wm = weight_measure(&m, p)?;
    let mut max_coeff = 0.0f64;
    let mut status = eta_coarse.status.merge(eta_fine.status);
    for n in 1..=n_max as i32 {
        let c = whlab::measure::cayley_coeff(&wm, n);
        status = status.merge(c.status);
        max_coeff = max_coeff.max(c.value.norm());
    }
    let wiener32 = wiener_atom_statistic(&wm, 32);
    let wiener64 = wiener_atom_statistic(&wm, 64);
    status = status.merge(wiener32.status).merge(wiener64.status);

    let mut residuals = BTreeMap::new();
    residuals.insert("ode_residual".into(), ode);
    residuals.insert("max_circle_coeff".into(), max_coeff);
    Ok(DiagnosticReport {
        experiment: "rb-pipeline".into(),
        inputs: json!({
            "measure": m,
            "flags": { "p": p, "n_max": n_max, "global": global_flags(cli) },
        }),
        results: json!({
            "c0_re": c0.re,
            "c0_im": c0.im,
            "wiener_statistic_n32": wiener32.value,
            "wiener_statistic_n64": wiener64.value,
        }),
        residuals,
        verdict: verdict_if(
            status,
            format!("profile annihilated to {ode:.3e}; atom statistic {:.6e}", wiener64.value),
        ),
        status: status_str(status),
    })
}

fn laguerre_verify(cli: &Cli, n_max: u32) -> anyhow::Result<DiagnosticReport> {
    let mut status = Status::Converged;

    // Unit-point Laplace identity: the closed form equals 1 exactly.
    let mut laplace_unit = 0.0f64;
    for n in 0..=n_max {
        let v = laguerre::laguerre_laplace_l1(n, Complex64::new(1.0, 0.0))?;
        laplace_unit = laplace_unit.max((v - 1.0).norm());
    }

    // Closed form against direct half-line quadrature on a small zeta panel.
    let mut laplace_quadrature = 0.0f64;
    for n in (0..=n_max).step_by(5) {
        for zeta in [
            Complex64::new(0.3, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(2.0, -3.0),
        ] {
            let cf = laguerre::laguerre_laplace_l1(n, zeta)?;
            let q = laguerre::laguerre_laplace_l1_quadrature(n, zeta)?;
            status = status.merge(q.status);
            laplace_quadrature =
                laplace_quadrature.max((cf - q.value).norm() / cf.norm().max(1.0));
        }
    }

    // Cayley-power identity across the lambda sweep.
    let mut cayley = 0.0f64;
    for n in (1..=n_max).step_by(3) {
        for lambda in [-cli.lambda_max, -1.0, 0.0, 2.0, cli.lambda_max] {
            let r = laguerre::cayley_power_identity_residual(n, lambda);
            status = status.merge(r.status);
            cayley = cayley.max(r.value);
        }
    }

    // Basis orthonormality.
    let gram = laguerre::gram_matrix(60);
    let mut gram_res = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_res = gram_res.max((v - target).abs());
        }
    }

    let mut residuals = BTreeMap::new();
    residuals.insert("laplace_unit".into(), laplace_unit);
    residuals.insert("laplace_quadrature".into(), laplace_quadrature);
    residuals.insert("cayley_identity".into(), cayley);
    residuals.insert("gram_identity".into(), gram_res);
    let pass = laplace_unit <= 1e-8 && laplace_quadrature <= 1e-8 && cayley <= 1e-6
        && gram_res <= 1e-8;
    let verdict = if pass {
        "all identity residuals within tolerance".to_string()
    } else {
        "identity residual above tolerance".to_string()
    };
    Ok(DiagnosticReport {
        experiment: "laguerre-verify".into(),
        inputs: json!({ "flags": { "n_max": n_max, "global": global_flags(cli) } }),
        results: json!({ "gram_dim": 60 }),
        residuals,
        verdict: verdict_if(status, verdict),
        status: status_str(status),
    })
}

fn hankel_cmd(
    cli: &Cli,
    path: &PathBuf,
    t_grid: &str,
    check: &str,
) -> anyhow::Result<DiagnosticReport> {
    let m = load_measure(path)?;
    let grid = parse_grid(t_grid)?;
    if grid[0] <= 0.0 {
        bail!("the Laplace profile needs t > 0; grid starts at {}", grid[0]);
    }
    let checks: Vec<&str> = check.split(',').map(str::trim).collect();
    for c in &checks {
        if !matches!(*c, "cm" | "closability" | "forms") {
            bail!("unknown check {c:?}; expected a subset of cm,closability,forms");
        }
    }

    let mut rows = Vec::with_capacity(grid.len());
    let mut status = Status::Converged;
    for &t in &grid {
        let v = hankel::bernstein_profile(&m, t)?;
        status = status.merge(v.status);
        rows.push(json!({ "t": t, "h": v.value, "status": status_str(v.status) }));
    }

    let mut residuals = BTreeMap::new();
    let mut verdict_parts = Vec::new();
    let profile = hankel::HankelProfile::FromMeasure(m.clone());
    if checks.contains(&"cm") {
        let r = hankel::complete_monotonicity_residual(&profile, 4, &grid)?;
        residuals.insert("cm_violation".into(), r);
        verdict_parts.push(if r >= -1e-6 {
            "completely monotone on the grid".to_string()
        } else {
            format!("monotonicity violated by {r:.3e}")
        });
    }
    if checks.contains(&"closability") {
        let flag = hankel::hankel_closability_flag(&m, &grid)?;
        verdict_parts.push(match flag {
            hankel::ClosabilityVerdict::ClosableSufficientConditionMet => {
                "closable (sufficient condition met)".to_string()
            }
            hankel::ClosabilityVerdict::CriterionNotMet => {
                "closability criterion not met".to_string()
            }
        });
    }
    if checks.contains(&"forms") {
        let f = TestFunction::bump(1.0, 0.0);
        let spectral = hankel::hankel_form_spectral(&m, &f)?;
        let time = hankel::hankel_form_time(&profile, &f)?;
        status = status.merge(spectral.status).merge(time.status);
        let r = (spectral.value - time.value).abs();
        residuals.insert("form_cross_residual".into(), r);
        verdict_parts.push(if r <= 1e-4 {
            "time and spectral forms agree".to_string()
        } else {
            format!("form mismatch {r:.3e}")
        });
    }

    Ok(DiagnosticReport {
        experiment: "hankel".into(),
        inputs: json!({
            "measure": m,
            "flags": { "t_grid": t_grid, "check": checks, "global": global_flags(cli) },
        }),
        results: json!({ "profile": rows }),
        residuals,
        verdict: verdict_if(status, verdict_parts.join("; ")),
        status: status_str(status),
    })
}

/// CSV rendering for grid-valued experiments.
fn render_csv(report: &DiagnosticReport) -> Option<String> {
    match report.experiment.as_str() {
        "synth-kernel" => {
            let mut out = String::from("x,re,im,status\n");
            for row in report.results["samples"].as_array()? {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row["x"], row["re"], row["im"],
                    row["status"].as_str()?,
                ));
            }
            Some(out)
        }
        "hankel" => {
            let mut out = String::from("t,h,status\n");
            for row in report.results["profile"].as_array()? {
                out.push_str(&format!(
                    "{},{},{}\n",
                    row["t"], row["h"],
                    row["status"].as_str()?,
                ));
            }
            Some(out)
        }
        _ => None,
    }
}
