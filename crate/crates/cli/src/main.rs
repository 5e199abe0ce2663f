//! Command-line front end: construct flows from JSON specs, verify them,
//! decompose sampled fields, evaluate the heat-kernel potential, and run the
//! built-in counterexample demo.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input/validation error.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use ustokes::constructors::{build_flow, sample_spec, FlowSpec};
use ustokes::decompose::{read_samples_csv, recover_ab, ShellGrid};
use ustokes::heatkernel::{
    psi_integral, psi_integral_literature_kernel, psi_integral_with_tolerance, QuadratureDomain,
};
use ustokes::verify::{fmt17, recover_pressure, verify_flow, ResidualReport, Tolerances};
use ustokes::{ScalarField, SpherePoint, StokesError, TimeKind, Vec3, VectorField};

#[derive(Parser)]
#[command(
    name = "ustokes",
    version,
    about = "Exact unsteady Stokes solutions: construct, verify, decompose"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Shell sampling grid, parsed from `r1=A,r2=B,nr=N,ntheta=N,nphi=N`.
#[derive(Debug, Clone, Copy)]
struct GridArg {
    r1: f64,
    r2: f64,
    nr: usize,
    ntheta: usize,
    nphi: usize,
}

impl Default for GridArg {
    fn default() -> Self {
        GridArg { r1: 0.5, r2: 1.5, nr: 4, ntheta: 6, nphi: 12 }
    }
}

impl FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut g = GridArg::default();
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{part}'"))?;
            match key.trim() {
                "r1" => g.r1 = value.parse::<f64>().map_err(|e| format!("r1: {e}"))?,
                "r2" => g.r2 = value.parse::<f64>().map_err(|e| format!("r2: {e}"))?,
                "nr" => g.nr = value.parse::<usize>().map_err(|e| format!("nr: {e}"))?,
                "ntheta" => g.ntheta = value.parse::<usize>().map_err(|e| format!("ntheta: {e}"))?,
                "nphi" => g.nphi = value.parse::<usize>().map_err(|e| format!("nphi: {e}"))?,
                other => return Err(format!("unknown grid key '{other}'")),
            }
        }
        if !(g.r1 > 0.0 && g.r2 > g.r1) {
            return Err(format!("need 0 < r1 < r2, got r1={}, r2={}", g.r1, g.r2));
        }
        Ok(g)
    }
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Flow-spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Sampling grid, r1=A,r2=B,nr=N,ntheta=N,nphi=N.
    #[arg(long, default_value = "r1=0.5,r2=1.5,nr=4,ntheta=6,nphi=12")]
    grid: GridArg,
    /// Sample times.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.5])]
    times: Vec<f64>,
    /// Exact-path residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the JSON report here as well.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the JSON report on stdout (17 significant digits).
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the general solution from a flow spec and verify it.
    Construct(VerifyArgs),
    /// Verify a flow spec against the residual engine.
    Verify(VerifyArgs),
    /// Recover the generating scalars A and B from sampled shell data.
    Decompose {
        /// CSV with header r,theta,phi,t,vx,vy,vz.
        #[arg(long)]
        samples: PathBuf,
        /// Spherical-harmonic band limit.
        #[arg(long, default_value_t = 4)]
        lmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the heat-kernel pressure potential psi at points.
    Psi {
        /// Pressure field JSON ({"modes":[...]}).
        #[arg(long)]
        pressure: PathBuf,
        /// Ball domain of this radius (default 2.0).
        #[arg(long, conflicts_with = "shell")]
        ball: Option<f64>,
        /// Shell domain r1,r2.
        #[arg(long, value_delimiter = ',')]
        shell: Option<Vec<f64>>,
        /// Evaluation point, Cartesian x,y,z (repeatable).
        #[arg(long, value_delimiter = ',', action = clap::ArgAction::Append, required = true)]
        point: Vec<f64>,
        /// Evaluation time (> 0).
        #[arg(long)]
        t: f64,
        /// Node budget nr,ntheta,nphi,ntime.
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<usize>>,
        /// Fail unless the estimated quadrature error is below this.
        #[arg(long)]
        tol: Option<f64>,
        /// Use the literature kernel normalization (comparison only; carries
        /// no correctness claim).
        #[arg(long)]
        literature_kernel: bool,
        /// Kinematic viscosity.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long)]
        json: bool,
    },
    /// The rotating-field counterexample: solenoidal, satisfies the
    /// fourth-order velocity equation, admits no pressure. Exits 1.
    DemoCounterexample {
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0])]
        times: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Seeded randomized construct-and-verify smoke suite.
    Suite {
        #[arg(long, default_value_t = 5)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let (kind, message) = classify(&err);
            eprintln!(
                "{{\"error\":{{\"kind\":\"{kind}\",\"message\":{}}}}}",
                json_string(&message)
            );
            if kind == "verification" {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

/// Split errors into verification findings (exit 1) and input problems
/// (exit 2), with a stable machine-readable kind.
fn classify(err: &anyhow::Error) -> (&'static str, String) {
    if let Some(se) = err.downcast_ref::<StokesError>() {
        let kind = match se {
            StokesError::PathDependence { .. }
            | StokesError::NotDivergenceFree { .. }
            | StokesError::MonopoleFlux(_) => "verification",
            StokesError::Spec(_) => "spec_validation",
            StokesError::Resonance(_) => "resonance",
            StokesError::Monopole => "monopole",
            StokesError::Format(_) => "format",
            StokesError::GridTooCoarse(_) => "grid_too_coarse",
            StokesError::QuadratureBudget(_) => "quadrature_budget",
            StokesError::InvalidParams(_) => "invalid_params",
            StokesError::Domain(_) => "domain",
            StokesError::Precondition(_) => "precondition",
            StokesError::InvalidIndex { .. } => "invalid_index",
            StokesError::Extrapolation(_) => "extrapolation",
            StokesError::Unrepresentable(_) => "unrepresentable",
        };
        return (kind, format!("{err:#}"));
    }
    ("input", format!("{err:#}"))
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Construct(args) => construct_or_verify(args, true),
        Command::Verify(args) => construct_or_verify(args, false),
        Command::Decompose { samples, lmax, out, json } => decompose(samples, lmax, out, json),
        Command::Psi { pressure, ball, shell, point, t, budget, tol, literature_kernel, nu, json } => {
            psi(pressure, ball, shell, point, t, budget, tol, literature_kernel, nu, json)
        }
        Command::DemoCounterexample { nu, mu, times, json } => {
            demo_counterexample(nu, mu, times, json)
        }
        Command::Suite { count, seed, tol, json } => suite(count, seed, tol, json),
    }
}

fn shell_grid(g: &GridArg, times: &[f64]) -> anyhow::Result<ShellGrid> {
    Ok(ShellGrid::uniform(g.r1, g.r2, g.nr, g.ntheta, g.nphi, times.to_vec())?)
}

fn construct_or_verify(args: VerifyArgs, describe: bool) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let spec = FlowSpec::from_json(&text)?;
    let grid = shell_grid(&args.grid, &args.times)?;
    let solution = build_flow(&spec)?;
    let force = if spec.is_homogeneous() { None } else { Some(spec.body_force()) };
    let tol = Tolerances::with_exact(args.tol);
    let report = verify_flow(&solution, force.as_ref(), &grid, &spec.params, &tol)?;

    if describe {
        println!(
            "flow: provenance={:?}, modes A={} B={} chi={} P={} T={}, p0={:.6e}",
            solution.provenance,
            spec.a.modes.len(),
            spec.b.modes.len(),
            spec.chi.modes.len(),
            spec.p_force.modes.len(),
            spec.t_force.modes.len(),
            spec.p0
        );
    }
    for line in report.summary_lines() {
        println!("{line}");
    }
    println!("verdict: {}", if report.pass { "pass" } else { "FAIL" });
    emit_report(&report, args.out.as_deref(), args.json)?;
    Ok(report.pass)
}

fn emit_report(
    report: &ResidualReport,
    out: Option<&std::path::Path>,
    json: bool,
) -> anyhow::Result<()> {
    let text = report.to_json();
    if let Some(path) = out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        println!("{text}");
    }
    Ok(())
}

fn decompose(
    samples: PathBuf,
    lmax: u32,
    out: Option<PathBuf>,
    json: bool,
) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&samples)
        .with_context(|| format!("reading {}", samples.display()))?;
    let (grid, field) = read_samples_csv(&text)?;
    let params = ustokes::FluidParams::unit();
    let dec = recover_ab(&field, &grid, lmax, &params)?;

    // Human summary: coefficients at the outermost radius, first time.
    let last_r = dec.r_nodes.len() - 1;
    println!(
        "decomposition: lmax={lmax}, radii {}..{} ({} nodes), {} times, analysis residual {:.3e}",
        dec.r_nodes[0],
        dec.r_nodes[last_r],
        dec.r_nodes.len(),
        dec.times.len(),
        dec.analysis_residual
    );
    for n in 1..=lmax {
        for m in -(n as i32)..=(n as i32) {
            let a = dec.a[0][last_r].get(n, m);
            let b = dec.b[0][last_r].get(n, m);
            if a.abs() > 1e-10 || b.abs() > 1e-10 {
                println!(
                    "  (n={n}, m={m:+}): A = {a:.6e}, B = {b:.6e}  at r = {:.6}",
                    dec.r_nodes[last_r]
                );
            }
        }
    }

    let mut doc = String::from("{");
    doc.push_str(&format!("\"lmax\":{lmax},"));
    doc.push_str(&format!("\"analysis_residual\":{},", fmt17(dec.analysis_residual)));
    doc.push_str(&format!(
        "\"r_nodes\":[{}],",
        dec.r_nodes.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",")
    ));
    doc.push_str(&format!(
        "\"times\":[{}],",
        dec.times.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",")
    ));
    for (key, table) in [("A", &dec.a), ("A_dr", &dec.a_dr), ("B", &dec.b)] {
        doc.push_str(&format!("\"{key}\":["));
        let slices: Vec<String> = table
            .iter()
            .map(|per_time| {
                let rows: Vec<String> = per_time
                    .iter()
                    .map(|c| {
                        format!(
                            "[{}]",
                            c.values.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",")
                        )
                    })
                    .collect();
                format!("[{}]", rows.join(","))
            })
            .collect();
        doc.push_str(&slices.join(","));
        doc.push(']');
        if key != "B" {
            doc.push(',');
        }
    }
    doc.push('}');
    if let Some(path) = out {
        std::fs::write(&path, &doc).with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        println!("{doc}");
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn psi(
    pressure: PathBuf,
    ball: Option<f64>,
    shell: Option<Vec<f64>>,
    point: Vec<f64>,
    t: f64,
    budget: Option<Vec<usize>>,
    tol: Option<f64>,
    literature_kernel: bool,
    nu: f64,
    json: bool,
) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&pressure)
        .with_context(|| format!("reading {}", pressure.display()))?;
    let parsed: ScalarField =
        serde_json::from_str(&text).map_err(|e| StokesError::Format(e.to_string()))?;
    let field = ScalarField::new(parsed.modes)?;
    let mut dom = match (ball, shell) {
        (Some(r), None) => QuadratureDomain::ball(r)?,
        (None, Some(s)) if s.len() == 2 => QuadratureDomain::shell(s[0], s[1])?,
        (None, Some(_)) => {
            return Err(StokesError::Format("--shell needs exactly r1,r2".into()).into())
        }
        (None, None) => QuadratureDomain::ball(2.0)?,
        _ => unreachable!("clap conflicts_with"),
    };
    if let Some(b) = budget {
        if b.len() != 4 {
            return Err(StokesError::Format("--budget needs nr,ntheta,nphi,ntime".into()).into());
        }
        dom = dom.with_budget(b[0], b[1], b[2], b[3])?;
    }
    if point.is_empty() || !point.len().is_multiple_of(3) {
        return Err(StokesError::Format("--point needs x,y,z triples".into()).into());
    }
    let params = ustokes::FluidParams::from_nu_rho(nu, 1.0)?;
    let mut json_items = Vec::new();
    for xyz in point.chunks(3) {
        let p = SpherePoint::from_cartesian(&Vec3::new(xyz[0], xyz[1], xyz[2]));
        let value = match (literature_kernel, tol) {
            (true, _) => psi_integral_literature_kernel(&field, &p, t, &dom, &params)?,
            (false, Some(tol)) => psi_integral_with_tolerance(&field, &p, t, &dom, &params, tol)?,
            (false, None) => psi_integral(&field, &p, t, &dom, &params)?,
        };
        println!("psi({}, {}, {}; t={t}) = {value:.6e}", xyz[0], xyz[1], xyz[2]);
        json_items.push(format!(
            "{{\"point\":[{},{},{}],\"t\":{},\"psi\":{}}}",
            fmt17(xyz[0]),
            fmt17(xyz[1]),
            fmt17(xyz[2]),
            fmt17(t),
            fmt17(value)
        ));
    }
    if json {
        println!("[{}]", json_items.join(","));
    }
    Ok(true)
}

fn demo_counterexample(nu: f64, mu: f64, times: Vec<f64>, json: bool) -> anyhow::Result<bool> {
    let params = ustokes::FluidParams::new(nu, mu, mu / nu)?;
    // V = (y, -x, 0) e^(nu t), the toroidal field of B = -z e^(nu t).
    let v = VectorField::CurlR(ScalarField::coordinate(
        2,
        TimeKind::Exp { sigma: params.nu },
        -1.0,
    ));
    let grid = ShellGrid::uniform(0.5, 1.5, 3, 4, 8, times.clone())?;
    let tol = Tolerances::default();
    let mut report = ResidualReport::default();
    report.merge(ustokes::verify::continuity_residual(&v, &grid, &tol)?);
    report.merge(ustokes::verify::biharmonic_heat_residual(&v, &grid, &params, &tol)?);
    report.merge(ustokes::verify::condition_residual(&v, &grid, &params, &tol)?);

    println!("counterexample V = (y, -x, 0) exp(nu t), nu = {nu}, mu = {mu}");
    for line in report.summary_lines() {
        println!("{line}");
    }
    let mut loops = Vec::new();
    for &t in &times {
        let one_time = ShellGrid::uniform(0.5, 1.5, 3, 4, 8, vec![t])?;
        match recover_pressure(&v, &one_time, &params, &SpherePoint::new(1.0, 1.2, 0.3)) {
            Err(StokesError::PathDependence { loop_integral, tol }) => {
                println!(
                    "pressure recovery at t = {t}: path-dependent, unit-circle loop integral = \
                     {loop_integral:.6e} (tolerance {tol:.1e}) -- no single-valued pressure"
                );
                loops.push((t, loop_integral));
            }
            Ok(_) => println!("pressure recovery at t = {t}: unexpectedly path-independent"),
            Err(other) => return Err(other.into()),
        }
    }
    println!(
        "the field is solenoidal and satisfies the fourth-order velocity equation, but the \
         vorticity condition fails (max 2 e^(nu t)) and the loop integral equals 2 pi mu e^(nu t)"
    );
    if json {
        let loops_json = loops
            .iter()
            .map(|(t, l)| format!("{{\"t\":{},\"loop\":{}}}", fmt17(*t), fmt17(*l)))
            .collect::<Vec<_>>()
            .join(",");
        println!("{{\"report\":{},\"loop_integrals\":[{loops_json}]}}", report.to_json());
    }
    // Exit 1 by design: the demo demonstrates a verification failure.
    Ok(false)
}

fn suite(count: u64, seed: u64, tol: f64, json: bool) -> anyhow::Result<bool> {
    let grid = ShellGrid::uniform(0.5, 1.5, 3, 4, 8, vec![0.0, 0.1, 0.5])?;
    let tols = Tolerances::with_exact(tol);
    let mut all_pass = true;
    let mut items = Vec::new();
    for k in 0..count {
        let spec = sample_spec(seed.wrapping_add(k));
        let sol = build_flow(&spec)?;
        let force = if spec.is_homogeneous() { None } else { Some(spec.body_force()) };
        let report = verify_flow(&sol, force.as_ref(), &grid, &spec.params, &tols)?;
        let worst = report.entries.values().map(|e| e.max_abs).fold(0.0_f64, f64::max);
        println!(
            "case {k} (seed {}): {} (worst residual {worst:.3e})",
            seed.wrapping_add(k),
            if report.pass { "pass" } else { "FAIL" }
        );
        items.push(format!("{{\"case\":{k},\"pass\":{}}}", report.pass));
        all_pass &= report.pass;
    }
    if json {
        println!("{{\"cases\":[{}],\"pass\":{all_pass}}}", items.join(","));
    }
    Ok(all_pass)
}
