//! `cdirac` — command-line entry point for the critical Dirac library.
//!
//! Every subcommand prints a human-readable summary of its named checks
//! to stdout, optionally writes machine-readable JSON/CSV artifacts, and
//! exits 0 iff all checks pass (1 on a failed check or numeric error,
//! 2 on usage errors).  Output files are deterministic: identical
//! arguments and seed produce byte-identical artifacts (wall time is
//! reported on stderr only).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use critical_dirac::asymptotics::{extract_leading_spinor, fit_power};
use critical_dirac::clifford::{
    anticommutator_deviation, build_rep, commutation_deviation, inversion_deviation, CliffordRep,
};
use critical_dirac::closed_form::{
    action_value, excited_explicit, excited_spinor, ground_state_radial, ground_state_spinor,
    radial_residual, Nonlinearity, RadialPair,
};
use critical_dirac::field::{pde_residual, sample, GridSpec};
use critical_dirac::kelvin::{
    kelvin, verify_dkelvin, verify_green_identity, verify_integral_equation_with,
    verify_norm_identities, PointSpinorFn,
};
use critical_dirac::model::ModelParams;
use critical_dirac::radial::{
    ground_log_closed_form, integrate, rho_closed_form, LogState, LogTrajectory,
};
use critical_dirac::shooting::shoot;

#[derive(Parser)]
#[command(
    name = "cdirac",
    version,
    about = "Construct, integrate and verify critical Dirac solutions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the Clifford-algebra identities for a representation.
    Clifford {
        /// Spatial dimension (2..=8).
        #[arg(long)]
        n: u32,
        /// Also print the alpha matrices.
        #[arg(long)]
        verify: bool,
    },
    /// Evaluate the ground-state bubble on a radial grid.
    Bubble {
        /// Real spatial dimension n > 1.
        #[arg(long, default_value_t = 2.0)]
        n: f64,
        /// Scale parameter lambda > 0.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Overall sign +-1.
        #[arg(long, default_value_t = 1)]
        sigma: i32,
        /// Radial grid as lo:hi:count (log-spaced).
        #[arg(long, default_value = "1e-2:1e2:200")]
        grid: String,
        /// CSV output path (header r,u,v).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the explicit 2D excited state (beta1=1, beta2=1/2).
    Excited {
        /// Winding index S.
        #[arg(long, allow_hyphen_values = true)]
        s: i32,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        sigma: i32,
        /// Radial grid as lo:hi:count (log-spaced).
        #[arg(long, default_value = "1e-2:1e2:200")]
        grid: String,
        /// CSV output path (header r,u,v).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the logarithmic radial system.
    Integrate {
        /// Model: "ground" or "graphene".
        #[arg(long)]
        model: String,
        /// Dimension (ground model).
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        beta1: Option<f64>,
        #[arg(long)]
        beta2: Option<f64>,
        /// Winding index S (graphene model).
        #[arg(long, allow_hyphen_values = true)]
        s: Option<i32>,
        /// Initial time.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        f0: f64,
        #[arg(long, allow_hyphen_values = true)]
        g0: f64,
        /// Final time (may be below t0 for backward integration).
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// CSV output path (header t,f,g,energy).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the midpoint shooting construction for the graphene system.
    Shoot {
        #[arg(long)]
        beta1: f64,
        #[arg(long)]
        beta2: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: i32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 15.0)]
        horizon: f64,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV trajectory path (header t,f,g,energy).
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Sample a closed-form solution on a box grid and measure the
    /// finite-difference PDE residual.
    FieldResidual {
        /// Model: "ground" or "graphene".
        #[arg(long, default_value = "ground")]
        model: String,
        /// Integer dimension (ground model).
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Winding index S (graphene model).
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        s: i32,
        /// Box as lo,hi,m (same on every axis).
        #[arg(long, default_value = "-6,6,241", allow_hyphen_values = true)]
        r#box: String,
        /// Radius around the origin excluded from the residual.
        #[arg(long)]
        exclude: Option<f64>,
        /// Field CSV output (header x1,...,xn,re_1,im_1,...).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the Kelvin-transform identities.
    KelvinVerify {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the Green's-function integral equation on the bubble.
    GreenVerify {
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Number of verification points.
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Gauss-Legendre nodes per radial panel.
        #[arg(long, default_value_t = 16)]
        nodes: usize,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power law to a CSV column against the r column.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "u")]
        column: String,
        /// Window as lo:hi.
        #[arg(long, default_value = "1e2:1e3")]
        window: String,
        /// JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole verification suite.
    VerifyAll {
        /// Reduced resolution for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    /// Inclusive lower bound, if any.
    lo: Option<f64>,
    /// Inclusive upper bound, if any.
    hi: Option<f64>,
    pass: bool,
}

impl Check {
    fn le(name: &str, value: f64, hi: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            lo: None,
            hi: Some(hi),
            pass: value.is_finite() && value <= hi,
        }
    }

    fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            lo: Some(target - tol),
            hi: Some(target + tol),
            pass: value.is_finite() && (value - target).abs() <= tol,
        }
    }

    fn in_range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            lo: Some(lo),
            hi: Some(hi),
            pass: value.is_finite() && value >= lo && value <= hi,
        }
    }
}

#[derive(Serialize)]
struct Report {
    schema: u32,
    command: String,
    version: String,
    parameters: serde_json::Value,
    metrics: BTreeMap<String, f64>,
    checks: Vec<Check>,
    pass: bool,
}

impl Report {
    fn new(command: &str, parameters: serde_json::Value) -> Self {
        Report {
            schema: 1,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn check(&mut self, c: Check) {
        self.metrics.insert(c.name.clone(), c.value);
        self.pass &= c.pass;
        self.checks.push(c);
    }

    fn print_summary(&self) {
        for c in &self.checks {
            let bound = match (c.lo, c.hi) {
                (None, Some(hi)) => format!("<= {hi:.3e}"),
                (Some(lo), Some(hi)) => format!("in [{lo:.6}, {hi:.6}]"),
                (Some(lo), None) => format!(">= {lo:.3e}"),
                (None, None) => String::new(),
            };
            println!(
                "{}: {} = {:.6e} ({})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                bound
            );
        }
        for (name, value) in &self.metrics {
            if !self.checks.iter().any(|c| &c.name == name) {
                println!("info: {name} = {value:.12e}");
            }
        }
    }

    fn write(&self, out: &Option<PathBuf>) -> Result<(), String> {
        if let Some(path) = out {
            let json = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
            std::fs::write(path, json + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        Ok(())
    }
}

fn write_csv(path: &PathBuf, header: &str, rows: &[Vec<f64>]) -> Result<(), String> {
    let mut text = String::with_capacity(32 * rows.len());
    text.push_str(header);
    text.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            // shortest round-trip decimal form
            let _ = write!(text, "{v}");
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn parse_log_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be lo:hi:count, got `{spec}`"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lo `{}`", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid hi `{}`", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad grid count `{}`", parts[2]))?;
    if !(hi > lo && lo > 0.0) || count < 2 {
        return Err(format!("grid needs 0 < lo < hi and count >= 2, got `{spec}`"));
    }
    Ok((0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

fn parse_box(spec: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("box must be lo,hi,m, got `{spec}`"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad box lo `{}`", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad box hi `{}`", parts[1]))?;
    let m: usize = parts[2].parse().map_err(|_| format!("bad box m `{}`", parts[2]))?;
    Ok((lo, hi, m))
}

fn trajectory_rows(tr: &LogTrajectory) -> Vec<Vec<f64>> {
    (0..tr.len())
        .map(|i| vec![tr.ts[i], tr.fs[i], tr.gs[i], tr.energies[i]])
        .collect()
}

fn pair_rows(pair: &RadialPair, rs: &[f64]) -> Result<Vec<Vec<f64>>, critical_dirac::Error> {
    rs.iter()
        .map(|&r| pair.eval(r).map(|(u, v)| vec![r, u, v]))
        .collect()
}

/// Deterministic pseudo-random stream in [-1, 1].
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

/// A smooth rapidly decaying spinor with seeded polynomial structure,
/// used as a generic test function for the Kelvin identities.
fn seeded_spinor(rep: &CliffordRep, seed: u64) -> PointSpinorFn<'static> {
    let nsp = rep.spinor_dim();
    let n = rep.n() as usize;
    let mut rng = Lcg(seed.wrapping_mul(2654435761).wrapping_add(1));
    let coefs: Vec<Vec<f64>> = (0..nsp)
        .map(|_| (0..=n).map(|_| rng.next_f64()).collect())
        .collect();
    PointSpinorFn::new(rep.clone(), true, move |x: &[f64]| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let env = (-0.5 * r2).exp();
        Ok(coefs
            .iter()
            .map(|c| {
                let poly: f64 = c[0] + x.iter().zip(&c[1..]).map(|(xi, ci)| xi * ci).sum::<f64>();
                Complex64::new(env * poly, 0.3 * env * poly * poly)
            })
            .collect())
    })
}

/// The ground-state bubble as a pointwise spinor function.
fn bubble_spinor(rep: &CliffordRep, lambda: f64) -> PointSpinorFn<'static> {
    let half = rep.spinor_dim() / 2;
    let mut nvec = vec![Complex64::new(0.0, 0.0); half];
    nvec[0] = Complex64::new(1.0, 0.0);
    let rep2 = rep.clone();
    PointSpinorFn::new(rep.clone(), true, move |x: &[f64]| {
        ground_state_spinor(&rep2, lambda, &nvec, x)
    })
}

fn random_points(n: usize, count: usize, seed: u64, r_lo: f64, r_hi: f64) -> Vec<Vec<f64>> {
    let mut rng = Lcg(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| r_hi * rng.next_f64()).collect();
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r >= r_lo && r <= r_hi {
            out.push(x);
        }
    }
    out
}

type CmdResult = Result<Report, String>;

fn lib(e: critical_dirac::Error) -> String {
    e.to_string()
}

fn run_clifford(n: u32, verify: bool) -> CmdResult {
    let rep = build_rep(n).map_err(lib)?;
    let mut report = Report::new("clifford", serde_json::json!({ "n": n }));
    if verify {
        for (j, alpha) in rep.alphas().iter().enumerate() {
            println!("alpha_{} =", j + 1);
            for row in alpha.rows() {
                let line: Vec<String> = row
                    .iter()
                    .map(|z| format!("{:+.1}{:+.1}i", z.re, z.im))
                    .collect();
                println!("  [{}]", line.join(", "));
            }
        }
    }
    let mut inv_dev: f64 = 0.0;
    let mut comm_dev: f64 = 0.0;
    let mut rng = Lcg(9);
    for _ in 0..20 {
        let x: Vec<f64> = (0..n as usize).map(|_| 2.0 * rng.next_f64()).collect();
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() < 0.1 {
            continue;
        }
        inv_dev = inv_dev.max(inversion_deviation(&rep, &x).map_err(lib)?);
        comm_dev = comm_dev.max(commutation_deviation(&rep, &x).map_err(lib)?);
    }
    report.check(Check::le(
        "anticommutator_deviation",
        anticommutator_deviation(&rep),
        1e-14,
    ));
    report.check(Check::le("inversion_deviation", inv_dev, 1e-14));
    report.check(Check::le("commutation_deviation", comm_dev, 1e-14));
    report.metric("spinor_dim", rep.spinor_dim() as f64);
    Ok(report)
}

fn run_pair(
    command: &str,
    parameters: serde_json::Value,
    pair: &RadialPair,
    grid: &str,
    out: &Option<PathBuf>,
) -> CmdResult {
    let rs = parse_log_grid(grid)?;
    let mut report = Report::new(command, parameters);
    let mut worst: f64 = 0.0;
    for &r in &rs {
        worst = worst.max(radial_residual(pair, r).map_err(lib)?);
    }
    report.check(Check::le("radial_residual", worst, 1e-12));
    if let Some(path) = out {
        write_csv(path, "r,u,v", &pair_rows(pair, &rs).map_err(lib)?)?;
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn parse_model(
    model: &str,
    n: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    s: Option<i32>,
) -> Result<ModelParams, String> {
    match model {
        "ground" => {
            let n = n.ok_or("ground model requires --n")?;
            Ok(ModelParams::GroundState { n })
        }
        "graphene" => Ok(ModelParams::Graphene2D {
            beta1: beta1.ok_or("graphene model requires --beta1")?,
            beta2: beta2.ok_or("graphene model requires --beta2")?,
            s: s.ok_or("graphene model requires --s")?,
        }),
        other => Err(format!("unknown model `{other}` (use ground|graphene)")),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_integrate(
    params: &ModelParams,
    t0: f64,
    f0: f64,
    g0: f64,
    t1: f64,
    tol: f64,
    out: &Option<PathBuf>,
) -> CmdResult {
    let tr = integrate(params, LogState::new(t0, f0, g0), t1, tol).map_err(lib)?;
    let mut report = Report::new(
        "integrate",
        serde_json::json!({
            "model": params, "t0": t0, "f0": f0, "g0": g0, "t1": t1, "tol": tol
        }),
    );
    report.metric("samples", tr.len() as f64);
    report.check(Check::le("energy_drift", tr.energy_drift, 1e3 * tol));
    if let Some(path) = out {
        write_csv(path, "t,f,g,energy", &trajectory_rows(&tr))?;
    }
    Ok(report)
}

fn run_shoot(
    beta1: f64,
    beta2: f64,
    s: i32,
    tol: f64,
    horizon: f64,
    out: &Option<PathBuf>,
    profile: &Option<PathBuf>,
) -> CmdResult {
    let params = ModelParams::Graphene2D { beta1, beta2, s };
    let result = shoot(&params, horizon, tol).map_err(lib)?;
    let rep = &result.report;
    let mut report = Report::new(
        "shoot",
        serde_json::json!({
            "beta1": beta1, "beta2": beta2, "s": s, "tol": tol, "horizon": horizon
        }),
    );
    report.metric("a", rep.a);
    report.metric("tau", rep.tau as f64);
    report.metric("ell", rep.ell);
    report.metric("ell_prime", rep.ell_prime);
    report.metric("cubic_coeff", rep.cubic_coeff);
    report.metric("cubic_predicted", rep.cubic_predicted);
    report.check(Check::le("symmetry_residual", rep.symmetry_residual, 1e-8));
    report.check(Check::le("energy_drift", rep.energy_drift, 1e3 * tol.max(1e-12)));
    let kappa = params.linear_rate().abs();
    report.check(Check::within("decay_rate", rep.decay_rate, kappa, 0.01 * kappa));
    report.check(Check::within(
        "cubic_vs_predicted",
        rep.cubic_coeff,
        rep.cubic_predicted,
        0.01 * rep.cubic_predicted.abs().max(1e-300),
    ));
    if let Some(path) = profile {
        let mut rows = trajectory_rows(&result.backward);
        let fwd = trajectory_rows(&result.forward);
        // the midpoint sample appears in both halves; keep one copy
        rows.extend(fwd.into_iter().skip(1));
        write_csv(path, "t,f,g,energy", &rows)?;
    }
    report.write(out)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn run_field_residual(
    model: &str,
    n: u32,
    lambda: f64,
    s: i32,
    box_spec: &str,
    exclude: Option<f64>,
    out: &Option<PathBuf>,
) -> CmdResult {
    let (lo, hi, m) = parse_box(box_spec)?;
    let mut report = Report::new(
        "field-residual",
        serde_json::json!({
            "model": model, "n": n, "lambda": lambda, "s": s,
            "box": [lo, hi, m], "exclude": exclude
        }),
    );
    let (field, nl, excl) = match model {
        "ground" => {
            let rep = build_rep(n).map_err(lib)?;
            let grid = GridSpec::new(vec![lo; n as usize], vec![hi; n as usize], m).map_err(lib)?;
            let bubble = bubble_spinor(&rep, lambda);
            let field = sample(&rep, &grid, |x| bubble.eval(x)).map_err(lib)?;
            (field, Nonlinearity::Critical, exclude.unwrap_or(0.0))
        }
        "graphene" => {
            let rep = build_rep(2).map_err(lib)?;
            let grid = GridSpec::new(vec![lo; 2], vec![hi; 2], m).map_err(lib)?;
            let pair = excited_explicit(s, lambda, 1).map_err(lib)?;
            let field =
                sample(&rep, &grid, |x| excited_spinor(&pair, &[x[0], x[1]])).map_err(lib)?;
            (
                field,
                Nonlinearity::Graphene2D { beta1: 1.0, beta2: 0.5 },
                exclude.unwrap_or(0.2),
            )
        }
        other => return Err(format!("unknown model `{other}` (use ground|graphene)")),
    };
    let res = pde_residual(&field, nl, excl);
    report.check(Check::le("pde_residual", res, 1e-3));
    if let Some(path) = out {
        let dim = field.grid().dim();
        let nsp = field.rep().spinor_dim();
        let mut header = (1..=dim).map(|j| format!("x{j}")).collect::<Vec<_>>();
        for k in 1..=nsp {
            header.push(format!("re_{k}"));
            header.push(format!("im_{k}"));
        }
        let rows: Vec<Vec<f64>> = (0..field.grid().nodes().unwrap())
            .map(|flat| {
                let mut row = field.grid().coord(flat);
                for z in field.node(flat) {
                    row.push(z.re);
                    row.push(z.im);
                }
                row
            })
            .collect();
        write_csv(path, &header.join(","), &rows)?;
    }
    Ok(report)
}

fn run_kelvin_verify(n: u32, seed: u64, out: &Option<PathBuf>) -> CmdResult {
    let rep = build_rep(n).map_err(lib)?;
    let mut report = Report::new("kelvin-verify", serde_json::json!({ "n": n, "seed": seed }));
    let psi = seeded_spinor(&rep, seed);
    let psi_k = kelvin(&psi);
    let back = kelvin(&psi_k);
    let nf = n as f64;
    let mut invol: f64 = 0.0;
    let mut modulus: f64 = 0.0;
    for x in random_points(n as usize, 100, seed ^ 0xDEADBEEF, 0.3, 2.0) {
        let a = psi.eval(&x).map_err(lib)?;
        let b = back.eval(&x).map_err(lib)?;
        for (p, q) in a.iter().zip(&b) {
            invol = invol.max((p - q).norm());
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let inv: Vec<f64> = x.iter().map(|c| c / (r * r)).collect();
        let mk: f64 = psi_k.eval(&x).map_err(lib)?.iter().map(|z| z.norm_sqr()).sum();
        let m0: f64 = psi.eval(&inv).map_err(lib)?.iter().map(|z| z.norm_sqr()).sum();
        let expect = r.powf(-2.0 * (nf - 1.0)) * m0;
        modulus = modulus.max((mk - expect).abs() / expect.max(1.0));
    }
    report.check(Check::le("involution_deviation", invol, 1e-12));
    report.check(Check::le("modulus_identity_deviation", modulus, 1e-14));
    let pts = random_points(n as usize, 20, seed ^ 0xC0FFEE, 0.4, 2.0);
    let coarse = verify_dkelvin(&psi, &pts, 1e-2).map_err(lib)?;
    let fine = verify_dkelvin(&psi, &pts, 5e-3).map_err(lib)?;
    report.metric("dkelvin_residual_coarse", coarse);
    report.metric("dkelvin_residual_fine", fine);
    report.check(Check::in_range("dkelvin_halving_ratio", coarse / fine, 12.0, 20.0));
    if n <= 3 {
        let bubble = bubble_spinor(&rep, 1.0);
        let (d_crit, d_quad) = verify_norm_identities(&bubble).map_err(lib)?;
        report.check(Check::le("critical_norm_identity_gap", d_crit, 5e-3));
        report.check(Check::le("dirac_pairing_identity_gap", d_quad, 5e-3));
    }
    report.write(out)?;
    Ok(report)
}

fn run_green_verify(n: u32, points: usize, nodes: usize, out: &Option<PathBuf>) -> CmdResult {
    if !(2..=3).contains(&n) {
        return Err("green-verify supports n = 2 or 3".to_string());
    }
    let rep = build_rep(n).map_err(lib)?;
    let mut report = Report::new(
        "green-verify",
        serde_json::json!({ "n": n, "points": points, "nodes": nodes }),
    );
    let bubble = bubble_spinor(&rep, 1.0);
    let pts = random_points(n as usize, points, 42, 0.0, 3.0);
    let res = verify_integral_equation_with(&bubble, Nonlinearity::Critical, &pts, nodes)
        .map_err(lib)?;
    report.check(Check::le("integral_equation_residual", res, 1e-2));
    let phi = seeded_spinor(&rep, 7);
    let green_pts = random_points(n as usize, 2, 17, 0.2, 1.5);
    let gres = verify_green_identity(&phi, &green_pts).map_err(lib)?;
    report.check(Check::le("green_identity_residual", gres, 2e-3));
    report.write(out)?;
    Ok(report)
}

fn run_fit(input: &PathBuf, column: &str, window: &str, out: &Option<PathBuf>) -> CmdResult {
    let text = std::fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty input file")?;
    let names: Vec<&str> = header.split(',').collect();
    let r_idx = names
        .iter()
        .position(|c| *c == "r" || *c == "t")
        .ok_or("input needs an `r` (or `t`) column")?;
    let w_idx = names
        .iter()
        .position(|c| *c == column)
        .ok_or_else(|| format!("no column `{column}` in {}", input.display()))?;
    let mut rs = Vec::new();
    let mut ws = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64, String> {
            fields
                .get(idx)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| format!("bad value on data line {}", lineno + 1))
        };
        rs.push(parse(r_idx)?);
        ws.push(parse(w_idx)?.abs());
    }
    let parts: Vec<&str> = window.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("window must be lo:hi, got `{window}`"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| "bad window lo")?;
    let hi: f64 = parts[1].parse().map_err(|_| "bad window hi")?;
    let fit = fit_power(&rs, &ws, (lo, hi)).map_err(lib)?;
    let mut report = Report::new(
        "fit",
        serde_json::json!({
            "input": input.display().to_string(), "column": column, "window": [lo, hi]
        }),
    );
    report.metric("exponent", fit.exponent);
    report.metric("coefficient", fit.coefficient);
    report.metric("fit_residual", fit.fit_residual);
    report.write(out)?;
    Ok(report)
}

fn run_verify_all(quick: bool) -> CmdResult {
    let mut report = Report::new("verify-all", serde_json::json!({ "quick": quick }));

    // Clifford identities, n = 2..8
    for n in 2..=8u32 {
        let sub = run_clifford(n, false)?;
        for c in sub.checks {
            report.check(Check {
                name: format!("clifford_n{n}_{}", c.name),
                ..c
            });
        }
    }

    // closed-form residuals
    let count = if quick { 50 } else { 200 };
    let rs: Vec<f64> = (0..count)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (count - 1) as f64))
        .collect();
    let mut worst: f64 = 0.0;
    for &n in &[2.0, 2.5, 3.0, 4.0] {
        let pair = ground_state_radial(n, 1.0, 1).map_err(lib)?;
        for &r in &rs {
            worst = worst.max(radial_residual(&pair, r).map_err(lib)?);
        }
    }
    for &s in &[-3, -2, 0, 1, 2] {
        let pair = excited_explicit(s, 1.0, 1).map_err(lib)?;
        for &r in &rs {
            worst = worst.max(radial_residual(&pair, r).map_err(lib)?);
        }
    }
    report.check(Check::le("closed_form_residual", worst, 1e-12));

    // action of the bubble
    let m = if quick { 121 } else { 241 };
    let lambdas: &[f64] = if quick { &[1.0] } else { &[0.5, 1.0, 2.0] };
    let rep2 = build_rep(2).map_err(lib)?;
    let grid = GridSpec::centered(2, 6.0, m).map_err(lib)?;
    for &lam in lambdas {
        let bubble = bubble_spinor(&rep2, lam);
        let field = sample(&rep2, &grid, |x| bubble.eval(x)).map_err(lib)?;
        let oracle = move |r: f64| 2.0 * lam / (lam * lam + r * r);
        let act = critical_dirac::field::action(&field, Nonlinearity::Critical, Some(&oracle))
            .map_err(lib)?;
        report.check(Check::within(
            &format!("action_lambda_{lam}"),
            act.value,
            action_value(2).map_err(lib)?,
            1e-3,
        ));
    }

    // log-variable integration against the closed form
    let dims: &[f64] = if quick { &[2.0] } else { &[2.0, 2.5, 3.0] };
    for &n in dims {
        let (f0, g0) = ground_log_closed_form(n, 0.0, 1.0, 0.0);
        let params = ModelParams::GroundState { n };
        let mut sup = 0.0f64;
        let mut drift = 0.0f64;
        for t1 in [12.0, -12.0] {
            let tr = integrate(&params, LogState::new(0.0, f0, g0), t1, 1e-10).map_err(lib)?;
            drift = drift.max(tr.energy_drift);
            for i in 0..tr.len() {
                let rho = tr.fs[i] * tr.fs[i] + tr.gs[i] * tr.gs[i];
                sup = sup.max((rho - rho_closed_form(n, 0.0, tr.ts[i])).abs());
            }
        }
        report.check(Check::le(&format!("rho_error_n{n}"), sup, 1e-8));
        report.check(Check::le(&format!("integrate_drift_n{n}"), drift, 1e-7));
    }

    // shooting against the explicit excited state
    let horizon = if quick { 8.0 } else { 12.0 };
    let params = ModelParams::Graphene2D { beta1: 1.0, beta2: 0.5, s: 1 };
    let res = shoot(&params, horizon, 1e-10).map_err(lib)?;
    report.check(Check::within("shoot_ell_explicit", res.report.ell, 6.0f64.sqrt(), 1e-4));
    let pair = excited_explicit(1, 1.0, 1).map_err(lib)?;
    let mut sup = 0.0f64;
    for tr in [&res.forward, &res.backward] {
        for i in 0..tr.len() {
            if tr.ts[i].abs() > 8.0 {
                continue;
            }
            let r = tr.ts[i].exp();
            let (u, v) = pair.eval(r).map_err(lib)?;
            sup = sup.max((tr.fs[i] - r.sqrt() * u).abs());
            sup = sup.max((tr.gs[i] - r.sqrt() * v).abs());
        }
    }
    report.check(Check::le("shoot_vs_explicit", sup, 1e-6));

    // generic shooting parameters
    let generic: &[(f64, f64, i32)] =
        if quick { &[(2.0, 0.3, 1)] } else { &[(2.0, 0.3, 1), (0.7, 1.1, -2)] };
    for &(beta1, beta2, s) in generic {
        let params = ModelParams::Graphene2D { beta1, beta2, s };
        let r = shoot(&params, 12.0, 1e-10).map_err(lib)?.report;
        let tag = format!("shoot_b1_{beta1}_b2_{beta2}_s{s}");
        report.check(Check::le(&format!("{tag}_symmetry"), r.symmetry_residual, 1e-8));
        let kappa = params.linear_rate().abs();
        report.check(Check::within(&format!("{tag}_rate"), r.decay_rate, kappa, 0.01 * kappa));
        report.check(Check::within(
            &format!("{tag}_cubic"),
            r.cubic_coeff,
            r.cubic_predicted,
            0.01 * r.cubic_predicted.abs(),
        ));
    }

    // PDE residual and convergence order on the grid
    let (m_lo, m_hi) = (121, 241);
    let bubble = bubble_spinor(&rep2, 1.0);
    let grid_lo = GridSpec::centered(2, 6.0, m_lo).map_err(lib)?;
    let grid_hi = GridSpec::centered(2, 6.0, m_hi).map_err(lib)?;
    let f_lo = sample(&rep2, &grid_lo, |x| bubble.eval(x)).map_err(lib)?;
    let f_hi = sample(&rep2, &grid_hi, |x| bubble.eval(x)).map_err(lib)?;
    let r_lo = pde_residual(&f_lo, Nonlinearity::Critical, 0.0);
    let r_hi = pde_residual(&f_hi, Nonlinearity::Critical, 0.0);
    report.check(Check::le("field_residual_m241", r_hi, 1e-3));
    report.check(Check::within("field_order", (r_lo / r_hi).log2(), 4.0, 0.2));

    // Kelvin identities
    let sub = run_kelvin_verify(2, 1, &None)?;
    for c in sub.checks {
        report.check(Check { name: format!("kelvin_{}", c.name), ..c });
    }
    if !quick {
        let pts = random_points(3, 20, 5, 0.4, 2.0);
        let rep3 = build_rep(3).map_err(lib)?;
        let psi3 = seeded_spinor(&rep3, 3);
        let ratio = verify_dkelvin(&psi3, &pts, 1e-2).map_err(lib)?
            / verify_dkelvin(&psi3, &pts, 5e-3).map_err(lib)?;
        report.check(Check::in_range("kelvin_dkelvin_ratio_n3", ratio, 12.0, 20.0));
    }

    // Green's-function integral equation
    let (gp, gn) = if quick { (2, 8) } else { (5, 16) };
    let sub = run_green_verify(2, gp, gn, &None)?;
    for c in sub.checks {
        report.check(Check { name: format!("green_{}", c.name), ..c });
    }

    // decay asymptotics
    let lead = extract_leading_spinor(&bubble, 1e3, 1e-3).map_err(lib)?;
    let mlead: f64 = lead.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    report.check(Check::within("leading_spinor_modulus", mlead, 2.0f64.sqrt(), 1e-3));
    let epair = excited_explicit(1, 1.0, 1).map_err(lib)?;
    let rs: Vec<f64> = (0..40)
        .map(|i| (50.0f64.ln() + (800.0f64 / 50.0).ln() * i as f64 / 39.0).exp())
        .collect();
    let ws: Result<Vec<f64>, _> = rs
        .iter()
        .map(|&r| {
            epair
                .eval(r)
                .map(|(u, v)| r * (u * u + v * v).sqrt())
        })
        .collect();
    let fit = fit_power(&rs, &ws.map_err(lib)?, (50.0, 800.0)).map_err(lib)?;
    report.check(Check::within("excited_modulus_rate", fit.exponent, 1.0, 0.05));

    Ok(report)
}

fn run(cli: Cli) -> CmdResult {
    match cli.cmd {
        Cmd::Clifford { n, verify } => run_clifford(n, verify),
        Cmd::Bubble { n, lambda, sigma, grid, out } => {
            let pair = ground_state_radial(n, lambda, sigma).map_err(lib)?;
            run_pair(
                "bubble",
                serde_json::json!({ "n": n, "lambda": lambda, "sigma": sigma, "grid": grid }),
                &pair,
                &grid,
                &out,
            )
        }
        Cmd::Excited { s, lambda, sigma, grid, out } => {
            let pair = excited_explicit(s, lambda, sigma).map_err(lib)?;
            run_pair(
                "excited",
                serde_json::json!({ "s": s, "lambda": lambda, "sigma": sigma, "grid": grid }),
                &pair,
                &grid,
                &out,
            )
        }
        Cmd::Integrate { model, n, beta1, beta2, s, t0, f0, g0, t1, tol, out } => {
            let params = parse_model(&model, n, beta1, beta2, s)?;
            run_integrate(&params, t0, f0, g0, t1, tol, &out)
        }
        Cmd::Shoot { beta1, beta2, s, tol, horizon, out, profile } => {
            run_shoot(beta1, beta2, s, tol, horizon, &out, &profile)
        }
        Cmd::FieldResidual { model, n, lambda, s, r#box, exclude, out } => {
            run_field_residual(&model, n, lambda, s, &r#box, exclude, &out)
        }
        Cmd::KelvinVerify { n, seed, out } => run_kelvin_verify(n, seed, &out),
        Cmd::GreenVerify { n, points, nodes, out } => run_green_verify(n, points, nodes, &out),
        Cmd::Fit { input, column, window, out } => run_fit(&input, &column, &window, &out),
        Cmd::VerifyAll { quick } => run_verify_all(quick),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    match run(cli) {
        Ok(report) => {
            report.print_summary();
            eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
            if report.pass {
                println!("all checks passed");
                ExitCode::SUCCESS
            } else {
                println!("FAILED");
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
