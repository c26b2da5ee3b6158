//! Midpoint shooting for the graphene-type system.
//!
//! The connecting orbit of the system with winding S crosses the
//! symmetry line at f(0) = a, g(0) = tau a with
//! a = (|2S+1|/(beta1 + 2 beta2))^{1/2} and tau = sgn(2S+1); integrating
//! forward and backward from that point produces the homoclinic
//! trajectory, whose tails determine the leading decay constants.

use serde::Serialize;

use crate::model::ModelParams;
use crate::radial::{self, IntegrateOptions, LogState, LogTrajectory};
use crate::{Error, Result};

/// Scalar diagnostics of a shooting run.
#[derive(Debug, Clone, Serialize)]
pub struct ShootReport {
    pub params: ModelParams,
    /// Midpoint amplitude a.
    pub a: f64,
    /// Sign tau = sgn(2S+1) relating f(0) and g(0).
    pub tau: i32,
    /// Leading constant of f: f(t) ~ ell e^{-(S+1/2)t} as t -> tau*inf.
    pub ell: f64,
    /// Leading constant of g on the opposite end.
    pub ell_prime: f64,
    /// lim e^{3(S+1/2)t} g(t) as t -> tau*inf (cubic correction).
    pub cubic_coeff: f64,
    /// The predicted value beta1 ell^3 / (4(S+1/2)).
    pub cubic_predicted: f64,
    /// |slope| of a log-linear fit to |f| on the decaying tail.
    pub decay_rate: f64,
    /// sup_t |g(t) - tau f(-t)| over the sampled trajectory.
    pub symmetry_residual: f64,
    /// Worse of the two one-sided energy drifts.
    pub energy_drift: f64,
}

/// Trajectories and diagnostics of a shooting run.
#[derive(Debug, Clone, Serialize)]
pub struct ShootResult {
    /// Trajectory on [0, horizon].
    pub forward: LogTrajectory,
    /// Trajectory on [-horizon, 0].
    pub backward: LogTrajectory,
    pub report: ShootReport,
}

/// Shoot from the midpoint with the given horizon and tolerance.
pub fn shoot(params: &ModelParams, horizon: f64, tol: f64) -> Result<ShootResult> {
    let (a, tau, kappa) = match params {
        ModelParams::Graphene2D { .. } => (
            params.shooting_amplitude().unwrap(),
            params.tau().unwrap(),
            params.linear_rate(),
        ),
        _ => return Err(Error::HalfIntegerWinding),
    };
    if !(horizon >= 4.0) {
        return Err(Error::EmptyInterval(horizon));
    }
    let opts = IntegrateOptions {
        samples_per_unit: 50,
        max_step: 0.025,
        project_energy: true,
    };
    // The homoclinic tails are sensitive: a local error committed near the
    // midpoint rides the unstable mode and reaches the far end magnified by
    // e^{|kappa| horizon}.  Integrate well below the requested tolerance so
    // the magnified contamination still sits under it.
    // (the dense-output interpolation keeps the measured drift near 1e-10,
    // so the tolerance is floored rather than tightened indefinitely)
    let tol_int = (tol * 1e-2).max(1e-12);
    let initial = LogState::new(0.0, a, tau as f64 * a);
    let forward = radial::integrate_with(params, initial, horizon, tol_int, opts)?;
    let backward = radial::integrate_with(params, initial, -horizon, tol_int, opts)?;

    // the tail toward t -> tau*inf carries the f-decay; the other end the
    // g-decay
    let (f_tail, g_tail) = if tau > 0 {
        (&forward, &backward)
    } else {
        (&backward, &forward)
    };

    let terminal = tail_amplitude(f_tail, tau > 0);
    if terminal > 0.1 * a {
        return Err(Error::NotDecayed(terminal));
    }

    let (ell, _) = windowed_limit(f_tail, tau > 0, |t, f, _| (kappa * t).exp() * f)?;
    let (ell_prime, _) = windowed_limit(g_tail, tau < 0, |t, _, g| (-kappa * t).exp() * g)?;
    let cubic_coeff = fit_cubic_coeff(f_tail, kappa, horizon, tol_int)?;
    let cubic_predicted = params_beta1(params) * ell.powi(3) / (4.0 * kappa);

    let decay_rate = fit_decay_rate(f_tail, tau > 0)?;
    let symmetry_residual = verify_reflection(&forward, &backward, tau);
    let energy_drift = forward.energy_drift.max(backward.energy_drift);

    Ok(ShootResult {
        report: ShootReport {
            params: *params,
            a,
            tau,
            ell,
            ell_prime,
            cubic_coeff,
            cubic_predicted,
            decay_rate,
            symmetry_residual,
            energy_drift,
        },
        forward,
        backward,
    })
}

fn params_beta1(params: &ModelParams) -> f64 {
    match *params {
        ModelParams::Graphene2D { beta1, .. } => beta1,
        _ => unreachable!(),
    }
}

fn tail_amplitude(traj: &LogTrajectory, at_end: bool) -> f64 {
    let i = if at_end { traj.len() - 1 } else { 0 };
    traj.fs[i].abs() + traj.gs[i].abs()
}

/// Average a weighted tail quantity over the last unit of t (first unit
/// for `at_end = false`); returns (mean, relative spread) and rejects
/// spreads above 1e-3.
fn windowed_limit<W>(traj: &LogTrajectory, at_end: bool, weight: W) -> Result<(f64, f64)>
where
    W: Fn(f64, f64, f64) -> f64,
{
    let edge = if at_end {
        traj.ts[traj.len() - 1]
    } else {
        traj.ts[0]
    };
    let in_window = |t: f64| (t - edge).abs() <= 1.0 + 1e-9;
    let vals: Vec<f64> = (0..traj.len())
        .filter(|&i| in_window(traj.ts[i]))
        .map(|i| weight(traj.ts[i], traj.fs[i], traj.gs[i]))
        .collect();
    if vals.len() < 20 {
        return Err(Error::TooFewSamples {
            got: vals.len(),
            need: 20,
        });
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let spread = if mean == 0.0 {
        hi - lo
    } else {
        (hi - lo) / mean.abs()
    };
    if spread > 1e-3 {
        return Err(Error::LimitNotConverged(spread));
    }
    Ok((mean, spread))
}

/// Extract c3 = lim e^{3 kappa t} g(t) (t -> tau*inf) by fitting
/// e^{3 kappa t} g(t) = c3 + c5 x + c7 x^2 with x = e^{-2|kappa|(|t| - w_lo)}
/// over a mid-range window |t| in [w_lo, w_hi].
///
/// The window sits where the asymptotic series has converged but the
/// unstable-mode contamination e^{|kappa| t} * tol has not yet grown into
/// the signal; extracting at the far horizon instead would read back the
/// magnified integration error.
fn fit_cubic_coeff(
    tail: &LogTrajectory,
    kappa: f64,
    horizon: f64,
    tol_int: f64,
) -> Result<f64> {
    let ak = kappa.abs();
    let w_hi = ((1e-5 / tol_int).ln() / (4.0 * ak)).clamp(1.5, horizon - 1.0);
    let w_lo = (w_hi - 1.5).max(0.5);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..tail.len() {
        let t = tail.ts[i];
        let at = t.abs();
        if at < w_lo || at > w_hi {
            continue;
        }
        xs.push((-2.0 * ak * (at - w_lo)).exp());
        ys.push((3.0 * kappa * t).exp() * tail.gs[i]);
    }
    if xs.len() < 10 {
        return Err(Error::TooFewSamples {
            got: xs.len(),
            need: 10,
        });
    }
    // normal equations for the quadratic model in x
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (x, y) in xs.iter().zip(&ys) {
        let p = [1.0, *x, x * x];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += p[r] * p[c];
            }
            b[r] += p[r] * y;
        }
    }
    let c = solve3(m, b).ok_or(Error::IllConditionedAngularSystem)?;
    // residual sanity check: the model must actually explain the data
    let mut rss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let fitv = c[0] + c[1] * x + c[2] * x * x;
        rss += (y - fitv) * (y - fitv);
    }
    let rms = (rss / xs.len() as f64).sqrt();
    if rms > 1e-2 * c[0].abs().max(1e-12) {
        return Err(Error::DecayFitFailed(rms));
    }
    Ok(c[0])
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let (head, tail) = m.split_at_mut(row);
            let fac = tail[0][col] / head[col][col];
            for (t, h) in tail[0].iter_mut().zip(&head[col]).skip(col) {
                *t -= fac * h;
            }
            b[row] -= fac * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

/// Least-squares slope magnitude of ln |f| over the outer third of the
/// trajectory.
fn fit_decay_rate(traj: &LogTrajectory, at_end: bool) -> Result<f64> {
    let m = traj.len();
    let range = if at_end { (2 * m / 3)..m } else { 0..(m / 3) };
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for i in range {
        let f = traj.fs[i].abs();
        if f <= 0.0 {
            return Err(Error::NonPositiveSample);
        }
        ts.push(traj.ts[i]);
        ys.push(f.ln());
    }
    if ts.len() < 3 {
        return Err(Error::TooFewSamples {
            got: ts.len(),
            need: 3,
        });
    }
    let nn = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / nn;
    let ym = ys.iter().sum::<f64>() / nn;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, y) in ts.iter().zip(&ys) {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    if den == 0.0 {
        return Err(Error::DecayFitFailed(f64::INFINITY));
    }
    Ok((num / den).abs())
}

/// sup_t |g(t) - tau f(-t)| over the aligned sample grids of a
/// forward/backward pair.
pub fn verify_reflection(forward: &LogTrajectory, backward: &LogTrajectory, tau: i32) -> f64 {
    let mut sup: f64 = 0.0;
    // both trajectories sample multiples of the same spacing, with the
    // backward arrays stored in increasing t
    let m = forward.len().min(backward.len());
    for i in 0..m {
        // forward index i holds t_i >= 0; the matching -t_i sits at the
        // mirrored index from the end of the backward trajectory
        let j = backward.len() - 1 - i;
        debug_assert!((forward.ts[i] + backward.ts[j]).abs() < 1e-9);
        sup = sup.max((forward.gs[i] - tau as f64 * backward.fs[j]).abs());
        sup = sup.max((backward.gs[j] - tau as f64 * forward.fs[i]).abs());
    }
    sup
}
