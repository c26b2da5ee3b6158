//! Logarithmic variables, right-hand sides and conserved energies of the
//! radial ODE systems, an adaptive embedded Runge--Kutta integrator, and
//! the closed-form rho(t) of the classification argument.
//!
//! With t = ln r and f = r^{(n-1)/2} u, g = r^{(n-1)/2} v (exponent 1/2
//! for the 2D models) the systems become autonomous with the saddle
//! structure f' = -kappa f + (nonlinear), g' = kappa g + (nonlinear).
//! The integrator steps in the compensated variables
//! F = e^{kappa s} f, G = e^{-kappa s} g, which cancels the linear terms
//! exactly and keeps homoclinic tails relatively accurate instead of
//! letting the unstable mode amplify local errors by e^{kappa T}.

use serde::Serialize;

use crate::model::ModelParams;
use crate::{Error, Result};

/// State in logarithmic variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogState {
    pub t: f64,
    pub f: f64,
    pub g: f64,
}

impl LogState {
    pub fn new(t: f64, f: f64, g: f64) -> Self {
        LogState { t, f, g }
    }
}

/// A sampled trajectory in logarithmic variables.
#[derive(Debug, Clone, Serialize)]
pub struct LogTrajectory {
    pub params: ModelParams,
    /// Strictly increasing sample times.
    pub ts: Vec<f64>,
    pub fs: Vec<f64>,
    pub gs: Vec<f64>,
    /// Conserved energy at each sample.
    pub energies: Vec<f64>,
    /// Integrator relative tolerance used.
    pub tol: f64,
    /// max_t |E(t) - E(t_first)| over the samples.
    pub energy_drift: f64,
}

impl LogTrajectory {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn state(&self, idx: usize) -> LogState {
        LogState::new(self.ts[idx], self.fs[idx], self.gs[idx])
    }

    /// Linear interpolation of (f, g) at time t (samples are dense).
    pub fn interpolate(&self, t: f64) -> Option<(f64, f64)> {
        let ts = &self.ts;
        if t < ts[0] || t > ts[ts.len() - 1] {
            return None;
        }
        let idx = match ts.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Some((self.fs[i], self.gs[i])),
            Err(i) => i,
        };
        let (t0, t1) = (ts[idx - 1], ts[idx]);
        let w = (t - t0) / (t1 - t0);
        Some((
            self.fs[idx - 1] * (1.0 - w) + self.fs[idx] * w,
            self.gs[idx - 1] * (1.0 - w) + self.gs[idx] * w,
        ))
    }
}

/// A sampled radial profile (r, u, v).
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub params: ModelParams,
    pub rs: Vec<f64>,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
}

/// Nonlinear part of the log-variable vector field: the full right-hand
/// side is f' = -kappa f + nf, g' = kappa g + ng.
fn nonlinear(params: &ModelParams, f: f64, g: f64) -> (f64, f64) {
    match *params {
        ModelParams::GroundState { n } => {
            let rho = f * f + g * g;
            let p = if rho == 0.0 {
                0.0
            } else {
                rho.powf(1.0 / (n - 1.0))
            };
            (g * p, -f * p)
        }
        ModelParams::Graphene2D { beta1, beta2, .. } => (
            g * (2.0 * beta2 * f * f + beta1 * g * g),
            -f * (beta1 * f * f + 2.0 * beta2 * g * g),
        ),
    }
}

/// Right-hand side (f', g') of the ground-state system in log variables.
pub fn rhs_ground(n: f64, state: &LogState) -> (f64, f64) {
    rhs(&ModelParams::GroundState { n }, state)
}

/// Right-hand side (f', g') of the graphene system (hs).
pub fn rhs_graphene(beta1: f64, beta2: f64, s: i32, state: &LogState) -> (f64, f64) {
    rhs(&ModelParams::Graphene2D { beta1, beta2, s }, state)
}

/// Right-hand side for either model.
pub fn rhs(params: &ModelParams, state: &LogState) -> (f64, f64) {
    let kappa = params.linear_rate();
    let (nf, ng) = nonlinear(params, state.f, state.g);
    (-kappa * state.f + nf, kappa * state.g + ng)
}

/// The conserved energy of the log-variable system.
pub fn energy(params: &ModelParams, state: &LogState) -> f64 {
    let (f, g) = (state.f, state.g);
    match *params {
        ModelParams::GroundState { n } => {
            let rho = f * f + g * g;
            let p = if rho == 0.0 { 0.0 } else { rho.powf(n / (n - 1.0)) };
            -f * g + p / n
        }
        ModelParams::Graphene2D { beta1, beta2, s } => {
            beta1 / 4.0 * (f.powi(4) + g.powi(4)) + beta2 * f * f * g * g
                - (s as f64 + 0.5) * f * g
        }
    }
}

/// Gradient of the conserved energy with respect to (f, g).
fn energy_gradient(params: &ModelParams, f: f64, g: f64) -> (f64, f64) {
    match *params {
        ModelParams::GroundState { n } => {
            let rho = f * f + g * g;
            let p = if rho == 0.0 {
                0.0
            } else {
                rho.powf(1.0 / (n - 1.0))
            };
            (
                -g + 2.0 * f * p / (n - 1.0),
                -f + 2.0 * g * p / (n - 1.0),
            )
        }
        ModelParams::Graphene2D { beta1, beta2, s } => {
            let kappa = s as f64 + 0.5;
            (
                beta1 * f.powi(3) + 2.0 * beta2 * f * g * g - kappa * g,
                beta1 * g.powi(3) + 2.0 * beta2 * f * f * g - kappa * f,
            )
        }
    }
}

/// Integration options beyond the defaults.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    /// Dense samples per unit of t (>= 10).
    pub samples_per_unit: usize,
    /// Cap on the raw step size.
    pub max_step: f64,
    /// Project each accepted step back onto the conserved-energy level
    /// set (on by default; see [`integrate_with`]).
    pub project_energy: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            samples_per_unit: 20,
            max_step: 0.025,
            project_energy: true,
        }
    }
}

/// Integrate from `initial` to t1 with relative tolerance `tol`
/// (absolute tolerance tol/100), sampling densely.
///
/// Backward integration (t1 < initial.t) negates the vector field and
/// keeps a single forward-stepping code path; samples are returned in
/// increasing t either way.
pub fn integrate(
    params: &ModelParams,
    initial: LogState,
    t1: f64,
    tol: f64,
) -> Result<LogTrajectory> {
    integrate_with(params, initial, t1, tol, IntegrateOptions::default())
}

pub fn integrate_with(
    params: &ModelParams,
    initial: LogState,
    t1: f64,
    tol: f64,
    opts: IntegrateOptions,
) -> Result<LogTrajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    if t1 == initial.t {
        return Err(Error::EmptyInterval(t1));
    }
    let dir = if t1 > initial.t { 1.0 } else { -1.0 };
    let span = (t1 - initial.t).abs();
    let kappa = params.linear_rate();
    let c = dir * kappa; // tilt rate in internal time s

    // tilted field: F' = dir e^{c s} nf(f, g), G' = dir e^{-c s} ng(f, g)
    let deriv = |s: f64, y: [f64; 2]| -> [f64; 2] {
        let ecs = (c * s).exp();
        let f = y[0] / ecs;
        let g = y[1] * ecs;
        let (nf, ng) = nonlinear(params, f, g);
        [dir * ecs * nf, dir * ng / ecs]
    };

    let atol = tol * 1e-2;
    let e0 = energy(params, &initial);

    // Project a state back onto the conserved-energy level set.  The
    // phase space is two-dimensional, so the level set through the orbit
    // is a curve and the projection removes exactly the transverse error
    // component -- the one that would otherwise ride the unstable mode
    // and grow like e^{kappa t}.  What survives is a bounded phase shift.
    let project = |f: &mut f64, g: &mut f64| {
        for _ in 0..2 {
            let e = energy(params, &LogState::new(0.0, *f, *g)) - e0;
            if e == 0.0 {
                return;
            }
            let (gf, gg) = energy_gradient(params, *f, *g);
            let denom = gf * gf + gg * gg;
            if denom < 1e-300 {
                return;
            }
            let (df, dg) = (e * gf / denom, e * gg / denom);
            // never apply corrections comparable to the state itself
            if df * df + dg * dg > 1e-2 * (*f * *f + *g * *g) {
                return;
            }
            *f -= df;
            *g -= dg;
        }
    };
    let n_samples = ((span * opts.samples_per_unit as f64).ceil() as usize).max(2);
    let ds = span / n_samples as f64;

    let mut sample_ts = Vec::with_capacity(n_samples + 1);
    let mut sample_fs = Vec::with_capacity(n_samples + 1);
    let mut sample_gs = Vec::with_capacity(n_samples + 1);
    let mut next_sample = 0usize;
    let mut emit = |s: f64, y: [f64; 2]| {
        let ecs = (c * s).exp();
        sample_ts.push(initial.t + dir * s);
        sample_fs.push(y[0] / ecs);
        sample_gs.push(y[1] * ecs);
    };

    let mut s = 0.0f64;
    let mut y = [initial.f, initial.g];
    let mut k1 = deriv(s, y);
    emit(s, y);
    next_sample += 1;

    let mut h = (opts.max_step).min(span).min(1e-3);
    let h_min = 1e-13 * span.max(1.0);

    while s < span {
        h = h.min(opts.max_step).min(span - s);
        let (y_new, ks, err) = dopri5_step(&deriv, s, y, h, k1);
        let sc0 = atol + tol * y[0].abs().max(y_new[0].abs());
        let sc1 = atol + tol * y[1].abs().max(y_new[1].abs());
        let err_norm = (((err[0] / sc0).powi(2) + (err[1] / sc1).powi(2)) / 2.0).sqrt();

        if err_norm <= 1.0 || h <= h_min {
            if h <= h_min && err_norm > 10.0 {
                let ecs = (c * s).exp();
                return Err(Error::StepUnderflow {
                    t: initial.t + dir * s,
                    amplitude: (y[0] / ecs).abs() + (y[1] * ecs).abs(),
                });
            }
            // dense output on [s, s+h]
            let s_new = s + h;
            while next_sample <= n_samples {
                let target = next_sample as f64 * ds;
                if target > s_new + 1e-12 * span {
                    break;
                }
                let theta = ((target - s) / h).clamp(0.0, 1.0);
                let yi = dense_eval(theta, h, y, y_new, &ks);
                emit(target.min(span), yi);
                next_sample += 1;
            }
            s = s_new;
            let ecs = (c * s).exp();
            let mut f = y_new[0] / ecs;
            let mut g = y_new[1] * ecs;
            let before = (f, g);
            if opts.project_energy {
                project(&mut f, &mut g);
            }
            if (f, g) == before {
                y = y_new;
                k1 = ks[6];
            } else {
                y = [f * ecs, g / ecs];
                k1 = deriv(s, y);
            }
        }
        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::StepUnderflow {
                t: initial.t + dir * s,
                amplitude: f64::INFINITY,
            });
        }
    }

    if dir < 0.0 {
        sample_ts.reverse();
        sample_fs.reverse();
        sample_gs.reverse();
    }

    let energies: Vec<f64> = sample_ts
        .iter()
        .zip(sample_fs.iter().zip(&sample_gs))
        .map(|(&t, (&f, &g))| energy(params, &LogState::new(t, f, g)))
        .collect();
    let e_ref = if dir < 0.0 {
        energies[energies.len() - 1]
    } else {
        energies[0]
    };
    let drift = energies
        .iter()
        .map(|e| (e - e_ref).abs())
        .fold(0.0, f64::max);
    let limit = 1e3 * tol;
    if drift > limit {
        return Err(Error::EnergyDrift { drift, limit });
    }

    Ok(LogTrajectory {
        params: *params,
        ts: sample_ts,
        fs: sample_fs,
        gs: sample_gs,
        energies,
        tol,
        energy_drift: drift,
    })
}

/// One Dormand--Prince 5(4) step; returns (y_new, all stages, error estimate).
fn dopri5_step<F: Fn(f64, [f64; 2]) -> [f64; 2]>(
    deriv: &F,
    s: f64,
    y: [f64; 2],
    h: f64,
    k1: [f64; 2],
) -> ([f64; 2], [[f64; 2]; 7], [f64; 2]) {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // b5 - b4
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];

    let mut k = [[0.0f64; 2]; 7];
    k[0] = k1;
    for i in 1..6 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i - 1][j];
            if a != 0.0 {
                yi[0] += h * a * kj[0];
                yi[1] += h * a * kj[1];
            }
        }
        k[i] = deriv(s + C[i] * h, yi);
    }
    // 5th-order solution uses row A[5] (= b5); FSAL stage evaluates there
    let mut y_new = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        let a = A[5][j];
        if a != 0.0 {
            y_new[0] += h * a * kj[0];
            y_new[1] += h * a * kj[1];
        }
    }
    k[6] = deriv(s + h, y_new);

    let mut err = [0.0f64; 2];
    for (j, kj) in k.iter().enumerate() {
        err[0] += h * E[j] * kj[0];
        err[1] += h * E[j] * kj[1];
    }
    (y_new, k, err)
}

/// The standard continuous extension of the Dormand--Prince pair,
/// evaluated at fraction theta of the step [s, s+h].
fn dense_eval(theta: f64, h: f64, y0: [f64; 2], y1: [f64; 2], k: &[[f64; 2]; 7]) -> [f64; 2] {
    const D: [f64; 7] = [
        -12715105075.0 / 11282082432.0,
        0.0,
        87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,
        701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,
        69997945.0 / 29380423.0,
    ];
    let mut out = [0.0f64; 2];
    for i in 0..2 {
        let ydiff = y1[i] - y0[i];
        let r1 = y0[i];
        let r2 = ydiff;
        let r3 = h * k[0][i] - ydiff;
        let r4 = ydiff - h * k[6][i] - r3;
        let mut r5 = 0.0;
        for (j, d) in D.iter().enumerate() {
            r5 += d * k[j][i];
        }
        r5 *= h;
        out[i] = r1 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
    }
    out
}

/// The closed-form rho(t) = (n/2)^{n-1} cosh^{-(n-1)}(t - t0).
pub fn rho_closed_form(n: f64, t0: f64, t: f64) -> f64 {
    (n / 2.0).powf(n - 1.0) * (t - t0).cosh().powf(-(n - 1.0))
}

/// The closed-form orbit in log variables:
/// f = sigma sqrt((1/2)(n/2)^{n-1}) e^{(t-t0)/2} cosh^{-n/2}(t-t0),
/// g likewise with e^{-(t-t0)/2}.
pub fn ground_log_closed_form(n: f64, t0: f64, sigma: f64, t: f64) -> (f64, f64) {
    let d = t - t0;
    let amp = (0.5 * (n / 2.0).powf(n - 1.0)).sqrt();
    let ch = d.cosh().powf(-n / 2.0);
    (
        sigma * amp * (d / 2.0).exp() * ch,
        sigma * amp * (-d / 2.0).exp() * ch,
    )
}

/// Verify (sigma(rho))' = 1 - sigma(rho)^2 with
/// sigma(a) = sqrt(1 - (4/n^2) a^{2/(n-1)}) along an E = 0 ground-state
/// trajectory by central finite differences; returns the max residual.
///
/// The identity holds with this sign on the rho-decreasing branch and
/// with the opposite sign on the other branch, so each sample scores the
/// smaller of the two sign choices.
pub fn sigma_ode_check(n: f64, trajectory: &LogTrajectory) -> Result<f64> {
    let e_max = trajectory
        .energies
        .iter()
        .map(|e| e.abs())
        .fold(0.0, f64::max);
    if e_max > 1e-8 {
        return Err(Error::NonzeroEnergy(e_max));
    }
    let rho_max = (n / 2.0).powf(n - 1.0);
    let sigma_of = |rho: f64| -> Result<f64> {
        if rho > rho_max * (1.0 + 1e-12) {
            return Err(Error::RhoOutOfRange { rho, max: rho_max });
        }
        let arg = (1.0 - (4.0 / (n * n)) * rho.powf(2.0 / (n - 1.0))).max(0.0);
        Ok(arg.sqrt())
    };
    let sigmas: Vec<f64> = trajectory
        .ts
        .iter()
        .enumerate()
        .map(|(i, _)| sigma_of(trajectory.fs[i].powi(2) + trajectory.gs[i].powi(2)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 1..sigmas.len() - 1 {
        let dt = trajectory.ts[i + 1] - trajectory.ts[i - 1];
        let ds = (sigmas[i + 1] - sigmas[i - 1]) / dt;
        let rhs_val = 1.0 - sigmas[i] * sigmas[i];
        let res = (ds - rhs_val).abs().min((ds + rhs_val).abs());
        worst = worst.max(res);
    }
    Ok(worst)
}

/// theta = arctan(g/f); undefined where f = 0.
pub fn theta(state: &LogState) -> Result<f64> {
    if state.f == 0.0 {
        return Err(Error::AngleUndefined);
    }
    Ok((state.g / state.f).atan())
}

/// theta' along the flow.
///
/// For the graphene system on the E = 0 level set this is the Step 2
/// display [-(beta1/2)(f^4+g^4) - 2 beta2 f^2 g^2]/(f^2+g^2), strictly
/// negative off the origin; for the ground-state model the general
/// quotient (g'f - f'g)/(f^2+g^2) is used.
pub fn theta_derivative(params: &ModelParams, state: &LogState) -> Result<f64> {
    let (f, g) = (state.f, state.g);
    let rho = f * f + g * g;
    if rho == 0.0 {
        return Err(Error::AngleUndefined);
    }
    match *params {
        ModelParams::Graphene2D { beta1, beta2, .. } => Ok(
            (-(beta1 / 2.0) * (f.powi(4) + g.powi(4)) - 2.0 * beta2 * f * f * g * g) / rho,
        ),
        ModelParams::GroundState { .. } => {
            let (df, dg) = rhs(params, state);
            Ok((dg * f - df * g) / rho)
        }
    }
}

/// Transform a log trajectory to the radial profile r = e^t,
/// u = r^{-(n-1)/2} f, v likewise.
pub fn to_profile(trajectory: &LogTrajectory) -> RadialProfile {
    let p = trajectory.params.profile_exponent();
    let rs: Vec<f64> = trajectory.ts.iter().map(|t| t.exp()).collect();
    let us: Vec<f64> = rs
        .iter()
        .zip(&trajectory.fs)
        .map(|(r, f)| r.powf(-p) * f)
        .collect();
    let vs: Vec<f64> = rs
        .iter()
        .zip(&trajectory.gs)
        .map(|(r, g)| r.powf(-p) * g)
        .collect();
    RadialProfile {
        params: trajectory.params,
        rs,
        us,
        vs,
    }
}

/// Inverse of [`to_profile`]; energies are recomputed, tolerance unknown.
pub fn from_profile(profile: &RadialProfile) -> LogTrajectory {
    let p = profile.params.profile_exponent();
    let ts: Vec<f64> = profile.rs.iter().map(|r| r.ln()).collect();
    let fs: Vec<f64> = profile
        .rs
        .iter()
        .zip(&profile.us)
        .map(|(r, u)| r.powf(p) * u)
        .collect();
    let gs: Vec<f64> = profile
        .rs
        .iter()
        .zip(&profile.vs)
        .map(|(r, v)| r.powf(p) * v)
        .collect();
    let energies: Vec<f64> = ts
        .iter()
        .zip(fs.iter().zip(&gs))
        .map(|(&t, (&f, &g))| energy(&profile.params, &LogState::new(t, f, g)))
        .collect();
    let drift = energies
        .iter()
        .map(|e| (e - energies[0]).abs())
        .fold(0.0, f64::max);
    LogTrajectory {
        params: profile.params,
        ts,
        fs,
        gs,
        energies,
        tol: f64::INFINITY,
        energy_drift: drift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(n: f64) -> ModelParams {
        ModelParams::GroundState { n }
    }

    fn graphene(b1: f64, b2: f64, s: i32) -> ModelParams {
        ModelParams::Graphene2D {
            beta1: b1,
            beta2: b2,
            s,
        }
    }

    #[test]
    fn origin_is_fixed_point() {
        let z = LogState::new(0.0, 0.0, 0.0);
        assert_eq!(rhs_ground(2.0, &z), (0.0, 0.0));
        assert_eq!(rhs_graphene(1.0, 0.5, 1, &z), (0.0, 0.0));
    }

    #[test]
    fn singular_fixed_point() {
        for &n in &[2.0f64, 2.5, 3.0, 4.0] {
            let w = (0.5 * ((n - 1.0) / 2.0).powf(n - 1.0)).sqrt();
            let (df, dg) = rhs_ground(n, &LogState::new(0.0, w, w));
            assert!(df.abs() < 1e-14, "n={n}");
            assert!(dg.abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn turning_point_symmetry() {
        // at the energy-zero turning point f = g, f' = -g'
        let n: f64 = 2.0;
        let w = (0.5 * (n / 2.0)).sqrt();
        let (df, dg) = rhs_ground(n, &LogState::new(0.0, w, w));
        assert!((df + dg).abs() < 1e-14);

        let p = graphene(2.0, 0.3, 1);
        let a = p.shooting_amplitude().unwrap();
        let (df, dg) = rhs(&p, &LogState::new(0.0, a, a));
        assert!((df + dg).abs() < 1e-12);
    }

    #[test]
    fn graphene_matches_ground_at_unit_couplings() {
        // beta1=1, beta2=1/2: same cubic terms as ground n=2
        let st = LogState::new(0.0, 0.3, -0.7);
        let (nf_g, ng_g) = nonlinear(&ground(2.0), st.f, st.g);
        let (nf_h, ng_h) = nonlinear(&graphene(1.0, 0.5, 3), st.f, st.g);
        assert!((nf_g - nf_h).abs() < 1e-15);
        assert!((ng_g - ng_h).abs() < 1e-15);
    }

    #[test]
    fn energy_values() {
        assert_eq!(energy(&ground(2.0), &LogState::new(0.0, 0.0, 0.0)), 0.0);
        let e = energy(&ground(2.0), &LogState::new(0.0, 0.5, 0.5));
        assert!((e + 0.125).abs() < 1e-15);

        let p = graphene(2.0, 0.3, 1);
        let a = p.shooting_amplitude().unwrap();
        assert!(energy(&p, &LogState::new(0.0, a, a)).abs() < 1e-14);
    }

    #[test]
    fn rho_closed_form_values() {
        for &n in &[2.0, 2.5, 3.0] {
            assert!((rho_closed_form(n, 0.3, 0.3) - (n / 2.0_f64).powf(n - 1.0)).abs() < 1e-15);
            assert!(rho_closed_form(n, 0.0, 40.0) < 1e-15);
        }
        assert!((rho_closed_form(2.0, 0.0, 1.0) - 1.0 / 1.0f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_orbit_satisfies_ode() {
        for &n in &[2.0, 2.5, 3.0] {
            for &t in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
                let h = 1e-6;
                let (fm, gm) = ground_log_closed_form(n, 0.0, 1.0, t - h);
                let (fp, gp) = ground_log_closed_form(n, 0.0, 1.0, t + h);
                let (f, g) = ground_log_closed_form(n, 0.0, 1.0, t);
                let (df, dg) = rhs_ground(n, &LogState::new(t, f, g));
                assert!(((fp - fm) / (2.0 * h) - df).abs() < 1e-8, "n={n} t={t}");
                assert!(((gp - gm) / (2.0 * h) - dg).abs() < 1e-8, "n={n} t={t}");
                // rho consistency
                assert!((f * f + g * g - rho_closed_form(n, 0.0, t)).abs() < 1e-14);
                // energy is zero on the orbit
                assert!(energy(&ground(n), &LogState::new(t, f, g)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn integrate_zero_data_stays_zero() {
        let traj = integrate(&ground(2.0), LogState::new(0.0, 0.0, 0.0), 5.0, 1e-10).unwrap();
        assert!(traj.fs.iter().all(|&f| f == 0.0));
        assert!(traj.gs.iter().all(|&g| g == 0.0));
        assert_eq!(traj.energy_drift, 0.0);
    }

    #[test]
    fn integrate_matches_closed_form_forward_and_backward() {
        for &n in &[2.0, 2.5, 3.0] {
            let t0 = 0.0;
            let (f0, g0) = ground_log_closed_form(n, t0, 1.0, t0);
            for &t1 in &[12.0, -12.0] {
                let traj =
                    integrate(&ground(n), LogState::new(t0, f0, g0), t1, 1e-10).unwrap();
                // compare rho = f^2 + g^2: pointwise f, g at the far end
                // are intrinsically contaminated by the unstable mode,
                // while rho stays conditioned along the whole orbit
                let mut sup_rho: f64 = 0.0;
                let mut sup_fg_mid: f64 = 0.0;
                for i in 0..traj.len() {
                    let t = traj.ts[i];
                    let (fc, gc) = ground_log_closed_form(n, t0, 1.0, t);
                    let rho = traj.fs[i].powi(2) + traj.gs[i].powi(2);
                    sup_rho = sup_rho.max((rho - rho_closed_form(n, t0, t)).abs());
                    if t.abs() <= 6.0 {
                        sup_fg_mid = sup_fg_mid
                            .max((traj.fs[i] - fc).abs())
                            .max((traj.gs[i] - gc).abs());
                    }
                }
                assert!(sup_rho < 1e-8, "n={n} t1={t1} sup_rho={sup_rho:e}");
                assert!(sup_fg_mid < 1e-8, "n={n} t1={t1} sup={sup_fg_mid:e}");
                assert!(traj.energy_drift < 1e-7);
            }
        }
    }

    #[test]
    fn integrate_dense_sampling_and_ordering() {
        let traj = integrate(&ground(2.0), LogState::new(1.0, 0.1, 0.1), -2.0, 1e-10).unwrap();
        assert!(traj.len() >= 30); // >= 10 per unit over 3 units
        for w in traj.ts.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!((traj.ts[0] - (-2.0)).abs() < 1e-12);
        assert!((traj.ts[traj.len() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_bad_args() {
        assert!(integrate(&ground(2.0), LogState::new(0.0, 0.1, 0.1), 0.0, 1e-10).is_err());
        assert!(integrate(&ground(2.0), LogState::new(0.0, 0.1, 0.1), 1.0, -1.0).is_err());
    }

    #[test]
    fn integrate_rejects_untrusted_drift() {
        // the coercive energy keeps every orbit bounded, but without the
        // level-set projection a fast high-energy orbit accumulates
        // visible drift and must be rejected rather than returned
        let opts = IntegrateOptions {
            project_energy: false,
            ..IntegrateOptions::default()
        };
        let res = integrate_with(
            &ground(2.0),
            LogState::new(0.0, 3.0, 3.0),
            10.0,
            1e-12,
            opts,
        );
        match res {
            Err(Error::EnergyDrift { drift, limit }) => assert!(drift > limit),
            other => panic!("expected drift rejection, got {other:?}"),
        }
    }

    #[test]
    fn sigma_check_on_closed_form() {
        let n = 2.0;
        let (f0, g0) = ground_log_closed_form(n, 0.0, 1.0, 0.0);
        let traj = integrate(&ground(n), LogState::new(0.0, f0, g0), 8.0, 1e-10).unwrap();
        let res = sigma_ode_check(n, &traj).unwrap();
        // sampling-step finite-difference floor: O(ds^2) with ds = 0.05
        assert!(res < 5e-3, "residual {res:e}");
    }

    #[test]
    fn sigma_check_zero_trajectory() {
        let traj = integrate(&ground(2.0), LogState::new(0.0, 0.0, 0.0), 3.0, 1e-10).unwrap();
        assert_eq!(sigma_ode_check(2.0, &traj).unwrap(), 0.0);
    }

    #[test]
    fn sigma_check_rejects_constant_nonzero_energy_orbit() {
        // the singular fixed point has E != 0 and must be rejected
        let n = 3.0;
        let w = (0.5 * ((n - 1.0) / 2.0f64).powf(n - 1.0)).sqrt();
        let traj = integrate(&ground(n), LogState::new(0.0, w, w), 2.0, 1e-10).unwrap();
        assert!(matches!(sigma_ode_check(n, &traj), Err(Error::NonzeroEnergy(_))));
    }

    #[test]
    fn theta_values() {
        assert!((theta(&LogState::new(0.0, 1.0, 1.0)).unwrap()
            - std::f64::consts::FRAC_PI_4)
            .abs()
            < 1e-15);
        assert!(theta(&LogState::new(0.0, 0.0, 1.0)).is_err());
        let d = theta_derivative(&graphene(1.0, 0.5, 1), &LogState::new(0.0, 1.0, 1.0)).unwrap();
        assert!((d + 1.0).abs() < 1e-15);
    }

    #[test]
    fn theta_derivative_matches_quotient_on_zero_energy_set() {
        let p = graphene(2.0, 0.3, 1);
        let a = p.shooting_amplitude().unwrap();
        let st = LogState::new(0.0, a, a);
        let (df, dg) = rhs(&p, &st);
        let general = (dg * st.f - df * st.g) / (st.f * st.f + st.g * st.g);
        let step2 = theta_derivative(&p, &st).unwrap();
        assert!((general - step2).abs() < 1e-13);
    }

    #[test]
    fn profile_round_trip() {
        let traj = integrate(
            &graphene(1.0, 0.5, 1),
            LogState::new(0.0, 1.0, 1.0),
            -3.0,
            1e-10,
        )
        .unwrap();
        let back = from_profile(&to_profile(&traj));
        for i in 0..traj.len() {
            assert!((back.ts[i] - traj.ts[i]).abs() < 1e-13);
            assert!((back.fs[i] - traj.fs[i]).abs() < 1e-13);
            assert!((back.gs[i] - traj.gs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn profile_matches_closed_form_in_r_variables() {
        let n = 2.0;
        let (f0, g0) = ground_log_closed_form(n, 0.0, 1.0, 0.0);
        let traj = integrate(&ground(n), LogState::new(0.0, f0, g0), 3.0, 1e-10).unwrap();
        let prof = to_profile(&traj);
        let pair = crate::closed_form::ground_state_radial(n, 1.0, 1).unwrap();
        for i in 0..prof.rs.len() {
            let (u, v) = pair.eval(prof.rs[i]).unwrap();
            assert!((prof.us[i] - u).abs() < 1e-8);
            assert!((prof.vs[i] - v).abs() < 1e-8);
        }
    }
}
