//! Every explicit solution and nonlinearity of the critical equations:
//! the ground-state bubble, the 2D excited states, the singular solution
//! and the matrix nonlinearities h.

use ndarray::Array2;
use num_complex::Complex64;

use crate::clifford::{norm, CliffordRep};
use crate::model::ModelParams;
use crate::{sphere_surface, Error, Result};

type CMat = Array2<Complex64>;

/// A radial solution pair (u, v), evaluated pointwise for r > 0.
#[derive(Debug, Clone, Copy)]
pub struct RadialPair {
    kind: RadialKind,
    lambda: f64,
    sigma: f64,
}

#[derive(Debug, Clone, Copy)]
enum RadialKind {
    Ground { n: f64 },
    Excited { s: i32 },
    Singular { n: f64 },
}

impl RadialPair {
    pub fn params(&self) -> ModelParams {
        match self.kind {
            RadialKind::Ground { n } | RadialKind::Singular { n } => {
                ModelParams::GroundState { n }
            }
            RadialKind::Excited { s } => ModelParams::Graphene2D {
                beta1: 1.0,
                beta2: 0.5,
                s,
            },
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// tau = sigma * sgn(2S+1) for excited pairs, sigma otherwise.
    pub fn tau(&self) -> f64 {
        match self.kind {
            RadialKind::Excited { s } if 2 * s + 1 < 0 => -self.sigma,
            _ => self.sigma,
        }
    }

    /// Evaluate (u(r), v(r)).
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if r < 0.0 {
            return Err(Error::ZeroPoint);
        }
        let lam = self.lambda;
        match self.kind {
            RadialKind::Ground { n } => {
                let scale = self.sigma * lam.powf(-(n - 1.0) / 2.0);
                let (u, v) = ground_scalar(n, r / lam);
                Ok((scale * u, scale * v))
            }
            RadialKind::Excited { s } => {
                if r == 0.0 && s != 0 {
                    return Err(Error::OriginUndefined(s));
                }
                let scale = lam.powf(-0.5);
                let (bu, bv) = excited_scalar(s, r / lam);
                Ok((self.sigma * scale * bu, self.tau() * scale * bv))
            }
            RadialKind::Singular { n } => {
                if r == 0.0 {
                    return Err(Error::ZeroPoint);
                }
                let c = (0.5 * ((n - 1.0) / 2.0).powf(n - 1.0)).sqrt();
                let w = self.sigma * c * r.powf(-(n - 1.0) / 2.0);
                Ok((w, w))
            }
        }
    }

    pub fn u(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.0)
    }

    pub fn v(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.1)
    }
}

/// U(r) = n^{(n-1)/2} (1+r^2)^{-n/2} r, V(r) likewise without the r.
fn ground_scalar(n: f64, r: f64) -> (f64, f64) {
    let amp = n.powf((n - 1.0) / 2.0) * (1.0 + r * r).powf(-n / 2.0);
    (amp * r, amp)
}

/// The lambda = 1 excited profile
/// U(r) = sqrt(2|2S+1|) r^S / (r^{2S+1} + r^{-(2S+1)}) and
/// V(r) = sqrt(2|2S+1|) r^{-S-1} / (r^{2S+1} + r^{-(2S+1)}),
/// evaluated through exponentials of t = ln r so that large |S| and
/// r far from 1 neither overflow nor underflow prematurely.
fn excited_scalar(s: i32, r: f64) -> (f64, f64) {
    let k = (2 * s + 1) as f64;
    let t = r.ln();
    let amp = (2.0 * k.abs()).sqrt();
    let kt_abs = (k * t).abs();
    // e^{p t} / (e^{kt} + e^{-kt}) = e^{p t - |kt|} / (1 + e^{-2|kt|})
    let denom = 1.0 + (-2.0 * kt_abs).exp();
    let u = amp * (s as f64 * t - kt_abs).exp() / denom;
    let v = amp * (-(s as f64 + 1.0) * t - kt_abs).exp() / denom;
    (u, v)
}

/// The ground-state bubble in radial form:
/// (u, v) = sigma lambda^{-(n-1)/2} (U(./lambda), V(./lambda)).
pub fn ground_state_radial(n: f64, lambda: f64, sigma: i32) -> Result<RadialPair> {
    if !(n > 1.0) || !n.is_finite() {
        return Err(Error::InvalidRealDimension(n));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    Ok(RadialPair {
        kind: RadialKind::Ground { n },
        lambda,
        sigma: sigma.signum() as f64,
    })
}

/// The explicit 2D excited state for beta1 = 1, beta2 = 1/2 and winding S.
///
/// tau = sigma when 2S+1 > 0 and tau = -sigma otherwise.
pub fn excited_explicit(s: i32, lambda: f64, sigma: i32) -> Result<RadialPair> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    Ok(RadialPair {
        kind: RadialKind::Excited { s },
        lambda,
        sigma: sigma.signum() as f64,
    })
}

/// The singular solution u = v = sqrt((1/2)((n-1)/2)^{n-1}) r^{-(n-1)/2}.
pub fn singular_solution(n: f64) -> Result<RadialPair> {
    if !(n > 1.0) || !n.is_finite() {
        return Err(Error::InvalidRealDimension(n));
    }
    Ok(RadialPair {
        kind: RadialKind::Singular { n },
        lambda: 1.0,
        sigma: 1.0,
    })
}

/// The ground-state bubble as a spinor field on R^n:
/// psi(x) = lambda^{-(n-1)/2} (V(r/lambda) nvec, i U(r/lambda) B(x/r) nvec).
///
/// nvec must be a unit vector in C^{N/2} (tolerance 1e-12).
pub fn ground_state_spinor(
    rep: &CliffordRep,
    lambda: f64,
    nvec: &[Complex64],
    x: &[f64],
) -> Result<Vec<Complex64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    let half = rep.spinor_dim() / 2;
    let nrm = nvec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitSpinor(nrm));
    }
    let n = rep.n() as f64;
    let r = norm(x);
    let scale = lambda.powf(-(n - 1.0) / 2.0);
    let (u, v) = ground_scalar(n, r / lambda);
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * half];
    for (k, nk) in nvec.iter().enumerate() {
        out[k] = scale * v * nk;
    }
    if r > 0.0 {
        let unit: Vec<f64> = x.iter().map(|c| c / r).collect();
        let b = rep.block_symbol(&unit);
        for row in 0..half {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, nk) in nvec.iter().enumerate() {
                acc += b[(row, col)] * nk;
            }
            out[half + row] = Complex64::new(0.0, scale * u) * acc;
        }
    }
    Ok(out)
}

/// The excited-state ansatz as a 2-spinor on R^2:
/// psi = (v(r) e^{iS theta}, i u(r) e^{i(S+1) theta}).
pub fn excited_spinor(pair: &RadialPair, x: &[f64; 2]) -> Result<Vec<Complex64>> {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let (u, v) = pair.eval(r)?;
    let theta = x[1].atan2(x[0]);
    let s = match pair.kind {
        RadialKind::Excited { s } => s as f64,
        _ => 0.0,
    };
    Ok(vec![
        Complex64::from_polar(v, s * theta),
        Complex64::new(0.0, 1.0) * Complex64::from_polar(u, (s + 1.0) * theta),
    ])
}

/// Selector for the matrix nonlinearity h.
#[derive(Debug, Clone, Copy)]
pub enum Nonlinearity {
    /// h(z) = |z|^{2/(n-1)} I_N, the plain critical power.
    Critical,
    /// The 2D graphene nonlinearity diag(b1|z1|^2 + 2 b2|z2|^2, ...).
    Graphene2D { beta1: f64, beta2: f64 },
}

impl Nonlinearity {
    pub fn from_params(params: &ModelParams) -> Self {
        match *params {
            ModelParams::GroundState { .. } => Nonlinearity::Critical,
            ModelParams::Graphene2D { beta1, beta2, .. } => {
                Nonlinearity::Graphene2D { beta1, beta2 }
            }
        }
    }
}

/// The matrix nonlinearity h(z) for spinor dimension N and spatial n.
pub fn nonlinearity_h(nl: Nonlinearity, n: f64, z: &[Complex64]) -> CMat {
    let dim = z.len();
    match nl {
        Nonlinearity::Critical => {
            let mag = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let p = if mag == 0.0 {
                0.0
            } else {
                mag.powf(2.0 / (n - 1.0))
            };
            CMat::from_diag_elem(dim, Complex64::new(p, 0.0))
        }
        Nonlinearity::Graphene2D { beta1, beta2 } => {
            debug_assert_eq!(dim, 2);
            let (a, b) = (z[0].norm_sqr(), z[1].norm_sqr());
            let mut m = CMat::from_elem((dim, dim), Complex64::new(0.0, 0.0));
            m[(0, 0)] = Complex64::new(beta1 * a + 2.0 * beta2 * b, 0.0);
            m[(1, 1)] = Complex64::new(beta1 * b + 2.0 * beta2 * a, 0.0);
            m
        }
    }
}

/// Residual of the radial (or, for excited pairs, logarithmic) system at
/// r > 0, using analytic derivatives of the closed form; limited only by
/// rounding, so exact solutions score near machine precision.
pub fn radial_residual(pair: &RadialPair, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::ZeroPoint);
    }
    let lam = pair.lambda;
    match pair.kind {
        RadialKind::Ground { n } => {
            // u = s v with v = sigma lam^{-(n-1)/2} A (1+s^2)^{-n/2}, s = r/lam
            let s = r / lam;
            let w = 1.0 + s * s;
            let (u, v) = pair.eval(r)?;
            let du = v * (1.0 - n * s * s / w) / lam;
            let dv = -n * s * v / (w * lam);
            let p = (u * u + v * v).powf(1.0 / (n - 1.0));
            let r1 = du + (n - 1.0) / r * u - v * p;
            let r2 = dv + u * p;
            Ok(r1.abs().max(r2.abs()))
        }
        RadialKind::Singular { n } => {
            let (u, v) = pair.eval(r)?;
            let kappa = (n - 1.0) / 2.0;
            let du = -kappa * u / r;
            let dv = -kappa * v / r;
            let p = (u * u + v * v).powf(1.0 / (n - 1.0));
            let r1 = du + (n - 1.0) / r * u - v * p;
            let r2 = dv + u * p;
            Ok(r1.abs().max(r2.abs()))
        }
        RadialKind::Excited { s } => {
            // logarithmic variables f = r^{1/2} u, g = r^{1/2} v with
            // t = ln(r/lam): f = sigma sqrt(2|k|) e^{kappa t}/(e^{kt}+e^{-kt}),
            // so f' = f (kappa - k tanh kt), g' = g (-kappa - k tanh kt)
            let t = (r / lam).ln();
            let k = (2 * s + 1) as f64;
            let kappa = s as f64 + 0.5;
            let (u, v) = pair.eval(r)?;
            let f = r.sqrt() * u;
            let g = r.sqrt() * v;
            let th = (k * t).tanh();
            let df = f * (kappa - k * th);
            let dg = g * (-kappa - k * th);
            // beta1 = 1, beta2 = 1/2: both nonlinear terms reduce to f^2+g^2
            let rho = f * f + g * g;
            let r1 = df - (-kappa * f + g * rho);
            let r2 = dg - (kappa * g - f * rho);
            Ok(r1.abs().max(r2.abs()))
        }
    }
}

/// The least-energy action value (1/(2n)) (n/2)^n |S^n|.
pub fn action_value(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    Ok((1.0 / (2.0 * nf)) * (nf / 2.0).powi(n as i32) * sphere_surface(n + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_rep;
    use std::f64::consts::PI;

    #[test]
    fn ground_state_values_n2() {
        let pair = ground_state_radial(2.0, 1.0, 1).unwrap();
        let (u, v) = pair.eval(1.0).unwrap();
        assert!((u - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let (u0, v0) = pair.eval(0.0).unwrap();
        assert_eq!(u0, 0.0);
        assert!((v0 - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ground_state_scaling_covariance() {
        let scaled = ground_state_radial(3.0, 2.0, 1).unwrap();
        let unit = ground_state_radial(3.0, 1.0, 1).unwrap();
        let (us, vs) = scaled.eval(2.0).unwrap();
        let (u1, v1) = unit.eval(1.0).unwrap();
        assert!((us - u1 / 2.0).abs() < 1e-14);
        assert!((vs - v1 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_rejects_bad_params() {
        assert!(ground_state_radial(1.0, 1.0, 1).is_err());
        assert!(ground_state_radial(2.0, 0.0, 1).is_err());
    }

    #[test]
    fn excited_midpoint_value() {
        // S=1: U(1) = sqrt(6)/2, the shooting amplitude for beta1=1, beta2=1/2
        let pair = excited_explicit(1, 1.0, 1).unwrap();
        let (u, v) = pair.eval(1.0).unwrap();
        assert!((u - 6.0f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((v - 6.0f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn excited_s0_is_ground_n2() {
        let e = excited_explicit(0, 1.0, 1).unwrap();
        let g = ground_state_radial(2.0, 1.0, 1).unwrap();
        for &r in &[0.1, 0.5, 1.0, 3.0, 20.0] {
            let (ue, ve) = e.eval(r).unwrap();
            let (ug, vg) = g.eval(r).unwrap();
            assert!((ue - ug).abs() < 1e-14, "r = {r}");
            assert!((ve - vg).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn excited_large_r_asymptote() {
        // S=1: r^2 U(r) -> sqrt(6); at r = 100 within 1e-12 relative
        let pair = excited_explicit(1, 1.0, 1).unwrap();
        let (u, _) = pair.eval(100.0).unwrap();
        let want = 6.0f64.sqrt() / (1.0 + 1e-12);
        assert!((1e4 * u - want).abs() < 1e-8);
    }

    #[test]
    fn excited_no_overflow_far_from_one() {
        let pair = excited_explicit(5, 1.0, 1).unwrap();
        let (u, v) = pair.eval(1e3).unwrap();
        assert!(u.is_finite() && v.is_finite());
        assert!(u > 0.0);
        let (u2, v2) = pair.eval(1e-3).unwrap();
        assert!(u2.is_finite() && v2.is_finite());
    }

    #[test]
    fn excited_origin_rejected_for_nonzero_s() {
        let pair = excited_explicit(-2, 1.0, 1).unwrap();
        assert!(pair.eval(0.0).is_err());
        let pair0 = excited_explicit(0, 1.0, 1).unwrap();
        assert!(pair0.eval(0.0).is_ok());
    }

    #[test]
    fn excited_tau_sign() {
        assert_eq!(excited_explicit(1, 1.0, 1).unwrap().tau(), 1.0);
        assert_eq!(excited_explicit(-2, 1.0, 1).unwrap().tau(), -1.0);
    }

    #[test]
    fn singular_solution_values() {
        let s2 = singular_solution(2.0).unwrap();
        let (u, v) = s2.eval(1.0).unwrap();
        assert!((u - 0.5).abs() < 1e-15);
        assert!((v - 0.5).abs() < 1e-15);
        let (u4, _) = s2.eval(4.0).unwrap();
        assert!((u4 - 0.25).abs() < 1e-15); // 1/(2 sqrt r)
        let s3 = singular_solution(3.0).unwrap();
        let (u3, v3) = s3.eval(1.0).unwrap();
        assert!((u3 - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(u3, v3);
    }

    #[test]
    fn singular_solution_satisfies_radial_system() {
        for &n in &[2.0, 3.0, 4.0] {
            let pair = singular_solution(n).unwrap();
            for &r in &[0.1, 1.0, 10.0] {
                let res = radial_residual(&pair, r).unwrap();
                assert!(res < 1e-12, "n={n} r={r} res={res:e}");
            }
        }
    }

    #[test]
    fn spinor_modulus_matches_formula() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let half = rep.spinor_dim() / 2;
            let mut nvec = vec![Complex64::new(0.0, 0.0); half];
            nvec[0] = Complex64::new(0.6, 0.8);
            let lambda = 1.3;
            for &x0 in &[0.0, 0.7, 2.0, 31.0] {
                let mut x = vec![0.4; n as usize];
                x[0] = x0;
                let psi = ground_state_spinor(&rep, lambda, &nvec, &x).unwrap();
                let modulus = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let r = norm(&x);
                let nf = n as f64;
                let want = lambda.powf(-(nf - 1.0) / 2.0)
                    * nf.powf((nf - 1.0) / 2.0)
                    * (1.0 + (r / lambda).powi(2)).powf(-(nf - 1.0) / 2.0);
                assert!((modulus - want).abs() < 1e-14, "n={n} x0={x0}");
            }
        }
    }

    #[test]
    fn spinor_far_field_decay_n3() {
        let rep = build_rep(3).unwrap();
        let nvec = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = [1e3, 0.0, 0.0];
        let psi = ground_state_spinor(&rep, 1.0, &nvec, &x).unwrap();
        let modulus = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((1e6 * modulus - 3.0).abs() < 3e-6);
    }

    #[test]
    fn spinor_rejects_non_unit_direction() {
        let rep = build_rep(2).unwrap();
        let nvec = vec![Complex64::new(0.5, 0.0)];
        assert!(ground_state_spinor(&rep, 1.0, &nvec, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn nonlinearity_values() {
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let h = nonlinearity_h(Nonlinearity::Critical, 2.0, &z);
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((h[(1, 1)].re - 1.0).abs() < 1e-15);

        // beta1=1, beta2=1/2 at z=(1,1) reduces to |z|^2 I
        let z11 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let h2 = nonlinearity_h(
            Nonlinearity::Graphene2D { beta1: 1.0, beta2: 0.5 },
            2.0,
            &z11,
        );
        assert!((h2[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((h2[(1, 1)].re - 2.0).abs() < 1e-15);

        let z3 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)];
        let h3 = nonlinearity_h(
            Nonlinearity::Graphene2D { beta1: 2.0, beta2: 0.3 },
            2.0,
            &z3,
        );
        assert!((h3[(0, 0)].re - 4.4).abs() < 1e-14);
        assert!((h3[(1, 1)].re - 8.6).abs() < 1e-14);

        // z = 0 allowed
        let h0 = nonlinearity_h(Nonlinearity::Critical, 3.0, &[Complex64::default(); 4]);
        assert_eq!(h0[(0, 0)].re, 0.0);
    }

    #[test]
    fn analytic_residuals_at_machine_precision() {
        let rs: Vec<f64> = (0..200)
            .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0))
            .collect();
        for &n in &[2.0, 2.5, 3.0, 4.0] {
            let pair = ground_state_radial(n, 1.0, 1).unwrap();
            for &r in &rs {
                let res = radial_residual(&pair, r).unwrap();
                assert!(res <= 1e-12, "ground n={n} r={r} res={res:e}");
            }
            let sing = singular_solution(n).unwrap();
            for &r in &rs {
                let res = radial_residual(&sing, r).unwrap();
                // individual terms grow like u/r toward the origin, so
                // rounding is measured relative to that scale
                let scale = (sing.u(r).unwrap().abs() / r).max(1.0);
                assert!(res <= 1e-12 * scale, "singular n={n} r={r} res={res:e}");
            }
        }
        for &s in &[-3, -2, 0, 1, 2] {
            let pair = excited_explicit(s, 1.0, 1).unwrap();
            for &r in &rs {
                let res = radial_residual(&pair, r).unwrap();
                assert!(res <= 1e-12, "excited S={s} r={r} res={res:e}");
            }
        }
        // scaling covariance: residual stays at rounding level for lam != 1
        let pair = ground_state_radial(3.0, 0.7, -1).unwrap();
        assert!(radial_residual(&pair, 2.0).unwrap() <= 1e-12);
        let pair = excited_explicit(-2, 1.4, 1).unwrap();
        assert!(radial_residual(&pair, 0.3).unwrap() <= 1e-12);
        assert!(radial_residual(&pair, 0.0).is_err());
    }

    #[test]
    fn action_values() {
        assert!((action_value(2).unwrap() - PI).abs() < 1e-13);
        assert!((action_value(3).unwrap() - 9.0 / 8.0 * PI * PI).abs() < 1e-12);
        // monotone increasing over 2..8
        let vals: Vec<f64> = (2..=8).map(|n| action_value(n).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
