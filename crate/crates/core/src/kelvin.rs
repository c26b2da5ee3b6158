//! The spinor Kelvin transform, the Dirac Green's function, and
//! quadrature verification of the inversion and convolution identities.
//!
//! The Green kernel is weak-L^{n/(n-1)}, so naive grid quadrature of the
//! convolution diverges logarithmically under refinement; all integrals
//! here use polar decompositions in which the singularity is exactly
//! cancelled by the surface measure.

use num_complex::Complex64;

use crate::clifford::{inversion_matrix, CliffordRep};
use crate::closed_form::{nonlinearity_h, Nonlinearity};
use crate::numeric::gauss_legendre;
use crate::{sphere_surface, Error, Result};

type CMat = ndarray::Array2<Complex64>;

/// Boxed closure evaluating a spinor at a point.
type SpinorClosure<'a> = Box<dyn Fn(&[f64]) -> Result<Vec<Complex64>> + 'a>;

/// A pointwise spinor function on R^n minus the origin.
pub struct PointSpinorFn<'a> {
    rep: CliffordRep,
    /// Whether finite differencing the function is meaningful.
    smooth: bool,
    f: SpinorClosure<'a>,
}

impl<'a> PointSpinorFn<'a> {
    pub fn new<F>(rep: CliffordRep, smooth: bool, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<Complex64>> + 'a,
    {
        PointSpinorFn {
            rep,
            smooth,
            f: Box::new(f),
        }
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    pub fn smooth(&self) -> bool {
        self.smooth
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        (self.f)(x)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// The Kelvin transform psi_K(x) = |x|^{-(n-1)} U(x) psi(x/|x|^2).
pub fn kelvin<'a>(psi: &'a PointSpinorFn<'a>) -> PointSpinorFn<'a> {
    let rep = psi.rep.clone();
    let n = rep.n() as f64;
    PointSpinorFn::new(psi.rep.clone(), psi.smooth, move |x: &[f64]| {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::ZeroPoint);
        }
        let inv: Vec<f64> = x.iter().map(|c| c / (r * r)).collect();
        let z = psi.eval(&inv)?;
        let u = inversion_matrix(&rep, x)?;
        let scale = r.powf(-(n - 1.0));
        let dim = z.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (row, o) in out.iter_mut().enumerate() {
            for (col, zc) in z.iter().enumerate() {
                *o += u[(row, col)] * *zc;
            }
            *o *= scale;
        }
        Ok(out)
    })
}

/// The Dirac operator at a point by 4th-order central differences with
/// relative step h|x| per axis.
pub fn dirac_at(psi: &PointSpinorFn, x: &[f64], h: f64) -> Result<Vec<Complex64>> {
    let rep = &psi.rep;
    let n = rep.n() as usize;
    let nsp = rep.spinor_dim();
    let step = h * norm(x).max(1e-3);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = vec![Complex64::new(0.0, 0.0); nsp];
    let mut xs = x.to_vec();
    for j in 0..n {
        let mut df = vec![Complex64::new(0.0, 0.0); nsp];
        for (offset, coef) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
            xs[j] = x[j] + offset * step;
            let z = psi.eval(&xs)?;
            for (d, zc) in df.iter_mut().zip(&z) {
                *d += coef * zc;
            }
        }
        xs[j] = x[j];
        let scale = 1.0 / (12.0 * step);
        let alpha = &rep.alphas()[j];
        for row in 0..nsp {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, d) in df.iter().enumerate() {
                acc += alpha[(row, col)] * *d;
            }
            out[row] += minus_i * scale * acc;
        }
    }
    Ok(out)
}

/// Max residual of D psi_K = |x|^{-2} (D psi)_K over the given points,
/// both sides by finite differences with relative step h.
pub fn verify_dkelvin(psi: &PointSpinorFn, points: &[Vec<f64>], h: f64) -> Result<f64> {
    if !psi.smooth {
        return Err(Error::NonFiniteField);
    }
    let n = psi.rep.n() as f64;
    let psi_k = kelvin(psi);
    let mut worst: f64 = 0.0;
    for x in points {
        let r = norm(x);
        if r < 0.1 {
            return Err(Error::ZeroPoint);
        }
        let lhs = dirac_at(&psi_k, x, h)?;
        // (D psi)_K (x) = |x|^{-(n-1)} U(x) (D psi)(x/|x|^2)
        let inv: Vec<f64> = x.iter().map(|c| c / (r * r)).collect();
        let dpsi = dirac_at(psi, &inv, h)?;
        let u = inversion_matrix(&psi.rep, x)?;
        let scale = r.powf(-(n - 1.0)) / (r * r);
        let mut res = 0.0;
        for (row, l) in lhs.iter().enumerate() {
            let mut rhs = Complex64::new(0.0, 0.0);
            for (col, d) in dpsi.iter().enumerate() {
                rhs += u[(row, col)] * *d;
            }
            res += (l - scale * rhs).norm_sqr();
        }
        worst = worst.max(res.sqrt());
    }
    Ok(worst)
}

/// Angular quadrature directions with weights summing to |S^{n-1}|
/// (n = 2 or 3).
fn directions(n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    use std::f64::consts::PI;
    match n {
        2 => {
            let k = 64;
            Ok((0..k)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    (vec![th.cos(), th.sin()], 2.0 * PI / k as f64)
                })
                .collect())
        }
        3 => {
            let (mu, wmu) = gauss_legendre(16);
            let k = 32;
            let mut out = Vec::with_capacity(16 * k);
            for (m, wm) in mu.iter().zip(&wmu) {
                let s = (1.0 - m * m).sqrt();
                for i in 0..k {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    out.push((
                        vec![s * th.cos(), s * th.sin(), *m],
                        wm * 2.0 * PI / k as f64,
                    ));
                }
            }
            Ok(out)
        }
        _ => Err(Error::QuadratureNotConverged(f64::INFINITY)),
    }
}

/// Integral over R^n of a scalar density, by angular quadrature times
/// Gauss--Legendre panels in log r on [r_lo, r_hi], with power-law tail
/// estimates beyond both cutoffs.
fn radial_angular_integral<F>(n: usize, r_lo: f64, r_hi: f64, density: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let dirs = directions(n)?;
    let (gx, gw) = gauss_legendre(12);
    let panels = 24;
    let t_lo = r_lo.ln();
    let t_hi = r_hi.ln();
    let dt = (t_hi - t_lo) / panels as f64;
    let mut total = 0.0;
    let mut outer_edge = 0.0; // mean density at r_hi for the tail
    let mut inner_edge = 0.0;
    let mut point = vec![0.0; n];
    for (dir, wd) in &dirs {
        for p in 0..panels {
            let a = t_lo + p as f64 * dt;
            for (x, w) in gx.iter().zip(&gw) {
                let t = a + 0.5 * dt * (x + 1.0);
                let r = t.exp();
                for (pc, dc) in point.iter_mut().zip(dir) {
                    *pc = r * dc;
                }
                // dx = r^{n-1} dr dOmega = r^n dt dOmega
                total += wd * 0.5 * dt * w * density(&point)? * r.powi(n as i32);
            }
        }
        for (r, edge) in [(r_hi, &mut outer_edge), (r_lo, &mut inner_edge)] {
            for (pc, dc) in point.iter_mut().zip(dir) {
                *pc = r * dc;
            }
            *edge += wd * density(&point)?;
        }
    }
    // outer tail: density ~ r^{-2n} power law (critical decay)
    total += outer_edge * r_hi.powi(n as i32) / n as f64;
    // inner disc: density bounded near the origin
    total += inner_edge * r_lo.powi(n as i32) / n as f64;
    Ok(total)
}

/// Relative differences of the two Kelvin integral identities:
/// the critical norm (normkelvin) and the Dirac pairing (quadkelvin).
pub fn verify_norm_identities(psi: &PointSpinorFn) -> Result<(f64, f64)> {
    let n = psi.rep.n() as usize;
    let nf = n as f64;
    let p = crate::critical_exponent(nf);
    let psi_k = kelvin(psi);
    let (r_lo, r_hi) = (1e-4, 1e4);

    let crit = |f: &PointSpinorFn| {
        radial_angular_integral(n, r_lo, r_hi, |x| {
            Ok(f.eval(x)?
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .powf(p / 2.0))
        })
    };
    let quad = |f: &PointSpinorFn| {
        radial_angular_integral(n, r_lo, r_hi, |x| {
            let z = f.eval(x)?;
            let dz = dirac_at(f, x, 1e-3)?;
            Ok(z.iter().zip(&dz).map(|(a, b)| (b * a.conj()).re).sum())
        })
    };

    let c1 = crit(psi)?;
    let c2 = crit(&psi_k)?;
    let q1 = quad(psi)?;
    let q2 = quad(&psi_k)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    Ok((rel(c1, c2), rel(q1, q2)))
}

/// The Dirac Green's function Gamma(z) = (i/|S^{n-1}|) (alpha . z)/|z|^n.
pub fn green_gamma(rep: &CliffordRep, z: &[f64]) -> Result<CMat> {
    let r = norm(z);
    if r == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let n = rep.n();
    let nsp = rep.spinor_dim();
    let coef = Complex64::new(0.0, 1.0 / (sphere_surface(n) * r.powi(n as i32)));
    let mut out = CMat::from_elem((nsp, nsp), Complex64::new(0.0, 0.0));
    for (j, alpha) in rep.alphas().iter().enumerate() {
        let zj = Complex64::new(z[j], 0.0);
        for row in 0..nsp {
            for col in 0..nsp {
                out[(row, col)] += coef * zj * alpha[(row, col)];
            }
        }
    }
    Ok(out)
}

/// Convolution (Gamma * F)(x) by polar quadrature around x: a singular
/// ball of radius delta where the kernel singularity cancels against the
/// surface measure, then log-radial panels out to r_max, then a
/// power-law tail.
fn convolve_green<F>(
    rep: &CliffordRep,
    x: &[f64],
    nodes: usize,
    source: F,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>>,
{
    let n = rep.n() as usize;
    let nsp = rep.spinor_dim();
    let delta = 0.1;
    let r_max = 400.0;
    let dirs = directions(n)?;
    let (gx, gw) = gauss_legendre(nodes.max(4));
    let surf = sphere_surface(n as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); nsp];
    let mut y = vec![0.0; n];
    // Gamma(x - y) with y = x + rho*omega is
    // -(i/|S^{n-1}|) (alpha . omega) rho^{-(n-1)}, and the rho^{n-1}
    // surface factor cancels the kernel exactly, leaving
    // -(i/|S|) (alpha.omega) integral of F(x + rho omega) d rho.
    for (dir, wd) in &dirs {
        // radial integral of F along the ray, singular ball + log panels
        let mut ray = vec![Complex64::new(0.0, 0.0); nsp];
        let mut eval_at = |rho: f64, w: f64, ray: &mut Vec<Complex64>| -> Result<()> {
            for ((yc, xc), dc) in y.iter_mut().zip(x).zip(dir) {
                *yc = xc + rho * dc;
            }
            let f = source(&y)?;
            for (r, fc) in ray.iter_mut().zip(&f) {
                *r += w * fc;
            }
            Ok(())
        };
        for (gxi, gwi) in gx.iter().zip(&gw) {
            let rho = 0.5 * delta * (gxi + 1.0);
            eval_at(rho, 0.5 * delta * gwi, &mut ray)?;
        }
        let panels = 20;
        let dt = (r_max / delta).ln() / panels as f64;
        for p in 0..panels {
            let a = delta.ln() + p as f64 * dt;
            for (gxi, gwi) in gx.iter().zip(&gw) {
                let t = a + 0.5 * dt * (gxi + 1.0);
                let rho = t.exp();
                // d rho = rho dt
                eval_at(rho, 0.5 * dt * gwi * rho, &mut ray)?;
            }
        }
        // tail: |F| ~ rho^{-(n+1)} for critically decaying sources
        {
            for ((yc, xc), dc) in y.iter_mut().zip(x).zip(dir) {
                *yc = xc + r_max * dc;
            }
            let f = source(&y)?;
            for (r, fc) in ray.iter_mut().zip(&f) {
                *r += fc * (r_max / n as f64);
            }
        }
        // apply -(i/|S|) (alpha . omega), weighted by the angle weight
        let coef = Complex64::new(0.0, -wd / surf);
        for row in 0..nsp {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, rc) in ray.iter().enumerate() {
                let mut a_omega = Complex64::new(0.0, 0.0);
                for (j, alpha) in rep.alphas().iter().enumerate() {
                    a_omega += dir[j] * alpha[(row, col)];
                }
                acc += a_omega * *rc;
            }
            out[row] += coef * acc;
        }
    }
    Ok(out)
}

/// Max over the points of |psi(x) - Gamma * (h(psi) psi)(x)|.
pub fn verify_integral_equation(
    psi: &PointSpinorFn,
    nl: Nonlinearity,
    points: &[Vec<f64>],
) -> Result<f64> {
    verify_integral_equation_with(psi, nl, points, 16)
}

/// As `verify_integral_equation`, with an explicit Gauss--Legendre node
/// count per radial panel of the convolution.
pub fn verify_integral_equation_with(
    psi: &PointSpinorFn,
    nl: Nonlinearity,
    points: &[Vec<f64>],
    nodes: usize,
) -> Result<f64> {
    let rep = &psi.rep;
    let n = rep.n() as f64;
    let nsp = rep.spinor_dim();
    let source = |y: &[f64]| -> Result<Vec<Complex64>> {
        let z = psi.eval(y)?;
        let h = nonlinearity_h(nl, n, &z);
        let mut out = vec![Complex64::new(0.0, 0.0); nsp];
        for (row, o) in out.iter_mut().enumerate() {
            for (col, zc) in z.iter().enumerate() {
                *o += h[(row, col)] * *zc;
            }
        }
        Ok(out)
    };
    let mut worst: f64 = 0.0;
    for x in points {
        let conv = convolve_green(rep, x, nodes, source)?;
        let z = psi.eval(x)?;
        let res: f64 = z
            .iter()
            .zip(&conv)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Distributional check of the Green equation: for smooth decaying phi,
/// Gamma * (D phi) must reproduce phi; returns the max discrepancy.
pub fn verify_green_identity(phi: &PointSpinorFn, points: &[Vec<f64>]) -> Result<f64> {
    if !phi.smooth {
        return Err(Error::NonFiniteField);
    }
    let source = |y: &[f64]| dirac_at(phi, y, 1e-3);
    let mut worst: f64 = 0.0;
    for x in points {
        let conv = convolve_green(&phi.rep, x, 16, source)?;
        let z = phi.eval(x)?;
        let res: f64 = z
            .iter()
            .zip(&conv)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_rep;
    use crate::closed_form::{excited_explicit, excited_spinor, ground_state_spinor};
    use std::f64::consts::PI;

    /// Deterministic pseudo-random stream in [-1, 1].
    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    fn random_point(rng: &mut Lcg, n: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64()).collect();
            let r = norm(&x);
            if r > 0.3 {
                return x;
            }
        }
    }

    /// A smooth rapidly decaying test spinor with polynomial structure.
    fn gaussian_spinor(rep: &CliffordRep, seed: u64) -> PointSpinorFn<'static> {
        let nsp = rep.spinor_dim();
        let n = rep.n() as usize;
        let mut rng = Lcg(seed);
        let coefs: Vec<Vec<f64>> = (0..nsp)
            .map(|_| (0..=n).map(|_| rng.next_f64()).collect())
            .collect();
        let rep_owned = rep.clone();
        PointSpinorFn::new(rep.clone(), true, move |x: &[f64]| {
            let _ = &rep_owned;
            let r2: f64 = x.iter().map(|c| c * c).sum();
            let env = (-0.5 * r2).exp();
            Ok(coefs
                .iter()
                .map(|c| {
                    let poly: f64 =
                        c[0] + x.iter().zip(&c[1..]).map(|(xi, ci)| xi * ci).sum::<f64>();
                    Complex64::new(env * poly, 0.3 * env * poly * poly)
                })
                .collect())
        })
    }

    fn bubble_fn(n: u32, lambda: f64) -> PointSpinorFn<'static> {
        let rep = build_rep(n).unwrap();
        let half = rep.spinor_dim() / 2;
        let mut nvec = vec![Complex64::new(0.0, 0.0); half];
        nvec[0] = Complex64::new(1.0, 0.0);
        let rep2 = rep.clone();
        PointSpinorFn::new(rep, true, move |x: &[f64]| {
            ground_state_spinor(&rep2, lambda, &nvec, x)
        })
    }

    #[test]
    fn kelvin_modulus_identity() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let psi = gaussian_spinor(&rep, 7);
            let psi_k = kelvin(&psi);
            let mut rng = Lcg(11);
            for _ in 0..20 {
                let x = random_point(&mut rng, n as usize);
                let r = norm(&x);
                let inv: Vec<f64> = x.iter().map(|c| c / (r * r)).collect();
                let mk: f64 = psi_k.eval(&x).unwrap().iter().map(|z| z.norm_sqr()).sum();
                let m: f64 = psi.eval(&inv).unwrap().iter().map(|z| z.norm_sqr()).sum();
                let expect = r.powf(-2.0 * (n as f64 - 1.0)) * m;
                assert!((mk - expect).abs() <= 1e-14 * expect.max(1.0), "n={n}");
            }
        }
    }

    #[test]
    fn kelvin_involution() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let psi = gaussian_spinor(&rep, 23);
            let psi_k = kelvin(&psi);
            let back = kelvin(&psi_k);
            let mut rng = Lcg(5);
            for _ in 0..100 {
                let x = random_point(&mut rng, n as usize);
                let a = psi.eval(&x).unwrap();
                let b = back.eval(&x).unwrap();
                let dev: f64 = a
                    .iter()
                    .zip(&b)
                    .map(|(p, q)| (p - q).norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-12, "n={n} dev={dev:e}");
            }
        }
    }

    #[test]
    fn kelvin_rejects_origin() {
        let psi = bubble_fn(2, 1.0);
        let psi_k = kelvin(&psi);
        assert!(matches!(psi_k.eval(&[0.0, 0.0]), Err(Error::ZeroPoint)));
    }

    #[test]
    fn bubble_is_kelvin_self_similar() {
        // |psi_K|^2 = 2/(1+|x|^2) = |psi|^2 for the lambda=1 bubble, and
        // |psi_K| tends to n^{(n-1)/2} = sqrt(2) at the origin
        let psi = bubble_fn(2, 1.0);
        let psi_k = kelvin(&psi);
        for &x in &[[0.5, -0.3], [2.0, 1.0], [0.001, 0.0]] {
            let mk: f64 = psi_k.eval(&x).unwrap().iter().map(|z| z.norm_sqr()).sum();
            let expect = 2.0 / (1.0 + x[0] * x[0] + x[1] * x[1]);
            assert!((mk - expect).abs() < 1e-12);
        }
        let near: f64 = psi_k
            .eval(&[1e-8, 0.0])
            .unwrap()
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        assert!((near.sqrt() - 2.0f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn dkelvin_constant_spinor() {
        let rep = build_rep(2).unwrap();
        let psi = PointSpinorFn::new(rep, true, |_: &[f64]| {
            Ok(vec![Complex64::new(0.7, -0.2), Complex64::new(0.1, 0.4)])
        });
        let mut rng = Lcg(3);
        let pts: Vec<Vec<f64>> = (0..10).map(|_| random_point(&mut rng, 2)).collect();
        let res = verify_dkelvin(&psi, &pts, 1e-3).unwrap();
        assert!(res < 1e-8, "residual {res:e}");
    }

    #[test]
    fn dkelvin_fourth_order_on_random_spinors() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let psi = gaussian_spinor(&rep, 41 + n as u64);
            let mut rng = Lcg(17);
            let pts: Vec<Vec<f64>> = (0..20).map(|_| random_point(&mut rng, n as usize)).collect();
            let coarse = verify_dkelvin(&psi, &pts, 1e-2).unwrap();
            let fine = verify_dkelvin(&psi, &pts, 5e-3).unwrap();
            let ratio = coarse / fine;
            assert!((12.0..=20.0).contains(&ratio), "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn dkelvin_ground_state_cross_check() {
        // for the bubble both sides equal |x|^{-2} (h(psi) psi)_K
        let psi = bubble_fn(2, 1.0);
        let psi_k = kelvin(&psi);
        let x = [0.8, -0.6];
        let lhs = dirac_at(&psi_k, &x, 1e-3).unwrap();
        let r = norm(&x);
        let inv: Vec<f64> = x.iter().map(|c| c / (r * r)).collect();
        let z = psi.eval(&inv).unwrap();
        let h = nonlinearity_h(Nonlinearity::Critical, 2.0, &z);
        let u = inversion_matrix(psi.rep(), &x).unwrap();
        let scale = r.powf(-1.0) / (r * r);
        for row in 0..2 {
            let mut hz = Complex64::new(0.0, 0.0);
            for col in 0..2 {
                hz += h[(row, col)] * z[col];
            }
            let mut rhs = Complex64::new(0.0, 0.0);
            for col in 0..2 {
                let mut hzc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    hzc += h[(col, k)] * z[k];
                }
                rhs += u[(row, col)] * hzc;
            }
            let _ = hz;
            assert!((lhs[row] - scale * rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn norm_identities_ground_state() {
        let psi = bubble_fn(2, 1.0);
        let (d_crit, d_quad) = verify_norm_identities(&psi).unwrap();
        assert!(d_crit <= 5e-3, "critical-norm gap {d_crit:e}");
        assert!(d_quad <= 5e-3, "pairing gap {d_quad:e}");
    }

    #[test]
    fn norm_identities_excited() {
        let rep = build_rep(2).unwrap();
        let pair = excited_explicit(1, 1.0, 1).unwrap();
        let psi = PointSpinorFn::new(rep, true, move |x: &[f64]| {
            excited_spinor(&pair, &[x[0], x[1]])
        });
        let (d_crit, _) = verify_norm_identities(&psi).unwrap();
        assert!(d_crit <= 5e-3, "critical-norm gap {d_crit:e}");
    }

    #[test]
    fn green_gamma_properties() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let z = [0.3, -1.2, 0.4];
            let g = green_gamma(&rep, &z[..n as usize]).unwrap();
            let nsp = rep.spinor_dim();
            // anti-Hermitian
            for r in 0..nsp {
                for c in 0..nsp {
                    assert!((g[(r, c)] + g[(c, r)].conj()).norm() < 1e-14);
                }
            }
            // Gamma^dagger Gamma = |z|^{-2(n-1)}/|S^{n-1}|^2 I
            let zn = norm(&z[..n as usize]);
            let expect = zn.powi(-2 * (n as i32 - 1)) / sphere_surface(n).powi(2);
            for r in 0..nsp {
                for c in 0..nsp {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..nsp {
                        acc += g[(k, r)].conj() * g[(k, c)];
                    }
                    let want = if r == c { expect } else { 0.0 };
                    assert!((acc - want).norm() < 1e-14 * expect.max(1.0));
                }
            }
        }
        // n=2 at z=(1,0): (i/2pi) alpha_1
        let rep = build_rep(2).unwrap();
        let g = green_gamma(&rep, &[1.0, 0.0]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = Complex64::new(0.0, 1.0 / (2.0 * PI)) * rep.alphas()[0][(r, c)];
                assert!((g[(r, c)] - want).norm() < 1e-15);
            }
        }
        assert!(green_gamma(&rep, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn integral_equation_ground_state() {
        let psi = bubble_fn(2, 1.0);
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![-0.5, 0.8],
            vec![2.0, -1.5],
            vec![0.3, 2.7],
        ];
        let res = verify_integral_equation(&psi, Nonlinearity::Critical, &points).unwrap();
        assert!(res <= 1e-2, "residual {res:e}");
    }

    #[test]
    fn convolution_is_linear() {
        let rep = build_rep(2).unwrap();
        let f = |y: &[f64]| -> Result<Vec<Complex64>> {
            let r2: f64 = y.iter().map(|c| c * c).sum();
            let env = (-r2).exp();
            Ok(vec![Complex64::new(env, 0.0), Complex64::new(0.0, env)])
        };
        let x = [0.4, 0.1];
        let a = convolve_green(&rep, &x, 16, f).unwrap();
        let b = convolve_green(&rep, &x, 16, |y: &[f64]| {
            Ok(f(y)?.into_iter().map(|z| 2.0 * z).collect())
        })
        .unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((2.0 * p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn green_identity_reproduces_smooth_fields() {
        for n in [2u32, 3] {
            let rep = build_rep(n).unwrap();
            let phi = gaussian_spinor(&rep, 101 + n as u64);
            let points = vec![vec![0.4; n as usize], {
                let mut p = vec![-0.7; n as usize];
                p[0] = 1.1;
                p
            }];
            let res = verify_green_identity(&phi, &points).unwrap();
            assert!(res <= 2e-3, "n={n} residual {res:e}");
        }
    }
}
