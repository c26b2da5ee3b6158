//! Decay-rate fitting and extraction of the leading/subleading spinor
//! coefficients at infinity.
//!
//! A decaying solution behaves like |x|^{-n+1} U(x) Psi plus an
//! |x|^{-n} correction with angular profile sum_j (x_j/|x|) U(x) Phi_j;
//! the routines here fit power laws in log-log coordinates, average the
//! unwound field U(x) psi(x) over spheres to estimate Psi, and solve the
//! small angular least-squares system for the Phi_j.  The dichotomy
//! Psi != 0 versus Psi = 0 (where the modulus estimate itself decays)
//! is detected by a doubling-stability test.

use num_complex::Complex64;

use crate::clifford::inversion_matrix;
use crate::kelvin::PointSpinorFn;
use crate::{Error, Result};

/// Power-law fit w ~ c r^{-p} over a radial window.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticFit {
    /// Decay exponent p (positive for decaying data).
    pub exponent: f64,
    /// Leading coefficient c >= 0.
    pub coefficient: f64,
    /// Fitting window (r_lo, r_hi).
    pub window: (f64, f64),
    /// RMS residual of the line fit in log-log coordinates.
    pub fit_residual: f64,
}

/// Least-squares line in (log r, log w) over the samples inside the
/// window; returns p = -slope and c = e^intercept.
pub fn fit_power(rs: &[f64], ws: &[f64], window: (f64, f64)) -> Result<AsymptoticFit> {
    let (r_lo, r_hi) = window;
    if !(r_hi > r_lo && r_lo > 0.0) {
        return Err(Error::BadWindow(r_lo, r_hi));
    }
    if rs.len() != ws.len() {
        return Err(Error::LengthMismatch(rs.len(), ws.len()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (r, w) in rs.iter().zip(ws) {
        if *r < r_lo || *r > r_hi {
            continue;
        }
        if *w <= 0.0 || !w.is_finite() {
            return Err(Error::NonPositiveSample);
        }
        xs.push(r.ln());
        ys.push(w.ln());
    }
    if xs.len() < 20 {
        return Err(Error::TooFewSamples {
            got: xs.len(),
            need: 20,
        });
    }
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let e = y - (slope * x + intercept);
        ss += e * e;
    }
    Ok(AsymptoticFit {
        exponent: -slope,
        coefficient: intercept.exp(),
        window,
        fit_residual: (ss / m).sqrt(),
    })
}

/// Angular sample set on the unit sphere with weights summing to 1:
/// 64 equispaced angles for n = 2, the 26-point spherical design for
/// n = 3.
fn unit_directions(n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    use std::f64::consts::PI;
    match n {
        2 => {
            let k = 64;
            Ok((0..k)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    (vec![th.cos(), th.sin()], 1.0 / k as f64)
                })
                .collect())
        }
        3 => {
            let mut out = Vec::with_capacity(26);
            // vertices (+-1, 0, 0): weight 40/840
            for j in 0..3 {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; 3];
                    v[j] = s;
                    out.push((v, 40.0 / 840.0));
                }
            }
            // edge midpoints (+-1/sqrt2, +-1/sqrt2, 0): weight 32/840
            let h = 1.0 / 2.0f64.sqrt();
            for j in 0..3 {
                let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                for sa in [1.0, -1.0] {
                    for sb in [1.0, -1.0] {
                        let mut v = vec![0.0; 3];
                        v[a] = sa * h;
                        v[b] = sb * h;
                        out.push((v, 32.0 / 840.0));
                    }
                }
            }
            // cube corners (+-1/sqrt3)^3: weight 27/840
            let c = 1.0 / 3.0f64.sqrt();
            for sx in [1.0, -1.0] {
                for sy in [1.0, -1.0] {
                    for sz in [1.0, -1.0] {
                        out.push((vec![sx * c, sy * c, sz * c], 27.0 / 840.0));
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::QuadratureNotConverged(f64::INFINITY)),
    }
}

/// Angular average over |x| = R of |x|^{n-1} U(x) psi(x), the raw
/// sphere-level estimate of the leading spinor Psi.
pub fn leading_spinor_at(psi: &PointSpinorFn, radius: f64) -> Result<Vec<Complex64>> {
    if radius < 10.0 {
        return Err(Error::RadiusTooSmall(radius));
    }
    let rep = psi.rep();
    let n = rep.n() as usize;
    let nsp = rep.spinor_dim();
    let scale = radius.powi(n as i32 - 1);
    let mut acc = vec![Complex64::new(0.0, 0.0); nsp];
    let mut x = vec![0.0; n];
    for (dir, w) in unit_directions(n)? {
        for (xc, dc) in x.iter_mut().zip(&dir) {
            *xc = radius * dc;
        }
        let z = psi.eval(&x)?;
        let u = inversion_matrix(rep, &x)?;
        for (row, a) in acc.iter_mut().enumerate() {
            for (col, zc) in z.iter().enumerate() {
                *a += w * scale * u[(row, col)] * *zc;
            }
        }
    }
    Ok(acc)
}

/// Leading spinor Psi with a doubling-stability certificate: the
/// estimates at R and 2R must agree within tol relative to their size,
/// otherwise the field is on the Psi = 0 branch at this precision and
/// `LeadingSpinorUnstable` is returned.
pub fn extract_leading_spinor(
    psi: &PointSpinorFn,
    radius: f64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let a = leading_spinor_at(psi, radius)?;
    let b = leading_spinor_at(psi, 2.0 * radius)?;
    let diff: f64 = a
        .iter()
        .zip(&b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let size: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if diff > tol * size.max(1e-300) && diff > tol {
        return Err(Error::LeadingSpinorUnstable(diff));
    }
    Ok(b)
}

/// First-order coefficients Phi_1..Phi_n of the |x|^{-n} correction,
/// fitted by least squares of w = |x|^n U(x) psi - |x| Psi against the
/// angular basis x_j/|x| over the given spheres.
pub fn fit_subleading(psi: &PointSpinorFn, radii: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let rep = psi.rep();
    let n = rep.n() as usize;
    let nsp = rep.spinor_dim();
    let r_max = radii.iter().cloned().fold(f64::NAN, f64::max);
    if !(r_max >= 10.0) {
        return Err(Error::RadiusTooSmall(r_max));
    }
    let leading = extract_leading_spinor(psi, r_max, 1e-2)?;
    // normal equations: gram[j][k] Phi_k = rhs[j], accumulated over all
    // sphere samples with their angular weights
    let mut gram = vec![vec![0.0f64; n]; n];
    let mut rhs = vec![vec![Complex64::new(0.0, 0.0); nsp]; n];
    let mut x = vec![0.0; n];
    for &radius in radii {
        if radius < 10.0 {
            return Err(Error::RadiusTooSmall(radius));
        }
        let scale = radius.powi(n as i32);
        for (dir, w) in unit_directions(n)? {
            for (xc, dc) in x.iter_mut().zip(&dir) {
                *xc = radius * dc;
            }
            let z = psi.eval(&x)?;
            let u = inversion_matrix(rep, &x)?;
            // w(x) = |x|^n U(x) psi(x) - |x| Psi
            let mut res = vec![Complex64::new(0.0, 0.0); nsp];
            for (row, rc) in res.iter_mut().enumerate() {
                for (col, zc) in z.iter().enumerate() {
                    *rc += scale * u[(row, col)] * *zc;
                }
                *rc -= radius * leading[row];
            }
            for j in 0..n {
                for k in 0..n {
                    gram[j][k] += w * dir[j] * dir[k];
                }
                for (r, rc) in rhs[j].iter_mut().zip(&res) {
                    *r += w * dir[j] * rc;
                }
            }
        }
    }
    solve_angular(gram, rhs)
}

/// Gaussian elimination with partial pivoting for the small real-matrix,
/// complex-vector-valued normal equations.
fn solve_angular(
    mut a: Vec<Vec<f64>>,
    mut b: Vec<Vec<Complex64>>,
) -> Result<Vec<Vec<Complex64>>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-10 * scale.max(1e-300) {
            return Err(Error::IllConditionedAngularSystem);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let (head, tail) = a.split_at_mut(row);
            let f = tail[0][col] / head[col][col];
            for (t, h) in tail[0].iter_mut().zip(&head[col]).skip(col) {
                *t -= f * h;
            }
            let (head, tail) = b.split_at_mut(row);
            for (t, h) in tail[0].iter_mut().zip(&head[col]) {
                *t -= f * h;
            }
        }
    }
    for col in (0..n).rev() {
        let d = a[col][col];
        for i in 0..b[col].len() {
            let mut acc = b[col][i];
            for k in col + 1..n {
                acc -= a[col][k] * b[k][i];
            }
            b[col][i] = acc / d;
        }
        for v in &mut a[col][col + 1..n] {
            *v = 0.0;
        }
    }
    Ok(b)
}
