//! Sampled spinor fields on uniform box grids with a finite-difference
//! Dirac operator and quadrature functionals.
//!
//! Grids truncate R^n to a box; the action and L^q quadratures accept an
//! optional radial modulus oracle which supplies the analytic tail
//! integral outside the box, exploiting the proven r^{-(n-1)} decay.

use num_complex::Complex64;

use crate::clifford::CliffordRep;
use crate::closed_form::{nonlinearity_h, Nonlinearity};
use crate::numeric::{gauss_legendre, pairwise_sum};
use crate::{critical_exponent, Error, Result};

/// Memory cap: nodes x spinor components.
const ENTRY_CAP: usize = 200_000_000;

/// A uniform grid on a box [lo_1, hi_1] x ... x [lo_n, hi_n] with m
/// points per axis.
#[derive(Debug, Clone)]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    m: usize,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::GridTooCoarse(m));
        }
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DegenerateBox(0));
        }
        for (j, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(b > a) {
                return Err(Error::DegenerateBox(j));
            }
        }
        Ok(GridSpec { lo, hi, m })
    }

    /// Cubical box [-half, half]^n.
    pub fn centered(n: usize, half: f64, m: usize) -> Result<Self> {
        GridSpec::new(vec![-half; n], vec![half; n], m)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    /// Spacing along axis j.
    pub fn spacing(&self, j: usize) -> f64 {
        (self.hi[j] - self.lo[j]) / (self.m - 1) as f64
    }

    /// Total number of nodes m^n, or None on overflow.
    pub fn nodes(&self) -> Option<usize> {
        let mut total: usize = 1;
        for _ in 0..self.dim() {
            total = total.checked_mul(self.m)?;
        }
        Some(total)
    }

    /// Coordinates of the node with the given flat (row-major) index.
    pub fn coord(&self, flat: usize) -> Vec<f64> {
        let mut idx = flat;
        let n = self.dim();
        let mut x = vec![0.0; n];
        for j in (0..n).rev() {
            let i = idx % self.m;
            idx /= self.m;
            x[j] = self.lo[j] + i as f64 * self.spacing(j);
        }
        x
    }

    fn decode(&self, flat: usize) -> Vec<usize> {
        let mut idx = flat;
        let n = self.dim();
        let mut out = vec![0usize; n];
        for j in (0..n).rev() {
            out[j] = idx % self.m;
            idx /= self.m;
        }
        out
    }

    /// Length of the ray from the origin in direction d (unit vector)
    /// until it exits the box; the origin must be inside the box.
    fn ray_exit(&self, d: &[f64]) -> f64 {
        let mut r = f64::INFINITY;
        for (j, &dj) in d.iter().enumerate() {
            if dj > 0.0 {
                r = r.min(self.hi[j] / dj);
            } else if dj < 0.0 {
                r = r.min(self.lo[j] / dj);
            }
        }
        r
    }
}

/// A spinor field sampled on a grid.
#[derive(Debug, Clone)]
pub struct SpinorField {
    grid: GridSpec,
    rep: CliffordRep,
    /// Row-major node order, N components per node.
    values: Vec<Complex64>,
}

impl SpinorField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The spinor at the node with the given flat index.
    pub fn node(&self, flat: usize) -> &[Complex64] {
        let nsp = self.rep.spinor_dim();
        &self.values[flat * nsp..(flat + 1) * nsp]
    }
}

/// Evaluate a pointwise spinor function at every grid node.
pub fn sample<F>(rep: &CliffordRep, grid: &GridSpec, psi: F) -> Result<SpinorField>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>>,
{
    if grid.dim() != rep.n() as usize {
        return Err(Error::DimensionMismatch {
            grid: grid.dim(),
            rep: rep.n() as usize,
        });
    }
    let nsp = rep.spinor_dim();
    let nodes = grid.nodes().ok_or(Error::GridTooLarge {
        nodes: usize::MAX,
        spinor: nsp,
        cap: ENTRY_CAP,
    })?;
    if nodes.saturating_mul(nsp) > ENTRY_CAP {
        return Err(Error::GridTooLarge {
            nodes,
            spinor: nsp,
            cap: ENTRY_CAP,
        });
    }
    let mut values = Vec::with_capacity(nodes * nsp);
    for flat in 0..nodes {
        let x = grid.coord(flat);
        let z = psi(&x)?;
        debug_assert_eq!(z.len(), nsp);
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        values.extend_from_slice(&z);
    }
    Ok(SpinorField {
        grid: grid.clone(),
        rep: rep.clone(),
        values,
    })
}

/// 4th-order stencils: (offsets, coefficients/12h).
const CENTRAL: ([isize; 5], [f64; 5]) = ([-2, -1, 0, 1, 2], [1.0, -8.0, 0.0, 8.0, -1.0]);
const EDGE0: ([isize; 5], [f64; 5]) = ([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0]);
const EDGE1: ([isize; 5], [f64; 5]) = ([-1, 0, 1, 2, 3], [-3.0, -10.0, 18.0, -6.0, 1.0]);

fn stencil_for(i: usize, m: usize) -> ([isize; 5], [f64; 5]) {
    if i == 0 {
        EDGE0
    } else if i == 1 {
        EDGE1
    } else if i == m - 2 {
        let (o, c) = EDGE1;
        (o.map(|v| -v), c.map(|v| -v))
    } else if i == m - 1 {
        let (o, c) = EDGE0;
        (o.map(|v| -v), c.map(|v| -v))
    } else {
        CENTRAL
    }
}

/// Apply the Dirac operator -i sum_j alpha_j d_j by finite differences:
/// 4th-order central stencils at interior nodes, one-sided 4th-order
/// stencils on the two layers nearest each face.
pub fn dirac_fd(field: &SpinorField) -> SpinorField {
    let grid = &field.grid;
    let n = grid.dim();
    let m = grid.m;
    let nsp = field.rep.spinor_dim();
    let nodes = grid.nodes().unwrap();
    let mut strides = vec![1usize; n];
    for j in (0..n - 1).rev() {
        strides[j] = strides[j + 1] * m;
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = vec![Complex64::new(0.0, 0.0); nodes * nsp];
    let mut df = vec![Complex64::new(0.0, 0.0); nsp];
    for flat in 0..nodes {
        let idx = grid.decode(flat);
        for j in 0..n {
            let h = grid.spacing(j);
            let (offs, coefs) = stencil_for(idx[j], m);
            for d in df.iter_mut() {
                *d = Complex64::new(0.0, 0.0);
            }
            for (o, cf) in offs.iter().zip(&coefs) {
                if *cf == 0.0 {
                    continue;
                }
                let neighbor = (flat as isize + o * strides[j] as isize) as usize;
                let z = &field.values[neighbor * nsp..(neighbor + 1) * nsp];
                for (d, zc) in df.iter_mut().zip(z) {
                    *d += *cf * zc;
                }
            }
            let scale = 1.0 / (12.0 * h);
            let alpha = &field.rep.alphas()[j];
            for row in 0..nsp {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, d) in df.iter().enumerate() {
                    acc += alpha[(row, col)] * *d;
                }
                out[flat * nsp + row] += minus_i * scale * acc;
            }
        }
    }
    SpinorField {
        grid: grid.clone(),
        rep: field.rep.clone(),
        values: out,
    }
}

/// Max over interior nodes of |D psi - h(psi) psi| (Euclidean norm),
/// skipping nodes with |x| <= exclude_radius (for fields whose ansatz is
/// singular or non-smooth at the origin).
///
/// Interior means at least two layers from every face, so the max is
/// taken where the central stencils apply.
pub fn pde_residual(field: &SpinorField, nl: Nonlinearity, exclude_radius: f64) -> f64 {
    let d = dirac_fd(field);
    let grid = &field.grid;
    let n = grid.dim() as f64;
    let nsp = field.rep.spinor_dim();
    let m = grid.m;
    let mut worst: f64 = 0.0;
    for flat in 0..grid.nodes().unwrap() {
        let idx = grid.decode(flat);
        if idx.iter().any(|&i| i < 2 || i >= m - 2) {
            continue;
        }
        let x = grid.coord(flat);
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() <= exclude_radius {
            continue;
        }
        let z = field.node(flat);
        let dz = d.node(flat);
        let hmat = nonlinearity_h(nl, n, z);
        let mut res = 0.0;
        for row in 0..nsp {
            let mut hz = Complex64::new(0.0, 0.0);
            for (col, zc) in z.iter().enumerate() {
                hz += hmat[(row, col)] * *zc;
            }
            res += (dz[row] - hz).norm_sqr();
        }
        worst = worst.max(res.sqrt());
    }
    worst
}

/// Result of a box quadrature with optional tail correction.
#[derive(Debug, Clone, serde::Serialize)]
pub struct QuadratureReport {
    /// The integral (for norms: already rooted).
    pub value: f64,
    /// Difference against the stride-2 subgrid estimate (NaN when the
    /// grid cannot be refined by subsampling).
    pub refinement_gap: f64,
    /// Tail contribution from the radial oracle (0 when absent).
    pub tail: f64,
    /// True when the boundary modulus exceeds 10% of the center modulus
    /// and no tail oracle compensates the truncation.
    pub truncated: bool,
}

/// Trapezoidal weight of index i on an m-point axis.
fn trap_w(i: usize, m: usize) -> f64 {
    if i == 0 || i == m - 1 {
        0.5
    } else {
        1.0
    }
}

fn box_integral<F>(field: &SpinorField, density: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let grid = &field.grid;
    let m = grid.m;
    let vol_h: f64 = (0..grid.dim()).map(|j| grid.spacing(j)).product();
    let mut terms = Vec::with_capacity(grid.nodes().unwrap());
    for flat in 0..grid.nodes().unwrap() {
        let idx = grid.decode(flat);
        let w: f64 = idx.iter().map(|&i| trap_w(i, m)).product();
        terms.push(w * density(flat));
    }
    vol_h * pairwise_sum(&terms)
}

/// Restrict a field to the stride-2 subgrid (requires odd m).
fn restrict(field: &SpinorField) -> Option<SpinorField> {
    let m = field.grid.m;
    if !(m - 1).is_multiple_of(2) || (m - 1) / 2 + 1 < 8 {
        return None;
    }
    let mc = (m - 1) / 2 + 1;
    let coarse = GridSpec {
        lo: field.grid.lo.clone(),
        hi: field.grid.hi.clone(),
        m: mc,
    };
    let nsp = field.rep.spinor_dim();
    let nodes = coarse.nodes()?;
    let mut values = Vec::with_capacity(nodes * nsp);
    let n = coarse.dim();
    let mut strides = vec![1usize; n];
    for j in (0..n - 1).rev() {
        strides[j] = strides[j + 1] * m;
    }
    for flat in 0..nodes {
        let idx = coarse.decode(flat);
        let fine_flat: usize = idx.iter().zip(&strides).map(|(i, s)| 2 * i * s).sum();
        values.extend_from_slice(field.node(fine_flat));
    }
    Some(SpinorField {
        grid: coarse,
        rep: field.rep.clone(),
        values,
    })
}

fn modulus_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// The potential G(psi) whose Euler--Lagrange nonlinearity is h(psi)psi.
fn potential(nl: Nonlinearity, n: f64, z: &[Complex64]) -> f64 {
    match nl {
        Nonlinearity::Critical => {
            let p = critical_exponent(n);
            modulus_sq(z).powf(p / 2.0) / p
        }
        Nonlinearity::Graphene2D { beta1, beta2 } => {
            let (a, b) = (z[0].norm_sqr(), z[1].norm_sqr());
            beta1 / 4.0 * (a * a + b * b) + beta2 * a * b
        }
    }
}

fn truncation_flag(field: &SpinorField) -> bool {
    let grid = &field.grid;
    let m = grid.m;
    let mut center: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    for flat in 0..grid.nodes().unwrap() {
        let mag = modulus_sq(field.node(flat)).sqrt();
        let idx = grid.decode(flat);
        if idx.iter().any(|&i| i == 0 || i == m - 1) {
            boundary = boundary.max(mag);
        } else {
            center = center.max(mag);
        }
    }
    boundary > 0.1 * center.max(boundary)
}

/// Integral of density(r) over the exterior of the box in polar
/// coordinates around the origin (n = 2 or 3; the box must contain the
/// origin).  density already includes everything except the r^{n-1}
/// surface factor.
fn exterior_integral<F>(grid: &GridSpec, density: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let n = grid.dim();
    for j in 0..n {
        if !(grid.lo[j] < 0.0 && grid.hi[j] > 0.0) {
            return Err(Error::DegenerateBox(j));
        }
    }
    let (gl_x, gl_w) = gauss_legendre(32);
    // radial integral from R to infinity via s = R/r in (0, 1]
    let radial = |rr: f64| -> f64 {
        let mut acc = 0.0;
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let s = 0.5 * (x + 1.0); // (0,1)
            let r = rr / s;
            acc += 0.5 * w * density(r) * r.powi(n as i32 - 1) * rr / (s * s);
        }
        acc
    };
    match n {
        2 => {
            let k = 256;
            let mut acc = 0.0;
            for i in 0..k {
                let th = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                let d = [th.cos(), th.sin()];
                acc += radial(grid.ray_exit(&d));
            }
            Ok(acc * 2.0 * std::f64::consts::PI / k as f64)
        }
        3 => {
            let (mu_x, mu_w) = gauss_legendre(32);
            let k = 64;
            let mut acc = 0.0;
            for (mu, wmu) in mu_x.iter().zip(&mu_w) {
                let sq = (1.0 - mu * mu).sqrt();
                for i in 0..k {
                    let th = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    let d = [sq * th.cos(), sq * th.sin(), *mu];
                    acc += wmu * radial(grid.ray_exit(&d));
                }
            }
            Ok(acc * 2.0 * std::f64::consts::PI / k as f64)
        }
        _ => Err(Error::QuadratureNotConverged(f64::INFINITY)),
    }
}

/// The action (1/2)<D psi, psi> - G(psi) integrated over the box, with
/// an optional radial tail oracle returning |psi(r)|^2.
///
/// The tail uses the solution identity (1/2)<D psi, psi> = <h psi, psi>/2,
/// which for the critical nonlinearity reduces the exterior density to
/// (1/(2n))|psi|^{2 n/(n-1)} -- valid only when the sampled field is an
/// exact solution, which is the intended use of the oracle.
pub fn action(
    field: &SpinorField,
    nl: Nonlinearity,
    tail_modulus_sq: Option<&dyn Fn(f64) -> f64>,
) -> Result<QuadratureReport> {
    let n = field.grid.dim() as f64;
    let compute = |fld: &SpinorField| -> f64 {
        let d = dirac_fd(fld);
        box_integral(fld, |flat| {
            let z = fld.node(flat);
            let dz = d.node(flat);
            let pairing: f64 = dz
                .iter()
                .zip(z)
                .map(|(a, b)| (a * b.conj()).re)
                .sum();
            0.5 * pairing - potential(nl, n, z)
        })
    };
    let fine = compute(field);
    let gap = restrict(field).map_or(f64::NAN, |coarse| fine - compute(&coarse));
    let tail = match tail_modulus_sq {
        Some(oracle) => {
            if !matches!(nl, Nonlinearity::Critical) {
                return Err(Error::QuadratureNotConverged(f64::INFINITY));
            }
            exterior_integral(&field.grid, |r| {
                oracle(r).powf(n / (n - 1.0)) / (2.0 * n)
            })?
        }
        None => 0.0,
    };
    let value = fine + tail;
    if gap.is_finite() && gap.abs() > 1e-2 * (value.abs() + 1.0) {
        return Err(Error::QuadratureNotConverged(gap.abs()));
    }
    Ok(QuadratureReport {
        value,
        refinement_gap: gap,
        tail,
        truncated: tail == 0.0 && truncation_flag(field),
    })
}

/// (integral of |psi|^q)^{1/q} over the box, plus the optional radial
/// tail from a |psi(r)|^2 oracle.
pub fn lq_norm(
    field: &SpinorField,
    q: f64,
    tail_modulus_sq: Option<&dyn Fn(f64) -> f64>,
) -> Result<QuadratureReport> {
    if !(q > 0.0) {
        return Err(Error::InvalidTolerance(q));
    }
    let compute = |fld: &SpinorField| -> f64 {
        box_integral(fld, |flat| modulus_sq(fld.node(flat)).powf(q / 2.0))
    };
    let fine = compute(field);
    let gap_raw = restrict(field).map_or(f64::NAN, |coarse| fine - compute(&coarse));
    let tail = match tail_modulus_sq {
        Some(oracle) => exterior_integral(&field.grid, |r| oracle(r).powf(q / 2.0))?,
        None => 0.0,
    };
    let integral = fine + tail;
    if gap_raw.is_finite() && gap_raw.abs() > 1e-2 * (integral.abs() + 1.0) {
        return Err(Error::QuadratureNotConverged(gap_raw.abs()));
    }
    Ok(QuadratureReport {
        value: integral.powf(1.0 / q),
        refinement_gap: gap_raw,
        tail,
        truncated: tail == 0.0 && truncation_flag(field),
    })
}
