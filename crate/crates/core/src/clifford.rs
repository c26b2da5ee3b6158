//! Clifford-algebra representations, the Dirac symbol and the inversion
//! matrices U(x).
//!
//! The alpha matrices are Hermitian N x N matrices with
//! `alpha_j alpha_k + alpha_k alpha_j = 2 delta_jk I`, N = 2^floor((n+1)/2),
//! built in block-antidiagonal form
//!
//! ```text
//! alpha_j = [ 0     B_j^* ]
//!           [ B_j   0     ]
//! ```
//!
//! with unitary (N/2) x (N/2) blocks satisfying
//! `B_j B_k^* + B_k B_j^* = 2 delta_jk I`. For odd n the blocks are the
//! Hermitian sigma matrices (Pauli matrices for n = 3, tensor doubling
//! above); for n = 2 they are the scalars (1, i), realizing the
//! convention a.sigma = a_1 + i a_2, and for even n >= 4 the first n-1
//! blocks are the odd-dimensional sigma family with B_n = iI appended.
//! All entries are drawn from {0, +-1, +-i}, so Hermiticity and the
//! anticommutation relations hold exactly in floating point.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

type CMat = Array2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A concrete Clifford-algebra representation for R^n.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    n: u32,
    alphas: Vec<CMat>,
    blocks: Vec<CMat>,
}

impl CliffordRep {
    /// Spatial dimension n.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Spinor dimension N = 2^floor((n+1)/2).
    pub fn spinor_dim(&self) -> usize {
        self.alphas[0].nrows()
    }

    /// The Hermitian alpha matrices, length n.
    pub fn alphas(&self) -> &[CMat] {
        &self.alphas
    }

    /// The antidiagonal blocks B_j of the alpha matrices, size N/2.
    ///
    /// Hermitian (the sigma matrices) for odd n; for n = 2 these are the
    /// 1 x 1 scalars (1, i); for even n >= 4 the last block is iI.
    pub fn sigmas(&self) -> &[CMat] {
        &self.blocks
    }

    /// B(x) = sum_j x_j B_j, the (N/2)-block of the Dirac symbol.
    pub fn block_symbol(&self, x: &[f64]) -> CMat {
        let m = self.blocks[0].nrows();
        let mut out = CMat::from_elem((m, m), ZERO);
        for (xj, bj) in x.iter().zip(&self.blocks) {
            out.zip_mut_with(bj, |o, b| *o += b * xj);
        }
        out
    }
}

/// Build the representation for dimension n >= 2.
///
/// The construction is verified on the spot: any violation of the
/// anticommutation relations beyond 1e-14 is a bug and panics.
pub fn build_rep(n: u32) -> Result<CliffordRep> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let blocks = if n % 2 == 1 {
        hermitian_generators(n as usize)
    } else {
        let mut b = hermitian_generators(n as usize - 1);
        let m = b[0].nrows();
        b.push(CMat::from_diag_elem(m, I));
        b
    };
    let alphas: Vec<CMat> = blocks.iter().map(embed_antidiagonal).collect();

    let rep = CliffordRep { n, alphas, blocks };
    let dev = anticommutator_deviation(&rep);
    assert!(dev < 1e-14, "anticommutation check failed: {dev:e}");
    Ok(rep)
}

/// An odd-sized family of anticommuting Hermitian matrices.
///
/// count = 1 gives the scalar (1); count = 3 the Pauli matrices (size 2);
/// count = 2m+3 doubles the size-2^m family for count = 2m+1.
fn hermitian_generators(count: usize) -> Vec<CMat> {
    assert!(count % 2 == 1);
    if count == 1 {
        return vec![CMat::from_elem((1, 1), ONE)];
    }
    if count == 3 {
        return vec![
            cmat2([[ZERO, ONE], [ONE, ZERO]]),
            cmat2([[ZERO, -I], [I, ZERO]]),
            cmat2([[ONE, ZERO], [ZERO, -ONE]]),
        ];
    }
    let prev = hermitian_generators(count - 2);
    let m = prev[0].nrows();
    let mut out: Vec<CMat> = prev.iter().map(embed_antidiagonal).collect();
    // two extra generators: antidiag(-iI, iI) and diag(I, -I)
    let mut extra1 = CMat::from_elem((2 * m, 2 * m), ZERO);
    let mut extra2 = CMat::from_elem((2 * m, 2 * m), ZERO);
    for k in 0..m {
        extra1[(k, m + k)] = -I;
        extra1[(m + k, k)] = I;
        extra2[(k, k)] = ONE;
        extra2[(m + k, m + k)] = -ONE;
    }
    out.push(extra1);
    out.push(extra2);
    out
}

/// [[0, b^*], [b, 0]] for a square block b.
fn embed_antidiagonal(b: &CMat) -> CMat {
    let m = b.nrows();
    let mut out = CMat::from_elem((2 * m, 2 * m), ZERO);
    for r in 0..m {
        for c in 0..m {
            out[(r, m + c)] = b[(c, r)].conj();
            out[(m + r, c)] = b[(r, c)];
        }
    }
    out
}

fn cmat2(rows: [[Complex64; 2]; 2]) -> CMat {
    CMat::from_shape_fn((2, 2), |(r, c)| rows[r][c])
}

/// The inversion matrix U(x) = antidiag(-i B(x/|x|)^*, i B(x/|x|)).
///
/// Hermitian, unitary, squares to the identity and depends only on x/|x|.
pub fn inversion_matrix(rep: &CliffordRep, x: &[f64]) -> Result<CMat> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let unit: Vec<f64> = x.iter().map(|v| v / r).collect();
    let b = rep.block_symbol(&unit);
    let m = b.nrows();
    let nn = 2 * m;
    let mut out = CMat::from_elem((nn, nn), ZERO);
    for r_ in 0..m {
        for c in 0..m {
            out[(r_, m + c)] = -I * b[(c, r_)].conj();
            out[(m + r_, c)] = I * b[(r_, c)];
        }
    }
    Ok(out)
}

/// The Dirac symbol -i alpha.x.
///
/// Composition with the inversion matrix gives
/// `(-i alpha.x) U(x) = |x| diag(I, -I)`.
pub fn dirac_symbol(rep: &CliffordRep, x: &[f64]) -> Result<CMat> {
    if norm(x) == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let b = rep.block_symbol(x);
    let m = b.nrows();
    let nn = 2 * m;
    let mut out = CMat::from_elem((nn, nn), ZERO);
    for r in 0..m {
        for c in 0..m {
            out[(r, m + c)] = -I * b[(c, r)].conj();
            out[(m + r, c)] = -I * b[(r, c)];
        }
    }
    Ok(out)
}

/// Max entrywise deviation of alpha_j alpha_k + alpha_k alpha_j from
/// 2 delta_jk I over all pairs, plus the Hermiticity deviation.
pub fn anticommutator_deviation(rep: &CliffordRep) -> f64 {
    let nn = rep.spinor_dim();
    let mut worst: f64 = 0.0;
    for a in rep.alphas() {
        worst = worst.max(hermitian_deviation(a));
    }
    for (j, aj) in rep.alphas().iter().enumerate() {
        for (k, ak) in rep.alphas().iter().enumerate() {
            let mut anti = aj.dot(ak) + ak.dot(aj);
            if j == k {
                for d in 0..nn {
                    anti[(d, d)] -= 2.0 * ONE;
                }
            }
            worst = worst.max(sup_norm(&anti));
        }
    }
    worst
}

/// Max entrywise deviation of U(x) from Hermiticity and of U(x)^2 from I,
/// together with the deviation of (-i alpha.x) U(x) from |x| diag(I, -I).
pub fn inversion_deviation(rep: &CliffordRep, x: &[f64]) -> Result<f64> {
    let u = inversion_matrix(rep, x)?;
    let mut worst = hermitian_deviation(&u);

    let nn = rep.spinor_dim();
    let mut sq = u.dot(&u);
    for d in 0..nn {
        sq[(d, d)] -= ONE;
    }
    worst = worst.max(sup_norm(&sq));

    let mut comp = dirac_symbol(rep, x)?.dot(&u);
    let r = norm(x);
    for d in 0..nn {
        comp[(d, d)] -= if d < nn / 2 { r * ONE } else { -r * ONE };
    }
    Ok(worst.max(sup_norm(&comp)))
}

/// Deviation of the commutation relation
/// `(-i alpha_j) U(x) - U(x)(-i alpha_j) = (2 x_j / |x|) diag(I, -I)`.
pub fn commutation_deviation(rep: &CliffordRep, x: &[f64]) -> Result<f64> {
    let u = inversion_matrix(rep, x)?;
    let r = norm(x);
    let nn = rep.spinor_dim();
    let mut worst: f64 = 0.0;
    for (j, aj) in rep.alphas().iter().enumerate() {
        let m = aj.mapv(|v| -I * v);
        let mut comm = m.dot(&u) - u.dot(&m);
        let s = 2.0 * x[j] / r;
        for d in 0..nn {
            comm[(d, d)] -= if d < nn / 2 { s * ONE } else { -s * ONE };
        }
        worst = worst.max(sup_norm(&comm));
    }
    Ok(worst)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn sup_norm(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_deviation(m: &CMat) -> f64 {
    let nn = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..nn {
        for c in 0..nn {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_n_below_2() {
        assert!(build_rep(1).is_err());
        assert!(build_rep(0).is_err());
    }

    #[test]
    fn n2_matrices_are_the_standard_choice() {
        let rep = build_rep(2).unwrap();
        assert_eq!(rep.spinor_dim(), 2);
        let a1 = &rep.alphas()[0];
        let a2 = &rep.alphas()[1];
        assert_eq!(a1[(0, 1)], c(1.0, 0.0));
        assert_eq!(a1[(1, 0)], c(1.0, 0.0));
        assert_eq!(a1[(0, 0)], c(0.0, 0.0));
        assert_eq!(a2[(0, 1)], c(0.0, -1.0));
        assert_eq!(a2[(1, 0)], c(0.0, 1.0));
        // blocks are the formal scalar pair (1, i)
        assert_eq!(rep.sigmas()[0][(0, 0)], c(1.0, 0.0));
        assert_eq!(rep.sigmas()[1][(0, 0)], c(0.0, 1.0));
    }

    #[test]
    fn n3_sigmas_are_pauli() {
        let rep = build_rep(3).unwrap();
        assert_eq!(rep.spinor_dim(), 4);
        let s = rep.sigmas();
        assert_eq!(s[0][(0, 1)], c(1.0, 0.0));
        assert_eq!(s[1][(0, 1)], c(0.0, -1.0));
        assert_eq!(s[2][(0, 0)], c(1.0, 0.0));
        assert_eq!(s[2][(1, 1)], c(-1.0, 0.0));
    }

    #[test]
    fn anticommutators_vanish_for_n_2_to_8() {
        for n in 2..=8 {
            let rep = build_rep(n).unwrap();
            let expected_dim = 1usize << (n as usize).div_ceil(2);
            assert_eq!(rep.spinor_dim(), expected_dim, "n = {n}");
            assert!(anticommutator_deviation(&rep) < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn inversion_matrix_n2_east_point() {
        // U((1,0)) = [[0, -i], [i, 0]]
        let rep = build_rep(2).unwrap();
        let u = inversion_matrix(&rep, &[1.0, 0.0]).unwrap();
        assert_eq!(u[(0, 1)], c(0.0, -1.0));
        assert_eq!(u[(1, 0)], c(0.0, 1.0));
        assert_eq!(u[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn inversion_matrix_scale_invariant() {
        let rep = build_rep(3).unwrap();
        let a = inversion_matrix(&rep, &[0.0, 0.0, 2.0]).unwrap();
        let b = inversion_matrix(&rep, &[0.0, 0.0, 1.0]).unwrap();
        assert!(sup_norm(&(a - b)) < 1e-15);
    }

    #[test]
    fn inversion_rejects_origin() {
        let rep = build_rep(2).unwrap();
        assert!(inversion_matrix(&rep, &[0.0, 0.0]).is_err());
        assert!(dirac_symbol(&rep, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn dirac_symbol_composition_n3() {
        // (-i alpha.x) U(x) = diag(1,1,-1,-1) at x = e_1
        let rep = build_rep(3).unwrap();
        let prod = dirac_symbol(&rep, &[1.0, 0.0, 0.0])
            .unwrap()
            .dot(&inversion_matrix(&rep, &[1.0, 0.0, 0.0]).unwrap());
        for r in 0..4 {
            for cc in 0..4 {
                let want = if r == cc {
                    if r < 2 { c(1.0, 0.0) } else { c(-1.0, 0.0) }
                } else {
                    c(0.0, 0.0)
                };
                assert!((prod[(r, cc)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dirac_symbol_composition_n2_north_point() {
        // hand oracle: x = (0,1): -i alpha.x = [[0,-1],[1,0]],
        // U = [[0,-i e^{-i pi/2}],[i e^{i pi/2},0]] = [[0,-1],[-1,0]]
        let rep = build_rep(2).unwrap();
        let prod = dirac_symbol(&rep, &[0.0, 1.0])
            .unwrap()
            .dot(&inversion_matrix(&rep, &[0.0, 1.0]).unwrap());
        assert!((prod[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((prod[(1, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(prod[(0, 1)].norm() < 1e-15);
        assert!(prod[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn dirac_symbol_is_linear_in_x() {
        let rep = build_rep(5).unwrap();
        let x = [0.3, -1.2, 0.7, 0.1, 2.0];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = dirac_symbol(&rep, &x).unwrap().mapv(|v| 2.0 * v);
        let b = dirac_symbol(&rep, &x2).unwrap();
        assert!(sup_norm(&(a - b)) < 1e-14);
    }

    #[test]
    fn inversion_identities_on_random_directions() {
        // deterministic LCG directions; 100 per dimension
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in 2..=8u32 {
            let rep = build_rep(n).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..n).map(|_| next()).collect();
                if norm(&x) < 1e-3 {
                    continue;
                }
                assert!(inversion_deviation(&rep, &x).unwrap() < 1e-13, "n = {n}");
                assert!(commutation_deviation(&rep, &x).unwrap() < 1e-13, "n = {n}");
            }
        }
    }
}
