//! Numerical companion library for critical Dirac equations on R^n.
//!
//! The crate evaluates the explicit solution families of the critical
//! nonlinear Dirac equation (the ground-state bubble, the 2D excited
//! states and the singular solution), integrates the associated radial
//! ODE systems in logarithmic variables with a conserved energy, runs
//! the midpoint shooting construction for the graphene-type system,
//! applies finite-difference Dirac operators and quadrature functionals
//! to sampled spinor fields, verifies the spinorial Kelvin transform and
//! the Green's-function integral equation, and fits decay asymptotics.

// Validation guards are written as `!(x > 0.0)` on purpose: the negated
// form also rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod clifford;
pub mod closed_form;
pub mod field;
pub mod kelvin;
pub mod model;
pub mod radial;
pub mod shooting;

mod error;
mod numeric;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Critical exponent 2^# = 2n/(n-1).
pub fn critical_exponent(n: f64) -> f64 {
    2.0 * n / (n - 1.0)
}

/// Surface measure of the unit sphere S^{n-1} in R^n.
///
/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2), for integer n >= 1.
pub fn sphere_surface(n: u32) -> f64 {
    use std::f64::consts::PI;
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Gamma(k/2) for integer k >= 1, computed exactly from the recursion.
fn gamma_half_integer(k: u32) -> f64 {
    use std::f64::consts::PI;
    assert!(k >= 1);
    if k.is_multiple_of(2) {
        // Gamma(m) = (m-1)!
        let m = k / 2;
        (1..m).fold(1.0, |acc, j| acc * j as f64)
    } else {
        // Gamma(m + 1/2) = (2m-1)!! / 2^m * sqrt(pi)
        let m = (k - 1) / 2;
        let mut acc = PI.sqrt();
        for j in 0..m {
            acc *= j as f64 + 0.5;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_surfaces_match_known_values() {
        assert!((sphere_surface(1) - 2.0).abs() < 1e-14); // S^0: two points
        assert!((sphere_surface(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(2.0), 4.0);
        assert_eq!(critical_exponent(3.0), 3.0);
    }
}
