//! Model parameters for the radial ODE systems.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which radial model a trajectory or profile belongs to.
///
/// `GroundState` is the critical equation on R^n reduced by the
/// Soler--Wakano ansatz; real n > 1 is allowed for all radial work.
/// `Graphene2D` is the two-dimensional system with couplings
/// beta1, beta2 > 0 and integer angular winding S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    GroundState { n: f64 },
    Graphene2D { beta1: f64, beta2: f64, s: i32 },
}

impl ModelParams {
    pub fn ground_state(n: f64) -> Result<Self> {
        if !(n > 1.0) || !n.is_finite() {
            return Err(Error::InvalidRealDimension(n));
        }
        Ok(ModelParams::GroundState { n })
    }

    pub fn graphene(beta1: f64, beta2: f64, s: i32) -> Result<Self> {
        if !(beta1 > 0.0 && beta2 > 0.0) {
            return Err(Error::InvalidCouplings(beta1, beta2));
        }
        Ok(ModelParams::Graphene2D { beta1, beta2, s })
    }

    /// Coefficient of the linear saddle term: (n-1)/2 resp. S + 1/2.
    ///
    /// The log-variable systems read f' = -kappa f + (nonlinear),
    /// g' = kappa g + (nonlinear) with this kappa.
    pub fn linear_rate(&self) -> f64 {
        match *self {
            ModelParams::GroundState { n } => (n - 1.0) / 2.0,
            ModelParams::Graphene2D { s, .. } => s as f64 + 0.5,
        }
    }

    /// Exponent (n-1)/2 of the r-power relating u and f (1/2 for 2D).
    pub fn profile_exponent(&self) -> f64 {
        match *self {
            ModelParams::GroundState { n } => (n - 1.0) / 2.0,
            ModelParams::Graphene2D { .. } => 0.5,
        }
    }

    /// Midpoint shooting amplitude a = (|2S+1|/(beta1+2*beta2))^{1/2}.
    pub fn shooting_amplitude(&self) -> Option<f64> {
        match *self {
            ModelParams::Graphene2D { beta1, beta2, s } => {
                Some(((2 * s + 1).abs() as f64 / (beta1 + 2.0 * beta2)).sqrt())
            }
            _ => None,
        }
    }

    /// tau = sgn(S + 1/2); never zero for integer S.
    pub fn tau(&self) -> Option<i32> {
        match *self {
            ModelParams::Graphene2D { s, .. } => Some(if 2 * s + 1 > 0 { 1 } else { -1 }),
            _ => None,
        }
    }
}
