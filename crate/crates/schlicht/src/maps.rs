//! The catalog of evaluable normalized maps and the evaluator abstraction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loewner::{DrivingFunction, StepControl};
use crate::tol;

/// Anything that can be evaluated as an analytic function of one complex
/// variable. Evaluation is fallible because some catalog members are backed
/// by an ODE solve.
pub trait Analytic: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

impl<F> Analytic for F
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self(z)
    }
}

/// An evaluable normalized conformal map: f(0) = 0, f'(0) = 1.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    /// z.
    Identity,
    /// z / (1 - z)^2, omitting the ray (-inf, -1/4].
    Koebe,
    /// Conjugated rotation e^{-iw} K(e^{iw} z) of the Koebe map.
    RotatedKoebe { angle: f64 },
    /// z / (1 - z), mapping onto the half plane Re w > -1/2.
    HalfPlane,
    /// z + a2 z^2 + ... + an z^n, coefficients starting at a2.
    Polynomial { upper: Vec<Complex64> },
    /// Limit e^t f(z, t) of the chain driven by the given function,
    /// evaluated by integrating to the stored horizon.
    ChainLimit { driving: DrivingFunction, horizon: f64 },
}

impl MapSpec {
    /// Chain-limit map with the default horizon.
    pub fn chain_limit(driving: DrivingFunction) -> Self {
        MapSpec::ChainLimit { driving, horizon: tol::CHAIN_LIMIT_HORIZON }
    }

    /// Largest radius at which the map can be sampled for omission checks.
    /// Chain limits are solved as ODEs and stay away from the boundary.
    pub fn safe_sample_radius(&self) -> f64 {
        match self {
            MapSpec::ChainLimit { .. } => 0.9,
            _ => tol::OMISSION_RADIUS,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDomain { z });
        }
        match self {
            MapSpec::Identity => Ok(z),
            MapSpec::Koebe => Ok(koebe(z)),
            MapSpec::RotatedKoebe { angle } => {
                let rot = Complex64::from_polar(1.0, *angle);
                Ok(koebe(rot * z) / rot)
            }
            MapSpec::HalfPlane => Ok(z / (1.0 - z)),
            MapSpec::Polynomial { upper } => {
                // Horner on f(z)/z = 1 + a2 z + ... + an z^{n-1}.
                let mut acc = Complex64::new(0.0, 0.0);
                for a in upper.iter().rev() {
                    acc = (acc + a) * z;
                }
                Ok((acc + 1.0) * z)
            }
            MapSpec::ChainLimit { driving, horizon } => {
                crate::loewner::chain_limit_eval(driving, z, *horizon, &StepControl::default())
            }
        }
    }
}

impl Analytic for MapSpec {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        MapSpec::eval(self, z)
    }
}

/// The Koebe map z / (1 - z)^2.
pub fn koebe(z: Complex64) -> Complex64 {
    let d = 1.0 - z;
    z / (d * d)
}

/// Evaluates a catalog map at a point of the open disk.
pub fn eval_map(spec: &MapSpec, z: Complex64) -> Result<Complex64> {
    spec.eval(z)
}
