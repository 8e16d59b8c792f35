//! Continuous linear functionals and Cauchy-integral coefficient extraction.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::Analytic;
use crate::tol;

/// A continuous linear functional applied to analytic functions on the disk.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearFunctional {
    /// Taylor coefficient of z^j at the origin.
    CoefficientIndex(usize),
    /// Weighted sum of coefficient functionals.
    FiniteCombination(Vec<(usize, Complex64)>),
    /// Evaluation at a fixed point of the open disk.
    PointEvaluation(Complex64),
}

impl LinearFunctional {
    pub fn validate(&self) -> Result<()> {
        match self {
            LinearFunctional::PointEvaluation(z) if z.norm() >= 1.0 => {
                Err(Error::InvalidInput(format!("evaluation point {z} outside the disk")))
            }
            LinearFunctional::FiniteCombination(terms) if terms.is_empty() => {
                Err(Error::InvalidInput("empty coefficient combination".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Taylor coefficient of z^j via the trapezoid-rule Cauchy integral on the
/// circle of the given radius:
///
///   a_j = (1/N) * sum_k f(r e^{i th_k}) e^{-i j th_k} / r^j.
///
/// Exponentially accurate in N for f analytic past the circle. `samples`
/// must be a power of two, at least 64.
pub fn coefficient<F: Analytic + ?Sized>(
    f: &F,
    j: usize,
    radius: f64,
    samples: usize,
) -> Result<Complex64> {
    if !(0.0 < radius && radius < 1.0) {
        return Err(Error::InvalidInput(format!("extraction radius {radius} not in (0,1)")));
    }
    if samples < 64 || !samples.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "samples = {samples} must be a power of two >= 64"
        )));
    }
    let values: Vec<Complex64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / samples as f64;
            f.eval(Complex64::from_polar(radius, theta))
        })
        .collect::<Result<_>>()?;
    // Fixed summation order keeps the result independent of the thread count.
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        let theta = std::f64::consts::TAU * k as f64 / samples as f64;
        sum += v * Complex64::from_polar(1.0, -(j as f64) * theta);
    }
    Ok(sum / samples as f64 / radius.powi(j as i32))
}

/// Applies a functional with the default extraction circle.
pub fn apply_functional<F: Analytic + ?Sized>(
    l: &LinearFunctional,
    f: &F,
) -> Result<Complex64> {
    apply_functional_with(l, f, tol::COEFF_RADIUS, tol::COEFF_SAMPLES)
}

/// Applies a functional, extracting coefficients on the given circle.
pub fn apply_functional_with<F: Analytic + ?Sized>(
    l: &LinearFunctional,
    f: &F,
    radius: f64,
    samples: usize,
) -> Result<Complex64> {
    l.validate()?;
    match l {
        LinearFunctional::CoefficientIndex(j) => coefficient(f, *j, radius, samples),
        LinearFunctional::FiniteCombination(terms) => {
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, w) in terms {
                sum += w * coefficient(f, *j, radius, samples)?;
            }
            Ok(sum)
        }
        LinearFunctional::PointEvaluation(z) => f.eval(*z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{koebe, MapSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ok(f: impl Fn(Complex64) -> Complex64 + Sync) -> impl Analytic {
        move |z| Ok(f(z))
    }

    #[test]
    fn identity_normalization() {
        let a1 = coefficient(&MapSpec::Identity, 1, 0.5, 256).unwrap();
        assert_abs_diff_eq!(a1.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a1.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn koebe_taylor_oracle() {
        // K(z) = z + 2 z^2 + 3 z^3 + ...
        for j in 1..=6 {
            let aj = coefficient(&MapSpec::Koebe, j, 0.5, 256).unwrap();
            assert_abs_diff_eq!(aj.re, j as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(aj.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn koebe_square_second_coefficient() {
        // K(z)^2 = z^2 + 4 z^3 + ..., so the z^2 coefficient is 1; same for
        // the rotation z/(1+z)^2 squared.
        let sq = ok(|z| koebe(z) * koebe(z));
        let v = coefficient(&sq, 2, 0.5, 256).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
        let rot = ok(|z| {
            let w = z / ((1.0 + z) * (1.0 + z));
            w * w
        });
        let v = apply_functional(&LinearFunctional::CoefficientIndex(2), &rot).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn point_evaluation_at_origin_vanishes() {
        let l = LinearFunctional::PointEvaluation(c(0.0, 0.0));
        let v = apply_functional(&l, &MapSpec::Koebe).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn linearity_on_catalog_pairs() {
        let l = LinearFunctional::CoefficientIndex(2);
        let f = MapSpec::Koebe;
        let g = MapSpec::HalfPlane;
        let combo = ok(|z| koebe(z) + z / (1.0 - z));
        let lhs = apply_functional(&l, &combo).unwrap();
        let rhs = apply_functional(&l, &f).unwrap() + apply_functional(&l, &g).unwrap();
        assert!((lhs - rhs).norm() < tol::LINEARITY);
    }

    #[test]
    fn finite_combination_matches_manual_sum() {
        let l = LinearFunctional::FiniteCombination(vec![
            (1, c(2.0, 0.0)),
            (2, c(0.0, 1.0)),
        ]);
        let v = apply_functional(&l, &MapSpec::Koebe).unwrap();
        // 2*1 + i*2 for the Koebe coefficients a1 = 1, a2 = 2.
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn convergence_doubles_digits_until_floor() {
        // At radius 0.8 the aliasing error of a_2 for the Koebe map is
        // a_66 * 0.8^64 ~ 4e-5 with 64 nodes and a_130 * 0.8^128 ~ 5e-11
        // with 128; by 256 nodes it is below the round-off floor.
        let r = 0.8;
        let e64 = (coefficient(&MapSpec::Koebe, 2, r, 64).unwrap() - 2.0).norm();
        let e128 = (coefficient(&MapSpec::Koebe, 2, r, 128).unwrap() - 2.0).norm();
        let e256 = (coefficient(&MapSpec::Koebe, 2, r, 256).unwrap() - 2.0).norm();
        assert!(e64 > 1e-6 && e64 < 1e-3, "e64 = {e64}");
        assert!(e128 < e64 * e64 * 10.0, "e128 = {e128} vs e64^2 = {}", e64 * e64);
        assert!(e256 < 1e-12, "e256 = {e256}");
    }

    #[test]
    fn invalid_sampling_rejected() {
        assert!(coefficient(&MapSpec::Identity, 1, 0.5, 100).is_err());
        assert!(coefficient(&MapSpec::Identity, 1, 0.5, 32).is_err());
        assert!(coefficient(&MapSpec::Identity, 1, 1.5, 256).is_err());
        assert!(LinearFunctional::PointEvaluation(c(1.2, 0.0)).validate().is_err());
    }
}
