//! Sampled injectivity perturbation radius.
//!
//! For f injective and analytic near the closed disk with nonvanishing
//! derivative on the boundary, any perturbation f + w0 g stays injective
//! when |w0| < eps / M, where eps is the infimum of |f(z)-f(w)| / |z-w| and
//! M the supremum of |g(z)-g(w)| / |z-w| over closed-disk pairs (difference
//! quotients, derivatives on the diagonal). Both extremes are estimated on
//! a tensor grid, so the returned radius is a sampled lower bound.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::Analytic;
use crate::tol;

/// The estimate together with the grid extremes it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationEstimate {
    /// Admissible perturbation radius eps / M (infinite when g is constant
    /// on the grid).
    pub delta: f64,
    /// Sampled injectivity margin eps of the base map.
    pub injectivity_margin: f64,
    /// Sampled difference-quotient bound M of the perturbation direction.
    pub perturbation_bound: f64,
    /// Minimum |f'| over the boundary ring.
    pub min_boundary_derivative: f64,
    /// Number of grid points used.
    pub points: usize,
}

/// Central difference derivative; exact for polynomials of degree <= 2 and
/// O(h^2) otherwise. Evaluators must tolerate |z| slightly above 1.
fn derivative<F: Analytic + ?Sized>(f: &F, z: Complex64) -> Result<Complex64> {
    let h = tol::DIFF_STEP;
    Ok((f.eval(z + h)? - f.eval(z - h)?) / (2.0 * h))
}

/// Estimates the perturbation radius on a `gridsize x gridsize` tensor grid
/// of boundary-plus-interior points (radii 0..1 times equispaced angles).
///
/// Fails with `DerivativeVanishesOnBoundary` when min |f'| on the outer
/// ring drops below tolerance, which breaks the injectivity hypothesis.
pub fn perturbation_radius<F, G>(f: &F, g: &G, gridsize: usize) -> Result<PerturbationEstimate>
where
    F: Analytic + ?Sized,
    G: Analytic + ?Sized,
{
    if gridsize < 4 {
        return Err(Error::InvalidInput("gridsize must be at least 4".into()));
    }
    // Tensor grid; the origin ring collapses to a single point.
    let mut points = vec![Complex64::new(0.0, 0.0)];
    for i in 1..gridsize {
        let r = i as f64 / (gridsize - 1) as f64;
        for j in 0..gridsize {
            let theta = std::f64::consts::TAU * j as f64 / gridsize as f64;
            points.push(Complex64::from_polar(r, theta));
        }
    }

    let fv: Vec<Complex64> =
        points.par_iter().map(|&z| f.eval(z)).collect::<Result<_>>()?;
    let gv: Vec<Complex64> =
        points.par_iter().map(|&z| g.eval(z)).collect::<Result<_>>()?;
    let fd: Vec<Complex64> =
        points.par_iter().map(|&z| derivative(f, z)).collect::<Result<_>>()?;
    let gd: Vec<Complex64> =
        points.par_iter().map(|&z| derivative(g, z)).collect::<Result<_>>()?;

    let boundary_start = points.len() - gridsize;
    let min_boundary_derivative = fd[boundary_start..]
        .iter()
        .map(|d| d.norm())
        .fold(f64::INFINITY, f64::min);
    if min_boundary_derivative < tol::BOUNDARY_DERIVATIVE_FLOOR {
        return Err(Error::DerivativeVanishesOnBoundary { min_abs: min_boundary_derivative });
    }

    // Diagonal contributions.
    let mut eps = fd.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    let mut m = gd.iter().map(|d| d.norm()).fold(0.0, f64::max);

    // Off-diagonal pairs, row-parallel; min/max reductions are order-free.
    let n = points.len();
    let (pair_eps, pair_m) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row_eps = f64::INFINITY;
            let mut row_m: f64 = 0.0;
            for j in (i + 1)..n {
                let dz = points[i] - points[j];
                let inv = 1.0 / dz.norm();
                row_eps = row_eps.min((fv[i] - fv[j]).norm() * inv);
                row_m = row_m.max((gv[i] - gv[j]).norm() * inv);
            }
            (row_eps, row_m)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    eps = eps.min(pair_eps);
    m = m.max(pair_m);

    let delta = if m == 0.0 { f64::INFINITY } else { eps / m };
    Ok(PerturbationEstimate {
        delta,
        injectivity_margin: eps,
        perturbation_bound: m,
        min_boundary_derivative,
        points: n,
    })
}
