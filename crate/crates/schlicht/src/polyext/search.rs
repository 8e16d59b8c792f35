//! Multi-start derivative-free maximization of |L(p)| over certified
//! univalent polynomials.
//!
//! Candidates live in R^{2(n-1)} (real and imaginary parts of a2..an).
//! Feasibility is enforced by rejection: an uncertified candidate scores
//! -inf. The maximizer sits on the feasibility edge, so a coarse pass at a
//! cheap certification resolution is followed by a fine-resolution polish
//! around the incumbent.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::LinearFunctional;
use crate::tol;

use super::{
    boundary_derivative_min, boundary_zeros, certify_fast, is_univalent, PolynomialCandidate,
    UnivalenceCertificate,
};

/// Search settings; the seed pins the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub multistarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Certification resolution during the coarse pass.
    pub coarse_samples: usize,
    /// Certification resolution for the polish and the final certificate.
    pub fine_samples: usize,
    /// Simplex convergence tolerance on the coefficient vector.
    pub xtol: f64,
    /// Spread of the random starts around the identity.
    pub start_spread: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            multistarts: 32,
            max_iters: 400,
            seed: 0x5eed,
            coarse_samples: 512,
            fine_samples: tol::CERT_SAMPLES,
            xtol: 1e-9,
            start_spread: 0.3,
        }
    }
}

/// Outcome of an extremal search.
#[derive(Debug, Clone)]
pub struct ExtremalResult {
    pub polynomial: PolynomialCandidate,
    pub functional_value: Complex64,
    /// |L(p)| at the reported polynomial.
    pub objective: f64,
    pub certificate: UnivalenceCertificate,
    pub boundary_derivative_min: f64,
    pub boundary_argmin_angle: f64,
    /// Angles where |p'| dips below the detection threshold.
    pub zero_angles: Vec<f64>,
    /// p'' at each detected zero.
    pub second_derivative_at_zeros: Vec<Complex64>,
    /// Distinct coarse-pass maxima within 99.9% of the best objective.
    pub near_optima: Vec<(PolynomialCandidate, f64)>,
    pub evaluations: usize,
}

fn poly_from(x: &[f64], n: usize) -> PolynomialCandidate {
    let upper: Vec<Complex64> =
        (0..n - 1).map(|k| Complex64::new(x[2 * k], x[2 * k + 1])).collect();
    PolynomialCandidate { degree_cap: n, upper }
}

/// Score to minimize: -|L(p)| for certified candidates, +inf otherwise.
fn score(l: &LinearFunctional, x: &[f64], n: usize, m: usize, evals: &mut usize) -> f64 {
    *evals += 1;
    let p = poly_from(x, n);
    if !certify_fast(&p, m) {
        return f64::INFINITY;
    }
    match p.functional_value(l) {
        Ok(v) => -v.norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Plain Nelder-Mead with shrink-restart on stagnation. Returns the best
/// point, its value and the evaluation count.
fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    max_iters: usize,
    xtol: f64,
) -> (Vec<f64>, f64) {
    fn build_simplex(
        f: &mut impl FnMut(&[f64]) -> f64,
        center: &[f64],
        step: f64,
    ) -> Vec<(Vec<f64>, f64)> {
        let mut simplex = Vec::with_capacity(center.len() + 1);
        simplex.push((center.to_vec(), f(center)));
        for i in 0..center.len() {
            let mut v = center.to_vec();
            v[i] += step;
            let fv = f(&v);
            simplex.push((v, fv));
        }
        simplex
    }

    let dim = x0.len();
    let mut simplex = build_simplex(&mut f, x0, scale);

    let mut stagnation = 0usize;
    let mut best_seen = f64::INFINITY;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN scores"));
        let best = simplex[0].1;
        if best < best_seen - 1e-14 {
            best_seen = best;
            stagnation = 0;
        } else {
            stagnation += 1;
        }

        // Simplex diameter against the convergence tolerance.
        let diam = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter().zip(simplex[0].0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diam < xtol {
            break;
        }
        if stagnation > 60 {
            let center = simplex[0].0.clone();
            simplex = build_simplex(&mut f, &center, (diam * 0.3).max(xtol * 10.0));
            stagnation = 0;
            continue;
        }

        let worst = simplex[dim].1;
        let second_worst = simplex[dim - 1].1;
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(v, _)| v[i]).sum::<f64>() / dim as f64)
            .collect();
        let at = |t: f64| -> Vec<f64> {
            (0..dim).map(|i| centroid[i] + t * (simplex[dim].0[i] - centroid[i])).collect()
        };

        let reflected = at(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = at(-2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < second_worst {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst { at(-0.5) } else { at(0.5) };
            let fc = f(&contracted);
            if fc < worst.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let best_v = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for i in 0..dim {
                        entry.0[i] = best_v[i] + 0.5 * (entry.0[i] - best_v[i]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN scores"));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx)
}

/// Probes the functional over a handful of family members; constant
/// functionals (including coefficients beyond the degree cap) are refused.
fn constancy_probe(l: &LinearFunctional, n: usize) -> Result<Complex64> {
    let mut probes: Vec<PolynomialCandidate> = vec![PolynomialCandidate::identity(n)];
    for j in 2..=n {
        let scale = 1.0 / (2.0 * j as f64);
        let mut a = vec![Complex64::new(0.0, 0.0); j - 1];
        a[j - 2] = Complex64::new(scale, 0.0);
        probes.push(PolynomialCandidate::new(n, a.clone())?);
        a[j - 2] = Complex64::new(0.0, scale);
        probes.push(PolynomialCandidate::new(n, a)?);
    }
    let values: Vec<Complex64> =
        probes.iter().map(|p| p.functional_value(l)).collect::<Result<_>>()?;
    let base = values[0];
    let variation = values.iter().map(|v| (v - base).norm()).fold(0.0, f64::max);
    if variation < 1e-12 {
        return Err(Error::ConstantFunctional);
    }
    Ok(base)
}

/// Maximizes |L(p)| over certified candidates of degree at most n.
pub fn maximize_functional(
    l: &LinearFunctional,
    n: usize,
    cfg: &SearchConfig,
) -> Result<ExtremalResult> {
    if n < 2 {
        return Err(Error::InvalidInput("degree cap must be at least 2".into()));
    }
    l.validate()?;
    constancy_probe(l, n)?;

    let dim = 2 * (n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    while starts.len() < cfg.multistarts {
        let mut tries = 0;
        loop {
            let x: Vec<f64> = (0..dim)
                .map(|i| {
                    let coeff_index = i / 2 + 2;
                    let spread = cfg.start_spread / coeff_index as f64;
                    rng.gen_range(-spread..spread)
                })
                .collect();
            tries += 1;
            if certify_fast(&poly_from(&x, n), cfg.coarse_samples) {
                starts.push(x);
                break;
            }
            if tries > 30 {
                starts.push(vec![0.0; dim]);
                break;
            }
        }
    }
    if starts.is_empty() {
        return Err(Error::NoFeasibleStart);
    }

    // Coarse pass, one Nelder-Mead run per start.
    let coarse: Vec<(Vec<f64>, f64, usize)> = starts
        .par_iter()
        .map(|x0| {
            let mut evals = 0usize;
            let (x, fx) = nelder_mead(
                |x| score(l, x, n, cfg.coarse_samples, &mut evals),
                x0,
                0.1,
                cfg.max_iters,
                cfg.xtol.max(1e-7),
            );
            (x, fx, evals)
        })
        .collect();

    let mut evaluations: usize = coarse.iter().map(|(_, _, e)| e).sum();
    let mut best_idx = 0;
    for (i, entry) in coarse.iter().enumerate() {
        if entry.1 < coarse[best_idx].1 {
            best_idx = i;
        }
    }
    if !coarse[best_idx].1.is_finite() {
        return Err(Error::NoFeasibleStart);
    }

    // The coarse incumbent can overshoot into the thin infeasible band the
    // coarse resolution cannot see; contract it toward the identity until
    // the fine certifier accepts it.
    let mut fine_evals = 0usize;
    let mut polish_start = coarse[best_idx].0.clone();
    for _ in 0..200 {
        if score(l, &polish_start, n, cfg.fine_samples, &mut fine_evals).is_finite() {
            break;
        }
        for v in polish_start.iter_mut() {
            *v *= 0.9995;
        }
    }
    let (x1, _) = nelder_mead(
        |x| score(l, x, n, cfg.fine_samples, &mut fine_evals),
        &polish_start,
        1e-3,
        cfg.max_iters,
        cfg.xtol,
    );
    let (x_best, f_best) = nelder_mead(
        |x| score(l, x, n, cfg.fine_samples, &mut fine_evals),
        &x1,
        1e-6,
        cfg.max_iters,
        cfg.xtol,
    );
    evaluations += fine_evals;
    if !f_best.is_finite() {
        return Err(Error::NoFeasibleStart);
    }

    let polynomial = poly_from(&x_best, n);
    let functional_value = polynomial.functional_value(l)?;
    let objective = functional_value.norm();
    let certificate = is_univalent(&polynomial, cfg.fine_samples)?;

    // Distinct coarse maxima within 99.9% of the best objective.
    let mut near_optima: Vec<(PolynomialCandidate, f64)> = Vec::new();
    for (x, fx, _) in &coarse {
        if !fx.is_finite() {
            continue;
        }
        let obj = -fx;
        if obj >= 0.999 * objective {
            let p = poly_from(x, n);
            let dup = near_optima.iter().any(|(q, _)| {
                p.upper()
                    .iter()
                    .zip(q.upper().iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
                    < 1e-4
            }) || p
                .upper()
                .iter()
                .zip(polynomial.upper().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                < 1e-4;
            if !dup {
                near_optima.push((p, obj));
            }
        }
    }

    let (bd_min, bd_angle) = boundary_derivative_min(&polynomial, cfg.fine_samples.max(1024))?;
    let zeros = boundary_zeros(&polynomial, cfg.fine_samples.max(1024));
    let zero_angles = zeros.iter().map(|(a, _)| *a).collect();
    let second_derivative_at_zeros = zeros.iter().map(|(_, pp)| *pp).collect();

    Ok(ExtremalResult {
        polynomial,
        functional_value,
        objective,
        certificate,
        boundary_derivative_min: bd_min,
        boundary_argmin_angle: bd_angle,
        zero_angles,
        second_derivative_at_zeros,
        near_optima,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quick_config() -> SearchConfig {
        SearchConfig { multistarts: 8, coarse_samples: 512, fine_samples: 2048, ..Default::default() }
    }

    #[test]
    fn second_coefficient_extremal_at_degree_two() {
        let l = LinearFunctional::CoefficientIndex(2);
        let r = maximize_functional(&l, 2, &quick_config()).unwrap();
        assert_abs_diff_eq!(r.objective, 0.5, epsilon = 1e-6);
        assert!(r.boundary_derivative_min < tol::ZERO_DETECT, "min {}", r.boundary_derivative_min);
        assert!(!r.zero_angles.is_empty());
        // The zero of p' sits opposite the coefficient phase.
        let predicted = std::f64::consts::PI - r.functional_value.arg();
        let angle = r.zero_angles[0];
        let diff = (angle - predicted).rem_euclid(std::f64::consts::TAU);
        assert!(diff.min(std::f64::consts::TAU - diff) < 1e-3, "angle {angle} vs {predicted}");
        for pp in &r.second_derivative_at_zeros {
            assert!(pp.norm() > tol::SIMPLICITY);
        }
    }

    #[test]
    fn constant_functionals_are_refused() {
        for l in [
            LinearFunctional::CoefficientIndex(0),
            LinearFunctional::CoefficientIndex(1),
            LinearFunctional::CoefficientIndex(7),
            LinearFunctional::PointEvaluation(Complex64::new(0.0, 0.0)),
        ] {
            assert!(matches!(
                maximize_functional(&l, 3, &quick_config()),
                Err(Error::ConstantFunctional)
            ));
        }
    }

    #[test]
    fn phase_rotated_functional_gives_same_objective() {
        let base = maximize_functional(
            &LinearFunctional::CoefficientIndex(2),
            2,
            &quick_config(),
        )
        .unwrap();
        for psi in [std::f64::consts::FRAC_PI_3, std::f64::consts::PI] {
            let l = LinearFunctional::FiniteCombination(vec![(
                2,
                Complex64::from_polar(1.0, psi),
            )]);
            let r = maximize_functional(&l, 2, &quick_config()).unwrap();
            assert_abs_diff_eq!(r.objective, base.objective, epsilon = 1e-6);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let l = LinearFunctional::CoefficientIndex(2);
        let a = maximize_functional(&l, 2, &quick_config()).unwrap();
        let b = maximize_functional(&l, 2, &quick_config()).unwrap();
        assert_eq!(a.polynomial, b.polynomial);
        assert_eq!(a.evaluations, b.evaluations);
    }
}
