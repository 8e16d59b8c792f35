//! Radial Loewner chains for slit mappings.
//!
//! A slit mapping f embeds in a chain f(z,t) = e^{-t}(z + ...) driven by a
//! unimodular function k(t):
//!
//!   df/dt = -f (1 + kf) / (1 - kf),      f(z,0) = z,
//!
//! with e^t f(z,t) -> f(z) uniformly on compacta. The module integrates the
//! chain adaptively, carries a closed-form oracle for constant driving
//! (where the chain inverts the Koebe map), and decomposes the variational
//! tail integral attached to a support point into its leading term, its
//! second-order tail and the remainder, together with the verification
//! residuals of that decomposition.

mod ode;

pub use ode::{integrate, StepControl};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::LinearFunctional;
use crate::maps::{koebe, MapSpec};
use crate::tol;

/// The unimodular driving term of a chain.
#[derive(Debug, Clone, PartialEq)]
pub enum DrivingFunction {
    /// k(t) = kappa for all t.
    Constant { kappa: Complex64 },
    /// Piecewise-linear interpolation of sampled angles (s, angle), constant
    /// beyond the last sample. Storing angles keeps |k| = 1 exactly.
    Tabulated { samples: Vec<(f64, f64)>, limit_angle: f64 },
}

impl DrivingFunction {
    pub fn constant(kappa: Complex64) -> Result<Self> {
        if (kappa.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("driving value {kappa} is not unimodular")));
        }
        Ok(DrivingFunction::Constant { kappa: kappa / kappa.norm() })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, limit_angle: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("tabulated driving needs samples".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput("tabulated times must increase".into()));
        }
        Ok(DrivingFunction::Tabulated { samples, limit_angle })
    }

    /// k(s).
    pub fn kappa(&self, s: f64) -> Complex64 {
        match self {
            DrivingFunction::Constant { kappa } => *kappa,
            DrivingFunction::Tabulated { samples, .. } => {
                let angle = if s <= samples[0].0 {
                    samples[0].1
                } else if s >= samples[samples.len() - 1].0 {
                    samples[samples.len() - 1].1
                } else {
                    let i = samples.partition_point(|(si, _)| *si <= s) - 1;
                    let (s0, a0) = samples[i];
                    let (s1, a1) = samples[i + 1];
                    a0 + (a1 - a0) * (s - s0) / (s1 - s0)
                };
                Complex64::from_polar(1.0, angle)
            }
        }
    }

    /// lim k(s).
    pub fn limit(&self) -> Complex64 {
        match self {
            DrivingFunction::Constant { kappa } => *kappa,
            DrivingFunction::Tabulated { limit_angle, .. } => {
                Complex64::from_polar(1.0, *limit_angle)
            }
        }
    }
}

/// A chain: driving function plus integrator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerChain {
    pub driving: DrivingFunction,
    pub control: StepControl,
    pub horizon: f64,
}

impl LoewnerChain {
    pub fn new(driving: DrivingFunction) -> Self {
        LoewnerChain { driving, control: StepControl::default(), horizon: tol::ODE_HORIZON }
    }

    pub fn with_control(mut self, control: StepControl) -> Self {
        self.control = control;
        self
    }
}

/// kf term of the chain equation, computed from the scaled state u = e^s f.
fn kf_term(driving: &DrivingFunction, s: f64, u: Complex64) -> Result<Complex64> {
    let kf = driving.kappa(s) * u * (-s).exp();
    if (1.0 - kf).norm() < tol::SINGULARITY_GUARD {
        return Err(Error::SingularityApproach { s });
    }
    Ok(kf)
}

/// The chain is integrated in the scaled variable u(s) = e^s f(z,s), which
/// satisfies u' = -2 u kf / (1 - kf) and stays O(1) all the way down the
/// exponential decay of f, so relative error control keeps meaning.
fn scaled_rhs(driving: &DrivingFunction, s: f64, u: Complex64) -> Result<Complex64> {
    let kf = kf_term(driving, s, u)?;
    Ok(-2.0 * u * kf / (1.0 - kf))
}

fn solve_scaled(chain: &LoewnerChain, z: Complex64, t: f64) -> Result<Complex64> {
    if z.norm() > 0.95 {
        return Err(Error::InvalidInput(format!(
            "|z| = {} exceeds the solver domain |z| <= 0.95",
            z.norm()
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidInput("time must be nonnegative".into()));
    }
    if t > chain.horizon {
        return Err(Error::HorizonExceeded { t, horizon: chain.horizon });
    }
    if z.norm() == 0.0 {
        return Ok(z);
    }
    let y = integrate(
        |s, y: &[Complex64; 1]| Ok([scaled_rhs(&chain.driving, s, y[0])?]),
        0.0,
        t,
        [z],
        &chain.control,
    )?;
    Ok(y[0])
}

/// f(z, t) by adaptive integration from f(z, 0) = z.
pub fn ode_solve(chain: &LoewnerChain, z: Complex64, t: f64) -> Result<Complex64> {
    Ok((-t).exp() * solve_scaled(chain, z, t)?)
}

/// e^horizon f(z, horizon), the numerical chain limit.
pub fn chain_limit_eval(
    driving: &DrivingFunction,
    z: Complex64,
    horizon: f64,
    control: &StepControl,
) -> Result<Complex64> {
    let chain =
        LoewnerChain { driving: driving.clone(), control: control.clone(), horizon: f64::MAX };
    solve_scaled(&chain, z, horizon)
}

/// Closed-form chain for k = -1: the w with K(w) = e^{-t} K(z) inside the
/// disk, K the Koebe map. The two roots of the quadratic have product 1;
/// the one of modulus < 1 is selected.
pub fn explicit_koebe_chain(z: Complex64, t: f64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain { z });
    }
    let q = (-t).exp() * koebe(z);
    if q.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // q w^2 - (2q + 1) w + q = 0, written to avoid cancellation for small q.
    let disc = (4.0 * q + 1.0).sqrt();
    let small = 2.0 * q / (2.0 * q + 1.0 + disc);
    let large = (2.0 * q + 1.0 + disc) / (2.0 * q);
    let (ns, nl) = (small.norm(), large.norm());
    if (ns - 1.0).abs() < 1e-10 && (nl - 1.0).abs() < 1e-10 {
        return Err(Error::RootSelectionAmbiguous);
    }
    Ok(if ns < 1.0 { small } else { large })
}

/// Closed-form chain for constant driving kappa, by rotation conjugation of
/// the k = -1 chain.
pub fn explicit_constant_chain(kappa: Complex64, z: Complex64, t: f64) -> Result<Complex64> {
    let c = -kappa;
    Ok(explicit_koebe_chain(c * z, t)? / c)
}

/// Integrand h(z,s) = d/ds { e^s f(z,s) } = -e^s f * 2kf / (1 - kf).
pub fn h_integrand(chain: &LoewnerChain, z: Complex64, s: f64) -> Result<Complex64> {
    let f = ode_solve(chain, z, s)?;
    let kf = chain.driving.kappa(s) * f;
    let den = 1.0 - kf;
    if den.norm() < tol::SINGULARITY_GUARD {
        return Err(Error::SingularityApproach { s });
    }
    Ok(-s.exp() * f * 2.0 * kf / den)
}

/// A truncated tail quadrature with its discarded-tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalValue {
    pub value: Complex64,
    /// Estimated magnitude of the discarded tail (integrand at the cut,
    /// which is also C e^{-T} for an e^{-s}-decaying integrand).
    pub tail_bound: f64,
    pub t_max: f64,
}

/// Quadrature of int_t^{T} e^s f (kf) / (1 - kf) ds with the chain solved
/// along the way; fails with `TailBoundLoose` if the discarded tail exceeds
/// `tail_tol`.
pub fn variational_integral(
    chain: &LoewnerChain,
    z: Complex64,
    t: f64,
    t_max: f64,
    tail_tol: f64,
) -> Result<VariationalValue> {
    if t_max < t + 20.0 {
        return Err(Error::InvalidInput("truncation must sit at least 20 units past t".into()));
    }
    let u_t = solve_scaled(chain, z, t)?;
    let zero = Complex64::new(0.0, 0.0);
    let y = integrate(
        |s, y: &[Complex64; 2]| {
            let u = y[0];
            let kf = kf_term(&chain.driving, s, u)?;
            let den = 1.0 - kf;
            Ok([-2.0 * u * kf / den, u * kf / den])
        },
        t,
        t_max,
        [u_t, zero],
        &chain.control,
    )?;
    let u_end = y[0];
    let kf = kf_term(&chain.driving, t_max, u_end)?;
    let tail_bound = (u_end * kf / (1.0 - kf)).norm();
    if tail_bound > tail_tol {
        return Err(Error::TailBoundLoose { estimate: tail_bound, requested: tail_tol });
    }
    Ok(VariationalValue { value: y[1], tail_bound, t_max })
}

/// A support point of the family: the map, the boundary preimage of the
/// slit tip, and the tip value.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPointData {
    pub map: MapSpec,
    pub z0: Complex64,
    pub w0: Complex64,
}

impl SupportPointData {
    /// Support data of the chain limit for constant driving kappa: the
    /// rotated Koebe map with z0 = conj(kappa) and tip conj(kappa)/4 * (-1)
    /// rotated accordingly.
    pub fn for_constant_driving(kappa: Complex64) -> Result<Self> {
        if (kappa.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("driving value must be unimodular".into()));
        }
        let c = -kappa;
        let map = MapSpec::RotatedKoebe { angle: c.arg() };
        let z0 = kappa.conj();
        let w0 = -0.25 * c.conj();
        Ok(SupportPointData { map, z0, w0 })
    }

    /// Radial-limit diagnostics at the tip preimage: (|f'(r z0)|, |f(r z0) - w0|)
    /// for r = 1 - 1e-6.
    pub fn verify(&self) -> Result<(f64, f64)> {
        let r = 1.0 - 1e-6;
        let z = r * self.z0;
        let h = 1e-7;
        let d = (self.map.eval(z + h * self.z0)? - self.map.eval(z - h * self.z0)?) / (2.0 * h);
        let v = self.map.eval(z)?;
        Ok((d.norm(), (v - self.w0).norm()))
    }
}

/// The decomposition of the variational integral at one time t.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDecomposition {
    pub t: f64,
    /// Truncation point of the tail quadratures.
    pub truncation: f64,
    /// L applied to conj(z0) f^2 e^{-t}.
    pub leading: Complex64,
    /// L applied to the second-order tail integral.
    pub second_order: Complex64,
    /// Remainder by subtraction from the full variational integral.
    pub remainder: Complex64,
    /// The same remainder integrated directly from its integrand.
    pub remainder_direct: Complex64,
    /// |remainder - remainder_direct|: the identity-closure residual.
    pub closure_residual: f64,
    /// Re(leading) + Re(second_order) + Re(remainder); equals Re L of the
    /// full integral and must be <= 0 up to quadrature error when the map
    /// maximizes Re L.
    pub sum_re: f64,
    /// Estimated magnitude of the discarded quadrature tail.
    pub tail_bound: f64,
}

/// Settings for tail decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct TailConfig {
    pub extraction_radius: f64,
    pub extraction_samples: usize,
    pub tail_offset: f64,
    pub control: StepControl,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig {
            extraction_radius: tol::COEFF_RADIUS,
            extraction_samples: tol::COEFF_SAMPLES,
            tail_offset: tol::TAIL_OFFSET,
            control: StepControl::default(),
        }
    }
}

/// Per-point tail quantities: [conj(z0) f^2, I_full, I_second, I_remainder]
/// plus the discarded-tail magnitude.
fn tail_values_at(
    chain: &LoewnerChain,
    support: &SupportPointData,
    z: Complex64,
    t: f64,
    t_max: f64,
    cfg: &TailConfig,
) -> Result<([Complex64; 4], f64)> {
    let z0_bar = support.z0.conj();
    let f_lim = support.map.eval(z)?;
    let lead = z0_bar * f_lim * f_lim;

    if let DrivingFunction::Constant { kappa } = chain.driving {
        // Closed-form trajectory: panelled Gauss-Legendre keeps quadrature
        // noise far below the truncation tail e^{-T}.
        let integrands = |s: f64| -> Result<[Complex64; 3]> {
            let f = explicit_constant_chain(kappa, z, s)?;
            let kf = kappa * f;
            let den = 1.0 - kf;
            if den.norm() < tol::SINGULARITY_GUARD {
                return Err(Error::SingularityApproach { s });
            }
            let es = s.exp();
            let eps = es * f - f_lim;
            Ok([
                es * f * kf / den,
                es * f * kf * kf / den,
                z0_bar * (2.0 * eps * f_lim + eps * eps) * (-s).exp(),
            ])
        };
        let sums = gl_panels(&integrands, t, t_max, 1.5)?;
        let tail = integrands(t_max)?[0].norm();
        Ok(([lead, sums[0], sums[1], sums[2]], tail))
    } else {
        let u_t = solve_scaled(chain, z, t)?;
        let zero = Complex64::new(0.0, 0.0);
        let y = integrate(
            |s, y: &[Complex64; 4]| {
                let u = y[0];
                let kf = kf_term(&chain.driving, s, u)?;
                let den = 1.0 - kf;
                let eps = u - f_lim;
                let delta = chain.driving.kappa(s) - z0_bar;
                let fe = f_lim + eps;
                Ok([
                    -2.0 * u * kf / den,
                    u * kf / den,
                    u * kf * kf / den,
                    (z0_bar * (2.0 * eps * f_lim + eps * eps) + delta * fe * fe) * (-s).exp(),
                ])
            },
            t,
            t_max,
            [u_t, zero, zero, zero],
            &cfg.control,
        )?;
        let u_end = y[0];
        let kf = kf_term(&chain.driving, t_max, u_end)?;
        let tail = (u_end * kf / (1.0 - kf)).norm();
        Ok(([lead, y[1], y[2], y[3]], tail))
    }
}

/// Trapezoid coefficient extraction from precomputed circle values.
fn extract(values: &[Complex64], j: usize, radius: f64) -> Complex64 {
    let n = values.len();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        let theta = std::f64::consts::TAU * k as f64 / n as f64;
        sum += v * Complex64::from_polar(1.0, -(j as f64) * theta);
    }
    sum / n as f64 / radius.powi(j as i32)
}

/// Computes the tail decomposition of the variational integral at time t
/// for the given functional.
///
/// The remainder is reported by subtraction (full - leading - second) and
/// cross-checked against the direct quadrature of its integrand; the
/// closure residual is the distance between the two routes.
pub fn tail_report(
    l: &LinearFunctional,
    chain: &LoewnerChain,
    support: &SupportPointData,
    t: f64,
    cfg: &TailConfig,
) -> Result<TailDecomposition> {
    if t <= 0.0 {
        return Err(Error::InvalidInput("report time must be positive".into()));
    }
    l.validate()?;
    if (chain.driving.limit() - support.z0.conj()).norm() > 1e-9 {
        return Err(Error::InvalidInput(
            "chain limit must equal the conjugate tip preimage".into(),
        ));
    }
    let t_max = t + cfg.tail_offset;

    let applied: [Complex64; 4];
    let tail_bound;
    match l {
        LinearFunctional::PointEvaluation(zs) => {
            let (vals, tail) = tail_values_at(chain, support, *zs, t, t_max, cfg)?;
            applied = vals;
            tail_bound = tail;
        }
        _ => {
            let (r, m) = (cfg.extraction_radius, cfg.extraction_samples);
            let per_node: Vec<([Complex64; 4], f64)> = (0..m)
                .into_par_iter()
                .map(|k| {
                    let theta = std::f64::consts::TAU * k as f64 / m as f64;
                    tail_values_at(chain, support, Complex64::from_polar(r, theta), t, t_max, cfg)
                })
                .collect::<Result<_>>()?;
            tail_bound =
                per_node.iter().map(|(_, tail)| *tail).fold(0.0, f64::max);
            let component = |idx: usize| -> Vec<Complex64> {
                per_node.iter().map(|(v, _)| v[idx]).collect()
            };
            let apply_one = |values: &[Complex64]| -> Complex64 {
                match l {
                    LinearFunctional::CoefficientIndex(j) => extract(values, *j, r),
                    LinearFunctional::FiniteCombination(terms) => terms
                        .iter()
                        .map(|(j, w)| w * extract(values, *j, r))
                        .sum(),
                    LinearFunctional::PointEvaluation(_) => unreachable!(),
                }
            };
            applied = [
                apply_one(&component(0)),
                apply_one(&component(1)),
                apply_one(&component(2)),
                apply_one(&component(3)),
            ];
        }
    }

    let leading = applied[0] * (-t).exp();
    let full = applied[1];
    let second_order = applied[2];
    let remainder_direct = applied[3];
    let remainder = full - leading - second_order;
    let closure_residual = (remainder - remainder_direct).norm();
    let sum_re = leading.re + second_order.re + remainder.re;
    Ok(TailDecomposition {
        t,
        truncation: t_max,
        leading,
        second_order,
        remainder,
        remainder_direct,
        closure_residual,
        sum_re,
        tail_bound,
    })
}

/// The four benchmark values of the z^2-coefficient functional on the two
/// extremal rotations: L(f1^2), L(f2^2), Re L(conj(z0) f1^2) and
/// Re L(conj(z0) f2^2) for f1 = z/(1-z)^2 (z0 = -1) and f2 = z/(1+z)^2
/// (z0 = +1).
#[derive(Debug, Clone, PartialEq)]
pub struct SignTable {
    pub l_f1_squared: Complex64,
    pub l_f2_squared: Complex64,
    pub re_f1: f64,
    pub re_f2: f64,
}

pub fn coefficient_sign_table() -> Result<SignTable> {
    let l = LinearFunctional::CoefficientIndex(2);
    let f1 = |z: Complex64| -> Result<Complex64> {
        let v = koebe(z);
        Ok(v * v)
    };
    let f2 = |z: Complex64| -> Result<Complex64> {
        let v = z / ((1.0 + z) * (1.0 + z));
        Ok(v * v)
    };
    let l1 = crate::functional::apply_functional(&l, &f1)?;
    let l2 = crate::functional::apply_functional(&l, &f2)?;
    let z0_1 = Complex64::new(-1.0, 0.0);
    let z0_2 = Complex64::new(1.0, 0.0);
    Ok(SignTable {
        l_f1_squared: l1,
        l_f2_squared: l2,
        re_f1: (z0_1.conj() * l1).re,
        re_f2: (z0_2.conj() * l2).re,
    })
}

/// Composite Gauss-Legendre quadrature of a triple of integrands.
fn gl_panels<F>(f: &F, a: f64, b: f64, panel_len: f64) -> Result<[Complex64; 3]>
where
    F: Fn(f64) -> Result<[Complex64; 3]>,
{
    let (nodes, weights) = gauss_legendre_16();
    let panels = ((b - a) / panel_len).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut sums = [zero; 3];
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let v = f(mid + 0.5 * h * x)?;
            for i in 0..3 {
                sums[i] += 0.5 * h * w * v[i];
            }
        }
    }
    Ok(sums)
}

/// 16-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on
/// the Legendre recurrence.
fn gauss_legendre_16() -> ([f64; 16], [f64; 16]) {
    const N: usize = 16;
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    for i in 0..N / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..50 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[N - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[N - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::coefficient;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn koebe_chain() -> LoewnerChain {
        LoewnerChain::new(DrivingFunction::constant(c(-1.0, 0.0)).unwrap())
    }

    #[test]
    fn initial_condition_is_exact() {
        let chain = koebe_chain();
        let z = c(0.4, 0.3);
        assert_eq!(ode_solve(&chain, z, 0.0).unwrap(), z);
    }

    #[test]
    fn explicit_chain_basics() {
        // t = 0 returns z; t = ln 2 at z = 0.5 solves K(w) = 1, the root
        // (3 - sqrt(5)) / 2 inside the disk.
        let z = c(0.5, 0.0);
        assert!((explicit_koebe_chain(z, 0.0).unwrap() - z).norm() < 1e-12);
        let w = explicit_koebe_chain(z, 2.0_f64.ln()).unwrap();
        assert_abs_diff_eq!(w.re, (3.0 - 5.0_f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert!((koebe(w) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn ode_matches_explicit_chain() {
        let chain = koebe_chain();
        for &z in &[c(0.5, 0.0), c(-0.3, 0.6), c(0.1, -0.8), c(0.7, 0.2)] {
            for &t in &[0.5, 1.0, 2.0, 5.0] {
                let a = ode_solve(&chain, z, t).unwrap();
                let b = explicit_koebe_chain(z, t).unwrap();
                assert!((a - b).norm() < tol::ODE_ORACLE, "z={z} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn chain_limit_reaches_the_koebe_map() {
        let chain = koebe_chain();
        let z = c(0.5, 0.0);
        let v = 20.0_f64.exp() * ode_solve(&chain, z, 20.0).unwrap();
        assert!((v - 2.0).norm() < 1e-6, "limit via ode_solve {v}");
        let w = chain_limit_eval(
            &DrivingFunction::constant(c(-1.0, 0.0)).unwrap(),
            z,
            26.0,
            &StepControl::default(),
        )
        .unwrap();
        assert!((w - 2.0).norm() < 1e-9, "limit via scaled solve {w}");
    }

    #[test]
    fn conservation_along_trajectories() {
        // e^t K(f(z,t)) is a first integral of the kappa = -1 chain.
        let chain = koebe_chain();
        let z = c(0.35, 0.45);
        let reference = koebe(z);
        for &t in &[0.5, 1.5, 3.0, 6.0] {
            let f = ode_solve(&chain, z, t).unwrap();
            let value = t.exp() * koebe(f);
            assert!((value - reference).norm() < 1e-8, "t={t}: {value} vs {reference}");
        }
    }

    #[test]
    fn schwarz_bound_holds() {
        let chain = koebe_chain();
        for &z in &[c(0.5, 0.0), c(0.0, 0.9), c(-0.6, 0.3)] {
            for &t in &[0.3, 1.0, 4.0] {
                let f = ode_solve(&chain, z, t).unwrap();
                let bound = (-t).exp() * z.norm() / (1.0 - z.norm()).powi(2);
                assert!(f.norm() <= bound * (1.0 + 1e-9), "z={z} t={t}");
                assert!(f.norm() < 1.0);
            }
        }
    }

    #[test]
    fn normalization_coefficient_stays_one() {
        let chain = koebe_chain();
        for &t in &[0.5f64, 2.0, 5.0] {
            let scaled = |z: Complex64| -> Result<Complex64> {
                Ok(t.exp() * ode_solve(&chain, z, t)?)
            };
            let a1 = coefficient(&scaled, 1, 0.5, 256).unwrap();
            assert!((a1 - 1.0).norm() < 1e-8, "t={t}: a1 = {a1}");
        }
    }

    #[test]
    fn tabulated_constant_angle_matches_constant() {
        let tab = DrivingFunction::tabulated(
            vec![(0.0, std::f64::consts::PI), (10.0, std::f64::consts::PI)],
            std::f64::consts::PI,
        )
        .unwrap();
        let chain = LoewnerChain::new(tab);
        let z = c(0.4, 0.2);
        let a = ode_solve(&chain, z, 1.5).unwrap();
        let b = explicit_koebe_chain(z, 1.5).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn integrand_is_time_derivative() {
        // Central difference of e^s f(z,s) at s = 1.
        let chain = koebe_chain();
        let z = c(0.5, 0.0);
        let h = h_integrand(&chain, z, 1.0).unwrap();
        let d = 1e-4f64;
        let up = (1.0 + d).exp() * ode_solve(&chain, z, 1.0 + d).unwrap();
        let dn = (1.0 - d).exp() * ode_solve(&chain, z, 1.0 - d).unwrap();
        let fd = (up - dn) / (2.0 * d);
        assert!((h - fd).norm() < 1e-6, "h = {h}, fd = {fd}");
    }

    #[test]
    fn integrand_value_at_zero() {
        // At s = 0, f = z: -1 * 0.5 * 2 * (-0.5) / 1.5 = 1/3.
        let chain = koebe_chain();
        let h = h_integrand(&chain, c(0.5, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(h.re, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn integrand_decays_exponentially() {
        let chain = koebe_chain();
        let z = c(0.5, 0.0);
        let h10 = h_integrand(&chain, z, 10.0).unwrap().norm();
        let h12 = h_integrand(&chain, z, 12.0).unwrap().norm();
        let ratio = h12 / h10;
        assert!((ratio - (-2.0f64).exp()).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn variational_integral_at_origin_vanishes() {
        let chain = koebe_chain();
        let v = variational_integral(&chain, c(0.0, 0.0), 1.0, 26.0, 1e-8).unwrap();
        assert!(v.value.norm() < 1e-14);
    }

    #[test]
    fn variational_integral_closed_form() {
        // int_t^inf e^s f kf/(1-kf) ds = -(f(z) - e^t f(z,t)) / 2.
        let chain = koebe_chain();
        let z = c(0.5, 0.0);
        let t = 1.0;
        let v = variational_integral(&chain, z, t, t + 25.0, 1e-6).unwrap();
        let expected = -(koebe(z) - t.exp() * ode_solve(&chain, z, t).unwrap()) / 2.0;
        assert!((v.value - expected).norm() < 1e-9, "{} vs {expected}", v.value);
    }

    #[test]
    fn support_point_data_for_koebe() {
        let s = SupportPointData::for_constant_driving(c(-1.0, 0.0)).unwrap();
        assert_eq!(s.map, MapSpec::RotatedKoebe { angle: 0.0 });
        assert!((s.z0 - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((s.w0 - c(-0.25, 0.0)).norm() < 1e-12);
        let (dmin, werr) = s.verify().unwrap();
        assert!(dmin < 1e-4, "derivative at tip preimage {dmin}");
        assert!(werr < 1e-8, "tip value error {werr}");
    }

    #[test]
    fn tail_report_chain_with_own_functional() {
        // The Koebe map maximizes the real z^2 coefficient, so the full
        // variational integral has nonpositive real part; for this
        // functional L(full) = -e^{-t} exactly and the remainder collapses
        // to the truncation tail.
        let l = LinearFunctional::CoefficientIndex(2);
        let chain = koebe_chain();
        let support = SupportPointData::for_constant_driving(c(-1.0, 0.0)).unwrap();
        let cfg = TailConfig::default();
        let report = tail_report(&l, &chain, &support, 1.0, &cfg).unwrap();
        assert!((report.leading.re + (-1.0f64).exp()).abs() < 1e-9, "leading {}", report.leading);
        assert!((report.sum_re + (-1.0f64).exp()).abs() < 1e-8, "sum {}", report.sum_re);
        assert!(report.sum_re <= tol::TAIL_SUM);
        assert!(report.closure_residual < tol::QUADRATURE, "closure {}", report.closure_residual);
        assert!(report.second_order.norm() < 1e-10, "second {}", report.second_order);
    }

    #[test]
    fn sign_table_exact_values() {
        let table = coefficient_sign_table().unwrap();
        assert!((table.l_f1_squared - 1.0).norm() < tol::SIGN_TABLE);
        assert!((table.l_f2_squared - 1.0).norm() < tol::SIGN_TABLE);
        assert!((table.re_f1 + 1.0).abs() < tol::SIGN_TABLE);
        assert!((table.re_f2 - 1.0).abs() < tol::SIGN_TABLE);
        assert!((table.re_f1 + table.re_f2).abs() < tol::SIGN_TABLE);
    }

    #[test]
    fn horizon_and_domain_guards() {
        let chain = koebe_chain();
        assert!(matches!(
            ode_solve(&chain, c(0.5, 0.0), 50.0),
            Err(Error::HorizonExceeded { .. })
        ));
        assert!(ode_solve(&chain, c(0.97, 0.0), 1.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (nodes, weights) = gauss_legendre_16();
        // int_{-1}^{1} x^2 dx = 2/3 and weights sum to 2.
        let wsum: f64 = weights.iter().sum();
        assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-13);
        let x2: f64 = nodes.iter().zip(weights.iter()).map(|(x, w)| w * x * x).sum();
        assert_abs_diff_eq!(x2, 2.0 / 3.0, epsilon = 1e-13);
    }
}
