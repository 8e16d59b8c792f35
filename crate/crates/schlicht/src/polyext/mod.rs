//! Univalent polynomials: certification and extremal diagnostics.
//!
//! Membership of a polynomial in the family (normalized, injective on the
//! closed disk) is certified computationally: boundary injectivity at a
//! sampling resolution plus a zero-free derivative inside the disk read off
//! from the boundary winding of p'. Certificates carry their resolution;
//! rejections carry a witness. Extremal candidates sit exactly on the
//! certification edge (their derivative vanishes on the circle), so an
//! inconclusive boundary winding falls back to a slightly shrunken circle.

mod search;
mod sweep;

pub use search::{maximize_functional, ExtremalResult, SearchConfig};
pub use sweep::{brute_force_self_intersection, closed_polyline_self_intersection};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::LinearFunctional;
use crate::tol;

/// A candidate z + a2 z^2 + ... + an z^n; the normalization a0 = 0, a1 = 1
/// is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCandidate {
    degree_cap: usize,
    upper: Vec<Complex64>,
}

impl PolynomialCandidate {
    /// Builds a candidate with stored coefficients a2.. of length at most
    /// `degree_cap - 1`.
    pub fn new(degree_cap: usize, upper: Vec<Complex64>) -> Result<Self> {
        if degree_cap < 1 {
            return Err(Error::InvalidInput("degree cap must be at least 1".into()));
        }
        if upper.len() + 1 > degree_cap {
            return Err(Error::InvalidInput(format!(
                "{} stored coefficients exceed degree cap {degree_cap}",
                upper.len()
            )));
        }
        if upper.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(PolynomialCandidate { degree_cap, upper })
    }

    pub fn identity(degree_cap: usize) -> Self {
        PolynomialCandidate { degree_cap, upper: Vec::new() }
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// Stored coefficients a2..an.
    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    /// Taylor coefficient a_j (a0 = 0, a1 = 1, zero beyond the stored ones).
    pub fn coefficient(&self, j: usize) -> Complex64 {
        match j {
            0 => Complex64::new(0.0, 0.0),
            1 => Complex64::new(1.0, 0.0),
            _ => self
                .upper
                .get(j - 2)
                .copied()
                .unwrap_or_else(|| Complex64::new(0.0, 0.0)),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.upper.iter().rev() {
            acc = (acc + a) * z;
        }
        (acc + 1.0) * z
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in self.upper.iter().enumerate().rev() {
            acc = acc * z + (k + 2) as f64 * a;
        }
        acc * z + 1.0
    }

    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in self.upper.iter().enumerate().rev() {
            let deg = (k + 2) as f64;
            acc = acc * z + deg * (deg - 1.0) * a;
        }
        acc
    }

    /// Exact value of a coefficient-type functional on this polynomial;
    /// point evaluations are checked against the open disk.
    pub fn functional_value(&self, l: &LinearFunctional) -> Result<Complex64> {
        l.validate()?;
        Ok(match l {
            LinearFunctional::CoefficientIndex(j) => self.coefficient(*j),
            LinearFunctional::FiniteCombination(terms) => {
                terms.iter().map(|(j, w)| w * self.coefficient(*j)).sum()
            }
            LinearFunctional::PointEvaluation(z) => self.eval(*z),
        })
    }
}

/// Outcome of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Rejected,
    Inconclusive,
}

/// Evidence carried by a rejection.
#[derive(Debug, Clone, PartialEq)]
pub enum RejectionWitness {
    /// Non-adjacent boundary segments that cross.
    SegmentCrossing { i: usize, j: usize },
    /// Zeros of p' inside the disk counted by the boundary winding.
    InteriorDerivativeZeros { count: i32 },
}

/// Certification record at a fixed boundary resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivalenceCertificate {
    pub boundary_samples: usize,
    /// min |p(s_j) - p(s_k)| / |s_j - s_k| over sampled boundary pairs.
    pub min_boundary_separation: f64,
    /// Winding of p' about 0 (zeros of p' inside the winding circle);
    /// `None` when even the shrunken circle was inconclusive.
    pub derivative_winding: Option<i32>,
    /// Radius of the circle on which the winding was computed.
    pub winding_radius: f64,
    pub verdict: Verdict,
    pub witness: Option<RejectionWitness>,
}

/// Winding number of p' along the circle of radius r: the net argument
/// change over M samples divided by 2 pi, the zero count of p' inside.
pub(crate) fn winding_on_circle(p: &PolynomialCandidate, m: usize, r: f64) -> Result<i32> {
    let mut prev = p.derivative(Complex64::from_polar(r, 0.0));
    if prev.norm() < tol::WINDING_FLOOR {
        return Err(Error::InconclusiveOnBoundary { angle: 0.0 });
    }
    let mut total = 0.0;
    for k in 1..=m {
        let theta = std::f64::consts::TAU * k as f64 / m as f64;
        let v = p.derivative(Complex64::from_polar(r, theta));
        if v.norm() < tol::WINDING_FLOOR {
            return Err(Error::InconclusiveOnBoundary { angle: theta });
        }
        total += (v / prev).arg();
        prev = v;
    }
    Ok((total / std::f64::consts::TAU).round() as i32)
}

/// Winding of p' along the unit circle; errors when a sample sits on a zero
/// of p'.
pub fn derivative_winding(p: &PolynomialCandidate, m: usize) -> Result<i32> {
    winding_on_circle(p, m, 1.0)
}

/// Certifies injectivity of p on the closed disk at resolution M.
///
/// Rejections are witnessed (crossing segments or a positive winding);
/// certification requires a simple boundary polyline, a separation above
/// the floor and a zero winding, and is valid at the stated resolution.
pub fn is_univalent(p: &PolynomialCandidate, m: usize) -> Result<UnivalenceCertificate> {
    if m < 512 || m % 2 != 0 {
        return Err(Error::InvalidInput(format!("M = {m} must be even and at least 512")));
    }
    let boundary: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / m as f64;
            p.eval(Complex64::from_polar(1.0, theta))
        })
        .collect();
    for k in 0..m {
        if (boundary[(k + 1) % m] - boundary[k]).norm() < 1e-14 {
            return Err(Error::DegenerateCurve { index: k });
        }
    }

    let points: Vec<(f64, f64)> = boundary.iter().map(|w| (w.re, w.im)).collect();
    let crossing = closed_polyline_self_intersection(&points);

    let min_boundary_separation = min_separation(&boundary, m);

    let (winding, winding_radius) = match winding_on_circle(p, m, 1.0) {
        Ok(w) => (Some(w), 1.0),
        Err(Error::InconclusiveOnBoundary { .. }) => {
            match winding_on_circle(p, m, tol::SHRUNKEN_RADIUS) {
                Ok(w) => (Some(w), tol::SHRUNKEN_RADIUS),
                Err(Error::InconclusiveOnBoundary { .. }) => (None, tol::SHRUNKEN_RADIUS),
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };

    let (verdict, witness) = match (winding, crossing) {
        (Some(w), _) if w > 0 => {
            (Verdict::Rejected, Some(RejectionWitness::InteriorDerivativeZeros { count: w }))
        }
        (_, Some((i, j))) => {
            (Verdict::Rejected, Some(RejectionWitness::SegmentCrossing { i, j }))
        }
        (Some(0), None) if min_boundary_separation > tol::SEPARATION_FLOOR => {
            (Verdict::Certified, None)
        }
        _ => (Verdict::Inconclusive, None),
    };

    Ok(UnivalenceCertificate {
        boundary_samples: m,
        min_boundary_separation,
        derivative_winding: winding,
        winding_radius,
        verdict,
        witness,
    })
}

/// min |w_j - w_k| / |s_j - s_k| over all boundary sample pairs.
fn min_separation(boundary: &[Complex64], m: usize) -> f64 {
    let sites: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64))
        .collect();
    (0..m)
        .into_par_iter()
        .map(|j| {
            let mut row = f64::INFINITY;
            for k in (j + 1)..m {
                let ds = (sites[j] - sites[k]).norm();
                row = row.min((boundary[j] - boundary[k]).norm() / ds);
            }
            row
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Fast feasibility test used inside the search: winding (with shrunken
/// fallback) plus boundary crossing, no separation scan.
pub(crate) fn certify_fast(p: &PolynomialCandidate, m: usize) -> bool {
    let winding = match winding_on_circle(p, m, 1.0) {
        Ok(w) => w,
        Err(_) => match winding_on_circle(p, m, tol::SHRUNKEN_RADIUS) {
            Ok(w) => w,
            Err(_) => return false,
        },
    };
    if winding != 0 {
        return false;
    }
    let points: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let v = p.eval(Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64));
            (v.re, v.im)
        })
        .collect();
    closed_polyline_self_intersection(&points).is_none()
}

/// Golden-section refinement of |p'(e^{i theta})| seeded by an M-grid scan;
/// returns (min value, argmin angle).
pub fn boundary_derivative_min(p: &PolynomialCandidate, m: usize) -> Result<(f64, f64)> {
    if m < 1024 {
        return Err(Error::InvalidInput(format!("M = {m} must be at least 1024")));
    }
    let value = |theta: f64| p.derivative(Complex64::from_polar(1.0, theta)).norm();
    let step = std::f64::consts::TAU / m as f64;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..m {
        let theta = k as f64 * step;
        let v = value(theta);
        if v < best.0 {
            best = (v, theta);
        }
    }
    Ok(golden_refine(&value, best.1 - step, best.1 + step))
}

fn golden_refine(value: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (value(x1), value(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = value(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (value(mid), mid.rem_euclid(std::f64::consts::TAU))
}

/// All angles where |p'| dips below the detection threshold, refined from
/// grid minima, with the second-derivative magnitudes there.
pub fn boundary_zeros(p: &PolynomialCandidate, m: usize) -> Vec<(f64, Complex64)> {
    let value = |theta: f64| p.derivative(Complex64::from_polar(1.0, theta)).norm();
    let step = std::f64::consts::TAU / m as f64;
    let grid: Vec<f64> = (0..m).map(|k| value(k as f64 * step)).collect();
    let mut zeros: Vec<(f64, Complex64)> = Vec::new();
    for k in 0..m {
        let prev = grid[(k + m - 1) % m];
        let next = grid[(k + 1) % m];
        if grid[k] <= prev && grid[k] <= next && grid[k] < 10.0 * tol::ZERO_DETECT {
            let theta = k as f64 * step;
            let (v, angle) = golden_refine(&value, theta - step, theta + step);
            if v < tol::ZERO_DETECT
                && !zeros.iter().any(|(a, _)| angular_distance(*a, angle) < 2.0 * step)
            {
                let pp = p.second_derivative(Complex64::from_polar(1.0, angle));
                zeros.push((angle, pp));
            }
        }
    }
    zeros.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    zeros
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// |p''(e^{i theta})| at a detected zero of p'; simplicity of the zero
/// requires this to clear the threshold.
pub fn zero_simplicity_check(p: &PolynomialCandidate, angle: f64) -> Result<f64> {
    let z = Complex64::from_polar(1.0, angle);
    let d = p.derivative(z).norm();
    if d > tol::ZERO_DETECT {
        return Err(Error::NotAZero { angle, derivative_abs: d });
    }
    Ok(p.second_derivative(z).norm())
}
