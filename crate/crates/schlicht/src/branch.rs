//! Branch-tracked square roots of (w - alpha)(w - beta).
//!
//! The function psi(w) = ((w - alpha)(w - beta))^(1/2) is two-valued on the
//! punctured plane. On a domain that misses both alpha and beta it admits
//! single-valued branches, and the decomposition recursion needs one fixed
//! branch evaluated consistently at points scattered over such a domain.
//! We realize the branch by analytic continuation: walk a path from the
//! base point, at each step taking whichever square root of the local
//! product lies nearer the previous value. The step bound keeps that choice
//! decisive; an ambiguous step is an error, not a guess.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// The two omitted values together with their angular bookkeeping.
///
/// `theta` and `phi` are arguments of `alpha` and `beta` with `theta`
/// lifted so that `0 < theta - phi < 2*pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmittedPair {
    alpha: Complex64,
    beta: Complex64,
    theta: f64,
    phi: f64,
}

impl OmittedPair {
    /// Builds a pair, validating `|alpha| = |beta|` (relative 1e-9) and
    /// `alpha != beta`.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput("omitted values must be finite".into()));
        }
        let (ra, rb) = (alpha.norm(), beta.norm());
        if ra == 0.0 || rb == 0.0 {
            return Err(Error::InvalidInput("omitted values must be nonzero".into()));
        }
        if (ra - rb).abs() > tol::BRANCH_REL * (1.0 + ra.max(rb)) {
            return Err(Error::InvalidInput(format!(
                "omitted values must have equal modulus: |alpha| = {ra}, |beta| = {rb}"
            )));
        }
        if (alpha - beta).norm() <= tol::BRANCH_REL * (1.0 + ra) {
            return Err(Error::InvalidInput("omitted values must be distinct".into()));
        }
        let phi = beta.arg();
        let mut theta = alpha.arg();
        while theta - phi <= 0.0 {
            theta += std::f64::consts::TAU;
        }
        while theta - phi >= std::f64::consts::TAU {
            theta -= std::f64::consts::TAU;
        }
        Ok(OmittedPair { alpha, beta, theta, phi })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Argument of alpha, lifted above `phi`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Argument of beta.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Common modulus r = |alpha| = |beta|.
    pub fn modulus(&self) -> f64 {
        0.5 * (self.alpha.norm() + self.beta.norm())
    }

    /// (w - alpha)(w - beta).
    pub fn product_at(&self, w: Complex64) -> Complex64 {
        (w - self.alpha) * (w - self.beta)
    }

    /// Base value of the branch at the origin: the principal square root of
    /// alpha*beta (argument halved into (-pi/2, pi/2]).
    pub fn psi_base(&self) -> Complex64 {
        (self.alpha * self.beta).sqrt()
    }

    /// Distance from `w` to the nearer branch point.
    pub fn branch_distance(&self, w: Complex64) -> f64 {
        (w - self.alpha).norm().min((w - self.beta).norm())
    }

    /// Absolute proximity below which a point counts as sitting on a branch
    /// point.
    pub fn proximity(&self) -> f64 {
        tol::BRANCH_POINT_PROXIMITY * (1.0 + self.modulus())
    }
}

/// A continuation path: ordered waypoints plus a cap on the resampled step.
///
/// The effective step used during continuation is the smaller of this cap
/// and `STEP_FRACTION` times the distance from the path to the branch
/// points.
#[derive(Debug, Clone)]
pub struct BranchPath {
    waypoints: Vec<Complex64>,
    step_bound: f64,
}

impl BranchPath {
    /// Straight segment `from -> to`.
    pub fn segment(from: Complex64, to: Complex64) -> Self {
        BranchPath { waypoints: vec![from, to], step_bound: f64::INFINITY }
    }

    /// Path through the given waypoints (at least one).
    pub fn polyline(waypoints: Vec<Complex64>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidInput("path needs at least one waypoint".into()));
        }
        if waypoints.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("path waypoints must be finite".into()));
        }
        Ok(BranchPath { waypoints, step_bound: f64::INFINITY })
    }

    /// Overrides the maximum resampled step.
    pub fn with_step_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(Error::InvalidInput("step bound must be positive".into()));
        }
        self.step_bound = bound;
        Ok(self)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().expect("non-empty")
    }

    /// Exact distance from the polyline to the nearer branch point.
    pub(crate) fn branch_distance(&self, pair: &OmittedPair) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.waypoints.len() {
            let p = self.waypoints[i];
            d = d.min(pair.branch_distance(p));
            if i + 1 < self.waypoints.len() {
                let q = self.waypoints[i + 1];
                d = d.min(point_segment_distance(pair.alpha(), p, q));
                d = d.min(point_segment_distance(pair.beta(), p, q));
            }
        }
        d
    }

    /// Waypoints subdivided so consecutive points are at most `max_step`
    /// apart.
    pub(crate) fn resampled(&self, max_step: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.waypoints.len());
        out.push(self.waypoints[0]);
        for pair in self.waypoints.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            let len = (q - p).norm();
            let pieces = (len / max_step).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                out.push(p + (q - p) * (k as f64 / pieces as f64));
            }
        }
        out
    }
}

/// Distance from point `a` to the segment `[p, q]`.
fn point_segment_distance(a: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (a - p).norm();
    }
    // Projection parameter of a onto the segment, clamped to [0, 1].
    let t = ((a - p).re * d.re + (a - p).im * d.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (a - (p + d * t)).norm()
}

/// Continues the branch with start value `base` at `points[0]` along the
/// given points, returning the branch value at every point.
///
/// At each point the square root of the local product nearer the previous
/// value is chosen; the choice must win by at least half the distance
/// between the two candidates, otherwise the step is ambiguous.
pub(crate) fn continue_sqrt_trace(
    pair: &OmittedPair,
    base: Complex64,
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    let proximity = pair.proximity();
    let mut values = Vec::with_capacity(points.len());
    let mut prev = base;
    for (i, &w) in points.iter().enumerate() {
        if pair.branch_distance(w) < proximity {
            return Err(Error::PathHitsBranchPoint { waypoint: w });
        }
        if i == 0 {
            values.push(prev);
            continue;
        }
        let root = pair.product_at(w).sqrt();
        let d_plus = (prev - root).norm();
        let d_minus = (prev + root).norm();
        // The candidates are +-root, a distance 2|root| apart; demand that
        // the nearer one wins by at least half of that.
        if (d_plus - d_minus).abs() < root.norm() {
            return Err(Error::AmbiguousContinuation { waypoint: w });
        }
        prev = if d_plus < d_minus { root } else { -root };
        values.push(prev);
    }
    Ok(values)
}

/// Same as [`continue_sqrt_trace`] but keeps only the final value.
pub(crate) fn continue_sqrt(
    pair: &OmittedPair,
    base: Complex64,
    points: &[Complex64],
) -> Result<Complex64> {
    continue_sqrt_trace(pair, base, points).map(|v| *v.last().expect("non-empty"))
}

/// Evaluates the branch of psi at `target` by continuation along `path`.
///
/// The base value is the principal square root of alpha*beta at the origin;
/// the path must start at 0, end at `target` and avoid both branch points.
/// The path is resampled to the effective step bound before walking; if a
/// step still turns out ambiguous the sampling is halved a few times before
/// giving up.
pub fn psi_eval(pair: &OmittedPair, target: Complex64, path: &BranchPath) -> Result<Complex64> {
    let scale = 1.0 + target.norm() + pair.modulus();
    if path.start().norm() > 1e-12 * scale {
        return Err(Error::InvalidInput("continuation path must start at 0".into()));
    }
    if (path.end() - target).norm() > 1e-12 * scale {
        return Err(Error::InvalidInput("continuation path must end at the target".into()));
    }
    let d = path.branch_distance(pair);
    if d < pair.proximity() {
        return Err(Error::PathHitsBranchPoint { waypoint: nearest_waypoint(pair, path) });
    }
    let mut step = path.step_bound.min(tol::STEP_FRACTION * d);
    let base = pair.psi_base();
    let mut last = Err(Error::AmbiguousContinuation { waypoint: target });
    for _ in 0..6 {
        let points = path.resampled(step);
        match continue_sqrt(pair, base, &points) {
            Ok(v) => return Ok(v),
            e @ Err(Error::AmbiguousContinuation { .. }) => {
                last = e;
                step *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    last
}

fn nearest_waypoint(pair: &OmittedPair, path: &BranchPath) -> Complex64 {
    *path
        .waypoints()
        .iter()
        .min_by(|a, b| {
            pair.branch_distance(**a).partial_cmp(&pair.branch_distance(**b)).expect("finite")
        })
        .expect("non-empty")
}

/// Continues the branch from `base` at `from` to `to` along the straight
/// segment, refining the step on ambiguity.
pub(crate) fn continue_segment(
    pair: &OmittedPair,
    base: Complex64,
    from: Complex64,
    to: Complex64,
) -> Result<Complex64> {
    let path = BranchPath::segment(from, to);
    let d = path.branch_distance(pair);
    if d < pair.proximity() {
        return Err(Error::PathHitsBranchPoint { waypoint: to });
    }
    let mut step = tol::STEP_FRACTION * d;
    for _ in 0..6 {
        match continue_sqrt(pair, base, &path.resampled(step)) {
            Ok(v) => return Ok(v),
            Err(Error::AmbiguousContinuation { .. }) => step *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::AmbiguousContinuation { waypoint: to })
}

/// Derivative of the branch from its value: psi'(w) = (2w - a - b) / (2 psi(w)).
pub fn psi_prime(pair: &OmittedPair, w: Complex64, psi_w: Complex64) -> Result<Complex64> {
    if psi_w.norm() < pair.proximity() {
        return Err(Error::DerivativeSingular);
    }
    Ok((2.0 * w - pair.alpha() - pair.beta()) / (2.0 * psi_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair_pm2() -> OmittedPair {
        OmittedPair::new(c(2.0, 0.0), c(-2.0, 0.0)).unwrap()
    }

    /// Independent oracle: fixed fine-step continuation along a segment.
    fn oracle_continuation(pair: &OmittedPair, to: Complex64, step: f64) -> Complex64 {
        let n = ((to.norm() / step).ceil() as usize).max(1);
        let mut prev = pair.psi_base();
        for k in 1..=n {
            let w = to * (k as f64 / n as f64);
            let root = pair.product_at(w).sqrt();
            prev = if (prev - root).norm() <= (prev + root).norm() { root } else { -root };
        }
        prev
    }

    #[test]
    fn base_value_is_principal_root() {
        // alpha*beta = -4, principal square root 2i.
        let pair = pair_pm2();
        let path = BranchPath::segment(c(0.0, 0.0), c(0.0, 0.0));
        let v = psi_eval(&pair, c(0.0, 0.0), &path).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn base_value_squares_to_product() {
        for (a, b) in [
            (c(1.0, 1.0), c(-1.0, 1.0)),
            (c(3.0, 0.0), c(0.0, 3.0)),
            (c(-1.0, 0.0), c(-0.5, 0.8660254037844386)),
        ] {
            let pair = OmittedPair::new(a, b).unwrap();
            let v = pair.psi_base();
            let err = (v * v - a * b).norm();
            assert!(err < 1e-12 * (1.0 + (a * b).norm()), "err = {err}");
        }
    }

    #[test]
    fn continuation_along_imaginary_axis() {
        // Continuation of sqrt(-4(1 + tau^2)) from 2i ends at 2*sqrt(2)*i.
        let pair = pair_pm2();
        let target = c(0.0, 2.0);
        let path = BranchPath::segment(c(0.0, 0.0), target);
        let v = psi_eval(&pair, target, &path).unwrap();
        let expected = oracle_continuation(&pair, target, 1e-3);
        assert!((v - expected).norm() < 1e-9, "v = {v}, oracle = {expected}");
        assert_abs_diff_eq!(v.im, 2.0 * 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn branch_consistency_on_scattered_targets() {
        let pair = pair_pm2();
        for &target in &[c(0.5, 0.5), c(-0.3, 0.9), c(0.0, -1.7), c(1.2, -0.4), c(-1.0, -1.0)] {
            let path = BranchPath::segment(c(0.0, 0.0), target);
            let v = psi_eval(&pair, target, &path).unwrap();
            let err = (v * v - pair.product_at(target)).norm();
            assert!(
                err < tol::BRANCH_SQ_REL * (1.0 + target.norm_sqr()),
                "err = {err} at {target}"
            );
        }
    }

    #[test]
    fn homotopic_paths_agree() {
        // Both paths stay in the right half of the disk of radius 1.5,
        // well away from the branch points at +-2.
        let pair = pair_pm2();
        let target = c(1.0, 0.5);
        let direct = BranchPath::segment(c(0.0, 0.0), target);
        let dogleg =
            BranchPath::polyline(vec![c(0.0, 0.0), c(0.2, -0.8), c(0.9, -0.3), target]).unwrap();
        let v1 = psi_eval(&pair, target, &direct).unwrap();
        let v2 = psi_eval(&pair, target, &dogleg).unwrap();
        assert!((v1 - v2).norm() < 1e-9, "v1 = {v1}, v2 = {v2}");
    }

    #[test]
    fn path_through_branch_point_rejected() {
        let pair = pair_pm2();
        // The segment 0 -> 4 passes straight through alpha = 2.
        let path = BranchPath::segment(c(0.0, 0.0), c(4.0, 0.0));
        match psi_eval(&pair, c(4.0, 0.0), &path) {
            Err(Error::PathHitsBranchPoint { .. }) => {}
            other => panic!("expected PathHitsBranchPoint, got {other:?}"),
        }
    }

    #[test]
    fn ambiguous_jump_detected() {
        // A two-point walk from 0 to 3 jumps between regions where the two
        // candidates are equidistant from the previous value 2i.
        let pair = pair_pm2();
        let points = [c(0.0, 0.0), c(3.0, 0.0)];
        match continue_sqrt(&pair, pair.psi_base(), &points) {
            Err(Error::AmbiguousContinuation { .. }) => {}
            other => panic!("expected AmbiguousContinuation, got {other:?}"),
        }
    }

    #[test]
    fn derivative_at_origin_for_symmetric_pair() {
        // alpha + beta = 0 makes the derivative vanish at the origin.
        let pair = pair_pm2();
        let v = psi_prime(&pair, c(0.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn derivative_along_continued_branch() {
        let pair = pair_pm2();
        let v = psi_prime(&pair, c(0.0, 2.0), c(0.0, 2.0 * 2.0_f64.sqrt())).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn derivative_modulus_matches_half_angle() {
        // |psi'(0)| = |cos((theta - phi)/2)| for equal-modulus pairs.
        for (t, p) in [(1.0, 0.2), (2.5, -1.0), (0.3, -2.9), (3.0, 0.5)] {
            let alpha = 1.7 * Complex64::from_polar(1.0, t);
            let beta = 1.7 * Complex64::from_polar(1.0, p);
            let pair = OmittedPair::new(alpha, beta).unwrap();
            let d = psi_prime(&pair, c(0.0, 0.0), pair.psi_base()).unwrap();
            let expected = (0.5 * (pair.theta() - pair.phi())).cos().abs();
            assert_abs_diff_eq!(d.norm(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_singular_at_branch_value() {
        let pair = pair_pm2();
        match psi_prime(&pair, c(2.0, 0.0), c(0.0, 0.0)) {
            Err(Error::DerivativeSingular) => {}
            other => panic!("expected DerivativeSingular, got {other:?}"),
        }
    }

    #[test]
    fn pair_validation() {
        assert!(OmittedPair::new(c(2.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(OmittedPair::new(c(2.0, 0.0), c(2.0, 0.0)).is_err());
        assert!(OmittedPair::new(c(2.0, 0.0), c(0.0, 2.0)).is_ok());
        let pair = pair_pm2();
        let gap = pair.theta() - pair.phi();
        assert!(gap > 0.0 && gap < std::f64::consts::TAU);
    }
}
