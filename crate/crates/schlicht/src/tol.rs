//! Default tolerances and grid sizes.
//!
//! Every threshold used by the library and its verification layers is
//! defined here, with its origin. Run configs may override the grid sizes
//! and integrator tolerances; the structural constants (ambiguity rule,
//! step fraction) are fixed.

/// Relative tolerance for branch-tracking invariants: equal distance to the
/// two omitted values, realness of the derivative quotient, component
/// normalization. Continuation composes a few hundred square roots, each
/// exact to machine precision, so 1e-9 leaves ample headroom.
pub const BRANCH_REL: f64 = 1e-9;

/// Branch-consistency bound: a continued value v at w must satisfy
/// |v^2 - (w-a)(w-b)| < BRANCH_SQ_REL * (1 + |w|^2).
pub const BRANCH_SQ_REL: f64 = 1e-10;

/// Proximity (relative to the pair modulus) at which a path point counts as
/// hitting a branch point.
pub const BRANCH_POINT_PROXIMITY: f64 = 1e-9;

/// Continuation step bound as a fraction of the path's distance to the
/// branch points. At this ratio the nearer-root rule is decisively
/// unambiguous along analytic arcs.
pub const STEP_FRACTION: f64 = 1e-2;

/// Default number of samples on the radial image path used to evaluate
/// decomposition components.
pub const PATH_SAMPLES: usize = 256;

/// Default tree-depth cap (2^12 = 4096 leaves).
pub const TREE_CAP: u32 = 12;

/// Number of boundary-adjacent samples used to spot-check that a base map
/// omits the required pair, and the sampling radius.
pub const OMISSION_SAMPLES: usize = 2048;
pub const OMISSION_RADIUS: f64 = 0.999;

/// Coefficient-extraction defaults. All catalog maps are analytic well
/// beyond radius 0.5, where 256 trapezoid nodes already reach the
/// round-off floor.
pub const COEFF_RADIUS: f64 = 0.5;
pub const COEFF_SAMPLES: usize = 256;

/// Unit-sum check for convex coefficients (exact algebraic identity, so the
/// residual is pure rounding).
pub const COEFF_SUM: f64 = 1e-12;

/// Fixed-point residual bound, relative to (1 + |g|^2).
pub const FIXED_POINT: f64 = 1e-12;

/// Linearity residual for functionals on catalog pairs.
pub const LINEARITY: f64 = 1e-10;

/// Normalization audit for closed-form catalog maps: |a0| and |a1 - 1|.
pub const NORMALIZATION: f64 = 1e-10;

/// Normalization audit for chain-limit maps, which carry integrator error.
pub const NORMALIZATION_CHAIN: f64 = 1e-8;

/// Loewner integrator defaults. High accuracy is needed because the
/// verified identities involve cancellation between quadrature terms.
pub const ODE_REL: f64 = 1e-10;
pub const ODE_ABS: f64 = 1e-12;
pub const ODE_HORIZON: f64 = 40.0;

/// Guard radius around the driving singularity 1 - kf = 0.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Truncation for tail integrals: T_max = t + TAIL_OFFSET. The integrands
/// decay at least like e^{-s}, so the discarded tail is below e^{-25}.
pub const TAIL_OFFSET: f64 = 25.0;

/// Horizon used when a chain limit e^t f(z,t) -> f(z) is evaluated as a map;
/// the limit error is O(e^{-horizon}) ~ 5e-12.
pub const CHAIN_LIMIT_HORIZON: f64 = 26.0;

/// Agreement bound between the adaptive solver and the closed-form chain.
pub const ODE_ORACLE: f64 = 1e-8;

/// Quadrature/identity-closure bound for tail decompositions.
pub const QUADRATURE: f64 = 1e-8;

/// Bound on the reported inequality sum of a tail decomposition.
pub const TAIL_SUM: f64 = 1e-6;

/// Exact coefficient values of the sign table are reproduced to this bound.
pub const SIGN_TABLE: f64 = 1e-10;

/// Certification defaults: boundary sample count and the separation below
/// which two boundary samples count as a collision witness.
pub const CERT_SAMPLES: usize = 4096;
pub const SEPARATION_FLOOR: f64 = 1e-9;

/// |p'| below this at a sample makes the boundary winding inconclusive.
pub const WINDING_FLOOR: f64 = 1e-10;

/// Radius of the shrunken circle used when the boundary winding is
/// inconclusive because the candidate sits on the feasibility edge.
pub const SHRUNKEN_RADIUS: f64 = 1.0 - 1e-6;

/// Zero-tolerance ladder for extremal diagnostics: boundary zeros of p' are
/// detected at the search noise floor, simplicity of a zero is asserted at a
/// strictly larger threshold.
pub const ZERO_DETECT: f64 = 1e-4;
pub const SIMPLICITY: f64 = 1e-3;

/// Sampled lower-bound grid for injectivity perturbation radii.
pub const PERTURB_GRIDSIZE: usize = 64;

/// Step for central-difference derivatives of maps analytic near the closed
/// disk; O(h^2) truncation ~1e-12 against O(eps/h) rounding ~1e-10.
pub const DIFF_STEP: f64 = 1e-6;

/// Minimum |f'| on the boundary grid for the injectivity lemma hypothesis.
pub const BOUNDARY_DERIVATIVE_FLOOR: f64 = 1e-9;
