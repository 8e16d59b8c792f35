//! Numerical toolkit for extremal problems over normalized conformal mappings
//! of the unit disk.
//!
//! The crate covers three connected constructions:
//!
//! * [`decomp`] — convex decompositions of a schlicht function that omits two
//!   values of equal modulus, built from a sign-indexed recursion on the
//!   branch-tracked square root of [`branch`], together with the rational
//!   fixed point shared by every sign pattern of that recursion.
//! * [`loewner`] — a radial Loewner chain engine for slit mappings, with a
//!   closed-form oracle for the Koebe chain and a tail decomposition of the
//!   variational integral attached to a support point.
//! * [`polyext`] — extremal problems over univalent polynomials: a sampling
//!   univalence certifier, a multi-start derivative-free search, and the
//!   boundary-zero diagnostics of its maximizers.
//!
//! Shared complex-analytic primitives (map catalog, Cauchy-integral
//! coefficient extraction, continuous linear functionals, injectivity
//! perturbation radii) live in [`maps`], [`functional`] and [`perturb`].

pub mod branch;
pub mod config;
pub mod decomp;
pub mod error;
pub mod functional;
pub mod loewner;
pub mod maps;
pub mod parse;
pub mod perturb;
pub mod polyext;
pub mod report;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
