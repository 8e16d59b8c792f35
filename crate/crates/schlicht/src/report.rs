//! Structured output documents and flat tables.
//!
//! Every run emits a self-describing document (serialized to JSON by the
//! CLI) and, optionally, flat numeric tables keyed by column headers so any
//! external tool can plot them.

use num_complex::Complex64;
use serde::Serialize;

use crate::decomp::ConvexDecomposition;

/// A named check with its residual and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// A check that passes when |value| <= tolerance.
    pub fn residual(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value.abs() <= tolerance }
    }

    /// A check that passes when value <= bound (signed).
    pub fn upper_bound(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, tolerance: bound, pass: value <= bound }
    }

    /// A check that passes when value >= bound (signed).
    pub fn lower_bound(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, tolerance: bound, pass: value >= bound }
    }
}

/// A flat numeric table: one row per record, headers name the columns.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// CSV rendering with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// One leaf of a decomposition document.
#[derive(Debug, Clone, Serialize)]
pub struct LeafRecord {
    pub word: String,
    pub value_at_zero: Complex64,
    pub derivative_at_zero: Complex64,
    pub psi_prime_at_value: Complex64,
}

/// Serializable record of a convex decomposition with its verification
/// residuals.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionDocument {
    pub alpha: Option<Complex64>,
    pub beta: Option<Complex64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    /// Principal branch base value at the origin.
    pub branch_base: Option<Complex64>,
    pub n: u32,
    pub base_map: String,
    pub coefficients: Vec<f64>,
    pub coefficient_sum: f64,
    pub leaves: Vec<LeafRecord>,
    pub max_reconstruction_error: Option<f64>,
    pub min_component_distance: Option<f64>,
}

/// Builds the document for a decomposition, attaching the verification
/// residuals the caller computed.
pub fn decomposition_document(
    d: &ConvexDecomposition,
    max_reconstruction_error: Option<f64>,
    min_component_distance: Option<f64>,
) -> DecompositionDocument {
    let leaves = d
        .components()
        .iter()
        .map(|c| LeafRecord {
            word: c.word.to_string(),
            value_at_zero: c.value_at_zero,
            derivative_at_zero: c.derivative_at_zero,
            psi_prime_at_value: c.psi_prime_at_value,
        })
        .collect::<Vec<_>>();
    DecompositionDocument {
        alpha: d.pair().map(|p| p.alpha()),
        beta: d.pair().map(|p| p.beta()),
        theta: d.pair().map(|p| p.theta()),
        phi: d.pair().map(|p| p.phi()),
        branch_base: d.pair().map(|p| p.psi_base()),
        n: d.depth(),
        base_map: format!("{:?}", d.base_map()),
        coefficients: d.coefficients().to_vec(),
        coefficient_sum: d.coefficients().iter().sum(),
        leaves,
        max_reconstruction_error,
        min_component_distance,
    }
}
