//! Experiment file schema: named operators, named derived maps, and a list
//! of checks with explicit seeds and optional expected outcomes.

use std::collections::BTreeMap;

use serde::Deserialize;

use minty_core::{ConvexFunctionSpec, Matrix, OperatorSpec, Vector};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// A named map built from raw matrices, from an operator's resolvent, or by
/// transforming other named maps. Raw maps carry no monotonicity guarantee;
/// they exist so candidate maps (a negated identity, say) can be fed to the
/// checkers and fail.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity { dim: usize },
    Linear { matrix: Matrix },
    Affine { matrix: Matrix, offset: Vector },
    Constant { value: Vector },
    Resolvent { operator: String },
    Complement { of: String },
    Reflect { of: String },
    Scale { of: String, factor: f64 },
    Compose { of: Vec<String> },
    ConvexCombine { weights: Vec<f64>, of: Vec<String> },
    DouglasRachford { a: String, b: String },
    BackwardBackward { a: String, b: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: String,
    /// Target by operator name; map-level checks use the resolvent.
    #[serde(default)]
    pub operator: Option<String>,
    /// Target by map name, for checks that act on a map directly.
    #[serde(default)]
    pub map: Option<String>,
    /// Explicit seed; there is no wall-clock default.
    pub seed: u64,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Option<f64>,
    /// Dimension for checks that build their own operator (moreau).
    #[serde(default)]
    pub dim: Option<usize>,
    /// Convex function for the moreau check.
    #[serde(default)]
    pub function: Option<ConvexFunctionSpec>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub tuples_per_n: Option<usize>,
    #[serde(default)]
    pub bins: Option<usize>,
    #[serde(default)]
    pub scales: Option<Vec<f64>>,
    #[serde(default)]
    pub targets: Option<Vec<Vector>>,
    #[serde(default)]
    pub starts: Option<usize>,
    #[serde(default)]
    pub start: Option<Vector>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub stop_tol: Option<f64>,
    /// Optional per-iteration CSV output path for iteration checks.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

impl CheckSpec {
    pub fn count(&self) -> usize {
        self.count.unwrap_or(200)
    }

    pub fn scale(&self) -> f64 {
        self.scale.unwrap_or(2.0)
    }
}

/// Declared expected outcome, turning a check into a regression assertion.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default)]
    pub verdict: Option<String>,
    #[serde(default)]
    pub constants: Option<Vec<ConstantExpectation>>,
    #[serde(default)]
    pub all_consistent: Option<bool>,
    #[serde(default)]
    pub agree: Option<bool>,
    #[serde(default)]
    pub converged: Option<bool>,
    #[serde(default)]
    pub diverged: Option<bool>,
    #[serde(default)]
    pub outcome: Option<String>,
    #[serde(default)]
    pub witness: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantExpectation {
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    #[serde(default)]
    pub format: Option<String>,
}
