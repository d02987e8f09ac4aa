//! Concrete operator families with exact resolvents, and the proximal
//! mappings backing the subdifferential variants.
//!
//! Every catalog resolvent is a closed form; the nonlinear solver is never
//! used here. Structural flags are computed exactly per variant, so the
//! classification checkers have ground truth to compare against.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{solve_linear, symmetric_eigenvalues, Matrix, Vector};
use crate::operator::{AffineForm, Eval, FirmMap, Flag, MonotoneOperator, OperatorFlags, Provenance};
use crate::tol;

/// Proper lower-semicontinuous convex functions with closed-form proximal
/// mappings. Indicator variants double as constraint sets for normal cones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFunctionSpec {
    /// (lambda/2)‖x‖², lambda > 0.
    Quadratic { lambda: f64 },
    /// lambda·‖x‖₁, lambda ≥ 0.
    L1 { lambda: f64 },
    /// Indicator of the closed Euclidean ball of given radius.
    IndicatorBall { radius: f64 },
    /// Indicator of a box, lower ≤ upper componentwise.
    IndicatorBox { lower: Vector, upper: Vector },
    /// Indicator of a single point.
    IndicatorSingleton { point: Vector },
    /// Indicator of the affine set anchor + span(basis), basis orthonormal.
    IndicatorAffine { anchor: Vector, basis: Vec<Vector> },
}

impl ConvexFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexFunctionSpec::Quadratic { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(CoreError::InvalidParameter {
                        what: "quadratic coefficient",
                        why: format!("must be finite and positive, got {lambda}"),
                    });
                }
            }
            ConvexFunctionSpec::L1 { lambda } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return Err(CoreError::InvalidParameter {
                        what: "l1 weight",
                        why: format!("must be finite and nonnegative, got {lambda}"),
                    });
                }
            }
            ConvexFunctionSpec::IndicatorBall { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(CoreError::InvalidParameter {
                        what: "ball radius",
                        why: format!("must be finite and positive, got {radius}"),
                    });
                }
            }
            ConvexFunctionSpec::IndicatorBox { lower, upper } => {
                if lower.dim() != upper.dim() {
                    return Err(CoreError::DimensionMismatch {
                        expected: lower.dim(),
                        got: upper.dim(),
                    });
                }
                for i in 0..lower.dim() {
                    if lower[i] > upper[i] {
                        return Err(CoreError::InvalidParameter {
                            what: "box bounds",
                            why: format!(
                                "lower bound exceeds upper bound at coordinate {i}: {} > {}",
                                lower[i], upper[i]
                            ),
                        });
                    }
                }
            }
            ConvexFunctionSpec::IndicatorSingleton { .. } => {}
            ConvexFunctionSpec::IndicatorAffine { anchor, basis } => {
                for (k, b) in basis.iter().enumerate() {
                    if b.dim() != anchor.dim() {
                        return Err(CoreError::DimensionMismatch {
                            expected: anchor.dim(),
                            got: b.dim(),
                        });
                    }
                    for (l, c) in basis.iter().enumerate().take(k + 1) {
                        let target = if k == l { 1.0 } else { 0.0 };
                        let ip = b.dot(c);
                        if (ip - target).abs() > 1e-10 {
                            return Err(CoreError::InvalidParameter {
                                what: "affine basis",
                                why: format!(
                                    "vectors {l} and {k} not orthonormal: inner product {ip}"
                                ),
                            });
                        }
                    }
                }
                if basis.len() > anchor.dim() {
                    return Err(CoreError::InvalidParameter {
                        what: "affine basis",
                        why: "more basis vectors than ambient dimension".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dimension forced by the parameters, when any.
    pub fn dim_constraint(&self) -> Option<usize> {
        match self {
            ConvexFunctionSpec::Quadratic { .. }
            | ConvexFunctionSpec::L1 { .. }
            | ConvexFunctionSpec::IndicatorBall { .. } => None,
            ConvexFunctionSpec::IndicatorBox { lower, .. } => Some(lower.dim()),
            ConvexFunctionSpec::IndicatorSingleton { point } => Some(point.dim()),
            ConvexFunctionSpec::IndicatorAffine { anchor, .. } => Some(anchor.dim()),
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(
            self,
            ConvexFunctionSpec::IndicatorBall { .. }
                | ConvexFunctionSpec::IndicatorBox { .. }
                | ConvexFunctionSpec::IndicatorSingleton { .. }
                | ConvexFunctionSpec::IndicatorAffine { .. }
        )
    }

    /// argmin_y f(y) + ½‖y − x‖².
    pub fn prox(&self, x: &Vector) -> Result<Vector> {
        self.prox_scaled(1.0, x)
    }

    /// argmin_y c·f(y) + ½‖y − x‖², the resolvent of c·∂f. Indicator
    /// variants are invariant in c; Quadratic and L1 absorb it into the
    /// coefficient.
    pub fn prox_scaled(&self, c: f64, x: &Vector) -> Result<Vector> {
        self.validate()?;
        if !(c.is_finite() && c > 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "prox scale",
                why: format!("must be finite and positive, got {c}"),
            });
        }
        if let Some(d) = self.dim_constraint() {
            if x.dim() != d {
                return Err(CoreError::DimensionMismatch { expected: d, got: x.dim() });
            }
        }
        let out = match self {
            ConvexFunctionSpec::Quadratic { lambda } => x.scale(1.0 / (1.0 + c * lambda)),
            ConvexFunctionSpec::L1 { lambda } => {
                let t = c * lambda;
                Vector::from_computed(
                    x.as_slice().iter().map(|&v| v.signum() * (v.abs() - t).max(0.0)).collect(),
                )?
            }
            ConvexFunctionSpec::IndicatorBall { radius } => {
                let n = x.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    x.scale(radius / n)
                }
            }
            ConvexFunctionSpec::IndicatorBox { lower, upper } => Vector::from_computed(
                x.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v.clamp(lower[i], upper[i]))
                    .collect(),
            )?,
            ConvexFunctionSpec::IndicatorSingleton { point } => point.clone(),
            ConvexFunctionSpec::IndicatorAffine { anchor, basis } => {
                let shifted = x.sub(anchor);
                let mut out = anchor.clone();
                for b in basis {
                    out = out.axpy(b.dot(&shifted), b);
                }
                out
            }
        };
        Ok(out)
    }

    /// Fenchel conjugate, for the variants whose conjugate stays inside the
    /// catalog. `dim` fixes the ambient space where the parameters do not.
    pub fn conjugate(&self, dim: usize) -> Option<ConvexFunctionSpec> {
        match self {
            ConvexFunctionSpec::Quadratic { lambda } => {
                Some(ConvexFunctionSpec::Quadratic { lambda: 1.0 / lambda })
            }
            ConvexFunctionSpec::L1 { lambda } if *lambda > 0.0 => {
                Some(ConvexFunctionSpec::IndicatorBox {
                    lower: Vector::new(vec![-lambda; dim]).ok()?,
                    upper: Vector::new(vec![*lambda; dim]).ok()?,
                })
            }
            ConvexFunctionSpec::L1 { .. } => Some(ConvexFunctionSpec::IndicatorSingleton {
                point: Vector::zeros(dim),
            }),
            ConvexFunctionSpec::IndicatorBox { lower, upper } => {
                if upper.dim() == 0 {
                    return None;
                }
                let lam = upper[0];
                let uniform_symmetric = lam > 0.0
                    && (0..lower.dim()).all(|i| upper[i] == lam && lower[i] == -lam);
                if uniform_symmetric {
                    Some(ConvexFunctionSpec::L1 { lambda: lam })
                } else {
                    None
                }
            }
            ConvexFunctionSpec::IndicatorSingleton { point } if point.norm() == 0.0 => {
                Some(ConvexFunctionSpec::L1 { lambda: 0.0 })
            }
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConvexFunctionSpec::Quadratic { .. } => "quadratic",
            ConvexFunctionSpec::L1 { .. } => "l1",
            ConvexFunctionSpec::IndicatorBall { .. } => "indicator_ball",
            ConvexFunctionSpec::IndicatorBox { .. } => "indicator_box",
            ConvexFunctionSpec::IndicatorSingleton { .. } => "indicator_singleton",
            ConvexFunctionSpec::IndicatorAffine { .. } => "indicator_affine",
        }
    }
}

/// Declarative description of a maximally monotone operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub variant: OperatorVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum OperatorVariant {
    Linear { matrix: Matrix },
    Affine { matrix: Matrix, offset: Vector },
    Constant { value: Vector },
    /// diag(1/1, 1/2, ..., 1/d); d must equal dim.
    DiagHarmonic { d: usize },
    Subdifferential { function: ConvexFunctionSpec },
    NormalCone { set: ConvexFunctionSpec },
    /// epsilon·Id + inner, epsilon ≥ 0.
    ScaledIdentityPlus { epsilon: f64, inner: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn linear(matrix: Matrix) -> Self {
        let dim = matrix.rows();
        OperatorSpec { dim, variant: OperatorVariant::Linear { matrix } }
    }

    pub fn affine(matrix: Matrix, offset: Vector) -> Self {
        let dim = matrix.rows();
        OperatorSpec { dim, variant: OperatorVariant::Affine { matrix, offset } }
    }

    pub fn constant(value: Vector) -> Self {
        let dim = value.dim();
        OperatorSpec { dim, variant: OperatorVariant::Constant { value } }
    }

    pub fn diag_harmonic(d: usize) -> Self {
        OperatorSpec { dim: d, variant: OperatorVariant::DiagHarmonic { d } }
    }

    pub fn subdifferential(function: ConvexFunctionSpec, dim: usize) -> Self {
        OperatorSpec { dim, variant: OperatorVariant::Subdifferential { function } }
    }

    pub fn normal_cone(set: ConvexFunctionSpec, dim: usize) -> Self {
        OperatorSpec { dim, variant: OperatorVariant::NormalCone { set } }
    }

    pub fn scaled_identity_plus(epsilon: f64, inner: OperatorSpec) -> Self {
        let dim = inner.dim;
        OperatorSpec {
            dim,
            variant: OperatorVariant::ScaledIdentityPlus { epsilon, inner: Box::new(inner) },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(CoreError::InvalidParameter {
                what: "operator dimension",
                why: "must be positive".into(),
            });
        }
        match &self.variant {
            OperatorVariant::Linear { matrix } => {
                validate_monotone_matrix(matrix, self.dim)?;
            }
            OperatorVariant::Affine { matrix, offset } => {
                validate_monotone_matrix(matrix, self.dim)?;
                if offset.dim() != self.dim {
                    return Err(CoreError::DimensionMismatch {
                        expected: self.dim,
                        got: offset.dim(),
                    });
                }
            }
            OperatorVariant::Constant { value } => {
                if value.dim() != self.dim {
                    return Err(CoreError::DimensionMismatch {
                        expected: self.dim,
                        got: value.dim(),
                    });
                }
            }
            OperatorVariant::DiagHarmonic { d } => {
                if *d == 0 {
                    return Err(CoreError::InvalidParameter {
                        what: "diag harmonic order",
                        why: "must be positive".into(),
                    });
                }
                if *d != self.dim {
                    return Err(CoreError::DimensionMismatch { expected: self.dim, got: *d });
                }
            }
            OperatorVariant::Subdifferential { function } => {
                function.validate()?;
                if let Some(d) = function.dim_constraint() {
                    if d != self.dim {
                        return Err(CoreError::DimensionMismatch { expected: self.dim, got: d });
                    }
                }
            }
            OperatorVariant::NormalCone { set } => {
                if !set.is_indicator() {
                    return Err(CoreError::InvalidParameter {
                        what: "normal cone set",
                        why: format!("requires an indicator variant, got {}", set.label()),
                    });
                }
                set.validate()?;
                if let Some(d) = set.dim_constraint() {
                    if d != self.dim {
                        return Err(CoreError::DimensionMismatch { expected: self.dim, got: d });
                    }
                }
            }
            OperatorVariant::ScaledIdentityPlus { epsilon, inner } => {
                if !(epsilon.is_finite() && *epsilon >= 0.0) {
                    return Err(CoreError::InvalidParameter {
                        what: "identity scale",
                        why: format!("must be finite and nonnegative, got {epsilon}"),
                    });
                }
                inner.validate()?;
                if inner.dim != self.dim {
                    return Err(CoreError::DimensionMismatch {
                        expected: self.dim,
                        got: inner.dim,
                    });
                }
            }
        }
        Ok(())
    }

    /// Short structural description for provenance and reports.
    pub fn describe(&self) -> String {
        match &self.variant {
            OperatorVariant::Linear { .. } => "linear".into(),
            OperatorVariant::Affine { .. } => "affine".into(),
            OperatorVariant::Constant { .. } => "constant".into(),
            OperatorVariant::DiagHarmonic { d } => format!("diag_harmonic({d})"),
            OperatorVariant::Subdifferential { function } => {
                format!("subdifferential({})", function.label())
            }
            OperatorVariant::NormalCone { set } => format!("normal_cone({})", set.label()),
            OperatorVariant::ScaledIdentityPlus { epsilon, inner } => {
                format!("scaled_identity_plus({epsilon}, {})", inner.describe())
            }
        }
    }
}

/// Monotonicity gate for matrix variants: M + Mᵀ must be positive
/// semidefinite within 1e−10; rejection reports the offending eigenvalue.
fn validate_monotone_matrix(matrix: &Matrix, dim: usize) -> Result<()> {
    if !matrix.is_square() || matrix.rows() != dim {
        return Err(CoreError::DimensionMismatch { expected: dim, got: matrix.rows() });
    }
    let sum = matrix.add(&matrix.transpose())?;
    let eigs = symmetric_eigenvalues(&sum)?;
    let min = eigs.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(CoreError::NotMonotone { eigenvalue: min });
    }
    Ok(())
}

/// Resolvent of c·A in closed form: either an exact affine map or a prox
/// closure. `c` accumulates through ScaledIdentityPlus nesting.
enum ResolventRep {
    Affine(AffineForm),
    Prox { function: ConvexFunctionSpec, scale: f64 },
    ScaledInput { inner: Box<ResolventRep>, input_scale: f64 },
}

impl ResolventRep {
    fn into_eval(self) -> (Eval, Option<AffineForm>) {
        match self {
            ResolventRep::Affine(form) => {
                let f = form.clone();
                (Arc::new(move |x: &Vector| f.apply(x)) as Eval, Some(form))
            }
            ResolventRep::Prox { function, scale } => (
                Arc::new(move |x: &Vector| function.prox_scaled(scale, x)) as Eval,
                None,
            ),
            ResolventRep::ScaledInput { inner, input_scale } => {
                let (inner_eval, inner_form) = inner.into_eval();
                let form = inner_form.map(|f| AffineForm {
                    matrix: f.matrix.scale(input_scale),
                    offset: f.offset,
                });
                (
                    Arc::new(move |x: &Vector| inner_eval(&x.scale(input_scale))) as Eval,
                    form,
                )
            }
        }
    }
}

/// Inverse of Id + cM, computed column by column. Exact up to elimination
/// rounding; done once at construction.
fn invert_id_plus(matrix: &Matrix, c: f64) -> Result<Matrix> {
    let n = matrix.rows();
    let system = Matrix::identity(n).add(&matrix.scale(c))?;
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_linear(&system, &Vector::new(e)?)?;
        for i in 0..n {
            out.set(i, j, col[i]);
        }
    }
    Ok(out)
}

fn build_resolvent(spec: &OperatorSpec, c: f64) -> Result<ResolventRep> {
    let rep = match &spec.variant {
        OperatorVariant::Linear { matrix } => {
            ResolventRep::Affine(AffineForm::new(invert_id_plus(matrix, c)?, Vector::zeros(spec.dim))?)
        }
        OperatorVariant::Affine { matrix, offset } => {
            // x + c(Mx + b) = y  =>  x = R(y − cb), R = (Id + cM)^{-1}.
            let r = invert_id_plus(matrix, c)?;
            let shift = r.matvec(&offset.scale(-c))?;
            ResolventRep::Affine(AffineForm::new(r, shift)?)
        }
        OperatorVariant::Constant { value } => ResolventRep::Affine(AffineForm {
            matrix: Matrix::identity(spec.dim),
            offset: value.scale(-c),
        }),
        OperatorVariant::DiagHarmonic { d } => {
            let mut m = Matrix::zeros(*d, *d);
            for n in 1..=*d {
                m.set(n - 1, n - 1, n as f64 / (n as f64 + c));
            }
            ResolventRep::Affine(AffineForm::new(m, Vector::zeros(*d))?)
        }
        OperatorVariant::Subdifferential { function } | OperatorVariant::NormalCone { set: function } => {
            match function {
                ConvexFunctionSpec::Quadratic { lambda } => ResolventRep::Affine(AffineForm {
                    matrix: Matrix::identity(spec.dim).scale(1.0 / (1.0 + c * lambda)),
                    offset: Vector::zeros(spec.dim),
                }),
                ConvexFunctionSpec::IndicatorSingleton { point } => {
                    ResolventRep::Affine(AffineForm {
                        matrix: Matrix::zeros(spec.dim, spec.dim),
                        offset: point.clone(),
                    })
                }
                ConvexFunctionSpec::IndicatorAffine { anchor, basis } => {
                    // x -> p + BBᵀ(x − p), assembled as matrix + offset.
                    let mut proj = Matrix::zeros(spec.dim, spec.dim);
                    for b in basis {
                        for i in 0..spec.dim {
                            for j in 0..spec.dim {
                                proj.set(i, j, proj.get(i, j) + b[i] * b[j]);
                            }
                        }
                    }
                    let offset = anchor.sub(&proj.matvec(anchor)?);
                    ResolventRep::Affine(AffineForm::new(proj, offset)?)
                }
                other => ResolventRep::Prox { function: other.clone(), scale: c },
            }
        }
        OperatorVariant::ScaledIdentityPlus { epsilon, inner } => {
            // Resolvent of c(εId + B) at y equals the resolvent of
            // (c/(1+cε))B at y/(1+cε).
            let s = 1.0 / (1.0 + c * epsilon);
            let inner_rep = build_resolvent(inner, c * s)?;
            if *epsilon == 0.0 {
                inner_rep
            } else {
                ResolventRep::ScaledInput { inner: Box::new(inner_rep), input_scale: s }
            }
        }
    };
    Ok(rep)
}

fn build_direct_eval(spec: &OperatorSpec) -> Option<Eval> {
    match &spec.variant {
        OperatorVariant::Linear { matrix } => {
            let m = matrix.clone();
            Some(Arc::new(move |x: &Vector| m.matvec(x)) as Eval)
        }
        OperatorVariant::Affine { matrix, offset } => {
            let m = matrix.clone();
            let b = offset.clone();
            Some(Arc::new(move |x: &Vector| Ok(m.matvec(x)?.add(&b))) as Eval)
        }
        OperatorVariant::Constant { value } => {
            let z = value.clone();
            Some(Arc::new(move |_: &Vector| Ok(z.clone())) as Eval)
        }
        OperatorVariant::DiagHarmonic { .. } => Some(Arc::new(move |x: &Vector| {
            Vector::from_computed(
                x.as_slice().iter().enumerate().map(|(i, &v)| v / (i as f64 + 1.0)).collect(),
            )
        }) as Eval),
        OperatorVariant::Subdifferential { function } => match function {
            ConvexFunctionSpec::Quadratic { lambda } => {
                let l = *lambda;
                Some(Arc::new(move |x: &Vector| Ok(x.scale(l))) as Eval)
            }
            ConvexFunctionSpec::L1 { lambda } if *lambda == 0.0 => {
                Some(Arc::new(move |x: &Vector| Ok(Vector::zeros(x.dim()))) as Eval)
            }
            _ => None,
        },
        OperatorVariant::NormalCone { .. } => None,
        OperatorVariant::ScaledIdentityPlus { epsilon, inner } => {
            let inner_eval = build_direct_eval(inner)?;
            let eps = *epsilon;
            Some(Arc::new(move |x: &Vector| Ok(inner_eval(x)?.add(&x.scale(eps)))) as Eval)
        }
    }
}

fn matrix_is_symmetric(m: &Matrix) -> bool {
    let scale = 1.0 + m.frobenius_norm();
    for i in 0..m.rows() {
        for j in (i + 1)..m.cols() {
            if (m.get(i, j) - m.get(j, i)).abs() > 1e-10 * scale {
                return false;
            }
        }
    }
    true
}

fn matrix_is_injective(m: &Matrix) -> bool {
    let gram = m.transpose().matmul(m).expect("square");
    match symmetric_eigenvalues(&gram) {
        Ok(eigs) => eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt() > 1e-12,
        Err(_) => false,
    }
}

/// Structure flags, exact per variant.
fn compute_flags(spec: &OperatorSpec) -> OperatorFlags {
    match &spec.variant {
        OperatorVariant::Linear { matrix } => OperatorFlags {
            is_linear: Flag::True,
            is_affine: Flag::True,
            is_subdifferential: Flag::from_bool(matrix_is_symmetric(matrix)),
            at_most_single_valued: Flag::True,
            disjointly_injective: Flag::from_bool(matrix_is_injective(matrix)),
        },
        OperatorVariant::Affine { matrix, offset } => OperatorFlags {
            is_linear: Flag::from_bool(offset.norm() <= tol::EQ_TOL),
            is_affine: Flag::True,
            is_subdifferential: Flag::from_bool(matrix_is_symmetric(matrix)),
            at_most_single_valued: Flag::True,
            disjointly_injective: Flag::from_bool(matrix_is_injective(matrix)),
        },
        OperatorVariant::Constant { value } => OperatorFlags {
            is_linear: Flag::from_bool(value.norm() == 0.0),
            is_affine: Flag::True,
            is_subdifferential: Flag::True,
            at_most_single_valued: Flag::True,
            disjointly_injective: Flag::False,
        },
        OperatorVariant::DiagHarmonic { .. } => OperatorFlags {
            is_linear: Flag::True,
            is_affine: Flag::True,
            is_subdifferential: Flag::True,
            at_most_single_valued: Flag::True,
            disjointly_injective: Flag::True,
        },
        OperatorVariant::Subdifferential { function } | OperatorVariant::NormalCone { set: function } => {
            function_flags(function, spec.dim)
        }
        OperatorVariant::ScaledIdentityPlus { epsilon, inner } => {
            let base = compute_flags(inner);
            if *epsilon == 0.0 {
                base
            } else {
                OperatorFlags {
                    is_linear: base.is_linear,
                    is_affine: base.is_affine,
                    is_subdifferential: base.is_subdifferential,
                    at_most_single_valued: base.at_most_single_valued,
                    // Strong monotonicity forces disjoint injectivity.
                    disjointly_injective: Flag::True,
                }
            }
        }
    }
}

fn function_flags(function: &ConvexFunctionSpec, dim: usize) -> OperatorFlags {
    let sub = Flag::True;
    match function {
        ConvexFunctionSpec::Quadratic { .. } => OperatorFlags {
            is_linear: Flag::True,
            is_affine: Flag::True,
            is_subdifferential: sub,
            at_most_single_valued: Flag::True,
            disjointly_injective: Flag::True,
        },
        ConvexFunctionSpec::L1 { lambda } => {
            if *lambda == 0.0 {
                // Zero function: the operator is x -> {0}.
                OperatorFlags {
                    is_linear: Flag::True,
                    is_affine: Flag::True,
                    is_subdifferential: sub,
                    at_most_single_valued: Flag::True,
                    disjointly_injective: Flag::False,
                }
            } else {
                OperatorFlags {
                    is_linear: Flag::False,
                    is_affine: Flag::False,
                    is_subdifferential: sub,
                    at_most_single_valued: Flag::False,
                    disjointly_injective: Flag::False,
                }
            }
        }
        ConvexFunctionSpec::IndicatorBall { .. } => OperatorFlags {
            is_linear: Flag::False,
            is_affine: Flag::False,
            is_subdifferential: sub,
            at_most_single_valued: Flag::False,
            disjointly_injective: Flag::False,
        },
        ConvexFunctionSpec::IndicatorBox { lower, upper } => {
            let pinned = (0..lower.dim()).filter(|&i| lower[i] == upper[i]).count();
            if pinned == lower.dim() {
                // Degenerate box: a single point.
                singleton_flags(&Vector::from_computed(lower.as_slice().to_vec()).expect("finite"))
            } else {
                OperatorFlags {
                    is_linear: Flag::False,
                    is_affine: Flag::False,
                    is_subdifferential: sub,
                    at_most_single_valued: Flag::False,
                    disjointly_injective: Flag::False,
                }
            }
        }
        ConvexFunctionSpec::IndicatorSingleton { point } => singleton_flags(point),
        ConvexFunctionSpec::IndicatorAffine { anchor, basis } => {
            if basis.is_empty() {
                return singleton_flags(anchor);
            }
            if basis.len() == dim {
                // Full span: the whole space, normal cone {0} everywhere.
                return OperatorFlags {
                    is_linear: Flag::True,
                    is_affine: Flag::True,
                    is_subdifferential: sub,
                    at_most_single_valued: Flag::True,
                    disjointly_injective: Flag::False,
                };
            }
            // Proper nontrivial subspace, possibly shifted.
            let mut residual = anchor.clone();
            for b in basis {
                residual = residual.axpy(-b.dot(anchor), b);
            }
            OperatorFlags {
                is_linear: Flag::from_bool(residual.norm() <= tol::EQ_TOL),
                is_affine: Flag::True,
                is_subdifferential: sub,
                at_most_single_valued: Flag::False,
                disjointly_injective: Flag::False,
            }
        }
    }
}

fn singleton_flags(point: &Vector) -> OperatorFlags {
    OperatorFlags {
        is_linear: Flag::from_bool(point.norm() == 0.0),
        is_affine: Flag::True,
        is_subdifferential: Flag::True,
        at_most_single_valued: Flag::False,
        // Domain is a single point, so distinct domain points never exist.
        disjointly_injective: Flag::True,
    }
}

/// Builds the operator handle: exact resolvent, optional direct evaluator,
/// exact structure flags.
pub fn make_operator(spec: &OperatorSpec) -> Result<MonotoneOperator> {
    spec.validate()?;
    let rep = build_resolvent(spec, 1.0)?;
    let (eval, form) = rep.into_eval();
    let provenance = Provenance::Resolvent { operator: spec.describe() };
    let resolvent = match form {
        Some(form) => FirmMap::from_affine(form, provenance),
        None => {
            let dim = spec.dim;
            FirmMap::from_eval(dim, provenance, move |x: &Vector| eval(x))
        }
    };
    let flags = compute_flags(spec);
    Ok(MonotoneOperator::new(resolvent, build_direct_eval(spec), flags))
}

/// Componentwise (n/(n+1))·xₙ, the resolvent of the harmonic diagonal family.
pub fn diag_harmonic_resolvent(d: usize, x: &Vector) -> Result<Vector> {
    if x.dim() != d {
        return Err(CoreError::DimensionMismatch { expected: d, got: x.dim() });
    }
    Vector::from_computed(
        x.as_slice()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let n = i as f64 + 1.0;
                v * n / (n + 1.0)
            })
            .collect(),
    )
}

/// The named instances every suite-level test runs over. Order is stable.
pub fn standard_catalog() -> Vec<(&'static str, OperatorSpec)> {
    let skew = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).expect("static");
    vec![
        ("skew", OperatorSpec::linear(skew.clone())),
        ("zero", OperatorSpec::linear(Matrix::zeros(2, 2))),
        ("twice_identity", OperatorSpec::linear(Matrix::identity(2).scale(2.0))),
        (
            "identity_plus_skew",
            OperatorSpec::linear(Matrix::identity(2).add(&skew).expect("static")),
        ),
        (
            "affine_diag",
            OperatorSpec::affine(
                Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).expect("static"),
                Vector::new(vec![1.0, -1.0]).expect("static"),
            ),
        ),
        ("constant_shift", OperatorSpec::constant(Vector::new(vec![1.0, 2.0]).expect("static"))),
        ("diag_harmonic_3", OperatorSpec::diag_harmonic(3)),
        (
            "prox_quadratic",
            OperatorSpec::subdifferential(ConvexFunctionSpec::Quadratic { lambda: 1.0 }, 2),
        ),
        ("prox_l1", OperatorSpec::subdifferential(ConvexFunctionSpec::L1 { lambda: 1.0 }, 2)),
        (
            "project_ball",
            OperatorSpec::normal_cone(ConvexFunctionSpec::IndicatorBall { radius: 1.0 }, 2),
        ),
        (
            "project_box",
            OperatorSpec::normal_cone(
                ConvexFunctionSpec::IndicatorBox {
                    lower: Vector::new(vec![-1.0, 0.0]).expect("static"),
                    upper: Vector::new(vec![1.0, 2.0]).expect("static"),
                },
                2,
            ),
        ),
        (
            "normal_cone_origin",
            OperatorSpec::normal_cone(
                ConvexFunctionSpec::IndicatorSingleton { point: Vector::zeros(2) },
                2,
            ),
        ),
        (
            "project_line",
            OperatorSpec::normal_cone(
                ConvexFunctionSpec::IndicatorAffine {
                    anchor: Vector::new(vec![0.0, 0.0, 1.0]).expect("static"),
                    basis: vec![
                        Vector::new(vec![1.0, 0.0, 0.0]).expect("static"),
                        Vector::new(vec![0.0, 1.0, 0.0]).expect("static"),
                    ],
                },
                3,
            ),
        ),
        (
            "strongly_monotone_skew",
            OperatorSpec::scaled_identity_plus(0.5, OperatorSpec::linear(skew)),
        ),
    ]
}
