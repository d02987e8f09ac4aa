//! Operator-splitting constructions and the iterations they drive:
//! compositions and convex combinations of maps, the Douglas-Rachford
//! operator, Picard iteration with divergence guards, and the contraction
//! analysis of reflected resolvents.

use serde::Serialize;

use crate::checks::{estimate_lipschitz, PropertyId, PropertyReport, Verdict};
use crate::error::{CoreError, Result};
use crate::linalg::Vector;
use crate::operator::{
    complement, minty_sample, reflect, AffineForm, FirmMap, MonotoneOperator, Provenance,
};
use crate::sample::{sample_companion_points, sample_points, SampleConfig};
use crate::tol;

fn require_same_dim(maps: &[FirmMap]) -> Result<usize> {
    let first = maps.first().ok_or(CoreError::Empty { what: "map list" })?;
    let dim = first.dim();
    for m in maps {
        if m.dim() != dim {
            return Err(CoreError::DimensionMismatch { expected: dim, got: m.dim() });
        }
    }
    Ok(dim)
}

/// Left-to-right composition: `maps[0]` is applied first, the last entry
/// last. Affine structure folds exactly when every factor carries it.
pub fn compose(maps: &[FirmMap]) -> Result<FirmMap> {
    let dim = require_same_dim(maps)?;
    let provenance = Provenance::Composition {
        of: maps.iter().map(|m| m.provenance().clone()).collect(),
    };
    let forms: Option<Vec<&AffineForm>> = maps.iter().map(|m| m.affine_form()).collect();
    let affine = match forms {
        Some(fs) => {
            let mut total = fs[0].clone();
            for f in &fs[1..] {
                total = f.after(&total)?;
            }
            Some(total)
        }
        None => None,
    };
    let owned: Vec<FirmMap> = maps.to_vec();
    let map = FirmMap::from_eval(dim, provenance, move |x| {
        let mut value = x.clone();
        for m in owned.iter() {
            value = m.apply(&value)?;
        }
        Ok(value)
    });
    Ok(match affine {
        Some(form) => map.with_affine_form(form),
        None => map,
    })
}

fn linear_combination(
    coeffs: &[f64],
    maps: &[FirmMap],
    provenance: Provenance,
) -> Result<FirmMap> {
    let dim = require_same_dim(maps)?;
    if coeffs.len() != maps.len() {
        return Err(CoreError::DimensionMismatch { expected: maps.len(), got: coeffs.len() });
    }
    let affine = if maps.iter().all(|m| m.affine_form().is_some()) {
        let mut total = AffineForm::identity(dim).scale(0.0);
        for (c, m) in coeffs.iter().zip(maps) {
            total = total.add(&m.affine_form().expect("checked").scale(*c))?;
        }
        Some(total)
    } else {
        None
    };
    let owned: Vec<FirmMap> = maps.to_vec();
    let weights = coeffs.to_vec();
    let map = FirmMap::from_eval(dim, provenance, move |x| {
        let mut value = Vector::zeros(x.dim());
        for (c, m) in weights.iter().zip(&owned) {
            value = value.axpy(*c, &m.apply(x)?);
        }
        Ok(value)
    });
    Ok(match affine {
        Some(form) => map.with_affine_form(form),
        None => map,
    })
}

/// Pointwise convex combination of maps. Weights must lie in (0, 1] and sum
/// to one; firmness is preserved by such combinations.
pub fn convex_combine(weights: &[f64], maps: &[FirmMap]) -> Result<FirmMap> {
    if weights.is_empty() {
        return Err(CoreError::Empty { what: "weight list" });
    }
    for &w in weights {
        if !(w.is_finite() && 0.0 < w && w <= 1.0) {
            return Err(CoreError::InvalidParameter {
                what: "convex weight",
                why: format!("must lie in (0, 1], got {w}"),
            });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(CoreError::InvalidParameter {
            what: "convex weights",
            why: format!("must sum to 1, got {sum}"),
        });
    }
    let provenance = Provenance::ConvexCombination {
        weights: weights.to_vec(),
        of: maps.iter().map(|m| m.provenance().clone()).collect(),
    };
    linear_combination(weights, maps, provenance)
}

/// The backward-backward map: the first operator's resolvent applied first,
/// then the second's.
pub fn backward_backward(a: &MonotoneOperator, b: &MonotoneOperator) -> Result<FirmMap> {
    compose(&[a.resolvent().clone(), b.resolvent().clone()])
}

/// The Douglas-Rachford operator of a pair: the half-and-half average of the
/// identity with the second reflected resolvent followed by the first.
/// Firmly nonexpansive because the reflected composition is nonexpansive.
pub fn douglas_rachford_operator(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
) -> Result<FirmMap> {
    let reflected = compose(&[reflect(b.resolvent()), reflect(a.resolvent())])?;
    convex_combine(&[0.5, 0.5], &[FirmMap::identity(reflected.dim()), reflected])
}

/// Full record of a Picard run x_{k+1} = T(x_k).
#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub diverged: bool,
    pub limit_point: Option<Vector>,
}

/// Iterates the map from a start point until the step length drops below
/// `stop_tol`, the iterate norm passes the divergence guard, or the
/// iteration budget runs out.
pub fn picard_iterate(
    t: &FirmMap,
    start: &Vector,
    max_iter: usize,
    stop_tol: f64,
) -> Result<IterationTrace> {
    if max_iter == 0 {
        return Err(CoreError::InvalidParameter {
            what: "iteration budget",
            why: "must be positive".into(),
        });
    }
    if !(stop_tol.is_finite() && stop_tol > 0.0) {
        return Err(CoreError::InvalidParameter {
            what: "stopping tolerance",
            why: format!("must be finite and positive, got {stop_tol}"),
        });
    }
    let mut iterates = vec![start.clone()];
    let mut residuals = Vec::new();
    let mut x = start.clone();
    let mut converged = false;
    let mut diverged = false;
    for _ in 0..max_iter {
        let next = t.apply(&x)?;
        let step = next.dist(&x);
        residuals.push(step);
        iterates.push(next.clone());
        x = next;
        if x.norm() > tol::DIVERGENCE_GUARD {
            diverged = true;
            break;
        }
        if step <= stop_tol {
            converged = true;
            break;
        }
    }
    let limit_point = converged.then(|| x.clone());
    Ok(IterationTrace {
        iterations_used: residuals.len(),
        iterates,
        residuals,
        converged,
        diverged,
        limit_point,
    })
}

/// Contraction analysis of the reflected resolvent N = 2T − Id at a given
/// constant β, through three equivalent inequalities: one on the operator
/// graph, one through the firm margin of T, and one directly on N.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionAnalysis {
    pub beta: f64,
    pub beta_source: String,
    pub beta_estimate: f64,
    pub beta_exact: Option<f64>,
    pub condition_i_verdict: Verdict,
    pub condition_ii_verdict: Verdict,
    pub condition_iii_verdict: Verdict,
    pub agree: bool,
    pub worst_margin_i: f64,
    pub worst_margin_ii: f64,
    pub worst_margin_iii: f64,
    pub sample_count: usize,
    pub seed: u64,
}

/// Evaluates the three faces of the contraction property at one β: on graph
/// pairs, on firm margins of the resolvent, and on the reflected map itself.
/// They are equivalent in exact arithmetic, so their verdicts must agree.
pub fn analyze_reflected_contraction(
    a: &MonotoneOperator,
    beta: Option<f64>,
    cfg: &SampleConfig,
) -> Result<ContractionAnalysis> {
    if let Some(b) = beta {
        if !(b.is_finite() && (0.0..1.0).contains(&b)) {
            return Err(CoreError::InvalidParameter {
                what: "contraction constant",
                why: format!("must lie in [0, 1), got {b}"),
            });
        }
    }
    let t = a.resolvent();
    let n_map = reflect(t);
    let lip = estimate_lipschitz(&n_map, cfg)?;
    let beta_estimate = lip.constants.get("lipschitz").copied().unwrap_or(0.0);
    let beta_exact = lip.constants.get("spectral").copied();
    let (beta_used, beta_source) = match (beta, beta_exact) {
        (Some(b), _) => (b, "provided"),
        (None, Some(e)) => (e, "exact"),
        (None, None) => (beta_estimate, "estimated"),
    };
    let bsq = beta_used * beta_used;

    // Graph inequality: (1−β²)(‖x−y‖² + ‖u−v‖²) ≤ 2(1+β²)⟨x−y, u−v⟩.
    let graph_cfg = SampleConfig::new(cfg.seed, cfg.count.min(120), cfg.dim, cfg.scale)?;
    let g = minty_sample(a, &sample_points(&graph_cfg))?;
    let mut worst_graph = f64::INFINITY;
    for i in 0..g.pairs.len() {
        for j in (i + 1)..g.pairs.len() {
            let (x, u) = &g.pairs[i];
            let (y, v) = &g.pairs[j];
            let dx = x.sub(y);
            let du = u.sub(v);
            let sq = dx.dot(&dx) + du.dot(&du);
            let lhs = (1.0 - bsq) * sq;
            let rhs = 2.0 * (1.0 + bsq) * dx.dot(&du);
            worst_graph = worst_graph.min(rhs - lhs + tol::CHECK_TOL * (1.0 + sq));
        }
    }

    // Pointwise firm-margin route: (1−β²)‖Δ‖² ≤ 4⟨TΔ, (Id−T)Δ⟩.
    let comp = complement(t);
    let xs = sample_points(cfg);
    let ys = sample_companion_points(cfg);
    let mut worst_pointwise = f64::INFINITY;
    let mut worst_direct = f64::INFINITY;
    let mut used = 0usize;
    for (x, y) in xs.iter().zip(&ys) {
        let dist = x.dist(y);
        if dist <= tol::DEGENERATE_PAIR {
            continue;
        }
        used += 1;
        let d = x.sub(y);
        let dd = d.dot(&d);
        let td = t.apply(x)?.sub(&t.apply(y)?);
        let cd = comp.apply(x)?.sub(&comp.apply(y)?);
        worst_pointwise = worst_pointwise
            .min(4.0 * td.dot(&cd) - (1.0 - bsq) * dd + tol::CHECK_TOL * (1.0 + dd));
        let nd = n_map.apply(x)?.sub(&n_map.apply(y)?);
        worst_direct =
            worst_direct.min(beta_used * dist - nd.norm() + tol::CHECK_TOL * (1.0 + dist));
    }
    if used == 0 || !worst_graph.is_finite() {
        return Err(CoreError::Empty { what: "non-degenerate sample pairs" });
    }

    let verdict = |margin: f64| {
        if margin >= 0.0 {
            Verdict::HoldsOnSamples
        } else {
            Verdict::Violated
        }
    };
    let condition_i_verdict = verdict(worst_graph);
    let condition_ii_verdict = verdict(worst_pointwise);
    let condition_iii_verdict = verdict(worst_direct);
    let agree = condition_i_verdict == condition_ii_verdict
        && condition_ii_verdict == condition_iii_verdict;
    Ok(ContractionAnalysis {
        beta: beta_used,
        beta_source: beta_source.to_string(),
        beta_estimate,
        beta_exact,
        condition_i_verdict,
        condition_ii_verdict,
        condition_iii_verdict,
        agree,
        worst_margin_i: worst_graph,
        worst_margin_ii: worst_pointwise,
        worst_margin_iii: worst_direct,
        sample_count: used,
        seed: cfg.seed,
    })
}

/// Certifies ε-strong monotonicity through the reflected resolvent: the
/// operator is ε-strongly monotone exactly when ε·Id + (1+ε)·(2T − Id) is
/// nonexpansive. Cross-validated against the direct graph estimate; a
/// disagreement between the two routes downgrades the verdict to
/// inconclusive.
pub fn check_strong_mono_via_reflected(
    a: &MonotoneOperator,
    epsilon: f64,
    cfg: &SampleConfig,
) -> Result<PropertyReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CoreError::InvalidParameter {
            what: "strong monotonicity constant",
            why: format!("must be finite and positive, got {epsilon}"),
        });
    }
    let n_map = reflect(a.resolvent());
    let dim = n_map.dim();
    let device = linear_combination(
        &[epsilon, 1.0 + epsilon],
        &[FirmMap::identity(dim), n_map],
        Provenance::Custom {
            label: format!("{epsilon}*identity + {}*reflected_resolvent", 1.0 + epsilon),
        },
    )?;
    let mut report = estimate_lipschitz(&device, cfg)?;
    report.property_id = PropertyId::StrongMonotonicity;
    report.constants.insert("requested_epsilon".into(), epsilon);
    report.notes.push(
        "nonexpansiveness of eps*Id + (1+eps)*(2T - Id) certifies the requested constant".into(),
    );

    let graph_cfg = SampleConfig::new(cfg.seed, cfg.count.min(120), cfg.dim, cfg.scale)?;
    let g = minty_sample(a, &sample_points(&graph_cfg))?;
    let direct = crate::checks::estimate_strong_monotonicity(&g, Some(epsilon), cfg.seed)?;
    if let Some(value) = direct.constants.get("strong_mono") {
        report.constants.insert("strong_mono_estimate".into(), *value);
    }
    if direct.verdict != report.verdict {
        let device_verdict = report.verdict;
        report.verdict = Verdict::Inconclusive;
        report.notes.push(format!(
            "reflected-map route says {} but the direct graph estimate says {}",
            device_verdict, direct.verdict
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointOutcome {
    SingletonEvidence,
    MultipleLimits,
    EmptyOrNonattracting,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointEvidence {
    pub outcome: FixedPointOutcome,
    pub limits: Vec<Vector>,
    pub diameter: Option<f64>,
    pub runs: usize,
    pub converged_runs: usize,
    pub seed: u64,
}

/// Runs Picard iteration from several sampled starts and summarizes what the
/// limits say about the fixed-point set: converging runs that agree to
/// within 1e-6 evidence a singleton, spread-out limits evidence a larger
/// set, and no convergence at all leaves emptiness or non-attraction open.
pub fn fixed_point_evidence(
    t: &FirmMap,
    starts: usize,
    max_iter: usize,
    stop_tol: f64,
    cfg: &SampleConfig,
) -> Result<FixedPointEvidence> {
    if starts == 0 {
        return Err(CoreError::InvalidParameter {
            what: "start count",
            why: "must be positive".into(),
        });
    }
    let start_cfg = SampleConfig::new(cfg.seed, starts, cfg.dim, cfg.scale)?;
    let mut limits = Vec::new();
    for start in sample_points(&start_cfg) {
        let trace = picard_iterate(t, &start, max_iter, stop_tol)?;
        if let Some(limit) = trace.limit_point {
            limits.push(limit);
        }
    }
    let converged_runs = limits.len();
    let diameter = if limits.len() >= 2 {
        let mut d: f64 = 0.0;
        for i in 0..limits.len() {
            for j in (i + 1)..limits.len() {
                d = d.max(limits[i].dist(&limits[j]));
            }
        }
        Some(d)
    } else if limits.len() == 1 {
        Some(0.0)
    } else {
        None
    };
    let outcome = match diameter {
        None => FixedPointOutcome::EmptyOrNonattracting,
        Some(d) if d <= 1e-6 => FixedPointOutcome::SingletonEvidence,
        Some(_) => FixedPointOutcome::MultipleLimits,
    };
    Ok(FixedPointEvidence { outcome, limits, diameter, runs: starts, converged_runs, seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_operator, ConvexFunctionSpec, OperatorSpec};
    use crate::checks::check_firm;
    use crate::linalg::Matrix;

    fn cfg(seed: u64, count: usize) -> SampleConfig {
        SampleConfig::new(seed, count, 2, 2.0).unwrap()
    }

    fn affine_map(m: Matrix, b: Vec<f64>) -> FirmMap {
        FirmMap::from_affine(
            AffineForm::new(m, Vector::new(b).unwrap()).unwrap(),
            Provenance::AffineMap,
        )
    }

    #[test]
    fn composition_applies_left_to_right() {
        let shift = affine_map(Matrix::identity(2), vec![1.0, 1.0]);
        let double = affine_map(Matrix::identity(2).scale(2.0), vec![0.0, 0.0]);
        let composed = compose(&[shift.clone(), double.clone()]).unwrap();
        let x = Vector::new(vec![1.0, 2.0]).unwrap();
        // double(shift(x)) = 2x + 2.
        assert_eq!(composed.apply(&x).unwrap().as_slice(), &[4.0, 6.0]);
        let other = compose(&[double, shift]).unwrap();
        // shift(double(x)) = 2x + 1.
        assert_eq!(other.apply(&x).unwrap().as_slice(), &[3.0, 5.0]);
        // The affine fold must match the closure route exactly.
        let form = composed.affine_form().unwrap();
        assert_eq!(form.apply(&x).unwrap().as_slice(), &[4.0, 6.0]);
    }

    #[test]
    fn composition_with_a_contraction_contracts() {
        // One factor with constant 1/3 caps the composition's constant.
        let two = make_operator(&OperatorSpec::linear(Matrix::identity(2).scale(2.0))).unwrap();
        let boxp = make_operator(&OperatorSpec::normal_cone(
            ConvexFunctionSpec::IndicatorBox {
                lower: Vector::new(vec![-1.0, -1.0]).unwrap(),
                upper: Vector::new(vec![1.0, 1.0]).unwrap(),
            },
            2,
        ))
        .unwrap();
        let composed = compose(&[boxp.resolvent().clone(), two.resolvent().clone()]).unwrap();
        let report = crate::checks::estimate_lipschitz(&composed, &cfg(30, 300)).unwrap();
        assert!(report.constants["lipschitz"] <= 1.0 / 3.0 + 1e-9);
    }

    #[test]
    fn convex_combination_validates_weights() {
        let id = FirmMap::identity(2);
        let zero = affine_map(Matrix::zeros(2, 2), vec![0.0, 0.0]);
        assert!(convex_combine(&[0.7, 0.2], &[id.clone(), zero.clone()]).is_err());
        assert!(convex_combine(&[1.2, -0.2], &[id.clone(), zero.clone()]).is_err());
        let half = convex_combine(&[0.5, 0.5], &[id, zero]).unwrap();
        let x = Vector::new(vec![4.0, -2.0]).unwrap();
        assert_eq!(half.apply(&x).unwrap().as_slice(), &[2.0, -1.0]);
        assert!(half.affine_form().is_some());
        // Half-and-half of the zero map and the identity has constant 1/2.
        let report = crate::checks::estimate_lipschitz(&half, &cfg(30, 200)).unwrap();
        assert!((report.constants["spectral"] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn douglas_rachford_is_firm_and_solves_the_inclusion() {
        // A = subdifferential of the unit quadratic, B = constant shift c.
        // The zero of A + B is -c; the scheme's fixed point maps there
        // through B's resolvent.
        let a = make_operator(&OperatorSpec::subdifferential(
            ConvexFunctionSpec::Quadratic { lambda: 1.0 },
            2,
        ))
        .unwrap();
        let c = Vector::new(vec![1.0, -2.0]).unwrap();
        let b = make_operator(&OperatorSpec::constant(c.clone())).unwrap();
        let dr = douglas_rachford_operator(&a, &b).unwrap();
        let firm = check_firm(&dr, &cfg(31, 200)).unwrap();
        assert_eq!(firm.verdict, Verdict::HoldsOnSamples);

        let start = Vector::new(vec![5.0, 7.0]).unwrap();
        let trace = picard_iterate(&dr, &start, 500, 1e-12).unwrap();
        assert!(trace.converged);
        let fixed = trace.limit_point.unwrap();
        let solution = b.resolvent().apply(&fixed).unwrap();
        let expected = c.scale(-1.0);
        assert!(solution.dist(&expected) <= 1e-8, "solution {:?}", solution.as_slice());
    }

    #[test]
    fn backward_backward_folds_affine_structure() {
        let a = make_operator(&OperatorSpec::subdifferential(
            ConvexFunctionSpec::Quadratic { lambda: 1.0 },
            2,
        ))
        .unwrap();
        let bb = backward_backward(&a, &a).unwrap();
        let form = bb.affine_form().expect("both factors affine");
        let x = Vector::new(vec![8.0, -4.0]).unwrap();
        assert_eq!(form.apply(&x).unwrap().as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn picard_translation_never_converges() {
        let shift = affine_map(Matrix::identity(2), vec![1.0, 0.0]);
        let trace = picard_iterate(&shift, &Vector::zeros(2), 50, 1e-9).unwrap();
        assert!(!trace.converged);
        assert!(!trace.diverged);
        assert_eq!(trace.iterations_used, 50);
        // Residuals stay pinned at the shift length.
        assert!(trace.residuals.iter().all(|&r| (r - 1.0).abs() <= 1e-15));
    }

    #[test]
    fn picard_detects_divergence() {
        let blow = affine_map(Matrix::identity(2).scale(10.0), vec![0.0, 0.0]);
        let trace = picard_iterate(&blow, &Vector::new(vec![1.0, 1.0]).unwrap(), 100, 1e-9)
            .unwrap();
        assert!(trace.diverged);
        assert!(!trace.converged);
    }

    #[test]
    fn reflected_contraction_constants_match_theory() {
        // A = 2·Id reflects to -Id/3.
        let two = make_operator(&OperatorSpec::linear(Matrix::identity(2).scale(2.0))).unwrap();
        let analysis = analyze_reflected_contraction(&two, None, &cfg(32, 200)).unwrap();
        assert_eq!(analysis.beta_source, "exact");
        assert!((analysis.beta - 1.0 / 3.0).abs() <= 1e-12);
        assert_eq!(analysis.condition_i_verdict, Verdict::HoldsOnSamples);
        assert_eq!(analysis.condition_ii_verdict, Verdict::HoldsOnSamples);
        assert_eq!(analysis.condition_iii_verdict, Verdict::HoldsOnSamples);
        assert!(analysis.agree);

        // Below the true constant all three conditions must fail together.
        let tight = analyze_reflected_contraction(&two, Some(0.2), &cfg(32, 200)).unwrap();
        assert_eq!(tight.condition_i_verdict, Verdict::Violated);
        assert_eq!(tight.condition_ii_verdict, Verdict::Violated);
        assert_eq!(tight.condition_iii_verdict, Verdict::Violated);
        assert!(tight.agree);

        // A = Id reflects to the zero map.
        let one = make_operator(&OperatorSpec::linear(Matrix::identity(2))).unwrap();
        let analysis = analyze_reflected_contraction(&one, None, &cfg(32, 200)).unwrap();
        assert!(analysis.beta.abs() <= 1e-12);
        assert!(analysis.agree);
        assert_eq!(analysis.condition_iii_verdict, Verdict::HoldsOnSamples);
    }

    #[test]
    fn strong_monotonicity_via_reflected_device() {
        let two = make_operator(&OperatorSpec::linear(Matrix::identity(2).scale(2.0))).unwrap();
        let at_constant = check_strong_mono_via_reflected(&two, 2.0, &cfg(33, 150)).unwrap();
        assert_eq!(at_constant.verdict, Verdict::HoldsOnSamples);
        let above = check_strong_mono_via_reflected(&two, 2.5, &cfg(33, 150)).unwrap();
        assert_eq!(above.verdict, Verdict::Violated);

        let id = make_operator(&OperatorSpec::linear(Matrix::identity(2))).unwrap();
        let at_one = check_strong_mono_via_reflected(&id, 1.0, &cfg(33, 150)).unwrap();
        assert_eq!(at_one.verdict, Verdict::HoldsOnSamples);

        let skew = make_operator(&OperatorSpec::linear(
            Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap(),
        ))
        .unwrap();
        let positive = check_strong_mono_via_reflected(&skew, 0.1, &cfg(33, 150)).unwrap();
        assert_eq!(positive.verdict, Verdict::Violated);
        assert!(check_strong_mono_via_reflected(&skew, 0.0, &cfg(33, 50)).is_err());
    }

    #[test]
    fn fixed_point_evidence_distinguishes_the_three_outcomes() {
        let half = FirmMap::from_matrix(Matrix::identity(2).scale(0.5)).unwrap();
        let evidence = fixed_point_evidence(&half, 6, 400, 1e-12, &cfg(34, 50)).unwrap();
        assert_eq!(evidence.outcome, FixedPointOutcome::SingletonEvidence);
        assert_eq!(evidence.converged_runs, 6);
        for limit in &evidence.limits {
            assert!(limit.norm() <= 1e-9);
        }

        let boxp = make_operator(&OperatorSpec::normal_cone(
            ConvexFunctionSpec::IndicatorBox {
                lower: Vector::new(vec![-1.0, -1.0]).unwrap(),
                upper: Vector::new(vec![1.0, 1.0]).unwrap(),
            },
            2,
        ))
        .unwrap();
        let evidence =
            fixed_point_evidence(boxp.resolvent(), 6, 400, 1e-12, &cfg(34, 50)).unwrap();
        assert_eq!(evidence.outcome, FixedPointOutcome::MultipleLimits);
        assert!(evidence.diameter.unwrap() > 1e-3);

        let shift = affine_map(Matrix::identity(2), vec![0.5, 0.0]);
        let evidence = fixed_point_evidence(&shift, 4, 200, 1e-9, &cfg(34, 50)).unwrap();
        assert_eq!(evidence.outcome, FixedPointOutcome::EmptyOrNonattracting);
        assert_eq!(evidence.converged_runs, 0);
    }

    #[test]
    fn traces_serialize_for_reports() {
        let half = FirmMap::from_matrix(Matrix::identity(2).scale(0.5)).unwrap();
        let trace = picard_iterate(&half, &Vector::new(vec![1.0, 1.0]).unwrap(), 60, 1e-10)
            .unwrap();
        assert!(trace.converged);
        let text = serde_json::to_string(&trace).unwrap();
        assert!(text.contains("\"converged\":true"));
    }
}
