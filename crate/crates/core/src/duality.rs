//! Duality harness: runs each property check on an operator and on its
//! inverse simultaneously, from the same seed, and reports whether the
//! verdicts stand in the relation the theory predicts.
//!
//! The dual side is built by exact transport, never by re-estimation: the
//! dual resolvent is the complement map, the dual graph is the primal graph
//! with pairs swapped. Self-dual rows therefore compare two runs whose
//! arithmetic mirrors to within rounding.

use serde::Serialize;

use crate::catalog::ConvexFunctionSpec;
use crate::checks::{
    check_cyclic_firm, check_paramonotone, check_strict, classify_structure, rectangular_trend,
    PropertyId, PropertyReport, Verdict,
};
use crate::error::{CoreError, Result};
use crate::linalg::Vector;
use crate::operator::{complement, minty_sample, FirmMap, MonotoneOperator};
use crate::sample::{sample_points, SampleConfig};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum DualityRelation {
    /// The property transfers unchanged to the inverse operator.
    SelfDual,
    /// The property maps to a different property of the inverse.
    DualPair { partner: PropertyId },
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityRow {
    pub property_id: PropertyId,
    #[serde(flatten)]
    pub expected_relation: DualityRelation,
    pub verdict_primal: Verdict,
    pub verdict_dual: Verdict,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal: Option<PropertyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<PropertyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualitySuiteResult {
    pub rows: Vec<DualityRow>,
    pub seed: u64,
}

impl DualitySuiteResult {
    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|row| row.consistent)
    }

    pub fn row(&self, id: PropertyId) -> Option<&DualityRow> {
        self.rows.iter().find(|row| row.property_id == id)
    }
}

fn make_row(
    id: PropertyId,
    relation: DualityRelation,
    primal: PropertyReport,
    dual: PropertyReport,
) -> DualityRow {
    let consistent = primal.verdict == dual.verdict;
    DualityRow {
        property_id: id,
        expected_relation: relation,
        verdict_primal: primal.verdict,
        verdict_dual: dual.verdict,
        consistent,
        primal: if consistent { None } else { Some(primal) },
        dual: if consistent { None } else { Some(dual) },
    }
}

/// Runs the duality table on an operator: every row checks one property on
/// the primal side and its predicted counterpart on the inverse side, from
/// identical samples.
pub fn run_duality_suite(a: &MonotoneOperator, cfg: &SampleConfig) -> Result<DualitySuiteResult> {
    let t = a.resolvent();
    let tc = complement(t);
    let a_inv = a.inverse();

    // One primal graph; the dual side reuses it with pairs swapped so that
    // both sides see literally the same set of graph points.
    let graph_cfg = SampleConfig::new(cfg.seed, cfg.count.min(120), cfg.dim, cfg.scale)?;
    let g = minty_sample(a, &sample_points(&graph_cfg))?;
    let g_swapped = g.swap();

    let strict_primal = check_strict(t, cfg)?;
    let strict_dual = check_strict(&tc, cfg)?;
    let class_primal = classify_structure(t, cfg)?;
    let class_dual = classify_structure(&tc, cfg)?;

    let tuples_per_n = cfg.count.clamp(1, 300);
    let cyclic_primal = check_cyclic_firm(t, 4, tuples_per_n, cfg)?;
    let cyclic_dual = check_cyclic_firm(&tc, 4, tuples_per_n, cfg)?;

    let para_primal = check_paramonotone(a, &g, cfg.seed)?;
    let para_dual = check_paramonotone(&a_inv, &g_swapped, cfg.seed)?;

    let trend_cfg = SampleConfig::new(cfg.seed, cfg.count.min(100), cfg.dim, cfg.scale)?;
    let trend_scales = [1.0, 10.0, 100.0];
    let trend_primal = rectangular_trend(a, &trend_cfg, &trend_scales)?;
    let trend_dual = rectangular_trend(&a_inv, &trend_cfg, &trend_scales)?;

    let rows = vec![
        make_row(
            PropertyId::StrictFirm,
            DualityRelation::SelfDual,
            strict_primal.strict_firm,
            strict_dual.strict_firm,
        ),
        make_row(
            PropertyId::StrictNonexpansive,
            DualityRelation::DualPair { partner: PropertyId::Injective },
            strict_primal.strict_nonexpansive,
            strict_dual.injective,
        ),
        make_row(
            PropertyId::Injective,
            DualityRelation::DualPair { partner: PropertyId::StrictNonexpansive },
            strict_primal.injective,
            strict_dual.strict_nonexpansive,
        ),
        make_row(
            PropertyId::Paramonotone,
            DualityRelation::SelfDual,
            para_primal,
            para_dual,
        ),
        make_row(
            PropertyId::CyclicFirm,
            DualityRelation::SelfDual,
            cyclic_primal,
            cyclic_dual,
        ),
        make_row(
            PropertyId::Rectangular,
            DualityRelation::SelfDual,
            trend_primal,
            trend_dual,
        ),
        make_row(
            PropertyId::Linear,
            DualityRelation::SelfDual,
            class_primal.linear,
            class_dual.linear,
        ),
        make_row(
            PropertyId::Affine,
            DualityRelation::SelfDual,
            class_primal.affine,
            class_dual.affine,
        ),
    ];
    Ok(DualitySuiteResult { rows, seed: cfg.seed })
}

fn preimage_residual(t: &FirmMap, x: &Vector, target: &Vector) -> Result<f64> {
    Ok(t.apply(x)?.sub(target).norm())
}

/// Shrinking compass search on x ↦ ‖T(x) − target‖ from one start.
fn refine_preimage(t: &FirmMap, target: &Vector, start: &Vector, scale: f64) -> Result<f64> {
    let dim = start.dim();
    let mut x = start.clone();
    let mut best = preimage_residual(t, &x, target)?;
    let mut h = scale.max(1e-3);
    let mut evals = 0usize;
    while h > 1e-10 && evals < 4000 {
        let mut improved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut coords = x.as_slice().to_vec();
                coords[i] += sign * h;
                let cand = Vector::new(coords)?;
                let r = preimage_residual(t, &cand, target)?;
                evals += 1;
                if r < best {
                    best = r;
                    x = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best)
}

/// Multi-start search for preimages of the given targets under the map.
/// Finding every target within tolerance supports surjectivity on those
/// samples; failing to find one is never a disproof, so the negative verdict
/// is inconclusive with the residual reported.
pub fn surjectivity_probe(
    t: &FirmMap,
    targets: &[Vector],
    starts: usize,
    cfg: &SampleConfig,
) -> Result<PropertyReport> {
    if targets.is_empty() {
        return Err(CoreError::Empty { what: "target list" });
    }
    if starts == 0 {
        return Err(CoreError::InvalidParameter {
            what: "start count",
            why: "must be positive".into(),
        });
    }
    for target in targets {
        if target.dim() != t.dim() {
            return Err(CoreError::DimensionMismatch { expected: t.dim(), got: target.dim() });
        }
    }
    let start_cfg = SampleConfig::new(cfg.seed, starts, cfg.dim, cfg.scale)?;
    let random_starts = sample_points(&start_cfg);

    let mut report = PropertyReport {
        property_id: PropertyId::Surjectivity,
        verdict: Verdict::HoldsOnSamples,
        witness: None,
        constants: Default::default(),
        sample_count: targets.len(),
        seed: cfg.seed,
        notes: Vec::new(),
    };
    let mut max_residual: f64 = 0.0;
    for (k, target) in targets.iter().enumerate() {
        let mut best = f64::INFINITY;
        // Deterministic starts first: the target itself and the origin.
        let mut all_starts = vec![target.clone(), Vector::zeros(t.dim())];
        all_starts.extend(random_starts.iter().cloned());
        for start in &all_starts {
            best = best.min(refine_preimage(t, target, start, cfg.scale)?);
            if best <= tol::PREIMAGE_TOL {
                break;
            }
        }
        report.constants.insert(format!("residual_{k}"), best);
        max_residual = max_residual.max(best);
        if best > tol::PREIMAGE_TOL {
            report.verdict = Verdict::Inconclusive;
            report
                .notes
                .push(format!("no preimage found for target {k} (residual {best:.3e})"));
        }
    }
    report.constants.insert("max_residual".into(), max_residual);
    Ok(report)
}

/// Verifies the proximal decomposition of the identity: the proximal map of
/// a function and that of its conjugate sum to the identity. The conjugate
/// side is evaluated twice, through the closed-form conjugate when the
/// catalog has one and through the inverse-operator route, which must agree.
pub fn moreau_check(
    f: &ConvexFunctionSpec,
    dim: usize,
    cfg: &SampleConfig,
) -> Result<PropertyReport> {
    f.validate()?;
    let spec = crate::catalog::OperatorSpec::subdifferential(f.clone(), dim);
    let a = crate::catalog::make_operator(&spec)?;
    let t = a.resolvent();
    let dual_resolvent_owner = a.inverse();
    let dual_resolvent = dual_resolvent_owner.resolvent();
    let conjugate = f.conjugate(dim);

    let sample_cfg = SampleConfig::new(cfg.seed, cfg.count, dim, cfg.scale)?;
    let points = sample_points(&sample_cfg);

    let mut max_sum = 0.0f64;
    let mut max_conj = 0.0f64;
    for x in &points {
        let p = t.apply(x)?;
        let q = dual_resolvent.apply(x)?;
        let sum_residual = p.add(&q).sub(x).norm();
        max_sum = max_sum.max(sum_residual);
        if let Some(g) = &conjugate {
            let closed = g.prox(x)?;
            max_conj = max_conj.max(closed.sub(&q).norm());
        }
    }

    let mut report = PropertyReport {
        property_id: PropertyId::MoreauDecomposition,
        verdict: Verdict::Inconclusive,
        witness: None,
        constants: Default::default(),
        sample_count: points.len(),
        seed: cfg.seed,
        notes: Vec::new(),
    };
    report.constants.insert("max_sum_residual".into(), max_sum);
    match conjugate {
        Some(g) => {
            report.constants.insert("max_conjugate_residual".into(), max_conj);
            report.notes.push(format!("conjugate resolved in the catalog as {}", g.label()));
            if max_sum <= tol::EQ_TOL && max_conj <= tol::EQ_TOL {
                report.verdict = Verdict::HoldsOnSamples;
            } else {
                report.verdict = Verdict::Violated;
            }
        }
        None => {
            report.notes.push(
                "catalog has no closed-form conjugate for this function; only the \
                 inverse-operator route was checked"
                    .into(),
            );
            if max_sum > tol::EQ_TOL {
                report.verdict = Verdict::Violated;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_operator, standard_catalog, ConvexFunctionSpec, OperatorSpec};
    use crate::linalg::Matrix;

    fn cfg(seed: u64, count: usize, dim: usize) -> SampleConfig {
        SampleConfig::new(seed, count, dim, 2.0).unwrap()
    }

    #[test]
    fn quadratic_subdifferential_suite_is_fully_consistent() {
        let a = make_operator(&OperatorSpec::subdifferential(
            ConvexFunctionSpec::Quadratic { lambda: 1.0 },
            2,
        ))
        .unwrap();
        let suite = run_duality_suite(&a, &cfg(21, 200, 2)).unwrap();
        assert!(suite.all_consistent(), "rows: {:#?}", suite.rows);
        let sf = suite.row(PropertyId::StrictFirm).unwrap();
        assert_eq!(sf.verdict_primal, Verdict::HoldsOnSamples);
    }

    #[test]
    fn rotation_suite_pairs_strictness_with_injectivity() {
        let a = make_operator(&OperatorSpec::linear(
            Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap(),
        ))
        .unwrap();
        let suite = run_duality_suite(&a, &cfg(22, 250, 2)).unwrap();
        assert!(suite.all_consistent(), "rows: {:#?}", suite.rows);
        let sn = suite.row(PropertyId::StrictNonexpansive).unwrap();
        assert_eq!(sn.verdict_primal, Verdict::HoldsOnSamples);
        assert_eq!(
            sn.expected_relation,
            DualityRelation::DualPair { partner: PropertyId::Injective }
        );
        let sf = suite.row(PropertyId::StrictFirm).unwrap();
        assert_eq!(sf.verdict_primal, Verdict::Violated);
        assert_eq!(sf.verdict_dual, Verdict::Violated);
        let para = suite.row(PropertyId::Paramonotone).unwrap();
        assert_eq!(para.verdict_primal, Verdict::Violated);
    }

    #[test]
    fn zero_matrix_pairs_identity_resolvent_with_zero_complement() {
        // A = 0: the resolvent is the identity (not injective-complement
        // side) and the complement is the zero map.
        let a = make_operator(&OperatorSpec::linear(Matrix::zeros(2, 2))).unwrap();
        let suite = run_duality_suite(&a, &cfg(23, 200, 2)).unwrap();
        assert!(suite.all_consistent(), "rows: {:#?}", suite.rows);
        // T = Id is not strictly nonexpansive, and Id − T = 0 is not
        // injective; the paired row must agree in the violated verdict.
        let sn = suite.row(PropertyId::StrictNonexpansive).unwrap();
        assert_eq!(sn.verdict_primal, Verdict::Violated);
        assert_eq!(sn.verdict_dual, Verdict::Violated);
    }

    #[test]
    fn whole_catalog_runs_consistently() {
        for (name, spec) in standard_catalog() {
            let a = make_operator(&spec).unwrap();
            let suite = run_duality_suite(&a, &cfg(24, 200, spec.dim)).unwrap();
            for row in &suite.rows {
                assert!(
                    row.consistent,
                    "{name}: row {} primal {} dual {}",
                    row.property_id, row.verdict_primal, row.verdict_dual
                );
            }
        }
    }

    #[test]
    fn surjectivity_finds_preimages_for_invertible_maps() {
        let a = make_operator(&OperatorSpec::linear(
            Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap(),
        ))
        .unwrap();
        let targets = vec![
            Vector::new(vec![0.3, -0.2]).unwrap(),
            Vector::new(vec![-1.0, 0.5]).unwrap(),
        ];
        let report = surjectivity_probe(a.resolvent(), &targets, 4, &cfg(25, 50, 2)).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnSamples, "{:?}", report.constants);
        assert!(report.constants["max_residual"] <= tol::PREIMAGE_TOL);
    }

    #[test]
    fn surjectivity_reports_ball_exterior_as_unreachable() {
        let a = make_operator(&OperatorSpec::normal_cone(
            ConvexFunctionSpec::IndicatorBall { radius: 1.0 },
            2,
        ))
        .unwrap();
        let target = Vector::new(vec![2.0, 0.0]).unwrap();
        let report = surjectivity_probe(a.resolvent(), &[target], 4, &cfg(26, 50, 2)).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        // The projection's range is the ball, so the gap is exactly 1.
        assert!((report.constants["residual_0"] - 1.0).abs() <= 1e-3, "{:?}", report.constants);
    }

    #[test]
    fn moreau_sum_holds_for_catalog_conjugates() {
        let c = cfg(27, 150, 2);
        for f in [
            ConvexFunctionSpec::Quadratic { lambda: 1.0 },
            ConvexFunctionSpec::Quadratic { lambda: 3.0 },
            ConvexFunctionSpec::L1 { lambda: 1.0 },
            ConvexFunctionSpec::L1 { lambda: 0.0 },
            ConvexFunctionSpec::IndicatorSingleton { point: Vector::zeros(2) },
        ] {
            let report = moreau_check(&f, 2, &c).unwrap();
            assert_eq!(report.verdict, Verdict::HoldsOnSamples, "{}: {:?}", f.label(), report);
            assert!(report.constants["max_sum_residual"] <= 1e-10);
            assert!(report.constants["max_conjugate_residual"] <= 1e-10);
        }
    }

    #[test]
    fn moreau_without_conjugate_is_inconclusive() {
        let report = moreau_check(
            &ConvexFunctionSpec::IndicatorBall { radius: 1.0 },
            2,
            &cfg(28, 100, 2),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.constants["max_sum_residual"] <= 1e-10);
    }

    #[test]
    fn suite_reruns_identically_from_the_same_seed() {
        let a = make_operator(&OperatorSpec::subdifferential(
            ConvexFunctionSpec::L1 { lambda: 1.0 },
            2,
        ))
        .unwrap();
        let c = cfg(29, 150, 2);
        let one = serde_json::to_string(&run_duality_suite(&a, &c).unwrap()).unwrap();
        let two = serde_json::to_string(&run_duality_suite(&a, &c).unwrap()).unwrap();
        assert_eq!(one, two);
    }
}
