//! Acceptance gate: one test per numbered criterion, each printing a single
//! pass line (run with `--nocapture` to see them) and enforcing its runtime
//! budget. Tolerances are pinned here as constants.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;
use std::time::Instant;

use minty_core::{
    analyze_reflected_contraction, banach_graph_sides, check_banach_graph_inequality,
    check_cyclic_firm, check_firm, check_paramonotone, cyclic_sum, douglas_rachford_operator,
    estimate_lipschitz, estimate_strong_monotonicity, firm_margins, fixed_point_evidence,
    make_operator, minty_sample, moreau_check, paramonotone_residuals, picard_iterate,
    run_duality_suite, sample_points, standard_catalog, ConvexFunctionSpec, FirmMap,
    FixedPointOutcome, Matrix, MonotoneOperator, OperatorSpec, OperatorVariant, PropertyId,
    SampleConfig, Vector, Verdict,
};

const EXACT_TOL: f64 = 1e-12;
const SAMPLED_LIPSCHITZ_TOL: f64 = 1e-3;
const RESOLVENT_IDENTITY_TOL: f64 = 1e-10;
const LIPSCHITZ_BOUND_SLACK: f64 = 1e-9;
const STRONG_MONO_ZERO_TOL: f64 = 1e-9;
const PARAMONO_RESIDUAL_TOL: f64 = 1e-6;
const MOREAU_TOL: f64 = 1e-10;
const FIXED_POINT_DIAMETER: f64 = 1e-6;

fn pass(criterion: u32, budget_secs: f64, started: Instant, what: &str) {
    let secs = started.elapsed().as_secs_f64();
    assert!(
        secs < budget_secs,
        "criterion {criterion:02}: FAIL - runtime {secs:.2}s exceeds budget {budget_secs}s"
    );
    println!("criterion {criterion:02}: PASS - {what} [{secs:.2}s]");
}

fn catalog() -> Vec<(&'static str, MonotoneOperator)> {
    standard_catalog()
        .into_iter()
        .map(|(name, spec)| (name, make_operator(&spec).expect("catalog operator builds")))
        .collect()
}

fn skew_operator() -> MonotoneOperator {
    let m = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
    make_operator(&OperatorSpec::linear(m)).unwrap()
}

fn cfg(seed: u64, count: usize, dim: usize) -> SampleConfig {
    SampleConfig::new(seed, count, dim, 2.0).unwrap()
}

#[test]
fn criterion_01_skew_resolvent_contraction() {
    let started = Instant::now();
    let a = skew_operator();
    let t = a.resolvent();

    let exact = estimate_lipschitz(t, &cfg(7, 64, 2)).unwrap();
    let spectral = exact.constants["spectral"];
    assert!(
        (spectral - FRAC_1_SQRT_2).abs() <= EXACT_TOL,
        "criterion 01: FAIL - spectral constant {spectral} differs from 1/sqrt(2)"
    );

    let sampled = estimate_lipschitz(t, &cfg(7, 10_000, 2)).unwrap();
    let ratio = sampled.constants["lipschitz"];
    assert!(
        (ratio - FRAC_1_SQRT_2).abs() <= SAMPLED_LIPSCHITZ_TOL,
        "criterion 01: FAIL - sampled estimate {ratio} off by more than {SAMPLED_LIPSCHITZ_TOL}"
    );

    let probes = sample_points(&cfg(7, 200, 2));
    let g = minty_sample(&a, &probes).unwrap();
    let at_exact = check_banach_graph_inequality(&g, FRAC_1_SQRT_2, 7).unwrap();
    assert_eq!(
        at_exact.verdict,
        Verdict::HoldsOnSamples,
        "criterion 01: FAIL - graph inequality rejected at the exact factor"
    );

    let at_half = check_banach_graph_inequality(&g, 0.5, 7).unwrap();
    assert_eq!(
        at_half.verdict,
        Verdict::Violated,
        "criterion 01: FAIL - graph inequality accepted at beta=0.5"
    );
    let w = at_half.witness.as_ref().expect("criterion 01: FAIL - no witness stored");
    let (lhs, rhs) = banach_graph_sides(
        &(w.points[0].clone(), w.points[1].clone()),
        &(w.points[2].clone(), w.points[3].clone()),
        0.5,
    );
    assert!(
        lhs > rhs && (lhs - w.lhs).abs() <= EXACT_TOL && (rhs - w.rhs).abs() <= EXACT_TOL,
        "criterion 01: FAIL - witness does not replay: lhs {lhs}, rhs {rhs}"
    );

    pass(1, 1.0, started, "skew resolvent factor 1/sqrt(2) exact and sampled, graph split at 0.5");
}

#[test]
fn criterion_02_diag_harmonic_factors() {
    let started = Instant::now();
    let mut factors = Vec::new();
    for d in [3usize, 10, 100] {
        let a = make_operator(&OperatorSpec::diag_harmonic(d)).unwrap();
        let report = estimate_lipschitz(a.resolvent(), &cfg(11, 32, d)).unwrap();
        let spectral = report.constants["spectral"];
        let expected = d as f64 / (d as f64 + 1.0);
        assert!(
            (spectral - expected).abs() <= EXACT_TOL,
            "criterion 02: FAIL - d={d} factor {spectral} differs from {expected}"
        );
        factors.push(spectral);
    }
    assert!(
        factors[0] < factors[1] && factors[1] < factors[2] && factors[2] < 1.0,
        "criterion 02: FAIL - factors {factors:?} not increasing toward 1"
    );
    pass(2, 1.0, started, "diagonal family factors d/(d+1) exact and increasing toward 1");
}

#[test]
fn criterion_03_resolvent_identity_across_catalog() {
    let started = Instant::now();
    let ops = catalog();
    assert!(ops.len() >= 8, "criterion 03: FAIL - catalog has fewer than 8 operators");
    for (name, a) in &ops {
        let inv = a.inverse();
        let t = a.resolvent();
        let tc = inv.resolvent();
        for x in sample_points(&cfg(13, 1000, a.dim())) {
            let sum = t.apply(&x).unwrap().add(&tc.apply(&x).unwrap());
            let residual = sum.sub(&x).norm();
            assert!(
                residual <= RESOLVENT_IDENTITY_TOL,
                "criterion 03: FAIL - {name}: residual {residual} at {x:?}"
            );
        }
    }
    pass(3, 5.0, started, "J_A + J_A_inverse = Id on 1000 points for every catalog operator");
}

#[test]
fn criterion_04_five_characterizations_agree() {
    let started = Instant::now();
    let ops = catalog();
    for (name, a) in &ops {
        let c = cfg(17, 1000, a.dim());
        let report = check_firm(a.resolvent(), &c).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::HoldsOnSamples,
            "criterion 04: FAIL - {name}: resolvent not accepted by all five characterizations"
        );
        let again = check_firm(a.resolvent(), &c).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap(),
            "criterion 04: FAIL - {name}: report not seed-deterministic"
        );
    }

    let neg = FirmMap::from_matrix(
        Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
    )
    .unwrap();
    let report = check_firm(&neg, &cfg(17, 1000, 2)).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::Violated,
        "criterion 04: FAIL - negated identity not rejected"
    );
    let w = report.witness.as_ref().expect("criterion 04: FAIL - no witness for -Id");
    let margins = firm_margins(&neg, &w.points[0], &w.points[1]).unwrap();
    assert!(
        margins.iter().all(|&m| m < 0.0),
        "criterion 04: FAIL - -Id witness margins not uniformly negative: {margins:?}"
    );
    pass(4, 10.0, started, "five characterizations agree on catalog resolvents and reject -Id");
}

#[test]
fn criterion_05_strong_monotonicity_sharpens_contraction() {
    let started = Instant::now();
    for eps in [0.5, 1.0, 2.0] {
        let m =
            Matrix::from_rows(&[vec![eps, -1.0], vec![1.0, eps]]).unwrap();
        let a = make_operator(&OperatorSpec::linear(m)).unwrap();
        let report = estimate_lipschitz(a.resolvent(), &cfg(19, 64, 2)).unwrap();
        let spectral = report.constants["spectral"];
        let bound = 1.0 / (1.0 + eps);
        assert!(
            spectral <= bound + LIPSCHITZ_BOUND_SLACK,
            "criterion 05: FAIL - eps={eps}: factor {spectral} above 1/(1+eps)={bound}"
        );
    }

    let a = skew_operator();
    let spectral =
        estimate_lipschitz(a.resolvent(), &cfg(19, 64, 2)).unwrap().constants["spectral"];
    let g = minty_sample(&a, &sample_points(&cfg(19, 300, 2))).unwrap();
    let mono = estimate_strong_monotonicity(&g, None, 19).unwrap().constants["strong_mono"];
    assert!(
        spectral < 1.0 - 1e-6 && mono.abs() <= STRONG_MONO_ZERO_TOL,
        "criterion 05: FAIL - converse: factor {spectral}, modulus {mono}"
    );
    pass(
        5,
        2.0,
        started,
        "resolvent factor at most 1/(1+eps) for eps in {0.5,1,2}; skew contracts with zero modulus",
    );
}

#[test]
fn criterion_06_paramonotone_split() {
    let started = Instant::now();
    let a = skew_operator();
    let g = minty_sample(&a, &sample_points(&cfg(23, 150, 2))).unwrap();
    let report = check_paramonotone(&a, &g, 23).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::Violated,
        "criterion 06: FAIL - skew accepted as paramonotone"
    );
    let w = report.witness.as_ref().expect("criterion 06: FAIL - no stored witness");
    let pair_a = (w.points[0].clone(), w.points[1].clone());
    let pair_b = (w.points[2].clone(), w.points[3].clone());
    let (r1, r2) = paramonotone_residuals(a.resolvent(), &pair_a, &pair_b).unwrap();
    assert!(
        r1.max(r2) > PARAMONO_RESIDUAL_TOL,
        "criterion 06: FAIL - witness residuals {r1}, {r2} replay below tolerance"
    );

    let subdifferentials: Vec<(&str, MonotoneOperator)> = standard_catalog()
        .into_iter()
        .filter(|(_, spec)| matches!(spec.variant, OperatorVariant::Subdifferential { .. }))
        .map(|(name, spec)| (name, make_operator(&spec).unwrap()))
        .collect();
    assert!(
        !subdifferentials.is_empty(),
        "criterion 06: FAIL - catalog has no subdifferential operators"
    );
    for (name, a) in &subdifferentials {
        let g = minty_sample(a, &sample_points(&cfg(23, 1000, a.dim()))).unwrap();
        let report = check_paramonotone(a, &g, 23).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::HoldsOnSamples,
            "criterion 06: FAIL - {name} not accepted as paramonotone"
        );
    }
    pass(6, 5.0, started, "skew rejected with replayable witness; subdifferentials accepted");
}

#[test]
fn criterion_07_cyclic_firmness_split() {
    let started = Instant::now();
    let prox_ops: Vec<(&str, MonotoneOperator)> = standard_catalog()
        .into_iter()
        .filter(|(_, spec)| {
            matches!(
                spec.variant,
                OperatorVariant::Subdifferential { .. } | OperatorVariant::NormalCone { .. }
            )
        })
        .map(|(name, spec)| (name, make_operator(&spec).unwrap()))
        .collect();
    assert!(prox_ops.len() >= 4, "criterion 07: FAIL - too few prox maps in catalog");
    for (name, a) in &prox_ops {
        let report =
            check_cyclic_firm(a.resolvent(), 5, 250, &cfg(29, 250, a.dim())).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::HoldsOnSamples,
            "criterion 07: FAIL - {name} rejected up to tuple length 5"
        );
    }

    let a = skew_operator();
    let report = check_cyclic_firm(a.resolvent(), 3, 1000, &cfg(10, 1000, 2)).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::Violated,
        "criterion 07: FAIL - no violating tuple found for the skew resolvent"
    );
    let w = report.witness.as_ref().expect("criterion 07: FAIL - no witness tuple");
    let replayed = cyclic_sum(a.resolvent(), &w.points).unwrap();
    assert!(
        replayed < 0.0 && (replayed - w.lhs).abs() <= EXACT_TOL,
        "criterion 07: FAIL - witness tuple does not replay: sum {replayed} vs stored {}",
        w.lhs
    );
    pass(7, 10.0, started, "prox maps cyclically firm to length 5; skew triple found and replayed");
}

#[test]
fn criterion_08_duality_suite_consistency() {
    let started = Instant::now();
    for (name, a) in &catalog() {
        let suite = run_duality_suite(a, &cfg(24, 200, a.dim())).unwrap();
        for row in &suite.rows {
            assert!(
                row.consistent,
                "criterion 08: FAIL - {name}: row {:?} inconsistent ({:?} vs {:?})",
                row.property_id, row.verdict_primal, row.verdict_dual
            );
        }
    }

    // Zero operator: resolvent is Id, complement is the zero map. The strict
    // rows must fail on both sides in the mirrored pattern.
    let zero = make_operator(&OperatorSpec::linear(Matrix::zeros(2, 2))).unwrap();
    let suite = run_duality_suite(&zero, &cfg(24, 200, 2)).unwrap();
    let strict_firm = suite.row(PropertyId::StrictFirm).unwrap();
    assert!(
        strict_firm.consistent
            && strict_firm.verdict_primal == Verdict::Violated
            && strict_firm.verdict_dual == Verdict::Violated,
        "criterion 08: FAIL - zero operator strict-firm row not mirrored-violated"
    );
    let pairing = suite.row(PropertyId::StrictNonexpansive).unwrap();
    assert!(
        pairing.consistent
            && pairing.verdict_primal == Verdict::Violated
            && pairing.verdict_dual == Verdict::Violated,
        "criterion 08: FAIL - identity/zero pairing row not mirrored-violated"
    );
    pass(8, 30.0, started, "every duality row consistent on the catalog and on the Id/zero pair");
}

#[test]
fn criterion_09_reflected_contraction_analysis() {
    let started = Instant::now();
    for (name, a) in &catalog() {
        let analysis = analyze_reflected_contraction(a, None, &cfg(31, 200, a.dim())).unwrap();
        assert!(
            analysis.agree,
            "criterion 09: FAIL - {name}: the three contraction conditions disagree"
        );
    }

    let twice = make_operator(&OperatorSpec::linear(
        Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap(),
    ))
    .unwrap();
    let analysis = analyze_reflected_contraction(&twice, None, &cfg(31, 200, 2)).unwrap();
    assert!(
        analysis.agree && (analysis.beta - 1.0 / 3.0).abs() <= EXACT_TOL,
        "criterion 09: FAIL - doubled identity: beta {} is not 1/3",
        analysis.beta
    );

    let id = make_operator(&OperatorSpec::linear(Matrix::identity(2))).unwrap();
    let analysis = analyze_reflected_contraction(&id, None, &cfg(31, 200, 2)).unwrap();
    assert!(
        analysis.agree && analysis.beta.abs() <= EXACT_TOL,
        "criterion 09: FAIL - identity operator: beta {} is not 0",
        analysis.beta
    );
    pass(9, 5.0, started, "three contraction conditions agree; beta exact at 1/3 and 0");
}

#[test]
fn criterion_10_douglas_rachford_and_rotation() {
    let started = Instant::now();
    let id = make_operator(&OperatorSpec::linear(Matrix::identity(2))).unwrap();
    let zero = make_operator(&OperatorSpec::linear(Matrix::zeros(2, 2))).unwrap();
    let t = douglas_rachford_operator(&id, &zero).unwrap();

    let form = t.affine_form().expect("criterion 10: FAIL - splitting map lost affine form");
    for i in 0..2 {
        for j in 0..2 {
            let expected = if i == j { 0.5 } else { 0.0 };
            assert!(
                (form.matrix.get(i, j) - expected).abs() <= EXACT_TOL
                    && form.offset.as_slice()[i].abs() <= EXACT_TOL,
                "criterion 10: FAIL - splitting of (Id, 0) is not half the identity"
            );
        }
    }

    let evidence = fixed_point_evidence(&t, 10, 60, 1e-9, &cfg(37, 10, 2)).unwrap();
    assert_eq!(
        evidence.outcome,
        FixedPointOutcome::SingletonEvidence,
        "criterion 10: FAIL - iteration evidence is not a singleton"
    );
    assert!(
        evidence.converged_runs == 10
            && evidence.diameter.unwrap() <= FIXED_POINT_DIAMETER,
        "criterion 10: FAIL - {} of 10 runs converged, diameter {:?}",
        evidence.converged_runs,
        evidence.diameter
    );

    let rotation = FirmMap::from_matrix(
        Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap(),
    )
    .unwrap();
    let trace =
        picard_iterate(&rotation, &Vector::new(vec![1.0, 0.0]).unwrap(), 60, 1e-9).unwrap();
    assert!(
        !trace.converged && trace.iterations_used == 60,
        "criterion 10: FAIL - rotation iteration should hit the cap without converging"
    );
    pass(10, 2.0, started, "splitting of (Id, 0) is Id/2 with singleton evidence; rotation stalls");
}

#[test]
fn criterion_11_moreau_decomposition() {
    let started = Instant::now();
    let f = ConvexFunctionSpec::L1 { lambda: 1.0 };
    let report = moreau_check(&f, 2, &cfg(41, 1000, 2)).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::HoldsOnSamples,
        "criterion 11: FAIL - decomposition rejected for the soft threshold"
    );
    let residual = report.constants["max_sum_residual"];
    assert!(
        residual <= MOREAU_TOL,
        "criterion 11: FAIL - worst sum residual {residual} above {MOREAU_TOL}"
    );
    pass(11, 1.0, started, "prox pair for the l1 norm sums to the identity on 1000 points");
}

#[test]
fn criterion_12_report_determinism() {
    let started = Instant::now();
    let spec = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs/regression.json");
    assert!(spec.exists(), "criterion 12: FAIL - bundled regression spec missing");
    let dir = tempfile::tempdir().unwrap();

    let mut reports = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("report{run}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_minty"))
            .arg("run")
            .arg(&spec)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(
            status.code(),
            Some(0),
            "criterion 12: FAIL - regression spec run {run} did not exit 0"
        );
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let stripped = value.as_object_mut().unwrap().remove("timing");
        assert!(stripped.is_some(), "criterion 12: FAIL - report has no timing object to strip");
        reports.push(serde_json::to_string(&value).unwrap());
    }
    assert_eq!(
        reports[0], reports[1],
        "criterion 12: FAIL - reports differ after stripping timing metadata"
    );
    pass(12, 60.0, started, "bundled regression spec reruns byte-identical apart from timing");
}
