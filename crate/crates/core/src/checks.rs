//! Randomized property checkers: one per entry in the property catalogue,
//! each returning a verdict, estimated constants, and a replayable witness
//! when something fails.
//!
//! Verdicts are sample-relative by design. `holds_on_samples` never claims a
//! universal certificate unless the map carries exact affine structure;
//! `violated` always carries a witness whose re-evaluation reproduces the
//! failing inequality.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::linalg::{spectral_norm, symmetric_eigen, Vector};
use crate::operator::{complement, reflect, FirmMap, GraphSample, MonotoneOperator};
use crate::par::{par_map, par_map_range};
use crate::sample::{
    sample_companion_points, sample_normal_scalars, sample_points, sample_tuples,
    sample_uniform_scalars, SampleConfig,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    FirmlyNonexpansive,
    Lipschitz,
    BanachGraphInequality,
    StrongMonotonicity,
    Cocoercivity,
    StrictNonexpansive,
    Injective,
    StrictFirm,
    Paramonotone,
    CyclicFirm,
    Rectangular,
    UniformModulus,
    Linear,
    Affine,
    Isometry,
    Projection,
    Surjectivity,
    MoreauDecomposition,
}

impl PropertyId {
    pub fn as_str(self) -> &'static str {
        match self {
            PropertyId::FirmlyNonexpansive => "firmly_nonexpansive",
            PropertyId::Lipschitz => "lipschitz",
            PropertyId::BanachGraphInequality => "banach_graph_inequality",
            PropertyId::StrongMonotonicity => "strong_monotonicity",
            PropertyId::Cocoercivity => "cocoercivity",
            PropertyId::StrictNonexpansive => "strict_nonexpansive",
            PropertyId::Injective => "injective",
            PropertyId::StrictFirm => "strict_firm",
            PropertyId::Paramonotone => "paramonotone",
            PropertyId::CyclicFirm => "cyclic_firm",
            PropertyId::Rectangular => "rectangular",
            PropertyId::UniformModulus => "uniform_modulus",
            PropertyId::Linear => "linear",
            PropertyId::Affine => "affine",
            PropertyId::Isometry => "isometry",
            PropertyId::Projection => "projection",
            PropertyId::Surjectivity => "surjectivity",
            PropertyId::MoreauDecomposition => "moreau_decomposition",
        }
    }
}

impl std::fmt::Display for PropertyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSamples,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::HoldsOnSamples => "holds_on_samples",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The points that witnessed a failed inequality, plus its two sides.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub points: Vec<Vector>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property_id: PropertyId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub constants: BTreeMap<String, f64>,
    pub sample_count: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn new(property_id: PropertyId, verdict: Verdict, sample_count: usize, seed: u64) -> Self {
        PropertyReport {
            property_id,
            verdict,
            witness: None,
            constants: BTreeMap::new(),
            sample_count,
            seed,
            notes: Vec::new(),
        }
    }

    fn constant(mut self, name: &str, value: f64) -> Self {
        assert!(value.is_finite(), "report constant {name} must be finite, got {value}");
        self.constants.insert(name.to_string(), value);
        self
    }

    fn witness(mut self, points: Vec<Vector>, lhs: f64, rhs: f64) -> Self {
        self.witness = Some(Witness { points, lhs, rhs });
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

fn sampled_pairs(cfg: &SampleConfig) -> Vec<(Vector, Vector)> {
    sample_points(cfg).into_iter().zip(sample_companion_points(cfg)).collect()
}

/// The five firm-nonexpansiveness margins for one pair, each nonnegative
/// exactly when its characterization holds there:
/// (i) the defining sum-of-squares inequality,
/// (ii) the same inequality for Id−T,
/// (iii) nonexpansiveness of 2T−Id,
/// (iv) ‖Tx−Ty‖² ≤ ⟨x−y, Tx−Ty⟩,
/// (v) ⟨Tx−Ty, (Id−T)x−(Id−T)y⟩ ≥ 0.
pub fn firm_margins(t: &FirmMap, x: &Vector, y: &Vector) -> Result<[f64; 5]> {
    let comp = complement(t);
    let refl = reflect(t);
    let tx = t.apply(x)?;
    let ty = t.apply(y)?;
    let cx = comp.apply(x)?;
    let cy = comp.apply(y)?;
    let nx = refl.apply(x)?;
    let ny = refl.apply(y)?;

    let d = x.sub(y);
    let td = tx.sub(&ty);
    let cd = cx.sub(&cy);
    let nd = nx.sub(&ny);
    let dd = d.dot(&d);

    let m1 = dd - td.dot(&td) - cd.dot(&cd);
    // (ii) is the firmness of the complement map, evaluated through it.
    let icx = x.sub(&cx);
    let icy = y.sub(&cy);
    let icd = icx.sub(&icy);
    let m2 = dd - cd.dot(&cd) - icd.dot(&icd);
    let m3 = dd - nd.dot(&nd);
    let m4 = d.dot(&td) - td.dot(&td);
    let m5 = td.dot(&cd);
    Ok([m1, m2, m3, m4, m5])
}

enum PairClass {
    Degenerate,
    AllPass,
    AllFail([f64; 5]),
    Mixed([f64; 5], [bool; 5]),
}

/// Tests all five equivalent firm-nonexpansiveness characterizations on
/// sampled pairs. Holds only when every pair passes all five; a pair failing
/// all five is a genuine counterexample; split pairs make the run
/// inconclusive with per-characterization diagnostics.
pub fn check_firm(t: &FirmMap, cfg: &SampleConfig) -> Result<PropertyReport> {
    let pairs = sampled_pairs(cfg);
    let classes: Vec<Result<PairClass>> = par_map(&pairs, |(x, y)| {
        let dist = x.dist(y);
        if dist <= tol::DEGENERATE_PAIR {
            return Ok(PairClass::Degenerate);
        }
        let margins = firm_margins(t, x, y)?;
        let slack = tol::slack(dist);
        let pass: Vec<bool> = margins.iter().map(|&m| m >= -slack).collect();
        let pass: [bool; 5] = [pass[0], pass[1], pass[2], pass[3], pass[4]];
        Ok(if pass.iter().all(|&p| p) {
            PairClass::AllPass
        } else if pass.iter().all(|&p| !p) {
            PairClass::AllFail(margins)
        } else {
            PairClass::Mixed(margins, pass)
        })
    });

    let mut worst = [f64::INFINITY; 5];
    let mut used = 0usize;
    let mut violation: Option<(usize, [f64; 5])> = None;
    let mut mixed: Option<(usize, [bool; 5])> = None;
    let mut mixed_count = 0usize;
    for (idx, class) in classes.into_iter().enumerate() {
        match class? {
            PairClass::Degenerate => continue,
            PairClass::AllPass => {
                used += 1;
                let (x, y) = &pairs[idx];
                let margins = firm_margins(t, x, y)?;
                for k in 0..5 {
                    worst[k] = worst[k].min(margins[k]);
                }
            }
            PairClass::AllFail(margins) => {
                used += 1;
                for k in 0..5 {
                    worst[k] = worst[k].min(margins[k]);
                }
                if violation.is_none() {
                    violation = Some((idx, margins));
                }
            }
            PairClass::Mixed(margins, pass) => {
                used += 1;
                mixed_count += 1;
                for k in 0..5 {
                    worst[k] = worst[k].min(margins[k]);
                }
                if mixed.is_none() {
                    mixed = Some((idx, pass));
                }
            }
        }
    }

    if used == 0 {
        return Ok(PropertyReport::new(
            PropertyId::FirmlyNonexpansive,
            Verdict::Inconclusive,
            0,
            cfg.seed,
        )
        .note("all sampled pairs were degenerate"));
    }

    let names = ["margin_i", "margin_ii", "margin_iii", "margin_iv", "margin_v"];
    let attach = |mut report: PropertyReport| {
        for (name, value) in names.iter().zip(worst) {
            report = report.constant(name, value);
        }
        report
    };

    let report = if let Some((idx, margins)) = violation {
        let (x, y) = &pairs[idx];
        // Witness records the defining characterization's two sides.
        let tx = t.apply(x)?;
        let ty = t.apply(y)?;
        let d = x.sub(y);
        let td = tx.sub(&ty);
        let cd = d.sub(&td);
        let lhs = td.dot(&td) + cd.dot(&cd);
        let rhs = d.dot(&d);
        let mut r = PropertyReport::new(
            PropertyId::FirmlyNonexpansive,
            Verdict::Violated,
            used,
            cfg.seed,
        )
        .witness(vec![x.clone(), y.clone()], lhs, rhs)
        .note(format!(
            "all five characterizations fail on the witness pair; margins {:?}",
            margins
        ));
        if mixed_count > 0 {
            r = r.note(format!("{mixed_count} pairs had split verdicts"));
        }
        r
    } else if let Some((idx, pass)) = mixed {
        let (x, y) = &pairs[idx];
        let split: Vec<String> = names
            .iter()
            .zip(pass)
            .map(|(n, p)| format!("{n}:{}", if p { "pass" } else { "fail" }))
            .collect();
        PropertyReport::new(PropertyId::FirmlyNonexpansive, Verdict::Inconclusive, used, cfg.seed)
            .witness(vec![x.clone(), y.clone()], 0.0, 0.0)
            .note(format!(
                "characterizations disagree on {mixed_count} pairs; first split: {}",
                split.join(", ")
            ))
    } else {
        PropertyReport::new(PropertyId::FirmlyNonexpansive, Verdict::HoldsOnSamples, used, cfg.seed)
    };
    Ok(attach(report))
}

/// Largest sampled ratio ‖Tx−Ty‖/‖x−y‖, with the exact spectral norm when
/// the map is affine. The verdict is nonexpansiveness (threshold 1), decided
/// by the exact route when available.
pub fn estimate_lipschitz(t: &FirmMap, cfg: &SampleConfig) -> Result<PropertyReport> {
    let pairs = sampled_pairs(cfg);
    let ratios: Vec<Result<Option<(f64, usize)>>> = par_map_range(pairs.len(), |i| {
        let (x, y) = &pairs[i];
        let dist = x.dist(y);
        if dist <= tol::DEGENERATE_PAIR {
            return Ok(None);
        }
        let td = t.apply(x)?.sub(&t.apply(y)?);
        Ok(Some((td.norm() / dist, i)))
    });
    let mut best: Option<(f64, usize)> = None;
    let mut used = 0usize;
    for r in ratios {
        if let Some((ratio, idx)) = r? {
            used += 1;
            if best.map(|(b, _)| ratio > b).unwrap_or(true) {
                best = Some((ratio, idx));
            }
        }
    }

    let exact = match t.affine_form() {
        Some(form) => Some(spectral_norm(&form.matrix)?),
        None => None,
    };

    let mut report = PropertyReport::new(PropertyId::Lipschitz, Verdict::Inconclusive, used, cfg.seed);
    let sampled = best.map(|(r, _)| r);
    if let Some(r) = sampled {
        report = report.constant("lipschitz", r);
    } else {
        report = report.note("no non-degenerate pairs sampled");
    }
    match (exact, best) {
        (Some(spectral), _) => {
            report = report.constant("spectral", spectral);
            if spectral <= 1.0 + tol::EQ_TOL {
                report.verdict = Verdict::HoldsOnSamples;
                report = report.note("verdict from exact spectral norm");
            } else {
                report.verdict = Verdict::Violated;
                // Build a replayable witness along the top singular direction.
                let form = t.affine_form().expect("exact route requires affine form");
                let gram = form.matrix.transpose().matmul(&form.matrix)?;
                let (_, vectors) = symmetric_eigen(&gram)?;
                let n = form.matrix.rows();
                let top: Vec<f64> = (0..n).map(|i| vectors.get(i, n - 1)).collect();
                let x = Vector::new(top)?;
                let y = Vector::zeros(n);
                let lhs = t.apply(&x)?.sub(&t.apply(&y)?).norm();
                let rhs = x.dist(&y);
                report = report
                    .witness(vec![x, y], lhs, rhs)
                    .note("witness follows the top singular direction");
            }
        }
        (None, Some((ratio, idx))) => {
            if ratio <= 1.0 + tol::CHECK_TOL {
                report.verdict = Verdict::HoldsOnSamples;
            } else {
                report.verdict = Verdict::Violated;
                let (x, y) = &pairs[idx];
                let lhs = t.apply(x)?.sub(&t.apply(y)?).norm();
                report = report.witness(vec![x.clone(), y.clone()], lhs, x.dist(y));
            }
        }
        (None, None) => {}
    }
    Ok(report)
}

/// Two sides of the graph inequality that characterizes resolvents of Banach
/// contractions: lhs = (1−β²)/β²·‖x−y‖², rhs = 2⟨x−y,u−v⟩ + ‖u−v‖².
pub fn banach_graph_sides(
    pair_a: &(Vector, Vector),
    pair_b: &(Vector, Vector),
    beta: f64,
) -> (f64, f64) {
    let (x, u) = pair_a;
    let (y, v) = pair_b;
    let dx = x.sub(y);
    let du = u.sub(v);
    let factor = (1.0 - beta * beta) / (beta * beta);
    (factor * dx.dot(&dx), 2.0 * dx.dot(&du) + du.dot(&du))
}

/// Verifies the Banach graph inequality at contraction constant β on every
/// pair of graph points.
pub fn check_banach_graph_inequality(
    g: &GraphSample,
    beta: f64,
    seed: u64,
) -> Result<PropertyReport> {
    if g.is_empty() {
        return Err(CoreError::Empty { what: "graph sample" });
    }
    if !(beta.is_finite() && 0.0 < beta && beta < 1.0) {
        return Err(CoreError::InvalidParameter {
            what: "contraction constant",
            why: format!("must lie in (0,1), got {beta}"),
        });
    }
    let n = g.pairs.len();
    let per_row: Vec<Option<(f64, usize, usize)>> = par_map_range(n, |i| {
        let mut worst: Option<(f64, usize, usize)> = None;
        for j in (i + 1)..n {
            let (lhs, rhs) = banach_graph_sides(&g.pairs[i], &g.pairs[j], beta);
            let dist = g.pairs[i].0.dist(&g.pairs[j].0);
            let margin = rhs - lhs + tol::slack(dist);
            if worst.map(|(w, _, _)| margin < w).unwrap_or(true) {
                worst = Some((margin, i, j));
            }
        }
        worst
    });
    let mut worst: Option<(f64, usize, usize)> = None;
    for row in per_row.into_iter().flatten() {
        if worst.map(|(w, _, _)| row.0 < w).unwrap_or(true) {
            worst = Some(row);
        }
    }
    let factor = (1.0 - beta * beta) / (beta * beta);
    let mut report = PropertyReport::new(
        PropertyId::BanachGraphInequality,
        Verdict::HoldsOnSamples,
        n,
        seed,
    )
    .constant("beta", beta)
    .constant("factor", factor);
    match worst {
        Some((margin, i, j)) => {
            report = report.constant("worst_margin", margin);
            if margin < 0.0 {
                let (lhs, rhs) = banach_graph_sides(&g.pairs[i], &g.pairs[j], beta);
                report.verdict = Verdict::Violated;
                report = report.witness(
                    vec![
                        g.pairs[i].0.clone(),
                        g.pairs[i].1.clone(),
                        g.pairs[j].0.clone(),
                        g.pairs[j].1.clone(),
                    ],
                    lhs,
                    rhs,
                );
            }
        }
        None => {
            report.verdict = Verdict::Inconclusive;
            report = report.note("graph sample has fewer than two points");
        }
    }
    Ok(report)
}

/// inf over distinct graph pairs of ⟨x−y,u−v⟩/‖x−y‖². With a requested ε the
/// verdict compares the infimum against it; without one it tests plain
/// monotonicity (ε = 0).
pub fn estimate_strong_monotonicity(
    g: &GraphSample,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<PropertyReport> {
    if g.is_empty() {
        return Err(CoreError::Empty { what: "graph sample" });
    }
    let n = g.pairs.len();
    let per_row: Vec<Option<(f64, usize, usize)>> = par_map_range(n, |i| {
        let mut worst: Option<(f64, usize, usize)> = None;
        for j in (i + 1)..n {
            let (x, u) = &g.pairs[i];
            let (y, v) = &g.pairs[j];
            let dx = x.sub(y);
            let dd = dx.dot(&dx);
            if dd.sqrt() <= tol::DEGENERATE_PAIR {
                continue;
            }
            let quotient = dx.dot(&u.sub(v)) / dd;
            if worst.map(|(w, _, _)| quotient < w).unwrap_or(true) {
                worst = Some((quotient, i, j));
            }
        }
        worst
    });
    let mut inf: Option<(f64, usize, usize)> = None;
    for row in per_row.into_iter().flatten() {
        if inf.map(|(w, _, _)| row.0 < w).unwrap_or(true) {
            inf = Some(row);
        }
    }
    let mut report =
        PropertyReport::new(PropertyId::StrongMonotonicity, Verdict::Inconclusive, n, seed);
    if let Some(e) = epsilon {
        if !(e.is_finite() && e >= 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "strong monotonicity constant",
                why: format!("must be finite and nonnegative, got {e}"),
            });
        }
        report = report.constant("requested_epsilon", e);
    }
    match inf {
        Some((value, i, j)) => {
            report = report.constant("strong_mono", value);
            let threshold = epsilon.unwrap_or(0.0);
            if value >= threshold - tol::CHECK_TOL {
                report.verdict = Verdict::HoldsOnSamples;
            } else {
                report.verdict = Verdict::Violated;
                let (x, u) = &g.pairs[i];
                let (y, v) = &g.pairs[j];
                let dx = x.sub(y);
                report = report.witness(
                    vec![x.clone(), u.clone(), y.clone(), v.clone()],
                    dx.dot(&u.sub(v)),
                    threshold * dx.dot(&dx),
                );
            }
        }
        None => {
            report = report.note("no distinct pairs in the graph sample");
        }
    }
    Ok(report)
}

/// inf over graph pairs with u≠v of ⟨x−y,u−v⟩/‖u−v‖², computed as strong
/// monotonicity of the swapped sample. Same arithmetic on swapped pairs, so
/// the duality identity is exact by construction.
pub fn estimate_cocoercivity(
    g: &GraphSample,
    gamma: Option<f64>,
    seed: u64,
) -> Result<PropertyReport> {
    let mut inner = estimate_strong_monotonicity(&g.swap(), gamma, seed)?;
    inner.property_id = PropertyId::Cocoercivity;
    if let Some(value) = inner.constants.remove("strong_mono") {
        inner.constants.insert("cocoercivity".into(), value);
    }
    if let Some(value) = inner.constants.remove("requested_epsilon") {
        inner.constants.insert("requested_gamma".into(), value);
    }
    inner.notes.push("computed as strong monotonicity of the swapped graph".into());
    Ok(inner)
}

/// The three strictness classifications from one pass over sampled pairs.
#[derive(Debug, Clone, Serialize)]
pub struct StrictClassification {
    pub strict_nonexpansive: PropertyReport,
    pub injective: PropertyReport,
    pub strict_firm: PropertyReport,
}

/// Classifies strict nonexpansiveness, sampled injectivity, and strict firm
/// nonexpansiveness with scale-aware strictness margins.
pub fn check_strict(t: &FirmMap, cfg: &SampleConfig) -> Result<StrictClassification> {
    let pairs = sampled_pairs(cfg);
    struct PairData {
        sn_margin: f64,
        inj_margin: f64,
        sf_margin: f64,
        idx: usize,
    }
    let rows: Vec<Result<Option<PairData>>> = par_map_range(pairs.len(), |i| {
        let (x, y) = &pairs[i];
        let dist = x.dist(y);
        if dist <= tol::DEGENERATE_PAIR {
            return Ok(None);
        }
        let td = t.apply(x)?.sub(&t.apply(y)?);
        let m = tol::strict_margin(dist);
        let tn = td.norm();
        Ok(Some(PairData {
            sn_margin: (dist - m) - tn,
            inj_margin: tn - m,
            sf_margin: (x.sub(y).dot(&td) - m) - td.dot(&td),
            idx: i,
        }))
    });

    let mut used = 0usize;
    let mut sn_worst: Option<(f64, usize)> = None;
    let mut inj_worst: Option<(f64, usize)> = None;
    let mut sf_worst: Option<(f64, usize)> = None;
    for row in rows {
        if let Some(data) = row? {
            used += 1;
            if sn_worst.map(|(w, _)| data.sn_margin < w).unwrap_or(true) {
                sn_worst = Some((data.sn_margin, data.idx));
            }
            if inj_worst.map(|(w, _)| data.inj_margin < w).unwrap_or(true) {
                inj_worst = Some((data.inj_margin, data.idx));
            }
            if sf_worst.map(|(w, _)| data.sf_margin < w).unwrap_or(true) {
                sf_worst = Some((data.sf_margin, data.idx));
            }
        }
    }

    type SideFn<'a> = &'a dyn Fn(&Vector, &Vector) -> Result<(f64, f64)>;
    let build = |id: PropertyId,
                 worst: Option<(f64, usize)>,
                 sides: SideFn|
     -> Result<PropertyReport> {
        let mut report = PropertyReport::new(id, Verdict::Inconclusive, used, cfg.seed);
        match worst {
            Some((margin, idx)) => {
                report = report.constant("min_margin", margin);
                if margin > 0.0 {
                    report.verdict = Verdict::HoldsOnSamples;
                } else {
                    report.verdict = Verdict::Violated;
                    let (x, y) = &pairs[idx];
                    let (lhs, rhs) = sides(x, y)?;
                    report = report.witness(vec![x.clone(), y.clone()], lhs, rhs);
                }
            }
            None => {
                report = report.note("all sampled pairs were degenerate");
            }
        }
        Ok(report)
    };

    let strict_nonexpansive = build(PropertyId::StrictNonexpansive, sn_worst, &|x, y| {
        let tn = t.apply(x)?.sub(&t.apply(y)?).norm();
        let dist = x.dist(y);
        Ok((tn, dist - tol::strict_margin(dist)))
    })?;
    let injective = build(PropertyId::Injective, inj_worst, &|x, y| {
        let tn = t.apply(x)?.sub(&t.apply(y)?).norm();
        Ok((tn, tol::strict_margin(x.dist(y))))
    })?;
    let strict_firm = build(PropertyId::StrictFirm, sf_worst, &|x, y| {
        let td = t.apply(x)?.sub(&t.apply(y)?);
        let dist = x.dist(y);
        Ok((td.dot(&td), x.sub(y).dot(&td) - tol::strict_margin(dist)))
    })?;
    Ok(StrictClassification { strict_nonexpansive, injective, strict_firm })
}

/// Membership residuals behind the paramonotonicity implication: when the
/// pairing ⟨x−y,u−v⟩ vanishes, both crossed pairs must lie on the graph,
/// which the resolvent certifies via J(x+v) = x and J(y+u) = y.
pub fn paramonotone_residuals(
    t: &FirmMap,
    pair_a: &(Vector, Vector),
    pair_b: &(Vector, Vector),
) -> Result<(f64, f64)> {
    let (x, u) = pair_a;
    let (y, v) = pair_b;
    let r1 = t.apply(&x.add(v))?.sub(x).norm();
    let r2 = t.apply(&y.add(u))?.sub(y).norm();
    Ok((r1, r2))
}

/// Tests the paramonotone implication on every graph pair whose monotonicity
/// pairing vanishes within tolerance.
pub fn check_paramonotone(
    a: &MonotoneOperator,
    g: &GraphSample,
    seed: u64,
) -> Result<PropertyReport> {
    if g.is_empty() {
        return Err(CoreError::Empty { what: "graph sample" });
    }
    let t = a.resolvent();
    let n = g.pairs.len();
    struct RowOutcome {
        fired: usize,
        worst: Option<(f64, usize, usize)>,
    }
    let rows: Vec<Result<RowOutcome>> = par_map_range(n, |i| {
        let mut fired = 0usize;
        let mut worst: Option<(f64, usize, usize)> = None;
        for j in (i + 1)..n {
            let (x, u) = &g.pairs[i];
            let (y, v) = &g.pairs[j];
            let ip = x.sub(y).dot(&u.sub(v));
            let fire_tol = tol::CHECK_TOL * (1.0 + x.dist(y) * u.dist(v));
            if ip.abs() > fire_tol {
                continue;
            }
            fired += 1;
            let (r1, r2) = paramonotone_residuals(t, &g.pairs[i], &g.pairs[j])?;
            let r = r1.max(r2);
            if r > tol::PARAMONO_TOL && worst.map(|(w, _, _)| r > w).unwrap_or(true) {
                worst = Some((r, i, j));
            }
        }
        Ok(RowOutcome { fired, worst })
    });

    let mut fired_total = 0usize;
    let mut violation: Option<(f64, usize, usize)> = None;
    for row in rows {
        let row = row?;
        fired_total += row.fired;
        if let Some(w) = row.worst {
            if violation.map(|(v, _, _)| w.0 > v).unwrap_or(true) {
                violation = Some(w);
            }
        }
    }

    let mut report = PropertyReport::new(PropertyId::Paramonotone, Verdict::HoldsOnSamples, n, seed)
        .constant("fired_count", fired_total as f64);
    match violation {
        Some((residual, i, j)) => {
            report.verdict = Verdict::Violated;
            report = report
                .constant("worst_residual", residual)
                .witness(
                    vec![
                        g.pairs[i].0.clone(),
                        g.pairs[i].1.clone(),
                        g.pairs[j].0.clone(),
                        g.pairs[j].1.clone(),
                    ],
                    residual,
                    tol::PARAMONO_TOL,
                );
        }
        None => {
            if fired_total == 0 {
                report = report.note("no sampled pair activated the equality condition");
            }
        }
    }
    Ok(report)
}

/// Cyclic sum Σ ⟨xᵢ−Txᵢ, Txᵢ−Tx_{i+1}⟩ with indices wrapping at the end.
pub fn cyclic_sum(t: &FirmMap, tuple: &[Vector]) -> Result<f64> {
    let images: Vec<Vector> = tuple.iter().map(|x| t.apply(x)).collect::<Result<_>>()?;
    Ok(cyclic_sum_cached(tuple, &images))
}

fn cyclic_sum_cached(tuple: &[Vector], images: &[Vector]) -> f64 {
    let n = tuple.len();
    let mut sum = 0.0;
    for i in 0..n {
        let next = (i + 1) % n;
        sum += tuple[i].sub(&images[i]).dot(&images[i].sub(&images[next]));
    }
    sum
}

/// Randomized search for negative cyclic sums over tuple lengths 2..n_max.
/// Each sampled tuple is evaluated in both cyclic orientations, which makes
/// the check's verdict mirror exactly under the complement transform.
pub fn check_cyclic_firm(
    t: &FirmMap,
    n_max: usize,
    tuples_per_n: usize,
    cfg: &SampleConfig,
) -> Result<PropertyReport> {
    if n_max < 2 {
        return Err(CoreError::InvalidParameter {
            what: "cyclic tuple length",
            why: format!("must be at least 2, got {n_max}"),
        });
    }
    if tuples_per_n == 0 {
        return Err(CoreError::InvalidParameter {
            what: "tuples per length",
            why: "must be positive".into(),
        });
    }
    let mut report = PropertyReport::new(
        PropertyId::CyclicFirm,
        Verdict::HoldsOnSamples,
        (n_max - 1) * tuples_per_n,
        cfg.seed,
    );
    let mut global_min = f64::INFINITY;
    let mut witness: Option<(Vec<Vector>, f64, f64)> = None;
    for n in 2..=n_max {
        let tuple_cfg = SampleConfig::new(cfg.seed, tuples_per_n, cfg.dim, cfg.scale)?;
        let tuples = sample_tuples(&tuple_cfg, n);
        let evaluated: Vec<Result<(f64, f64, f64)>> = par_map(&tuples, |tuple| {
            let images: Vec<Vector> = tuple.iter().map(|x| t.apply(x)).collect::<Result<_>>()?;
            let forward = cyclic_sum_cached(tuple, &images);
            let reversed_tuple: Vec<Vector> = tuple.iter().rev().cloned().collect();
            let reversed_images: Vec<Vector> = images.iter().rev().cloned().collect();
            let backward = cyclic_sum_cached(&reversed_tuple, &reversed_images);
            let scale: f64 = tuple.iter().map(|x| x.dot(x)).sum();
            Ok((forward, backward, scale))
        });
        let mut n_min = f64::INFINITY;
        for (idx, row) in evaluated.into_iter().enumerate() {
            let (forward, backward, scale) = row?;
            let slack = tol::CHECK_TOL * (1.0 + scale);
            for (sum, reversed) in [(forward, false), (backward, true)] {
                n_min = n_min.min(sum);
                if sum < -slack && witness.is_none() {
                    let points: Vec<Vector> = if reversed {
                        tuples[idx].iter().rev().cloned().collect()
                    } else {
                        tuples[idx].clone()
                    };
                    witness = Some((points, sum, -slack));
                }
            }
        }
        global_min = global_min.min(n_min);
        if n_min.is_finite() {
            report = report.constant(&format!("min_sum_n{n}"), n_min);
        }
    }
    report = report.constant("min_sum", global_min);
    if let Some((points, lhs, rhs)) = witness {
        report.verdict = Verdict::Violated;
        report = report
            .witness(points, lhs, rhs)
            .note("witness tuple is stored in evaluation order; replay with the cyclic sum");
    }
    report = report.note("each tuple evaluated in both cyclic orientations");
    Ok(report)
}

/// Empirical infima of ⟨x−z, v−w⟩ over the graph sample, one probe pair at a
/// time. Inconclusive by design: a finite sample cannot certify the global
/// infimum that rectangularity quantifies over.
pub fn check_rectangular(
    g: &GraphSample,
    probes_x: &[Vector],
    probes_v: &[Vector],
    seed: u64,
) -> Result<PropertyReport> {
    if g.is_empty() {
        return Err(CoreError::Empty { what: "graph sample" });
    }
    if probes_x.is_empty() || probes_v.is_empty() {
        return Err(CoreError::Empty { what: "probe list" });
    }
    let mut report =
        PropertyReport::new(PropertyId::Rectangular, Verdict::Inconclusive, g.pairs.len(), seed);
    let mut overall = f64::INFINITY;
    for (i, px) in probes_x.iter().enumerate() {
        for (j, pv) in probes_v.iter().enumerate() {
            let mut inf = f64::INFINITY;
            for (z, w) in &g.pairs {
                inf = inf.min(px.sub(z).dot(&pv.sub(w)));
            }
            report = report.constant(&format!("inf_{i}_{j}"), inf);
            overall = overall.min(inf);
        }
    }
    report = report
        .constant("min_inf", overall)
        .note("finite samples cannot certify the global infimum; see the scale trend");
    Ok(report)
}

/// Repeats the rectangularity probe at growing sample scales and records how
/// the empirical infimum moves. A genuine failure of rectangularity shows up
/// as an infimum that keeps decreasing as the scale grows.
pub fn rectangular_trend(
    a: &MonotoneOperator,
    cfg: &SampleConfig,
    scales: &[f64],
) -> Result<PropertyReport> {
    if scales.is_empty() {
        return Err(CoreError::Empty { what: "scale list" });
    }
    for &s in scales {
        if !(s.is_finite() && s > 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "probe scale",
                why: format!("must be finite and positive, got {s}"),
            });
        }
    }
    let mut report = PropertyReport::new(
        PropertyId::Rectangular,
        Verdict::Inconclusive,
        cfg.count * scales.len(),
        cfg.seed,
    );
    // Probes stay at the base scale; only the graph sweep widens. A bounded
    // pairing then stabilizes across scales instead of tracking the sweep.
    let companions = sample_companion_points(cfg);
    let half = (companions.len() / 2).clamp(1, 4);
    let probes_x: Vec<Vector> = companions.iter().take(half).cloned().collect();
    let probes_v: Vec<Vector> = companions.iter().skip(half).take(half).cloned().collect();
    if probes_x.is_empty() || probes_v.is_empty() {
        return Err(CoreError::Empty { what: "probe list" });
    }
    let mut infima = Vec::with_capacity(scales.len());
    for (k, &scale) in scales.iter().enumerate() {
        let scaled = SampleConfig::new(cfg.seed, cfg.count, cfg.dim, scale)?;
        let g = crate::operator::minty_sample(a, &sample_points(&scaled))?;
        let mut inf = f64::INFINITY;
        for px in &probes_x {
            for pv in &probes_v {
                for (z, w) in &g.pairs {
                    inf = inf.min(px.sub(z).dot(&pv.sub(w)));
                }
            }
        }
        report = report
            .constant(&format!("scale_{k}"), scale)
            .constant(&format!("inf_scale_{k}"), inf);
        infima.push(inf);
    }
    let decreasing = infima.windows(2).all(|w| w[1] < w[0]);
    report = report.note(if decreasing {
        "probe infima decrease as the sampling scale grows"
    } else {
        "probe infima do not decrease monotonically across scales"
    });
    Ok(report)
}

/// Uniform-monotonicity modulus data: per-distance-bin infima of the
/// monotonicity pairing.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusEstimate {
    pub bin_edges: Vec<f64>,
    pub bin_inf: Vec<Option<f64>>,
}

/// Bins graph pairs by ‖x−y‖ and records the per-bin infimum of ⟨x−y,u−v⟩.
/// Monotonicity of the binned curve is reported as a note, never enforced.
pub fn estimate_uniform_modulus(
    g: &GraphSample,
    bins: usize,
    seed: u64,
) -> Result<(ModulusEstimate, PropertyReport)> {
    if bins == 0 {
        return Err(CoreError::InvalidParameter {
            what: "bin count",
            why: "must be positive".into(),
        });
    }
    if g.pairs.len() < 2 {
        return Err(CoreError::Empty { what: "graph sample" });
    }
    let n = g.pairs.len();
    let mut dmax: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            dmax = dmax.max(g.pairs[i].0.dist(&g.pairs[j].0));
        }
    }
    if dmax <= tol::DEGENERATE_PAIR {
        return Err(CoreError::Empty { what: "distinct graph points" });
    }
    let edges: Vec<f64> = (0..=bins).map(|k| dmax * k as f64 / bins as f64).collect();
    let mut bin_inf: Vec<Option<f64>> = vec![None; bins];
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, u) = &g.pairs[i];
            let (y, v) = &g.pairs[j];
            let dist = x.dist(y);
            if dist <= tol::DEGENERATE_PAIR {
                continue;
            }
            let k = ((dist / dmax) * bins as f64).floor().min(bins as f64 - 1.0) as usize;
            let ip = x.sub(y).dot(&u.sub(v));
            bin_inf[k] = Some(bin_inf[k].map(|b: f64| b.min(ip)).unwrap_or(ip));
        }
    }

    let mut report =
        PropertyReport::new(PropertyId::UniformModulus, Verdict::Inconclusive, n, seed);
    let mut empty = Vec::new();
    for (k, value) in bin_inf.iter().enumerate() {
        match value {
            Some(v) => report = report.constant(&format!("bin_inf_{k}"), *v),
            None => empty.push(k.to_string()),
        }
    }
    if !empty.is_empty() {
        report = report.note(format!("empty bins: {}", empty.join(", ")));
    }
    let filled: Vec<f64> = bin_inf.iter().flatten().copied().collect();
    let nondecreasing = filled.windows(2).all(|w| w[1] >= w[0] - tol::CHECK_TOL);
    report = report.note(if nondecreasing {
        "binned infima are nondecreasing across distance bins"
    } else {
        "binned infima are not monotone across distance bins"
    });
    let estimate = ModulusEstimate { bin_edges: edges, bin_inf };
    Ok((estimate, report))
}

/// Structure classification from sampled functional equations.
#[derive(Debug, Clone, Serialize)]
pub struct StructureClassification {
    pub linear: PropertyReport,
    pub affine: PropertyReport,
    pub isometry: PropertyReport,
    pub projection: PropertyReport,
}

/// Tests linearity, affineness, isometry, and the projection property
/// (idempotence plus firmness) on random combinations.
pub fn classify_structure(t: &FirmMap, cfg: &SampleConfig) -> Result<StructureClassification> {
    let xs = sample_points(cfg);
    let ys = sample_companion_points(cfg);
    let coeff_cfg = SampleConfig::new(cfg.seed, 2 * cfg.count, cfg.dim, 1.0)?;
    let coeffs = sample_normal_scalars(&coeff_cfg);
    let lambdas = sample_uniform_scalars(&SampleConfig::new(cfg.seed, cfg.count, cfg.dim, 1.0)?, -2.0, 3.0);

    struct Row {
        linear_resid: f64,
        affine_resid: f64,
        iso_resid: f64,
        idem_resid: f64,
        linear_tol: f64,
        affine_tol: f64,
        iso_tol: f64,
        idem_tol: f64,
    }
    let rows: Vec<Result<Row>> = par_map_range(xs.len(), |i| {
        let (x, y) = (&xs[i], &ys[i]);
        let (alpha, beta) = (coeffs[2 * i], coeffs[2 * i + 1]);
        let lambda = lambdas[i];
        let tx = t.apply(x)?;
        let ty = t.apply(y)?;

        let combo = x.scale(alpha).add(&y.scale(beta));
        let linear_resid = t.apply(&combo)?.sub(&tx.scale(alpha)).sub(&ty.scale(beta)).norm();
        let linear_tol = 1e-8 * (1.0 + combo.norm());

        let affine_combo = x.scale(lambda).add(&y.scale(1.0 - lambda));
        let affine_resid = t
            .apply(&affine_combo)?
            .sub(&tx.scale(lambda))
            .sub(&ty.scale(1.0 - lambda))
            .norm();
        let affine_tol = 1e-8 * (1.0 + affine_combo.norm());

        let dist = x.dist(y);
        let iso_resid = (tx.dist(&ty) - dist).abs();
        let iso_tol = 1e-8 * (1.0 + dist);

        let idem_resid = t.apply(&tx)?.sub(&tx).norm();
        let idem_tol = 1e-8 * (1.0 + tx.norm());

        Ok(Row {
            linear_resid,
            affine_resid,
            iso_resid,
            idem_resid,
            linear_tol,
            affine_tol,
            iso_tol,
            idem_tol,
        })
    });

    let mut lin_worst: Option<(f64, usize)> = None;
    let mut aff_worst: Option<(f64, usize)> = None;
    let mut iso_worst: Option<(f64, usize)> = None;
    let mut idem_worst: Option<(f64, usize)> = None;
    let mut lin_fail: Option<usize> = None;
    let mut aff_fail: Option<usize> = None;
    let mut iso_fail: Option<usize> = None;
    let mut idem_fail: Option<usize> = None;
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        if lin_worst.map(|(w, _)| row.linear_resid > w).unwrap_or(true) {
            lin_worst = Some((row.linear_resid, i));
        }
        if aff_worst.map(|(w, _)| row.affine_resid > w).unwrap_or(true) {
            aff_worst = Some((row.affine_resid, i));
        }
        if iso_worst.map(|(w, _)| row.iso_resid > w).unwrap_or(true) {
            iso_worst = Some((row.iso_resid, i));
        }
        if idem_worst.map(|(w, _)| row.idem_resid > w).unwrap_or(true) {
            idem_worst = Some((row.idem_resid, i));
        }
        if row.linear_resid > row.linear_tol && lin_fail.is_none() {
            lin_fail = Some(i);
        }
        if row.affine_resid > row.affine_tol && aff_fail.is_none() {
            aff_fail = Some(i);
        }
        if row.iso_resid > row.iso_tol && iso_fail.is_none() {
            iso_fail = Some(i);
        }
        if row.idem_resid > row.idem_tol && idem_fail.is_none() {
            idem_fail = Some(i);
        }
    }

    let count = xs.len();
    let seed = cfg.seed;
    let build = |id: PropertyId,
                 worst: Option<(f64, usize)>,
                 fail: Option<usize>,
                 witness_points: &dyn Fn(usize) -> Vec<Vector>,
                 sides: &dyn Fn(usize) -> Result<(f64, f64)>|
     -> Result<PropertyReport> {
        let mut report = PropertyReport::new(id, Verdict::HoldsOnSamples, count, seed);
        if let Some((w, _)) = worst {
            report = report.constant("max_residual", w);
        }
        if let Some(i) = fail {
            report.verdict = Verdict::Violated;
            let (lhs, rhs) = sides(i)?;
            report = report.witness(witness_points(i), lhs, rhs);
        }
        Ok(report)
    };

    let linear = build(
        PropertyId::Linear,
        lin_worst,
        lin_fail,
        &|i| vec![xs[i].clone(), ys[i].clone()],
        &|i| {
            let (alpha, beta) = (coeffs[2 * i], coeffs[2 * i + 1]);
            let combo = xs[i].scale(alpha).add(&ys[i].scale(beta));
            let resid = t
                .apply(&combo)?
                .sub(&t.apply(&xs[i])?.scale(alpha))
                .sub(&t.apply(&ys[i])?.scale(beta))
                .norm();
            Ok((resid, 1e-8 * (1.0 + combo.norm())))
        },
    )?;
    let affine = build(
        PropertyId::Affine,
        aff_worst,
        aff_fail,
        &|i| vec![xs[i].clone(), ys[i].clone()],
        &|i| {
            let lambda = lambdas[i];
            let combo = xs[i].scale(lambda).add(&ys[i].scale(1.0 - lambda));
            let resid = t
                .apply(&combo)?
                .sub(&t.apply(&xs[i])?.scale(lambda))
                .sub(&t.apply(&ys[i])?.scale(1.0 - lambda))
                .norm();
            Ok((resid, 1e-8 * (1.0 + combo.norm())))
        },
    )?;
    let isometry = build(
        PropertyId::Isometry,
        iso_worst,
        iso_fail,
        &|i| vec![xs[i].clone(), ys[i].clone()],
        &|i| {
            let d = xs[i].dist(&ys[i]);
            Ok((t.apply(&xs[i])?.dist(&t.apply(&ys[i])?), d))
        },
    )?;

    // A projection is an idempotent firmly nonexpansive map.
    let firm = check_firm(t, cfg)?;
    let mut projection = build(
        PropertyId::Projection,
        idem_worst,
        idem_fail,
        &|i| vec![xs[i].clone()],
        &|i| {
            let tx = t.apply(&xs[i])?;
            Ok((t.apply(&tx)?.sub(&tx).norm(), 1e-8 * (1.0 + tx.norm())))
        },
    )?;
    match (projection.verdict, firm.verdict) {
        (Verdict::HoldsOnSamples, Verdict::HoldsOnSamples) => {}
        (Verdict::Violated, _) => {}
        (_, Verdict::Violated) => {
            projection.verdict = Verdict::Violated;
            projection.witness = firm.witness.clone();
            projection = projection.note("idempotent on samples but not firmly nonexpansive");
        }
        _ => {
            projection.verdict = Verdict::Inconclusive;
            projection = projection.note("firmness check was inconclusive");
        }
    }
    Ok(StructureClassification { linear, affine, isometry, projection })
}
