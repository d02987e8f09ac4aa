//! Spec execution: operator and map construction, check dispatch, and
//! expectation evaluation. Checks run in declaration order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::Value;
use sha2::{Digest, Sha256};

use minty_core::{
    analyze_reflected_contraction, backward_backward, check_banach_graph_inequality,
    check_cyclic_firm, check_firm, check_paramonotone, check_strict,
    check_strong_mono_via_reflected, classify_structure, complement, douglas_rachford_operator,
    estimate_cocoercivity, estimate_lipschitz, estimate_strong_monotonicity,
    estimate_uniform_modulus, fixed_point_evidence, make_operator, minty_sample, moreau_check,
    picard_iterate, rectangular_trend, reflect, run_duality_suite, sample_points, scale_map,
    surjectivity_probe, AffineForm, CoreError, FirmMap, GraphSample, IterationTrace,
    MonotoneOperator, Provenance, SampleConfig,
};

use crate::report::{
    write_atomic, CheckResult, ExpectationOutcome, Format, ReportDocument, Summary, Timing,
};
use crate::spec::{CheckSpec, Expectation, ExperimentSpec, MapSpec};

#[derive(Debug)]
pub enum RunError {
    /// Spec file unreadable, malformed JSON, unknown name reference,
    /// reference cycle, or a missing required field for a check.
    Parse(String),
    /// Check id not in the registry.
    UnknownCheck(String),
    /// Dimension mismatch or invalid operator/parameter value.
    Validation(String),
    /// Failure while executing checks or writing output.
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Parse(_) => 2,
            RunError::UnknownCheck(_) => 3,
            RunError::Validation(_) => 4,
            RunError::Runtime(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Parse(m)
            | RunError::UnknownCheck(m)
            | RunError::Validation(m)
            | RunError::Runtime(m) => m,
        }
    }
}

/// Execution errors keep the distinction between bad input data and
/// numerical trouble so the process exit code stays meaningful.
fn core_err(context: &str, e: CoreError) -> RunError {
    match e {
        CoreError::DimensionMismatch { .. }
        | CoreError::InvalidParameter { .. }
        | CoreError::NotMonotone { .. }
        | CoreError::Empty { .. } => RunError::Validation(format!("{context}: {e}")),
        CoreError::NonFinite { .. }
        | CoreError::Singular { .. }
        | CoreError::EigenNonConvergence { .. }
        | CoreError::SolverNonConvergence { .. } => RunError::Runtime(format!("{context}: {e}")),
    }
}

pub struct RunOutcome {
    pub rendered: String,
    pub out_path: Option<PathBuf>,
    pub checks_run: usize,
    pub expectations_failed: usize,
}

pub fn run_spec_file(
    path: &Path,
    out_override: Option<&Path>,
    format_override: Option<Format>,
) -> Result<RunOutcome, RunError> {
    let started = Instant::now();
    let raw = std::fs::read(path)
        .map_err(|e| RunError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let spec: ExperimentSpec = serde_json::from_slice(&raw)
        .map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))?;
    let spec_sha256 = hex_digest(&raw);

    let format = match format_override {
        Some(f) => f,
        None => match spec.output.as_ref().and_then(|o| o.format.as_deref()) {
            Some(s) => Format::parse(s)
                .ok_or_else(|| RunError::Parse(format!("unknown output format {s:?}")))?,
            None => Format::Json,
        },
    };
    // `--out -` forces stdout even when the spec configures a file.
    let out_path: Option<PathBuf> = match out_override {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p.to_path_buf()),
        None => spec.output.as_ref().map(|o| PathBuf::from(&o.path)),
    };

    let env = Environment::build(&spec)?;

    let mut results = Vec::with_capacity(spec.checks.len());
    let mut declared = 0usize;
    let mut failed = 0usize;
    for (index, check) in spec.checks.iter().enumerate() {
        let (target, outcome) = run_check(&env, check)?;
        let expectation = match &check.expect {
            Some(exp) => {
                declared += 1;
                let e = evaluate_expectation(exp, &outcome);
                if e.failed() {
                    failed += 1;
                }
                e
            }
            None => ExpectationOutcome::None,
        };
        results.push(CheckResult {
            index,
            check: check.check.clone(),
            target,
            seed: check.seed,
            outcome,
            expectation,
        });
    }

    let report = ReportDocument {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec_path: path.display().to_string(),
        spec_sha256,
        results,
        summary: Summary {
            checks_run: spec.checks.len(),
            expectations_declared: declared,
            expectations_failed: failed,
        },
        timing: Timing { total_seconds: started.elapsed().as_secs_f64() },
    };
    let rendered = report.render(format);
    if let Some(out) = &out_path {
        write_atomic(out, &rendered)
            .map_err(|e| RunError::Runtime(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(RunOutcome {
        rendered,
        out_path,
        checks_run: spec.checks.len(),
        expectations_failed: failed,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write as _;
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Named operators and fully resolved named maps.
struct Environment {
    operators: BTreeMap<String, MonotoneOperator>,
    maps: BTreeMap<String, FirmMap>,
}

impl Environment {
    fn build(spec: &ExperimentSpec) -> Result<Self, RunError> {
        let mut operators = BTreeMap::new();
        for (name, op_spec) in &spec.operators {
            let op = make_operator(op_spec)
                .map_err(|e| core_err(&format!("operator {name:?}"), e))?;
            operators.insert(name.clone(), op);
        }
        let mut maps = BTreeMap::new();
        let mut stack = Vec::new();
        for name in spec.maps.keys() {
            resolve_map(name, spec, &operators, &mut maps, &mut stack)?;
        }
        Ok(Environment { operators, maps })
    }

    fn operator(&self, name: &str) -> Result<&MonotoneOperator, RunError> {
        self.operators
            .get(name)
            .ok_or_else(|| RunError::Parse(format!("unknown operator {name:?}")))
    }

    fn map(&self, name: &str) -> Result<&FirmMap, RunError> {
        self.maps
            .get(name)
            .ok_or_else(|| RunError::Parse(format!("unknown map {name:?}")))
    }
}

fn resolve_map(
    name: &str,
    spec: &ExperimentSpec,
    operators: &BTreeMap<String, MonotoneOperator>,
    resolved: &mut BTreeMap<String, FirmMap>,
    stack: &mut Vec<String>,
) -> Result<FirmMap, RunError> {
    if let Some(m) = resolved.get(name) {
        return Ok(m.clone());
    }
    if stack.iter().any(|s| s == name) {
        return Err(RunError::Parse(format!(
            "map definition cycle: {} -> {name}",
            stack.join(" -> ")
        )));
    }
    let def = spec
        .maps
        .get(name)
        .ok_or_else(|| RunError::Parse(format!("unknown map {name:?}")))?;
    stack.push(name.to_string());
    let built = build_map(def, spec, operators, resolved, stack)
        .map_err(|e| match e {
            RunError::Parse(m) => RunError::Parse(format!("map {name:?}: {m}")),
            RunError::Validation(m) => RunError::Validation(format!("map {name:?}: {m}")),
            other => other,
        })?;
    stack.pop();
    resolved.insert(name.to_string(), built.clone());
    Ok(built)
}

fn build_map(
    def: &MapSpec,
    spec: &ExperimentSpec,
    operators: &BTreeMap<String, MonotoneOperator>,
    resolved: &mut BTreeMap<String, FirmMap>,
    stack: &mut Vec<String>,
) -> Result<FirmMap, RunError> {
    let get_operator = |name: &str| -> Result<&MonotoneOperator, RunError> {
        operators
            .get(name)
            .ok_or_else(|| RunError::Parse(format!("unknown operator {name:?}")))
    };
    match def {
        MapSpec::Identity { dim } => {
            if *dim == 0 {
                return Err(RunError::Validation("dimension must be positive".into()));
            }
            Ok(FirmMap::identity(*dim))
        }
        MapSpec::Linear { matrix } => {
            FirmMap::from_matrix(matrix.clone()).map_err(|e| core_err("linear map", e))
        }
        MapSpec::Affine { matrix, offset } => {
            let form = AffineForm::new(matrix.clone(), offset.clone())
                .map_err(|e| core_err("affine map", e))?;
            Ok(FirmMap::from_affine(form, Provenance::AffineMap))
        }
        MapSpec::Constant { value } => Ok(FirmMap::constant(value.clone())),
        MapSpec::Resolvent { operator } => Ok(get_operator(operator)?.resolvent().clone()),
        MapSpec::Complement { of } => {
            let inner = resolve_map(of, spec, operators, resolved, stack)?;
            Ok(complement(&inner))
        }
        MapSpec::Reflect { of } => {
            let inner = resolve_map(of, spec, operators, resolved, stack)?;
            Ok(reflect(&inner))
        }
        MapSpec::Scale { of, factor } => {
            let inner = resolve_map(of, spec, operators, resolved, stack)?;
            scale_map(&inner, *factor).map_err(|e| core_err("scaled map", e))
        }
        MapSpec::Compose { of } => {
            let mut parts = Vec::with_capacity(of.len());
            for part in of {
                parts.push(resolve_map(part, spec, operators, resolved, stack)?);
            }
            minty_core::compose(&parts).map_err(|e| core_err("composition", e))
        }
        MapSpec::ConvexCombine { weights, of } => {
            let mut parts = Vec::with_capacity(of.len());
            for part in of {
                parts.push(resolve_map(part, spec, operators, resolved, stack)?);
            }
            minty_core::convex_combine(weights, &parts)
                .map_err(|e| core_err("convex combination", e))
        }
        MapSpec::DouglasRachford { a, b } => {
            douglas_rachford_operator(get_operator(a)?, get_operator(b)?)
                .map_err(|e| core_err("splitting operator", e))
        }
        MapSpec::BackwardBackward { a, b } => {
            backward_backward(get_operator(a)?, get_operator(b)?)
                .map_err(|e| core_err("splitting operator", e))
        }
    }
}

/// What a check id acts on.
enum TargetKind {
    /// A map, named directly or as an operator's resolvent.
    MapLike,
    /// An operator with its sampled graph.
    OperatorOnly,
    /// A convex function given inline.
    Function,
}

pub struct CheckInfo {
    pub id: &'static str,
    kind: TargetKind,
    pub describe: &'static str,
}

impl CheckInfo {
    pub fn target_label(&self) -> &'static str {
        match self.kind {
            TargetKind::MapLike => "map or operator",
            TargetKind::OperatorOnly => "operator",
            TargetKind::Function => "function",
        }
    }
}

/// Stable registry: ids, target kinds, and self-contained one-line
/// descriptions, in the order `list-checks` prints them.
pub fn check_registry() -> &'static [CheckInfo] {
    use TargetKind::*;
    &[
        CheckInfo { id: "check_firm", kind: MapLike, describe: "tests the five equivalent squared-margin characterizations of firm nonexpansiveness on sampled pairs and cross-classifies them" },
        CheckInfo { id: "lipschitz", kind: MapLike, describe: "estimates the best Lipschitz constant over sampled pairs, with the exact spectral value for affine maps" },
        CheckInfo { id: "strict_nonexpansive", kind: MapLike, describe: "tests |Tx - Ty| < |x - y| with a scale-aware margin on distinct sampled pairs" },
        CheckInfo { id: "injective", kind: MapLike, describe: "tests Tx != Ty for distinct sampled inputs with a scale-aware margin" },
        CheckInfo { id: "strict_firm", kind: MapLike, describe: "tests the strict inequality <x - y, Tx - Ty> > |Tx - Ty|^2 on distinct sampled pairs" },
        CheckInfo { id: "cyclic_firm", kind: MapLike, describe: "tests the cyclic sum inequality sum_i <x_i - Tx_i, Tx_i - Tx_{i+1}> >= 0 over sampled tuples of lengths 2..=n_max in both orientations" },
        CheckInfo { id: "linear", kind: MapLike, describe: "tests additivity and homogeneity residuals of the map on sampled points" },
        CheckInfo { id: "affine", kind: MapLike, describe: "tests affine-combination residuals T((1-t)x + ty) = (1-t)Tx + tTy on sampled points" },
        CheckInfo { id: "isometry", kind: MapLike, describe: "tests distance preservation |Tx - Ty| = |x - y| on sampled pairs" },
        CheckInfo { id: "projection", kind: MapLike, describe: "tests idempotence T(Tx) = Tx together with firm nonexpansiveness" },
        CheckInfo { id: "banach_graph", kind: OperatorOnly, describe: "tests the graph inequality (1 - b^2) |x - y|^2 <= b^2 (2 <x - y, u - v> + |u - v|^2) on all sampled graph pairs, equivalent to the resolvent being a b-contraction" },
        CheckInfo { id: "strong_mono", kind: OperatorOnly, describe: "estimates the strong monotonicity modulus inf <x - y, u - v> / |x - y|^2 over sampled graph pairs" },
        CheckInfo { id: "cocoercivity", kind: OperatorOnly, describe: "estimates the cocoercivity modulus as strong monotonicity of the inverse graph" },
        CheckInfo { id: "paramonotone", kind: OperatorOnly, describe: "on sampled graph pairs with <x - y, u - v> = 0, verifies the cross memberships u in Ay and v in Ax through resolvent residuals" },
        CheckInfo { id: "rectangular", kind: OperatorOnly, describe: "sweeps inf <x - p, v - w> over graph samples at growing scales; a bounded trend is consistent with rectangularity, unbounded decrease refutes it" },
        CheckInfo { id: "uniform_modulus", kind: OperatorOnly, describe: "bins <x - y, u - v> against |x - y| to trace a uniform monotonicity modulus profile" },
        CheckInfo { id: "duality_suite", kind: OperatorOnly, describe: "runs the duality table for the operator and its inverse: self-dual rows must agree and paired rows must swap, via the resolvent and its complement" },
        CheckInfo { id: "surjectivity", kind: MapLike, describe: "searches for preimages of the given targets under the map; small residuals certify the targets are attained" },
        CheckInfo { id: "moreau", kind: Function, describe: "checks prox_f + prox_{f*} = Id on sampled points, the dual prox coming from the inverse operator, with closed-form conjugates cross-checked when available" },
        CheckInfo { id: "reflected_contraction", kind: OperatorOnly, describe: "compares three equivalent contraction criteria for the reflected resolvent 2 J_A - Id at a provided or estimated factor" },
        CheckInfo { id: "strong_mono_reflected", kind: OperatorOnly, describe: "certifies eps-strong monotonicity through nonexpansiveness of eps Id + (1 + eps)(2 J_A - Id), cross-validated on graph samples" },
        CheckInfo { id: "picard", kind: MapLike, describe: "runs the fixed-point iteration x_{k+1} = T x_k from one start, recording residuals, with optional per-iteration CSV output" },
        CheckInfo { id: "fixed_point_evidence", kind: MapLike, describe: "runs the fixed-point iteration from several starts and classifies the limit set as singleton evidence, multiple limits, or empty/nonattracting" },
    ]
}

fn lookup_check(id: &str) -> Result<&'static CheckInfo, RunError> {
    check_registry()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| RunError::UnknownCheck(format!("unknown check id {id:?}")))
}

/// The map a map-like check acts on: a named map, or a named operator's
/// resolvent.
fn map_target<'e>(
    env: &'e Environment,
    check: &CheckSpec,
) -> Result<(String, &'e FirmMap), RunError> {
    match (&check.operator, &check.map) {
        (Some(op), None) => Ok((format!("operator:{op}"), env.operator(op)?.resolvent())),
        (None, Some(m)) => Ok((format!("map:{m}"), env.map(m)?)),
        (Some(_), Some(_)) => Err(RunError::Parse(format!(
            "check {:?} must target either an operator or a map, not both",
            check.check
        ))),
        (None, None) => Err(RunError::Parse(format!(
            "check {:?} needs an operator or map target",
            check.check
        ))),
    }
}

fn operator_target<'e>(
    env: &'e Environment,
    check: &CheckSpec,
) -> Result<(String, &'e MonotoneOperator), RunError> {
    if check.map.is_some() {
        return Err(RunError::Parse(format!(
            "check {:?} targets an operator, not a map",
            check.check
        )));
    }
    let name = check.operator.as_deref().ok_or_else(|| {
        RunError::Parse(format!("check {:?} needs an operator target", check.check))
    })?;
    Ok((format!("operator:{name}"), env.operator(name)?))
}

fn sample_config(check: &CheckSpec, dim: usize) -> Result<SampleConfig, RunError> {
    SampleConfig::new(check.seed, check.count(), dim, check.scale())
        .map_err(|e| core_err("sample configuration", e))
}

fn graph_for(
    a: &MonotoneOperator,
    check: &CheckSpec,
) -> Result<(GraphSample, SampleConfig), RunError> {
    let cfg = sample_config(check, a.dim())?;
    let probes = sample_points(&cfg);
    let g = minty_sample(a, &probes).map_err(|e| core_err("graph sampling", e))?;
    Ok((g, cfg))
}

fn to_value<T: serde::Serialize>(value: &T) -> Result<Value, RunError> {
    serde_json::to_value(value).map_err(|e| RunError::Runtime(format!("serialization: {e}")))
}

fn require<T>(opt: &Option<T>, check: &str, field: &str) -> Result<T, RunError>
where
    T: Clone,
{
    opt.clone()
        .ok_or_else(|| RunError::Parse(format!("check {check:?} requires the {field:?} field")))
}

fn run_check(env: &Environment, check: &CheckSpec) -> Result<(String, Value), RunError> {
    let info = lookup_check(&check.check)?;
    let exec = |e: CoreError| core_err(&format!("check {:?}", check.check), e);

    match info.kind {
        TargetKind::Function => {
            let f = check.function.as_ref().ok_or_else(|| {
                RunError::Parse(format!("check {:?} requires the \"function\" field", check.check))
            })?;
            let dim = require(&check.dim, &check.check, "dim")?;
            let cfg = sample_config(check, dim)?;
            let report = moreau_check(f, dim, &cfg).map_err(exec)?;
            Ok((format!("function:{}", f.label()), to_value(&report)?))
        }
        TargetKind::MapLike => {
            let (target, t) = map_target(env, check)?;
            let cfg = sample_config(check, t.dim())?;
            let outcome = match check.check.as_str() {
                "check_firm" => to_value(&check_firm(t, &cfg).map_err(exec)?)?,
                "lipschitz" => to_value(&estimate_lipschitz(t, &cfg).map_err(exec)?)?,
                "strict_nonexpansive" => {
                    to_value(&check_strict(t, &cfg).map_err(exec)?.strict_nonexpansive)?
                }
                "injective" => to_value(&check_strict(t, &cfg).map_err(exec)?.injective)?,
                "strict_firm" => to_value(&check_strict(t, &cfg).map_err(exec)?.strict_firm)?,
                "cyclic_firm" => {
                    let n_max = check.n_max.unwrap_or(5);
                    let tuples = check.tuples_per_n.unwrap_or_else(|| check.count());
                    to_value(&check_cyclic_firm(t, n_max, tuples, &cfg).map_err(exec)?)?
                }
                "linear" => to_value(&classify_structure(t, &cfg).map_err(exec)?.linear)?,
                "affine" => to_value(&classify_structure(t, &cfg).map_err(exec)?.affine)?,
                "isometry" => to_value(&classify_structure(t, &cfg).map_err(exec)?.isometry)?,
                "projection" => to_value(&classify_structure(t, &cfg).map_err(exec)?.projection)?,
                "surjectivity" => {
                    let targets = require(&check.targets, &check.check, "targets")?;
                    let starts = check.starts.unwrap_or(8);
                    to_value(&surjectivity_probe(t, &targets, starts, &cfg).map_err(exec)?)?
                }
                "picard" => {
                    let start = require(&check.start, &check.check, "start")?;
                    let max_iter = check.max_iter.unwrap_or(1000);
                    let stop_tol = check.stop_tol.unwrap_or(1e-9);
                    let trace = picard_iterate(t, &start, max_iter, stop_tol).map_err(exec)?;
                    if let Some(csv) = &check.csv {
                        write_trace_csv(Path::new(csv), &trace)?;
                    }
                    to_value(&trace)?
                }
                "fixed_point_evidence" => {
                    let starts = check.starts.unwrap_or(10);
                    let max_iter = check.max_iter.unwrap_or(1000);
                    let stop_tol = check.stop_tol.unwrap_or(1e-9);
                    to_value(
                        &fixed_point_evidence(t, starts, max_iter, stop_tol, &cfg).map_err(exec)?,
                    )?
                }
                other => return Err(RunError::UnknownCheck(format!("unknown check id {other:?}"))),
            };
            Ok((target, outcome))
        }
        TargetKind::OperatorOnly => {
            let (target, a) = operator_target(env, check)?;
            let outcome = match check.check.as_str() {
                "banach_graph" => {
                    let beta = require(&check.beta, &check.check, "beta")?;
                    let (g, _) = graph_for(a, check)?;
                    to_value(&check_banach_graph_inequality(&g, beta, check.seed).map_err(exec)?)?
                }
                "strong_mono" => {
                    let (g, _) = graph_for(a, check)?;
                    to_value(
                        &estimate_strong_monotonicity(&g, check.epsilon, check.seed)
                            .map_err(exec)?,
                    )?
                }
                "cocoercivity" => {
                    let (g, _) = graph_for(a, check)?;
                    to_value(&estimate_cocoercivity(&g, check.gamma, check.seed).map_err(exec)?)?
                }
                "paramonotone" => {
                    let (g, _) = graph_for(a, check)?;
                    to_value(&check_paramonotone(a, &g, check.seed).map_err(exec)?)?
                }
                "rectangular" => {
                    let cfg = sample_config(check, a.dim())?;
                    let scales = check.scales.clone().unwrap_or_else(|| vec![1.0, 10.0, 100.0]);
                    to_value(&rectangular_trend(a, &cfg, &scales).map_err(exec)?)?
                }
                "uniform_modulus" => {
                    let bins = check.bins.unwrap_or(8);
                    let (g, _) = graph_for(a, check)?;
                    let (estimate, report) =
                        estimate_uniform_modulus(&g, bins, check.seed).map_err(exec)?;
                    let mut obj = serde_json::Map::new();
                    obj.insert("estimate".into(), to_value(&estimate)?);
                    obj.insert("report".into(), to_value(&report)?);
                    Value::Object(obj)
                }
                "duality_suite" => {
                    let cfg = sample_config(check, a.dim())?;
                    let suite = run_duality_suite(a, &cfg).map_err(exec)?;
                    let all = suite.all_consistent();
                    let mut v = to_value(&suite)?;
                    if let Value::Object(obj) = &mut v {
                        obj.insert("all_consistent".into(), Value::Bool(all));
                    }
                    v
                }
                "reflected_contraction" => {
                    let cfg = sample_config(check, a.dim())?;
                    to_value(&analyze_reflected_contraction(a, check.beta, &cfg).map_err(exec)?)?
                }
                "strong_mono_reflected" => {
                    let epsilon = require(&check.epsilon, &check.check, "epsilon")?;
                    let cfg = sample_config(check, a.dim())?;
                    to_value(&check_strong_mono_via_reflected(a, epsilon, &cfg).map_err(exec)?)?
                }
                other => return Err(RunError::UnknownCheck(format!("unknown check id {other:?}"))),
            };
            Ok((target, outcome))
        }
    }
}

/// One row per iterate: index, step residual (blank for the start), and the
/// iterate's coordinates.
fn write_trace_csv(path: &Path, trace: &IterationTrace) -> Result<(), RunError> {
    let dim = trace.iterates.first().map(|v| v.dim()).unwrap_or(0);
    let mut csv = String::from("iteration,residual");
    for k in 0..dim {
        use std::fmt::Write as _;
        let _ = write!(csv, ",x{k}");
    }
    csv.push('\n');
    for (i, x) in trace.iterates.iter().enumerate() {
        use std::fmt::Write as _;
        if i == 0 {
            let _ = write!(csv, "0,");
        } else {
            let _ = write!(csv, "{i},{}", trace.residuals[i - 1]);
        }
        for c in x.as_slice() {
            let _ = write!(csv, ",{c}");
        }
        csv.push('\n');
    }
    write_atomic(path, &csv)
        .map_err(|e| RunError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn find_verdict(outcome: &Value) -> Option<&str> {
    outcome
        .get("verdict")
        .or_else(|| outcome.get("report").and_then(|r| r.get("verdict")))
        .and_then(Value::as_str)
}

fn find_constant(outcome: &Value, name: &str) -> Option<f64> {
    outcome
        .get("constants")
        .and_then(|c| c.get(name))
        .or_else(|| {
            outcome
                .get("report")
                .and_then(|r| r.get("constants"))
                .and_then(|c| c.get(name))
        })
        .or_else(|| outcome.get(name))
        .and_then(Value::as_f64)
}

fn find_witness(outcome: &Value) -> bool {
    let w = outcome
        .get("witness")
        .or_else(|| outcome.get("report").and_then(|r| r.get("witness")));
    matches!(w, Some(v) if !v.is_null())
}

fn evaluate_expectation(exp: &Expectation, outcome: &Value) -> ExpectationOutcome {
    let mut failures = Vec::new();
    if let Some(want) = &exp.verdict {
        match find_verdict(outcome) {
            Some(got) if got == want => {}
            Some(got) => failures.push(format!("verdict: expected {want:?}, got {got:?}")),
            None => failures.push("verdict: outcome carries no verdict".into()),
        }
    }
    if let Some(constants) = &exp.constants {
        for c in constants {
            match find_constant(outcome, &c.name) {
                Some(got) if (got - c.value).abs() <= c.tol => {}
                Some(got) => failures.push(format!(
                    "constant {:?}: expected {} within {}, got {}",
                    c.name, c.value, c.tol, got
                )),
                None => failures.push(format!("constant {:?}: not present in outcome", c.name)),
            }
        }
    }
    let bool_field = |name: &str, want: bool, failures: &mut Vec<String>| {
        match outcome.get(name).and_then(Value::as_bool) {
            Some(got) if got == want => {}
            Some(got) => failures.push(format!("{name}: expected {want}, got {got}")),
            None => failures.push(format!("{name}: not present in outcome")),
        }
    };
    if let Some(want) = exp.all_consistent {
        bool_field("all_consistent", want, &mut failures);
    }
    if let Some(want) = exp.agree {
        bool_field("agree", want, &mut failures);
    }
    if let Some(want) = exp.converged {
        bool_field("converged", want, &mut failures);
    }
    if let Some(want) = exp.diverged {
        bool_field("diverged", want, &mut failures);
    }
    if let Some(want) = &exp.outcome {
        match outcome.get("outcome").and_then(Value::as_str) {
            Some(got) if got == want => {}
            Some(got) => failures.push(format!("outcome: expected {want:?}, got {got:?}")),
            None => failures.push("outcome: no outcome field present".into()),
        }
    }
    if let Some(want) = exp.witness {
        let got = find_witness(outcome);
        if got != want {
            failures.push(format!("witness: expected present = {want}, got {got}"));
        }
    }
    if failures.is_empty() {
        ExpectationOutcome::Met
    } else {
        ExpectationOutcome::Failed { failures }
    }
}
