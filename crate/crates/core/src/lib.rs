pub mod catalog;
pub mod checks;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod par;
pub mod sample;
pub mod splitting;
pub mod tol;

pub use catalog::{
    diag_harmonic_resolvent, make_operator, standard_catalog, ConvexFunctionSpec, OperatorSpec,
    OperatorVariant,
};
pub use checks::{
    banach_graph_sides, check_banach_graph_inequality, check_cyclic_firm, check_firm,
    check_paramonotone, check_rectangular, check_strict, classify_structure, cyclic_sum,
    estimate_cocoercivity, estimate_lipschitz, estimate_strong_monotonicity,
    estimate_uniform_modulus, firm_margins, paramonotone_residuals, rectangular_trend,
    ModulusEstimate, PropertyId, PropertyReport, StrictClassification, StructureClassification,
    Verdict, Witness,
};
pub use duality::{
    moreau_check, run_duality_suite, surjectivity_probe, DualityRelation, DualityRow,
    DualitySuiteResult,
};
pub use error::{CoreError, Result};
pub use linalg::{
    solve_linear, spectral_norm, symmetric_eigen, symmetric_eigenvalues, Matrix, Vector,
};
pub use operator::{
    complement, from_direct_eval, from_firm, minty_sample, reflect, scale_map, AffineForm,
    FirmMap, Flag, GraphSample, MonotoneOperator, OperatorFlags, Provenance,
};
pub use sample::{
    sample_companion_points, sample_normal_scalars, sample_points, sample_tuples,
    sample_uniform_scalars, SampleConfig,
};
pub use splitting::{
    analyze_reflected_contraction, backward_backward, check_strong_mono_via_reflected, compose,
    convex_combine, douglas_rachford_operator, fixed_point_evidence, picard_iterate,
    ContractionAnalysis, FixedPointEvidence, FixedPointOutcome, IterationTrace,
};
