//! Centralized tolerances.
//!
//! Two scales are deliberately kept apart: [`EQ_TOL`] bounds arithmetic noise
//! in exact linear-algebra identities, while [`CHECK_TOL`] is the margin at
//! which sampled inequality verdicts flip. Everything else derives from these
//! two so that no checker carries its own ad-hoc magic number.

/// Equality tolerance for linear-algebra identities that are exact in real
/// arithmetic (resolvent identity, closed-form resolvents, involutions).
pub const EQ_TOL: f64 = 1e-10;

/// Verdict tolerance for sampled inequality checks. An inequality is
/// "violated" only when it fails by more than this margin (scale-adjusted).
pub const CHECK_TOL: f64 = 1e-8;

/// Pairs closer than this are discarded before forming difference ratios.
pub const DEGENERATE_PAIR: f64 = 1e-12;

/// Relative off-diagonal mass at which the symmetric eigenvalue sweep stops.
pub const EIGEN_STOP: f64 = 1e-14;

/// Sweep cap for the symmetric eigenvalue solver.
pub const EIGEN_MAX_SWEEPS: usize = 64;

/// Residual target for solver-backed resolvents.
pub const RESOLVENT_RESIDUAL: f64 = 1e-9;

/// Newton step cap before falling back to damped fixed-point iteration.
pub const NEWTON_MAX_STEPS: usize = 100;

/// Damped fixed-point iteration cap for the resolvent fallback.
pub const DAMPED_MAX_STEPS: usize = 10_000;

/// Iterate-norm guard: beyond this a fixed-point run is flagged divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Graph-membership residual bound used by the paramonotone implication.
pub const PARAMONO_TOL: f64 = 1e-6;

/// Residual below which a multi-start preimage search counts as a hit.
pub const PREIMAGE_TOL: f64 = 1e-6;

/// Scale-aware margin for strict-inequality classification.
///
/// Strictness is asserted only beyond `CHECK_TOL * (1 + s^2)` where `s` is the
/// separation of the pair, so rounding never masquerades as strictness.
pub fn strict_margin(separation: f64) -> f64 {
    CHECK_TOL * (1.0 + separation * separation)
}

/// Scale-aware slack for non-strict inequality checks on sampled pairs.
pub fn slack(scale: f64) -> f64 {
    CHECK_TOL * (1.0 + scale * scale)
}
