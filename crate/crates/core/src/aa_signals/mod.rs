//! Signals on the real line and their Stepanov-type diagnostics.
//!
//! Besides generic signals (constants, sines, piecewise-linear samples) the
//! registry carries the two classical examples:
//!
//! * `a(t) = Σ_n β_n(t)` with `β_n(t) = Σ_{i ∈ 3ⁿ(2ℤ+1)} H(n²(t - i))`: a
//!   smooth signal that is pointwise unbounded (it reaches `k` at `3^k`) yet
//!   has a finite Stepanov norm, because every unit window meets at most one
//!   spike per level and the level-`n` spike carries mass `I_H / n²`.
//! * `b(t) = sin(1/(2 + cos t + cos √2 t))`: bounded and almost automorphic
//!   but not uniformly continuous.
//!
//! `a` is evaluated lazily: each level only looks at its nearest lattice
//! point, so the spikes (width `1/n²`) are never missed by tabulation.

mod bump;
mod continuity;
mod signal;
mod stepanov;
mod translation;

pub use bump::{
    eval_a, eval_b, eval_beta, eval_bump, level_centres, level_half_width, nearest_lattice_point,
    pow3, resonance_denominator, resonance_slope_scan, BumpShape, BumpSpec, SlopeScan,
    UnboundedAASpec, PANELS_PER_BUMP,
};
pub use continuity::{uniform_continuity_modulus, ModulusRow};
pub use signal::{SampledSignal, Shifted, Signal, SignalExt, SignalKind, Span};
pub use stepanov::{
    bochner_transform, conjugate_exponent, required_span, sp_translation_distance, stepanov_norm,
    stepanov_scan, window_norm, BochnerTransform, BochnerWindow, StepanovConfig, DEFAULT_STRIDE,
};
pub use translation::{
    aa_translation_test, pow3_ladder, sqrt2_ladder, RecurrenceVerdict, TranslationTestReport,
    DEFAULT_VERDICT_THRESHOLD,
};

/// Analytic upper bound `(π²/6)·I_H` for the `p = 1` Stepanov norm of `a`.
pub fn unbounded_stepanov_bound(spec: &UnboundedAASpec) -> f64 {
    core::f64::consts::PI * core::f64::consts::PI / 6.0 * spec.bump.integral()
}

/// Analytic bound `2·I_H·Σ_{n>m} n⁻²` for the `p = 1` distance between `a`
/// and its translate by a multiple of `2·3^m`. Levels `n ≤ m` are periodic
/// under such shifts and cancel exactly.
pub fn unbounded_recurrence_bound(spec: &UnboundedAASpec, m: u32) -> f64 {
    let pi2_6 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
    let head: f64 = (1..=m).map(|n| 1.0 / (n as f64 * n as f64)).sum();
    2.0 * spec.bump.integral() * (pi2_6 - head)
}
