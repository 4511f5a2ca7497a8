//! Mild solutions of `x' = Ax + G(x) + H(t)` on the sine basis.
//!
//! Each step applies the variation-of-constants formula mode by mode: the
//! semigroup is exact, `G` is interpolated linearly across the step and
//! iterated to a fixed point (or frozen at the left end), and the forcing is
//! integrated against the exponential kernel. Smooth forcing uses
//! precomputed weights on eight Gauss nodes; forcing with features narrower
//! than eight steps is integrated on panels split at its breakpoints.

mod analysis;
mod forcing;
mod nonlinearity;
mod stepper;
mod trajectory;

pub use analysis::{
    bound_constant, global_bound_estimate, holder_increment_bound, mild_identity_residual,
    semigroup_defect, translation_extension, BoundEstimate, ExtensionReport, ForcingSignal,
};
pub use forcing::{BoundaryMode, ForcingSpec, ForcingTerm};
pub use nonlinearity::{dealias_cutoff, NonlinearityFlags, NonlinearityKind, NonlinearitySpec};
pub use stepper::{solve, PicardStep, Problem, SolverConfig, StepScheme, Stepper, SMOOTH_NODES};
pub use trajectory::{BlowUp, StepRecord, Trajectory, TrajectorySignal};
