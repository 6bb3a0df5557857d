//! Equilibria, stability, periodicity and the asymptotic fate of orbits.

mod behavior;
mod equilibria;
mod nonneg;
mod period;

pub use behavior::{classify_behavior, Behavior, BehaviorReport, ClassifyOptions};
pub use equilibria::{
    equilibria, jacobian_eigenvalues, stability, Equilibrium, EquilibriumLine, EquilibriumSet,
    StabilityKind, StabilityVerdict,
};
pub use nonneg::{
    classify_nonneg, global_dynamics, Checkpoint, GlobalDynamics, NonnegReport, NonnegVerdict,
};
pub use period::{detect_period, period2_criterion};

/// `a` versus `b` with ties up to `tol * max(1, |a|, |b|)`.
pub(crate) fn cmp_tol(a: f64, b: f64, tol: f64) -> std::cmp::Ordering {
    let scale = a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() <= tol * scale {
        std::cmp::Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}
