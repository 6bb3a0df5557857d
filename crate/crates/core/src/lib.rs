//! Analysis of the planar rational difference system
//!
//! ```text
//! x_{n+1} = (a1 + b1 x_n) / y_n
//! y_{n+1} = (a2 + b2 x_n) / y_n
//! ```
//!
//! The map is the projectivisation of the linear map with companion matrix
//! `A = [[b1, 0, a1], [b2, 0, a2], [0, 1, 0]]`, so every orbit has a closed
//! form in terms of the eigenvalues of `A`. This crate provides
//!
//! * direct iteration (the ground truth every closed form is checked against),
//! * the characteristic polynomial, its roots and the matrix-power coefficients,
//! * the forbidden set as a countable union of lines,
//! * closed-form solutions for every parameter regime,
//! * equilibria, stability verdicts and the asymptotic fate of single orbits.

pub mod classify;
pub mod error;
pub mod forbidden;
mod numeric;
pub mod solution;
pub mod spectrum;
pub mod system;

pub use classify::{
    classify_behavior, classify_nonneg, detect_period, equilibria, global_dynamics,
    period2_criterion, stability, Behavior, BehaviorReport, ClassifyOptions, Equilibrium,
    EquilibriumSet, GlobalDynamics, NonnegReport, NonnegVerdict, StabilityKind, StabilityVerdict,
};
pub use error::{Error, Result};
pub use forbidden::{
    check_initial, forbidden_lines, is_forbidden, ForbiddenCheck, ForbiddenSet, Line,
};
pub use solution::{
    complex_constants, conic_of, line_l, sigma_tau, solve, solve_beta2_nonzero, solve_beta2_zero,
    v_sequence, ComplexConstants, Conic, LineL, VSequence,
};
pub use spectrum::{
    char_poly, classify_regime, power_coeffs, roots, spectrum, CharPoly, ComplexPair, ModulusOrder,
    MultiplicityPattern, PowerCoeffs, RealRoot, RegimeTag, Spectrum,
};
pub use system::{
    iterate, matrix, step, validate_params, CompanionMatrix, LineEq, Orbit, OrbitStatus, Params,
    Point,
};

/// Numerical thresholds shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Relative guard on the denominator `y` (scaled by `max(1, |a2| + |b2 x|)`).
    pub divide: f64,
    /// Relative distance under which roots are merged into one multiple root.
    pub cluster: f64,
    /// Euclidean point-to-line distance for membership tests.
    pub membership: f64,
    /// Max-norm tolerance used by period detection.
    pub period: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            divide: 1e-12,
            cluster: 1e-8,
            membership: 1e-9,
            period: 1e-8,
        }
    }
}

/// Default truncation of the forbidden-set union.
pub const DEFAULT_FORBIDDEN_HORIZON: usize = 64;
