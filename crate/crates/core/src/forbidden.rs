//! The forbidden set: initial conditions whose orbit reaches `y = 0`.
//!
//! The `n`-th iterate is undefined exactly when the third component of
//! `A^n (x0, y0, 1)` vanishes. Writing `A^n = a0 I + a1 A + a2 A^2` this is the line
//! `a2(n) beta2 x0 + a1(n) y0 + a2(n) alpha2 + a0(n) = 0`.

use serde::{Deserialize, Serialize};

use crate::spectrum::{char_poly, PowerCoeffs};
use crate::system::{iterate, LineEq, OrbitStatus, Params, Point};

/// A forbidden line together with the step at which its points fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    /// Normalized: `max(|a|, |b|) = 1`.
    pub eq: LineEq,
    pub witness_n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// `a = b = 0`, `c != 0`: no initial condition fails at this step.
    Empty,
    /// `a = b = c = 0`: every initial condition would fail; impossible for validated parameters.
    WholePlane,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedStep {
    pub n: usize,
    pub reason: SkipReason,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenSet {
    pub lines: Vec<Line>,
    pub skipped: Vec<SkippedStep>,
}

const DEDUP_TOL: f64 = 1e-9;

/// Raw (unnormalized) line of step `n`, from the power coefficients.
pub fn raw_line(p: &Params, pc: &PowerCoeffs) -> LineEq {
    LineEq::new(pc.a2 * p.beta2, pc.a1, pc.a2 * p.alpha2 + pc.a0)
}

/// Classifies the raw line of one step: a proper line, or a skip reason.
fn line_for_step(p: &Params, pc: &PowerCoeffs) -> Result<LineEq, SkipReason> {
    let raw = raw_line(p, pc);
    let scale = pc.a0.abs() + pc.a1.abs() + pc.a2.abs() * (1.0 + p.alpha2.abs() + p.beta2.abs());
    let negligible = 64.0 * f64::EPSILON * scale;
    if raw.a.abs() <= negligible && raw.b.abs() <= negligible {
        if raw.c.abs() <= negligible {
            Err(SkipReason::WholePlane)
        } else {
            Err(SkipReason::Empty)
        }
    } else {
        Ok(raw.normalized().expect("non-zero direction"))
    }
}

fn coeff_iter(p: &Params) -> impl Iterator<Item = PowerCoeffs> {
    let cp = char_poly(p);
    std::iter::successors(
        Some(PowerCoeffs {
            n: 1,
            a0: 0.0,
            a1: 1.0,
            a2: 0.0,
        }),
        move |pc| Some(rescaled(pc.next(&cp))),
    )
}

/// Lines are homogeneous in `(a0, a1, a2)`; a power-of-two rescale keeps them exact
/// while avoiding overflow and underflow at large `n`.
fn rescaled(pc: PowerCoeffs) -> PowerCoeffs {
    let m = pc.a0.abs().max(pc.a1.abs()).max(pc.a2.abs());
    if m == 0.0 || !m.is_finite() || (1e-100..=1e100).contains(&m) {
        return pc;
    }
    let s = 2f64.powi(-(m.log2().round() as i32));
    PowerCoeffs {
        a0: pc.a0 * s,
        a1: pc.a1 * s,
        a2: pc.a2 * s,
        ..pc
    }
}

/// Lines for `n = 1..=horizon`, deduplicated (smallest witness kept).
pub fn forbidden_lines(p: &Params, horizon: usize) -> ForbiddenSet {
    let mut lines: Vec<Line> = Vec::new();
    let mut skipped = Vec::new();
    for pc in coeff_iter(p).take(horizon) {
        match line_for_step(p, &pc) {
            Ok(eq) => {
                if !lines.iter().any(|l| l.eq.same_as(&eq, DEDUP_TOL)) {
                    lines.push(Line {
                        eq,
                        witness_n: pc.n,
                    });
                }
            }
            Err(reason) => skipped.push(SkippedStep { n: pc.n, reason }),
        }
    }
    ForbiddenSet { lines, skipped }
}

/// Smallest `n <= horizon` whose line passes within `tol` of `z0`.
pub fn is_forbidden(p: &Params, z0: &Point, horizon: usize, tol: f64) -> Option<usize> {
    coeff_iter(p)
        .take(horizon)
        .find(|pc| matches!(line_for_step(p, pc), Ok(eq) if eq.distance(z0) <= tol))
        .map(|pc| pc.n)
}

/// Outcome of screening an initial condition against the forbidden set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenCheck {
    /// Smallest `n` whose line passes within the membership tolerance.
    pub near_line: Option<usize>,
    /// Step at which iteration actually divides by (near) zero, within the horizon.
    pub hit: Option<usize>,
}

impl ForbiddenCheck {
    /// A line is close and the orbit really breaks down no later than that step.
    pub fn confirmed(&self) -> Option<usize> {
        match (self.near_line, self.hit) {
            (Some(n), Some(h)) if h <= n => Some(h),
            _ => None,
        }
    }
}

/// Distance test against the lines up to `horizon`, cross-checked by iteration.
///
/// Orbits that approach `y = 0` only asymptotically come arbitrarily close to
/// lines of large index without ever failing; the iteration tells them apart.
pub fn check_initial(
    p: &Params,
    z0: &Point,
    horizon: usize,
    membership: f64,
    divide: f64,
) -> ForbiddenCheck {
    let near_line = is_forbidden(p, z0, horizon, membership);
    let hit = match near_line {
        Some(n) => match iterate(p, *z0, n, divide).status {
            OrbitStatus::HitForbidden { step } => Some(step),
            _ => None,
        },
        None => None,
    };
    ForbiddenCheck { near_line, hit }
}

/// The line of step `n` alone (no deduplication), if it exists.
pub fn line_at(p: &Params, n: usize) -> Option<LineEq> {
    if n == 0 {
        return None;
    }
    coeff_iter(p)
        .nth(n - 1)
        .and_then(|pc| line_for_step(p, &pc).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::validate_params;

    fn worked() -> Params {
        validate_params(1.0, 3.0, -4.0, -10.0).unwrap()
    }

    #[test]
    fn first_line_is_y_zero() {
        for p in [worked(), validate_params(2.0, -1.0, 0.5, 3.0).unwrap()] {
            let f = forbidden_lines(&p, 5);
            assert_eq!(f.lines[0].witness_n, 1);
            assert_eq!(f.lines[0].eq, LineEq::new(0.0, 1.0, 0.0));
        }
    }

    #[test]
    fn beta2_zero_reduces_to_one_line() {
        let p = validate_params(1.0, 2.0, 3.0, 0.0).unwrap();
        let f = forbidden_lines(&p, 64);
        assert_eq!(f.lines.len(), 1);
        assert_eq!(f.lines[0].eq, LineEq::new(0.0, 1.0, 0.0));
        assert!(f.skipped.iter().all(|s| s.reason == SkipReason::Empty));
    }

    #[test]
    fn second_line_of_worked_system() {
        let l = line_at(&worked(), 2).unwrap();
        // beta2 x0 + alpha2 = 0  =>  x0 = -2/5
        assert!(l.same_as(&LineEq::new(-10.0, 0.0, -4.0), 1e-14));
        let z0 = Point::new(-0.4, 7.0);
        assert_eq!(is_forbidden(&worked(), &z0, 64, 1e-9), Some(2));
        let o = iterate(&worked(), z0, 10, 1e-12);
        assert_eq!(o.status, OrbitStatus::HitForbidden { step: 2 });
    }

    #[test]
    fn membership_examples() {
        assert_eq!(
            is_forbidden(&worked(), &Point::new(3.3, 0.0), 64, 1e-9),
            Some(1)
        );
        assert_eq!(
            is_forbidden(&worked(), &Point::new(-11.0 / 20.0, 1.5), 50, 1e-9),
            None
        );
    }

    #[test]
    fn asymptotic_near_miss_is_not_confirmed() {
        // the orbit of the worked example approaches y = 0 along n = 2 mod 4
        let z0 = Point::new(-11.0 / 20.0, 1.5);
        let c = check_initial(&worked(), &z0, 64, 1e-9, 1e-12);
        assert_eq!(c.near_line, Some(55));
        assert_eq!(c.confirmed(), None);
        let c = check_initial(&worked(), &Point::new(-0.4, 7.0), 64, 1e-9, 1e-12);
        assert_eq!(c.confirmed(), Some(2));
    }

    #[test]
    fn worked_system_dedup_count() {
        let f = forbidden_lines(&worked(), 8);
        assert!(f.lines.len() <= 8);
        let ns: Vec<usize> = f.lines.iter().map(|l| l.witness_n).collect();
        let mut sorted = ns.clone();
        sorted.sort();
        assert_eq!(ns, sorted);
    }

    #[test]
    fn long_horizons_stay_finite() {
        let p = validate_params(1.0, 5.0, 3.0, 2.0).unwrap();
        let f = forbidden_lines(&p, 2000);
        assert!(f
            .lines
            .iter()
            .all(|l| l.eq.a.is_finite() && l.eq.b.is_finite() && l.eq.c.is_finite()));
        assert!(line_at(&p, 1500).is_some());
    }

    #[test]
    fn globally_periodic_lines_repeat() {
        // alpha2 = beta1 = 0: A^3 = alpha1 beta2 I so lines repeat with period 3
        let p = validate_params(2.0, 0.0, 0.0, 1.0).unwrap();
        let f = forbidden_lines(&p, 30);
        assert_eq!(f.lines.len(), 2);
        // A^{3k} is a multiple of I: no line at those steps
        assert_eq!(f.skipped.len(), 10);
        assert!(f.skipped.iter().all(|s| s.n % 3 == 0));
    }
}
