//! Closed-form solutions.
//!
//! For `beta2 = 0` the `y` equation decouples and `x` solves a linear equation with
//! 2-periodic coefficients. For `beta2 != 0` every orbit is a ratio of terms of one
//! third-order linear recurrence (see [`VSequence`]).

mod complex;
mod vseq;

pub use complex::{complex_constants, conic_of, line_l, sigma_tau, ComplexConstants, Conic, LineL};
pub use vseq::{v_sequence, VSequence};

use crate::error::{Error, Result};
use crate::system::{divide_threshold, Params, Point};

/// `x_n = v(n+1) / (beta2 v(n-1)) - alpha2 / beta2`, `y_n = v(n) / v(n-1)`.
///
/// Fails with [`Error::ForbiddenOrbit`] when some `v(k)`, `0 <= k < n`, vanishes up to
/// `tol` relative to the terms that produced it.
pub fn solve_beta2_nonzero(p: &Params, z0: &Point, n: usize, tol: f64) -> Result<Point> {
    if p.beta2 == 0.0 {
        return Err(Error::NotApplicable(
            "solve_beta2_nonzero needs beta2 != 0".into(),
        ));
    }
    v_sequence(p, z0, n + 1).point(n, tol)
}

/// `sum_{k=0}^{m-1} r^k` for `r = 1 + d`, accurate for `d` near zero.
fn geometric_sum(d: f64, m: usize) -> f64 {
    if d == 0.0 {
        m as f64
    } else if d.abs() < 0.5 {
        (m as f64 * d.ln_1p()).exp_m1() / d
    } else {
        let r = 1.0 + d;
        (r.powi(m as i32) - 1.0) / d
    }
}

/// Explicit solution for `beta2 = 0` (`beta1 alpha2 != 0`).
///
/// `y` alternates between `y0` and `alpha2 / y0`; on even steps `x` follows
/// `x_{n+2} = r x_n + c` with `r = beta1^2 / alpha2` and
/// `c = alpha1 (beta1 + y0) / alpha2`, so `x_{2m} = r^m x0 + c (1 + r + ... + r^{m-1})`.
/// The case `alpha2 = beta1^2` (`r = 1`) gives `x_{2m} = x0 + c m`.
/// Odd steps are one application of the `x` equation to the preceding even step.
pub fn solve_beta2_zero(p: &Params, z0: &Point, n: usize) -> Result<Point> {
    if p.beta2 != 0.0 {
        return Err(Error::NotApplicable(
            "solve_beta2_zero needs beta2 = 0".into(),
        ));
    }
    if z0.y.abs() <= divide_threshold(p, z0, 1e-12) {
        return Err(Error::ForbiddenOrbit { index: 0 });
    }
    let (b1, a1, a2) = (p.beta1, p.alpha1, p.alpha2);
    let (x0, y0) = (z0.x, z0.y);
    let m = n / 2;
    let c = a1 * (b1 + y0) / a2;
    let x_even = if a2 == b1 * b1 {
        x0 + c * m as f64
    } else {
        // r - 1 = (beta1^2 - alpha2) / alpha2, formed without cancellation
        let d = b1.mul_add(b1, -a2) / a2;
        let r = b1 * b1 / a2;
        r.powi(m as i32) * x0 + c * geometric_sum(d, m)
    };
    if n.is_multiple_of(2) {
        Ok(Point::new(x_even, y0))
    } else {
        Ok(Point::new((a1 + b1 * x_even) / y0, a2 / y0))
    }
}

/// Closed-form `n`-th iterate, dispatching exactly on `beta2 = 0`.
pub fn solve(p: &Params, z0: &Point, n: usize, tol: f64) -> Result<Point> {
    if p.beta2 == 0.0 {
        solve_beta2_zero(p, z0, n)
    } else {
        solve_beta2_nonzero(p, z0, n, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{iterate, step, validate_params};

    fn worked() -> Params {
        validate_params(1.0, 3.0, -4.0, -10.0).unwrap()
    }

    #[test]
    fn v_sequence_initial_terms() {
        let v = v_sequence(&worked(), &Point::new(-11.0 / 20.0, 1.5), 5);
        assert_eq!(v.last_index(), 5);
        assert_eq!(v.get(-1), 1.0);
        assert_eq!(v.get(0), 1.5);
        assert!((v.get(1) - 1.5).abs() < 1e-15);
        for k in -1..=2 {
            let lhs = v.get(k + 3);
            let rhs = 3.0 * v.get(k + 2) - 4.0 * v.get(k + 1) + 2.0 * v.get(k);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn v_sequence_triple_root_is_quadratic_times_power() {
        // (x - 1)^3: beta1 = 3, alpha2 = -3, alpha1 beta2 = -8
        let p = validate_params(8.0, 3.0, -3.0, -1.0).unwrap();
        let v = v_sequence(&p, &Point::new(0.7, -0.3), 20);
        // v(n) / 1^(n+1) must have vanishing third differences
        let w: Vec<f64> = (-1..=20).map(|k| v.get(k)).collect();
        let scale = w.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        for i in 0..w.len() - 3 {
            let d3 = w[i + 3] - 3.0 * w[i + 2] + 3.0 * w[i + 1] - w[i];
            assert!(d3.abs() < 1e-8 * scale, "{d3}");
        }
    }

    #[test]
    fn v_sequence_on_eigen_direction_is_geometric() {
        // fixed point associated to lambda = 1 of the worked system
        let v = v_sequence(&worked(), &Point::new(-0.5, 1.0), 30);
        for n in 0..=30 {
            assert!((v.ratio(n, n - 1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn v_sequence_survives_overflow() {
        let p = validate_params(1.0, 30.0, 2.0, 1.0).unwrap();
        let z0 = Point::new(0.3, 0.9);
        let v = v_sequence(&p, &z0, 400);
        assert!(v.ratio(400, 399).is_finite());
        let direct = iterate(&p, z0, 400, 1e-12);
        let cf = v.point(399, 1e-12).unwrap();
        let it = direct.points[399];
        assert!((cf.y - it.y).abs() <= 1e-8 * it.y.abs());
    }

    #[test]
    fn closed_form_matches_step() {
        let z = solve_beta2_nonzero(&worked(), &Point::new(-11.0 / 20.0, 1.5), 1, 1e-12).unwrap();
        assert!((z.x + 13.0 / 30.0).abs() < 1e-14);
        assert!((z.y - 1.0).abs() < 1e-14);
        for n in 0..20 {
            let z = solve_beta2_nonzero(&worked(), &Point::new(-0.5, 1.0), n, 1e-12).unwrap();
            assert!(z.max_dist(&Point::new(-0.5, 1.0)) < 1e-12);
        }
    }

    #[test]
    fn closed_form_reports_forbidden() {
        // y1 = 0 for x0 = -2/5, so v(1) = 0
        let e = solve_beta2_nonzero(&worked(), &Point::new(-0.4, 7.0), 3, 1e-12).unwrap_err();
        assert_eq!(e, Error::ForbiddenOrbit { index: 1 });
    }

    #[test]
    fn beta2_zero_globally_two_periodic() {
        let p = validate_params(0.0, 2.0, 4.0, 0.0).unwrap();
        let z0 = Point::new(5.0, 1.0);
        for n in 0..10 {
            let z = solve_beta2_zero(&p, &z0, n).unwrap();
            let expect = if n % 2 == 0 {
                z0
            } else {
                Point::new(10.0, 4.0)
            };
            assert_eq!(z, expect);
        }
    }

    #[test]
    fn beta2_zero_four_cycle() {
        let p = validate_params(1.0, 1.0, -1.0, 0.0).unwrap();
        let (x0, y0) = (0.3, 1.7);
        let z = solve_beta2_zero(&p, &Point::new(x0, y0), 2).unwrap();
        assert!(z.max_dist(&Point::new(-x0 - (1.0 + y0), y0)) < 1e-15);
        let z4 = solve_beta2_zero(&p, &Point::new(x0, y0), 4).unwrap();
        assert!(z4.max_dist(&Point::new(x0, y0)) < 1e-15);
    }

    #[test]
    fn beta2_zero_period_two_line() {
        let p = validate_params(1.5, 0.5, 3.0, 0.0).unwrap();
        let y0 = 0.8;
        let x0 = p.alpha1 * (p.beta1 + y0) / (p.alpha2 - p.beta1 * p.beta1);
        for n in (0..12).step_by(2) {
            let z = solve_beta2_zero(&p, &Point::new(x0, y0), n).unwrap();
            assert!((z.x - x0).abs() < 1e-13);
        }
    }

    #[test]
    fn beta2_zero_unit_ratio_case_matches_iteration() {
        // alpha2 = beta1^2 with alpha1 != 0: x grows linearly on even steps
        let p = validate_params(1.0, 1.0, 1.0, 0.0).unwrap();
        let z0 = Point::new(0.0, 1.0);
        let o = iterate(&p, z0, 9, 1e-12);
        for n in 0..=9 {
            let z = solve_beta2_zero(&p, &z0, n).unwrap();
            assert!(
                z.max_dist(&o.points[n]) < 1e-13,
                "n={n}: {z:?} vs {:?}",
                o.points[n]
            );
        }
        assert_eq!(solve_beta2_zero(&p, &z0, 2).unwrap().x, 2.0);
    }

    #[test]
    fn dispatch() {
        let p = validate_params(1.0, 2.0, 3.0, 0.0).unwrap();
        let z0 = Point::new(0.1, 0.2);
        let a = solve(&p, &z0, 1, 1e-12).unwrap();
        let b = step(&p, &z0, 1e-12).unwrap();
        assert!(a.max_dist(&b) < 1e-14);
        assert!(solve_beta2_zero(&worked(), &z0, 1).is_err());
        assert!(solve_beta2_nonzero(&p, &z0, 1, 1e-12).is_err());
    }
}
