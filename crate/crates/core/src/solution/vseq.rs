use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{dot, exponent, ldexp};
use crate::system::{divide_threshold, Params, Point};

/// Solution of `v(k+3) = beta1 v(k+2) + alpha2 v(k+1) - (beta1 alpha2 - beta2 alpha1) v(k)`
/// with `v(-1) = 1`, `v(0) = y0`, `v(1) = beta2 x0 + alpha2`.
///
/// Entries are stored as `value * 2^exp`: whenever the working window leaves
/// `[1e-300, 1e300]` it is rescaled by an exact power of two, so ratios of entries
/// stay correct far beyond the range of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VSequence {
    pub params: Params,
    values: Vec<f64>,
    exps: Vec<i32>,
    /// Size of the terms that produced each entry, in the entry's own scale.
    scales: Vec<f64>,
}

const HI: f64 = 1e300;
const LO: f64 = 1e-300;

pub fn v_sequence(p: &Params, z0: &Point, n: usize) -> VSequence {
    let coef = [
        p.beta1,
        p.alpha2,
        -p.beta1.mul_add(p.alpha2, -(p.beta2 * p.alpha1)),
    ];
    let v1 = p.beta2.mul_add(z0.x, p.alpha2);
    let mut values = vec![1.0, z0.y, v1];
    let mut exps = vec![0, 0, 0];
    let mut scales = vec![
        1.0,
        divide_threshold(p, z0, 1.0),
        (p.beta2 * z0.x).abs() + p.alpha2.abs(),
    ];
    values.truncate(n + 2);
    exps.truncate(n + 2);
    scales.truncate(n + 2);

    let mut window = [1.0, z0.y, v1];
    let mut e = 0i32;
    for _ in 2..=n {
        let next = dot(&coef, &[window[2], window[1], window[0]]);
        let mag =
            (coef[0] * window[2]).abs() + (coef[1] * window[1]).abs() + (coef[2] * window[0]).abs();
        window = [window[1], window[2], next];
        values.push(next);
        exps.push(e);
        scales.push(mag);
        let m = window.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > HI || (m < LO && m > 0.0) {
            let shift = exponent(m);
            window = window.map(|v| ldexp(v, -shift));
            e += shift;
        }
    }
    VSequence {
        params: *p,
        values,
        exps,
        scales,
    }
}

impl VSequence {
    /// Largest index `n` with `v(n)` available.
    pub fn last_index(&self) -> i64 {
        self.values.len() as i64 - 2
    }

    fn slot(&self, k: i64) -> usize {
        assert!(k >= -1 && k <= self.last_index(), "index {k} out of range");
        (k + 1) as usize
    }

    /// `v(k)` as `(mantissa, exponent)` with `v(k) = mantissa * 2^exponent`.
    pub fn scaled(&self, k: i64) -> (f64, i32) {
        let i = self.slot(k);
        (self.values[i], self.exps[i])
    }

    /// `v(k)` as a plain float (may overflow to infinity).
    pub fn get(&self, k: i64) -> f64 {
        let (m, e) = self.scaled(k);
        ldexp(m, e)
    }

    /// `v(a) / v(b)`.
    pub fn ratio(&self, a: i64, b: i64) -> f64 {
        let (ma, ea) = self.scaled(a);
        let (mb, eb) = self.scaled(b);
        ldexp(ma / mb, ea - eb)
    }

    /// True when `v(k)` is zero up to cancellation in the recurrence.
    pub fn near_zero(&self, k: i64, tol: f64) -> bool {
        let i = self.slot(k);
        self.values[i].abs() <= tol * self.scales[i]
    }

    /// `(x_n, y_n)` from the v-representation; requires `beta2 != 0` and `n + 1 <= last_index`.
    pub fn point(&self, n: usize, tol: f64) -> Result<Point> {
        let p = &self.params;
        if p.beta2 == 0.0 {
            return Err(Error::NotApplicable(
                "v-representation needs beta2 != 0".into(),
            ));
        }
        let n = n as i64;
        for k in 0..n {
            if self.near_zero(k, tol) {
                return Err(Error::ForbiddenOrbit { index: k });
            }
        }
        let x = self.ratio(n + 1, n - 1) / p.beta2 - p.alpha2 / p.beta2;
        let y = self.ratio(n, n - 1);
        Ok(Point::new(x, y))
    }
}
