use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::solve3;
use crate::spectrum::{ModulusOrder, RegimeTag, Spectrum};
use crate::system::{LineEq, Params, Point};

/// Constants of the representation `v(n) = k lambda^n (P + sigma_n)` when the
/// spectrum is `{lambda, rho e^{±i theta}}`.
///
/// Normalized so that `P >= 0` and `a` lies in `[0, 2 pi)`. At the fixed point of
/// `lambda` the oscillating part vanishes; this is encoded as `P = inf`, `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexConstants {
    #[serde(rename = "P")]
    pub p: f64,
    pub a: f64,
    pub k: f64,
    pub lambda: f64,
    pub rho: f64,
    pub theta: f64,
    /// The raw solution had `P < 0`; `(P, a)` were replaced by `(-P, a + pi)`.
    pub flipped: bool,
}

impl ComplexConstants {
    pub fn at_fixed_point(&self) -> bool {
        self.p.is_infinite()
    }

    /// `P + sigma_n`, up to the common factor removed by the sign normalization.
    fn weight(&self, n: i64) -> f64 {
        self.p + sigma_tau(self, n).0
    }

    /// `z_n` from the trigonometric representation.
    pub fn point(&self, params: &Params, n: i64) -> Point {
        if self.at_fixed_point() {
            return params.fixed_point_for(self.lambda);
        }
        let (w_prev, w, w_next) = (self.weight(n - 1), self.weight(n), self.weight(n + 1));
        let l = self.lambda;
        Point::new(
            (l * l * w_next / w_prev - params.alpha2) / params.beta2,
            l * w / w_prev,
        )
    }
}

/// `(sigma_n, tau_n) = 2 (rho / lambda)^n (cos(a + n theta), sin(a + n theta))`.
pub fn sigma_tau(c: &ComplexConstants, n: i64) -> (f64, f64) {
    let r = (c.rho / c.lambda).powi(n as i32) * 2.0;
    let phase = c.a + n as f64 * c.theta;
    (r * phase.cos(), r * phase.sin())
}

fn complex_parts(s: &Spectrum) -> Result<(f64, f64, f64)> {
    match (s.dominant_real(), s.complex_pair) {
        (Some(r), Some(c)) => Ok((r.value, c.rho, c.theta)),
        _ => Err(Error::NotApplicable("spectrum has no complex pair".into())),
    }
}

/// Solves for `(P, a, k)` from `z0`; requires `beta2 != 0` and a complex pair.
pub fn complex_constants(p: &Params, s: &Spectrum, z0: &Point) -> Result<ComplexConstants> {
    if p.beta2 == 0.0 {
        return Err(Error::NotApplicable(
            "complex constants need beta2 != 0".into(),
        ));
    }
    let (lambda, rho, theta) = complex_parts(s)?;
    let (ct, st) = (theta.cos(), theta.sin());
    // unknowns (Q, C, S) = (kP, k cos a, k sin a); rows are v(1), v(0), v(-1)
    let m = [
        [lambda, 2.0 * rho * ct, -2.0 * rho * st],
        [1.0, 2.0, 0.0],
        [1.0 / lambda, 2.0 * ct / rho, 2.0 * st / rho],
    ];
    let rhs = [p.beta2.mul_add(z0.x, p.alpha2), z0.y, 1.0];
    let [q, c, sn] = solve3(m, rhs, 1e-13).ok_or(Error::SingularSystem)?;
    let k = c.hypot(sn);
    let scale = q.abs().max(z0.y.abs()).max(1.0);
    if k <= 1e-14 * scale {
        return Ok(ComplexConstants {
            p: f64::INFINITY,
            a: 0.0,
            k: 0.0,
            lambda,
            rho,
            theta,
            flipped: false,
        });
    }
    let mut big_p = q / k;
    let mut a = sn.atan2(c);
    let flipped = big_p < 0.0;
    if flipped {
        big_p = -big_p;
        a += PI;
    }
    Ok(ComplexConstants {
        p: big_p,
        a: a.rem_euclid(TAU),
        k,
        lambda,
        rho,
        theta,
        flipped,
    })
}

/// The invariant line `L` of a real eigenvalue `lambda` together with its parallel
/// through the fixed point `((lambda^2 - alpha2) / beta2, lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineL {
    pub lambda: f64,
    /// `beta2 x - (beta1 - lambda) y - (beta1 - lambda) lambda = 0`, normalized.
    pub line: LineEq,
    pub parallel: LineEq,
    pub fixed_point: Point,
}

pub fn line_l(p: &Params, lambda: f64) -> Result<LineL> {
    if p.beta2 == 0.0 {
        return Err(Error::NotApplicable("line L needs beta2 != 0".into()));
    }
    let d = p.beta1 - lambda;
    let line = LineEq::new(p.beta2, -d, -d * lambda)
        .normalized()
        .expect("beta2 != 0");
    let fixed_point = p.fixed_point_for(lambda);
    Ok(LineL {
        lambda,
        line,
        parallel: line.parallel_through(&fixed_point),
        fixed_point,
    })
}

/// The invariant conic through `z0` when `|lambda| = rho`.
///
/// In the affine coordinates `(xb, yb)` it reads `xb^2 + yb^2 = (2/P)^2 (xb - rho lambda)^2`:
/// focus at the origin (the fixed point), directrix `xb = rho lambda`, eccentricity `2/P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    #[serde(rename = "P")]
    pub p: f64,
    pub eccentricity: f64,
    /// `rho lambda`, the directrix abscissa.
    pub directrix: f64,
    pub lambda: f64,
    pub rho: f64,
    pub theta: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub fixed_point: Point,
}

pub fn conic_of(p: &Params, s: &Spectrum, z0: &Point) -> Result<Conic> {
    if s.regime != RegimeTag::ComplexPair(ModulusOrder::Equal) {
        return Err(Error::NotApplicable(
            "invariant conics need |lambda| = rho".into(),
        ));
    }
    let c = complex_constants(p, s, z0)?;
    if c.at_fixed_point() {
        return Err(Error::NotApplicable("z0 is the fixed point".into()));
    }
    if c.p <= 1e-12 {
        return Err(Error::NotApplicable("z0 lies on the line L".into()));
    }
    let d = c.lambda * c.theta.cos() - c.rho;
    if d.abs() <= 1e-12 * c.rho.max(1.0) {
        return Err(Error::NotApplicable("lambda cos(theta) = rho".into()));
    }
    Ok(Conic {
        p: c.p,
        eccentricity: 2.0 / c.p,
        directrix: c.rho * c.lambda,
        lambda: c.lambda,
        rho: c.rho,
        theta: c.theta,
        alpha2: p.alpha2,
        beta2: p.beta2,
        fixed_point: p.fixed_point_for(c.lambda),
    })
}

impl Conic {
    fn d(&self) -> f64 {
        self.lambda * self.theta.cos() - self.rho
    }

    /// Original coordinates to `(xb, yb)`.
    pub fn to_bar(&self, z: &Point) -> (f64, f64) {
        let (ct, st) = (self.theta.cos(), self.theta.sin());
        let d = self.d();
        let u = self.beta2 * z.x + self.alpha2 - self.rho * self.rho;
        let w = z.y - self.lambda;
        (
            u * self.lambda / (2.0 * d) - w * self.rho * self.lambda * ct / d,
            u / (2.0 * st) - w * (self.lambda + self.rho * ct) / st,
        )
    }

    pub fn from_bar(&self, xb: f64, yb: f64) -> Point {
        let (ct, st) = (self.theta.cos(), self.theta.sin());
        let d = self.d();
        let m = [
            [self.lambda / (2.0 * d), -self.rho * self.lambda * ct / d],
            [1.0 / (2.0 * st), -(self.lambda + self.rho * ct) / st],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let u = (xb * m[1][1] - yb * m[0][1]) / det;
        let w = (m[0][0] * yb - m[1][0] * xb) / det;
        Point::new(
            (u - self.alpha2 + self.rho * self.rho) / self.beta2,
            w + self.lambda,
        )
    }

    /// `(xb^2 + yb^2 - e^2 (xb - d0)^2)` relative to the size of its terms.
    pub fn residual(&self, z: &Point) -> f64 {
        let (xb, yb) = self.to_bar(z);
        let lhs = xb * xb + yb * yb;
        let rhs = (self.eccentricity * (xb - self.directrix)).powi(2);
        (lhs - rhs) / (lhs + rhs).max(1.0)
    }

    /// Polylines sampling the conic in original coordinates, cut where the polar
    /// radius exceeds `r_max`. Ellipses give one closed loop, hyperbolas two branches.
    pub fn polylines(&self, samples: usize, r_max: f64) -> Vec<Vec<Point>> {
        let e = self.eccentricity;
        let d0 = self.directrix;
        let mut out = Vec::new();
        for sign in [1.0, -1.0] {
            // sign = 1: r = e d0 / (1 + e cos phi); sign = -1: r = e d0 / (e cos phi - 1)
            let mut cur: Vec<Point> = Vec::new();
            for i in 0..=samples {
                let phi = TAU * i as f64 / samples as f64;
                let den = if sign > 0.0 {
                    1.0 + e * phi.cos()
                } else {
                    e * phi.cos() - 1.0
                };
                let r = e * d0 / den;
                if r.is_finite() && r > 0.0 && r <= r_max {
                    cur.push(self.from_bar(r * phi.cos(), r * phi.sin()));
                } else if cur.len() > 1 {
                    out.push(std::mem::take(&mut cur));
                } else {
                    cur.clear();
                }
            }
            if cur.len() > 1 {
                out.push(cur);
            }
        }
        out
    }
}
