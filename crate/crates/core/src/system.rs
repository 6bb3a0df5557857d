//! The map itself: parameters, points, direct iteration and the companion matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four coefficients `(alpha1, beta1, alpha2, beta2)`.
///
/// Values obtained through [`validate_params`] are finite and satisfy
/// `alpha1 * beta2 != alpha2 * beta1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

impl Params {
    /// `det A = beta2*alpha1 - beta1*alpha2`, rounded once.
    pub fn det(&self) -> f64 {
        self.beta2.mul_add(self.alpha1, -(self.beta1 * self.alpha2))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha1, self.beta1, self.alpha2, self.beta2]
    }

    /// Fixed point associated to a real eigenvalue when `beta2 != 0`.
    ///
    /// `x = (lambda^2 - alpha2) / beta2 = alpha1 / (lambda - beta1)`; the form less
    /// sensitive to an error in `lambda` is used.
    pub fn fixed_point_for(&self, lambda: f64) -> Point {
        let gap = lambda - self.beta1;
        let sens_quadratic = 2.0 * lambda.abs() / self.beta2.abs();
        let sens_linear = self.alpha1.abs() / (gap * gap);
        let x = if gap != 0.0 && sens_linear < sens_quadratic {
            self.alpha1 / gap
        } else {
            lambda.mul_add(lambda, -self.alpha2) / self.beta2
        };
        Point::new(x, lambda)
    }
}

/// Checks finiteness and rejects the Riccati-degenerate case.
///
/// The degeneracy test is an exact comparison of `alpha1*beta2` and `alpha2*beta1`
/// as computed in floating point; nearby systems are accepted.
pub fn validate_params(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> Result<Params> {
    for (name, value) in [
        ("alpha1", alpha1),
        ("beta1", beta1),
        ("alpha2", alpha2),
        ("beta2", beta2),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFinite { name, value });
        }
    }
    let lhs = alpha1 * beta2;
    let rhs = alpha2 * beta1;
    if lhs == rhs {
        return Err(Error::DegenerateRiccati { lhs, rhs });
    }
    Ok(Params {
        alpha1,
        beta1,
        alpha2,
        beta2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn max_dist(&self, other: &Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm_inf(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Straight line `a x + b y + c = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineEq {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineEq {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        LineEq { a, b, c }
    }

    /// Scales so that `max(|a|, |b|) = 1` and the larger of the two is positive
    /// (`a` wins ties). Returns `None` when `a = b = 0`.
    pub fn normalized(&self) -> Option<LineEq> {
        let m = self.a.abs().max(self.b.abs());
        if m == 0.0 || !m.is_finite() {
            return None;
        }
        let lead = if self.a.abs() >= self.b.abs() {
            self.a
        } else {
            self.b
        };
        let s = lead.signum() / m;
        Some(LineEq::new(self.a * s, self.b * s, self.c * s))
    }

    pub fn residual(&self, p: &Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    /// Euclidean distance from `p` to the line.
    pub fn distance(&self, p: &Point) -> f64 {
        self.residual(p).abs() / self.a.hypot(self.b)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Parallel line through `p`.
    pub fn parallel_through(&self, p: &Point) -> LineEq {
        LineEq::new(self.a, self.b, -(self.a * p.x + self.b * p.y))
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn project(&self, p: &Point) -> Point {
        let n2 = self.a * self.a + self.b * self.b;
        let r = self.residual(p) / n2;
        Point::new(p.x - r * self.a, p.y - r * self.b)
    }

    /// Unit direction vector.
    pub fn direction(&self) -> (f64, f64) {
        let n = self.a.hypot(self.b);
        (-self.b / n, self.a / n)
    }

    /// True when both equations describe the same line up to `tol` on normalized coefficients.
    pub fn same_as(&self, other: &LineEq, tol: f64) -> bool {
        match (self.normalized(), other.normalized()) {
            (Some(u), Some(v)) => {
                (u.a - v.a).abs() <= tol
                    && (u.b - v.b).abs() <= tol
                    && (u.c - v.c).abs() <= tol * u.c.abs().max(v.c.abs()).max(1.0)
            }
            _ => false,
        }
    }
}

/// Threshold used by [`step`]: `tol * max(1, |alpha2| + |beta2 x|)`.
pub fn divide_threshold(p: &Params, z: &Point, tol: f64) -> f64 {
    tol * (p.alpha2.abs() + (p.beta2 * z.x).abs()).max(1.0)
}

/// One application of the map.
pub fn step(p: &Params, z: &Point, tol: f64) -> Result<Point> {
    if z.y.abs() <= divide_threshold(p, z, tol) {
        return Err(Error::DivisionByZero { y: z.y });
    }
    Ok(Point::new(
        (p.alpha1 + p.beta1 * z.x) / z.y,
        (p.alpha2 + p.beta2 * z.x) / z.y,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitStatus {
    /// All requested steps were taken.
    Complete { horizon: usize },
    /// Applying the map for the `step`-th time would divide by (near) zero.
    /// The orbit holds `z_0 .. z_{step-1}` and the last point has `|y| <= tol`.
    HitForbidden { step: usize },
    /// The `step`-th iterate overflowed to a non-finite value; it is not stored.
    Diverged { step: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub start: Point,
    pub points: Vec<Point>,
    pub status: OrbitStatus,
}

impl Orbit {
    pub fn is_complete(&self) -> bool {
        matches!(self.status, OrbitStatus::Complete { .. })
    }

    pub fn last(&self) -> &Point {
        self.points
            .last()
            .expect("orbit always holds its start point")
    }
}

/// Iterates up to `n` times, folding division failures into the orbit status.
pub fn iterate(p: &Params, z0: Point, n: usize, tol: f64) -> Orbit {
    let mut points = Vec::with_capacity(n + 1);
    points.push(z0);
    let mut z = z0;
    let mut status = OrbitStatus::Complete { horizon: n };
    for k in 1..=n {
        match step(p, &z, tol) {
            Ok(next) if next.is_finite() => {
                points.push(next);
                z = next;
            }
            Ok(_) => {
                status = OrbitStatus::Diverged { step: k };
                break;
            }
            Err(_) => {
                status = OrbitStatus::HitForbidden { step: k };
                break;
            }
        }
    }
    Orbit {
        start: z0,
        points,
        status,
    }
}

/// `A = [[beta1, 0, alpha1], [beta2, 0, alpha2], [0, 1, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanionMatrix(pub [[f64; 3]; 3]);

pub fn matrix(p: &Params) -> CompanionMatrix {
    CompanionMatrix([
        [p.beta1, 0.0, p.alpha1],
        [p.beta2, 0.0, p.alpha2],
        [0.0, 1.0, 0.0],
    ])
}

impl CompanionMatrix {
    pub fn identity() -> Self {
        CompanionMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul(&self, other: &CompanionMatrix) -> CompanionMatrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        CompanionMatrix(out)
    }

    /// `A^n` by repeated multiplication.
    pub fn pow(&self, n: usize) -> CompanionMatrix {
        (0..n).fold(CompanionMatrix::identity(), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, s: f64) -> CompanionMatrix {
        CompanionMatrix(self.0.map(|r| r.map(|v| v * s)))
    }

    pub fn add(&self, other: &CompanionMatrix) -> CompanionMatrix {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += other.0[i][j];
            }
        }
        CompanionMatrix(out)
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// `q(u, v, w) = (u / w, v / w)`; `None` when `w = 0`.
pub fn project(v: [f64; 3]) -> Option<Point> {
    if v[2] == 0.0 {
        None
    } else {
        Some(Point::new(v[0] / v[2], v[1] / v[2]))
    }
}

/// `q ∘ A^n (x0, y0, 1)`, the `n`-th iterate computed through the linear lift.
pub fn linear_lift(p: &Params, z0: &Point, n: usize) -> Option<Point> {
    let a = matrix(p);
    let mut v = [z0.x, z0.y, 1.0];
    for _ in 0..n {
        v = a.apply(v);
        let m = v[0].abs().max(v[1].abs()).max(v[2].abs());
        if m > 1e200 {
            v = v.map(|c| c / m);
        }
    }
    project(v)
}
