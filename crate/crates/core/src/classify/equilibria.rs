use serde::{Deserialize, Serialize};

use crate::spectrum::Spectrum;
use crate::system::{LineEq, Params, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    AsymptoticallyStable,
    StableNotAsymptotic,
    Unstable,
    /// Attracts an open set but is not Lyapunov stable.
    AttractingUnstable,
}

impl StabilityKind {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityKind::AsymptoticallyStable => "asymptotically_stable",
            StabilityKind::StableNotAsymptotic => "stable_not_asymptotic",
            StabilityKind::Unstable => "unstable",
            StabilityKind::AttractingUnstable => "attracting_unstable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub kind: StabilityKind,
    /// Moduli of the Jacobian eigenvalues at the equilibrium, larger first.
    pub jacobian_eigen_moduli: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: Point,
    pub associated_lambda: f64,
    pub multiplicity: u8,
    pub stability: StabilityVerdict,
}

/// The line `y = beta1` of fixed points that appears when `beta2 = alpha1 = 0`, `alpha2 = beta1^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumLine {
    pub line: LineEq,
    pub associated_lambda: f64,
    pub stability: StabilityKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub points: Vec<Equilibrium>,
    pub line: Option<EquilibriumLine>,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.line.is_none()
    }

    /// The equilibrium within `tol` (max-norm, relative to `max(1, |z|)`) of `z`, if any.
    pub fn near(&self, z: &Point, tol: f64) -> Option<&Equilibrium> {
        self.points
            .iter()
            .find(|e| e.point.max_dist(z) <= tol * e.point.norm_inf().max(1.0))
    }

    pub fn for_lambda(&self, lambda: f64, tol: f64) -> Option<&Equilibrium> {
        self.points
            .iter()
            .find(|e| (e.associated_lambda - lambda).abs() <= tol * lambda.abs().max(1.0))
    }
}

/// Eigenvalues `(re, im)` of the Jacobian `[[b1/y, -x/y], [b2/y, -1]]` at `z`.
pub fn jacobian_eigenvalues(p: &Params, z: &Point) -> [(f64, f64); 2] {
    let tr = p.beta1 / z.y - 1.0;
    let det = (-p.beta1 / z.y) + p.beta2 * z.x / (z.y * z.y);
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = 0.5 * (tr + r.copysign(tr));
        let small = if big != 0.0 { det / big } else { 0.0 };
        [(big, 0.0), (small, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [(0.5 * tr, im), (0.5 * tr, -im)]
    }
}

fn jacobian_moduli(p: &Params, z: &Point) -> [f64; 2] {
    let [a, b] = jacobian_eigenvalues(p, z);
    let (ma, mb) = (a.0.hypot(a.1), b.0.hypot(b.1));
    [ma.max(mb), ma.min(mb)]
}

fn general_kind(s: &Spectrum, lambda: f64) -> StabilityKind {
    let rho = s.spectral_radius;
    if lambda.abs() < rho - s.threshold() {
        return StabilityKind::Unstable;
    }
    // (multiplicity, count) of every eigenvalue on the spectral circle
    let mut on_circle: Vec<u8> = s
        .real_roots
        .iter()
        .filter(|r| s.same_modulus(r.value, rho))
        .map(|r| r.multiplicity)
        .collect();
    if let Some(c) = s.complex_pair {
        if s.same_modulus(c.rho, rho) {
            on_circle.extend([1, 1]);
        }
    }
    if on_circle.iter().all(|&m| m == 1) {
        if on_circle.len() == 1 {
            StabilityKind::AsymptoticallyStable
        } else {
            StabilityKind::StableNotAsymptotic
        }
    } else if s.multiplicity_of(lambda) > 1 {
        StabilityKind::AttractingUnstable
    } else {
        StabilityKind::Unstable
    }
}

fn unit_ratio_beta2_zero(p: &Params, tol: f64) -> bool {
    p.beta2 == 0.0 && super::cmp_tol(p.alpha2, p.beta1 * p.beta1, tol).is_eq()
}

/// Stability of the fixed point `z`, whose associated eigenvalue is `z.y`.
pub fn stability(p: &Params, s: &Spectrum, z: &Point) -> StabilityVerdict {
    let kind = if unit_ratio_beta2_zero(p, s.cluster_tol) {
        if p.alpha1 != 0.0 {
            StabilityKind::Unstable
        } else {
            StabilityKind::StableNotAsymptotic
        }
    } else {
        general_kind(s, z.y)
    };
    StabilityVerdict {
        kind,
        jacobian_eigen_moduli: jacobian_moduli(p, z),
    }
}

fn make(p: &Params, s: &Spectrum, point: Point) -> Equilibrium {
    Equilibrium {
        point,
        associated_lambda: point.y,
        multiplicity: s.multiplicity_of(point.y).max(1),
        stability: stability(p, s, &point),
    }
}

/// All fixed points. For `beta2 != 0` there is one per distinct real eigenvalue;
/// for `beta2 = 0` the second coordinate solves `y^2 = alpha2` and `x (y - beta1) = alpha1`.
pub fn equilibria(p: &Params, s: &Spectrum) -> EquilibriumSet {
    let mut points = Vec::new();
    let mut line = None;
    if p.beta2 != 0.0 {
        for r in &s.real_roots {
            if r.value != 0.0 {
                points.push(make(p, s, p.fixed_point_for(r.value)));
            }
        }
    } else if p.alpha2 > 0.0 {
        let root = p.alpha2.sqrt();
        for y in [root, -root] {
            if super::cmp_tol(y, p.beta1, s.cluster_tol).is_eq() {
                if p.alpha1 == 0.0 {
                    line = Some(EquilibriumLine {
                        line: LineEq::new(0.0, 1.0, -p.beta1),
                        associated_lambda: p.beta1,
                        stability: StabilityKind::StableNotAsymptotic,
                    });
                }
            } else {
                points.push(make(p, s, Point::new(p.alpha1 / (y - p.beta1), y)));
            }
        }
    }
    EquilibriumSet { points, line }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::spectrum;
    use crate::system::{step, validate_params};

    fn eq_of(a1: f64, b1: f64, a2: f64, b2: f64) -> (Params, Spectrum, EquilibriumSet) {
        let p = validate_params(a1, b1, a2, b2).unwrap();
        let s = spectrum(&p, 1e-8);
        let e = equilibria(&p, &s);
        (p, s, e)
    }

    #[test]
    fn worked_system_single_unstable_equilibrium() {
        let (_, _, e) = eq_of(1.0, 3.0, -4.0, -10.0);
        assert_eq!(e.len(), 1);
        let q = e.points[0];
        assert!(q.point.max_dist(&Point::new(-0.5, 1.0)) < 1e-14);
        assert_eq!(q.stability.kind, StabilityKind::Unstable);
        for m in q.stability.jacobian_eigen_moduli {
            assert!((m - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn beta2_zero_two_fixed_points() {
        let (a1, b1, a2) = (1.5, 0.5, 3.0);
        let (p, _, e) = eq_of(a1, b1, a2, 0.0);
        let r = a2.sqrt();
        assert_eq!(e.len(), 2);
        assert!(e.points[0].point.max_dist(&Point::new(a1 / (r - b1), r)) < 1e-14);
        assert!(e.points[1].point.max_dist(&Point::new(-a1 / (r + b1), -r)) < 1e-14);
        for q in &e.points {
            assert_eq!(q.stability.kind, StabilityKind::StableNotAsymptotic);
            assert!(step(&p, &q.point, 1e-12).unwrap().max_dist(&q.point) < 1e-12);
        }
    }

    #[test]
    fn beta2_zero_line_of_equilibria() {
        let (_, _, e) = eq_of(0.0, 2.0, 4.0, 0.0);
        assert_eq!(e.len(), 1);
        assert!(e.points[0].point.max_dist(&Point::new(0.0, -2.0)) < 1e-15);
        let l = e.line.unwrap();
        assert!(l.line.contains(&Point::new(123.0, 2.0), 1e-15));
    }

    #[test]
    fn beta2_zero_negative_alpha2_has_none() {
        let (_, _, e) = eq_of(1.0, 1.0, -1.0, 0.0);
        assert!(e.is_empty());
    }

    #[test]
    fn double_dominant_alpha1_zero_is_attracting_unstable() {
        // alpha1 = 0, beta1^2 = alpha2
        let (_, _, e) = eq_of(0.0, 2.0, 4.0, 3.0);
        let top = e.for_lambda(2.0, 1e-12).unwrap();
        assert!(top.point.max_dist(&Point::new(0.0, 2.0)) < 1e-14);
        assert_eq!(top.stability.kind, StabilityKind::AttractingUnstable);
        assert_eq!(top.multiplicity, 2);
        let other = e.for_lambda(-2.0, 1e-12).unwrap();
        assert_eq!(other.stability.kind, StabilityKind::Unstable);
    }

    #[test]
    fn jacobian_law_for_real_spectrum() {
        // roots 3, 2, -1: x^3 - 4x^2 + x + 6 -> beta1 = 4, alpha2 = -1, beta1 alpha2 - beta2 alpha1 = 6
        let (p, _, e) = eq_of(-10.0, 4.0, -1.0, 1.0);
        assert_eq!(e.len(), 3);
        let lams = [3.0, 2.0, -1.0];
        for q in &e.points {
            let l = q.associated_lambda;
            let mut expect: Vec<f64> = lams
                .iter()
                .filter(|&&m| (m - l).abs() > 1e-9)
                .map(|m| (m / l).abs())
                .collect();
            expect.sort_by(|a, b| b.total_cmp(a));
            let got = q.stability.jacobian_eigen_moduli;
            assert!((got[0] - expect[0]).abs() < 1e-9 && (got[1] - expect[1]).abs() < 1e-9);
            assert!(step(&p, &q.point, 1e-12).unwrap().max_dist(&q.point) < 1e-10);
        }
        assert_eq!(
            e.points[0].stability.kind,
            StabilityKind::AsymptoticallyStable
        );
        assert_eq!(e.points[1].stability.kind, StabilityKind::Unstable);
    }
}
