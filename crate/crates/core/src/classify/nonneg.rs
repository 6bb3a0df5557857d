use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::cmp_tol;
use super::equilibria::{equilibria, Equilibrium};
use crate::error::{Error, Result};
use crate::numeric::small_rational;
use crate::spectrum::{char_poly, ModulusOrder, RegimeTag, Spectrum};
use crate::system::{matrix, CompanionMatrix, LineEq, Params, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcase {
    /// `alpha2 < beta1^2`.
    A,
    /// `alpha2 = beta1^2`.
    B,
    /// `alpha2 > beta1^2`.
    C,
}

/// Fate of orbits with `x0 >= 0`, `y0 > 0` when every coefficient is nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NonnegVerdict {
    #[serde(rename = "no_nonneg_periodics_unbounded")]
    NoNonnegPeriodicsUnbounded,
    #[serde(rename = "globally_2_periodic")]
    Globally2Periodic,
    /// A non-attracting fixed point and a line of 2-cycles attracting every other orbit.
    #[serde(rename = "non_attracting_fixed_plus_2_cycles")]
    NonAttractingFixedPlus2Cycles {
        fixed_point: Point,
        two_cycle_line: LineEq,
    },
    /// Every orbit is bounded and those on `x = 0` are 2-periodic.
    #[serde(rename = "bounded_with_2_cycle_line")]
    BoundedWith2CycleLine {
        subcase: Subcase,
        attractor: Option<Point>,
        two_cycle_line: LineEq,
    },
    #[serde(rename = "positive_global_attractor")]
    PositiveGlobalAttractor { equilibrium: Equilibrium },
    #[serde(rename = "globally_3_periodic")]
    Globally3Periodic { equilibrium: Equilibrium },
}

impl NonnegVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            NonnegVerdict::NoNonnegPeriodicsUnbounded => "no_nonneg_periodics_unbounded",
            NonnegVerdict::Globally2Periodic => "globally_2_periodic",
            NonnegVerdict::NonAttractingFixedPlus2Cycles { .. } => {
                "non_attracting_fixed_plus_2_cycles"
            }
            NonnegVerdict::BoundedWith2CycleLine { .. } => "bounded_with_2_cycle_line",
            NonnegVerdict::PositiveGlobalAttractor { .. } => "positive_global_attractor",
            NonnegVerdict::Globally3Periodic { .. } => "globally_3_periodic",
        }
    }
}

/// A numeric check backing one step of the irreducibility argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub name: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonnegReport {
    pub verdict: NonnegVerdict,
    pub checkpoints: Vec<Checkpoint>,
}

fn check(name: &str, value: f64, holds: bool) -> Checkpoint {
    Checkpoint {
        name: name.to_string(),
        value,
        holds,
    }
}

fn min_entry(m: &CompanionMatrix) -> f64 {
    m.0.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b))
}

pub fn classify_nonneg(p: &Params, s: &Spectrum) -> Result<NonnegReport> {
    for (name, value) in [
        ("alpha1", p.alpha1),
        ("beta1", p.beta1),
        ("alpha2", p.alpha2),
        ("beta2", p.beta2),
    ] {
        if value < 0.0 {
            return Err(Error::NegativeCoefficient { name, value });
        }
    }
    let tol = s.cluster_tol;
    let (a1, b1, a2, b2) = (p.alpha1, p.beta1, p.alpha2, p.beta2);
    let b1sq = b1 * b1;
    let eqs = equilibria(p, s);
    let mut checkpoints = Vec::new();

    let verdict = if b2 == 0.0 {
        match cmp_tol(a2, b1sq, tol) {
            std::cmp::Ordering::Greater => NonnegVerdict::NonAttractingFixedPlus2Cycles {
                fixed_point: Point::new(a1 / (a2.sqrt() - b1), a2.sqrt()),
                two_cycle_line: LineEq::new(a2 - b1sq, -a1, -a1 * b1),
            },
            std::cmp::Ordering::Equal if a1 == 0.0 => NonnegVerdict::Globally2Periodic,
            _ => NonnegVerdict::NoNonnegPeriodicsUnbounded,
        }
    } else if a1 == 0.0 {
        let two_cycle_line = LineEq::new(1.0, 0.0, 0.0);
        let (subcase, attractor) = match cmp_tol(a2, b1sq, tol) {
            std::cmp::Ordering::Less => (Subcase::A, Some(p.fixed_point_for(b1))),
            std::cmp::Ordering::Equal => (Subcase::B, Some(Point::new(0.0, b1))),
            std::cmp::Ordering::Greater => (Subcase::C, None),
        };
        NonnegVerdict::BoundedWith2CycleLine {
            subcase,
            attractor,
            two_cycle_line,
        }
    } else if a2 == 0.0 && b1 == 0.0 {
        let lambda = (a1 * b2).cbrt();
        let equilibrium = *eqs
            .for_lambda(lambda, tol)
            .expect("real cube root is an eigenvalue");
        let a3 = matrix(p).pow(3);
        let off = (a3.add(&CompanionMatrix::identity().scale(-a1 * b2))).max_abs();
        checkpoints.push(check(
            "A^3 - alpha1 beta2 I",
            off,
            off <= 1e-12 * (a1 * b2).max(1.0),
        ));
        NonnegVerdict::Globally3Periodic { equilibrium }
    } else {
        let a = matrix(p);
        let shifted = a.add(&CompanionMatrix::identity());
        let sq = shifted.mul(&shifted);
        let m = min_entry(&sq);
        checkpoints.push(check("min entry of (A + I)^2", m, m > 0.0));
        let top = s.dominant_real().expect("Perron root is real");
        let lambda = top.value;
        checkpoints.push(check(
            "Perron root",
            lambda,
            lambda > 0.0
                && top.multiplicity == 1
                && (lambda - s.spectral_radius).abs() <= s.threshold(),
        ));
        let cp = char_poly(p);
        let d1 = -cp.eval(b1);
        checkpoints.push(check("det(A - beta1 I)", d1, d1 > 0.0));
        checkpoints.push(check("lambda1 - beta1", lambda - b1, b1 < lambda));
        let r = a2.sqrt();
        let d2 = -cp.eval(r);
        checkpoints.push(check("det(A - sqrt(alpha2) I)", d2, d2 > 0.0));
        checkpoints.push(check("lambda1 - sqrt(alpha2)", lambda - r, r < lambda));
        let equilibrium = *eqs
            .for_lambda(lambda, tol)
            .expect("equilibrium of the Perron root");
        let e = equilibrium.point;
        checkpoints.push(check(
            "min coordinate of equilibrium",
            e.x.min(e.y),
            e.x > 0.0 && e.y > 0.0,
        ));
        NonnegVerdict::PositiveGlobalAttractor { equilibrium }
    };
    Ok(NonnegReport {
        verdict,
        checkpoints,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GlobalDynamics {
    /// Every complete orbit is periodic with period dividing `period`.
    GloballyPeriodic {
        period: usize,
    },
    Nonneg {
        report: NonnegReport,
    },
    /// The fate depends on the initial condition beyond what the other variants state.
    Mixed,
}

impl GlobalDynamics {
    pub fn label(&self) -> String {
        match self {
            GlobalDynamics::GloballyPeriodic { period } => format!("globally_{period}_periodic"),
            GlobalDynamics::Nonneg { report } => report.verdict.label().to_string(),
            GlobalDynamics::Mixed => "initial_condition_dependent".to_string(),
        }
    }
}

/// Global statements that hold for every complete orbit.
pub fn global_dynamics(p: &Params, s: &Spectrum) -> GlobalDynamics {
    let tol = s.cluster_tol;
    let b1sq = p.beta1 * p.beta1;
    if p.beta2 == 0.0 {
        if cmp_tol(b1sq, -p.alpha2, tol).is_eq() {
            return GlobalDynamics::GloballyPeriodic { period: 4 };
        }
        if p.alpha1 == 0.0 && cmp_tol(b1sq, p.alpha2, tol).is_eq() {
            return GlobalDynamics::GloballyPeriodic { period: 2 };
        }
    } else if s.regime == RegimeTag::ComplexPair(ModulusOrder::Equal) {
        let lambda = s.dominant_real().expect("one real root").value;
        let theta = s.complex_pair.expect("complex pair").theta;
        let phase = theta + if lambda < 0.0 { PI } else { 0.0 };
        if let Some((_, q)) = small_rational(phase / TAU, 64, 1e-10) {
            return GlobalDynamics::GloballyPeriodic { period: q as usize };
        }
    }
    if p.as_array().iter().all(|&c| c >= 0.0) {
        if let Ok(report) = classify_nonneg(p, s) {
            return GlobalDynamics::Nonneg { report };
        }
    }
    GlobalDynamics::Mixed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::spectrum;
    use crate::system::validate_params;

    fn nonneg(a1: f64, b1: f64, a2: f64, b2: f64) -> NonnegReport {
        let p = validate_params(a1, b1, a2, b2).unwrap();
        classify_nonneg(&p, &spectrum(&p, 1e-8)).unwrap()
    }

    #[test]
    fn globally_three_periodic() {
        let r = nonneg(2.0, 0.0, 0.0, 1.0);
        let NonnegVerdict::Globally3Periodic { equilibrium } = r.verdict else {
            panic!()
        };
        let l = 2f64.cbrt();
        assert!(equilibrium.point.max_dist(&Point::new(l * l, l)) < 1e-14);
        assert!(r.checkpoints.iter().all(|c| c.holds));
    }

    #[test]
    fn positive_attractor() {
        let r = nonneg(2.0, 1.0, 1.0, 1.0);
        let NonnegVerdict::PositiveGlobalAttractor { equilibrium } = r.verdict else {
            panic!()
        };
        assert!(equilibrium.point.x > 0.0 && equilibrium.point.y > 0.0);
        assert!(r.checkpoints.iter().all(|c| c.holds), "{:?}", r.checkpoints);
        let d = r
            .checkpoints
            .iter()
            .find(|c| c.name == "det(A - beta1 I)")
            .unwrap();
        assert!((d.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn alpha1_zero_subcases() {
        let sub = |a2: f64| match nonneg(0.0, 1.0, a2, 1.0).verdict {
            NonnegVerdict::BoundedWith2CycleLine { subcase, .. } => subcase,
            v => panic!("{v:?}"),
        };
        assert_eq!(sub(4.0), Subcase::C);
        assert_eq!(sub(1.0), Subcase::B);
        assert_eq!(sub(0.25), Subcase::A);
    }

    #[test]
    fn beta2_zero_cases() {
        assert_eq!(
            nonneg(1.0, 2.0, 3.0, 0.0).verdict,
            NonnegVerdict::NoNonnegPeriodicsUnbounded
        );
        assert_eq!(
            nonneg(0.0, 2.0, 4.0, 0.0).verdict,
            NonnegVerdict::Globally2Periodic
        );
        assert!(matches!(
            nonneg(1.0, 1.0, 4.0, 0.0).verdict,
            NonnegVerdict::NonAttractingFixedPlus2Cycles { .. }
        ));
    }

    #[test]
    fn negative_coefficients_rejected() {
        let p = validate_params(1.0, 3.0, -4.0, -10.0).unwrap();
        let e = classify_nonneg(&p, &spectrum(&p, 1e-8)).unwrap_err();
        assert!(matches!(
            e,
            Error::NegativeCoefficient { name: "alpha2", .. }
        ));
    }

    #[test]
    fn global_labels() {
        let g = |a1, b1, a2, b2| {
            let p = validate_params(a1, b1, a2, b2).unwrap();
            global_dynamics(&p, &spectrum(&p, 1e-8)).label()
        };
        assert_eq!(g(2.0, 0.0, 0.0, 1.0), "globally_3_periodic");
        assert_eq!(g(-2.0, 0.0, 0.0, 1.0), "globally_3_periodic");
        assert_eq!(g(1.0, 1.0, -1.0, 0.0), "globally_4_periodic");
        assert_eq!(g(0.0, 2.0, 4.0, 0.0), "globally_2_periodic");
        assert_eq!(g(2.0, 1.0, 1.0, 1.0), "positive_global_attractor");
        assert_eq!(g(1.0, 3.0, -4.0, -10.0), "initial_condition_dependent");
    }
}
