use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::equilibria::{equilibria, Equilibrium, EquilibriumSet};
use super::{cmp_tol, detect_period};
use crate::forbidden::check_initial;
use crate::numeric::{small_rational, solve3};
use crate::solution::{conic_of, line_l, Conic, LineL};
use crate::spectrum::{spectrum, ModulusOrder, MultiplicityPattern, RegimeTag, Spectrum};
use crate::system::{iterate, LineEq, OrbitStatus, Params, Point};
use crate::{Tolerances, DEFAULT_FORBIDDEN_HORIZON};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub tol: Tolerances,
    pub forbidden_horizon: usize,
    /// Steps of the confirming numeric probe; 0 disables it.
    pub budget: usize,
    /// Largest denominator accepted when testing `theta / pi` for rationality.
    pub max_denominator: u64,
    pub rational_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: Tolerances::default(),
            forbidden_horizon: DEFAULT_FORBIDDEN_HORIZON,
            budget: 0,
            max_denominator: 64,
            rational_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Behavior {
    ConvergesToFixedPoint {
        equilibrium: Equilibrium,
    },
    /// `cycle[0]` is the limit of the even-indexed iterates.
    #[serde(rename = "converges_to_2_cycle")]
    ConvergesTo2Cycle {
        cycle: [Point; 2],
    },
    Periodic {
        period: usize,
        cycle: Vec<Point>,
    },
    Unbounded,
    OnInvariantConic {
        conic: Conic,
    },
    /// Bounded subsequences accumulate on `line.line`; others may run off along parallels.
    AccumulatesOnLine {
        line: LineL,
    },
    StartsForbidden {
        witness: usize,
    },
}

impl Behavior {
    pub fn label(&self) -> &'static str {
        match self {
            Behavior::ConvergesToFixedPoint { .. } => "converges_to_fixed_point",
            Behavior::ConvergesTo2Cycle { .. } => "converges_to_2_cycle",
            Behavior::Periodic { .. } => "periodic",
            Behavior::Unbounded => "unbounded",
            Behavior::OnInvariantConic { .. } => "on_invariant_conic",
            Behavior::AccumulatesOnLine { .. } => "accumulates_on_line",
            Behavior::StartsForbidden { .. } => "starts_forbidden",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorReport {
    pub behavior: Behavior,
    pub regime: RegimeTag,
    pub diagnostics: Vec<String>,
    /// Status of the numeric probe, when one was run.
    pub probe: Option<OrbitStatus>,
}

struct Ctx<'a> {
    p: &'a Params,
    z0: &'a Point,
    s: Spectrum,
    eqs: EquilibriumSet,
    opts: &'a ClassifyOptions,
    diag: Vec<String>,
}

impl Ctx<'_> {
    fn on_line(&self, l: LineEq) -> bool {
        l.normalized()
            .is_some_and(|l| l.contains(self.z0, self.opts.tol.membership))
    }

    fn compare(&mut self, a: f64, b: f64, what: &str) -> Ordering {
        let o = cmp_tol(a, b, self.opts.tol.cluster);
        if o.is_eq() && a != b {
            self.diag.push(format!(
                "{what}: {a:e} and {b:e} differ by less than the cluster tolerance; treated as equal"
            ));
        }
        o
    }

    fn periodic(&mut self, period: usize) -> Behavior {
        let o = iterate(self.p, *self.z0, period, self.opts.tol.divide);
        let mut cycle = o.points;
        cycle.truncate(period);
        Behavior::Periodic { period, cycle }
    }

    fn converges(&mut self, lambda: f64) -> Behavior {
        match self.eqs.for_lambda(lambda, self.opts.tol.cluster) {
            Some(e) => Behavior::ConvergesToFixedPoint { equilibrium: *e },
            None => {
                self.diag
                    .push(format!("no equilibrium found for eigenvalue {lambda:e}"));
                Behavior::Unbounded
            }
        }
    }

    /// `beta2 = 0`: `y` is 2-periodic and `x` solves a linear equation.
    fn beta2_zero(&mut self) -> Behavior {
        let p = *self.p;
        let (a1, b1, a2) = (p.alpha1, p.beta1, p.alpha2);
        let b1sq = b1 * b1;
        if self.compare(b1sq, a2, "beta1^2 vs alpha2").is_eq() {
            if a1 == 0.0 || self.on_line(LineEq::new(0.0, 1.0, b1)) {
                return self.periodic(2);
            }
            return Behavior::Unbounded;
        }
        if self.compare(b1sq, -a2, "beta1^2 vs -alpha2").is_eq() {
            let two = self.on_line(LineEq::new(2.0 * b1sq, a1, a1 * b1));
            return self.periodic(if two { 2 } else { 4 });
        }
        if self.on_line(LineEq::new(a2 - b1sq, -a1, -a1 * b1)) {
            return self.periodic(2);
        }
        if b1sq > a2.abs() {
            return Behavior::Unbounded;
        }
        let y0 = self.z0.y;
        let xs = a1 * (b1 + y0) / (a2 - b1sq);
        Behavior::ConvergesTo2Cycle {
            cycle: [Point::new(xs, y0), Point::new((a1 + b1 * xs) / y0, a2 / y0)],
        }
    }

    /// `alpha1 = 0 < alpha2`, `beta2 != 0`: eigenvalues `beta1` and `±sqrt(alpha2)`.
    fn two_real_same_modulus(&mut self) -> Behavior {
        let p = *self.p;
        let (b1, a2, b2) = (p.beta1, p.alpha2, p.beta2);
        if self.on_line(LineEq::new(1.0, 0.0, 0.0)) {
            return self.periodic(2);
        }
        let b1sq = b1 * b1;
        if self.compare(b1sq, a2, "beta1^2 vs alpha2") != Ordering::Less {
            return self.converges(b1);
        }
        if self.on_line(LineEq::new(b2, 0.0, a2 - b1sq))
            || self.on_line(LineEq::new(b1 * b2, a2 - b1sq, 0.0))
        {
            return Behavior::Unbounded;
        }
        let sq = a2.sqrt();
        let m = [
            [b1, sq, -sq],
            [1.0, 1.0, 1.0],
            [1.0 / b1, 1.0 / sq, -1.0 / sq],
        ];
        let rhs = [b2.mul_add(self.z0.x, a2), self.z0.y, 1.0];
        match solve3(m, rhs, 1e-14) {
            Some([_, p2, p3]) => {
                let k = (p2 + p3) / (p2 - p3);
                Behavior::ConvergesTo2Cycle {
                    cycle: [Point::new(0.0, k * sq), Point::new(0.0, sq / k)],
                }
            }
            None => {
                self.diag
                    .push("singular system for the 2-cycle constants".into());
                Behavior::Unbounded
            }
        }
    }

    fn complex(&mut self, order: ModulusOrder) -> Behavior {
        let lambda = self.s.dominant_real().expect("one real root").value;
        let pair = self.s.complex_pair.expect("complex pair");
        let ll = line_l(self.p, lambda).expect("beta2 != 0");
        if ll.line.contains(self.z0, self.opts.tol.membership) {
            return match small_rational(
                pair.theta / PI,
                self.opts.max_denominator,
                self.opts.rational_tol,
            ) {
                Some((_, q)) => self.periodic(q as usize),
                None => {
                    self.diag.push(
                        "no small-period rational detected for theta/pi; \
                         treated as unbounded on L"
                            .into(),
                    );
                    Behavior::Unbounded
                }
            };
        }
        match order {
            ModulusOrder::Dominant => self.converges(lambda),
            ModulusOrder::Recessive => Behavior::AccumulatesOnLine { line: ll },
            ModulusOrder::Equal => {
                // rotation by (rho / lambda) e^{i theta}
                let phase = pair.theta + if lambda < 0.0 { PI } else { 0.0 };
                let conic = conic_of(self.p, &self.s, self.z0);
                if let Some((_, q)) = small_rational(
                    phase / TAU,
                    self.opts.max_denominator,
                    self.opts.rational_tol,
                ) {
                    if let Ok(c) = conic {
                        self.diag.push(format!(
                            "orbit lies on an invariant conic of eccentricity {:e}",
                            c.eccentricity
                        ));
                    }
                    return self.periodic(q as usize);
                }
                match conic {
                    Ok(c) => Behavior::OnInvariantConic { conic: c },
                    Err(e) => {
                        self.diag.push(format!("conic unavailable: {e}"));
                        Behavior::Unbounded
                    }
                }
            }
        }
    }

    fn real(&mut self, pattern: Option<MultiplicityPattern>) -> Behavior {
        let rs = self.s.real_roots.clone();
        let l1 = rs[0].value;
        let on_l = line_l(self.p, l1)
            .map(|l| l.line.contains(self.z0, self.opts.tol.membership))
            .unwrap_or(false);
        match pattern {
            Some(MultiplicityPattern::DoubleDominant) | Some(MultiplicityPattern::Triple) => {
                self.converges(l1)
            }
            _ if on_l && rs.len() > 1 => self.converges(rs[1].value),
            _ => self.converges(l1),
        }
    }

    fn probe(&mut self, b: &Behavior) -> Option<OrbitStatus> {
        if self.opts.budget == 0 {
            return None;
        }
        let o = iterate(self.p, *self.z0, self.opts.budget, self.opts.tol.divide);
        let last = *o.last();
        let note = match (b, o.status) {
            (_, OrbitStatus::HitForbidden { step })
                if !matches!(b, Behavior::StartsForbidden { .. }) =>
            {
                Some(format!(
                    "probe reached y = 0 at step {step}, beyond the forbidden horizon"
                ))
            }
            (Behavior::ConvergesToFixedPoint { equilibrium }, OrbitStatus::Complete { .. })
                if last.max_dist(&equilibrium.point)
                    > 1e-3 * equilibrium.point.norm_inf().max(1.0) =>
            {
                Some("probe has not yet approached the limit point".to_string())
            }
            (Behavior::Unbounded, OrbitStatus::Complete { .. })
                if o.points.iter().all(|z| z.norm_inf() < 1e8) =>
            {
                Some("probe stayed below 1e8 within the budget".to_string())
            }
            (Behavior::Periodic { period, .. }, _) => match detect_period(&o, self.opts.tol.period)
            {
                Some((q, 0)) if q == *period => None,
                found => Some(format!("probe period {found:?} differs from {period}")),
            },
            _ => None,
        };
        self.diag.extend(note);
        Some(o.status)
    }
}

/// Asymptotic fate of the orbit of `z0`, decided from the case tables in closed form.
pub fn classify_behavior(p: &Params, z0: &Point, opts: &ClassifyOptions) -> BehaviorReport {
    let s = spectrum(p, opts.tol.cluster);
    let eqs = equilibria(p, &s);
    let regime = s.regime;
    let mut ctx = Ctx {
        p,
        z0,
        diag: s.diagnostics.clone(),
        s,
        eqs,
        opts,
    };
    let fc = check_initial(
        p,
        z0,
        opts.forbidden_horizon,
        opts.tol.membership,
        opts.tol.divide,
    );
    if let (Some(n), None) = (fc.near_line, fc.confirmed()) {
        ctx.diag.push(format!(
            "initial point lies within {:e} of forbidden line n={n} but the orbit stays defined there",
            opts.tol.membership
        ));
    }
    let behavior = if let Some(n) = fc.confirmed() {
        Behavior::StartsForbidden { witness: n }
    } else if let Some(e) = ctx.eqs.near(z0, opts.tol.period) {
        Behavior::Periodic {
            period: 1,
            cycle: vec![e.point],
        }
    } else if ctx
        .eqs
        .line
        .is_some_and(|l| l.line.contains(z0, opts.tol.membership))
    {
        Behavior::Periodic {
            period: 1,
            cycle: vec![*z0],
        }
    } else if p.beta2 == 0.0 {
        ctx.beta2_zero()
    } else if p.alpha1 == 0.0 && p.alpha2 > 0.0 {
        ctx.two_real_same_modulus()
    } else {
        match regime {
            RegimeTag::ComplexPair(order) => ctx.complex(order),
            RegimeTag::DistinctModuli(pattern) => ctx.real(Some(pattern)),
            RegimeTag::TwoRealSameModulus => {
                ctx.diag.push(
                    "two real eigenvalues tie in modulus with alpha1 != 0; \
                     using the distinct-moduli table"
                        .into(),
                );
                ctx.real(None)
            }
        }
    };
    let probe = ctx.probe(&behavior);
    BehaviorReport {
        behavior,
        regime,
        diagnostics: ctx.diag,
        probe,
    }
}
