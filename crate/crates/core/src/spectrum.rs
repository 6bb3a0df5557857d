//! Characteristic polynomial of the companion matrix, its roots, and `A^n`
//! expressed in the basis `{I, A, A^2}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numeric::horner;
use crate::system::{CompanionMatrix, Params};

/// `x^3 + c2 x^2 + c1 x + c0` with `(c2, c1, c0) = (-beta1, -alpha2, beta1*alpha2 - beta2*alpha1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

pub fn char_poly(p: &Params) -> CharPoly {
    CharPoly {
        c2: -p.beta1,
        c1: -p.alpha2,
        c0: p.beta1.mul_add(p.alpha2, -(p.beta2 * p.alpha1)),
    }
}

impl CharPoly {
    pub fn coeffs(&self) -> [f64; 4] {
        [1.0, self.c2, self.c1, self.c0]
    }

    /// Compensated evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs(), x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        horner(&[3.0, 2.0 * self.c2, self.c1], x)
    }

    /// Value at a complex point, as `(re, im)`.
    pub fn eval_complex(&self, re: f64, im: f64) -> (f64, f64) {
        let (mut sr, mut si) = (1.0, 0.0);
        for c in [self.c2, self.c1, self.c0] {
            let nr = sr * re - si * im + c;
            let ni = sr * im + si * re;
            sr = nr;
            si = ni;
        }
        (sr, si)
    }

    /// True when the polynomial factors exactly as `(x - beta1)(x^2 - alpha2)`,
    /// i.e. when `alpha1 * beta2 = 0`.
    pub fn is_factored(&self) -> bool {
        self.c0 == self.c2 * self.c1
    }

    /// Sum of the absolute values of the terms at `x`; the natural scale for residuals.
    pub fn magnitude(&self, x: f64) -> f64 {
        let a = x.abs();
        a * a * a + self.c2.abs() * a * a + self.c1.abs() * a + self.c0.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u8,
}

/// The pair `rho e^{±i theta}`, stored by its upper-half-plane member (`0 < theta < pi`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub rho: f64,
    pub theta: f64,
}

impl ComplexPair {
    pub fn re(&self) -> f64 {
        self.rho * self.theta.cos()
    }

    pub fn im(&self) -> f64 {
        self.rho * self.theta.sin()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityPattern {
    /// `|l1| > |l2| > |l3|`.
    Simple,
    /// `|l1| > |l2|`, `l1` double.
    DoubleDominant,
    /// `|l1| > |l2|`, `l2` double.
    DoubleRecessive,
    Triple,
}

/// Comparison of the real root's modulus against `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusOrder {
    Dominant,
    Recessive,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RegimeTag {
    DistinctModuli(MultiplicityPattern),
    TwoRealSameModulus,
    ComplexPair(ModulusOrder),
}

impl RegimeTag {
    pub fn label(&self) -> &'static str {
        match self {
            RegimeTag::DistinctModuli(MultiplicityPattern::Simple) => "distinct_moduli",
            RegimeTag::DistinctModuli(MultiplicityPattern::DoubleDominant) => {
                "distinct_moduli_double_dominant"
            }
            RegimeTag::DistinctModuli(MultiplicityPattern::DoubleRecessive) => {
                "distinct_moduli_double_recessive"
            }
            RegimeTag::DistinctModuli(MultiplicityPattern::Triple) => "distinct_moduli_triple",
            RegimeTag::TwoRealSameModulus => "two_real_same_modulus",
            RegimeTag::ComplexPair(ModulusOrder::Dominant) => "complex_dominant",
            RegimeTag::ComplexPair(ModulusOrder::Recessive) => "complex_recessive",
            RegimeTag::ComplexPair(ModulusOrder::Equal) => "complex_equal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Distinct real roots, sorted by decreasing modulus (positive first on ties).
    pub real_roots: Vec<RealRoot>,
    pub complex_pair: Option<ComplexPair>,
    pub spectral_radius: f64,
    pub regime: RegimeTag,
    /// Relative tolerance used for merging and for every modulus comparison.
    pub cluster_tol: f64,
    pub diagnostics: Vec<String>,
}

impl Spectrum {
    /// Absolute threshold derived from the cluster tolerance.
    pub fn threshold(&self) -> f64 {
        self.cluster_tol * self.spectral_radius.max(1.0)
    }

    pub fn same_modulus(&self, a: f64, b: f64) -> bool {
        (a.abs() - b.abs()).abs() <= self.threshold()
    }

    /// The real root of largest modulus.
    pub fn dominant_real(&self) -> Option<RealRoot> {
        self.real_roots.first().copied()
    }

    pub fn multiplicity_of(&self, lambda: f64) -> u8 {
        self.real_roots
            .iter()
            .find(|r| (r.value - lambda).abs() <= self.threshold())
            .map_or(0, |r| r.multiplicity)
    }

    /// All three eigenvalues as `(re, im)`, repeated by multiplicity.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(3);
        for r in &self.real_roots {
            for _ in 0..r.multiplicity {
                out.push((r.value, 0.0));
            }
        }
        if let Some(c) = self.complex_pair {
            out.push((c.re(), c.im()));
            out.push((c.re(), -c.im()));
        }
        out
    }

    /// Eigenvalues other than one copy of `lambda`, as `(re, im)`.
    pub fn others(&self, lambda: f64) -> Vec<(f64, f64)> {
        let mut eig = self.eigenvalues();
        if let Some(i) = eig
            .iter()
            .position(|&(re, im)| im == 0.0 && (re - lambda).abs() <= self.threshold())
        {
            eig.remove(i);
        }
        eig
    }
}

/// Solves the cubic in closed form and merges roots closer than
/// `cluster_tol * max(1, spectral radius)`.
pub fn roots(cp: &CharPoly, cluster_tol: f64) -> Spectrum {
    let mut diagnostics = Vec::new();
    let (reals, pair) = if cp.is_factored() {
        factored_roots(cp)
    } else {
        generic_roots(cp, cluster_tol)
    };
    let (mut reals, pair) = merge(reals, pair, cluster_tol);
    reals.sort_by(|a, b| {
        b.value
            .abs()
            .total_cmp(&a.value.abs())
            .then(b.value.total_cmp(&a.value))
    });
    let spectral_radius = reals
        .iter()
        .map(|r| r.value.abs())
        .chain(pair.map(|c| c.rho))
        .fold(0.0f64, f64::max);
    let mut s = Spectrum {
        real_roots: reals,
        complex_pair: pair,
        spectral_radius,
        regime: RegimeTag::DistinctModuli(MultiplicityPattern::Simple),
        cluster_tol,
        diagnostics: Vec::new(),
    };
    s.regime = classify_regime(&s);
    if s.regime == RegimeTag::TwoRealSameModulus && !cp.is_factored() {
        diagnostics.push(
            "two distinct real roots share a modulus although alpha1*beta2 != 0; \
             numerical tie, classified through the multiplicity path"
                .to_string(),
        );
    }
    s.diagnostics = diagnostics;
    s
}

/// Convenience: `roots(char_poly(p))`.
pub fn spectrum(p: &Params, cluster_tol: f64) -> Spectrum {
    roots(&char_poly(p), cluster_tol)
}

type RawRoots = (Vec<RealRoot>, Option<(f64, f64)>);

fn simple(value: f64) -> RealRoot {
    RealRoot {
        value,
        multiplicity: 1,
    }
}

fn factored_roots(cp: &CharPoly) -> RawRoots {
    let beta1 = -cp.c2;
    let alpha2 = -cp.c1;
    let s = alpha2.abs().sqrt();
    if alpha2 > 0.0 {
        (vec![simple(beta1), simple(s), simple(-s)], None)
    } else {
        (vec![simple(beta1)], Some((0.0, s)))
    }
}

fn polish(cp: &CharPoly, mut x: f64) -> f64 {
    let mut fx = cp.eval(x);
    for _ in 0..4 {
        if fx == 0.0 {
            break;
        }
        let d = cp.derivative(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let nx = x - fx / d;
        let nf = cp.eval(nx);
        if nf.abs() < fx.abs() {
            x = nx;
            fx = nf;
        } else {
            break;
        }
    }
    x
}

/// Cardano (one real root) or the trigonometric form (three real roots), each
/// root refined by Newton steps on the compensated polynomial.
fn closed_form_roots(cp: &CharPoly) -> RawRoots {
    let shift = -cp.c2 / 3.0;
    let p = cp.derivative(shift);
    let q = cp.eval(shift);
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let sd = disc.sqrt();
        let u = (-q / 2.0 - sd.copysign(q)).cbrt();
        let t = if u != 0.0 { u - p / (3.0 * u) } else { 0.0 };
        let r = polish(cp, t + shift);
        let sum = -cp.c2 - r;
        let prod = -cp.c0 / r;
        let d = sum * sum / 4.0 - prod;
        if d < 0.0 {
            (vec![simple(r)], Some((sum / 2.0, (-d).sqrt())))
        } else {
            let big = sum / 2.0 + d.sqrt().copysign(sum);
            let small = if big != 0.0 { prod / big } else { 0.0 };
            (
                vec![
                    simple(r),
                    simple(polish(cp, big)),
                    simple(polish(cp, small)),
                ],
                None,
            )
        }
    } else if p == 0.0 {
        (vec![simple(shift), simple(shift), simple(shift)], None)
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let rs = (0..3)
            .map(|k| {
                simple(polish(
                    cp,
                    m * (phi - 2.0 * PI * k as f64 / 3.0).cos() + shift,
                ))
            })
            .collect();
        (rs, None)
    }
}

/// Detects multiple roots through the critical points of the polynomial before
/// falling back to the closed form. A double root sits at a critical point `c`
/// with `p(c) ≈ 0`; the two nearby roots are `c ± sqrt(-2 p(c) / p''(c))`, which
/// gives a separation estimate far more accurate than solving directly.
fn generic_roots(cp: &CharPoly, cluster_tol: f64) -> RawRoots {
    let (reals, pair) = closed_form_roots(cp);
    let radius = reals
        .iter()
        .map(|r| r.value.abs())
        .chain(pair.map(|(re, im)| re.hypot(im)))
        .fold(0.0f64, f64::max);
    let thr = cluster_tol * radius.max(1.0);

    // triple: at the inflection point the shifted cubic is s^3 + P s + Q
    let infl = -cp.c2 / 3.0;
    let big_p = cp.derivative(infl);
    let big_q = cp.eval(infl);
    let spread = (2.0 * big_p.abs().sqrt()).max(3f64.sqrt() * big_q.abs().cbrt());
    if spread <= thr {
        return (
            vec![RealRoot {
                value: infl,
                multiplicity: 3,
            }],
            None,
        );
    }

    // double: real critical points exist iff c2^2 - 3 c1 >= 0
    let dprime = cp.c2.mul_add(cp.c2, -3.0 * cp.c1);
    if dprime >= 0.0 {
        let sq = dprime.sqrt();
        let c_big = (-cp.c2 - sq.copysign(cp.c2)) / 3.0;
        let c_small = if c_big != 0.0 {
            cp.c1 / (3.0 * c_big)
        } else {
            0.0
        };
        let mut best: Option<(f64, f64)> = None;
        for c in [c_big, c_small] {
            let curv = (6.0 * c + 2.0 * cp.c2).abs();
            if curv == 0.0 {
                continue;
            }
            let sep = 2.0 * (2.0 * cp.eval(c).abs() / curv).sqrt();
            if sep <= thr && best.is_none_or(|(_, s)| sep < s) {
                best = Some((c, sep));
            }
        }
        if let Some((c, _)) = best {
            let third = polish(cp, -cp.c2 - 2.0 * c);
            return (
                vec![
                    RealRoot {
                        value: c,
                        multiplicity: 2,
                    },
                    simple(third),
                ],
                None,
            );
        }
    }
    (reals, pair)
}

fn merge(
    mut reals: Vec<RealRoot>,
    pair: Option<(f64, f64)>,
    cluster_tol: f64,
) -> (Vec<RealRoot>, Option<ComplexPair>) {
    let radius = reals
        .iter()
        .map(|r| r.value.abs())
        .chain(pair.map(|(re, im)| re.hypot(im)))
        .fold(0.0f64, f64::max);
    let thr = cluster_tol * radius.max(1.0);
    let mut complex = None;
    if let Some((re, im)) = pair {
        if 2.0 * im.abs() <= thr {
            reals.push(RealRoot {
                value: re,
                multiplicity: 2,
            });
        } else {
            complex = Some(ComplexPair {
                rho: re.hypot(im),
                theta: im.abs().atan2(re),
            });
        }
    }
    reals.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut merged: Vec<RealRoot> = Vec::with_capacity(3);
    for r in reals {
        match merged.last_mut() {
            Some(last) if (r.value - last.value).abs() <= thr => {
                let m = last.multiplicity + r.multiplicity;
                last.value = (last.value * last.multiplicity as f64
                    + r.value * r.multiplicity as f64)
                    / m as f64;
                last.multiplicity = m;
            }
            _ => merged.push(r),
        }
    }
    (merged, complex)
}

/// Regime of a spectrum; a pure function of the spectrum.
pub fn classify_regime(s: &Spectrum) -> RegimeTag {
    let thr = s.threshold();
    if let Some(c) = s.complex_pair {
        let lambda = s.real_roots.first().map_or(0.0, |r| r.value.abs());
        let order = if (lambda - c.rho).abs() <= thr {
            ModulusOrder::Equal
        } else if lambda > c.rho {
            ModulusOrder::Dominant
        } else {
            ModulusOrder::Recessive
        };
        return RegimeTag::ComplexPair(order);
    }
    let rs = &s.real_roots;
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            if (rs[i].value.abs() - rs[j].value.abs()).abs() <= thr {
                return RegimeTag::TwoRealSameModulus;
            }
        }
    }
    let pattern = match rs.len() {
        1 => MultiplicityPattern::Triple,
        2 if rs[0].multiplicity == 2 => MultiplicityPattern::DoubleDominant,
        2 => MultiplicityPattern::DoubleRecessive,
        _ => MultiplicityPattern::Simple,
    };
    RegimeTag::DistinctModuli(pattern)
}

/// `A^n = a0 I + a1 A + a2 A^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCoeffs {
    pub n: usize,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl PowerCoeffs {
    pub fn reconstruct(&self, a: &CompanionMatrix) -> CompanionMatrix {
        let a2 = a.mul(a);
        CompanionMatrix::identity()
            .scale(self.a0)
            .add(&a.scale(self.a1))
            .add(&a2.scale(self.a2))
    }

    /// Multiplies the remainder by `x` and reduces once modulo the polynomial.
    pub fn next(&self, cp: &CharPoly) -> PowerCoeffs {
        PowerCoeffs {
            n: self.n + 1,
            a0: -cp.c0 * self.a2,
            a1: self.a0 - cp.c1 * self.a2,
            a2: self.a1 - cp.c2 * self.a2,
        }
    }
}

/// Coefficients of `x^n mod p(x)`.
pub fn power_coeffs(cp: &CharPoly, n: usize) -> PowerCoeffs {
    let mut pc = PowerCoeffs {
        n: 0,
        a0: 1.0,
        a1: 0.0,
        a2: 0.0,
    };
    for _ in 0..n {
        pc = pc.next(cp);
    }
    pc
}
