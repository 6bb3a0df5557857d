use proptest::prelude::*;
use ratsys_core::solution::VSequence;
use ratsys_core::spectrum::spectrum;
use ratsys_core::system::linear_lift;
use ratsys_core::*;

fn coef() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|v| (v * 64.0).round() / 64.0 + v * 1e-3)
}

fn params() -> impl Strategy<Value = Params> {
    prop_oneof![
        (coef(), coef(), coef(), coef()),
        (coef(), coef(), coef(), Just(0.0)),
    ]
    .prop_filter_map("degenerate", |(a1, b1, a2, b2)| {
        validate_params(a1, b1, a2, b2).ok()
    })
}

fn generic_params() -> impl Strategy<Value = Params> {
    (coef(), coef(), coef(), coef()).prop_filter_map("degenerate", |(a1, b1, a2, b2)| {
        validate_params(a1, b1, a2, b2)
            .ok()
            .filter(|p| p.beta2 != 0.0)
    })
}

fn point() -> impl Strategy<Value = Point> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| Point::new(x, y))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Smallest `|y_k|` relative to the step guard along the first `n` iterates.
fn min_margin(p: &Params, o: &Orbit) -> f64 {
    o.points
        .iter()
        .map(|z| z.y.abs() / (p.alpha2.abs() + (p.beta2 * z.x).abs()).max(1.0))
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vieta(p in params()) {
        let s = spectrum(&p, 1e-8);
        prop_assume!(s.diagnostics.is_empty());
        let eig = s.eigenvalues();
        prop_assert_eq!(eig.len(), 3);
        let sum: f64 = eig.iter().map(|e| e.0).sum();
        let (mut pr, mut pi) = (1.0f64, 0.0f64);
        for &(re, im) in &eig {
            let (a, b) = (pr * re - pi * im, pr * im + pi * re);
            pr = a;
            pi = b;
        }
        let scale = s.spectral_radius.max(1.0);
        prop_assert!((sum - p.beta1).abs() <= 1e-10 * scale, "{} vs {}", sum, p.beta1);
        prop_assert!((pr - p.det()).abs() <= 1e-10 * scale.powi(3), "{} vs {}", pr, p.det());
        prop_assert!(pi.abs() <= 1e-10 * scale.powi(3));
    }

    #[test]
    fn root_residuals(p in params()) {
        let cp = char_poly(&p);
        let s = roots(&cp, 1e-8);
        let bound = 1e-9 * (1.0 + s.spectral_radius).powi(3);
        for r in &s.real_roots {
            prop_assert!(cp.eval(r.value).abs() <= bound);
        }
        if let Some(c) = s.complex_pair {
            let (re, im) = cp.eval_complex(c.re(), c.im());
            prop_assert!(re.hypot(im) <= bound);
        }
        prop_assert_eq!(classify_regime(&roots(&cp, 1e-8)), s.regime);
    }

    #[test]
    fn power_reconstruction(p in params(), n in 0usize..=40) {
        let a = matrix(&p);
        let direct = a.pow(n);
        let rebuilt = power_coeffs(&char_poly(&p), n).reconstruct(&a);
        let err = direct.add(&rebuilt.scale(-1.0)).max_abs();
        prop_assert!(err <= 1e-8 * direct.max_abs().max(1.0), "n={} err={}", n, err);
    }

    #[test]
    fn iteration_matches_linear_lift(p in params(), z0 in point(), n in 0usize..=30) {
        let o = iterate(&p, z0, n, 1e-12);
        prop_assume!(o.is_complete() && min_margin(&p, &o) > 1e-6);
        let lift = linear_lift(&p, &z0, n).unwrap();
        let z = o.last();
        prop_assert!(rel(lift.x, z.x) <= 1e-9 && rel(lift.y, z.y) <= 1e-9, "{:?} vs {:?}", lift, z);
    }

    #[test]
    fn iteration_is_prefix_closed(p in params(), z0 in point(), n in 0usize..20, extra in 0usize..20) {
        let short = iterate(&p, z0, n, 1e-12);
        let long = iterate(&p, z0, n + extra, 1e-12);
        prop_assume!(short.is_complete() && long.is_complete());
        prop_assert_eq!(&long.points[..=n], &short.points[..]);
    }

    #[test]
    fn closed_form_matches_iteration(p in params(), z0 in point()) {
        let o = iterate(&p, z0, 30, 1e-12);
        prop_assume!(o.is_complete() && min_margin(&p, &o) > 1e-6);
        for (n, z) in o.points.iter().enumerate() {
            let c = solve(&p, &z0, n, 1e-12).unwrap();
            let scale = z.norm_inf().max(1.0);
            prop_assert!(c.max_dist(z) <= 1e-8 * scale, "n={} {:?} vs {:?}", n, c, z);
        }
    }

    #[test]
    fn v_ratios_are_scale_free(p in generic_params(), z0 in point(), c in 0.1f64..10.0) {
        let n = 12;
        let v = v_sequence(&p, &z0, n + 1);
        // same recurrence from scaled initial data
        let k = [p.beta1, p.alpha2, -(p.beta1 * p.alpha2 - p.beta2 * p.alpha1)];
        let mut w = vec![c, c * z0.y, c * (p.beta2 * z0.x + p.alpha2)];
        while w.len() < n + 3 {
            let m = w.len();
            w.push(k[0] * w[m - 1] + k[1] * w[m - 2] + k[2] * w[m - 3]);
        }
        for i in 1..=n {
            let scale = w[..=i + 1].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if w[i].abs() <= 1e-6 * scale || w[i + 1].abs() <= 1e-6 * scale {
                continue;
            }
            let y_scaled = w[i + 1] / w[i];
            prop_assert!(rel(v.ratio(i as i64, i as i64 - 1), y_scaled) <= 1e-9);
        }
        let _: &VSequence = &v;
    }

    #[test]
    fn equilibria_are_fixed_and_obey_jacobian_law(p in params()) {
        let s = spectrum(&p, 1e-8);
        prop_assume!(s.diagnostics.is_empty());
        for e in equilibria(&p, &s).points {
            let z = step(&p, &e.point, 0.0).unwrap();
            prop_assert!(z.max_dist(&e.point) <= 1e-10 * e.point.norm_inf().max(1.0));
            prop_assert_eq!(e.point.y, e.associated_lambda);
            let lam = e.associated_lambda;
            let mut expect: Vec<f64> = s
                .others(lam)
                .iter()
                .map(|&(re, im)| re.hypot(im) / lam.abs())
                .collect();
            expect.sort_by(|a, b| b.total_cmp(a));
            let got = e.stability.jacobian_eigen_moduli;
            for i in 0..2 {
                prop_assert!((got[i] - expect[i]).abs() <= 1e-9 * expect[i].max(1.0),
                    "{:?} vs {:?}", got, expect);
            }
        }
    }
}

fn complex_params() -> impl Strategy<Value = (Params, Spectrum)> {
    (coef(), coef(), coef(), coef()).prop_filter_map("not complex", |(a1, b1, a2, b2)| {
        let p = validate_params(a1, b1, a2, b2).ok()?;
        if p.beta2 == 0.0 {
            return None;
        }
        let s = spectrum(&p, 1e-8);
        let c = s.complex_pair?;
        let lam = s.dominant_real()?.value.abs();
        // well-conditioned constants: theta away from 0 and pi, comparable moduli
        let ok = c.theta.sin() > 0.05
            && p.beta2.abs() >= 0.1
            && lam >= 0.1
            && (0.125..=8.0).contains(&(c.rho / lam));
        ok.then_some((p, s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sigma_tau_identities((p, s) in complex_params(), z0 in point(), n in -10i64..40) {
        let c = solution::complex_constants(&p, &s, &z0);
        prop_assume!(c.as_ref().is_ok_and(|c| !c.at_fixed_point()));
        let c = c.unwrap();
        let (l, r, t) = (c.lambda, c.rho, c.theta);
        let (s0, t0) = sigma_tau(&c, n - 1);
        let (s1, t1) = sigma_tau(&c, n);
        let (s2, t2) = sigma_tau(&c, n + 1);
        let mag = |a: f64, b: f64, d: f64| (l * l * a).abs() + (2.0 * l * r * b * t.cos()).abs() + (r * r * d).abs();
        let rs = l * l * s2 - 2.0 * l * r * s1 * t.cos() + r * r * s0;
        let rt = l * l * t2 - 2.0 * l * r * t1 * t.cos() + r * r * t0;
        prop_assert!(rs.abs() <= 1e-10 * mag(s2, s1, s0).max(1e-300));
        prop_assert!(rt.abs() <= 1e-10 * mag(t2, t1, t0).max(1e-300));
        let expect = 4.0 * (r / l).powi(2 * n as i32);
        prop_assert!((s1 * s1 + t1 * t1 - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn complex_orbits_satisfy_line_relation((p, s) in complex_params(), z0 in point()) {
        let c = solution::complex_constants(&p, &s, &z0);
        prop_assume!(c.as_ref().is_ok_and(|c| !c.at_fixed_point()));
        let c = c.unwrap();
        let o = iterate(&p, z0, 20, 1e-12);
        prop_assume!(o.is_complete() && min_margin(&p, &o) > 1e-6);
        let (l, r, t) = (c.lambda, c.rho, c.theta);
        let gap = l * l - 2.0 * r * l * t.cos() + r * r;
        for (n, z) in o.points.iter().enumerate() {
            let (sg, _) = sigma_tau(&c, n as i64 - 1);
            let lhs = p.beta2 * z.x - (p.beta1 - l) * (z.y + l);
            let rhs = c.p * gap / (c.p + sg);
            let scale = (p.beta2 * z.x).abs() + ((p.beta1 - l) * (z.y + l)).abs() + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-8 * scale, "n={} {} vs {}", n, lhs, rhs);
        }
    }

    #[test]
    fn p_vanishes_exactly_on_l((p, s) in complex_params(), z0 in point(), off in 1e-6f64..1.0) {
        let lam = s.dominant_real().unwrap().value;
        let l = line_l(&p, lam).unwrap();
        let on = l.line.project(&z0);
        let c = solution::complex_constants(&p, &s, &on).unwrap();
        prop_assert!(c.p.abs() <= 1e-9, "P = {}", c.p);
        let (nx, ny) = (l.line.a, l.line.b);
        let away = Point::new(on.x + off * nx, on.y + off * ny);
        let c = solution::complex_constants(&p, &s, &away).unwrap();
        prop_assert!(c.p > 1e-9);
    }

    #[test]
    fn l_is_invariant((p, s) in complex_params(), z0 in point()) {
        let lam = s.dominant_real().unwrap().value;
        let l = line_l(&p, lam).unwrap();
        // each point of L is mapped into L
        let mut z = l.line.project(&z0);
        for _ in 0..100 {
            let Ok(next) = step(&p, &z, 1e-12) else { break };
            prop_assert!(l.line.distance(&next) <= 1e-7 * next.norm_inf().max(1.0), "{:?}", next);
            z = l.line.project(&next);
        }
        // off the dominant case L is not repelling, so plain iteration stays on it
        if lam.abs() <= s.complex_pair.unwrap().rho {
            let o = iterate(&p, l.line.project(&z0), 100, 1e-12);
            for z in &o.points {
                prop_assert!(l.line.distance(z) <= 1e-7 * z.norm_inf().max(1.0), "{:?}", z);
            }
        }
    }
}

#[test]
fn worked_sigma_vanishes_every_fourth_step() {
    let p = validate_params(1.0, 3.0, -4.0, -10.0).unwrap();
    let s = spectrum(&p, 1e-8);
    let c = solution::complex_constants(&p, &s, &Point::new(-11.0 / 20.0, 1.5)).unwrap();
    let (s0, t0) = sigma_tau(&c, 0);
    assert!((s0 - 2.0).abs() < 1e-14 && t0.abs() < 1e-14);
    let exact = solution::ComplexConstants { a: 0.0, ..c };
    assert_eq!(sigma_tau(&exact, 0), (2.0, 0.0));
    for k in 0..20 {
        let (sg, _) = sigma_tau(&c, 2 + 4 * k);
        assert!(sg.abs() <= 1e-12 * (2f64.sqrt()).powi(2 + 4 * k as i32));
    }
}

#[test]
fn conic_for_unit_circle_system() {
    // lambda = rho = 1, theta = 1 rad, beta2 = 1
    let c1 = 1f64.cos();
    let b1 = 1.0 + 2.0 * c1;
    let a2 = -(2.0 * c1 + 1.0);
    let p = validate_params(1.0 + b1 * a2, b1, a2, 1.0).unwrap();
    let s = spectrum(&p, 1e-8);
    assert_eq!(s.regime.label(), "complex_equal");
    let z0 = Point::new(0.3, 0.8);
    let conic = conic_of(&p, &s, &z0).unwrap();
    assert!(conic.eccentricity > 0.0);
    let o = iterate(&p, z0, 200, 1e-12);
    assert!(o.is_complete());
    for z in &o.points {
        assert!(conic.residual(z).abs() <= 1e-8, "{}", conic.residual(z));
    }
    let (fx, fy) = conic.to_bar(&conic.fixed_point);
    assert!(fx.hypot(fy) <= 1e-12);
    assert!(conic.residual(&conic.fixed_point).abs() > 1e-6);
}
