//! The five subcommands. Each returns the full output text.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use ratsys_core::{
    check_initial, classify_behavior, conic_of, equilibria, forbidden_lines, global_dynamics,
    iterate, line_l, period2_criterion, solve, spectrum, validate_params, ClassifyOptions, Error,
    LineEq, ModulusOrder, OrbitStatus, Params, Point, RegimeTag, Spectrum, Tolerances,
};

use crate::args::{Axis, Common, Format, PortraitArgs, SweepArgs};
use crate::json::{self, float};
use crate::svg::{Canvas, Viewport};
use crate::CliError;

/// Grid cells accepted by `sweep`.
pub const MAX_GRID: u128 = 1_000_000;

fn params(c: &Common) -> Result<Params, CliError> {
    let [a1, b1, a2, b2] = c.params;
    validate_params(a1, b1, a2, b2).map_err(|e| match e {
        Error::DegenerateRiccati { .. } => CliError::Degenerate(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })
}

fn format_of(
    f: Option<Format>,
    default: Format,
    allowed: &[Format],
    cmd: &str,
) -> Result<Format, CliError> {
    let f = f.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!(
            "{cmd} does not support --format {}",
            f.name()
        )))
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn point(z: &Point) -> Value {
    json!({"x": z.x, "y": z.y})
}

fn config_echo(c: &Common, format: Format) -> Value {
    let [a1, b1, a2, b2] = c.params;
    json!({
        "params": {"alpha1": a1, "beta1": b1, "alpha2": a2, "beta2": b2},
        "initial": c.initial.as_ref().map(point),
        "horizon": c.horizon,
        "tolerances": to_value(&c.tol.tolerances()),
        "format": format.name(),
        "seed": c.seed,
    })
}

fn spectrum_json(s: &Spectrum) -> Value {
    let mut roots = Vec::new();
    for r in &s.real_roots {
        roots.push(json!({
            "re": r.value, "im": 0.0, "modulus": r.value.abs(), "multiplicity": r.multiplicity
        }));
    }
    if let Some(c) = s.complex_pair {
        for sign in [1.0, -1.0] {
            roots.push(json!({
                "re": c.re(), "im": sign * c.im(), "modulus": c.rho, "multiplicity": 1
            }));
        }
    }
    json!({
        "roots": roots,
        "spectral_radius": s.spectral_radius,
        "regime": s.regime.label(),
        "regime_tag": to_value(&s.regime),
    })
}

fn line_json(n: usize, l: &LineEq) -> Value {
    json!({"n": n, "a": l.a, "b": l.b, "c": l.c})
}

pub fn classify(c: &Common) -> Result<String, CliError> {
    let format = format_of(c.format, Format::Json, &[Format::Json], "classify")?;
    let p = params(c)?;
    let tol = c.tol.tolerances();
    let horizon = c.horizon as usize;
    let s = spectrum(&p, tol.cluster);
    let eqs = equilibria(&p, &s);
    let global = global_dynamics(&p, &s);
    let fs = forbidden_lines(&p, horizon);
    let opts = ClassifyOptions {
        tol,
        forbidden_horizon: horizon,
        ..ClassifyOptions::default()
    };
    let report = c.initial.map(|z0| classify_behavior(&p, &z0, &opts));
    let period2 = period2_criterion(&p);
    let verdict = match &report {
        Some(r) => r.behavior.label().to_string(),
        None => global.label(),
    };
    let diagnostics = report.as_ref().map_or(&s.diagnostics, |r| &r.diagnostics);
    let v = json!({
        "command": "classify",
        "config": config_echo(c, format),
        "spectrum": spectrum_json(&s),
        "equilibria": to_value(&eqs),
        "period2": {
            "exists": period2.is_some(),
            "cycle": period2.map(|cy| cy.iter().map(point).collect::<Vec<_>>()),
        },
        "global": {"verdict": global.label(), "detail": to_value(&global)},
        "behavior": report.as_ref().map(|r| json!({
            "verdict": r.behavior.label(),
            "detail": to_value(&r.behavior),
        })),
        "verdict": verdict,
        "forbidden": {
            "horizon": horizon,
            "lines": fs.lines.iter().map(|l| line_json(l.witness_n, &l.eq)).collect::<Vec<_>>(),
            "skipped": to_value(&fs.skipped),
        },
        "diagnostics": diagnostics,
    });
    Ok(json::to_string(&v))
}

struct Row {
    n: usize,
    z: Point,
    hat: Option<Point>,
}

impl Row {
    fn discrepancy(&self) -> Option<f64> {
        self.hat
            .map(|h| h.max_dist(&self.z) / self.z.norm_inf().max(1.0))
    }
}

fn status_name(s: &OrbitStatus) -> (&'static str, usize) {
    match *s {
        OrbitStatus::Complete { horizon } => ("complete", horizon),
        OrbitStatus::HitForbidden { step } => ("forbidden", step),
        OrbitStatus::Diverged { step } => ("diverged", step),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

pub fn simulate(c: &Common) -> Result<String, CliError> {
    let format = format_of(
        c.format,
        Format::Csv,
        &[Format::Csv, Format::Json],
        "simulate",
    )?;
    let p = params(c)?;
    let z0 = c
        .initial
        .ok_or_else(|| CliError::Usage("simulate needs --initial".into()))?;
    let tol = c.tol.tolerances();
    let horizon = c.horizon as usize;
    if let Some(n) = check_initial(&p, &z0, horizon, tol.membership, tol.divide).confirmed() {
        return Err(CliError::Forbidden { witness: n });
    }
    let o = iterate(&p, z0, horizon, tol.divide);
    let rows: Vec<Row> = o
        .points
        .iter()
        .enumerate()
        .map(|(n, z)| Row {
            n,
            z: *z,
            hat: solve(&p, &z0, n, tol.divide).ok().filter(Point::is_finite),
        })
        .collect();
    let max_disc = rows
        .iter()
        .filter_map(Row::discrepancy)
        .fold(0.0f64, f64::max);
    let (status, step) = status_name(&o.status);
    match format {
        Format::Json => {
            let v = json!({
                "command": "simulate",
                "config": config_echo(c, format),
                "rows": rows.iter().map(|r| json!({
                    "n": r.n,
                    "x": r.z.x,
                    "y": r.z.y,
                    "x_hat": r.hat.map(|h| h.x),
                    "y_hat": r.hat.map(|h| h.y),
                    "discrepancy": r.discrepancy(),
                })).collect::<Vec<_>>(),
                "status": {"kind": status, "step": step},
                "max_discrepancy": max_disc,
            });
            Ok(json::to_string(&v))
        }
        _ => {
            let mut out: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        float(r.z.x),
                        float(r.z.y),
                        opt(r.hat.map(|h| h.x)),
                        opt(r.hat.map(|h| h.y)),
                        opt(r.discrepancy()),
                        "ok".into(),
                    ]
                })
                .collect();
            if status != "complete" {
                let mut r = vec![String::new(); 7];
                r[0] = step.to_string();
                r[6] = status.into();
                out.push(r);
            }
            csv_text(
                &["n", "x", "y", "x_hat", "y_hat", "discrepancy", "status"],
                out,
            )
        }
    }
}

pub fn forbidden(c: &Common) -> Result<String, CliError> {
    let format = format_of(
        c.format,
        Format::Csv,
        &[Format::Csv, Format::Json],
        "forbidden",
    )?;
    let p = params(c)?;
    let fs = forbidden_lines(&p, c.horizon as usize);
    match format {
        Format::Json => {
            let v = json!({
                "command": "forbidden",
                "config": config_echo(c, format),
                "lines": fs.lines.iter().map(|l| line_json(l.witness_n, &l.eq)).collect::<Vec<_>>(),
                "skipped": to_value(&fs.skipped),
            });
            Ok(json::to_string(&v))
        }
        _ => {
            let rows = fs
                .lines
                .iter()
                .map(|l| {
                    vec![
                        l.witness_n.to_string(),
                        float(l.eq.a),
                        float(l.eq.b),
                        float(l.eq.c),
                    ]
                })
                .collect();
            csv_text(&["n", "a", "b", "c"], rows)
        }
    }
}

fn sweep_cell(v: [f64; 4], tol: &Tolerances) -> Vec<String> {
    let mut row: Vec<String> = v.iter().map(|&x| float(x)).collect();
    match validate_params(v[0], v[1], v[2], v[3]) {
        Ok(p) => {
            let s = spectrum(&p, tol.cluster);
            let eqs = equilibria(&p, &s);
            row.extend([
                s.regime.label().to_string(),
                eqs.len().to_string(),
                eqs.line.is_some().to_string(),
                period2_criterion(&p).is_some().to_string(),
                global_dynamics(&p, &s).label(),
            ]);
        }
        Err(e) => {
            let tag = match e {
                Error::DegenerateRiccati { .. } => "degenerate",
                _ => "invalid",
            };
            row.extend([
                tag.to_string(),
                String::new(),
                String::new(),
                String::new(),
                tag.to_string(),
            ]);
        }
    }
    row
}

pub fn sweep(a: &SweepArgs) -> Result<String, CliError> {
    format_of(a.format, Format::Csv, &[Format::Csv], "sweep")?;
    let axes = [
        Axis::parse("alpha1", &a.alpha1, a.samples)?,
        Axis::parse("beta1", &a.beta1, a.samples)?,
        Axis::parse("alpha2", &a.alpha2, a.samples)?,
        Axis::parse("beta2", &a.beta2, a.samples)?,
    ];
    let total: u128 = axes.iter().map(|x| x.n as u128).product();
    if total > MAX_GRID {
        return Err(CliError::Usage(format!(
            "grid has {total} cells; at most {MAX_GRID} allowed"
        )));
    }
    let tol = a.tol.tolerances();
    let rows: Vec<Vec<String>> = (0..total as u64)
        .into_par_iter()
        .map(|mut idx| {
            let mut v = [0.0; 4];
            for k in (0..4).rev() {
                v[k] = axes[k].value(idx % axes[k].n);
                idx /= axes[k].n;
            }
            sweep_cell(v, &tol)
        })
        .collect();
    csv_text(
        &[
            "alpha1",
            "beta1",
            "alpha2",
            "beta2",
            "regime",
            "equilibria",
            "equilibrium_line",
            "period2_exists",
            "verdict",
        ],
        rows,
    )
}

pub fn portrait(a: &PortraitArgs) -> Result<String, CliError> {
    let c = &a.common;
    format_of(c.format, Format::Svg, &[Format::Svg], "portrait")?;
    let view = Viewport::new(a.viewport).ok_or_else(|| {
        CliError::Usage("viewport must satisfy xmin < xmax and ymin < ymax".into())
    })?;
    let p = params(c)?;
    let tol = c.tol.tolerances();
    let s = spectrum(&p, tol.cluster);
    let eqs = equilibria(&p, &s);
    let mut cv = Canvas::new(view, a.size);
    cv.comment(&format!(
        "params {},{},{},{} regime {}",
        p.alpha1,
        p.beta1,
        p.alpha2,
        p.beta2,
        s.regime.label()
    ));
    cv.line(&LineEq::new(0.0, 1.0, 0.0), "axis", false);
    cv.line(&LineEq::new(1.0, 0.0, 0.0), "axis", false);
    if s.complex_pair.is_some() {
        let lambda = s.dominant_real().expect("one real root").value;
        if let Ok(ll) = line_l(&p, lambda) {
            cv.line(&ll.line, "line-l", true);
            cv.line(&ll.parallel, "line-parallel", true);
        }
    }
    if let Some(l) = eqs.line {
        cv.line(&l.line, "equilibrium-line", false);
    }
    let mut starts: Vec<Point> = c.initial.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    for _ in 0..a.orbits {
        starts.push(Point::new(
            rng.gen_range(view.xmin..view.xmax),
            rng.gen_range(view.ymin..view.ymax),
        ));
    }
    if s.regime == RegimeTag::ComplexPair(ModulusOrder::Equal) {
        for z in &starts {
            if let Ok(k) = conic_of(&p, &s, z) {
                for run in k.polylines(2880, 1e12) {
                    cv.path(&run, "conic");
                }
            }
        }
    }
    let marker = 1.2;
    for z in &starts {
        let o = iterate(&p, *z, c.horizon as usize, tol.divide);
        cv.polyline(&o.points, "orbit");
        for q in &o.points {
            cv.marker(q, marker, "orbit-point");
        }
    }
    for e in &eqs.points {
        cv.marker(&e.point, 4.0, "equilibrium");
    }
    Ok(cv.finish())
}
