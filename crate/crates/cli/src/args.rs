//! Flag definitions and the flat `key=value` config file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ratsys_core::{Point, Tolerances};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "ratsys",
    version,
    about = "Closed-form analysis of x' = (a1 + b1 x)/y, y' = (a2 + b2 x)/y",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file mirroring the long flags; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectrum, equilibria, global dynamics and (with --initial) the fate of one orbit.
    #[command(args_override_self = true)]
    Classify(Common),
    /// Trajectory by iteration next to the closed form.
    #[command(args_override_self = true)]
    Simulate(Common),
    /// Forbidden lines up to the horizon.
    #[command(args_override_self = true)]
    Forbidden(Common),
    /// Regime and verdict over a grid of coefficients.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Static SVG phase portrait.
    #[command(args_override_self = true)]
    Portrait(PortraitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct TolArgs {
    /// Relative guard on the denominator y.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub divide_tol: f64,
    /// Relative distance under which roots merge.
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub cluster_tol: f64,
    /// Point-to-line distance for membership tests.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub membership_tol: f64,
    /// Max-norm tolerance for period detection.
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub period_tol: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            divide: self.divide_tol,
            cluster: self.cluster_tol,
            membership: self.membership_tol,
            period: self.period_tol,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Coefficients alpha1,beta1,alpha2,beta2.
    #[arg(long, value_name = "A1,B1,A2,B2", allow_hyphen_values = true, value_parser = parse_params)]
    pub params: [f64; 4],
    /// Initial condition x0,y0.
    #[arg(long, value_name = "X0,Y0", allow_hyphen_values = true, value_parser = parse_point)]
    pub initial: Option<Point>,
    /// Number of steps, and the last step of the forbidden-line union.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output format; defaults to json for classify, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for sampled initial conditions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Visible window xmin,xmax,ymin,ymax.
    #[arg(long, value_name = "XMIN,XMAX,YMIN,YMAX", allow_hyphen_values = true,
          default_value = "-5,5,-5,5", value_parser = parse_viewport)]
    pub viewport: [f64; 4],
    /// Number of sampled orbits (in addition to --initial).
    #[arg(long, default_value_t = 8)]
    pub orbits: usize,
    /// Width and height of the image in pixels.
    #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(16..))]
    pub size: u32,
}

#[derive(Args, Clone, Debug)]
pub struct SweepArgs {
    /// Range LO:HI[:N] (or a single value) for alpha1.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub alpha1: String,
    /// Range LO:HI[:N] (or a single value) for beta1.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub beta1: String,
    /// Range LO:HI[:N] (or a single value) for alpha2.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub alpha2: String,
    /// Range LO:HI[:N] (or a single value) for beta2.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub beta2: String,
    /// Samples per axis for ranges without an explicit count.
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output format (csv only).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn reals<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!(
            "expected {N} comma-separated numbers, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        let v: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
        *o = v;
    }
    Ok(out)
}

fn parse_params(s: &str) -> Result<[f64; 4], String> {
    reals::<4>(s)
}

fn parse_point(s: &str) -> Result<Point, String> {
    reals::<2>(s).map(|[x, y]| Point::new(x, y))
}

fn parse_viewport(s: &str) -> Result<[f64; 4], String> {
    reals::<4>(s)
}

/// One axis of a sweep grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: u64,
}

impl Axis {
    pub fn parse(name: &str, s: &str, default_n: u64) -> Result<Axis, CliError> {
        let bad = |why: &str| CliError::Usage(format!("malformed range for {name} `{s}`: {why}"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| match p.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(bad("not a finite number")),
        };
        let axis = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Axis { lo: v, hi: v, n: 1 }
            }
            [lo, hi] => Axis {
                lo: num(lo)?,
                hi: num(hi)?,
                n: default_n,
            },
            [lo, hi, n] => Axis {
                lo: num(lo)?,
                hi: num(hi)?,
                n: n.parse()
                    .map_err(|_| bad("sample count is not a natural number"))?,
            },
            _ => return Err(bad("expected LO:HI[:N]")),
        };
        if axis.n == 0 || axis.lo > axis.hi {
            return Err(bad("need LO <= HI and N >= 1"));
        }
        Ok(if axis.lo == axis.hi {
            Axis { n: 1, ..axis }
        } else {
            axis
        })
    }

    pub fn value(&self, i: u64) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            let t = i as f64 / (self.n - 1) as f64;
            self.lo + (self.hi - self.lo) * t
        }
    }
}

/// `key=value` lines (blank lines and `#` comments ignored) as `--key=value` arguments.
pub fn config_args(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let k = k.trim().trim_start_matches("--");
        if k == "config" {
            return Err(CliError::Usage("config files cannot nest".into()));
        }
        out.push(format!("--{k}={}", v.trim()));
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` in raw arguments.
pub fn find_config(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        assert_eq!(
            Axis::parse("a", "2", 5).unwrap(),
            Axis {
                lo: 2.0,
                hi: 2.0,
                n: 1
            }
        );
        assert_eq!(
            Axis::parse("a", "-1:1", 5).unwrap(),
            Axis {
                lo: -1.0,
                hi: 1.0,
                n: 5
            }
        );
        let a = Axis::parse("a", "-1:1:3", 5).unwrap();
        assert_eq!([a.value(0), a.value(1), a.value(2)], [-1.0, 0.0, 1.0]);
        assert_eq!(Axis::parse("a", "3:3:9", 5).unwrap().n, 1);
        for bad in ["", "1:", "2:1", "0:1:0", "a:b", "1:2:3:4", "0:inf"] {
            assert!(Axis::parse("a", bad, 5).is_err(), "{bad}");
        }
    }

    #[test]
    fn reals_reject_garbage() {
        assert_eq!(
            parse_params("1, 3,-4,-10").unwrap(),
            [1.0, 3.0, -4.0, -10.0]
        );
        assert!(parse_params("1,2,3").is_err());
        assert!(parse_params("1,2,x,4").is_err());
        assert!(parse_params("1,2,nan,4").is_err());
        assert!(positive("0").is_err());
        assert!(positive("-1e-3").is_err());
    }

    #[test]
    fn find_config_both_spellings() {
        let a: Vec<String> = ["x", "classify", "--config", "f.cfg"]
            .map(String::from)
            .to_vec();
        assert_eq!(find_config(&a), Some(PathBuf::from("f.cfg")));
        let a: Vec<String> = ["x", "--config=g.cfg", "classify"]
            .map(String::from)
            .to_vec();
        assert_eq!(find_config(&a), Some(PathBuf::from("g.cfg")));
    }
}
