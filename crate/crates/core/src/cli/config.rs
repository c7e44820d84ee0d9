//! TOML run configuration and its validation.
//!
//! See `docs/config.md` for the schema. Every field is optional in the file;
//! command-line flags override file values, and each subcommand then checks
//! that the inputs it needs are present.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::census::DEFAULT_TOLERANCE;
use crate::channel::{family, family_appc, BlochVector, Coupling, Vec3};
use crate::linalg::{c, CMat4};
use crate::pair::{initial_state, DensityMatrix4, InitialKind, TimeGrid};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_CENSUS_SAMPLES: u64 = 100_000;

/// An angle given either as a number or as an expression such as `"-pi/4"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Value(f64),
    Expr(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64, String> {
        match self {
            Angle::Value(x) => Ok(*x),
            Angle::Expr(s) => parse_angle(s),
        }
    }
}

/// Parses `x`, `pi`, `-pi/4`, `2pi/3`, `0.5*pi`, `-3.1`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let compact: String = s.chars().filter(|ch| !ch.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("cannot parse angle {s:?}");
    let (sign, body) = match compact.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, compact.strip_prefix('+').unwrap_or(&compact)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix('π')) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let k = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        k * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let out = sign * value / den;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(bad())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CouplingSpec {
    Explicit { u: Vec3, v: Vec3, gamma: Option<f64> },
    Family { theta: Angle, phi: Angle, gamma: Option<f64> },
    Appc { theta: Angle, gamma: Option<f64> },
}

impl CouplingSpec {
    /// Parses the flag forms `appc:THETA`, `family:THETA,PHI` and
    /// `explicit:UX,UY,UZ,VX,VY,VZ`.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| format!("coupling {s:?} must look like KIND:ARGS"))?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        match (kind.trim(), parts.len()) {
            ("appc", 1) => Ok(CouplingSpec::Appc {
                theta: Angle::Value(parse_angle(parts[0])?),
                gamma: None,
            }),
            ("family", 2) => Ok(CouplingSpec::Family {
                theta: Angle::Value(parse_angle(parts[0])?),
                phi: Angle::Value(parse_angle(parts[1])?),
                gamma: None,
            }),
            ("explicit", 6) => {
                let x: Vec<f64> = parts
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| format!("bad number {p:?} in {s:?}")))
                    .collect::<Result<_, _>>()?;
                Ok(CouplingSpec::Explicit {
                    u: [x[0], x[1], x[2]],
                    v: [x[3], x[4], x[5]],
                    gamma: None,
                })
            }
            _ => Err(format!(
                "coupling {s:?} must be appc:THETA, family:THETA,PHI or explicit:UX,UY,UZ,VX,VY,VZ"
            )),
        }
    }

    fn gamma_override(&self) -> Option<f64> {
        match self {
            CouplingSpec::Explicit { gamma, .. }
            | CouplingSpec::Family { gamma, .. }
            | CouplingSpec::Appc { gamma, .. } => *gamma,
        }
    }

    pub fn build(&self, default_gamma: f64) -> Result<Coupling, String> {
        let gamma = self.gamma_override().unwrap_or(default_gamma);
        let base = match self {
            CouplingSpec::Explicit { u, v, .. } => return Coupling::new(*u, *v, gamma).map_err(|e| e.to_string()),
            CouplingSpec::Family { theta, phi, .. } => family(theta.radians()?, phi.radians()?),
            CouplingSpec::Appc { theta, .. } => family_appc(theta.radians()?),
        };
        base.with_gamma(gamma).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSpec {
    Plus { alpha_sq: f64 },
    Minus { alpha_sq: f64 },
    /// JSON file `{"re": [[..4]; 4], "im": [[..4]; 4]}`; `im` may be omitted.
    Matrix { path: PathBuf },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    re: [[f64; 4]; 4],
    #[serde(default)]
    im: [[f64; 4]; 4],
}

impl InitialSpec {
    /// Parses `plus:ALPHA_SQ`, `minus:ALPHA_SQ` or `matrix:PATH`.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("state {s:?} must look like KIND:ARG"))?;
        let weight = || arg.trim().parse::<f64>().map_err(|_| format!("bad alpha_sq {arg:?}"));
        match kind.trim() {
            "plus" => Ok(InitialSpec::Plus { alpha_sq: weight()? }),
            "minus" => Ok(InitialSpec::Minus { alpha_sq: weight()? }),
            "matrix" => Ok(InitialSpec::Matrix { path: PathBuf::from(arg) }),
            other => Err(format!("unknown state kind {other:?} (expected plus, minus or matrix)")),
        }
    }

    pub fn build(&self, base_dir: &Path) -> Result<DensityMatrix4, String> {
        match self {
            InitialSpec::Plus { alpha_sq } => initial_state(InitialKind::Plus, *alpha_sq).map_err(|e| e.to_string()),
            InitialSpec::Minus { alpha_sq } => initial_state(InitialKind::Minus, *alpha_sq).map_err(|e| e.to_string()),
            InitialSpec::Matrix { path } => {
                let path = base_dir.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                let m: MatrixFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                DensityMatrix4::new(CMat4::from_fn(|i, j| c(m.re[i][j], m.im[i][j])))
                    .map_err(|e| format!("{}: {e}", path.display()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_end")]
    pub end: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_end() -> f64 {
    TimeGrid::DEFAULT_END
}

fn default_points() -> usize {
    TimeGrid::DEFAULT_POINTS
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            start: 0.0,
            end: default_end(),
            points: default_points(),
        }
    }
}

impl GridSpec {
    /// Parses `START:END:POINTS`.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [start, end, points] = parts.as_slice() else {
            return Err(format!("grid {s:?} must look like START:END:POINTS"));
        };
        Ok(GridSpec {
            start: start.parse().map_err(|_| format!("bad grid start {start:?}"))?,
            end: end.parse().map_err(|_| format!("bad grid end {end:?}"))?,
            points: points.parse().map_err(|_| format!("bad grid point count {points:?}"))?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSpec {
    pub n: Option<u64>,
    pub flip_tolerance: Option<f64>,
    pub ad_tolerance: Option<f64>,
}

/// Contents of a configuration file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub qubit1: Option<CouplingSpec>,
    /// Defaults to `qubit1`.
    pub qubit2: Option<CouplingSpec>,
    pub initial: Option<InitialSpec>,
    pub grid: Option<GridSpec>,
    /// Initial Bloch vector for `evolve`.
    pub r0: Option<Vec3>,
    /// Time for `choi`.
    pub t: Option<f64>,
    /// Snapshot times for `bloch-export`.
    pub times: Option<Vec<f64>>,
    pub census: Option<CensusSpec>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    pub gamma: Option<f64>,
    pub qubit1: Option<CouplingSpec>,
    pub qubit2: Option<CouplingSpec>,
    pub initial: Option<InitialSpec>,
    pub r0: Option<Vec3>,
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub n: Option<u64>,
}

/// Fully validated inputs; entries absent from both file and flags are `None`.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Option<String>,
    pub gamma: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub qubit1: Option<Coupling>,
    pub qubit2: Option<Coupling>,
    pub initial: Option<DensityMatrix4>,
    pub grid: TimeGrid,
    pub r0: Option<BlochVector>,
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub census_n: u64,
    pub flip_tolerance: f64,
    pub ad_tolerance: f64,
}

fn field<T>(name: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|m| CliError::Validation(format!("{name}: {m}")))
}

impl Resolved {
    /// Merge `file` and `flags` and validate every value that is present.
    /// Relative paths inside the file resolve against `base_dir`.
    pub fn new(file: RunConfig, flags: Overrides, base_dir: &Path) -> Result<Self, CliError> {
        let gamma = flags.gamma.or(file.gamma).unwrap_or(1.0);
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(CliError::Validation(format!("gamma: must be finite and positive, got {gamma}")));
        }

        let spec1 = flags.qubit1.or(file.qubit1);
        let spec2 = flags.qubit2.or(file.qubit2).or_else(|| spec1.clone());
        let qubit1 = spec1.map(|s| field("qubit1", s.build(gamma))).transpose()?;
        let qubit2 = spec2.map(|s| field("qubit2", s.build(gamma))).transpose()?;
        for (name, q) in [("qubit1", &qubit1), ("qubit2", &qubit2)] {
            if let Some(c) = q {
                field(name, c.classify().map(|_| ()).map_err(|e| e.to_string()))?;
            }
        }

        let initial = match flags.initial {
            Some(spec) => Some(field("initial", spec.build(Path::new(".")))?),
            None => file.initial.map(|s| field("initial", s.build(base_dir))).transpose()?,
        };

        let g = flags.grid.or(file.grid).unwrap_or_default();
        let grid = field("grid", TimeGrid::uniform(g.start, g.end, g.points).map_err(|e| e.to_string()))?;

        let r0 = flags.r0.or(file.r0).map(BlochVector);
        if let Some(r) = &r0 {
            if !(r.norm() <= 1.0 + 1e-9) {
                return Err(CliError::Validation(format!("r0: |r0| = {} exceeds 1", r.norm())));
            }
        }

        let t = flags.t.or(file.t);
        if let Some(t) = t {
            if !(t >= 0.0) {
                return Err(CliError::Validation(format!("t: must be non-negative, got {t}")));
            }
        }

        let times = flags.times.or(file.times);
        if let Some(ts) = &times {
            field("times", TimeGrid::new(ts.clone()).map(|_| ()).map_err(|e| e.to_string()))?;
        }

        let census = file.census.unwrap_or_default();
        let census_n = flags.n.or(census.n).unwrap_or(DEFAULT_CENSUS_SAMPLES);
        if census_n == 0 {
            return Err(CliError::Validation("census.n: must be at least 1".into()));
        }
        let flip_tolerance = census.flip_tolerance.unwrap_or(DEFAULT_TOLERANCE);
        let ad_tolerance = census.ad_tolerance.unwrap_or(DEFAULT_TOLERANCE);
        for (name, tol) in [("census.flip_tolerance", flip_tolerance), ("census.ad_tolerance", ad_tolerance)] {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(CliError::Validation(format!("{name}: must be finite and non-negative")));
            }
        }

        Ok(Resolved {
            scenario: file.scenario,
            gamma,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.or_else(|| file.out.map(|p| base_dir.join(p))),
            qubit1,
            qubit2,
            initial,
            grid,
            r0,
            t,
            times,
            census_n,
            flip_tolerance,
            ad_tolerance,
        })
    }
}
