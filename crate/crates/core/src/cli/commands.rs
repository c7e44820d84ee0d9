//! Subcommand bodies. Each returns the full output document as a string.

use std::fmt::Write;

use serde::Serialize;

use super::config::Resolved;
use super::sphere::geodesic_sphere;
use super::CliError;
use crate::census::run_census;
use crate::channel::{asymptote, BlochVector, Coupling, CouplingClass, Vec3};
use crate::choi::{choi_of_channel, kraus_of_choi};
use crate::linalg::CMat;
use crate::pair::{lambda_trajectory, DensityMatrix4};
use crate::sde::assess;

/// Mesh refinement giving 642 points.
const SPHERE_LEVEL: u32 = 3;

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn require<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("{what} is required for this command")))
}

fn couplings(r: &Resolved) -> Result<(Coupling, Coupling), CliError> {
    Ok((*require(&r.qubit1, "qubit1")?, *require(&r.qubit2, "qubit2")?))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ComplexMatrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl<const N: usize> From<&CMat<N>> for ComplexMatrix {
    fn from(m: &CMat<N>) -> Self {
        ComplexMatrix {
            re: m.0.iter().map(|row| row.iter().map(|z| z.re).collect()).collect(),
            im: m.0.iter().map(|row| row.iter().map(|z| z.im).collect()).collect(),
        }
    }
}

#[derive(Serialize)]
struct CouplingRecord {
    u: Vec3,
    v: Vec3,
    gamma: f64,
    class: CouplingClass,
}

impl CouplingRecord {
    fn new(c: &Coupling) -> Result<Self, CliError> {
        Ok(CouplingRecord {
            u: c.u(),
            v: c.v(),
            gamma: c.gamma(),
            class: c.classify()?,
        })
    }
}

#[derive(Serialize)]
struct EvolvePoint {
    t: f64,
    r: Vec3,
}

#[derive(Serialize)]
struct EvolveRecord<'a> {
    scenario: Option<&'a str>,
    coupling: CouplingRecord,
    r0: Vec3,
    asymptote: Vec3,
    points: Vec<EvolvePoint>,
}

pub fn evolve(r: &Resolved) -> Result<String, CliError> {
    let c = require(&r.qubit1, "qubit1")?;
    let r0 = require(&r.r0, "r0")?;
    let points = r
        .grid
        .times()
        .iter()
        .map(|&t| Ok(EvolvePoint { t, r: c.evolve(r0, t)?.0 }))
        .collect::<Result<Vec<_>, CliError>>()?;
    to_json(&EvolveRecord {
        scenario: r.scenario.as_deref(),
        coupling: CouplingRecord::new(c)?,
        r0: r0.0,
        asymptote: asymptote(c, r0)?.0,
        points,
    })
}

pub fn trajectory(r: &Resolved) -> Result<String, CliError> {
    let (c1, c2) = couplings(r)?;
    let rho0: &DensityMatrix4 = require(&r.initial, "initial")?;
    let traj = lambda_trajectory(rho0, &c1, &c2, &r.grid)?;
    let mut out = String::from("t,lambda,concurrence\n");
    for p in traj {
        writeln!(out, "{},{},{}", fmt_f64(p.t), fmt_f64(p.lambda), fmt_f64(p.concurrence)).expect("write to String");
    }
    Ok(out)
}

pub fn sde_check(r: &Resolved) -> Result<String, CliError> {
    let (c1, c2) = couplings(r)?;
    let rho0 = require(&r.initial, "initial")?;
    to_json(&assess(rho0, &c1, &c2, &r.grid)?)
}

#[derive(Serialize)]
struct ChoiRecord {
    t: f64,
    gamma: f64,
    choi: ComplexMatrix,
    eigenvalues: [f64; 4],
    kraus: Vec<ComplexMatrix>,
}

pub fn choi(r: &Resolved) -> Result<String, CliError> {
    let c = require(&r.qubit1, "qubit1")?;
    let t = r.t.unwrap_or(0.0);
    let choi = choi_of_channel(c, t)?;
    let kraus = kraus_of_choi(&choi)?;
    to_json(&ChoiRecord {
        t,
        gamma: c.gamma(),
        choi: choi.matrix().into(),
        eigenvalues: choi.eigenvalues()?,
        kraus: kraus.ops().iter().map(ComplexMatrix::from).collect(),
    })
}

pub fn census(r: &Resolved) -> Result<String, CliError> {
    to_json(&run_census(r.census_n, r.seed, r.flip_tolerance, r.ad_tolerance))
}

pub fn bloch_export(r: &Resolved) -> Result<String, CliError> {
    let c = require(&r.qubit1, "qubit1")?;
    let times = r.times.clone().unwrap_or_else(|| r.grid.times().to_vec());
    let sphere = geodesic_sphere(SPHERE_LEVEL);
    let mut out = String::from("t,x0,y0,z0,x,y,z\n");
    for &t in &times {
        let map = c.bloch_map(t)?;
        for p in &sphere {
            let image = map.apply(&BlochVector(*p));
            let fields = [t, p[0], p[1], p[2], image.0[0], image.0[1], image.0[2]].map(fmt_f64);
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    Ok(out)
}
