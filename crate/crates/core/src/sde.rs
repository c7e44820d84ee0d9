//! Sudden death of entanglement: closed-form predictions, numerical detection
//! of the death time, and an independent integrator of the Bloch equation.

use serde::Serialize;

use crate::channel::{cross, dot, BlochVector, Coupling, CouplingClass, Vec3};
use crate::error::{Error, Result};
use crate::linalg::{c, kron, CMat2};
use crate::pair::{concurrence, lambda_at, lambda_trajectory, DensityMatrix4, TimeGrid, TrajectoryPoint};

/// Diagonal entries of the rotated state at or below this count as zeros.
pub const ZERO_DIAGONAL_TOL: f64 = 1e-12;

/// `||w| - 1/2|` at or below this counts as standard amplitude damping.
pub const AD_TOL: f64 = 1e-9;

/// Concurrence at or below this counts as separable.
pub const ENTANGLEMENT_TOL: f64 = 1e-10;

/// Noise floor of a computed `Λ`. Grid values must fall to `-LAMBDA_NOISE`
/// before a crossing is reported, and `Λ∞ >= -LAMBDA_NOISE` means no forced
/// crossing.
pub const LAMBDA_NOISE: f64 = 1e-9;

/// Largest grid gap (in units of `1/γ`) allowed around a sign change.
pub const MAX_BRACKET_GAP: f64 = 0.5;

/// Bisection stops once the bracket is narrower than this (units of `1/γ`).
pub const TAU_PRECISION: f64 = 1e-10;

/// Doublings of the horizon tried when `Λ∞ < 0` but the grid shows no crossing.
pub const MAX_HORIZON_DOUBLINGS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    Yes,
    No,
    NotCovered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Theorem1,
    Theorem2,
    Numerical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdeVerdict {
    pub predicted: Prediction,
    pub lambda_inf: f64,
    pub tau: Option<f64>,
    pub method: Method,
}

/// Initial state seen in the frame where both flip axes are `ẑ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatedState {
    pub rho_tilde: DensityMatrix4,
    pub u_matrices: [CMat2; 2],
}

/// Unitary `U` with `U σz U† = û·σ`; exactly `𝟙` when `û = ẑ`.
pub fn rotation_for(u_hat: &Vec3) -> CMat2 {
    let [u1, u2, u3] = *u_hat;
    if (u1.abs() + u2.abs() + (u3 - 1.0).abs()) <= 1e-12 {
        return CMat2::identity();
    }
    let s = u1.hypot(u2);
    if s <= 1e-12 {
        // û = -ẑ: swap |0⟩ and |1⟩
        return CMat2::from_real([[0.0, -1.0], [1.0, 0.0]]);
    }
    let phi = 0.5 * u3.clamp(-1.0, 1.0).acos();
    let (sp, cp) = phi.sin_cos();
    let e = c(u1 / s, u2 / s);
    crate::linalg::CMat([[c(cp, 0.0), -e.conj() * sp], [e * sp, c(cp, 0.0)]])
}

pub fn rotated_state(rho0: &DensityMatrix4, u_hat1: &Vec3, u_hat2: &Vec3) -> Result<RotatedState> {
    let u_matrices = [rotation_for(u_hat1), rotation_for(u_hat2)];
    let u = kron(&u_matrices[0], &u_matrices[1]);
    let rho_tilde = DensityMatrix4::new(rho0.matrix().conjugate_by(&u.adjoint()))?;
    Ok(RotatedState { rho_tilde, u_matrices })
}

fn require_entangled(rho0: &DensityMatrix4) -> Result<()> {
    let concurrence = concurrence(rho0)?.concurrence;
    if concurrence <= ENTANGLEMENT_TOL {
        return Err(Error::NotEntangled { concurrence });
    }
    Ok(())
}

fn flip_axis(c: &Coupling, qubit: usize) -> Result<Vec3> {
    match c.classify()? {
        CouplingClass::Flip { u_hat } => Ok(u_hat),
        _ => Err(Error::WrongClass { qubit, expected: "flip" }),
    }
}

fn dissipative_w(c: &Coupling, qubit: usize) -> Result<f64> {
    match c.classify()? {
        CouplingClass::Dissipative(d) => Ok(d.w_norm()),
        _ => Err(Error::WrongClass { qubit, expected: "dissipative" }),
    }
}

/// Flip couplings on both qubits: death happens iff the rotated initial state
/// has no zero on its diagonal.
///
/// The long-time state is the diagonal of `ρ̃0`, whose `Λ` is
/// `-2 √min(r11 r44, r22 r33)`.
pub fn predict_flip(rho0: &DensityMatrix4, c1: &Coupling, c2: &Coupling) -> Result<SdeVerdict> {
    let u1 = flip_axis(c1, 1)?;
    let u2 = flip_axis(c2, 2)?;
    require_entangled(rho0)?;
    let r = rotated_state(rho0, &u1, &u2)?.rho_tilde.diagonal();
    let no_zeros = r.iter().all(|x| *x > ZERO_DIAGONAL_TOL);
    let product = (r[0] * r[3]).min(r[1] * r[2]).max(0.0);
    Ok(SdeVerdict {
        predicted: if no_zeros { Prediction::Yes } else { Prediction::No },
        lambda_inf: -2.0 * product.sqrt() + 0.0,
        tau: None,
        method: Method::Theorem1,
    })
}

/// Dissipative couplings on both qubits: death is guaranteed when neither is
/// standard amplitude damping (`|w| ≠ 1/2`).
pub fn predict_dissipative(c1: &Coupling, c2: &Coupling) -> Result<SdeVerdict> {
    let w1 = dissipative_w(c1, 1)?;
    let w2 = dissipative_w(c2, 2)?;
    let covered = (w1 - 0.5).abs() > AD_TOL && (w2 - 0.5).abs() > AD_TOL;
    let p1 = (1.0 - 4.0 * w1 * w1).max(0.0);
    let p2 = (1.0 - 4.0 * w2 * w2).max(0.0);
    Ok(SdeVerdict {
        predicted: if covered { Prediction::Yes } else { Prediction::NotCovered },
        lambda_inf: -0.5 * (p1 * p2).sqrt() + 0.0,
        tau: None,
        method: Method::Theorem2,
    })
}

/// `Λ` of the `t → ∞` state, obtained from the limiting channels.
pub fn lambda_inf_numeric(rho0: &DensityMatrix4, c1: &Coupling, c2: &Coupling) -> Result<f64> {
    Ok(lambda_at(rho0, c1, c2, f64::INFINITY)?.lambda)
}

/// First time at which `Λ` drops to zero, refined by bisection on `lambda_at`.
///
/// `gamma` sets the time unit for the coarse-grid check. When the grid shows no
/// crossing but `lambda_inf < -LAMBDA_NOISE`, the horizon is doubled until one
/// is found.
pub fn detect_tau(
    traj: &[TrajectoryPoint],
    gamma: f64,
    lambda_inf: Option<f64>,
    mut lambda_at: impl FnMut(f64) -> Result<f64>,
) -> Result<Option<f64>> {
    let Some(first) = traj.first() else {
        return Err(Error::InvalidGrid("empty trajectory".into()));
    };
    if first.lambda <= 0.0 {
        return Err(Error::NotEntangled { concurrence: first.concurrence });
    }

    let mut lo = first.t;
    let mut hi = None;
    for p in traj {
        if p.lambda <= -LAMBDA_NOISE {
            hi = Some(p.t);
            break;
        }
        if p.lambda > 0.0 {
            lo = p.t;
        }
    }

    let hi = match hi {
        Some(hi) => {
            let gap = (hi - lo) * gamma;
            if gap > MAX_BRACKET_GAP {
                return Err(Error::GridTooCoarse { gap });
            }
            hi
        }
        None => {
            let forced = matches!(lambda_inf, Some(l) if l < -LAMBDA_NOISE);
            if !forced {
                return Ok(None);
            }
            let mut horizon = traj[traj.len() - 1].t.max(1.0 / gamma);
            let mut found = None;
            for _ in 0..MAX_HORIZON_DOUBLINGS {
                horizon *= 2.0;
                let l = lambda_at(horizon)?;
                if l <= -LAMBDA_NOISE {
                    found = Some(horizon);
                    break;
                }
                if l > 0.0 {
                    lo = horizon;
                }
            }
            match found {
                Some(h) => h,
                None => {
                    return Err(Error::TauNotBracketed {
                        lambda_inf: lambda_inf.unwrap_or(f64::NAN),
                        horizon,
                    })
                }
            }
        }
    };

    let (mut lo, mut hi) = (lo, hi);
    while (hi - lo) * gamma > TAU_PRECISION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lambda_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Theorem-based prediction where one applies, `τ` from the trajectory on
/// `grid`; a flip/dissipative mix is decided numerically.
pub fn assess(rho0: &DensityMatrix4, c1: &Coupling, c2: &Coupling, grid: &TimeGrid) -> Result<SdeVerdict> {
    require_entangled(rho0)?;
    let mut verdict = match (c1.classify()?, c2.classify()?) {
        (CouplingClass::Flip { .. }, CouplingClass::Flip { .. }) => predict_flip(rho0, c1, c2)?,
        (CouplingClass::Dissipative(_), CouplingClass::Dissipative(_)) => predict_dissipative(c1, c2)?,
        _ => SdeVerdict {
            predicted: Prediction::No,
            lambda_inf: lambda_inf_numeric(rho0, c1, c2)?,
            tau: None,
            method: Method::Numerical,
        },
    };
    let traj = lambda_trajectory(rho0, c1, c2, grid)?;
    let gamma = c1.gamma().max(c2.gamma());
    verdict.tau = detect_tau(&traj, gamma, Some(verdict.lambda_inf), |t| {
        Ok(lambda_at(rho0, c1, c2, t)?.lambda)
    })?;
    if verdict.method == Method::Numerical && verdict.tau.is_some() {
        verdict.predicted = Prediction::Yes;
    }
    Ok(verdict)
}

fn bloch_rhs(c: &Coupling, r: &Vec3) -> Vec3 {
    let (u, v) = (c.u(), c.v());
    let w = cross(&u, &v);
    let (ur, vr) = (dot(&u, r), dot(&v, r));
    let k = 4.0 * c.gamma();
    std::array::from_fn(|i| k * (u[i] * ur + v[i] * vr + 2.0 * w[i] - r[i]))
}

fn rk4_step(c: &Coupling, r: &Vec3, h: f64) -> Vec3 {
    let add = |a: &Vec3, b: &Vec3, s: f64| -> Vec3 { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = bloch_rhs(c, r);
    let k2 = bloch_rhs(c, &add(r, &k1, 0.5 * h));
    let k3 = bloch_rhs(c, &add(r, &k2, 0.5 * h));
    let k4 = bloch_rhs(c, &add(r, &k3, h));
    std::array::from_fn(|i| r[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Classical RK4 on `dr/dt = 4γ{u(u·r) + v(v·r) + 2w - r}`.
///
/// The step is capped at `1e-3/γ` and shrunk so that it divides `t_end`.
pub fn oracle_rk4(r0: &BlochVector, c: &Coupling, t_end: f64, dt: f64) -> BlochVector {
    oracle_rk4_samples(r0, c, &[t_end], dt)[0]
}

/// RK4 states at each of the increasing `times`, integrated in one pass.
pub fn oracle_rk4_samples(r0: &BlochVector, c: &Coupling, times: &[f64], dt: f64) -> Vec<BlochVector> {
    let dt = dt.min(1e-3 / c.gamma());
    let mut r = r0.0;
    let mut t = 0.0;
    times
        .iter()
        .map(|&target| {
            let span = target - t;
            if span > 0.0 {
                let steps = (span / dt).ceil() as usize;
                let h = span / steps as f64;
                for _ in 0..steps {
                    r = rk4_step(c, &r, h);
                }
                t = target;
            }
            BlochVector(r)
        })
        .collect()
}
