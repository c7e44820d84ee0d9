//! Two independent qubits: product-channel evolution and concurrence.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 1 as the left tensor
//! factor and `|0⟩ = ↑`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{kraus_flip, Coupling, CouplingClass};
use crate::choi::{choi_of_channel, kraus_of_choi, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, psd_eig, sigma_y, sqrt_psd, CMat4, HERMITIAN_TOL, RANK_DUST};

/// Trace tolerance of a [`DensityMatrix4`].
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted in a [`DensityMatrix4`].
pub const STATE_PSD_TOL: f64 = 1e-9;
/// Completeness slack accepted by [`evolve_pair`].
pub const PAIR_COMPLETENESS_TOL: f64 = 1e-8;

/// Two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix4(CMat4);

impl DensityMatrix4 {
    pub fn new(m: CMat4) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = m.hermiticity_deviation();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let min = herm_eig(&m)?.values[3];
        if min < -STATE_PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix4(m))
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` must be normalized.
    pub fn pure(psi: [crate::linalg::C64; 4]) -> Result<Self> {
        Self::new(CMat4::from_fn(|i, j| psi[i] * psi[j].conj()))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4(CMat4::identity().scale_re(0.25))
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn into_inner(self) -> CMat4 {
        self.0
    }

    pub fn diagonal(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.0 .0[i][i].re)
    }
}

/// Wootters concurrence together with the quantities it is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    /// `l1 - l2 - l3 - l4`
    pub lambda: f64,
    pub concurrence: f64,
    /// Square roots of the spin-flip spectrum, descending.
    pub roots: [f64; 4],
}

/// `ρ(t) = Σ_ij (K_i ⊗ K_j) ρ0 (K_i ⊗ K_j)†`
pub fn evolve_pair(rho0: &DensityMatrix4, k1: &KrausSet, k2: &KrausSet) -> Result<DensityMatrix4> {
    for k in [k1, k2] {
        let deviation = k.completeness_deviation();
        if !(deviation <= PAIR_COMPLETENESS_TOL) {
            return Err(Error::IncompleteKraus { deviation });
        }
    }
    let mut out = CMat4::zeros();
    for a in k1.ops() {
        for b in k2.ops() {
            out = out + rho0.0.conjugate_by(&kron(a, b));
        }
    }
    DensityMatrix4::new(out.hermitian_part())
}

/// Concurrence through the Hermitian form `√ρ ρ̃ √ρ`, `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityMatrix4) -> Result<ConcurrenceResult> {
    let a = sqrt_psd(&rho.0)?;
    let yy = kron(&sigma_y(), &sigma_y());
    let flipped = yy * rho.0.conj() * yy;
    let m = (a * flipped * a).hermitian_part();
    let values = psd_eig(&m)?.values;
    // M has unit-scale norm for a normalized state, so eigenvalue noise is
    // absolute rather than relative to the largest eigenvalue
    let floor = RANK_DUST * values[0].max(1.0);
    let roots = values.map(|x| if x <= floor { 0.0 } else { x.sqrt() });
    let lambda = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(ConcurrenceResult {
        lambda,
        concurrence: lambda.max(0.0),
        roots,
    })
}

/// Initial-state families `α|↑↑⟩ + β|↓↓⟩` (plus) and `α|↑↓⟩ + β|↓↑⟩` (minus).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Plus,
    Minus,
}

/// Pure state of the given family with real amplitudes `α = √alpha_sq`,
/// `β = √(1 - alpha_sq)`.
pub fn initial_state(kind: InitialKind, alpha_sq: f64) -> Result<DensityMatrix4> {
    if !(0.0..=1.0).contains(&alpha_sq) {
        return Err(Error::InvalidWeight(alpha_sq));
    }
    let alpha = alpha_sq.sqrt();
    let beta = (1.0 - alpha_sq).sqrt();
    let mut psi = [crate::linalg::ZERO; 4];
    match kind {
        InitialKind::Plus => {
            psi[0].re = alpha;
            psi[3].re = beta;
        }
        InitialKind::Minus => {
            psi[1].re = alpha;
            psi[2].re = beta;
        }
    }
    DensityMatrix4::pure(psi)
}

/// Strictly increasing list of non-negative times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub const DEFAULT_END: f64 = 10.0;
    pub const DEFAULT_POINTS: usize = 400;

    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidGrid(format!("time {t} is not a finite non-negative number")));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid(times))
    }

    /// `points` equally spaced times from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::InvalidGrid(format!("invalid range [{start}, {end}]")));
        }
        let step = (end - start) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
        times[points - 1] = end;
        TimeGrid::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn end(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::uniform(0.0, Self::DEFAULT_END, Self::DEFAULT_POINTS).expect("valid default grid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub lambda: f64,
    pub concurrence: f64,
}

/// Kraus operators of a single-qubit channel at time `t` (`t = +inf` allowed).
pub fn kraus_at(c: &Coupling, t: f64) -> Result<KrausSet> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    match c.classify()? {
        CouplingClass::Flip { u_hat } => Ok(kraus_flip(&u_hat, c.gamma(), t)),
        CouplingClass::Dissipative(_) => kraus_of_choi(&choi_of_channel(c, t)?),
    }
}

pub fn evolve_pair_at(rho0: &DensityMatrix4, c1: &Coupling, c2: &Coupling, t: f64) -> Result<DensityMatrix4> {
    if t == 0.0 {
        return Ok(*rho0);
    }
    evolve_pair(rho0, &kraus_at(c1, t)?, &kraus_at(c2, t)?)
}

pub fn lambda_at(rho0: &DensityMatrix4, c1: &Coupling, c2: &Coupling, t: f64) -> Result<ConcurrenceResult> {
    concurrence(&evolve_pair_at(rho0, c1, c2, t)?)
}

/// `(t, Λ, C)` on every grid point, evaluated in parallel and returned in grid
/// order. The grid must start at 0.
pub fn lambda_trajectory(
    rho0: &DensityMatrix4,
    c1: &Coupling,
    c2: &Coupling,
    grid: &TimeGrid,
) -> Result<Vec<TrajectoryPoint>> {
    if grid.times()[0] != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "trajectory grid must start at 0, starts at {}",
            grid.times()[0]
        )));
    }
    grid.times()
        .par_iter()
        .map(|&t| {
            let r = lambda_at(rho0, c1, c2, t)?;
            Ok(TrajectoryPoint {
                t,
                lambda: r.lambda,
                concurrence: r.concurrence,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{family_appc, unit};
    use crate::linalg::{c, CMat2, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn bell() -> DensityMatrix4 {
        initial_state(InitialKind::Plus, 0.5).unwrap()
    }

    fn random_state(rng: &mut impl Rng, rank: usize) -> DensityMatrix4 {
        let mut m = CMat4::zeros();
        for _ in 0..rank {
            let psi: [C64; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            m = m + CMat4::from_fn(|i, j| psi[i] * psi[j].conj());
        }
        let tr = m.trace().re;
        DensityMatrix4::new(m.scale_re(1.0 / tr)).unwrap()
    }

    fn random_unitary(rng: &mut impl Rng) -> CMat2 {
        let n = unit(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let a: f64 = rng.gen_range(0.0..6.0);
        let phase = c(0.0, rng.gen_range(0.0..6.0)).exp();
        (CMat2::identity().scale_re(a.cos()) - crate::linalg::pauli_dot(&n).scale(c(0.0, a.sin()))).scale(phase)
    }

    fn random_coupling(rng: &mut impl Rng) -> Coupling {
        let u: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = (u.iter().chain(&v).map(|x| x * x).sum::<f64>()).sqrt();
        Coupling::new(u.map(|x| x / n), v.map(|x| x / n), rng.gen_range(0.5..2.0)).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix4::new(CMat4::identity()).is_err());
        let mut m = CMat4::identity().scale_re(0.25);
        m.0[0][1] = c(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err());
        let neg = CMat4::diag_real(&[0.6, 0.6, -0.2, 0.0]);
        assert!(DensityMatrix4::new(neg).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let r = concurrence(&bell()).unwrap();
        assert!((r.concurrence - 1.0).abs() < 1e-12);

        let product = initial_state(InitialKind::Plus, 1.0).unwrap();
        let r = concurrence(&product).unwrap();
        assert_eq!(r.concurrence, 0.0);

        let r = concurrence(&DensityMatrix4::maximally_mixed()).unwrap();
        assert!((r.lambda + 0.5).abs() < 1e-14);
        assert!(r.roots.iter().all(|l| (l - 0.25).abs() < 1e-14));
    }

    #[test]
    fn pure_state_concurrence_is_two_alpha_beta() {
        // oracle: C(|ψ⟩) = |⟨ψ|σy⊗σy|ψ*⟩| = 2|ad - bc| for ψ = (a, b, c, d)
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let mut psi: [C64; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi.iter_mut().for_each(|z| *z /= n);
            let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
            let r = concurrence(&DensityMatrix4::pure(psi).unwrap()).unwrap();
            assert!((r.concurrence - expected).abs() < 1e-8, "{} vs {expected}", r.concurrence);
        }
        let r = concurrence(&initial_state(InitialKind::Plus, 0.8).unwrap()).unwrap();
        assert!((r.concurrence - 0.8).abs() < 1e-12);
    }

    #[test]
    fn initial_state_examples() {
        let m = initial_state(InitialKind::Minus, 0.0).unwrap();
        assert!((m.matrix().get(2, 2).re - 1.0).abs() < 1e-15);
        assert_eq!(concurrence(&m).unwrap().concurrence, 0.0);
        assert!(matches!(initial_state(InitialKind::Plus, 1.5), Err(Error::InvalidWeight(_))));
        assert!(matches!(initial_state(InitialKind::Plus, -0.1), Err(Error::InvalidWeight(_))));
        let b = bell();
        assert!((b.matrix().get(0, 3).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_kraus_leaves_state() {
        let id = KrausSet::new(vec![CMat2::identity()]).unwrap();
        let rho = random_state(&mut ChaCha8Rng::seed_from_u64(1), 3);
        let out = evolve_pair(&rho, &id, &id).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = KrausSet::from_ops_unchecked(vec![CMat2::identity().scale_re(0.5)]);
        let id = KrausSet::new(vec![CMat2::identity()]).unwrap();
        assert!(matches!(
            evolve_pair(&bell(), &half, &id),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn bell_under_double_dephasing() {
        let z = Coupling::new([0.0, 0.0, 1.0], [0.0; 3], 1.0).unwrap();
        for t in [0.0, 0.1, 0.5, 2.0] {
            let rho = evolve_pair_at(&bell(), &z, &z, t).unwrap();
            let expected = 0.5 * (-8.0 * t).exp();
            assert!((rho.matrix().get(0, 3).re - expected).abs() < 1e-15);
            assert!((rho.matrix().get(0, 0).re - 0.5).abs() < 1e-15);
            // X-state: C = 2|ρ14| here
            let r = concurrence(&rho).unwrap();
            assert!((r.concurrence - 2.0 * expected).abs() < 1e-9);
        }
    }

    #[test]
    fn dissipative_pair_relaxes_to_product_of_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (c1, c2) = (random_coupling(&mut rng), random_coupling(&mut rng));
            if c1.classify().unwrap().is_flip() || c2.classify().unwrap().is_flip() {
                continue;
            }
            let rho0 = random_state(&mut rng, 2);
            let out = evolve_pair_at(&rho0, &c1, &c2, f64::INFINITY).unwrap();
            let w1 = c1.w();
            let w2 = c2.w();
            let r1 = crate::channel::BlochVector(w1.map(|x| 2.0 * x)).to_density();
            let r2 = crate::channel::BlochVector(w2.map(|x| 2.0 * x)).to_density();
            assert!(out.matrix().max_abs_diff(&kron(&r1, &r2)) < 1e-12);
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let rho = random_state(&mut rng, 4);
            let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
            let rotated = DensityMatrix4::new(rho.matrix().conjugate_by(&u)).unwrap();
            let a = concurrence(&rho).unwrap();
            let b = concurrence(&rotated).unwrap();
            assert!((a.concurrence - b.concurrence).abs() < 1e-10);
            assert!((a.lambda - b.lambda).abs() < 1e-10);
        }
    }

    #[test]
    fn trajectories_are_physical_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = TimeGrid::uniform(0.0, 3.0, 40).unwrap();
        for _ in 0..20 {
            let (c1, c2) = (random_coupling(&mut rng), random_coupling(&mut rng));
            let rank = rng.gen_range(1..=2);
            let rho0 = random_state(&mut rng, rank);
            let traj = lambda_trajectory(&rho0, &c1, &c2, &grid).unwrap();
            assert_eq!(traj[0].lambda, concurrence(&rho0).unwrap().lambda);
            for w in traj.windows(2) {
                assert!(w[1].concurrence <= w[0].concurrence + 1e-9);
            }
        }
    }

    #[test]
    fn product_states_stay_unentangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let grid = TimeGrid::uniform(0.0, 2.0, 11).unwrap();
        for _ in 0..10 {
            let a = crate::channel::BlochVector(unit(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))).to_density();
            let b = crate::channel::BlochVector(unit(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))).to_density();
            let rho0 = DensityMatrix4::new(kron(&a, &b)).unwrap();
            let (c1, c2) = (random_coupling(&mut rng), random_coupling(&mut rng));
            for p in lambda_trajectory(&rho0, &c1, &c2, &grid).unwrap() {
                assert!(p.lambda <= 1e-9, "{} at t = {}", p.lambda, p.t);
                assert_eq!(p.concurrence, p.lambda.max(0.0));
            }
        }
    }

    #[test]
    fn amplitude_damping_plus_state_crossing() {
        let c = family_appc(-FRAC_PI_4);
        let rho0 = initial_state(InitialKind::Plus, 0.8).unwrap();
        let traj = lambda_trajectory(&rho0, &c, &c, &TimeGrid::default()).unwrap();
        assert!(traj[0].lambda > 0.0);
        // Λ = 2s(αβ - α²(1 - s)) with s = e^{-4t} is most negative near s = 1/4
        let min = traj.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
        let s = 0.25f64;
        assert!((min - 2.0 * s * (0.4 - 0.8 * (1.0 - s))).abs() < 1e-3);
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::NAN]).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::uniform(0.0, 0.0, 5).is_err());
        let g = TimeGrid::default();
        assert_eq!(g.len(), 400);
        assert_eq!(g.end(), 10.0);
        let offset = TimeGrid::uniform(1.0, 2.0, 3).unwrap();
        let c = family_appc(-FRAC_PI_4);
        assert!(lambda_trajectory(&bell(), &c, &c, &offset).is_err());
    }
}
