#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use esd_core::linalg::{CMat, CMat2, CMat4};
use esd_core::pair::concurrence;
use esd_core::{Coupling, DensityMatrix4};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut Rng8) -> f64 {
    // Box-Muller
    let a: f64 = rng.gen_range(f64::EPSILON..1.0);
    let b: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos()
}

pub fn random_unit(rng: &mut Rng8) -> [f64; 3] {
    loop {
        let v = [gauss(rng), gauss(rng), gauss(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 {
            return v.map(|x| x / n);
        }
    }
}

pub fn random_ball(rng: &mut Rng8) -> [f64; 3] {
    let r: f64 = rng.gen_range(0.0f64..1.0).cbrt();
    random_unit(rng).map(|x| r * x)
}

/// `u = cos a n̂`, `v = sin a n̂`.
pub fn random_flip(rng: &mut Rng8, gamma: f64) -> Coupling {
    let n = random_unit(rng);
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    Coupling::new(n.map(|x| a.cos() * x), n.map(|x| a.sin() * x), gamma).unwrap()
}

/// Gaussian `u`, `v` rescaled to `|u|² + |v|² = 1`, with `|u × v| >= 1e-2`.
pub fn random_dissipative(rng: &mut Rng8, gamma: f64) -> Coupling {
    loop {
        let u = [gauss(rng), gauss(rng), gauss(rng)];
        let v = [gauss(rng), gauss(rng), gauss(rng)];
        let n = u.iter().chain(&v).map(|x| x * x).sum::<f64>().sqrt();
        let (u, v) = (u.map(|x| x / n), v.map(|x| x / n));
        let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        if (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt() >= 1e-2 {
            return Coupling::new(u, v, gamma).unwrap();
        }
    }
}

pub fn outer(psi: &[C64; 4]) -> CMat4 {
    CMat::from_fn(|i, j| psi[i] * psi[j].conj())
}

pub fn random_pure(rng: &mut Rng8) -> [C64; 4] {
    let psi: [C64; 4] = std::array::from_fn(|_| C64::new(gauss(rng), gauss(rng)));
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.map(|z| z / n)
}

/// `(1 - p)|ψ⟩⟨ψ| + p 𝟙/4` with `p` in `[p_min, p_max)` and concurrence above `c_min`.
pub fn random_entangled(rng: &mut Rng8, p_min: f64, p_max: f64, c_min: f64) -> DensityMatrix4 {
    loop {
        let psi = random_pure(rng);
        let p = if p_max > p_min { rng.gen_range(p_min..p_max) } else { p_min };
        let m = CMat::from_fn(|i, j| {
            let mixed = if i == j { p / 4.0 } else { 0.0 };
            psi[i] * psi[j].conj() * (1.0 - p) + mixed
        });
        let rho = DensityMatrix4::new(m).unwrap();
        if concurrence(&rho).unwrap().concurrence > c_min {
            return rho;
        }
    }
}

/// Unitary whose columns are the `±n̂` eigenvectors of `n̂·σ` for
/// `n̂ = (sinϑ cosφ, sinϑ sinφ, cosϑ)`, with extra column phases.
pub fn eigenbasis(theta: f64, phi: f64, phases: [f64; 2]) -> CMat2 {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let (p0, p1) = (C64::from_polar(1.0, phases[0]), C64::from_polar(1.0, phases[1]));
    CMat([[p0 * c, -p1 * e.conj() * s], [p0 * e * s, p1 * c]])
}

pub fn axis(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub fn max_diff(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}
