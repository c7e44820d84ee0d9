//! Monte Carlo census of the coupling space
//!
//! ```text
//! u = R        (cosθ  cosφ,  sinθ  cosφ,  sinφ)
//! v = √(1-R²)  (cosθ' cosφ', sinθ' cosφ', sinφ')
//! ```
//!
//! with `R`, `θ`, `θ'`, `φ`, `φ'` drawn uniformly. Samples landing on the flip
//! set (`|u × v| = 0`) or the amplitude-damping set (`|u × v| = 1/2`) are
//! counted.
//!
//! Sample `i` always consumes the same slice of the ChaCha20 stream, so the
//! report does not depend on how the work is split across threads.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{cross, norm, Coupling, Vec3};
use crate::error::Result;

/// 32-bit words reserved per sample: five `f64` draws of two words each.
const WORDS_PER_SAMPLE: u128 = 10;

/// Samples per parallel shard.
const SHARD: u64 = 4096;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaSample {
    pub r: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub u: Vec3,
    pub v: Vec3,
}

impl OmegaSample {
    pub fn from_params(r: f64, theta: f64, theta_prime: f64, phi: f64, phi_prime: f64) -> Self {
        let direction = |t: f64, p: f64| -> Vec3 {
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            [ct * cp, st * cp, sp]
        };
        let a = r;
        let b = (1.0 - r * r).max(0.0).sqrt();
        OmegaSample {
            r,
            theta,
            theta_prime,
            phi,
            phi_prime,
            u: direction(theta, phi).map(|x| a * x),
            v: direction(theta_prime, phi_prime).map(|x| b * x),
        }
    }

    pub fn cross_norm(&self) -> f64 {
        norm(&cross(&self.u, &self.v))
    }

    pub fn coupling(&self, gamma: f64) -> Result<Coupling> {
        Coupling::new(self.u, self.v, gamma)
    }
}

/// Sample number `index` of the stream seeded by `seed`.
pub fn sample_omega(seed: u64, index: u64) -> OmegaSample {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_word_pos(index as u128 * WORDS_PER_SAMPLE);
    let r = rng.gen_range(0.0..=1.0);
    let theta = rng.gen_range(0.0..=2.0 * PI);
    let theta_prime = rng.gen_range(0.0..=2.0 * PI);
    let phi = rng.gen_range(0.0..=PI);
    let phi_prime = rng.gen_range(0.0..=PI);
    OmegaSample::from_params(r, theta, theta_prime, phi, phi_prime)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub n_samples: u64,
    pub n_flip_hits: u64,
    pub n_ad_hits: u64,
    pub flip_tolerance: f64,
    pub ad_tolerance: f64,
    /// Smallest `||u × v| - 1/2|` seen.
    pub min_distance_to_ad: f64,
    pub seed: u64,
}

#[derive(Clone, Copy)]
struct Tally {
    flip: u64,
    ad: u64,
    min_ad: f64,
}

impl Tally {
    const EMPTY: Tally = Tally {
        flip: 0,
        ad: 0,
        min_ad: f64::INFINITY,
    };

    fn merge(self, other: Tally) -> Tally {
        Tally {
            flip: self.flip + other.flip,
            ad: self.ad + other.ad,
            min_ad: self.min_ad.min(other.min_ad),
        }
    }
}

pub fn run_census(n: u64, seed: u64, flip_tol: f64, ad_tol: f64) -> CensusReport {
    run_census_with(n, seed, flip_tol, ad_tol, sample_omega)
}

/// Like [`run_census`] with a custom `sampler(seed, index)`.
pub fn run_census_with<F>(n: u64, seed: u64, flip_tol: f64, ad_tol: f64, sampler: F) -> CensusReport
where
    F: Fn(u64, u64) -> OmegaSample + Sync,
{
    let shards = n.div_ceil(SHARD);
    let tally = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let end = ((shard + 1) * SHARD).min(n);
            (shard * SHARD..end).fold(Tally::EMPTY, |acc, i| {
                let s = sampler(seed, i);
                let cn = s.cross_norm();
                let d = (cn - 0.5).abs();
                Tally {
                    flip: acc.flip + u64::from(cn <= flip_tol),
                    ad: acc.ad + u64::from(d <= ad_tol),
                    min_ad: acc.min_ad.min(d),
                }
            })
        })
        .reduce(|| Tally::EMPTY, Tally::merge);

    CensusReport {
        n_samples: n,
        n_flip_hits: tally.flip,
        n_ad_hits: tally.ad,
        flip_tolerance: flip_tol,
        ad_tolerance: ad_tol,
        min_distance_to_ad: tally.min_ad,
        seed,
    }
}
