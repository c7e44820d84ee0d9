//! Single-qubit dynamics under the coupling `λ = u + i v`.
//!
//! The Lindbladian `L = λ·σ` with rate `γ` drives the Bloch vector as
//!
//! ```text
//! dr/dt = 4γ { u (u·r) + v (v·r) + 2w - r },   w = u × v
//! ```
//!
//! Linearly dependent `u`, `v` (`w = 0`) give flip channels; otherwise the
//! channel is dissipative and relaxes every state to `r∞ = 2w`. Both regimes
//! have closed-form solutions, implemented here. Time always enters as the
//! product `γt`.

use serde::{Deserialize, Serialize};

use crate::choi::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{pauli_dot, CMat2};

pub type Vec3 = [f64; 3];

/// Tolerance on `|u|² + |v|² = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `|u × v|` at or below this is treated as a flip coupling.
pub const FLIP_TOL: f64 = 1e-9;

/// Below this value of `4γqt` the hyperbolic functions are replaced by their
/// series expansion.
const SERIES_CUTOFF: f64 = 1e-6;

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scaled(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Qubit state as a Bloch vector, `ρ = (𝟙 + r·σ) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub Vec3);

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        dot(&self.0, other)
    }

    pub fn to_density(&self) -> CMat2 {
        let m = pauli_dot(&self.0).scale_re(0.5);
        m + CMat2::identity().scale_re(0.5)
    }

    /// Bloch vector of a 2x2 operator, `r_k = tr(ρ σ_k)`.
    pub fn from_density(rho: &CMat2) -> Self {
        let m = &rho.0;
        BlochVector([
            (m[0][1] + m[1][0]).re,
            (m[1][0] - m[0][1]).im,
            (m[0][0] - m[1][1]).re,
        ])
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let d = [
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ];
        norm(&d)
    }
}

/// A coupling `λ = u + i v` with `|u|² + |v|² = 1`, together with its decay rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    u: Vec3,
    v: Vec3,
    gamma: f64,
}

impl Coupling {
    pub fn new(u: Vec3, v: Vec3, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidRate(gamma));
        }
        let norm_sq = dot(&u, &u) + dot(&v, &v);
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Coupling { u, v, gamma })
    }

    pub fn u(&self) -> Vec3 {
        self.u
    }

    pub fn v(&self) -> Vec3 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn w(&self) -> Vec3 {
        cross(&self.u, &self.v)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Coupling::new(self.u, self.v, gamma)
    }

    pub fn classify(&self) -> Result<CouplingClass> {
        classify(self)
    }

    /// Bloch vector at time `t` (`t = +inf` gives the asymptote). Exactly
    /// `r0` at `t = 0`.
    pub fn evolve(&self, r0: &BlochVector, t: f64) -> Result<BlochVector> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidTime(t));
        }
        let class = self.classify()?;
        if t == 0.0 {
            return Ok(*r0);
        }
        Ok(match class {
            CouplingClass::Flip { u_hat } => evolve_flip(r0, &u_hat, self.gamma, t),
            CouplingClass::Dissipative(d) => evolve_dissipative(r0, &d, self.gamma, t),
        })
    }

    /// The affine Bloch map `r0 -> A r0 + b` realised at time `t`.
    pub fn bloch_map(&self, t: f64) -> Result<AffineBlochMap> {
        let offset = self.evolve(&BlochVector::ORIGIN, t)?.0;
        let mut matrix = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            let image = self.evolve(&BlochVector(e), t)?.0;
            for i in 0..3 {
                matrix[i][j] = image[i] - offset[i];
            }
        }
        Ok(AffineBlochMap { matrix, offset })
    }
}

/// `r -> matrix · r + offset`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineBlochMap {
    pub matrix: [[f64; 3]; 3],
    pub offset: Vec3,
}

impl AffineBlochMap {
    pub fn apply(&self, r: &BlochVector) -> BlochVector {
        BlochVector(std::array::from_fn(|i| {
            self.offset[i] + (0..3).map(|j| self.matrix[i][j] * r.0[j]).sum::<f64>()
        }))
    }
}

/// Parameters of a dissipative coupling (`w = u × v ≠ 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dissipative {
    pub u: Vec3,
    pub v: Vec3,
    pub w: Vec3,
    pub w_hat: Vec3,
    /// `(|u|² - |v|²) / 2`
    pub chi: f64,
    /// `sqrt(chi² + (u·v)²)`
    pub q: f64,
}

impl Dissipative {
    pub fn new(u: Vec3, v: Vec3) -> Result<Self> {
        let w = cross(&u, &v);
        let wn = norm(&w);
        if wn <= FLIP_TOL {
            return Err(Error::NotDissipative { cross_norm: wn });
        }
        let chi = 0.5 * (dot(&u, &u) - dot(&v, &v));
        let uv = dot(&u, &v);
        Ok(Dissipative {
            u,
            v,
            w,
            w_hat: scaled(&w, 1.0 / wn),
            chi,
            q: chi.hypot(uv),
        })
    }

    pub fn w_norm(&self) -> f64 {
        norm(&self.w)
    }

    pub fn uv(&self) -> f64 {
        dot(&self.u, &self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum CouplingClass {
    Flip { u_hat: Vec3 },
    Dissipative(Dissipative),
}

impl CouplingClass {
    pub fn is_flip(&self) -> bool {
        matches!(self, CouplingClass::Flip { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CouplingClass::Flip { .. } => "flip",
            CouplingClass::Dissipative(_) => "dissipative",
        }
    }
}

/// Flip when `|u × v| <= 1e-9`, dissipative otherwise.
pub fn classify(c: &Coupling) -> Result<CouplingClass> {
    let (u, v) = (c.u, c.v);
    let (nu, nv) = (norm(&u), norm(&v));
    if nu == 0.0 && nv == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    if norm(&cross(&u, &v)) <= FLIP_TOL {
        let u_hat = if nu > FLIP_TOL {
            scaled(&u, 1.0 / nu)
        } else {
            scaled(&v, 1.0 / nv)
        };
        return Ok(CouplingClass::Flip { u_hat });
    }
    Dissipative::new(u, v).map(CouplingClass::Dissipative)
}

/// `r(t) = e^{-4γt} r0 + (1 - e^{-4γt}) (r0·û) û`
pub fn evolve_flip(r0: &BlochVector, u_hat: &Vec3, gamma: f64, t: f64) -> BlochVector {
    let decay = (-4.0 * gamma * t).exp();
    let along = r0.dot(u_hat);
    BlochVector(std::array::from_fn(|i| {
        decay * r0.0[i] + (1.0 - decay) * along * u_hat[i]
    }))
}

/// Flip-channel Kraus pair `{√p 𝟙, √(1-p) û·σ}` with `p = (1 + e^{-4γt}) / 2`.
pub fn kraus_flip(u_hat: &Vec3, gamma: f64, t: f64) -> KrausSet {
    let p = 0.5 * (1.0 + (-4.0 * gamma * t).exp());
    // 1 - p without cancellation at small t
    let one_minus_p = -0.5 * (-4.0 * gamma * t).exp_m1();
    let k1 = CMat2::identity().scale_re(p.sqrt());
    let k2 = pauli_dot(u_hat).scale_re(one_minus_p.sqrt());
    KrausSet::from_ops_unchecked(vec![k1, k2])
}

/// Coefficients `(a, b)` of the in-plane propagator
/// `e^{-2γt} [cosh(4γqt) 𝟙 + sinh(4γqt) ((u·v) σx + χ σz) / q] = a 𝟙 + b ((u·v) σx + χ σz)`.
fn propagator_coefficients(q: f64, gt: f64) -> (f64, f64) {
    let x = 4.0 * q * gt;
    if x < SERIES_CUTOFF {
        let e2 = (-2.0 * gt).exp();
        let x2 = x * x;
        (e2 * (1.0 + 0.5 * x2), e2 * 4.0 * gt * (1.0 + x2 / 6.0))
    } else if x < 20.0 {
        let e2 = (-2.0 * gt).exp();
        (e2 * x.cosh(), e2 * x.sinh() / q)
    } else {
        let slow = (-2.0 * gt * (1.0 - 2.0 * q)).exp();
        let fast = (-2.0 * gt * (1.0 + 2.0 * q)).exp();
        (0.5 * (slow + fast), 0.5 * (slow - fast) / q)
    }
}

/// Closed-form dissipative evolution `r(t) = f u + g v + h w`.
pub fn evolve_dissipative(r0: &BlochVector, d: &Dissipative, gamma: f64, t: f64) -> BlochVector {
    let gt = gamma * t;
    if gt.is_infinite() {
        return BlochVector(scaled(&d.w, 2.0));
    }
    let w_sq = dot(&d.w, &d.w);
    let h = 2.0 - (2.0 - r0.dot(&d.w) / w_sq) * (-4.0 * gt).exp();

    let x1 = r0.dot(&cross(&d.v, &d.w)) / w_sq;
    let x2 = r0.dot(&cross(&d.w, &d.u)) / w_sq;
    let uv = d.uv();
    let (a, b) = propagator_coefficients(d.q, gt);
    let f = a * x1 + b * (d.chi * x1 + uv * x2);
    let g = a * x2 + b * (uv * x1 - d.chi * x2);

    BlochVector(std::array::from_fn(|i| {
        f * d.u[i] + g * d.v[i] + h * d.w[i]
    }))
}

/// Long-time limit of the Bloch vector: `(r0·û) û` for flips, `2w` otherwise.
pub fn asymptote(c: &Coupling, r0: &BlochVector) -> Result<BlochVector> {
    Ok(match classify(c)? {
        CouplingClass::Flip { u_hat } => BlochVector(scaled(&u_hat, r0.dot(&u_hat))),
        CouplingClass::Dissipative(d) => BlochVector(scaled(&d.w, 2.0)),
    })
}

/// Two-angle family with orthogonal `u = x̂ sinφ cosθ + ẑ cosφ`, `v = -ŷ sinφ sinθ`
/// (unit rate).
pub fn family(theta: f64, phi: f64) -> Coupling {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Coupling {
        u: [sp * ct, 0.0, cp],
        v: [0.0, -sp * st, 0.0],
        gamma: 1.0,
    }
}

/// One-angle family `u = x̂ cosθ`, `v = ŷ sinθ` (unit rate); `θ = ±π/4` is
/// standard amplitude damping.
pub fn family_appc(theta: f64) -> Coupling {
    let (st, ct) = theta.sin_cos();
    Coupling {
        u: [ct, 0.0, 0.0],
        v: [0.0, st, 0.0],
        gamma: 1.0,
    }
}

/// `ρ -> Σ K ρ K†` expressed on a Bloch vector.
pub fn apply_kraus_to_bloch(k: &KrausSet, r0: &BlochVector) -> BlochVector {
    BlochVector::from_density(&k.apply(&r0.to_density()))
}

#[doc(hidden)]
pub fn unit(v: Vec3) -> Vec3 {
    scaled(&v, 1.0 / norm(&v))
}
