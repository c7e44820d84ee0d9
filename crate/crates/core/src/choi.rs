//! Choi matrices of single-qubit channels and Kraus operators extracted from
//! them.
//!
//! Convention: `𝔠 = Σ_jk |j⟩⟨k| ⊗ 𝒞(|j⟩⟨k|)` with the first factor carrying the
//! input index, so `𝔠[2j + a][2k + b] = 𝒞(|j⟩⟨k|)[a][b]` and `tr₂ 𝔠 = 𝟙`.
//! Any factor `S S† = 𝔠` yields Kraus operators `K_i = mat(S_i)` from the
//! columns of `S` (column-stacking `mat`).

use log::warn;

use crate::channel::{BlochVector, Coupling};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, mat, psd_factor, CMat2, CMat4, I};

/// Tolerance on the Choi invariants (PSD, `tr₂ 𝔠 = 𝟙`, `tr 𝔠 = 2`).
pub const CHOI_TOL: f64 = 1e-9;
/// Negative Choi eigenvalues down to this are clipped with a warning.
pub const CHOI_DUST: f64 = 1e-8;
/// Kraus operators with `‖K‖_max` below this are dropped.
pub const KRAUS_DROP: f64 = 1e-9;
/// Tolerance on `Σ K†K = 𝟙` for a [`KrausSet`].
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Operator-sum representation of one time slice of a qubit channel.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet(Vec<CMat2>);

impl KrausSet {
    /// Validates `1..=4` operators and completeness within `1e-9`.
    pub fn new(ops: Vec<CMat2>) -> Result<Self> {
        if ops.is_empty() || ops.len() > 4 {
            return Err(Error::IncompleteKraus { deviation: f64::INFINITY });
        }
        let set = KrausSet(ops);
        let deviation = set.completeness_deviation();
        if !(deviation <= COMPLETENESS_TOL) {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(set)
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<CMat2>) -> Self {
        KrausSet(ops)
    }

    pub fn ops(&self) -> &[CMat2] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `max |Σ K†K - 𝟙|` entrywise.
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self
            .0
            .iter()
            .fold(CMat2::zeros(), |acc, k| acc + k.adjoint() * *k);
        sum.max_abs_diff(&CMat2::identity())
    }

    /// `ρ -> Σ K ρ K†`
    pub fn apply(&self, rho: &CMat2) -> CMat2 {
        apply_channel(self, rho)
    }
}

/// `Σ K ρ K†`, Hermitized.
pub fn apply_channel(k: &KrausSet, rho: &CMat2) -> CMat2 {
    k.0.iter()
        .fold(CMat2::zeros(), |acc, op| acc + *op * *rho * op.adjoint())
        .hermitian_part()
}

/// Partial trace over the second (output) tensor factor.
pub fn partial_trace_second(m: &CMat4) -> CMat2 {
    CMat2::from_fn(|j, k| m.0[2 * j][2 * k] + m.0[2 * j + 1][2 * k + 1])
}

/// Choi matrix of a trace-preserving qubit channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix(CMat4);

impl ChoiMatrix {
    pub fn new(m: CMat4) -> Result<Self> {
        let herm = m.hermiticity_deviation();
        if !(herm <= CHOI_TOL) {
            return Err(Error::InvalidChoi(format!("not Hermitian (deviation {herm:e})")));
        }
        let m = m.hermitian_part();
        let ptr = partial_trace_second(&m).max_abs_diff(&CMat2::identity());
        if !(ptr <= CHOI_TOL) {
            return Err(Error::InvalidChoi(format!(
                "partial trace differs from identity by {ptr:e}"
            )));
        }
        let min = herm_eig(&m)?.values[3];
        if min < -CHOI_DUST {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        if min < -CHOI_TOL {
            warn!("clipping negative Choi eigenvalue {min:e}");
        }
        Ok(ChoiMatrix(m))
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        Ok(herm_eig(&self.0)?.values)
    }

    /// Inverse Choi map `𝒞(ρ) = tr₁[(ρᵀ ⊗ 𝟙) 𝔠]`.
    #[cfg(test)]
    pub(crate) fn apply(&self, rho: &CMat2) -> CMat2 {
        CMat2::from_fn(|a, b| {
            let mut acc = crate::linalg::ZERO;
            for j in 0..2 {
                for k in 0..2 {
                    // (ρᵀ)_{kj} = ρ_{jk}
                    acc += rho.0[j][k] * self.0 .0[2 * j + a][2 * k + b];
                }
            }
            acc
        })
    }
}

/// Assemble `𝔠` for the channel of `c` at time `t` from Bloch evolution of the
/// six axial states.
pub fn choi_of_channel(c: &Coupling, t: f64) -> Result<ChoiMatrix> {
    let image = |x: f64, y: f64, z: f64| -> Result<CMat2> {
        Ok(c.evolve(&BlochVector::new(x, y, z), t)?.to_density())
    };
    let c00 = image(0.0, 0.0, 1.0)?;
    let c11 = image(0.0, 0.0, -1.0)?;
    let dx = image(1.0, 0.0, 0.0)? - image(-1.0, 0.0, 0.0)?;
    let dy = image(0.0, 1.0, 0.0)? - image(0.0, -1.0, 0.0)?;
    // 2𝒞(|0⟩⟨1|) = Δx + iΔy, 2𝒞(|1⟩⟨0|) = Δx - iΔy
    let c01 = (dx + dy.scale(I)).scale_re(0.5);
    let c10 = (dx - dy.scale(I)).scale_re(0.5);

    let blocks = [[c00, c01], [c10, c11]];
    let m = CMat4::from_fn(|r, s| blocks[r / 2][s / 2].0[r % 2][s % 2]);
    ChoiMatrix::new(m)
}

/// Canonical Kraus operators from the eigen-factorization of `𝔠`.
///
/// Operators are ordered by decreasing Choi eigenvalue; negligible ones are
/// dropped.
pub fn kraus_of_choi(choi: &ChoiMatrix) -> Result<KrausSet> {
    let s = psd_factor(&choi.0)?;
    let ops: Vec<CMat2> = (0..4)
        .map(|i| mat(&s.column(i)))
        .filter(|k| k.max_abs() >= KRAUS_DROP)
        .collect();
    KrausSet::new(ops)
}
