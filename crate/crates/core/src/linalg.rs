//! Fixed-size complex linear algebra for qubit (2x2) and qubit-pair (4x4)
//! operators.
//!
//! Matrices are stored row-major as `[[C64; N]; N]`. The only decomposition
//! provided is a Hermitian eigensolver (cyclic complex Jacobi), on top of which
//! the PSD factorization and square root are built.

use std::ops::{Add, Mul, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entrywise tolerance on `|m - m^dagger|` for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues above `-PSD_TOL` are treated as non-negative (clipped to zero).
pub const PSD_TOL: f64 = 1e-8;

/// Eigenvalues below `RANK_DUST * lambda_max` are indistinguishable from zero
/// for a 4x4 Jacobi solve and are truncated before taking square roots.
pub const RANK_DUST: f64 = 16.0 * f64::EPSILON;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix of fixed dimension `N`, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;
pub type CVec4 = [C64; 4];

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| c(rows[i][j], 0.0))
    }

    pub fn diag_real(d: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = c(d[i], 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        std::array::from_fn(|i| self.0[i][j])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// max |m - m^dagger| entrywise.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// (m + m^dagger) / 2
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `U m U^dagger`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

/// Tensor product `a ⊗ b`; `a` acts on the left factor (index `2i + k`).
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, s| a.0[r / 2][s / 2] * b.0[r % 2][s % 2])
}

pub fn sigma_x() -> CMat2 {
    CMat([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> CMat2 {
    CMat([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> CMat2 {
    CMat([[ONE, ZERO], [ZERO, -ONE]])
}

/// `n · σ` for a real 3-vector.
pub fn pauli_dot(n: &[f64; 3]) -> CMat2 {
    CMat([
        [c(n[2], 0.0), c(n[0], -n[1])],
        [c(n[0], n[1]), c(-n[2], 0.0)],
    ])
}

/// Column-stacking vectorization: `[[a, c], [b, d]] -> (a, b, c, d)`.
pub fn vec(m: &CMat2) -> CVec4 {
    [m.0[0][0], m.0[1][0], m.0[0][1], m.0[1][1]]
}

/// Inverse of [`vec`]: the n-th column is `v[2n..2n+2]`.
pub fn mat(v: &CVec4) -> CMat2 {
    CMat([[v[0], v[2]], [v[1], v[3]]])
}

/// Spectral decomposition `m = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct HermEigen<const N: usize> {
    /// Eigenvalues in descending order.
    pub values: [f64; N],
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMat<N>,
}

impl<const N: usize> HermEigen<N> {
    pub fn reconstruct(&self) -> CMat<N> {
        self.vectors * CMat::diag_real(&self.values) * self.vectors.adjoint()
    }
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues are returned in descending order; ties keep the order in which
/// the rotations left them on the diagonal.
pub fn herm_eig<const N: usize>(m: &CMat<N>) -> Result<HermEigen<N>> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL || !deviation.is_finite() {
        return Err(Error::NotHermitian { deviation });
    }

    let mut a = m.hermitian_part();
    let mut v = CMat::<N>::identity();
    let tol = JACOBI_OFF_TOL.min(f64::EPSILON * a.frobenius_norm());

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off == 0.0 || off < tol {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Strip the phase of a_pq, then a real rotation zeroes it.
                let phase = (apq / mag).conj();
                let zeta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + zeta.hypot(1.0))
                } else {
                    -1.0 / (-zeta + zeta.hypot(1.0))
                };
                let cs = 1.0 / t.hypot(1.0);
                let sn = t * cs;
                let j_pp = c(cs, 0.0);
                let j_pq = c(sn, 0.0);
                let j_qp = phase * (-sn);
                let j_qq = phase * cs;

                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * j_pp + akq * j_qp;
                    a.0[k][q] = akp * j_pq + akq * j_qq;
                }
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a.0[q][k] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;

                for k in 0..N {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * j_pp + vkq * j_qp;
                    v.0[k][q] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let raw: [f64; N] = std::array::from_fn(|i| a.0[i][i].re);
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    // slice::sort_by is stable
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));

    Ok(HermEigen {
        values: std::array::from_fn(|i| raw[order[i]]),
        vectors: CMat::from_fn(|r, col| v.0[r][order[col]]),
    })
}

/// Eigendecomposition of a PSD matrix with negative dust clipped to zero and
/// eigenvalues below the solver's resolution truncated.
pub(crate) fn psd_eig<const N: usize>(m: &CMat<N>) -> Result<HermEigen<N>> {
    let mut eig = herm_eig(m)?;
    let min = eig.values[N - 1];
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let floor = RANK_DUST * eig.values[0].max(0.0);
    for value in eig.values.iter_mut() {
        if *value <= floor {
            *value = 0.0;
        }
    }
    Ok(eig)
}

/// Factor a PSD matrix as `S S^dagger` with `S = V diag(sqrt(lambda))`.
pub fn psd_factor<const N: usize>(m: &CMat<N>) -> Result<CMat<N>> {
    let eig = psd_eig(m)?;
    Ok(CMat::from_fn(|r, col| {
        eig.vectors.0[r][col] * eig.values[col].sqrt()
    }))
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd<const N: usize>(m: &CMat<N>) -> Result<CMat<N>> {
    let eig = psd_eig(m)?;
    let roots: [f64; N] = std::array::from_fn(|i| eig.values[i].sqrt());
    let s = eig.vectors * CMat::diag_real(&roots) * eig.vectors.adjoint();
    Ok(s.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cmat4(rng: &mut impl Rng) -> CMat4 {
        CMat::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// det(H - x I) for a 4x4 matrix by Laplace expansion; only the real part
    /// matters for Hermitian H.
    fn char_poly(h: &CMat4, x: f64) -> f64 {
        fn det3(m: [[C64; 3]; 3]) -> C64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        let a = *h - CMat4::identity().scale_re(x);
        let mut det = ZERO;
        for col in 0..4 {
            let mut minor = [[ZERO; 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for k in 0..4 {
                    if k != col {
                        minor[r - 1][cc] = a.0[r][k];
                        cc += 1;
                    }
                }
            }
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            det += a.0[0][col] * det3(minor) * sign;
        }
        det.re
    }

    /// Roots of the characteristic polynomial by scanning for sign changes and
    /// bisecting each bracket.
    fn bisection_roots(h: &CMat4) -> Vec<f64> {
        let bound = 1.0 + h.frobenius_norm();
        let steps = 50_000;
        let dx = 2.0 * bound / steps as f64;
        let mut roots = Vec::new();
        let mut x0 = -bound;
        let mut f0 = char_poly(h, x0);
        for k in 1..=steps {
            let x1 = -bound + k as f64 * dx;
            let f1 = char_poly(h, x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut lo, mut hi, flo) = (x0, x1, f0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = char_poly(h, mid);
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    }

    #[test]
    fn identity_spectrum() {
        let eig = herm_eig(&CMat4::identity()).unwrap();
        assert_eq!(eig.values, [1.0; 4]);
    }

    #[test]
    fn zz_spectrum() {
        let zz = kron(&sigma_z(), &sigma_z());
        let eig = herm_eig(&zz).unwrap();
        assert_eq!(eig.values, [1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn random_hermitian_matches_bisection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let a = random_cmat4(&mut rng);
            let h = a + a.adjoint();
            let oracle = bisection_roots(&h);
            assert_eq!(oracle.len(), 4, "oracle must isolate 4 simple roots");
            let eig = herm_eig(&h).unwrap();
            for (x, y) in eig.values.iter().zip(&oracle) {
                assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_cmat4(&mut rng);
            let h = a + a.adjoint();
            let eig = herm_eig(&h).unwrap();
            let lhs = h * eig.vectors;
            let rhs = eig.vectors * CMat4::diag_real(&eig.values);
            assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
            let gram = eig.vectors.adjoint() * eig.vectors;
            assert!(gram.max_abs_diff(&CMat4::identity()) <= 1e-10);
            let tr: f64 = eig.values.iter().sum();
            assert!((tr - h.trace().re).abs() <= 1e-10);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn two_by_two_spectrum() {
        let h = sigma_x() + sigma_y();
        let eig = herm_eig(&h).unwrap();
        let s = 2f64.sqrt();
        assert!((eig.values[0] - s).abs() < 1e-14);
        assert!((eig.values[1] + s).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat4::identity();
        m.0[0][1] = c(1e-6, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_factor_identity_and_diagonal() {
        let s = psd_factor(&CMat4::identity()).unwrap();
        assert!((s * s.adjoint()).max_abs_diff(&CMat4::identity()) <= 1e-9);

        let d = CMat4::diag_real(&[4.0, 1.0, 0.0, 0.0]);
        let s = psd_factor(&d).unwrap();
        let norms: Vec<f64> = (0..4)
            .map(|j| s.column(j).iter().map(|z| z.norm_sqr()).sum())
            .collect();
        assert_eq!(norms, vec![4.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let d = CMat4::diag_real(&[1.0, 0.5, 0.0, -1e-3]);
        assert!(matches!(psd_factor(&d), Err(Error::NotPsd { .. })));
        // dust is clipped
        let d = CMat4::diag_real(&[1.0, 0.5, 0.0, -1e-11]);
        let s = psd_factor(&d).unwrap();
        assert!((s * s.adjoint()).max_abs_diff(&d) <= 1e-9);
    }

    #[test]
    fn sqrt_psd_diagonal() {
        let r = sqrt_psd(&CMat4::diag_real(&[4.0, 9.0, 0.0, 1.0])).unwrap();
        assert!(r.max_abs_diff(&CMat4::diag_real(&[2.0, 3.0, 0.0, 1.0])) <= 1e-14);
        assert!(sqrt_psd(&CMat4::identity()).unwrap().max_abs_diff(&CMat4::identity()) <= 1e-15);
    }

    #[test]
    fn sqrt_psd_random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_cmat4(&mut rng);
            let m = a * a.adjoint();
            let r = sqrt_psd(&m).unwrap();
            assert!((r * r).max_abs_diff(&m) <= 1e-9);
            assert!(herm_eig(&r).unwrap().values[3] >= -1e-12);
            let s = psd_factor(&m).unwrap();
            assert!((s * s.adjoint()).max_abs_diff(&m) <= 1e-9);
        }
    }

    #[test]
    fn vec_mat_convention() {
        let (a, b, cc, d) = (c(1.0, 0.5), c(2.0, 0.0), c(3.0, -1.0), c(4.0, 0.0));
        let m = CMat([[a, cc], [b, d]]);
        assert_eq!(vec(&m), [a, b, cc, d]);
        assert_eq!(vec(&CMat2::identity()), [ONE, ZERO, ZERO, ONE]);
        assert_eq!(mat(&vec(&m)), m);
    }

    #[test]
    fn kron_ordering() {
        // |1> ⊗ |0> = |10> is basis index 2
        let p1 = CMat([[ZERO, ZERO], [ZERO, ONE]]);
        let p0 = CMat([[ONE, ZERO], [ZERO, ZERO]]);
        let k = kron(&p1, &p0);
        assert_eq!(k.0[2][2], ONE);
        assert_eq!(k.trace(), ONE);
    }

    #[test]
    fn pauli_dot_matches_components() {
        let n = [0.3, -0.2, 0.5];
        let expected = sigma_x().scale_re(n[0]) + sigma_y().scale_re(n[1]) + sigma_z().scale_re(n[2]);
        assert!(pauli_dot(&n).max_abs_diff(&expected) < 1e-16);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cmat4() -> impl Strategy<Value = CMat4> {
            proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|xs| {
                CMat4::from_fn(|i, j| c(xs[2 * (4 * i + j)], xs[2 * (4 * i + j) + 1]))
            })
        }

        proptest! {
            #[test]
            fn eigenvalues_sum_to_trace(a in cmat4()) {
                let h = a + a.adjoint();
                let eig = herm_eig(&h).unwrap();
                let tr: f64 = eig.values.iter().sum();
                prop_assert!((tr - h.trace().re).abs() <= 1e-10);
                prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
            }

            #[test]
            fn vec_mat_inverse(xs in proptest::collection::vec(-1e3f64..1e3, 8)) {
                let v: CVec4 = std::array::from_fn(|k| c(xs[2 * k], xs[2 * k + 1]));
                prop_assert_eq!(vec(&mat(&v)), v);
            }
        }
    }
}
