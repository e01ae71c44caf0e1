//! Coherent Gibbs states, density matrices and row-major vectorization.
//!
//! All matrices are expressed in the energy eigenbasis. A density matrix
//! `ρ` is vectorized as `|ρ) = Σ ρ_nm |n⟩⊗|m⟩*`, i.e. entry `(n, m)` goes to
//! position `n d + m`, so that `AρB ↦ (A ⊗ Bᵀ)|ρ)`.

use faer::{Mat, Side};

use crate::error::{check_domain, Error, Result};
use crate::linalg::{c64, CMat, ZERO};

/// Boltzmann weights `exp(−β(E_n − E_min))`, unnormalized.
fn shifted_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    energies
        .iter()
        .map(|e| (-beta * (e - e_min)).exp())
        .collect()
}

/// `Z(β) = Σ_n exp(−β E_n)`.
pub fn partition_function(energies: &[f64], beta: f64) -> Result<f64> {
    check_domain("beta", beta, beta >= 0.0, "beta >= 0")?;
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: f64 = shifted_weights(energies, beta).iter().sum();
    Ok(shifted * (-beta * e_min).exp())
}

/// Boltzmann probabilities `p_n = exp(−βE_n)/Z(β)`.
pub fn boltzmann_probabilities(energies: &[f64], beta: f64) -> Result<Vec<f64>> {
    check_domain("beta", beta, beta >= 0.0, "beta >= 0")?;
    let w = shifted_weights(energies, beta);
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Plateau `F_p = Z(2β)/Z(β)² = Σ p_n²`.
pub fn plateau_value(energies: &[f64], beta: f64) -> Result<f64> {
    Ok(boltzmann_probabilities(energies, beta)?
        .iter()
        .map(|p| p * p)
        .sum())
}

/// Pure state with amplitudes `√p_n` on the energy eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentGibbsState {
    pub beta: f64,
    pub amplitudes: Vec<f64>,
    pub energies: Vec<f64>,
}

impl CoherentGibbsState {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    pub fn plateau(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.powi(4)).sum()
    }
}

pub fn make_cgs(energies: &[f64], beta: f64) -> Result<CoherentGibbsState> {
    if energies.is_empty() {
        return Err(Error::InvalidDimension { found: 0, min: 1 });
    }
    let amplitudes = boltzmann_probabilities(energies, beta)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    Ok(CoherentGibbsState {
        beta,
        amplitudes,
        energies: energies.to_vec(),
    })
}

/// Square complex matrix interpreted as a state in the energy eigenbasis.
///
/// [`DensityMatrix::new`] enforces the physical invariants; matrices coming
/// out of numerical evolution are wrapped without checks and can be
/// inspected with [`DensityMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat);

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        let rho = Self::from_mat_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_mat_unchecked(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidDimension { found: 0, min: 1 });
        }
        Ok(Self(matrix))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let v = c64::new(1.0 / d as f64, 0.0);
        Self(Mat::from_fn(d, d, |i, j| if i == j { v } else { ZERO }))
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[c64]) -> Self {
        let d = psi.len();
        Self(Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }

    pub fn get(&self, n: usize, m: usize) -> c64 {
        self.0[(n, m)]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let d = self.dim();
        let herm = Mat::from_fn(d, d, |i, j| (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5);
        let vals = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("density matrix d={d}: {e:?}")))?;
        Ok(vals[0])
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (error {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let lmin = self.min_eigenvalue()?;
        if lmin < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lmin:.3e}"
            )));
        }
        Ok(())
    }
}

/// `ρ_nm(0) = √(p_n p_m)`.
pub fn cgs_density(state: &CoherentGibbsState) -> DensityMatrix {
    let a = &state.amplitudes;
    let d = a.len();
    DensityMatrix(Mat::from_fn(d, d, |n, m| c64::new(a[n] * a[m], 0.0)))
}

/// Row-major flattening of a `d×d` matrix, length `d²`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState(pub Vec<c64>);

impl VectorizedState {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(a|b) = Σ a_k* b_k`.
    pub fn inner(&self, other: &Self) -> c64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    vectorize_mat(&rho.0)
}

pub(crate) fn vectorize_mat(m: &CMat) -> VectorizedState {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for n in 0..d {
        for k in 0..d {
            v.push(m[(n, k)]);
        }
    }
    VectorizedState(v)
}

/// Inverse of [`vectorize`]. The result is not checked for physicality.
pub fn devectorize(v: &VectorizedState) -> Result<DensityMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    Ok(DensityMatrix(Mat::from_fn(d, d, |n, m| v.0[n * d + m])))
}

/// Hilbert–Schmidt inner product `Tr[A† B]`.
pub fn hilbert_schmidt(a: &CMat, b: &CMat) -> c64 {
    let mut acc = ZERO;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, mul};
    use proptest::prelude::*;

    fn random_matrix(d: usize, seed: u64) -> CMat {
        // deterministic pseudo-random entries from a CUE draw
        let u = crate::rmt::sample_cue(d, seed).unwrap();
        Mat::from_fn(d, d, |i, j| u[(i, j)] * (1.0 + (i + 2 * j) as f64 * 0.1))
    }

    fn random_state(d: usize, seed: u64) -> DensityMatrix {
        let a = random_matrix(d, seed);
        let aa = mul(a.as_ref(), a.adjoint());
        let tr: c64 = (0..d).map(|i| aa[(i, i)]).sum();
        DensityMatrix::new(Mat::from_fn(d, d, |i, j| aa[(i, j)] / tr)).unwrap()
    }

    #[test]
    fn partition_function_values() {
        let e = [-1.0, 1.0];
        assert_eq!(partition_function(&[0.3, 5.0, -2.0], 0.0).unwrap(), 3.0);
        let z = partition_function(&e, 1.0).unwrap();
        assert!((z - 2.0 * 1f64.cosh()).abs() < 1e-14);
        assert!((z - 3.0862).abs() < 1e-4);
        assert!(partition_function(&e, -0.1).is_err());
    }

    #[test]
    fn partition_function_decreases_for_positive_energies() {
        let e = [0.5, 1.0, 2.5, 4.0];
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let z = partition_function(&e, i as f64 * 0.2).unwrap();
            assert!(z < prev);
            prev = z;
        }
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let e = [-800.0, -799.0, 0.0];
        let p = boltzmann_probabilities(&e, 2.0).unwrap();
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p[0] - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn cgs_infinite_temperature() {
        let e: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let s = make_cgs(&e, 0.0).unwrap();
        assert!(s.amplitudes.iter().all(|a| (a - 0.125).abs() < 1e-15));
        let rho = cgs_density(&s);
        for n in 0..64 {
            for m in 0..64 {
                assert!((rho.get(n, m).re - 1.0 / 64.0).abs() < 1e-15);
            }
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cgs_normalized_and_concentrates_at_low_temperature() {
        let e = [0.0, 0.3, 0.9, 2.0];
        let s = make_cgs(&e, 0.7).unwrap();
        let norm: f64 = s.amplitudes.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let cold = make_cgs(&e, 200.0).unwrap();
        assert!(cold.amplitudes[0] > 1.0 - 1e-12);
    }

    #[test]
    fn cgs_density_is_pure() {
        let e = [0.1, -0.4, 1.3, 0.2, 0.9];
        let rho = cgs_density(&make_cgs(&e, 0.8).unwrap());
        let p = hilbert_schmidt(rho.as_mat(), rho.as_mat()).re;
        assert!((p - 1.0).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        rho.validate().unwrap();
    }

    #[test]
    fn plateau_values() {
        let e = [-1.0, 1.0];
        assert!((plateau_value(&e, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let want = 2.0 * 2f64.cosh() / (2.0 * 1f64.cosh()).powi(2);
        let got = plateau_value(&e, 1.0).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.790013).abs() < 1e-6);
        // matches Z(2β)/Z(β)² directly
        let z1 = partition_function(&e, 1.0).unwrap();
        let z2 = partition_function(&e, 2.0).unwrap();
        assert!((got - z2 / (z1 * z1)).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_vectorizes_onto_diagonal_slots() {
        let v = vectorize(&DensityMatrix::maximally_mixed(4));
        for (k, x) in v.0.iter().enumerate() {
            let want = if k % 5 == 0 { 0.25 } else { 0.0 };
            assert_eq!(x.re, want);
            assert_eq!(x.im, 0.0);
        }
    }

    #[test]
    fn vectorized_self_inner_product_is_purity() {
        let rho = random_state(6, 4);
        let v = vectorize(&rho);
        let purity = hilbert_schmidt(rho.as_mat(), rho.as_mat());
        assert!((v.inner(&v) - purity).norm() < 1e-12);
    }

    #[test]
    fn sandwich_becomes_kronecker_product() {
        let d = 5;
        let a = random_matrix(d, 1);
        let b = random_matrix(d, 2);
        let rho = random_matrix(d, 3);
        let lhs = vectorize_mat(&mul(mul(a.as_ref(), rho.as_ref()).as_ref(), b.as_ref()));
        let k = kron(a.as_ref(), b.transpose());
        let v = vectorize_mat(&rho);
        let col = Mat::from_fn(d * d, 1, |i, _| v.0[i]);
        let rhs = mul(k.as_ref(), col.as_ref());
        for i in 0..d * d {
            assert!((lhs.0[i] - rhs[(i, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = DensityMatrix::maximally_mixed(3).into_mat();
        m[(0, 1)] = c64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = c64::new(0.1, 0.0);
        DensityMatrix::new(m.clone()).unwrap();
        m[(0, 0)] = c64::new(-0.1, 0.0);
        m[(1, 1)] = c64::new(0.7, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(devectorize(&VectorizedState(vec![ZERO; 5])).is_err());
    }

    proptest! {
        #[test]
        fn devectorize_inverts_vectorize(d in 1usize..7, seed in 0u64..1000) {
            let m = random_matrix(d, seed);
            let rho = DensityMatrix::from_mat_unchecked(m).unwrap();
            let back = devectorize(&vectorize(&rho)).unwrap();
            prop_assert_eq!(back, rho);
        }

        #[test]
        fn inner_product_is_hilbert_schmidt(d in 1usize..6, s1 in 0u64..500, s2 in 500u64..1000) {
            let a = random_matrix(d, s1);
            let b = random_matrix(d, s2);
            let hs = hilbert_schmidt(&a, &b);
            let vi = vectorize_mat(&a).inner(&vectorize_mat(&b));
            prop_assert!((hs - vi).norm() < 1e-12);
        }

        #[test]
        fn plateau_is_between_inverse_dim_and_one(
            e in proptest::collection::vec(-10.0f64..10.0, 2..20),
            beta in 0.0f64..5.0,
        ) {
            let f = plateau_value(&e, beta).unwrap();
            let d = e.len() as f64;
            prop_assert!(f >= 1.0 / d - 1e-12 && f <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn positive_state_has_nonnegative_spectrum() {
        let rho = random_state(4, 9);
        assert!(rho.min_eigenvalue().unwrap() > -1e-12);
    }
}
