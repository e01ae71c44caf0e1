//! Parametric quantum channels
//!
//! ```text
//! Λ[ρ] = (1−ε) e^{−iτH/ħ} ρ e^{iτH/ħ} + ε Σ_r N_r ρ N_r†
//! ```
//!
//! with their Liouville-space matrices, iterated application, the
//! interleaved `W_ε U_τ` variant and the Lindblad generator of the
//! `ε = 2γτ`, `τ → 0` limit.
//!
//! Everything is expressed in the eigenbasis of `H`, where the unitary part
//! is diagonal with phases `e^{iτ(E_m−E_n)/ħ}` at position `n d + m`. Kraus
//! operators handed to [`ParametricChannel::new`] are taken to be in that
//! basis already; [`ParametricChannel::from_computational_basis`] rotates
//! them first.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};

use crate::error::{check_domain, Error, Result};
use crate::linalg::{c64, kron, mul, CMat, ONE, ZERO};
use crate::rmt::{HamiltonianSpectrum, KrausSet};
use crate::states::{devectorize, vectorize, DensityMatrix, VectorizedState};

/// Dense `d²×d²` matrix acting on row-major vectorized states.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    /// Hilbert-space dimension `d`.
    pub dim: usize,
    pub matrix: CMat,
}

impl Superoperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || d == 0 {
            return Err(Error::InvalidDimension { found: n, min: 1 });
        }
        Ok(Self { dim: d, matrix })
    }

    pub(crate) fn from_parts(dim: usize, matrix: CMat) -> Self {
        debug_assert_eq!(matrix.nrows(), dim * dim);
        Self { dim, matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_parts(d, crate::linalg::identity(d * d))
    }

    pub fn apply(&self, v: &VectorizedState) -> Result<VectorizedState> {
        let n = self.matrix.nrows();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let col = Mat::from_fn(n, 1, |i, _| v.0[i]);
        let out = mul(self.matrix.as_ref(), col.as_ref());
        Ok(VectorizedState((0..n).map(|i| out[(i, 0)]).collect()))
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        devectorize(&self.apply(&vectorize(rho))?)
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_parts(self.dim, mul(self.matrix.as_ref(), other.matrix.as_ref()))
    }

    /// Dense matrix power by repeated squaring.
    pub fn power(&self, j: u32) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    /// `Σ_{ℓk} M_{ℓk}`.
    pub fn element_sum(&self) -> c64 {
        let n = self.matrix.nrows();
        let mut s = ZERO;
        for j in 0..n {
            for i in 0..n {
                s += self.matrix[(i, j)];
            }
        }
        s
    }
}

/// Which of the two single-step maps a trajectory iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelForm {
    /// `Λ_{τ,ε} = (1−ε) U_τ + ε Σ N ⊗ N*`
    #[default]
    Mixture,
    /// `W_ε U_τ = ((1−ε) 1 + ε Σ N ⊗ N*) U_τ`
    Interleaved,
}

#[derive(Debug, Clone)]
pub struct ParametricChannel {
    /// Dissipation period.
    pub tau: f64,
    /// Dissipation strength in `[0, 1]`.
    pub epsilon: f64,
    pub hbar: f64,
    pub energies: Vec<f64>,
    /// Kraus operators in the energy eigenbasis.
    pub kraus: KrausSet,
}

impl ParametricChannel {
    pub fn new(
        hamiltonian: &HamiltonianSpectrum,
        kraus: KrausSet,
        tau: f64,
        epsilon: f64,
        hbar: f64,
    ) -> Result<Self> {
        Self::from_energies(hamiltonian.energies.clone(), kraus, tau, epsilon, hbar)
    }

    pub fn from_energies(
        energies: Vec<f64>,
        kraus: KrausSet,
        tau: f64,
        epsilon: f64,
        hbar: f64,
    ) -> Result<Self> {
        check_domain("tau", tau, tau >= 0.0, "tau >= 0")?;
        check_domain(
            "epsilon",
            epsilon,
            (0.0..=1.0).contains(&epsilon),
            "0 <= epsilon <= 1",
        )?;
        check_domain("hbar", hbar, hbar > 0.0, "hbar > 0")?;
        if kraus.is_generator_only() {
            return Err(Error::GeneratorOnly);
        }
        if kraus.dim != energies.len() {
            return Err(Error::DimensionMismatch {
                expected: energies.len(),
                found: kraus.dim,
            });
        }
        Ok(Self {
            tau,
            epsilon,
            hbar,
            energies,
            kraus,
        })
    }

    /// Kraus operators given in the basis where `H` is the sampled matrix;
    /// they are rotated into the eigenbasis with the stored eigenvectors.
    pub fn from_computational_basis(
        hamiltonian: &HamiltonianSpectrum,
        kraus: &KrausSet,
        tau: f64,
        epsilon: f64,
        hbar: f64,
    ) -> Result<Self> {
        let basis = hamiltonian
            .eigenvectors
            .as_ref()
            .ok_or(Error::Unsupported("Hamiltonian carries no eigenvectors"))?;
        Self::new(hamiltonian, kraus.rotated(basis)?, tau, epsilon, hbar)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `e^{−iτ(E_n − E_m)/ħ}` at `n d + m`.
    pub fn unitary_phases(&self) -> Vec<c64> {
        unitary_phases(&self.energies, self.tau, self.hbar)
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

fn unitary_phases(energies: &[f64], tau: f64, hbar: f64) -> Vec<c64> {
    let d = energies.len();
    let mut out = Vec::with_capacity(d * d);
    for n in 0..d {
        for m in 0..d {
            let angle = tau * (energies[m] - energies[n]) / hbar;
            out.push(c64::new(angle.cos(), angle.sin()));
        }
    }
    out
}

/// Reusable buffers for `Σ N ρ N†`.
struct KrausWork {
    tmp: CMat,
}

impl KrausWork {
    fn new(d: usize) -> Self {
        Self {
            tmp: Mat::zeros(d, d),
        }
    }

    /// `out += weight · Σ_r N_r rho N_r†`
    fn accumulate(&mut self, kraus: &KrausSet, rho: &CMat, weight: f64, out: &mut CMat) {
        let w = c64::new(weight, 0.0);
        for n in &kraus.operators {
            matmul(
                self.tmp.as_mut(),
                Accum::Replace,
                n.as_ref(),
                rho.as_ref(),
                ONE,
                Par::Seq,
            );
            matmul(
                out.as_mut(),
                Accum::Add,
                self.tmp.as_ref(),
                n.adjoint(),
                w,
                Par::Seq,
            );
        }
    }
}

/// Iterates a channel on one state with preallocated buffers.
pub struct ChannelStepper<'a> {
    channel: &'a ParametricChannel,
    form: ChannelForm,
    phases: Vec<c64>,
    state: CMat,
    next: CMat,
    rotated: CMat,
    work: KrausWork,
    step: u64,
}

impl<'a> ChannelStepper<'a> {
    pub fn new(
        channel: &'a ParametricChannel,
        rho0: &DensityMatrix,
        form: ChannelForm,
    ) -> Result<Self> {
        channel.check_state(rho0)?;
        let d = channel.dim();
        Ok(Self {
            channel,
            form,
            phases: channel.unitary_phases(),
            state: rho0.as_mat().clone(),
            next: Mat::zeros(d, d),
            rotated: Mat::zeros(d, d),
            work: KrausWork::new(d),
            step: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn state(&self) -> &CMat {
        &self.state
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_mat_unchecked(self.state.clone()).expect("square state")
    }

    pub fn advance(&mut self) {
        let ch = self.channel;
        let d = ch.dim();
        let keep = 1.0 - ch.epsilon;
        for m in 0..d {
            for n in 0..d {
                self.rotated[(n, m)] = self.state[(n, m)] * self.phases[n * d + m];
            }
        }
        for m in 0..d {
            for n in 0..d {
                self.next[(n, m)] = self.rotated[(n, m)] * keep;
            }
        }
        if ch.epsilon > 0.0 {
            let source = match self.form {
                ChannelForm::Mixture => &self.state,
                ChannelForm::Interleaved => &self.rotated,
            };
            self.work
                .accumulate(&ch.kraus, source, ch.epsilon, &mut self.next);
        }
        std::mem::swap(&mut self.state, &mut self.next);
        self.step += 1;
    }
}

/// One application of the channel in operator-sum form.
pub fn apply_channel(ch: &ParametricChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut s = ChannelStepper::new(ch, rho, ChannelForm::Mixture)?;
    s.advance();
    Ok(s.density())
}

/// One application of `W_ε U_τ` in operator-sum form.
pub fn apply_wu_channel(ch: &ParametricChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut s = ChannelStepper::new(ch, rho, ChannelForm::Interleaved)?;
    s.advance();
    Ok(s.density())
}

/// States after `0, 1, …, steps` applications.
pub fn evolve_discrete(
    ch: &ParametricChannel,
    rho0: &DensityMatrix,
    steps: u64,
    form: ChannelForm,
) -> Result<Vec<DensityMatrix>> {
    let mut s = ChannelStepper::new(ch, rho0, form)?;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(rho0.clone());
    for _ in 0..steps {
        s.advance();
        out.push(s.density());
    }
    Ok(out)
}

/// Diagonal `U_τ = e^{iτ(1⊗Hᵀ − H⊗1)/ħ}`.
pub fn unitary_superoperator(energies: &[f64], tau: f64, hbar: f64) -> Superoperator {
    let d = energies.len();
    let phases = unitary_phases(energies, tau, hbar);
    Superoperator::from_parts(d, crate::linalg::diag(&phases))
}

fn conj(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

/// `Σ_r N_r ⊗ N_r*`.
pub fn dissipative_superoperator(kraus: &KrausSet) -> Superoperator {
    let d = kraus.dim;
    let mut acc = Mat::<c64>::zeros(d * d, d * d);
    for n in &kraus.operators {
        let k = kron(n.as_ref(), conj(n).as_ref());
        for j in 0..d * d {
            for i in 0..d * d {
                acc[(i, j)] += k[(i, j)];
            }
        }
    }
    Superoperator::from_parts(d, acc)
}

/// `Λ_{τ,ε} = (1−ε) U_τ + ε Σ N ⊗ N*`.
pub fn build_superoperator(ch: &ParametricChannel) -> Superoperator {
    let d = ch.dim();
    let mut m = dissipative_superoperator(&ch.kraus).matrix;
    let eps = c64::new(ch.epsilon, 0.0);
    for j in 0..d * d {
        for i in 0..d * d {
            m[(i, j)] *= eps;
        }
    }
    let keep = 1.0 - ch.epsilon;
    for (k, p) in ch.unitary_phases().into_iter().enumerate() {
        m[(k, k)] += p * keep;
    }
    Superoperator::from_parts(d, m)
}

/// `W_ε = (1−ε) 1 + ε Σ N ⊗ N*`.
pub fn w_channel(kraus: &KrausSet, epsilon: f64) -> Superoperator {
    let d = kraus.dim;
    let mut m = dissipative_superoperator(kraus).matrix;
    let eps = c64::new(epsilon, 0.0);
    for j in 0..d * d {
        for i in 0..d * d {
            m[(i, j)] *= eps;
        }
    }
    for k in 0..d * d {
        m[(k, k)] += c64::new(1.0 - epsilon, 0.0);
    }
    Superoperator::from_parts(d, m)
}

/// `W_ε U_τ`; `U_τ` is diagonal so this scales the columns of `W_ε`.
pub fn build_wu_channel(ch: &ParametricChannel) -> Superoperator {
    let d = ch.dim();
    let mut m = w_channel(&ch.kraus, ch.epsilon).matrix;
    let phases = ch.unitary_phases();
    for (j, p) in phases.iter().enumerate() {
        for i in 0..d * d {
            m[(i, j)] *= *p;
        }
    }
    Superoperator::from_parts(d, m)
}

/// Vectorized Lindblad generator
///
/// ```text
/// −(i/ħ)(H⊗1 − 1⊗Hᵀ) + 2γ Σ_r [N_r⊗N_r* − ½(N_r†N_r ⊗ 1 + 1 ⊗ (N_r†N_r)ᵀ)]
/// ```
///
/// with `H = diag(energies)`. Accepts generator-only jump operators.
pub fn lindblad_generator(
    energies: &[f64],
    jumps: &KrausSet,
    gamma: f64,
    hbar: f64,
) -> Result<Superoperator> {
    check_domain("gamma", gamma, gamma >= 0.0, "gamma >= 0")?;
    check_domain("hbar", hbar, hbar > 0.0, "hbar > 0")?;
    let d = energies.len();
    if jumps.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: jumps.dim,
        });
    }
    let mut l = Mat::<c64>::zeros(d * d, d * d);
    let rate = 2.0 * gamma;
    for n in &jumps.operators {
        let jump = kron(n.as_ref(), conj(n).as_ref());
        let ndn = mul(n.adjoint(), n.as_ref());
        for j in 0..d * d {
            for i in 0..d * d {
                l[(i, j)] += jump[(i, j)] * rate;
            }
        }
        // ½(N†N ⊗ 1 + 1 ⊗ (N†N)ᵀ): entries at ((a,b),(c,e)) are
        // ½(ndn[a,c] δ_be + δ_ac ndn[e,b])
        for a in 0..d {
            for b in 0..d {
                let row = a * d + b;
                for c in 0..d {
                    l[(row, c * d + b)] -= ndn[(a, c)] * (0.5 * rate);
                }
                for e in 0..d {
                    l[(row, a * d + e)] -= ndn[(e, b)] * (0.5 * rate);
                }
            }
        }
    }
    for a in 0..d {
        for b in 0..d {
            let w = energies[a] - energies[b];
            l[(a * d + b, a * d + b)] += c64::new(0.0, -w / hbar);
        }
    }
    Ok(Superoperator::from_parts(d, l))
}
