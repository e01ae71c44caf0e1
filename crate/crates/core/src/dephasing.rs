//! Energy dephasing: `∂ρ/∂t = −(i/ħ)[H, ρ] − γ[H, [H, ρ]]`.
//!
//! In the energy eigenbasis the dynamics is diagonal: every coherence
//! `ρ_nm` picks up the factor `exp(−(i/ħ) t ω_nm − γ t ω_nm²)` with
//! `ω_nm = E_n − E_m`, so all diagnostics of a coherent Gibbs state have
//! closed forms as sums over level pairs.

use faer::Mat;

use crate::error::{check_domain, Error, Result};
use crate::linalg::{c64, ZERO};
use crate::pqc::Superoperator;
use crate::states::{boltzmann_probabilities, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdParams {
    /// Dephasing strength, units of 1/(energy² · time).
    pub gamma: f64,
    pub hbar: f64,
}

impl EdParams {
    pub fn new(gamma: f64, hbar: f64) -> Result<Self> {
        check_domain("gamma", gamma, gamma >= 0.0, "gamma >= 0")?;
        check_domain("hbar", hbar, hbar > 0.0, "hbar > 0")?;
        Ok(Self { gamma, hbar })
    }
}

impl Default for EdParams {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            hbar: 1.0,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    check_domain("t", t, t >= 0.0, "t >= 0")
}

/// Closed-form evolution of an arbitrary initial state.
pub fn ed_evolve(
    rho0: &DensityMatrix,
    energies: &[f64],
    params: EdParams,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    let d = rho0.dim();
    if energies.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: energies.len(),
        });
    }
    let m = Mat::from_fn(d, d, |n, k| {
        let w = energies[n] - energies[k];
        let factor = c64::new(-params.gamma * t * w * w, -t * w / params.hbar).exp();
        rho0.get(n, k) * factor
    });
    DensityMatrix::from_mat_unchecked(m)
}

/// Level pairs `m < n` of a coherent Gibbs state, precomputed once so that
/// series over long time grids cost `O(d²)` per point.
#[derive(Debug, Clone)]
pub struct EdPairs {
    dim: usize,
    beta: f64,
    plateau: f64,
    gaps: Vec<f64>,
    /// `p_n p_m`
    weights: Vec<f64>,
    /// `√(p_n p_m)`
    root_weights: Vec<f64>,
}

impl EdPairs {
    pub fn new(energies: &[f64], beta: f64) -> Result<Self> {
        let p = boltzmann_probabilities(energies, beta)?;
        let d = energies.len();
        let cap = d * (d.saturating_sub(1)) / 2;
        let mut gaps = Vec::with_capacity(cap);
        let mut weights = Vec::with_capacity(cap);
        let mut root_weights = Vec::with_capacity(cap);
        for n in 0..d {
            for m in 0..n {
                gaps.push(energies[n] - energies[m]);
                weights.push(p[n] * p[m]);
                root_weights.push((p[n] * p[m]).sqrt());
            }
        }
        Ok(Self {
            dim: d,
            beta,
            plateau: p.iter().map(|x| x * x).sum(),
            gaps,
            weights,
            root_weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    /// `F_p + 2 Σ p_n p_m e^{−γtω²} cos(ωt/ħ)`
    pub fn sff(&self, params: EdParams, t: f64) -> Result<f64> {
        check_time(t)?;
        let s: f64 = self
            .gaps
            .iter()
            .zip(&self.weights)
            .map(|(w, p)| p * (-params.gamma * t * w * w).exp() * (w * t / params.hbar).cos())
            .sum();
        Ok(self.plateau + 2.0 * s)
    }

    /// `2 Σ √(p_n p_m) e^{−γtω²}`
    pub fn cl1(&self, params: EdParams, t: f64) -> Result<f64> {
        check_time(t)?;
        let s: f64 = self
            .gaps
            .iter()
            .zip(&self.root_weights)
            .map(|(w, p)| p * (-params.gamma * t * w * w).exp())
            .sum();
        Ok(2.0 * s)
    }

    /// `F_p + 2 Σ p_n p_m e^{−2γtω²}`
    pub fn purity(&self, params: EdParams, t: f64) -> Result<f64> {
        check_time(t)?;
        let s: f64 = self
            .gaps
            .iter()
            .zip(&self.weights)
            .map(|(w, p)| p * (-2.0 * params.gamma * t * w * w).exp())
            .sum();
        Ok(self.plateau + 2.0 * s)
    }

    /// `∂C_l1/∂γ = −2 Σ √(p_n p_m) t ω² e^{−γtω²}`
    pub fn cl1_gamma_derivative(&self, params: EdParams, t: f64) -> Result<f64> {
        check_time(t)?;
        let s: f64 = self
            .gaps
            .iter()
            .zip(&self.root_weights)
            .map(|(w, p)| p * t * w * w * (-params.gamma * t * w * w).exp())
            .sum();
        Ok(-2.0 * s)
    }

    /// Two-term truncation of the cosine series at infinite temperature:
    /// `SFF(t) ≥ (1/d)(1 + C_l1(t) + t ∂_γC_l1(t) / (2ħ²))`.
    pub fn sff_lower_bound(&self, params: EdParams, t: f64) -> Result<f64> {
        if self.beta != 0.0 {
            return Err(Error::Unsupported(
                "the coherence lower bound on the SFF holds at infinite temperature only",
            ));
        }
        let c = self.cl1(params, t)?;
        let dc = self.cl1_gamma_derivative(params, t)?;
        let hbar2 = params.hbar * params.hbar;
        Ok((1.0 + c + t * dc / (2.0 * hbar2)) / self.dim as f64)
    }
}

/// All dephasing observables at one time, from a single pass over the pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdPoint {
    pub sff: f64,
    pub cl1: f64,
    pub purity: f64,
    /// Present at `β = 0` only.
    pub lower_bound: Option<f64>,
}

impl EdPairs {
    pub fn evaluate(&self, params: EdParams, t: f64) -> Result<EdPoint> {
        check_time(t)?;
        let (mut sff, mut cl1, mut purity, mut dcl1) = (0.0, 0.0, 0.0, 0.0);
        let damped = params.gamma != 0.0;
        for ((w, p), q) in self.gaps.iter().zip(&self.weights).zip(&self.root_weights) {
            let decay = if damped {
                (-params.gamma * t * w * w).exp()
            } else {
                1.0
            };
            sff += p * decay * (w * t / params.hbar).cos();
            cl1 += q * decay;
            purity += p * decay * decay;
            dcl1 += q * t * w * w * decay;
        }
        let cl1 = 2.0 * cl1;
        let lower_bound = (self.beta == 0.0)
            .then(|| (1.0 + cl1 - t * dcl1 / (params.hbar * params.hbar)) / self.dim as f64);
        Ok(EdPoint {
            sff: self.plateau + 2.0 * sff,
            cl1,
            purity: self.plateau + 2.0 * purity,
            lower_bound,
        })
    }
}

pub fn ed_sff(energies: &[f64], beta: f64, params: EdParams, t: f64) -> Result<f64> {
    EdPairs::new(energies, beta)?.sff(params, t)
}

pub fn ed_cl1(energies: &[f64], beta: f64, params: EdParams, t: f64) -> Result<f64> {
    EdPairs::new(energies, beta)?.cl1(params, t)
}

pub fn ed_purity(energies: &[f64], beta: f64, params: EdParams, t: f64) -> Result<f64> {
    EdPairs::new(energies, beta)?.purity(params, t)
}

/// Infinite-temperature lower bound; see [`EdPairs::sff_lower_bound`].
pub fn ed_sff_lower_bound(energies: &[f64], params: EdParams, t: f64) -> Result<f64> {
    EdPairs::new(energies, 0.0)?.sff_lower_bound(params, t)
}

/// Diagonal `d²×d²` generator with entries `−(i/ħ)ω_nm − γω_nm²` at
/// position `n d + m`.
pub fn ed_liouvillian(energies: &[f64], params: EdParams) -> Superoperator {
    let d = energies.len();
    let mut m = Mat::from_fn(d * d, d * d, |_, _| ZERO);
    for n in 0..d {
        for k in 0..d {
            let w = energies[n] - energies[k];
            m[(n * d + k, n * d + k)] = c64::new(-params.gamma * w * w, -w / params.hbar);
        }
    }
    Superoperator::from_parts(d, m)
}
