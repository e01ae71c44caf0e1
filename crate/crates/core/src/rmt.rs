//! Seeded random-matrix sampling and the energy scales derived from it.
//!
//! Every sampler takes an explicit 64-bit seed and draws from a
//! `ChaCha8Rng` seeded through `SeedableRng::seed_from_u64`, so a recorded
//! seed reproduces the exact matrix on any platform. Ensembles derive one
//! seed per (master seed, realization, stream) with [`derive_seed`].

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::{check_domain, Error, Result};
use crate::linalg::{c64, CMat, ONE, ZERO};

/// Independent random streams of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Hamiltonian = 0,
    Kraus = 1,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of `stream` in realization `index` of an ensemble.
///
/// SplitMix64 applied to the master seed and to the stream counter
/// `4 * index + stream`, combined and mixed once more.
pub fn derive_seed(master_seed: u64, index: u64, stream: Stream) -> u64 {
    let counter = index.wrapping_mul(4).wrapping_add(stream as u64);
    splitmix64(splitmix64(master_seed) ^ splitmix64(counter.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Eigenvalues (and, when sampled here, the matrix and eigenvectors) of a
/// real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianSpectrum {
    pub dim: usize,
    pub sigma: f64,
    /// Sorted ascending.
    pub energies: Vec<f64>,
    pub seed: u64,
    pub matrix: Option<Mat<f64>>,
    /// Orthonormal eigenvectors as columns, in the order of `energies`.
    pub eigenvectors: Option<Mat<f64>>,
}

impl HamiltonianSpectrum {
    /// Spectrum given directly by its energies (no matrix).
    pub fn from_energies(mut energies: Vec<f64>, sigma: f64) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidDimension {
                found: energies.len(),
                min: 2,
            });
        }
        if let Some(bad) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::Domain {
                name: "energy",
                value: *bad,
                domain: "finite",
            });
        }
        energies.sort_by(f64::total_cmp);
        Ok(Self {
            dim: energies.len(),
            sigma,
            energies,
            seed: 0,
            matrix: None,
            eigenvectors: None,
        })
    }

    pub fn energy_range(&self) -> f64 {
        self.energies[self.dim - 1] - self.energies[0]
    }
}

/// Samples `H = (A + Aᵀ)/2` with i.i.d. `A_ij ~ N(0, σ²)`.
///
/// Off-diagonal entries have variance σ²/2 and diagonal entries σ², so the
/// eigenvalue density tends to the semicircle of radius `√(2d) σ`.
pub fn sample_goe(d: usize, sigma: f64, seed: u64) -> Result<HamiltonianSpectrum> {
    if d < 2 {
        return Err(Error::InvalidDimension { found: d, min: 2 });
    }
    check_domain("sigma", sigma, sigma > 0.0, "sigma > 0")?;
    let mut rng = rng(seed);
    let off = sigma / 2f64.sqrt();
    let mut h = Mat::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z: f64 = rng.sample(StandardNormal);
            if i == j {
                h[(i, i)] = sigma * z;
            } else {
                h[(i, j)] = off * z;
                h[(j, i)] = off * z;
            }
        }
    }
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("GOE d={d} seed={seed}: {e:?}")))?;
    let energies: Vec<f64> = (0..d).map(|i| evd.S()[i]).collect();
    let eigenvectors = evd.U().to_owned();
    Ok(HamiltonianSpectrum {
        dim: d,
        sigma,
        energies,
        seed,
        matrix: Some(h),
        eigenvectors: Some(eigenvectors),
    })
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal folded into `Q`.
pub fn sample_cue(n: usize, seed: u64) -> Result<CMat> {
    if n < 1 {
        return Err(Error::InvalidDimension { found: n, min: 1 });
    }
    let mut rng = rng(seed);
    let scale = 0.5f64.sqrt();
    let mut z = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            z[(i, j)] = c64::new(scale * re, scale * im);
        }
    }
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<c64> = (0..n)
        .map(|k| {
            let v = r[(k, k)];
            let m = v.norm();
            if m > 0.0 {
                v / m
            } else {
                ONE
            }
        })
        .collect();
    Ok(Mat::from_fn(n, n, |i, j| q[(i, j)] * phases[j]))
}

/// Kraus-Choi operators satisfying `Σ N_r† N_r = 1`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub dim: usize,
    pub operators: Vec<CMat>,
    pub seed: u64,
    generator_only: bool,
}

/// Max-norm tolerance on `Σ N† N − 1`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-12;

impl KrausSet {
    /// Validated set; fails unless the operators are square, of equal size,
    /// and trace preserving within [`TRACE_PRESERVATION_TOL`].
    pub fn new(operators: Vec<CMat>, seed: u64) -> Result<Self> {
        let set = Self::unchecked(operators, seed, false)?;
        let dev = set.trace_preservation_error();
        if dev > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(set)
    }

    /// Jump operators that only enter a Lindblad generator. They are exempt
    /// from trace preservation and rejected by finite-period channels.
    pub fn generator_only(operators: Vec<CMat>) -> Result<Self> {
        Self::unchecked(operators, 0, true)
    }

    fn unchecked(operators: Vec<CMat>, seed: u64, generator_only: bool) -> Result<Self> {
        let first = operators.first().ok_or(Error::InsufficientData {
            needed: 1,
            found: 0,
        })?;
        let dim = first.nrows();
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: if op.nrows() != dim {
                        op.nrows()
                    } else {
                        op.ncols()
                    },
                });
            }
        }
        Ok(Self {
            dim,
            operators,
            seed,
            generator_only,
        })
    }

    pub fn count(&self) -> usize {
        self.operators.len()
    }

    pub fn is_generator_only(&self) -> bool {
        self.generator_only
    }

    /// `max |Σ N† N − 1|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim;
        let mut acc = Mat::<c64>::zeros(d, d);
        for op in &self.operators {
            let prod = crate::linalg::mul(op.adjoint(), op.as_ref());
            for j in 0..d {
                for i in 0..d {
                    acc[(i, j)] += prod[(i, j)];
                }
            }
        }
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((acc[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// `N_r ↦ Qᵀ N_r Q` for a real orthogonal `Q` (e.g. Hamiltonian
    /// eigenvectors as columns).
    pub fn rotated(&self, basis: &Mat<f64>) -> Result<Self> {
        if basis.nrows() != self.dim || basis.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: basis.nrows(),
            });
        }
        let q = Mat::from_fn(self.dim, self.dim, |i, j| c64::new(basis[(i, j)], 0.0));
        let operators = self
            .operators
            .iter()
            .map(|n| {
                crate::linalg::mul(
                    q.transpose(),
                    crate::linalg::mul(n.as_ref(), q.as_ref()).as_ref(),
                )
            })
            .collect();
        Ok(Self {
            dim: self.dim,
            operators,
            seed: self.seed,
            generator_only: self.generator_only,
        })
    }
}

/// Default first column (1-based `n`) of the truncation window.
pub const DEFAULT_COLUMN_OFFSET: usize = 1;

/// The `K` consecutive `d×d` row blocks of `d` consecutive columns of a
/// `(K d)×(K d)` unitary: `N_r[ν, μ] = V[r d + ν, n + μ]` (0-based ν, μ, r).
///
/// `column_offset` must lie in `1..=d(K−1)`; it is ignored when `K = 1`,
/// where the single operator is `V` itself.
pub fn kraus_from_truncation(
    v: &CMat,
    d: usize,
    k: usize,
    column_offset: usize,
    seed: u64,
) -> Result<KrausSet> {
    if d < 1 || k < 1 {
        return Err(Error::InvalidDimension {
            found: d.min(k),
            min: 1,
        });
    }
    if v.nrows() != k * d || v.ncols() != k * d {
        return Err(Error::DimensionMismatch {
            expected: k * d,
            found: v.nrows(),
        });
    }
    let offset = if k == 1 {
        0
    } else {
        let max = d * (k - 1);
        if column_offset < 1 || column_offset > max {
            return Err(Error::OffsetOutOfRange {
                offset: column_offset,
                max,
            });
        }
        column_offset
    };
    let operators = (0..k)
        .map(|r| Mat::from_fn(d, d, |nu, mu| v[(r * d + nu, offset + mu)]))
        .collect();
    KrausSet::new(operators, seed)
}

/// `K` Kraus operators from one `CUE(K d)` draw.
pub fn sample_kraus(d: usize, k: usize, column_offset: usize, seed: u64) -> Result<KrausSet> {
    if k < 1 {
        return Err(Error::InvalidDimension { found: k, min: 1 });
    }
    let v = sample_cue(k * d, seed)?;
    kraus_from_truncation(&v, d, k, column_offset, seed)
}

/// Radius `√(2d) σ` of the GOE semicircle.
pub fn semicircle_radius(d: usize, sigma: f64) -> f64 {
    (2.0 * d as f64).sqrt() * sigma
}

/// `μ(E) = √(2dσ² − E²) / (π d σ²)`, zero outside the support.
pub fn semicircle_density(energy: f64, d: usize, sigma: f64) -> f64 {
    let r2 = 2.0 * d as f64 * sigma * sigma;
    let arg = r2 - energy * energy;
    if arg <= 0.0 {
        0.0
    } else {
        arg.sqrt() / (PI * d as f64 * sigma * sigma)
    }
}

/// `Δ = σ√(8d)/(d−1)`.
pub fn mean_level_spacing(d: usize, sigma: f64) -> f64 {
    sigma * (8.0 * d as f64).sqrt() / (d as f64 - 1.0)
}

/// `t_H = πħ(d−1)/(σ√(2d))`.
pub fn heisenberg_time(d: usize, sigma: f64, hbar: f64) -> f64 {
    PI * hbar * (d as f64 - 1.0) / (sigma * (2.0 * d as f64).sqrt())
}

/// `τ_c = πħ/(σ√(2d))`, the period at which the unitary phases first fit
/// inside 2π.
pub fn critical_tau(d: usize, sigma: f64, hbar: f64) -> f64 {
    PI * hbar / (sigma * (2.0 * d as f64).sqrt())
}
