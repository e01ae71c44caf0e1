//! Seeded realizations and ensemble runs.
//!
//! Realization `i` of a run with master seed `s` draws its Hamiltonian from
//! `derive_seed(s, i, Stream::Hamiltonian)` and its Kraus set from
//! `derive_seed(s, i, Stream::Kraus)`, so results do not depend on how the
//! realizations are scheduled. Per-realization series are collected in index
//! order before reduction.

use rayon::prelude::*;

use crate::dephasing::{EdPairs, EdParams};
use crate::diagnostics::{
    cl1_mat, purity_mat, sff_fidelity_mat, DiagnosticSeries, EnsembleAccumulator,
};
use crate::error::{check_domain, Error, Result};
use crate::pqc::{ChannelForm, ChannelStepper, ParametricChannel};
use crate::rmt::{
    derive_seed, sample_goe, sample_kraus, HamiltonianSpectrum, KrausSet, Stream,
    DEFAULT_COLUMN_OFFSET,
};
use crate::states::{cgs_density, make_cgs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationSpec {
    pub dim: usize,
    pub sigma: f64,
    /// Number of Kraus operators.
    pub kraus: usize,
    pub column_offset: usize,
    pub master_seed: u64,
}

impl RealizationSpec {
    pub fn new(dim: usize, sigma: f64, kraus: usize, master_seed: u64) -> Self {
        Self {
            dim,
            sigma,
            kraus,
            column_offset: DEFAULT_COLUMN_OFFSET,
            master_seed,
        }
    }

    pub fn hamiltonian(&self, index: u64) -> Result<HamiltonianSpectrum> {
        sample_goe(
            self.dim,
            self.sigma,
            derive_seed(self.master_seed, index, Stream::Hamiltonian),
        )
    }

    pub fn kraus_set(&self, index: u64) -> Result<KrausSet> {
        sample_kraus(
            self.dim,
            self.kraus,
            self.column_offset,
            derive_seed(self.master_seed, index, Stream::Kraus),
        )
    }
}

/// Dephasing diagnostics on a time grid; at `β = 0` the lower-bound column
/// holds the derivative bound instead of `(1 − C_l1)/d`.
pub fn ed_series(
    energies: &[f64],
    beta: f64,
    params: EdParams,
    times: &[f64],
) -> Result<DiagnosticSeries> {
    let pairs = EdPairs::new(energies, beta)?;
    let mut s = DiagnosticSeries::new(times.to_vec(), energies.len(), beta, pairs.plateau());
    for &t in times {
        let pt = pairs.evaluate(params, t)?;
        s.push(pt.sff, pt.cl1, pt.purity);
        if let Some(b) = pt.lower_bound {
            *s.lower_bound.last_mut().expect("just pushed") = b;
        }
    }
    s.metadata.insert("model".into(), "energy-dephasing".into());
    s.metadata.insert("gamma".into(), params.gamma.to_string());
    if beta == 0.0 {
        s.metadata.insert("lower_bound".into(), "derivative".into());
    }
    Ok(s)
}

/// Isolated dynamics sampled at `t = jτ`, in closed form.
pub fn isolated_series(
    energies: &[f64],
    beta: f64,
    hbar: f64,
    tau: f64,
    steps: &[u64],
) -> Result<DiagnosticSeries> {
    let params = EdParams::new(0.0, hbar)?;
    let pairs = EdPairs::new(energies, beta)?;
    let times: Vec<f64> = steps.iter().map(|&j| j as f64 * tau).collect();
    let mut s = DiagnosticSeries::new(times.clone(), energies.len(), beta, pairs.plateau());
    for &t in &times {
        let pt = pairs.evaluate(params, t)?;
        s.push(pt.sff, pt.cl1, pt.purity);
    }
    s.steps = Some(steps.to_vec());
    s.metadata.insert("model".into(), "isolated".into());
    Ok(s)
}

/// Iterates the channel from the coherent Gibbs state and records the
/// diagnostics at the sorted step indices `steps`.
pub fn pqc_series(
    ch: &ParametricChannel,
    beta: f64,
    steps: &[u64],
    form: ChannelForm,
) -> Result<DiagnosticSeries> {
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::SeriesMismatch(
            "steps must be strictly increasing".into(),
        ));
    }
    let cgs = make_cgs(&ch.energies, beta)?;
    let times: Vec<f64> = steps.iter().map(|&j| j as f64 * ch.tau).collect();
    let mut s = DiagnosticSeries::new(times, ch.dim(), beta, cgs.plateau());
    let rho0 = cgs_density(&cgs);
    let mut stepper = ChannelStepper::new(ch, &rho0, form)?;
    for &j in steps {
        while stepper.step_count() < j {
            stepper.advance();
        }
        let rho = stepper.state();
        s.push(
            sff_fidelity_mat(&cgs.amplitudes, rho),
            cl1_mat(rho),
            purity_mat(rho),
        );
    }
    s.steps = Some(steps.to_vec());
    s.metadata.insert("model".into(), "pqc".into());
    s.metadata.insert("tau".into(), ch.tau.to_string());
    s.metadata.insert("epsilon".into(), ch.epsilon.to_string());
    Ok(s)
}

/// Runs `f` for realizations `0..n` in parallel and averages in index order.
pub fn run_ensemble<F>(n: usize, f: F) -> Result<DiagnosticSeries>
where
    F: Fn(u64) -> Result<DiagnosticSeries> + Sync,
{
    let all = collect_realizations(n, f)?;
    let mut acc = EnsembleAccumulator::new(&all[0]);
    for s in &all {
        acc.add(s)?;
    }
    acc.finish()
}

/// Per-realization results of `f` for `0..n`, in index order.
pub fn collect_realizations<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if n == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            found: 0,
        });
    }
    (0..n as u64).into_par_iter().map(&f).collect()
}

/// Ensemble-averaged dephasing series.
pub fn ed_ensemble(
    spec: &RealizationSpec,
    realizations: usize,
    beta: f64,
    params: EdParams,
    times: &[f64],
) -> Result<DiagnosticSeries> {
    let mut out = run_ensemble(realizations, |i| {
        ed_series(&spec.hamiltonian(i)?.energies, beta, params, times)
    })?;
    out.metadata
        .insert("master_seed".into(), spec.master_seed.to_string());
    Ok(out)
}

/// Ensemble-averaged channel series.
#[allow(clippy::too_many_arguments)]
pub fn pqc_ensemble(
    spec: &RealizationSpec,
    realizations: usize,
    beta: f64,
    tau: f64,
    epsilon: f64,
    hbar: f64,
    steps: &[u64],
    form: ChannelForm,
) -> Result<DiagnosticSeries> {
    check_domain("tau", tau, tau > 0.0, "tau > 0")?;
    let mut out = run_ensemble(realizations, |i| {
        let h = spec.hamiltonian(i)?;
        let ch = ParametricChannel::new(&h, spec.kraus_set(i)?, tau, epsilon, hbar)?;
        pqc_series(&ch, beta, steps, form)
    })?;
    out.metadata
        .insert("master_seed".into(), spec.master_seed.to_string());
    Ok(out)
}

/// Ensemble-averaged isolated series on a `τ` lattice.
pub fn isolated_ensemble(
    spec: &RealizationSpec,
    realizations: usize,
    beta: f64,
    hbar: f64,
    tau: f64,
    steps: &[u64],
) -> Result<DiagnosticSeries> {
    run_ensemble(realizations, |i| {
        isolated_series(&spec.hamiltonian(i)?.energies, beta, hbar, tau, steps)
    })
}
