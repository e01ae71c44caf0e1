//! State observables, bounds, correlation-hole depth and ensemble reduction.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::states::{CoherentGibbsState, DensityMatrix};

/// `⟨Ψ_β|ρ|Ψ_β⟩`; the tiny imaginary part of a Hermitian `ρ` is dropped.
pub fn sff_fidelity(cgs: &CoherentGibbsState, rho: &DensityMatrix) -> f64 {
    sff_fidelity_mat(&cgs.amplitudes, rho.as_mat())
}

pub(crate) fn sff_fidelity_mat(amplitudes: &[f64], rho: &CMat) -> f64 {
    let d = amplitudes.len();
    let mut s = 0.0;
    for m in 0..d {
        let mut col = 0.0;
        for n in 0..d {
            col += amplitudes[n] * rho[(n, m)].re;
        }
        s += col * amplitudes[m];
    }
    s
}

/// `Σ_{n≠m} |ρ_nm|`.
pub fn cl1_norm(rho: &DensityMatrix) -> f64 {
    cl1_mat(rho.as_mat())
}

pub(crate) fn cl1_mat(rho: &CMat) -> f64 {
    let d = rho.nrows();
    let mut s = 0.0;
    for m in 0..d {
        for n in 0..d {
            if n != m {
                s += rho[(n, m)].norm();
            }
        }
    }
    s
}

/// `Tr ρ² = Σ |ρ_nm|²` for Hermitian `ρ`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    purity_mat(rho.as_mat())
}

pub(crate) fn purity_mat(rho: &CMat) -> f64 {
    let d = rho.nrows();
    let mut s = 0.0;
    for m in 0..d {
        for n in 0..d {
            s += rho[(n, m)].norm_sqr();
        }
    }
    s
}

/// `Σ_n |ρ_nn|²`.
pub fn diagonal_purity(rho: &DensityMatrix) -> f64 {
    let r = rho.as_mat();
    (0..rho.dim()).map(|n| r[(n, n)].norm_sqr()).sum()
}

/// One trajectory, or an ensemble mean with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub times: Vec<f64>,
    /// Step indices `j` with `t = jτ` for discrete-time runs.
    pub steps: Option<Vec<u64>>,
    pub sff: Vec<f64>,
    pub sff_stderr: Vec<f64>,
    pub cl1: Vec<f64>,
    pub purity: Vec<f64>,
    /// `(1 − C_l1)/d` or, for dephasing runs, the tighter derivative bound.
    pub lower_bound: Vec<f64>,
    /// `(1 + C_l1)/d`.
    pub upper_bound: Vec<f64>,
    pub dim: usize,
    pub beta: f64,
    pub plateau: f64,
    pub realizations: usize,
    pub metadata: BTreeMap<String, String>,
}

impl DiagnosticSeries {
    pub fn new(times: Vec<f64>, dim: usize, beta: f64, plateau: f64) -> Self {
        let n = times.len();
        Self {
            times,
            steps: None,
            sff: Vec::with_capacity(n),
            sff_stderr: Vec::new(),
            cl1: Vec::with_capacity(n),
            purity: Vec::with_capacity(n),
            lower_bound: Vec::with_capacity(n),
            upper_bound: Vec::with_capacity(n),
            dim,
            beta,
            plateau,
            realizations: 1,
            metadata: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Records one sample with the l1 sandwich as the bound columns.
    pub fn push(&mut self, sff: f64, cl1: f64, purity: f64) {
        let d = self.dim as f64;
        self.sff.push(sff);
        self.cl1.push(cl1);
        self.purity.push(purity);
        self.lower_bound.push((1.0 - cl1) / d);
        self.upper_bound.push((1.0 + cl1) / d);
    }

    pub fn check_lengths(&self) -> Result<()> {
        let n = self.times.len();
        let cols = [
            ("sff", self.sff.len()),
            ("cl1", self.cl1.len()),
            ("purity", self.purity.len()),
            ("lower_bound", self.lower_bound.len()),
            ("upper_bound", self.upper_bound.len()),
        ];
        for (name, len) in cols {
            if len != n {
                return Err(Error::SeriesMismatch(format!(
                    "{name} has {len} entries, times has {n}"
                )));
            }
        }
        if !self.sff_stderr.is_empty() && self.sff_stderr.len() != n {
            return Err(Error::SeriesMismatch("sff_stderr length".into()));
        }
        if let Some(steps) = &self.steps {
            if steps.len() != n {
                return Err(Error::SeriesMismatch("steps length".into()));
            }
        }
        Ok(())
    }

    /// CSV with header `t,sff,sff_stderr,cl1,purity,lower_bound,upper_bound`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "t,sff,sff_stderr,cl1,purity,lower_bound,upper_bound")?;
        for i in 0..self.len() {
            let se = self.sff_stderr.get(i).copied().unwrap_or(0.0);
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[i],
                self.sff[i],
                se,
                self.cl1[i],
                self.purity[i],
                self.lower_bound[i],
                self.upper_bound[i]
            )?;
        }
        w.flush()
    }

    /// SFF value at step `j`, looked up through `steps`.
    pub fn sff_at_step(&self, j: u64) -> Result<f64> {
        let steps = self
            .steps
            .as_ref()
            .ok_or(Error::Unsupported("series has no step indices"))?;
        steps
            .binary_search(&j)
            .map(|i| self.sff[i])
            .map_err(|_| Error::MissingStep(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    /// Largest amount by which either bound is violated (≤ 0 when none are).
    pub max_violation: f64,
    /// Index of that point.
    pub index: usize,
    /// Points violating a bound by more than the tolerance.
    pub violations: usize,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub const SANDWICH_TOL: f64 = 1e-10;

/// Checks `(1 − C_l1)/d ≤ SFF ≤ (1 + C_l1)/d` pointwise.
pub fn sff_cl1_sandwich(series: &DiagnosticSeries) -> Result<SandwichReport> {
    if series.beta != 0.0 {
        return Err(Error::Unsupported("the l1 sandwich holds at beta = 0 only"));
    }
    series.check_lengths()?;
    let d = series.dim as f64;
    let mut report = SandwichReport {
        max_violation: f64::NEG_INFINITY,
        index: 0,
        violations: 0,
    };
    for i in 0..series.len() {
        let c = series.cl1[i];
        let s = series.sff[i];
        let v = ((1.0 - c) / d - s).max(s - (1.0 + c) / d);
        if v > report.max_violation {
            report.max_violation = v;
            report.index = i;
        }
        if v > SANDWICH_TOL {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// `⌈t/τ⌉`, guarding against `t/τ` landing a rounding error above an integer.
pub fn step_ceiling(t: f64, tau: f64) -> u64 {
    let x = t / tau;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// `sqrt(max(0, Σ_{j=j_Th}^{j_H} ln(F_p / SFF(jτ))))` with `j = ⌈t/τ⌉`.
pub fn effective_depth(
    series: &DiagnosticSeries,
    t_thouless: f64,
    t_heisenberg: f64,
    tau: f64,
) -> Result<f64> {
    let j_th = step_ceiling(t_thouless, tau);
    let j_h = step_ceiling(t_heisenberg, tau);
    effective_depth_from_steps(series.plateau, |j| series.sff_at_step(j), j_th, j_h)
}

/// Same sum with an arbitrary SFF lookup.
pub fn effective_depth_from_steps<F>(plateau: f64, mut sff: F, j_th: u64, j_h: u64) -> Result<f64>
where
    F: FnMut(u64) -> Result<f64>,
{
    if j_th > j_h {
        return Err(Error::InvalidWindow { j_th, j_h });
    }
    let mut acc = 0.0;
    for j in j_th..=j_h {
        let s = sff(j)?;
        if s <= 0.0 {
            return Err(Error::Domain {
                name: "sff",
                value: s,
                domain: "sff > 0 inside the depth window",
            });
        }
        acc += (plateau / s).ln();
    }
    Ok(acc.max(0.0).sqrt())
}

/// `D_eff(series) / D_eff(isolated)` on the same window.
pub fn relative_effective_depth(
    series: &DiagnosticSeries,
    isolated: &DiagnosticSeries,
    t_thouless: f64,
    t_heisenberg: f64,
    tau: f64,
) -> Result<f64> {
    let num = effective_depth(series, t_thouless, t_heisenberg, tau)?;
    let den = effective_depth(isolated, t_thouless, t_heisenberg, tau)?;
    if den <= 0.0 {
        return Err(Error::Domain {
            name: "isolated depth",
            value: den,
            domain: "isolated depth > 0",
        });
    }
    Ok(num / den)
}

pub const THOULESS_WINDOW: usize = 5;

/// Centered moving average; the window shrinks at the ends.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Time of the minimum of the 5-point smoothed mean SFF among `t < t_H`.
pub fn estimate_thouless(series: &DiagnosticSeries, t_heisenberg: f64) -> Result<f64> {
    series.check_lengths()?;
    let smooth = moving_average(&series.sff, THOULESS_WINDOW);
    let mut best: Option<(usize, f64)> = None;
    for (i, (&t, &s)) in series.times.iter().zip(&smooth).enumerate() {
        if t >= t_heisenberg {
            break;
        }
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| series.times[i])
        .ok_or(Error::InsufficientData {
            needed: 1,
            found: 0,
        })
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Moments {
    sum: Vec<NeumaierSum>,
    sumsq: Vec<NeumaierSum>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![NeumaierSum::default(); n],
            sumsq: vec![NeumaierSum::default(); n],
        }
    }

    fn add(&mut self, xs: &[f64]) {
        for (i, &x) in xs.iter().enumerate() {
            self.sum[i].add(x);
            self.sumsq[i].add(x * x);
        }
    }

    fn merge(&mut self, other: &Self) {
        for i in 0..self.sum.len() {
            self.sum[i].merge(&other.sum[i]);
            self.sumsq[i].merge(&other.sumsq[i]);
        }
    }

    fn mean(&self, count: usize) -> Vec<f64> {
        self.sum.iter().map(|s| s.value() / count as f64).collect()
    }

    fn stderr(&self, count: usize) -> Vec<f64> {
        let n = count as f64;
        self.sum
            .iter()
            .zip(&self.sumsq)
            .map(|(s, q)| {
                if count < 2 {
                    return 0.0;
                }
                let mean = s.value() / n;
                let var = ((q.value() - n * mean * mean) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect()
    }
}

/// Associative reducer over realizations sharing one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAccumulator {
    template: DiagnosticSeries,
    count: usize,
    sff: Moments,
    cl1: Moments,
    purity: Moments,
    lower: Moments,
    upper: Moments,
    plateau: NeumaierSum,
}

impl EnsembleAccumulator {
    /// Empty accumulator for series shaped like `template`.
    pub fn new(template: &DiagnosticSeries) -> Self {
        let n = template.len();
        let mut t = template.clone();
        t.sff.clear();
        t.cl1.clear();
        t.purity.clear();
        t.lower_bound.clear();
        t.upper_bound.clear();
        t.sff_stderr.clear();
        Self {
            template: t,
            count: 0,
            sff: Moments::new(n),
            cl1: Moments::new(n),
            purity: Moments::new(n),
            lower: Moments::new(n),
            upper: Moments::new(n),
            plateau: NeumaierSum::default(),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, s: &DiagnosticSeries) -> Result<()> {
        s.check_lengths()?;
        if s.times != self.template.times || s.dim != self.template.dim {
            return Err(Error::SeriesMismatch(
                "time grid or dimension differs".into(),
            ));
        }
        self.sff.add(&s.sff);
        self.cl1.add(&s.cl1);
        self.purity.add(&s.purity);
        self.lower.add(&s.lower_bound);
        self.upper.add(&s.upper_bound);
        self.plateau.add(s.plateau);
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.template.times != self.template.times || other.template.dim != self.template.dim {
            return Err(Error::SeriesMismatch(
                "time grid or dimension differs".into(),
            ));
        }
        self.sff.merge(&other.sff);
        self.cl1.merge(&other.cl1);
        self.purity.merge(&other.purity);
        self.lower.merge(&other.lower);
        self.upper.merge(&other.upper);
        self.plateau.merge(&other.plateau);
        self.count += other.count;
        Ok(())
    }

    /// Pointwise means with the standard error of the SFF mean.
    pub fn finish(&self) -> Result<DiagnosticSeries> {
        if self.count == 0 {
            return Err(Error::InsufficientData {
                needed: 1,
                found: 0,
            });
        }
        let n = self.count;
        let mut out = self.template.clone();
        out.sff = self.sff.mean(n);
        out.sff_stderr = self.sff.stderr(n);
        out.cl1 = self.cl1.mean(n);
        out.purity = self.purity.mean(n);
        out.lower_bound = self.lower.mean(n);
        out.upper_bound = self.upper.mean(n);
        out.plateau = self.plateau.value() / n as f64;
        out.realizations = n;
        Ok(out)
    }
}

/// Mean and standard error over a set of realizations.
pub fn ensemble_average(series: &[DiagnosticSeries]) -> Result<DiagnosticSeries> {
    let first = series.first().ok_or(Error::InsufficientData {
        needed: 1,
        found: 0,
    })?;
    let mut acc = EnsembleAccumulator::new(first);
    for s in series {
        acc.add(s)?;
    }
    acc.finish()
}
