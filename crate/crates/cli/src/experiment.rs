//! Pipelines behind each mode. Everything here is computed in memory;
//! [`crate::run`] writes the artifacts and the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use pqc_core::c64;
use pqc_core::dephasing::EdParams;
use pqc_core::diagnostics::{
    effective_depth_from_steps, estimate_thouless, step_ceiling, DiagnosticSeries,
};
use pqc_core::ensemble::{
    collect_realizations, ed_ensemble, isolated_ensemble, pqc_ensemble, RealizationSpec,
};
use pqc_core::grid::steps_for_times;
use pqc_core::pqc::{build_superoperator, ParametricChannel};
use pqc_core::spectral::{
    classify_phase, complex_spacing_ratios, containment_fraction, crescent_threshold,
    critical_epsilon, eigenvalues, phi_max, sample_phi_max, spectral_report, DensityGrid,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Mode};

/// How the Thouless time in the metadata is obtained.
pub const THOULESS_DEFINITION: &str =
    "argmin over t < t_H of the 5-point moving average of the ensemble-mean SFF";

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn text(name: String, text: String) -> Self {
        Self {
            name,
            bytes: text.into_bytes(),
        }
    }

    fn json<T: Serialize>(name: String, value: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serializes");
        bytes.push(b'\n');
        Self { name, bytes }
    }
}

/// One grid point of a run.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub label: String,
    pub parameters: Value,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_seconds: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Default)]
pub struct Execution {
    pub points: Vec<PointRecord>,
    pub artifacts: Vec<Artifact>,
    pub metadata: BTreeMap<String, String>,
}

impl Execution {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

type PointResult<T> = Result<(T, BTreeMap<String, String>), String>;

/// Shortest round-trip representation, so identical inputs give identical bytes.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn realization_spec(cfg: &ExperimentConfig) -> RealizationSpec {
    RealizationSpec {
        dim: cfg.model.d,
        sigma: cfg.model.sigma,
        kraus: cfg.model.k,
        column_offset: cfg.model.column_offset,
        master_seed: cfg.master_seed,
    }
}

fn channel_label(tau: f64, eps: f64) -> String {
    format!("tau{tau}_eps{eps}")
}

fn series_artifacts(cfg: &ExperimentConfig, stem: &str, s: &DiagnosticSeries) -> Vec<Artifact> {
    let mut out = Vec::new();
    if cfg.output.format.csv() {
        let mut buf = Vec::new();
        s.write_csv(&mut buf).expect("writing to memory");
        out.push(Artifact {
            name: format!("{stem}.csv"),
            bytes: buf,
        });
    }
    if cfg.output.format.json() {
        out.push(Artifact::json(format!("{stem}.json"), s));
    }
    out
}

/// Runs `f` over the grid in parallel, keeping grid order.
fn sweep<P, T, F>(
    grid: &[P],
    label: impl Fn(&P) -> (String, Value) + Sync,
    f: F,
) -> Vec<(PointRecord, Option<T>)>
where
    P: Sync,
    T: Send,
    F: Fn(&P) -> PointResult<T> + Sync,
{
    grid.par_iter()
        .map(|p| {
            let start = Instant::now();
            let (name, parameters) = label(p);
            let (value, metadata, error) = match f(p) {
                Ok((v, m)) => (Some(v), m, None),
                Err(e) => (None, BTreeMap::new(), Some(e)),
            };
            let record = PointRecord {
                label: name,
                parameters,
                status: if error.is_some() { "error" } else { "ok" },
                error,
                wall_seconds: start.elapsed().as_secs_f64(),
                metadata,
            };
            (record, value)
        })
        .collect()
}

fn gather(results: Vec<(PointRecord, Option<Vec<Artifact>>)>) -> Execution {
    let mut exec = Execution::default();
    for (r, a) in results {
        exec.points.push(r);
        exec.artifacts.extend(a.into_iter().flatten());
    }
    exec
}

fn channel_point(&(tau, eps): &(f64, f64)) -> (String, Value) {
    (
        channel_label(tau, eps),
        json!({ "tau": tau, "epsilon": eps }),
    )
}

pub fn execute(cfg: &ExperimentConfig) -> Execution {
    match cfg.mode {
        Mode::EdSff => ed_sff(cfg),
        Mode::PqcSff => pqc_sff(cfg),
        Mode::Spectrum => spectrum(cfg),
        Mode::Csr => csr(cfg),
        Mode::PhaseGrid => phase_grid(cfg),
        Mode::DepthGrid => depth_grid(cfg),
    }
}

fn ed_sff(cfg: &ExperimentConfig) -> Execution {
    let spec = realization_spec(cfg);
    let t_h = cfg.heisenberg_time();
    let mut exec = gather(sweep(
        &cfg.ed.gamma,
        |g| (format!("gamma{g}"), json!({ "gamma": g })),
        |&g| {
            let times = cfg.times().map_err(|e| e.to_string())?;
            let params = EdParams::new(g, cfg.model.hbar).map_err(|e| e.to_string())?;
            let mut s = ed_ensemble(&spec, cfg.realizations, cfg.model.beta, params, &times)
                .map_err(|e| e.to_string())?;
            let mut meta = BTreeMap::new();
            match estimate_thouless(&s, t_h) {
                Ok(t) => meta.insert("thouless_time".into(), num(t)),
                Err(e) => meta.insert("thouless_time".into(), format!("unavailable: {e}")),
            };
            s.metadata.extend(meta.clone());
            Ok((series_artifacts(cfg, &format!("ed-sff_gamma{g}"), &s), meta))
        },
    ));
    exec.metadata.insert("heisenberg_time".into(), num(t_h));
    exec.metadata
        .insert("thouless_definition".into(), THOULESS_DEFINITION.into());
    exec
}

fn pqc_sff(cfg: &ExperimentConfig) -> Execution {
    let spec = realization_spec(cfg);
    let grid = cfg.channel_grid();
    gather(sweep(&grid, channel_point, |&(tau, eps)| {
        let times = cfg.times().map_err(|e| e.to_string())?;
        let steps = steps_for_times(&times, tau).map_err(|e| e.to_string())?;
        let s = pqc_ensemble(
            &spec,
            cfg.realizations,
            cfg.model.beta,
            tau,
            eps,
            cfg.model.hbar,
            &steps,
            cfg.channel.form,
        )
        .map_err(|e| e.to_string())?;
        let meta = BTreeMap::from([("steps".to_string(), steps.len().to_string())]);
        Ok((
            series_artifacts(cfg, &format!("pqc-sff_{}", channel_label(tau, eps)), &s),
            meta,
        ))
    }))
}

#[derive(Serialize)]
struct SpectrumSummary {
    tau: f64,
    epsilon: f64,
    phase: pqc_core::spectral::Phase,
    boundary: pqc_core::spectral::Boundary,
    margin: f64,
    containment: f64,
    bulk_eigenvalues: usize,
    max_bulk_modulus: f64,
    max_fixed_point_deviation: f64,
    phi_max: f64,
    max_sample_phi_max: f64,
    density_outside: u64,
}

fn spectrum(cfg: &ExperimentConfig) -> Execution {
    let spec = realization_spec(cfg);
    let grid = cfg.channel_grid();
    let (sigma, hbar) = (cfg.model.sigma, cfg.model.hbar);
    gather(sweep(&grid, channel_point, |&(tau, eps)| {
        let reports = collect_realizations(cfg.realizations, |i| {
            let h = spec.hamiltonian(i)?;
            let ch = ParametricChannel::new(&h, spec.kraus_set(i)?, tau, eps, hbar)?;
            Ok((
                spectral_report(&ch, sigma)?,
                sample_phi_max(&h.energies, tau, hbar),
            ))
        })
        .map_err(|e| e.to_string())?;
        let first = &reports[0].0;
        let mut eig_csv = String::from("realization,index,re,im,fixed_point\n");
        let mut bulk = Vec::new();
        let mut density = DensityGrid::new(cfg.spectrum.bins, cfg.spectrum.extent);
        let mut fixed_dev = 0.0f64;
        let mut sample_phi = 0.0f64;
        for (r, (rep, phi)) in reports.iter().enumerate() {
            let cloud = &rep.cloud;
            for (i, z) in cloud.eigenvalues.iter().enumerate() {
                let fp = i == cloud.fixed_point;
                let _ = writeln!(
                    eig_csv,
                    "{r},{i},{},{},{}",
                    num(z.re),
                    num(z.im),
                    u8::from(fp)
                );
                density.add(*z);
            }
            fixed_dev = fixed_dev.max((cloud.fixed_point_value() - c64::new(1.0, 0.0)).norm());
            sample_phi = sample_phi.max(*phi);
            bulk.extend(cloud.bulk());
        }
        let containment = containment_fraction(&bulk, &first.boundary, cfg.spectrum.margin)
            .map_err(|e| e.to_string())?;
        let summary = SpectrumSummary {
            tau,
            epsilon: eps,
            phase: first.phase,
            boundary: first.boundary.clone(),
            margin: cfg.spectrum.margin,
            containment,
            bulk_eigenvalues: bulk.len(),
            max_bulk_modulus: bulk.iter().map(|z| z.norm()).fold(0.0, f64::max),
            max_fixed_point_deviation: fixed_dev,
            phi_max: phi_max(tau, cfg.model.d, sigma, hbar),
            max_sample_phi_max: sample_phi,
            density_outside: density.outside,
        };
        let stem = format!("spectrum_{}", channel_label(tau, eps));
        let meta = BTreeMap::from([
            ("phase".to_string(), first.phase.to_string()),
            ("containment".to_string(), num(containment)),
        ]);
        Ok((
            vec![
                Artifact::text(format!("{stem}_eigenvalues.csv"), eig_csv),
                Artifact::text(format!("{stem}_density.csv"), density_csv(&density)),
                Artifact::json(format!("{stem}_summary.json"), &summary),
            ],
            meta,
        ))
    }))
}

/// Non-empty bins as `re,im,count` at bin centres.
fn density_csv(g: &DensityGrid) -> String {
    let w = 2.0 * g.extent / g.bins as f64;
    let mut out = String::from("re,im,count\n");
    for (idx, &c) in g.counts.iter().enumerate() {
        if c > 0 {
            let (row, col) = (idx / g.bins, idx % g.bins);
            let re = -g.extent + (col as f64 + 0.5) * w;
            let im = -g.extent + (row as f64 + 0.5) * w;
            let _ = writeln!(out, "{},{},{c}", num(re), num(im));
        }
    }
    out
}

/// Threshold used for the count of small ratios in the summary.
pub const SMALL_RATIO: f64 = 0.05;

fn csr(cfg: &ExperimentConfig) -> Execution {
    let spec = realization_spec(cfg);
    let grid = cfg.channel_grid();
    let hbar = cfg.model.hbar;
    gather(sweep(&grid, channel_point, |&(tau, eps)| {
        let sets = collect_realizations(cfg.realizations, |i| {
            let h = spec.hamiltonian(i)?;
            let ch = ParametricChannel::new(&h, spec.kraus_set(i)?, tau, eps, hbar)?;
            let cloud = eigenvalues(&build_superoperator(&ch))?;
            Ok(complex_spacing_ratios(&cloud.bulk())?.ratios)
        })
        .map_err(|e| e.to_string())?;
        let mut text = String::from("realization,re,im,abs,arg\n");
        let (mut n, mut abs_sum, mut cos_sum, mut small) = (0usize, 0.0, 0.0, 0usize);
        for (r, zs) in sets.iter().enumerate() {
            for z in zs {
                let _ = writeln!(
                    text,
                    "{r},{},{},{},{}",
                    num(z.re),
                    num(z.im),
                    num(z.norm()),
                    num(z.arg())
                );
                n += 1;
                abs_sum += z.norm();
                cos_sum += z.arg().cos();
                small += usize::from(z.norm() < SMALL_RATIO);
            }
        }
        if n == 0 {
            return Err("no spacing ratios".into());
        }
        let summary = json!({
            "tau": tau,
            "epsilon": eps,
            "ratios": n,
            "mean_abs": abs_sum / n as f64,
            "mean_cos_arg": cos_sum / n as f64,
            "below_small_ratio": small,
            "small_ratio": SMALL_RATIO,
        });
        let stem = format!("csr_{}", channel_label(tau, eps));
        let meta = BTreeMap::from([("ratios".to_string(), n.to_string())]);
        Ok((
            vec![
                Artifact::text(format!("{stem}.csv"), text),
                Artifact::json(format!("{stem}_summary.json"), &summary),
            ],
            meta,
        ))
    }))
}

fn phase_grid(cfg: &ExperimentConfig) -> Execution {
    let m = &cfg.model;
    let grid = cfg.channel_grid();
    let rows: Vec<Result<String, String>> = grid
        .iter()
        .map(|&(tau, eps)| {
            let phase =
                classify_phase(eps, tau, m.k, m.d, m.sigma, m.hbar).map_err(|e| e.to_string())?;
            let phi = phi_max(tau, m.d, m.sigma, m.hbar);
            Ok(format!(
                "{},{},{phase},{},{}",
                num(tau),
                num(eps),
                num(phi),
                num(crescent_threshold(m.k, phi))
            ))
        })
        .collect();
    let mut exec = Execution::default();
    let mut text = String::from("tau,epsilon,phase,phi_max,crescent_threshold\n");
    for (&(tau, eps), row) in grid.iter().zip(rows) {
        let (status, error) = match row {
            Ok(line) => {
                text.push_str(&line);
                text.push('\n');
                ("ok", None)
            }
            Err(e) => ("error", Some(e)),
        };
        let (label, parameters) = channel_point(&(tau, eps));
        exec.points.push(PointRecord {
            label,
            parameters,
            status,
            error,
            wall_seconds: 0.0,
            metadata: BTreeMap::new(),
        });
    }
    exec.artifacts
        .push(Artifact::text("phase-grid.csv".into(), text));
    exec.metadata
        .insert("critical_epsilon".into(), num(critical_epsilon(m.k)));
    exec
}

fn depth_grid(cfg: &ExperimentConfig) -> Execution {
    let spec = realization_spec(cfg);
    let m = &cfg.model;
    let t_h = cfg.heisenberg_time();
    let thouless = cfg
        .times()
        .and_then(|times| {
            ed_ensemble(
                &spec,
                cfg.realizations,
                m.beta,
                EdParams::new(0.0, m.hbar)?,
                &times,
            )
        })
        .and_then(|s| estimate_thouless(&s, t_h));
    let grid = cfg.channel_grid();
    let t_th = match thouless {
        Ok(t) => t,
        Err(e) => {
            let mut exec = Execution::default();
            for &(tau, eps) in &grid {
                let (label, parameters) = channel_point(&(tau, eps));
                exec.points.push(PointRecord {
                    label,
                    parameters,
                    status: "error",
                    error: Some(format!("Thouless time unavailable: {e}")),
                    wall_seconds: 0.0,
                    metadata: BTreeMap::new(),
                });
            }
            return exec;
        }
    };
    let results = sweep(&grid, channel_point, |&(tau, eps)| {
        let (j_th, j_h) = (step_ceiling(t_th, tau), step_ceiling(t_h, tau));
        if j_th > j_h {
            return Err(format!("empty window: j_Th = {j_th} > j_H = {j_h}"));
        }
        let steps: Vec<u64> = (j_th..=j_h).collect();
        let depth = |s: &DiagnosticSeries| {
            effective_depth_from_steps(s.plateau, |j| Ok(s.sff[(j - j_th) as usize]), j_th, j_h)
                .map_err(|e| e.to_string())
        };
        let n = cfg.realizations;
        let iso =
            isolated_ensemble(&spec, n, m.beta, m.hbar, tau, &steps).map_err(|e| e.to_string())?;
        let open = pqc_ensemble(&spec, n, m.beta, tau, eps, m.hbar, &steps, cfg.channel.form)
            .map_err(|e| e.to_string())?;
        let (d_iso, d) = (depth(&iso)?, depth(&open)?);
        if d_iso <= 0.0 {
            return Err("isolated depth vanishes on this window".into());
        }
        let row = format!(
            "{},{},{j_th},{j_h},{},{},{}",
            num(tau),
            num(eps),
            num(d_iso),
            num(d),
            num(d / d_iso)
        );
        Ok((
            row,
            BTreeMap::from([("relative_depth".to_string(), num(d / d_iso))]),
        ))
    });
    let mut exec = Execution::default();
    let mut text =
        String::from("tau,epsilon,j_thouless,j_heisenberg,depth_isolated,depth,relative_depth\n");
    for (record, row) in results {
        if let Some(row) = row {
            text.push_str(&row);
            text.push('\n');
        }
        exec.points.push(record);
    }
    exec.artifacts
        .push(Artifact::text("depth-grid.csv".into(), text));
    exec.metadata.insert("thouless_time".into(), num(t_th));
    exec.metadata.insert("heisenberg_time".into(), num(t_h));
    exec.metadata
        .insert("thouless_definition".into(), THOULESS_DEFINITION.into());
    exec
}
