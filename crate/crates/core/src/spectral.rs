//! Superoperator eigenvalue clouds, spectral-phase boundaries and complex
//! spacing ratios.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::linalg::c64;
use crate::pqc::{build_superoperator, ParametricChannel, Superoperator};
use crate::rmt::critical_tau;

/// Eigenvalues of a channel with the stationary one singled out.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCloud {
    pub eigenvalues: Vec<c64>,
    /// Index of the eigenvalue taken as the fixed point.
    pub fixed_point: usize,
}

impl SpectralCloud {
    /// Picks the eigenvalue closest to 1, preferring the larger modulus on ties.
    pub fn new(eigenvalues: Vec<c64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InsufficientData {
                needed: 1,
                found: 0,
            });
        }
        let one = c64::new(1.0, 0.0);
        let mut best = 0;
        for (i, z) in eigenvalues.iter().enumerate().skip(1) {
            let (dz, db) = ((z - one).norm(), (eigenvalues[best] - one).norm());
            if dz < db || (dz == db && z.norm() > eigenvalues[best].norm()) {
                best = i;
            }
        }
        Ok(Self {
            eigenvalues,
            fixed_point: best,
        })
    }

    pub fn fixed_point_value(&self) -> c64 {
        self.eigenvalues[self.fixed_point]
    }

    /// All eigenvalues except the fixed point.
    pub fn bulk(&self) -> Vec<c64> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.fixed_point)
            .map(|(_, z)| *z)
            .collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Dense non-Hermitian eigensolve of a superoperator.
pub fn eigenvalues(op: &Superoperator) -> Result<SpectralCloud> {
    let values = op
        .matrix
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("d = {}: {e:?}", op.dim)))?;
    SpectralCloud::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Annular,
    Disk,
    Crescent,
    ShiftedDisk,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Annular => "annular",
            Phase::Disk => "disk",
            Phase::Crescent => "crescent",
            Phase::ShiftedDisk => "shifted-disk",
        })
    }
}

fn check_eps_k(eps: f64, k: usize) -> Result<()> {
    check_domain(
        "epsilon",
        eps,
        (0.0..=1.0).contains(&eps),
        "0 <= epsilon <= 1",
    )?;
    if k == 0 {
        return Err(Error::InvalidDimension { found: 0, min: 1 });
    }
    Ok(())
}

/// Outer radius `√((1−ε)² + ε²/K)` and, while it is real and positive,
/// the inner radius `√((1−ε)² − ε²/K)`.
pub fn annular_boundaries(eps: f64, k: usize) -> Result<(f64, Option<f64>)> {
    check_eps_k(eps, k)?;
    let a = (1.0 - eps) * (1.0 - eps);
    let b = eps * eps / k as f64;
    let inner = if a > b { Some((a - b).sqrt()) } else { None };
    Ok(((a + b).sqrt(), inner))
}

pub fn disk_boundary(eps: f64, k: usize) -> Result<f64> {
    Ok(annular_boundaries(eps, k)?.0)
}

/// `(1 − ε, ε/√K)` as (center, radius).
pub fn shifted_disk_boundary(eps: f64, k: usize) -> Result<(f64, f64)> {
    check_eps_k(eps, k)?;
    Ok((1.0 - eps, eps / (k as f64).sqrt()))
}

/// `1/(1 + 1/√K)`.
pub fn critical_epsilon(k: usize) -> f64 {
    1.0 / (1.0 + 1.0 / (k as f64).sqrt())
}

/// `τσ√(8d)/ħ`.
pub fn phi_max(tau: f64, d: usize, sigma: f64, hbar: f64) -> f64 {
    tau * sigma * (8.0 * d as f64).sqrt() / hbar
}

/// `τ (E_max − E_min)/ħ` of one sampled spectrum.
pub fn sample_phi_max(energies: &[f64], tau: f64, hbar: f64) -> f64 {
    let (lo, hi) = energies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| {
            (a.min(e), b.max(e))
        });
    tau * (hi - lo) / hbar
}

/// `1/(1 + 1/(√K s))` with `s = sin(min(φ, π/2))`.
pub fn crescent_threshold(k: usize, phi: f64) -> f64 {
    let s = phi.min(FRAC_PI_2).sin();
    if s <= 0.0 {
        return 0.0;
    }
    1.0 / (1.0 + 1.0 / ((k as f64).sqrt() * s))
}

pub fn classify_phase(
    eps: f64,
    tau: f64,
    k: usize,
    d: usize,
    sigma: f64,
    hbar: f64,
) -> Result<Phase> {
    check_eps_k(eps, k)?;
    check_domain("tau", tau, tau >= 0.0, "tau >= 0")?;
    if tau >= critical_tau(d, sigma, hbar) {
        if eps < critical_epsilon(k) {
            Ok(Phase::Annular)
        } else {
            Ok(Phase::Disk)
        }
    } else if eps >= crescent_threshold(k, phi_max(tau, d, sigma, hbar)) {
        Ok(Phase::ShiftedDisk)
    } else {
        Ok(Phase::Crescent)
    }
}

/// Closed region of the complex plane bounding a spectral bulk.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Boundary {
    Disk {
        radius: f64,
    },
    Annulus {
        outer: f64,
        inner: f64,
    },
    ShiftedDisk {
        center: f64,
        radius: f64,
    },
    /// `{|z| ≤ radius, |arg z| ≤ half_angle}`.
    Sector {
        radius: f64,
        half_angle: f64,
    },
    /// Points in any of the parts.
    Union {
        parts: Vec<Boundary>,
    },
    /// Closed curve; interior points are those it winds around.
    Curve {
        #[serde(skip)]
        points: Vec<c64>,
    },
}

fn segment_distance(z: c64, a: c64, b: c64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn winding_number(z: c64, pts: &[c64]) -> i64 {
    let mut w = 0i64;
    let n = pts.len();
    for i in 0..n {
        let a = pts[i] - z;
        let b = pts[(i + 1) % n] - z;
        if a.im <= 0.0 {
            if b.im > 0.0 && a.re * b.im - a.im * b.re > 0.0 {
                w += 1;
            }
        } else if b.im <= 0.0 && a.re * b.im - a.im * b.re < 0.0 {
            w -= 1;
        }
    }
    w
}

impl Boundary {
    /// Analytic boundary of the bulk in the given phase.
    pub fn for_phase(phase: Phase, eps: f64, k: usize, phi: f64) -> Result<Self> {
        let (outer, inner) = annular_boundaries(eps, k)?;
        Ok(match phase {
            Phase::Disk => Boundary::Disk { radius: outer },
            Phase::Annular => match inner {
                Some(inner) => Boundary::Annulus { outer, inner },
                None => Boundary::Disk { radius: outer },
            },
            Phase::ShiftedDisk => {
                let (center, radius) = shifted_disk_boundary(eps, k)?;
                Boundary::ShiftedDisk { center, radius }
            }
            Phase::Crescent => {
                // rotated arcs of the outer circle, plus the shifted disk
                // that the low-frequency modes have already collapsed into
                let arcs = if phi >= PI {
                    Boundary::Disk { radius: outer }
                } else {
                    Boundary::Sector {
                        radius: outer,
                        half_angle: phi,
                    }
                };
                let (center, radius) = shifted_disk_boundary(eps, k)?;
                Boundary::Union {
                    parts: vec![arcs, Boundary::ShiftedDisk { center, radius }],
                }
            }
        })
    }

    /// Whether `z` lies in the region dilated by `margin`.
    pub fn contains(&self, z: c64, margin: f64) -> bool {
        match self {
            Boundary::Disk { radius } => z.norm() <= radius + margin,
            Boundary::Annulus { outer, inner } => {
                let r = z.norm();
                r <= outer + margin && r >= inner - margin
            }
            Boundary::ShiftedDisk { center, radius } => {
                (z - c64::new(*center, 0.0)).norm() <= radius + margin
            }
            Boundary::Sector { radius, half_angle } => {
                let r = z.norm();
                if r > radius + margin {
                    return false;
                }
                if r <= margin || z.arg().abs() <= *half_angle {
                    return true;
                }
                // distance to the nearer straight edge
                let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
                let edge = c64::from_polar(*radius, s * half_angle);
                segment_distance(z, c64::new(0.0, 0.0), edge) <= margin
            }
            Boundary::Union { parts } => parts.iter().any(|b| b.contains(z, margin)),
            Boundary::Curve { points } => {
                if points.len() < 3 {
                    return false;
                }
                if winding_number(z, points) != 0 {
                    return true;
                }
                let n = points.len();
                (0..n).any(|i| segment_distance(z, points[i], points[(i + 1) % n]) <= margin)
            }
        }
    }

    /// Points along the boundary; an annulus yields its outer circle then
    /// its inner circle.
    pub fn samples(&self, n: usize) -> Vec<c64> {
        let circle = |c: f64, r: f64| -> Vec<c64> {
            (0..n)
                .map(|i| c64::new(c, 0.0) + c64::from_polar(r, 2.0 * PI * i as f64 / n as f64))
                .collect()
        };
        match self {
            Boundary::Disk { radius } => circle(0.0, *radius),
            Boundary::Annulus { outer, inner } => {
                let mut v = circle(0.0, *outer);
                v.extend(circle(0.0, *inner));
                v
            }
            Boundary::ShiftedDisk { center, radius } => circle(*center, *radius),
            Boundary::Sector { radius, half_angle } => {
                let m = n.max(4) / 2;
                let mut v = vec![c64::new(0.0, 0.0)];
                v.extend((0..=m).map(|i| {
                    let a = -half_angle + 2.0 * half_angle * i as f64 / m as f64;
                    c64::from_polar(*radius, a)
                }));
                v
            }
            Boundary::Union { parts } => parts.iter().flat_map(|b| b.samples(n)).collect(),
            Boundary::Curve { points } => points.clone(),
        }
    }
}

/// Pointwise `z^κ` of boundary samples.
pub fn boundary_power(curve: &[c64], kappa: u32) -> Vec<c64> {
    curve.iter().map(|z| z.powu(kappa)).collect()
}

/// Closed curve `(z_0 + r e^{iφ})^κ` sampled at `n` angles.
pub fn powered_circle(center: f64, radius: f64, kappa: u32, n: usize) -> Boundary {
    let pts = (0..n)
        .map(|i| c64::new(center, 0.0) + c64::from_polar(radius, 2.0 * PI * i as f64 / n as f64))
        .collect::<Vec<_>>();
    Boundary::Curve {
        points: boundary_power(&pts, kappa),
    }
}

/// Share of `points` inside `boundary` dilated by `margin`.
pub fn containment_fraction(points: &[c64], boundary: &Boundary, margin: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            found: 0,
        });
    }
    let inside = points
        .iter()
        .filter(|z| boundary.contains(**z, margin))
        .count();
    Ok(inside as f64 / points.len() as f64)
}

/// Fraction of points with `|arg z| ≤ half_angle + tol`.
pub fn sector_fraction(points: &[c64], half_angle: f64, tol: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            found: 0,
        });
    }
    let inside = points
        .iter()
        .filter(|z| z.arg().abs() <= half_angle + tol)
        .count();
    Ok(inside as f64 / points.len() as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralParameters {
    pub tau: f64,
    pub epsilon: f64,
    pub k: usize,
    pub d: usize,
    pub sigma: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    #[serde(skip)]
    pub cloud: SpectralCloud,
    pub phase: Phase,
    pub boundary: Boundary,
    pub parameters: SpectralParameters,
}

/// Eigensolve of one channel together with its predicted phase.
pub fn spectral_report(ch: &ParametricChannel, sigma: f64) -> Result<SpectralReport> {
    let d = ch.dim();
    let k = ch.kraus.count();
    let cloud = eigenvalues(&build_superoperator(ch))?;
    let phase = classify_phase(ch.epsilon, ch.tau, k, d, sigma, ch.hbar)?;
    let boundary = Boundary::for_phase(phase, ch.epsilon, k, phi_max(ch.tau, d, sigma, ch.hbar))?;
    Ok(SpectralReport {
        cloud,
        phase,
        boundary,
        parameters: SpectralParameters {
            tau: ch.tau,
            epsilon: ch.epsilon,
            k,
            d,
            sigma,
            hbar: ch.hbar,
        },
    })
}

/// Complex spacing ratios `z = (λ^NN − λ)/(λ^NNN − λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRatioSet {
    pub ratios: Vec<c64>,
    /// `(i, nearest, next-nearest)` indices into the input for each ratio.
    pub sources: Vec<(usize, usize, usize)>,
}

impl SpacingRatioSet {
    fn from_neighbors(points: &[c64], neighbors: Vec<Option<(usize, usize)>>) -> Self {
        let mut ratios = Vec::with_capacity(points.len());
        let mut sources = Vec::with_capacity(points.len());
        for (i, nb) in neighbors.into_iter().enumerate() {
            if let Some((a, b)) = nb {
                ratios.push((points[a] - points[i]) / (points[b] - points[i]));
                sources.push((i, a, b));
            }
        }
        Self { ratios, sources }
    }

    /// Points with `|z| < r`.
    pub fn count_below(&self, r: f64) -> usize {
        self.ratios.iter().filter(|z| z.norm() < r).count()
    }
}

type Candidate = (f64, usize);

/// Keeps the two smallest `(dist², index)` pairs.
fn offer(best: &mut [Option<Candidate>; 2], cand: Candidate) {
    let less = |a: Candidate, b: Option<Candidate>| match b {
        None => true,
        Some(b) => a.0 < b.0 || (a.0 == b.0 && a.1 < b.1),
    };
    if less(cand, best[0]) {
        best[1] = best[0];
        best[0] = Some(cand);
    } else if less(cand, best[1]) {
        best[1] = Some(cand);
    }
}

fn check_count(points: &[c64]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: points.len(),
        });
    }
    Ok(())
}

/// O(n²) reference. Coincident points are not counted as neighbours.
pub fn complex_spacing_ratios_brute(points: &[c64]) -> Result<SpacingRatioSet> {
    check_count(points)?;
    let neighbors = (0..points.len())
        .map(|i| {
            let mut best = [None, None];
            for (j, p) in points.iter().enumerate() {
                let d2 = (p - points[i]).norm_sqr();
                if d2 > 0.0 {
                    offer(&mut best, (d2, j));
                }
            }
            match best {
                [Some(a), Some(b)] => Some((a.1, b.1)),
                _ => None,
            }
        })
        .collect();
    Ok(SpacingRatioSet::from_neighbors(points, neighbors))
}

/// Uniform-grid search returning the same neighbours as the brute force.
pub fn complex_spacing_ratios(points: &[c64]) -> Result<SpacingRatioSet> {
    check_count(points)?;
    let n = points.len();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let cells = ((n as f64 / 2.0).sqrt().ceil() as usize).max(1);
    let h = span / cells as f64 * (1.0 + 1e-12);
    let cell_of = |p: c64| -> (usize, usize) {
        let cx = (((p.re - x0) / h) as usize).min(cells - 1);
        let cy = (((p.im - y0) / h) as usize).min(cells - 1);
        (cx, cy)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(*p);
        buckets[cy * cells + cx].push(i);
    }
    let neighbors = (0..n)
        .map(|i| {
            let p = points[i];
            let (cx, cy) = cell_of(p);
            let mut best = [None, None];
            let mut ring = 0usize;
            loop {
                let lo_x = cx.saturating_sub(ring);
                let hi_x = (cx + ring).min(cells - 1);
                let lo_y = cy.saturating_sub(ring);
                let hi_y = (cy + ring).min(cells - 1);
                for gy in lo_y..=hi_y {
                    for gx in lo_x..=hi_x {
                        let on_ring = gx.abs_diff(cx) == ring || gy.abs_diff(cy) == ring;
                        if !on_ring {
                            continue;
                        }
                        for &j in &buckets[gy * cells + gx] {
                            let d2 = (points[j] - p).norm_sqr();
                            if d2 > 0.0 {
                                offer(&mut best, (d2, j));
                            }
                        }
                    }
                }
                // unvisited cells are at least `ring · h` away; the factor
                // absorbs rounding in the cell assignment
                let reach = ring as f64 * h * (1.0 - 1e-9);
                let done = matches!(best[1], Some((d2, _)) if d2 < reach * reach);
                if done || ring >= cells {
                    break;
                }
                ring += 1;
            }
            match best {
                [Some(a), Some(b)] => Some((a.1, b.1)),
                _ => None,
            }
        })
        .collect();
    Ok(SpacingRatioSet::from_neighbors(points, neighbors))
}

/// 2-D histogram of eigenvalues over a square window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub bins: usize,
    pub extent: f64,
    /// Row-major counts, row index along the imaginary axis.
    pub counts: Vec<u64>,
    pub outside: u64,
}

impl DensityGrid {
    pub const DEFAULT_BINS: usize = 256;
    pub const DEFAULT_EXTENT: f64 = 1.05;

    pub fn new(bins: usize, extent: f64) -> Self {
        Self {
            bins,
            extent,
            counts: vec![0; bins * bins],
            outside: 0,
        }
    }

    pub fn add(&mut self, z: c64) {
        let w = 2.0 * self.extent / self.bins as f64;
        let fx = (z.re + self.extent) / w;
        let fy = (z.im + self.extent) / w;
        if fx < 0.0 || fy < 0.0 || fx >= self.bins as f64 || fy >= self.bins as f64 {
            self.outside += 1;
            return;
        }
        self.counts[fy as usize * self.bins + fx as usize] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }
}

impl Default for DensityGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BINS, Self::DEFAULT_EXTENT)
    }
}
