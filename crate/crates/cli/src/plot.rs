//! Gnuplot scripts for emitted CSV artifacts.

use std::path::Path;

/// Layout of a CSV artifact, recognised from its header row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Series,
    Eigenvalues,
    Density,
    SpacingRatios,
    PhaseGrid,
    DepthGrid,
}

impl ArtifactKind {
    pub fn from_header(header: &str) -> Option<Self> {
        let h = header.trim();
        Some(match h {
            "t,sff,sff_stderr,cl1,purity,lower_bound,upper_bound" => Self::Series,
            "realization,index,re,im,fixed_point" => Self::Eigenvalues,
            "re,im,count" => Self::Density,
            "realization,re,im,abs,arg" => Self::SpacingRatios,
            "tau,epsilon,phase,phi_max,crescent_threshold" => Self::PhaseGrid,
            "tau,epsilon,j_thouless,j_heisenberg,depth_isolated,depth,relative_depth" => {
                Self::DepthGrid
            }
            _ => return None,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0} is not a recognised artifact (header {1:?})")]
    Unknown(String, String),
}

fn quote(path: &str) -> String {
    format!("'{}'", path.replace('\'', "''"))
}

/// Script plotting `csv` (referenced by the given path) into `png`.
pub fn gnuplot_script(kind: ArtifactKind, csv: &str, png: &str) -> String {
    let data = quote(csv);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,700\n");
    s.push_str(&format!("set output {}\n", quote(png)));
    s.push_str("set key top right\n");
    let body = match kind {
        ArtifactKind::Series => format!(
            "set logscale xy\n\
             set format y '10^{{%L}}'\n\
             set xlabel 't'\n\
             set ylabel 'SFF'\n\
             plot {data} every ::1 using 1:2 with lines lw 2 title 'SFF', \\\n     \
             {data} every ::1 using 1:6 with lines dt 2 title 'lower bound', \\\n     \
             {data} every ::1 using 1:7 with lines dt 3 title 'upper bound', \\\n     \
             {data} every ::1 using 1:5 with lines title 'purity'\n"
        ),
        ArtifactKind::Eigenvalues => format!(
            "set size ratio -1\n\
             set xlabel 'Re λ'\n\
             set ylabel 'Im λ'\n\
             set object 1 circle at 0,0 size 1 fs empty border lc rgb 'gray'\n\
             plot {data} every ::1 using 3:4 with dots title 'eigenvalues'\n"
        ),
        ArtifactKind::Density => format!(
            "set size ratio -1\n\
             set xlabel 'Re λ'\n\
             set ylabel 'Im λ'\n\
             set logscale cb\n\
             plot {data} every ::1 using 1:2:3 with points pt 5 ps 0.3 lc palette notitle\n"
        ),
        ArtifactKind::SpacingRatios => format!(
            "set size ratio -1\n\
             set xrange [-1.05:1.05]\n\
             set yrange [-1.05:1.05]\n\
             set xlabel 'Re z'\n\
             set ylabel 'Im z'\n\
             set object 1 circle at 0,0 size 1 fs empty border lc rgb 'gray'\n\
             plot {data} every ::1 using 2:3 with dots title 'spacing ratios'\n"
        ),
        ArtifactKind::PhaseGrid => format!(
            "set logscale x\n\
             set xlabel 'τ'\n\
             set ylabel 'ε'\n\
             phase(s) = s eq 'annular' ? 0 : s eq 'disk' ? 1 : s eq 'crescent' ? 2 : 3\n\
             set cbrange [0:3]\n\
             set cbtics ('annular' 0, 'disk' 1, 'crescent' 2, 'shifted disk' 3)\n\
             plot {data} every ::1 using 1:2:(phase(strcol(3))) with points pt 5 lc palette notitle\n"
        ),
        ArtifactKind::DepthGrid => format!(
            "set logscale x\n\
             set xlabel 'τ'\n\
             set ylabel 'relative effective depth'\n\
             plot {data} every ::1 using 1:7:2 with points pt 7 lc palette title 'D_eff / D_eff(isolated)'\n"
        ),
    };
    s.push_str(&body);
    s
}

/// Reads the header of `csv` and builds the matching script; the image is
/// written next to the data with a `.png` extension.
pub fn script_for_file(csv: &Path) -> Result<String, PlotError> {
    let display = csv.display().to_string();
    let text = std::fs::read_to_string(csv).map_err(|e| PlotError::Io(display.clone(), e))?;
    let header = text.lines().next().unwrap_or_default().to_string();
    let kind = ArtifactKind::from_header(&header)
        .ok_or_else(|| PlotError::Unknown(display.clone(), header))?;
    let png = csv.with_extension("png").display().to_string();
    Ok(gnuplot_script(kind, &display, &png))
}
