//! Window-size studies of one opened gap.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::diagram::{detect_gaps, linspace, sweep, validate_grid, GapRecord};
use super::fit::{fit_inverse_log, fit_inverse_log_quadratic, AsymptoticFit, QuadraticFit};
use super::refine::{refine_extremum, ExtremumKind};
use super::source::{map_indexed, BandSource, FemBands};
use crate::analytic::{BandCrossing, GapEdge, GapForecast, WaveguideGeometry};
use crate::fem::{CellMesh, MeshConfig, SolverConfig};
use crate::math::{ln, PI};
use crate::{Error, Result};

/// Default window half-widths, from `1e-2` down to `1e-4`.
pub const DEFAULT_EPSILONS: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Strictly decreasing, each in `(0, min(h, 1))`.
    pub epsilons: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub n_bands: usize,
    pub mesh: MeshConfig,
    pub solver: SolverConfig,
    pub tol_k: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            epsilons: DEFAULT_EPSILONS.to_vec(),
            // The bands are even in k, so half the zone suffices.
            k_grid: linspace(0.0, PI, 33),
            n_bands: 6,
            mesh: MeshConfig::default(),
            solver: SolverConfig::default(),
            tol_k: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Found,
    Missing(String),
}

/// Leading-order forecast at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastPoint {
    pub alpha_l: f64,
    pub alpha_r: f64,
    pub k_l: f64,
    pub k_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub epsilon: f64,
    pub status: RowStatus,
    /// Refined gap; `k_l`, `k_r` folded into `[0, π]`.
    pub gap: Option<GapRecord>,
    pub grid_gap: Option<GapRecord>,
    /// Another detected gap lies exactly as close to `E0`.
    pub ambiguous: bool,
    pub nearby: usize,
    pub forecast: ForecastPoint,
    /// Unknowns of the discretization, when the source has one.
    pub dofs: Option<usize>,
    /// Band columns requested from the source.
    pub solves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyFits {
    pub alpha_l: AsymptoticFit,
    pub alpha_r: AsymptoticFit,
    pub k_l: AsymptoticFit,
    pub k_r: AsymptoticFit,
    pub width: AsymptoticFit,
    /// The same series with a `c2 / ln²ε` term, when four rows are available.
    pub corrected: Option<CorrectedFits>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedFits {
    pub alpha_l: QuadraticFit,
    pub alpha_r: QuadraticFit,
    pub k_l: QuadraticFit,
    pub k_r: QuadraticFit,
    pub width: QuadraticFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonStudy {
    pub crossing: BandCrossing,
    pub forecast: GapForecast,
    pub rows: Vec<StudyRow>,
    /// Present when at least three rows found the gap.
    pub fits: Option<StudyFits>,
}

impl EpsilonStudy {
    pub fn found(&self) -> impl Iterator<Item = (&StudyRow, &GapRecord)> {
        self.rows.iter().filter_map(|r| r.gap.as_ref().map(|g| (r, g)))
    }

    /// `(α_r - α_l) |ln ε|` per row that found the gap.
    pub fn scaled_widths(&self) -> Vec<(f64, f64)> {
        self.found().map(|(r, g)| (r.epsilon, g.width() * ln(r.epsilon).abs())).collect()
    }
}

pub(crate) fn validate_epsilons(geom: &WaveguideGeometry, eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidStudy("empty window list".into()));
    }
    for w in eps.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidStudy(format!("window list not strictly decreasing at {} -> {}", w[0], w[1])));
        }
    }
    let h = geom.half_period();
    for &e in eps {
        if !(e > 0.0 && e < h && e < 1.0) {
            return Err(Error::InvalidStudy(format!("window half-width {e} outside (0, min(h, 1))")));
        }
    }
    Ok(())
}

/// Bracket `(k[j-1], k[j], k[j+1])` around a grid sample, mirroring the grid
/// step past an end point. Bands are even and `2π`-periodic, so evaluations
/// outside the grid are legitimate.
pub(crate) fn bracket_at(k: &[f64], j: usize) -> (f64, f64, f64) {
    let n = k.len();
    let left = if j > 0 { k[j] - k[j - 1] } else { k[1] - k[0] };
    let right = if j + 1 < n { k[j + 1] - k[j] } else { k[n - 1] - k[n - 2] };
    (k[j] - left, k[j], k[j] + right)
}

/// Detect, refine and record the gap nearest `E0` for one band source.
/// Half-width of the energy window around `E0` in which detected gaps are
/// counted.
pub const NEARBY_RADIUS: f64 = 0.05;

/// What [`study_gap`] found for one band source.
#[derive(Debug, Clone, PartialEq)]
pub struct GapOutcome {
    pub status: RowStatus,
    pub gap: Option<GapRecord>,
    pub grid_gap: Option<GapRecord>,
    pub ambiguous: bool,
    /// Detected gaps meeting `[E0 - NEARBY_RADIUS, E0 + NEARBY_RADIUS]`.
    pub nearby: usize,
}

pub fn study_gap(source: &dyn BandSource, k_grid: &[f64], n_bands: usize, e0: f64, tol_k: f64) -> Result<GapOutcome> {
    let diagram = sweep(source, k_grid, n_bands)?;
    let gaps = detect_gaps(&diagram, (f64::NEG_INFINITY, f64::INFINITY));
    let nearby = gaps.iter().filter(|g| g.distance_to(e0) <= NEARBY_RADIUS).count();
    let missing = |why: &str, grid_gap, ambiguous| GapOutcome {
        status: RowStatus::Missing(why.into()),
        gap: None,
        grid_gap,
        ambiguous,
        nearby,
    };
    let Some(best) = gaps
        .iter()
        .min_by(|a, b| a.distance_to(e0).total_cmp(&b.distance_to(e0)))
        .copied()
    else {
        return Ok(missing("no gap detected on the grid", None, false));
    };
    let ambiguous = gaps
        .iter()
        .filter(|g| g.band != best.band && g.distance_to(e0) == best.distance_to(e0))
        .count()
        > 0;
    let il = k_grid.iter().position(|&k| k == best.k_l).expect("grid point");
    let ir = k_grid.iter().position(|&k| k == best.k_r).expect("grid point");
    let top = refine_extremum(source, best.band, bracket_at(k_grid, il), ExtremumKind::Max, tol_k)?;
    let bottom = refine_extremum(source, best.band + 1, bracket_at(k_grid, ir), ExtremumKind::Min, tol_k)?;
    let refined = GapRecord {
        band: best.band,
        alpha_l: top.energy.max(best.alpha_l),
        alpha_r: bottom.energy.min(best.alpha_r),
        k_l: top.k.abs(),
        k_r: bottom.k.abs(),
    };
    if refined.alpha_r <= refined.alpha_l {
        return Ok(missing("grid gap closed under refinement", Some(best), ambiguous));
    }
    Ok(GapOutcome { status: RowStatus::Found, gap: Some(refined), grid_gap: Some(best), ambiguous, nearby })
}

/// Follow the gap opened at `crossing` through the window sizes of `config`,
/// each on its own mesh graded for that window, and fit the four edge series.
pub fn epsilon_study(geom: &WaveguideGeometry, crossing: &BandCrossing, config: &StudyConfig) -> Result<EpsilonStudy> {
    epsilon_study_with(geom, crossing, config, &|g: &WaveguideGeometry| -> Result<Box<dyn BandSource>> {
        let mesh = CellMesh::build(g, &config.mesh)?;
        Ok(Box::new(FemBands::new(&mesh, config.n_bands, config.solver)))
    })
}

/// [`epsilon_study`] with the band source for each window supplied by
/// `source_for`, which receives the geometry with that window.
pub fn epsilon_study_with(
    geom: &WaveguideGeometry,
    crossing: &BandCrossing,
    config: &StudyConfig,
    source_for: &(dyn Fn(&WaveguideGeometry) -> Result<Box<dyn BandSource>> + Sync),
) -> Result<EpsilonStudy> {
    validate_epsilons(geom, &config.epsilons)?;
    validate_grid(&config.k_grid)?;
    if config.k_grid.len() < 16 {
        return Err(Error::InvalidGrid(format!("{} points; gap work needs at least 16", config.k_grid.len())));
    }
    if config.n_bands < 2 {
        return Err(Error::InvalidStudy("at least 2 bands are needed".into()));
    }
    let forecast = GapForecast::new(crossing, geom)?;

    let rows = map_indexed(config.epsilons.len(), |i| -> Result<StudyRow> {
        let eps = config.epsilons[i];
        let g = geom.with_window(eps)?;
        let source = CountingBands::new(source_for(&g)?);
        let outcome = study_gap(&source, &config.k_grid, config.n_bands, crossing.e0, config.tol_k)?;
        Ok(StudyRow {
            epsilon: eps,
            status: outcome.status,
            gap: outcome.gap,
            grid_gap: outcome.grid_gap,
            ambiguous: outcome.ambiguous,
            nearby: outcome.nearby,
            forecast: ForecastPoint {
                alpha_l: forecast.edge_energy(GapEdge::Lower, eps)?,
                alpha_r: forecast.edge_energy(GapEdge::Upper, eps)?,
                k_l: forecast.edge_location(GapEdge::Lower, eps)?,
                k_r: forecast.edge_location(GapEdge::Upper, eps)?,
            },
            dofs: source.inner.dof_count(),
            solves: source.calls(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let series = |f: &dyn Fn(&GapRecord) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter_map(|r| r.gap.as_ref().map(|g| (r.epsilon, f(g)))).collect()
    };
    let found = rows.iter().filter(|r| r.gap.is_some()).count();
    let fits = if found >= 3 {
        Some(StudyFits {
            alpha_l: fit_inverse_log(&series(&|g| g.alpha_l))?,
            alpha_r: fit_inverse_log(&series(&|g| g.alpha_r))?,
            k_l: fit_inverse_log(&series(&|g| g.k_l))?,
            k_r: fit_inverse_log(&series(&|g| g.k_r))?,
            width: fit_inverse_log(&series(&|g| g.width()))?,
            corrected: if found >= 4 {
                Some(CorrectedFits {
                    alpha_l: fit_inverse_log_quadratic(&series(&|g| g.alpha_l))?,
                    alpha_r: fit_inverse_log_quadratic(&series(&|g| g.alpha_r))?,
                    k_l: fit_inverse_log_quadratic(&series(&|g| g.k_l))?,
                    k_r: fit_inverse_log_quadratic(&series(&|g| g.k_r))?,
                    width: fit_inverse_log_quadratic(&series(&|g| g.width()))?,
                })
            } else {
                None
            },
        })
    } else {
        None
    };
    Ok(EpsilonStudy { crossing: *crossing, forecast, rows, fits })
}

/// Counts column evaluations of the wrapped source.
struct CountingBands<S> {
    inner: S,
    calls: core::sync::atomic::AtomicUsize,
}

impl<S> CountingBands<S> {
    fn new(inner: S) -> Self {
        Self { inner, calls: core::sync::atomic::AtomicUsize::new(0) }
    }

    fn calls(&self) -> usize {
        self.calls.load(core::sync::atomic::Ordering::Relaxed)
    }
}

impl<S: BandSource> BandSource for CountingBands<S> {
    fn band_count(&self) -> usize {
        self.inner.band_count()
    }

    fn column(&self, k: f64) -> Result<super::source::BandColumn> {
        self.calls.fetch_add(1, core::sync::atomic::Ordering::Relaxed);
        self.inner.column(k)
    }

    fn dof_count(&self) -> Option<usize> {
        self.inner.dof_count()
    }
}
