//! Task orchestration and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use wavegap_core::analytic::{
    find_crossings, identity_suite, BandCrossing, GapEdge, GapForecast, WaveguideGeometry, DEFAULT_ENERGY_CAP,
};
use wavegap_core::explorer::{
    detect_gaps, epsilon_study_with, linspace, sweep, verify_shift_bound_with, BandDiagram, BandSource,
    EpsilonStudy, FnBands, RowStatus, StudyConfig,
};
use wavegap_core::fem::{reference_spectrum, CellMesh};

use crate::cache::{CachedBands, ColumnStats, ResultCache};
use crate::config::{MeshSpec, RunConfig, Task};
use crate::emit::{emit_csv, Cell, Table};
use crate::error::{CliError, Result};
use crate::svg::{emit_svg_band_diagram, BandPlot, Reference};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Takes precedence over the environment and the default
    /// `<output_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
}

impl RunOptions {
    pub fn from_env() -> Self {
        Self { cache_dir: std::env::var_os(crate::CACHE_DIR_ENV).map(PathBuf::from) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub band_columns: usize,
    pub solves: usize,
    pub worst_residual: Option<f64>,
    pub cache_hits: usize,
    pub cache_misses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub name: String,
    pub status: TaskStatus,
    pub error: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputFile>,
    pub diagnostics: Diagnostics,
    pub summary: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CacheSummary {
    pub enabled: bool,
    pub hits: usize,
    pub misses: usize,
    /// `hits / (hits + misses)`, or 1 when nothing was requested.
    pub hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub tasks: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub tasks: Vec<TaskRecord>,
    pub cache: CacheSummary,
    /// The only part that varies between identical runs.
    pub timing: Timing,
}

impl RunManifest {
    pub fn succeeded(&self) -> bool {
        self.tasks.iter().all(|t| t.status == TaskStatus::Ok)
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Results shared between tasks of one run.
struct Context<'a> {
    cfg: &'a RunConfig,
    geom: WaveguideGeometry,
    out: &'a Path,
    cache: Arc<ResultCache>,
    diagrams: Option<Vec<(f64, BandDiagram)>>,
}

#[derive(Default)]
struct TaskOutput {
    inputs: Vec<String>,
    files: Vec<String>,
    summary: BTreeMap<String, serde_json::Value>,
    /// Set when the task ran to completion but a check it performs failed.
    failure: Option<String>,
}

impl TaskOutput {
    fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_owned(), serde_json::to_value(value).expect("plain data serializes"));
    }
}

/// Run the tasks of `cfg` in order and write `manifest.json`. A failing task
/// is recorded and the remaining ones still run; only failures to create the
/// output directory or to write the manifest are returned as errors.
pub fn run_pipeline(cfg: &RunConfig, options: &RunOptions) -> Result<RunManifest> {
    let started = Instant::now();
    let out = cfg.output_dir.as_path();
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let cache_dir = cfg.cache.then(|| options.cache_dir.clone().unwrap_or_else(|| out.join("cache")));
    let mut ctx = Context { cfg, geom: cfg.geometry(), out, cache: Arc::new(ResultCache::new(cache_dir)), diagrams: None };

    let mut records = Vec::with_capacity(cfg.tasks.len());
    let mut timing = BTreeMap::new();
    for &task in &cfg.tasks {
        let t0 = Instant::now();
        let before = ctx.cache.stats();
        let stats = Arc::new(ColumnStats::default());
        let result = match task {
            Task::Analytic => task_analytic(&ctx),
            Task::Sweep => task_sweep(&mut ctx, &stats),
            Task::Gaps => task_gaps(&mut ctx, &stats),
            Task::Study => task_study(&ctx, &stats),
            Task::Verify => task_verify(&ctx, &stats),
            Task::Report => task_report(&ctx),
        };
        let flushed = ctx.cache.flush();
        let after = ctx.cache.stats();
        let diagnostics = Diagnostics {
            band_columns: stats.columns(),
            solves: stats.solves(),
            worst_residual: (stats.columns() > 0).then(|| stats.worst_residual()),
            cache_hits: after.hits - before.hits,
            cache_misses: after.misses - before.misses,
        };
        let (status, error, output) = match (result, flushed) {
            (Ok(o), Ok(_)) => match o.failure.clone() {
                None => (TaskStatus::Ok, None, o),
                Some(why) => (TaskStatus::Failed, Some(why), o),
            },
            (Err(e), _) | (Ok(_), Err(e)) => (TaskStatus::Failed, Some(e.to_string()), TaskOutput::default()),
        };
        let mut outputs = Vec::with_capacity(output.files.len());
        for f in &output.files {
            let bytes = fs::metadata(out.join(f)).map(|m| m.len()).unwrap_or(0);
            outputs.push(OutputFile { path: f.clone(), bytes });
        }
        records.push(TaskRecord {
            name: task.name().to_owned(),
            status,
            error,
            inputs: output.inputs,
            outputs,
            diagnostics,
            summary: output.summary,
        });
        timing.insert(task.name().to_owned(), t0.elapsed().as_secs_f64());
    }

    let stats = ctx.cache.stats();
    let requested = stats.hits + stats.misses;
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        tasks: records,
        cache: CacheSummary {
            enabled: cfg.cache,
            hits: stats.hits,
            misses: stats.misses,
            hit_rate: if requested == 0 { 1.0 } else { stats.hits as f64 / requested as f64 },
        },
        timing: Timing { total_seconds: started.elapsed().as_secs_f64(), tasks: timing },
    };
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}

fn eps_tag(eps: f64) -> String {
    if eps == 0.0 {
        "0".to_owned()
    } else {
        format!("{eps:e}")
    }
}

/// Lowest eligible crossing inside the energy window.
fn primary_crossing(ctx: &Context) -> Result<BandCrossing> {
    let w = &ctx.cfg.energy_window;
    find_crossings(&ctx.geom, DEFAULT_ENERGY_CAP)?
        .into_iter()
        .find(|c| c.e0 >= w.lo && c.e0 <= w.hi)
        .ok_or(CliError::NoCrossing { cap: DEFAULT_ENERGY_CAP })
}

fn forecast_of(ctx: &Context, c: &BandCrossing) -> Option<GapForecast> {
    GapForecast::new(c, &ctx.geom).ok()
}

fn write_table(ctx: &Context, out: &mut TaskOutput, name: &str, table: &Table) -> Result<()> {
    emit_csv(table, &ctx.out.join(name))?;
    out.files.push(name.to_owned());
    Ok(())
}

fn write_svg(ctx: &Context, out: &mut TaskOutput, name: &str, plot: &BandPlot) -> Result<()> {
    emit_svg_band_diagram(plot, &ctx.out.join(name))?;
    out.files.push(name.to_owned());
    Ok(())
}

fn diagram_table(d: &BandDiagram) -> Table {
    let mut t = Table::new(std::iter::once("k".to_owned()).chain((1..=d.band_count()).map(|l| format!("E_{l}"))));
    for (j, &k) in d.k_grid.iter().enumerate() {
        let mut row = vec![Cell::Float(k)];
        row.extend(d.energies.iter().map(|b| Cell::Float(b[j])));
        t.push(row);
    }
    t
}

fn window(ctx: &Context) -> (f64, f64) {
    (ctx.cfg.energy_window.lo, ctx.cfg.energy_window.hi)
}

fn task_analytic(ctx: &Context) -> Result<TaskOutput> {
    let mut out = TaskOutput { inputs: vec!["config".into()], ..TaskOutput::default() };
    let crossings = find_crossings(&ctx.geom, DEFAULT_ENERGY_CAP)?;
    let mut t = Table::new([
        "n", "m", "k0", "e0", "beta", "zeta", "kappa", "tau_l", "tau_r", "sigma_l", "sigma_r", "alpha_l_slope",
        "alpha_r_slope", "k_l_slope", "k_r_slope", "width_slope",
    ]);
    for c in &crossings {
        let mut row: Vec<Cell> = vec![
            c.n.into(),
            c.m.into(),
            c.k0.into(),
            c.e0.into(),
            c.beta.into(),
            c.zeta.into(),
            c.kappa.into(),
        ];
        match forecast_of(ctx, c) {
            Some(f) => row.extend([
                f.tau_l,
                f.tau_r,
                f.sigma_l,
                f.sigma_r,
                f.edge_slope(GapEdge::Lower),
                f.edge_slope(GapEdge::Upper),
                f.location_slope(GapEdge::Lower),
                f.location_slope(GapEdge::Upper),
                f.width_slope(),
            ]
            .map(Cell::Float)),
            None => row.extend(std::iter::repeat_n(Cell::Empty, 9)),
        }
        t.push(row);
    }
    write_table(ctx, &mut out, "crossings.csv", &t)?;
    out.note("crossings", crossings.len());

    let grid = ctx.cfg.sweep_grid();
    let geom = ctx.geom;
    let n = ctx.cfg.bands;
    let bands = FnBands::new(n, move |k| reference_spectrum(&geom, k, n));
    let diagram = sweep(&bands, &grid, n)?;
    write_table(ctx, &mut out, "bands_unperturbed.csv", &diagram_table(&diagram))?;
    let references =
        crossings.iter().map(|c| Reference { label: format!("E0 ({}, {})", c.n, c.m), energy: c.e0 }).collect();
    let plot = BandPlot {
        title: format!("Decoupled bands, d = {}, h = {}", ctx.geom.d_minus(), ctx.geom.half_period()),
        k: &diagram.k_grid,
        bands: &diagram.energies,
        gaps: Vec::new(),
        references,
        window: window(ctx),
    };
    write_svg(ctx, &mut out, "bands_unperturbed.svg", &plot)?;
    Ok(out)
}

fn cached_source(ctx: &Context, stats: &Arc<ColumnStats>, mesh: CellMesh, spec: &MeshSpec) -> Box<dyn BandSource> {
    Box::new(CachedBands::new(ctx.cache.clone(), stats.clone(), mesh, spec, ctx.cfg.bands, ctx.cfg.solver()))
}

/// Diagrams at `ε = 0` and every configured window, each on its own mesh.
fn compute_diagrams(ctx: &Context, stats: &Arc<ColumnStats>) -> Result<Vec<(f64, BandDiagram)>> {
    let grid = ctx.cfg.sweep_grid();
    let mut all = Vec::with_capacity(ctx.cfg.epsilons.len() + 1);
    for eps in std::iter::once(0.0).chain(ctx.cfg.epsilons.iter().copied()) {
        let g = ctx.geom.with_window(eps)?;
        let mesh = CellMesh::build(&g, &ctx.cfg.mesh.to_core())?;
        let source = cached_source(ctx, stats, mesh, &ctx.cfg.mesh);
        all.push((eps, sweep(source.as_ref(), &grid, ctx.cfg.bands)?));
    }
    Ok(all)
}

fn task_sweep(ctx: &mut Context, stats: &Arc<ColumnStats>) -> Result<TaskOutput> {
    let mut out = TaskOutput { inputs: vec!["config".into()], ..TaskOutput::default() };
    let diagrams = compute_diagrams(ctx, stats)?;
    let mut defect: f64 = 0.0;
    for (eps, d) in &diagrams {
        let tag = eps_tag(*eps);
        write_table(ctx, &mut out, &format!("bands_eps_{tag}.csv"), &diagram_table(d))?;
        let plot = BandPlot {
            title: format!("Bands at eps = {tag}"),
            k: &d.k_grid,
            bands: &d.energies,
            gaps: Vec::new(),
            references: Vec::new(),
            window: window(ctx),
        };
        write_svg(ctx, &mut out, &format!("bands_eps_{tag}.svg"), &plot)?;
        defect = defect.max(d.evenness_defect());
    }
    out.note("diagrams", diagrams.len());
    out.note("evenness_defect", defect);
    ctx.diagrams = Some(diagrams);
    Ok(out)
}

fn task_gaps(ctx: &mut Context, stats: &Arc<ColumnStats>) -> Result<TaskOutput> {
    let mut out = TaskOutput { inputs: vec!["config".into()], ..TaskOutput::default() };
    let diagrams = match ctx.diagrams.take() {
        Some(d) => {
            out.inputs.push("sweep".into());
            d
        }
        None => compute_diagrams(ctx, stats)?,
    };
    let crossing = primary_crossing(ctx).ok();
    let forecast = crossing.as_ref().and_then(|c| forecast_of(ctx, c));
    let mut t = Table::new(["epsilon", "lower_band", "alpha_l", "alpha_r", "k_l", "k_r", "width"]);
    let mut per_eps = BTreeMap::new();
    for (eps, d) in &diagrams {
        let gaps = detect_gaps(d, window(ctx));
        for g in &gaps {
            t.push(vec![
                (*eps).into(),
                (g.band + 1).into(),
                g.alpha_l.into(),
                g.alpha_r.into(),
                g.k_l.into(),
                g.k_r.into(),
                g.width().into(),
            ]);
        }
        let tag = eps_tag(*eps);
        per_eps.insert(tag.clone(), gaps.len());
        let mut references = Vec::new();
        if let Some(c) = &crossing {
            references.push(Reference { label: "E0".into(), energy: c.e0 });
        }
        if let (Some(f), true) = (&forecast, *eps > 0.0) {
            references.push(Reference { label: "alpha_l".into(), energy: f.edge_energy(GapEdge::Lower, *eps)? });
            references.push(Reference { label: "alpha_r".into(), energy: f.edge_energy(GapEdge::Upper, *eps)? });
        }
        let plot = BandPlot {
            title: format!("Gaps at eps = {tag}"),
            k: &d.k_grid,
            bands: &d.energies,
            gaps: gaps.iter().map(|g| (g.alpha_l, g.alpha_r)).collect(),
            references,
            window: window(ctx),
        };
        write_svg(ctx, &mut out, &format!("gaps_eps_{tag}.svg"), &plot)?;
    }
    write_table(ctx, &mut out, "gaps.csv", &t)?;
    out.note("gaps_per_epsilon", per_eps);
    ctx.diagrams = Some(diagrams);
    Ok(out)
}

fn study_tables(study: &EpsilonStudy) -> (Table, Table) {
    let mut rows = Table::new([
        "epsilon",
        "abs_ln_eps",
        "alpha_l",
        "alpha_r",
        "k_l",
        "k_r",
        "width",
        "status",
        "gaps_near_e0",
        "forecast_alpha_l",
        "forecast_alpha_r",
        "forecast_k_l",
        "forecast_k_r",
        "dofs",
    ]);
    for r in &study.rows {
        let g = r.gap.as_ref();
        rows.push(vec![
            r.epsilon.into(),
            r.epsilon.ln().abs().into(),
            g.map(|g| g.alpha_l).into(),
            g.map(|g| g.alpha_r).into(),
            g.map(|g| g.k_l).into(),
            g.map(|g| g.k_r).into(),
            g.map(|g| g.width()).into(),
            match &r.status {
                RowStatus::Found => "found".into(),
                RowStatus::Missing(why) => Cell::Text(format!("missing: {why}")),
            },
            r.nearby.into(),
            r.forecast.alpha_l.into(),
            r.forecast.alpha_r.into(),
            r.forecast.k_l.into(),
            r.forecast.k_r.into(),
            r.dofs.map_or(Cell::Empty, Cell::from),
        ]);
    }

    let mut fits = Table::new(["series", "c0", "c1", "residual", "forecast", "rel_error", "c0_forecast", "model", "c2"]);
    if let Some(f) = &study.fits {
        let fc = &study.forecast;
        let series = [
            ("alpha_l", &f.alpha_l, fc.edge_slope(GapEdge::Lower), fc.e0),
            ("alpha_r", &f.alpha_r, fc.edge_slope(GapEdge::Upper), fc.e0),
            ("k_l", &f.k_l, fc.location_slope(GapEdge::Lower), fc.k0),
            ("k_r", &f.k_r, fc.location_slope(GapEdge::Upper), fc.k0),
            ("width", &f.width, fc.width_slope(), 0.0),
        ];
        for (name, fit, slope, c0) in series {
            fits.push(vec![
                name.into(),
                fit.intercept.into(),
                fit.slope.into(),
                fit.residual_norm.into(),
                slope.into(),
                ((fit.slope - slope) / slope.abs()).into(),
                c0.into(),
                "c0+c1/|ln eps|".into(),
                Cell::Empty,
            ]);
        }
        if let Some(q) = &f.corrected {
            let corrected = [
                ("alpha_l", &q.alpha_l, series[0].2, fc.e0),
                ("alpha_r", &q.alpha_r, series[1].2, fc.e0),
                ("k_l", &q.k_l, series[2].2, fc.k0),
                ("k_r", &q.k_r, series[3].2, fc.k0),
                ("width", &q.width, series[4].2, 0.0),
            ];
            for (name, fit, slope, c0) in corrected {
                fits.push(vec![
                    name.into(),
                    fit.intercept.into(),
                    fit.slope.into(),
                    fit.residual_norm.into(),
                    slope.into(),
                    ((fit.slope - slope) / slope.abs()).into(),
                    c0.into(),
                    "c0+c1/|ln eps|+c2/ln^2 eps".into(),
                    fit.curvature.into(),
                ]);
            }
        }
    }
    (rows, fits)
}

fn task_study(ctx: &Context, stats: &Arc<ColumnStats>) -> Result<TaskOutput> {
    let mut out = TaskOutput { inputs: vec!["config".into()], ..TaskOutput::default() };
    let crossing = primary_crossing(ctx)?;
    if ctx.cfg.epsilons.is_empty() {
        return Err(CliError::Task("the study needs at least one window half-width".into()));
    }
    let scfg = StudyConfig {
        epsilons: ctx.cfg.epsilons.clone(),
        k_grid: ctx.cfg.half_grid(),
        n_bands: ctx.cfg.bands,
        mesh: ctx.cfg.mesh.to_core(),
        solver: ctx.cfg.solver(),
        tol_k: ctx.cfg.tolerance.k,
    };
    let spec = ctx.cfg.mesh.clone();
    let factory = |g: &WaveguideGeometry| -> wavegap_core::Result<Box<dyn BandSource>> {
        let mesh = CellMesh::build(g, &spec.to_core())?;
        Ok(cached_source(ctx, stats, mesh, &spec))
    };
    let study = epsilon_study_with(&ctx.geom, &crossing, &scfg, &factory)?;
    let (rows, fits) = study_tables(&study);
    write_table(ctx, &mut out, "study.csv", &rows)?;
    write_table(ctx, &mut out, "fits.csv", &fits)?;
    out.note("crossing", (crossing.n, crossing.m, crossing.k0, crossing.e0));
    out.note("rows_found", study.found().count());
    out.note("rows", study.rows.len());
    if let Some(f) = &study.fits {
        out.note("alpha_l_slope", f.alpha_l.slope);
        out.note("alpha_r_slope", f.alpha_r.slope);
    }
    Ok(out)
}

fn task_verify(ctx: &Context, stats: &Arc<ColumnStats>) -> Result<TaskOutput> {
    let mut out = TaskOutput { inputs: vec!["config".into()], ..TaskOutput::default() };
    let mut failures = Vec::new();

    let crossings = find_crossings(&ctx.geom, DEFAULT_ENERGY_CAP)?;
    let ts = linspace(-5.0, 5.0, 41);
    let checks = identity_suite(&crossings, &ts)?;
    let mut t = Table::new(["check", "worst", "tolerance", "passed"]);
    for c in &checks {
        t.push(vec![c.name.into(), c.worst.into(), c.tolerance.into(), Cell::Text(c.passed().to_string())]);
        if !c.passed() {
            failures.push(format!("identity `{}` off by {:e}", c.name, c.worst));
        }
    }
    write_table(ctx, &mut out, "identities.csv", &t)?;

    if ctx.cfg.epsilons.is_empty() {
        out.note("shift_bound", "skipped: no windows configured");
    } else {
        let spec = ctx.cfg.verify_mesh.clone();
        let factory =
            |m: &CellMesh| -> wavegap_core::Result<Box<dyn BandSource>> { Ok(cached_source(ctx, stats, m.clone(), &spec)) };
        let report = verify_shift_bound_with(
            &ctx.geom,
            &ctx.cfg.epsilons,
            &ctx.cfg.half_grid(),
            ctx.cfg.bands,
            &spec.to_core(),
            &factory,
        )?;
        let mut s = Table::new(["epsilon", "k", "band", "shift", "scaled"]);
        for x in &report.samples {
            s.push(vec![x.epsilon.into(), x.k.into(), (x.band + 1).into(), x.shift.into(), x.scaled.into()]);
        }
        write_table(ctx, &mut out, "shift.csv", &s)?;
        out.note("min_shift", report.min_shift);
        out.note("max_scaled", &report.max_scaled);
        out.note("nonnegative", report.nonnegative);
        out.note("bounded", report.bounded);
        out.note("monotone", report.monotone);
        out.note("dofs", report.dofs);
        if !report.passed() {
            failures.push(format!(
                "shift bound: nonnegative {}, bounded {}, monotone {}",
                report.nonnegative, report.bounded, report.monotone
            ));
        }
    }
    out.failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(out)
}

fn task_report(ctx: &Context) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let cfg = ctx.cfg;
    let mut md = String::new();
    md.push_str("# wavegap report\n\n");
    md.push_str(&format!("Config hash: `{}`\n\n", cfg.hash()));
    md.push_str(&format!(
        "Geometry: d_plus = {}, d = {}, h = {}\n\n",
        ctx.geom.d_plus(),
        ctx.geom.d_minus(),
        ctx.geom.half_period()
    ));
    let crossings = find_crossings(&ctx.geom, DEFAULT_ENERGY_CAP)?;
    md.push_str("## Crossings\n\n");
    if crossings.is_empty() {
        md.push_str("None below the energy cap.\n\n");
    } else {
        md.push_str("| n | m | k0 | E0 | alpha_l slope | alpha_r slope | width slope |\n|---|---|---|---|---|---|---|\n");
        for c in &crossings {
            let f = forecast_of(ctx, c);
            let fmt = |v: Option<f64>| v.map_or("-".to_owned(), |v| format!("{v:.6}"));
            md.push_str(&format!(
                "| {} | {} | {:.6} | {:.6} | {} | {} | {} |\n",
                c.n,
                c.m,
                c.k0,
                c.e0,
                fmt(f.map(|f| f.edge_slope(GapEdge::Lower))),
                fmt(f.map(|f| f.edge_slope(GapEdge::Upper))),
                fmt(f.map(|f| f.width_slope())),
            ));
        }
        md.push('\n');
    }
    for (name, title) in [("fits.csv", "Fits"), ("study.csv", "Window study"), ("gaps.csv", "Detected gaps")] {
        let path = ctx.out.join(name);
        let Ok(text) = fs::read_to_string(&path) else { continue };
        out.inputs.push(name.to_owned());
        md.push_str(&format!("## {title}\n\n"));
        md.push_str(&csv_to_markdown(&text));
        md.push('\n');
    }
    let name = "report.md";
    fs::write(ctx.out.join(name), md).map_err(|e| CliError::io(ctx.out.join(name), e))?;
    out.files.push(name.to_owned());
    out.note("sections", out.inputs.len() + 1);
    Ok(out)
}

fn csv_to_markdown(text: &str) -> String {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut md = String::new();
    for (i, rec) in reader.records().flatten().enumerate() {
        let cells: Vec<String> = rec
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(v) if c.contains('e') => format!("{v:.6}"),
                _ => c.replace('|', "\\|"),
            })
            .collect();
        md.push_str(&format!("| {} |\n", cells.join(" | ")));
        if i == 0 {
            md.push_str(&format!("|{}\n", "---|".repeat(cells.len())));
        }
    }
    md
}
