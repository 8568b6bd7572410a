//! Content-addressed store of eigen-results, one JSON file per `(cell, k)`.
//!
//! Workers only read; new entries are kept in memory and written by the
//! orchestrator through [`ResultCache::flush`].

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use wavegap_core::analytic::WaveguideGeometry;
use wavegap_core::explorer::{BandColumn, BandSource, ColumnMeta, FemBands};
use wavegap_core::fem::{CellMesh, InterfaceState, SolveMethod, SolverConfig};

use crate::config::{hex_digest, MeshSpec};
use crate::error::{CliError, Result};

/// Bumped whenever the discretization or solver changes the stored numbers.
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    key: String,
    k: f64,
    /// Exact bit patterns; `energies` is for reading only.
    bits: Vec<String>,
    energies: Vec<f64>,
    iterations: usize,
    solves: usize,
    worst_residual: f64,
    dense: Option<bool>,
}

impl Entry {
    fn column(&self) -> Option<BandColumn> {
        let energies = self
            .bits
            .iter()
            .map(|b| u64::from_str_radix(b, 16).ok().map(f64::from_bits))
            .collect::<Option<Vec<_>>>()?;
        Some(BandColumn {
            energies,
            meta: ColumnMeta {
                iterations: self.iterations,
                solves: self.solves,
                worst_residual: self.worst_residual,
                method: self.dense.map(|d| if d { SolveMethod::Dense } else { SolveMethod::ShiftInvertKrylov }),
            },
        })
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
}

#[derive(Debug)]
pub struct ResultCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, BandColumn>>,
    pending: Mutex<Vec<Entry>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl ResultCache {
    /// `dir = None` keeps results for this process only.
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self {
            dir,
            memory: Mutex::new(HashMap::new()),
            pending: Mutex::new(Vec::new()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats { hits: self.hits.load(Ordering::Relaxed), misses: self.misses.load(Ordering::Relaxed) }
    }

    fn path_of(dir: &Path, key: &str) -> PathBuf {
        dir.join(&key[..2]).join(format!("{key}.json"))
    }

    fn lookup(&self, key: &str) -> Option<BandColumn> {
        if let Some(c) = self.memory.lock().expect("cache lock").get(key) {
            return Some(c.clone());
        }
        let dir = self.dir.as_ref()?;
        let text = fs::read_to_string(Self::path_of(dir, key)).ok()?;
        // A damaged entry is treated as a miss and rewritten.
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if entry.key != key {
            return None;
        }
        let col = entry.column()?;
        self.memory.lock().expect("cache lock").insert(key.to_owned(), col.clone());
        Some(col)
    }

    fn store(&self, key: String, k: f64, col: &BandColumn) {
        self.memory.lock().expect("cache lock").insert(key.clone(), col.clone());
        if self.dir.is_some() {
            self.pending.lock().expect("cache lock").push(Entry {
                key,
                k,
                bits: col.energies.iter().map(|e| format!("{:016x}", e.to_bits())).collect(),
                energies: col.energies.clone(),
                iterations: col.meta.iterations,
                solves: col.meta.solves,
                worst_residual: col.meta.worst_residual,
                dense: col.meta.method.map(|m| m == SolveMethod::Dense),
            });
        }
    }

    /// Write entries computed since the last flush.
    pub fn flush(&self) -> Result<usize> {
        let Some(dir) = &self.dir else { return Ok(0) };
        let entries = std::mem::take(&mut *self.pending.lock().expect("cache lock"));
        for e in &entries {
            let path = Self::path_of(dir, &e.key);
            let parent = path.parent().expect("nested path");
            fs::create_dir_all(parent).map_err(|err| CliError::io(parent, err))?;
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, serde_json::to_vec(e)?).map_err(|err| CliError::io(&tmp, err))?;
            fs::rename(&tmp, &path).map_err(|err| CliError::io(&path, err))?;
        }
        Ok(entries.len())
    }
}

/// Identity of one discrete cell problem, `k` aside.
#[derive(Serialize)]
struct CellKey<'a> {
    version: u32,
    d_plus: f64,
    d_minus: f64,
    h: f64,
    /// Windows the node layout is graded for.
    layout: &'a [f64],
    interface: String,
    mesh: &'a MeshSpec,
    bands: usize,
    tol: f64,
    block: usize,
    max_basis: usize,
    seed: u64,
}

/// Solver figures gathered over the columns one task requested.
#[derive(Debug, Default)]
pub struct ColumnStats {
    columns: AtomicUsize,
    solves: AtomicUsize,
    worst_residual: Mutex<f64>,
}

impl ColumnStats {
    fn record(&self, col: &BandColumn) {
        self.columns.fetch_add(1, Ordering::Relaxed);
        self.solves.fetch_add(col.meta.solves, Ordering::Relaxed);
        let mut w = self.worst_residual.lock().expect("stats lock");
        *w = w.max(col.meta.worst_residual);
    }

    pub fn columns(&self) -> usize {
        self.columns.load(Ordering::Relaxed)
    }

    /// Inverse-operator applications behind the columns, cached or not.
    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    pub fn worst_residual(&self) -> f64 {
        *self.worst_residual.lock().expect("stats lock")
    }
}

/// Band source backed by the cache, solving on a miss.
pub struct CachedBands {
    cache: Arc<ResultCache>,
    stats: Arc<ColumnStats>,
    prefix: String,
    mesh: CellMesh,
    count: usize,
    solver: SolverConfig,
    fem: OnceLock<FemBands>,
}

impl CachedBands {
    pub fn new(
        cache: Arc<ResultCache>,
        stats: Arc<ColumnStats>,
        mesh: CellMesh,
        spec: &MeshSpec,
        count: usize,
        solver: SolverConfig,
    ) -> Self {
        let g: &WaveguideGeometry = mesh.geometry();
        let interface = match mesh.interface_state() {
            InterfaceState::Closed => "closed".to_owned(),
            InterfaceState::Open => "open".to_owned(),
            InterfaceState::Window(e) => format!("window:{:016x}", e.to_bits()),
        };
        let key = CellKey {
            version: FORMAT_VERSION,
            d_plus: g.d_plus(),
            d_minus: g.d_minus(),
            h: g.half_period(),
            layout: mesh.layout_windows(),
            interface,
            mesh: spec,
            bands: count,
            tol: solver.tol,
            block: solver.block,
            max_basis: solver.max_basis,
            seed: solver.seed,
        };
        let prefix = serde_json::to_string(&key).expect("plain data serializes");
        Self { cache, stats, prefix, mesh, count, solver, fem: OnceLock::new() }
    }

    fn key(&self, k: f64) -> String {
        hex_digest(format!("{}|{:016x}", self.prefix, k.to_bits()).as_bytes())
    }
}

impl BandSource for CachedBands {
    fn band_count(&self) -> usize {
        self.count
    }

    fn column(&self, k: f64) -> wavegap_core::Result<BandColumn> {
        let key = self.key(k);
        if let Some(col) = self.cache.lookup(&key) {
            self.cache.hits.fetch_add(1, Ordering::Relaxed);
            self.stats.record(&col);
            return Ok(col);
        }
        self.cache.misses.fetch_add(1, Ordering::Relaxed);
        let fem = self.fem.get_or_init(|| FemBands::new(&self.mesh, self.count, self.solver));
        let col = fem.column(k)?;
        self.cache.store(key, k, &col);
        self.stats.record(&col);
        Ok(col)
    }

    fn dof_count(&self) -> Option<usize> {
        Some(self.mesh.dof_count())
    }
}
