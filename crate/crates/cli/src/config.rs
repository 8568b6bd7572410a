use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wavegap_core::analytic::WaveguideGeometry;
use wavegap_core::explorer::{linspace, DEFAULT_EPSILONS};
use wavegap_core::fem::{ElementOrder, MeshConfig, SolverConfig};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Analytic,
    Sweep,
    Gaps,
    Study,
    Verify,
    Report,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Analytic => "analytic",
            Task::Sweep => "sweep",
            Task::Gaps => "gaps",
            Task::Study => "study",
            Task::Verify => "verify",
            Task::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub d: f64,
    pub h: f64,
    /// Upper strip width; `π` when omitted.
    #[serde(default)]
    pub d_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub count: usize,
    /// Cover `[-π, π]` instead of `[0, π]`.
    pub symmetric: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { count: 33, symmetric: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSpec {
    pub n1: usize,
    pub n2: usize,
    pub grading: f64,
    pub tip_fraction: f64,
    pub order: Order,
    pub refinement: u32,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self::from_core(&MeshConfig::default())
    }
}

impl MeshSpec {
    /// Shared layout for the shift-bound check: graded for every window at
    /// once, so coarser away from the tips than the per-window default.
    pub fn verify_default() -> Self {
        Self { n1: 16, n2: 6, grading: 0.3, ..Self::default() }
    }

    fn from_core(m: &MeshConfig) -> Self {
        Self {
            n1: m.n1,
            n2: m.n2,
            grading: m.grading,
            tip_fraction: m.tip_fraction,
            order: match m.order {
                ElementOrder::Linear => Order::Linear,
                ElementOrder::Quadratic => Order::Quadratic,
            },
            refinement: m.refinement,
        }
    }

    pub fn to_core(&self) -> MeshConfig {
        MeshConfig {
            n1: self.n1,
            n2: self.n2,
            grading: self.grading,
            tip_fraction: self.tip_fraction,
            order: match self.order {
                Order::Linear => ElementOrder::Linear,
                Order::Quadratic => ElementOrder::Quadratic,
            },
            refinement: self.refinement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyWindow {
    pub lo: f64,
    pub hi: f64,
}

impl Default for EnergyWindow {
    fn default() -> Self {
        Self { lo: 0.0, hi: 2.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Relative eigen-residual target.
    pub eigen: f64,
    /// Quasimomentum tolerance of the extremum refinement.
    pub k: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { eigen: SolverConfig::default().tol, k: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub k_grid: GridConfig,
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default = "MeshSpec::verify_default")]
    pub verify_mesh: MeshSpec,
    #[serde(default = "default_bands")]
    pub bands: usize,
    #[serde(default)]
    pub energy_window: EnergyWindow,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<Task>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_cache")]
    pub cache: bool,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
}

fn default_epsilons() -> Vec<f64> {
    DEFAULT_EPSILONS.to_vec()
}

fn default_bands() -> usize {
    6
}

fn default_tasks() -> Vec<Task> {
    vec![Task::Analytic]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("wavegap-out")
}

fn default_cache() -> bool {
    true
}

/// Parse and validate a JSON document.
pub fn parse_config(document: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_json(document)?.validated()
}

/// Everything that determines the numbers, in a fixed field order.
#[derive(Serialize)]
struct Canonical<'a> {
    geometry: &'a GeometryConfig,
    epsilons: &'a [f64],
    k_grid: &'a GridConfig,
    mesh: &'a MeshSpec,
    verify_mesh: &'a MeshSpec,
    bands: usize,
    energy_window: &'a EnergyWindow,
    tasks: &'a [Task],
    tolerance: &'a ToleranceConfig,
}

impl RunConfig {
    /// Schema check only; unknown keys are rejected with their path.
    pub fn from_json(document: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(document);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                ConfigError::Syntax(inner.to_string())
            } else {
                ConfigError::Schema { path, message: inner.to_string() }
            }
        })?;
        de.end().map_err(|e| ConfigError::Syntax(e.to_string()))?;
        Ok(cfg)
    }

    /// Apply defaults, canonicalize and check every precondition of the
    /// numerical layers.
    pub fn validated(mut self) -> Result<Self, ConfigError> {
        let g = &mut self.geometry;
        let d_plus = *g.d_plus.get_or_insert(PI);
        let geom = WaveguideGeometry::with_upper_width(d_plus, g.d, g.h, 0.0)
            .map_err(|e| ConfigError::invalid("geometry", e.to_string()))?;

        for &e in &self.epsilons {
            if !e.is_finite() || e <= 0.0 {
                return Err(ConfigError::invalid("epsilons", format!("eps > 0 violated by {e}")));
            }
            if e >= geom.half_period() {
                return Err(ConfigError::invalid("epsilons", format!("eps < h violated by {e}")));
            }
            if e >= 1.0 {
                return Err(ConfigError::invalid("epsilons", format!("eps < 1 violated by {e}")));
            }
        }
        self.epsilons.sort_by(|a, b| b.total_cmp(a));
        if self.epsilons.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::invalid("epsilons", "duplicate window half-width"));
        }

        if self.k_grid.count < 2 {
            return Err(ConfigError::invalid("k_grid.count", "at least 2 points are needed"));
        }
        if self.tasks.contains(&Task::Study) && self.k_grid.count < 16 {
            return Err(ConfigError::invalid("k_grid.count", "the study task needs at least 16 points"));
        }
        if !(2..=32).contains(&self.bands) {
            return Err(ConfigError::invalid("bands", format!("{} outside [2, 32]", self.bands)));
        }
        let w = &self.energy_window;
        if !(w.lo.is_finite() && w.hi.is_finite() && w.lo < w.hi) {
            return Err(ConfigError::invalid("energy_window", "lo < hi violated"));
        }
        for (field, m) in [("mesh", &self.mesh), ("verify_mesh", &self.verify_mesh)] {
            m.to_core().validate().map_err(|e| ConfigError::invalid(field, e.to_string()))?;
            if m.refinement > 3 {
                return Err(ConfigError::invalid(field, "refinement above 3"));
            }
        }
        let t = &self.tolerance;
        if !(t.eigen > 1e-14 && t.eigen < 1e-2) {
            return Err(ConfigError::invalid("tolerance.eigen", "outside (1e-14, 1e-2)"));
        }
        if !(t.k >= 1e-8 && t.k < 0.1) {
            return Err(ConfigError::invalid("tolerance.k", "outside [1e-8, 0.1)"));
        }
        if self.tasks.is_empty() {
            return Err(ConfigError::invalid("tasks", "no task requested"));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if self.tasks[..i].contains(t) {
                return Err(ConfigError::invalid("tasks", format!("`{}` listed twice", t.name())));
            }
        }
        Ok(self)
    }

    pub fn geometry(&self) -> WaveguideGeometry {
        let g = &self.geometry;
        WaveguideGeometry::with_upper_width(g.d_plus.unwrap_or(PI), g.d, g.h, 0.0)
            .expect("validated geometry")
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { tol: self.tolerance.eigen, ..SolverConfig::default() }
    }

    /// Grid of the band diagrams.
    pub fn sweep_grid(&self) -> Vec<f64> {
        let lo = if self.k_grid.symmetric { -PI } else { 0.0 };
        linspace(lo, PI, self.k_grid.count)
    }

    /// Half-zone grid of the study and the shift check; the bands are even.
    pub fn half_grid(&self) -> Vec<f64> {
        linspace(0.0, PI, self.k_grid.count)
    }

    /// Compact JSON of every parameter that affects a number. The output
    /// directory and the cache switch are left out.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&Canonical {
            geometry: &self.geometry,
            epsilons: &self.epsilons,
            k_grid: &self.k_grid,
            mesh: &self.mesh,
            verify_mesh: &self.verify_mesh,
            bands: self.bands,
            energy_window: &self.energy_window,
            tasks: &self.tasks,
            tolerance: &self.tolerance,
        })
        .expect("plain data serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex_digest(self.canonical_json().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = parse_config(r#"{"geometry":{"d":2.0,"h":2.3},"tasks":["analytic"]}"#).unwrap();
        assert_eq!(c.geometry.d_plus, Some(PI));
        assert_eq!(c.epsilons, DEFAULT_EPSILONS.to_vec());
        assert_eq!(c.bands, 6);
        assert_eq!(c.mesh, MeshSpec::default());
        assert!(c.cache);
    }

    #[test]
    fn wide_lower_strip_is_rejected() {
        let e = parse_config(r#"{"geometry":{"d":4.0,"h":2.3}}"#).unwrap_err();
        assert!(e.to_string().contains("d < d_plus violated"), "{e}");
    }

    #[test]
    fn small_window_is_accepted() {
        let c = parse_config(r#"{"epsilons":[0.01],"geometry":{"d":2,"h":2.3}}"#).unwrap();
        assert_eq!(c.epsilons, vec![0.01]);
        let e = parse_config(r#"{"epsilons":[0.5],"geometry":{"d":2,"h":0.4}}"#).unwrap_err();
        assert!(e.to_string().contains("eps < h violated"), "{e}");
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let e = parse_config(r#"{"geometry":{"d":2,"h":2.3,"dd":1}}"#).unwrap_err();
        match e {
            ConfigError::Schema { path, .. } => assert_eq!(path, "geometry.dd"),
            other => panic!("{other}"),
        }
        let e = parse_config(r#"{"geometry":{"d":2,"h":2.3},"mesh":{"n3":4}}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Schema { ref path, .. } if path == "mesh.n3"), "{e}");
        assert!(matches!(parse_config("{"), Err(ConfigError::Syntax(_))));
        assert!(matches!(parse_config(r#"{"geometry":{"d":2,"h":2.3},"tasks":["plot"]}"#), Err(ConfigError::Schema { .. })));
    }

    #[test]
    fn canonical_form_ignores_order_and_output() {
        let a = parse_config(r#"{"geometry":{"d":2,"h":2.3},"epsilons":[0.001,0.01],"output_dir":"a"}"#).unwrap();
        let b = parse_config(r#"{"output_dir":"b","epsilons":[0.01,0.001],"geometry":{"h":2.3,"d":2.0,"d_plus":3.141592653589793}}"#)
            .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = parse_config(r#"{"geometry":{"d":2,"h":2.31},"epsilons":[0.01,0.001]}"#).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn study_needs_a_fine_grid() {
        let e = parse_config(r#"{"geometry":{"d":2,"h":2.3},"k_grid":{"count":9},"tasks":["study"]}"#).unwrap_err();
        assert!(e.to_string().contains("k_grid.count"));
        assert!(parse_config(r#"{"geometry":{"d":2,"h":2.3},"tasks":[]}"#).is_err());
        assert!(parse_config(r#"{"geometry":{"d":2,"h":2.3},"epsilons":[0.01,0.01]}"#).is_err());
        assert!(parse_config(r#"{"geometry":{"d":2,"h":2.3},"mesh":{"n1":2}}"#).is_err());
    }
}
