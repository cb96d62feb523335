//! Experiment configuration, read from TOML.
//!
//! Only `name` and `[lattice]` are required. Every experiment section falls
//! back to defaults, and experiments that need their own geometry may carry a
//! `lattice` table of their own.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use scaledgauge_core::field_calculus::{ComplexLatticeField, FieldFixture};
use scaledgauge_core::gauge_field::{FieldKind, Potential, RealGaugeField};
use scaledgauge_core::gauge_theory::lagrangian::DensityKind;
use scaledgauge_core::gauge_theory::DerivativeMode;
use scaledgauge_core::lattice::{Boundary, LatticeSpec, Site};
use scaledgauge_core::scaled_numbers::ScaleFactor;

use crate::experiments::Experiment;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("invalid [{section}]: {message}")]
    Invalid { section: &'static str, message: String },
}

fn invalid(section: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { section, message: message.into() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub axioms: AxiomsConfig,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub integrability: IntegrabilityConfig,
    #[serde(default)]
    pub derivative: DerivativeConfig,
    #[serde(default)]
    pub hilbert: HilbertConfig,
    #[serde(default)]
    pub gauge: GaugeConfig,
    #[serde(default)]
    pub action: ActionConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Tolerances {
    pub axiom: f64,
    pub analytic: f64,
    pub link_loop: f64,
    pub integrability: f64,
    pub path_spread: f64,
    pub nonintegrable_spread: f64,
    pub min_slope: f64,
    pub covariance_exact: f64,
    pub global_covariance: f64,
    pub field_strength: f64,
    pub unitarity: f64,
    pub series: f64,
    pub hilbert: f64,
    pub anchor: f64,
    pub collapse: f64,
    pub identity_component: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            axiom: 1e-9,
            analytic: 1e-9,
            link_loop: 1e-12,
            integrability: 1e-10,
            path_spread: 1e-12,
            nonintegrable_spread: 1e-3,
            min_slope: 0.9,
            covariance_exact: 1e-12,
            global_covariance: 1e-14,
            field_strength: 1e-12,
            unitarity: 1e-12,
            series: 1e-10,
            hilbert: 1e-12,
            anchor: 1e-10,
            collapse: 1e-15,
            identity_component: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct AxiomsConfig {
    pub scales: Vec<f64>,
    pub samples: usize,
    pub polynomials: usize,
    pub max_degree: usize,
    /// Samples for the analytic `exp` comparison, per scale.
    pub exp_samples: usize,
}

impl Default for AxiomsConfig {
    fn default() -> Self {
        AxiomsConfig {
            scales: vec![1e-3, 1e-1, 1.0, 10.0, 1e3],
            samples: 1000,
            polynomials: 100,
            max_degree: 8,
            exp_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct TransportConfig {
    pub lattice: Option<LatticeSpec>,
    pub field: FieldKind,
    /// Random walks checked for exact reversal.
    pub walks: usize,
    pub walk_length: usize,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            lattice: None,
            field: FieldKind::Random { seed: 7, amplitude: 1.0 },
            walks: 64,
            walk_length: 24,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct IntegrabilityConfig {
    pub lattice: Option<LatticeSpec>,
    pub field: FieldKind,
    /// Path endpoints; default is corner to opposite corner.
    pub from: Option<Vec<usize>>,
    pub to: Option<Vec<usize>>,
    pub path_limit: usize,
    pub expected_nonintegrable: bool,
}

impl Default for IntegrabilityConfig {
    fn default() -> Self {
        IntegrabilityConfig {
            lattice: None,
            field: FieldKind::Gradient { potential: Potential::Random { seed: 11, amplitude: 0.5 } },
            from: None,
            to: None,
            path_limit: 10_000,
            expected_nonintegrable: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct DerivativeConfig {
    pub dims: usize,
    pub box_length: f64,
    pub deltas: Vec<f64>,
    pub fixture: FieldFixture,
    pub field: FieldKind,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            dims: 2,
            box_length: 1.6,
            deltas: default_deltas(),
            fixture: FieldFixture::PlaneWave { modes: vec![1.0, 1.0] },
            field: FieldKind::Gradient { potential: Potential::Sinusoid { amplitude: 0.5, modes: vec![1.0, 1.0] } },
        }
    }
}

fn default_deltas() -> Vec<f64> {
    vec![0.1, 0.05, 0.025, 0.0125]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct HilbertConfig {
    pub samples: usize,
    pub dim: usize,
    pub scale_range: [f64; 2],
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig { samples: 1000, dim: 4, scale_range: [1e-3, 1e3] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct GaugeConfig {
    pub box_length: f64,
    pub deltas: Vec<f64>,
    pub g_r: f64,
    pub g_i: f64,
    pub g: f64,
    pub mass: f64,
    pub lambda: f64,
    /// Amplitude of the local phase `φ` and SU(2) parameters `Θ`.
    pub transform_amplitude: f64,
    /// Random SU(2) links checked for unitarity.
    pub random_links: usize,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        GaugeConfig {
            box_length: 1.6,
            deltas: default_deltas(),
            g_r: 0.6,
            g_i: 1.1,
            g: 0.8,
            mass: 1.0,
            lambda: 0.2,
            transform_amplitude: 0.5,
            random_links: 1000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ActionConfig {
    pub lattice: Option<LatticeSpec>,
    pub field: FieldKind,
    pub gamma: FieldKind,
    pub kind: DensityKind,
    pub mode: DerivativeMode,
    pub modes: Vec<f64>,
    pub anchors: Vec<Vec<usize>>,
}

impl Default for ActionConfig {
    fn default() -> Self {
        ActionConfig {
            lattice: None,
            field: FieldKind::Gradient { potential: Potential::Random { seed: 4, amplitude: 0.5 } },
            gamma: FieldKind::Gradient { potential: Potential::Sinusoid { amplitude: 0.3, modes: vec![1.0, 0.0] } },
            kind: DensityKind::KleinGordon,
            mode: DerivativeMode::Exponential,
            modes: vec![1.0, 0.0],
            anchors: vec![vec![0, 0], vec![2, 3], vec![5, 5], vec![1, 4], vec![3, 0]],
        }
    }
}

impl ExperimentConfig {
    /// Reads and validates the configuration for `experiments`.
    pub fn load(path: &Path, experiments: &[Experiment]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        cfg.validate(experiments)?;
        Ok(cfg)
    }

    pub fn transport_lattice(&self) -> &LatticeSpec {
        self.transport.lattice.as_ref().unwrap_or(&self.lattice)
    }

    pub fn integrability_lattice(&self) -> &LatticeSpec {
        self.integrability.lattice.as_ref().unwrap_or(&self.lattice)
    }

    pub fn action_lattice(&self) -> &LatticeSpec {
        self.action.lattice.as_ref().unwrap_or(&self.lattice)
    }

    pub fn integrability_endpoints(&self) -> (Site, Site) {
        let spec = self.integrability_lattice();
        let from = self.integrability.from.as_deref().map(Site::new).unwrap_or_else(Site::origin);
        let to = match &self.integrability.to {
            Some(c) => Site::new(c),
            None => Site::new(&spec.extents().iter().map(|e| e - 1).collect::<Vec<_>>()),
        };
        (from, to)
    }

    pub fn action_anchors(&self) -> Vec<Site> {
        self.action.anchors.iter().map(|c| Site::new(c)).collect()
    }

    /// Checks the root and the sections `experiments` read, generating each
    /// configured field once, so that no experiment starts on a bad
    /// configuration.
    pub fn validate(&self, experiments: &[Experiment]) -> Result<(), ConfigError> {
        self.validate_root()?;
        for e in experiments {
            match e {
                Experiment::Axioms => self.validate_axioms()?,
                Experiment::Transport => self.validate_transport()?,
                Experiment::Integrability => self.validate_integrability()?,
                Experiment::DerivativeConvergence => self.validate_derivative()?,
                Experiment::Hilbert => self.validate_hilbert()?,
                Experiment::GaugeAbelian | Experiment::GaugeSu2 => self.validate_gauge()?,
                Experiment::Action => {
                    self.validate_gauge()?;
                    self.validate_action()?
                }
            }
        }
        Ok(())
    }

    fn validate_root(&self) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(invalid("root", "name must not be empty"));
        }
        let t = &self.tolerances;
        let all = [
            t.axiom, t.analytic, t.link_loop, t.integrability, t.path_spread, t.nonintegrable_spread,
            t.min_slope, t.covariance_exact, t.global_covariance, t.field_strength, t.unitarity, t.series,
            t.hilbert, t.anchor, t.collapse, t.identity_component,
        ];
        if !all.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(invalid("tolerances", "tolerances must be finite and non-negative"));
        }
        Ok(())
    }

    fn validate_axioms(&self) -> Result<(), ConfigError> {
        let a = &self.axioms;
        if a.scales.is_empty() {
            return Err(invalid("axioms", "scales must not be empty"));
        }
        for &r in &a.scales {
            ScaleFactor::new(r).map_err(|e| invalid("axioms", e.to_string()))?;
        }
        if a.samples == 0 || a.max_degree == 0 {
            return Err(invalid("axioms", "samples and max-degree must be positive"));
        }
        Ok(())
    }

    fn validate_transport(&self) -> Result<(), ConfigError> {
        let tr = &self.transport;
        RealGaugeField::generate(self.transport_lattice(), &tr.field).map_err(|e| invalid("transport", e.to_string()))?;
        if tr.walk_length == 0 && tr.walks > 0 {
            return Err(invalid("transport", "walk-length must be positive"));
        }
        Ok(())
    }

    fn validate_integrability(&self) -> Result<(), ConfigError> {
        let spec = self.integrability_lattice();
        RealGaugeField::generate(spec, &self.integrability.field)
            .map_err(|e| invalid("integrability", e.to_string()))?;
        let (from, to) = self.integrability_endpoints();
        for (label, site) in [("from", &from), ("to", &to)] {
            if !spec.contains(site) {
                return Err(invalid("integrability", format!("{label} site {:?} is outside the lattice", site.coords())));
            }
        }
        spec.staircase_paths(&from, &to, self.integrability.path_limit)
            .map_err(|e| invalid("integrability", e.to_string()))?;
        Ok(())
    }

    fn validate_derivative(&self) -> Result<(), ConfigError> {
        let d = &self.derivative;
        check_series("derivative", d.dims, d.box_length, &d.deltas)?;
        for (n, _) in series_lattices(d.dims, d.box_length, &d.deltas).map_err(|e| invalid("derivative", e))? {
            let spec = LatticeSpec::new(&vec![n; d.dims], d.box_length / n as f64, Boundary::Periodic)
                .map_err(|e| invalid("derivative", e.to_string()))?;
            ComplexLatticeField::fixture(&spec, &d.fixture).map_err(|e| invalid("derivative", e.to_string()))?;
            RealGaugeField::generate(&spec, &d.field).map_err(|e| invalid("derivative", e.to_string()))?;
        }
        Ok(())
    }

    fn validate_hilbert(&self) -> Result<(), ConfigError> {
        let h = &self.hilbert;
        if h.samples == 0 || h.dim == 0 {
            return Err(invalid("hilbert", "samples and dim must be positive"));
        }
        let [lo, hi] = h.scale_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(invalid("hilbert", "scale-range must satisfy 0 < lo <= hi"));
        }
        Ok(())
    }

    fn validate_gauge(&self) -> Result<(), ConfigError> {
        let g = &self.gauge;
        check_series("gauge", 2, g.box_length, &g.deltas)?;
        series_lattices(2, g.box_length, &g.deltas).map_err(|e| invalid("gauge", e))?;
        if g.g_i == 0.0 || g.g == 0.0 {
            return Err(invalid("gauge", "g-i and g must be nonzero"));
        }
        let couplings = [g.g_r, g.g_i, g.g, g.mass, g.lambda, g.transform_amplitude];
        if !couplings.iter().all(|v| v.is_finite()) {
            return Err(invalid("gauge", "couplings must be finite"));
        }
        Ok(())
    }

    fn validate_action(&self) -> Result<(), ConfigError> {
        let ac = &self.action;
        let spec = self.action_lattice();
        if spec.boundary() != Boundary::Periodic {
            return Err(invalid("action", "the action lattice must be periodic"));
        }
        RealGaugeField::generate(spec, &ac.field).map_err(|e| invalid("action", e.to_string()))?;
        RealGaugeField::generate(spec, &ac.gamma).map_err(|e| invalid("action", e.to_string()))?;
        if ac.modes.len() != spec.dims() {
            return Err(invalid("action", format!("modes needs {} entries", spec.dims())));
        }
        if ac.kind == DensityKind::Dirac && spec.dims() > 4 {
            return Err(invalid("action", "dirac densities need at most 4 dimensions"));
        }
        if ac.anchors.is_empty() {
            return Err(invalid("action", "at least one anchor is required"));
        }
        for site in self.action_anchors() {
            if !spec.contains(&site) {
                return Err(invalid("action", format!("anchor {:?} is outside the lattice", site.coords())));
            }
        }
        Ok(())
    }
}

fn check_series(section: &'static str, dims: usize, box_length: f64, deltas: &[f64]) -> Result<(), ConfigError> {
    if dims == 0 || dims > scaledgauge_core::lattice::MAX_DIMS {
        return Err(invalid(section, "dims must be between 1 and 4"));
    }
    if !(box_length > 0.0 && box_length.is_finite()) {
        return Err(invalid(section, "box-length must be positive"));
    }
    if deltas.len() < 2 {
        return Err(invalid(section, "a convergence series needs at least two spacings"));
    }
    Ok(())
}

/// Sites per axis for each spacing of a series over a fixed box. Each
/// spacing must divide the box into a whole number of cells.
pub fn series_lattices(dims: usize, box_length: f64, deltas: &[f64]) -> Result<Vec<(usize, f64)>, String> {
    deltas
        .iter()
        .map(|&dx| {
            if !(dx > 0.0 && dx.is_finite()) {
                return Err(format!("spacing {dx} must be positive"));
            }
            let n = (box_length / dx).round();
            if n < 2.0 || (n * dx - box_length).abs() > 1e-9 * box_length {
                return Err(format!("spacing {dx} does not divide box length {box_length}"));
            }
            let n = n as usize;
            if n.checked_pow(dims as u32).is_none_or(|s| s > scaledgauge_core::lattice::DEFAULT_MAX_SITES) {
                return Err(format!("spacing {dx} gives too many sites"));
            }
            Ok((n, dx))
        })
        .collect()
}
