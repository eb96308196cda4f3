//! Scenario configuration (TOML).

use std::path::Path;
use std::sync::Arc;

use ampqed::grid::SpatialGrid;
use ampqed::media::{Layer, MediumModel, Oscillator};
use ampqed::poles::{Region, ScanOptions};
use ampqed::units::Constants;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ConfigError;

/// Suites in dependency order.
pub const SUITES: [&str; 7] = [
    "validate-kernel",
    "spectrum",
    "pole-scan",
    "green-identities",
    "commutator",
    "correlations",
    "compare-naive",
];

/// Suites that consume the retarded Green function and so refuse to run
/// after a failed pole scan.
pub const NEEDS_ANALYTICITY: [&str; 4] = [
    "green-identities",
    "commutator",
    "correlations",
    "compare-naive",
];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Seed for the randomized checks in the `spectrum` suite.
    #[serde(default)]
    pub seed: u64,
    pub analyses: Vec<String>,
    #[serde(default)]
    pub constants: ConstantsSpec,
    pub grid: GridSpec,
    pub frequencies: FrequencySpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub pole_scan: PoleScanSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub layers: Vec<LayerSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Natural,
    Si,
}

/// Unit system plus optional overrides of individual constants.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default)]
    pub units: UnitSystem,
    pub c: Option<f64>,
    pub eps0: Option<f64>,
    pub mu0: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    /// Real sample frequencies are `count` points evenly spaced on
    /// `[min, max]`.
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Cutoff of the frequency integrals in units of the highest resonance.
    #[serde(default = "default_cutoff_factor")]
    pub cutoff_factor: f64,
    /// Panels per linewidth near each resonance.
    #[serde(default = "default_per_width")]
    pub per_width: usize,
}

fn default_cutoff_factor() -> f64 {
    40.0
}

fn default_per_width() -> usize {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Channel cutoff relative to `max|σ_α|`.
    pub eps_reg: f64,
    /// Operator identities (spectral, covariance, two-route checks).
    pub identity: f64,
    pub integral_relation: f64,
    pub commutator: f64,
    /// Adaptive quadrature target for the commutator integral.
    pub quadrature: f64,
    pub kramers_kronig: f64,
    pub schwarz: f64,
    pub regularizer: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_reg: 1e-12,
            identity: 1e-10,
            integral_relation: 1e-9,
            commutator: 0.02,
            quadrature: 1e-6,
            kramers_kronig: 1e-3,
            schwarz: 1e-14,
            regularizer: 1e-6,
        }
    }
}

/// Scan rectangle; omitted bounds fall back to the default region
/// derived from the highest resonance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PoleScanSpec {
    pub re_min: Option<f64>,
    pub re_max: Option<f64>,
    pub im_min: Option<f64>,
    pub im_max: Option<f64>,
    pub n_re: usize,
    pub n_im: usize,
    pub threshold: f64,
}

impl Default for PoleScanSpec {
    fn default() -> Self {
        let d = ScanOptions::default();
        PoleScanSpec {
            re_min: None,
            re_max: None,
            im_min: None,
            im_max: None,
            n_re: d.n_re,
            n_im: d.n_im,
            threshold: d.threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Store the EE spectral density at every sample frequency in the
    /// report (N_ω × N² complex values).
    pub ee_density: bool,
    /// Store the integrated EE correlation.
    pub ee_integrated: bool,
    /// Store the commutator integral.
    pub commutator: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub z_min: f64,
    pub z_max: f64,
    #[serde(default)]
    pub nonlocal_length: f64,
    #[serde(default)]
    pub oscillators: Vec<OscillatorSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub strength: f64,
    pub omega_j: f64,
    pub gamma: f64,
    pub omega_p: f64,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Schema(m));
        for a in &self.analyses {
            if !SUITES.contains(&a.as_str()) {
                return bad(format!(
                    "unknown analysis '{a}' (known: {})",
                    SUITES.join(", ")
                ));
            }
        }
        for (k, a) in self.analyses.iter().enumerate() {
            if self.analyses[..k].contains(a) {
                return bad(format!("analysis '{a}' listed twice"));
            }
        }
        if self.grid.nodes < 16 {
            return bad(format!(
                "grid needs at least 16 nodes, got {}",
                self.grid.nodes
            ));
        }
        let f = &self.frequencies;
        if !(f.min > 0.0
            && f.max >= f.min
            && f.count >= 1
            && f.cutoff_factor > 1.0
            && f.per_width >= 1)
        {
            return bad(
                "frequencies: need 0 < min ≤ max, count ≥ 1, cutoff_factor > 1, per_width ≥ 1"
                    .into(),
            );
        }
        let t = &self.tolerances;
        let tols = [
            t.eps_reg,
            t.identity,
            t.integral_relation,
            t.commutator,
            t.quadrature,
            t.kramers_kronig,
            t.schwarz,
            t.regularizer,
        ];
        if tols.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("all tolerances must be positive".into());
        }
        let p = &self.pole_scan;
        if p.n_re < 2 || p.n_im < 2 || !(p.threshold > 0.0) {
            return bad("pole_scan: need n_re, n_im ≥ 2 and a positive threshold".into());
        }
        let k = self.constants()?;
        if [k.c, k.eps0, k.mu0, k.hbar]
            .iter()
            .any(|x| !(x.is_finite() && *x > 0.0))
        {
            return bad("constants must be positive".into());
        }
        if k.consistency_defect() > 1e-9 {
            return bad("constants must satisfy eps0 * mu0 * c^2 = 1".into());
        }
        let model = self.model()?;
        let grid = self.grid()?;
        model
            .check_grid(&grid)
            .map_err(|e| ConfigError::Schema(e.to_string()))?;
        self.region(&model)?;
        Ok(())
    }

    pub fn constants(&self) -> Result<Constants, ConfigError> {
        let c = &self.constants;
        let base = match c.units {
            UnitSystem::Natural => Constants::NATURAL,
            UnitSystem::Si => Constants::si(),
        };
        Ok(Constants {
            c: c.c.unwrap_or(base.c),
            eps0: c.eps0.unwrap_or(base.eps0),
            mu0: c.mu0.unwrap_or(base.mu0),
            hbar: c.hbar.unwrap_or(base.hbar),
        })
    }

    pub fn grid(&self) -> Result<Arc<SpatialGrid>, ConfigError> {
        SpatialGrid::uniform(self.grid.z_min, self.grid.z_max, self.grid.nodes)
            .map(Arc::new)
            .map_err(|e| ConfigError::Schema(e.to_string()))
    }

    pub fn model(&self) -> Result<MediumModel, ConfigError> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let osc = l
                    .oscillators
                    .iter()
                    .map(|o| Oscillator::new(o.strength, o.omega_j, o.gamma, o.omega_p))
                    .collect::<ampqed::error::Result<Vec<_>>>()?;
                let mut layer = Layer::local(l.z_min, l.z_max, osc);
                layer.nonlocal_length = l.nonlocal_length;
                Ok(layer)
            })
            .collect::<ampqed::error::Result<Vec<_>>>()
            .map_err(|e| ConfigError::Schema(e.to_string()))?;
        MediumModel::new(layers).map_err(|e| ConfigError::Schema(e.to_string()))
    }

    pub fn sample_frequencies(&self) -> Vec<f64> {
        let f = &self.frequencies;
        if f.count == 1 {
            return vec![f.min];
        }
        (0..f.count)
            .map(|k| f.min + (f.max - f.min) * k as f64 / (f.count - 1) as f64)
            .collect()
    }

    /// `ω_top`: highest resonance, or the top sample frequency for vacuum.
    pub fn top_frequency(&self, model: &MediumModel) -> f64 {
        model.top_resonance().unwrap_or(self.frequencies.max)
    }

    pub fn region(&self, model: &MediumModel) -> Result<Region, ConfigError> {
        let top = self.top_frequency(model);
        let p = &self.pole_scan;
        Region::new(
            p.re_min.unwrap_or(0.05 * top),
            p.re_max.unwrap_or(2.0 * top),
            p.im_min.unwrap_or(0.0),
            p.im_max.unwrap_or(0.1 * top),
        )
        .map_err(|e| ConfigError::Schema(e.to_string()))
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            n_re: self.pole_scan.n_re,
            n_im: self.pole_scan.n_im,
            threshold: self.pole_scan.threshold,
            ..ScanOptions::default()
        }
    }

    /// SHA-256 of the canonical JSON form, so formatting and comments in
    /// the TOML source do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
