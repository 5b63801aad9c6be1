use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{BaseProfile, DictionarySpec, LimitSettings, QuadratureSettings};
use crate::error::{Error, Result};
use crate::warp::{CommutantSweep, Mollifier, WarpSettings};

/// Truncation of the two chiral factors; both use the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Mode spacing `Δ`.
    pub spacing: f64,
    pub modes: usize,
    pub per_mode_cap: u8,
    pub energy_cap: Option<f64>,
    pub max_dim: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            spacing: 1.0,
            modes: 3,
            per_mode_cap: 2,
            energy_cap: Some(4.0),
            max_dim: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub profile: BaseProfile,
    pub kernel_exponent: f64,
    pub schedule_t: Vec<f64>,
    pub quadrature_order: usize,
    pub quadrature_target: f64,
    pub max_nodes: usize,
    pub floor: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        let l = LimitSettings::default();
        KernelConfig {
            profile: l.profile,
            kernel_exponent: l.kernel_exponent,
            schedule_t: l.schedule,
            quadrature_order: l.quadrature.order,
            quadrature_target: l.quadrature.target,
            max_nodes: l.quadrature.max_nodes,
            floor: l.floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeformationConfig {
    pub kappa: Vec<f64>,
    pub mollifier: Mollifier,
    pub reg_epsilon: Vec<f64>,
    pub order: usize,
    pub panels: usize,
    pub half_width: f64,
    pub max_nodes: usize,
    pub extrapolation_tolerance: f64,
    pub path_tolerance: f64,
}

impl Default for DeformationConfig {
    fn default() -> Self {
        let w = WarpSettings::default();
        DeformationConfig {
            kappa: vec![0.25, 0.5, 1.0],
            mollifier: Mollifier::ProductGaussian,
            reg_epsilon: w.reg_epsilon,
            order: w.order,
            panels: w.panels,
            half_width: w.half_width,
            max_nodes: w.max_nodes,
            extrapolation_tolerance: w.extrapolation_tolerance,
            path_tolerance: 1e-6,
        }
    }
}

/// Sweep over `per_mode_cap` for the deformed commutant residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutantConfig {
    /// Trend asserted non-increasing.
    pub kappa: Vec<f64>,
    /// Trend reported only.
    pub diagnostic_kappa: Vec<f64>,
    pub caps: Vec<u8>,
    pub modes: usize,
    pub energy_cap: Option<f64>,
    pub centers: Vec<f64>,
    pub width: f64,
}

impl Default for CommutantConfig {
    fn default() -> Self {
        let s = CommutantSweep::default();
        CommutantConfig {
            kappa: vec![0.0, 0.1, 0.25],
            diagnostic_kappa: vec![0.5],
            caps: s.caps,
            modes: s.modes,
            energy_cap: s.energy_cap,
            centers: s.centers,
            width: s.width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub ergodic_final: f64,
    pub ergodic_ratio: f64,
    pub factorization: f64,
    pub clustering: f64,
    pub s_identity: f64,
    pub isometry: f64,
    pub warp_oracle: f64,
    pub mollifier_swap: f64,
    pub phase: f64,
    pub spot: f64,
    pub phase_gap: f64,
    pub undeformed_collapse: f64,
    pub modular: f64,
    pub intertwiner_unitarity: f64,
    pub intertwiner_covariance: f64,
    pub structural: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            ergodic_final: 1e-3,
            ergodic_ratio: 0.2,
            factorization: 1e-3,
            clustering: 1e-6,
            s_identity: 1e-6,
            isometry: 1e-8,
            warp_oracle: 1e-4,
            mollifier_swap: 1e-5,
            phase: 1e-4,
            spot: 1e-4,
            phase_gap: 0.5,
            undeformed_collapse: 1e-6,
            modular: 1e-10,
            intertwiner_unitarity: 1e-12,
            intertwiner_covariance: 1e-10,
            structural: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub factorization: usize,
    pub clustering: usize,
    pub translations: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            factorization: 10,
            clustering: 20,
            translations: 5,
        }
    }
}

/// Everything a run depends on. Missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub kernel: KernelConfig,
    pub deformation: DeformationConfig,
    pub commutant: CommutantConfig,
    pub dictionary: DictionarySpec,
    pub tolerances: ToleranceConfig,
    pub samples: SampleConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: LimitSettings::default().seed,
            model: ModelConfig::default(),
            kernel: KernelConfig::default(),
            deformation: DeformationConfig::default(),
            commutant: CommutantConfig::default(),
            dictionary: DictionarySpec::default(),
            tolerances: ToleranceConfig::default(),
            samples: SampleConfig::default(),
        }
    }
}

fn config_error(path: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(config_error(path, format!("must be positive, got {x}")))
    }
}

fn nonempty<T>(path: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(config_error(path, "must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| config_error("<file>", e.message().trim().to_string()))?;
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(
                if path == "." { "<file>" } else { &path },
                e.into_inner().message().trim().to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        positive("model.spacing", m.spacing)?;
        if m.modes == 0 {
            return Err(config_error("model.modes", "must be at least 1"));
        }
        if m.per_mode_cap == 0 {
            return Err(config_error("model.per_mode_cap", "must be at least 1"));
        }
        if let Some(e) = m.energy_cap {
            positive("model.energy_cap", e)?;
        }

        let k = &self.kernel;
        if !(k.kernel_exponent > 0.0 && k.kernel_exponent < 1.0) {
            return Err(config_error(
                "kernel.kernel_exponent",
                format!("must lie in (0, 1), got {}", k.kernel_exponent),
            ));
        }
        nonempty("kernel.schedule_t", &k.schedule_t)?;
        if k.schedule_t[0] <= 0.0 || k.schedule_t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_error(
                "kernel.schedule_t",
                "must be positive and strictly increasing",
            ));
        }
        positive("kernel.quadrature_target", k.quadrature_target)?;
        positive("kernel.floor", k.floor)?;
        if k.quadrature_order == 0 {
            return Err(config_error(
                "kernel.quadrature_order",
                "must be at least 1",
            ));
        }

        let d = &self.deformation;
        nonempty("deformation.kappa", &d.kappa)?;
        if let Some(x) = d.kappa.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(config_error(
                "deformation.kappa",
                format!("must be non-negative, got {x}"),
            ));
        }
        positive(
            "deformation.extrapolation_tolerance",
            d.extrapolation_tolerance,
        )?;
        positive("deformation.path_tolerance", d.path_tolerance)?;
        positive("deformation.half_width", d.half_width)?;
        self.warp_settings().validate().map_err(|e| match e {
            Error::InvalidParameter { field, reason } => config_error(&field, reason),
            other => other,
        })?;

        let c = &self.commutant;
        nonempty("commutant.caps", &c.caps)?;
        nonempty("commutant.centers", &c.centers)?;
        positive("commutant.width", c.width)?;
        for x in c.kappa.iter().chain(&c.diagnostic_kappa) {
            if !(*x >= 0.0) {
                return Err(config_error(
                    "commutant.kappa",
                    format!("must be non-negative, got {x}"),
                ));
            }
        }

        nonempty("dictionary.word_centers", &self.dictionary.word_centers)?;
        positive("dictionary.word_width", self.dictionary.word_width)?;
        positive(
            "dictionary.spectator_width",
            self.dictionary.spectator_width,
        )?;

        let t = &self.tolerances;
        for (name, v) in [
            ("ergodic_final", t.ergodic_final),
            ("ergodic_ratio", t.ergodic_ratio),
            ("factorization", t.factorization),
            ("clustering", t.clustering),
            ("s_identity", t.s_identity),
            ("isometry", t.isometry),
            ("warp_oracle", t.warp_oracle),
            ("mollifier_swap", t.mollifier_swap),
            ("phase", t.phase),
            ("spot", t.spot),
            ("phase_gap", t.phase_gap),
            ("undeformed_collapse", t.undeformed_collapse),
            ("modular", t.modular),
            ("intertwiner_unitarity", t.intertwiner_unitarity),
            ("intertwiner_covariance", t.intertwiner_covariance),
            ("structural", t.structural),
        ] {
            positive(&format!("tolerances.{name}"), v)?;
        }
        Ok(())
    }

    pub fn limit_settings(&self) -> LimitSettings {
        let k = &self.kernel;
        LimitSettings {
            profile: k.profile,
            kernel_exponent: k.kernel_exponent,
            schedule: k.schedule_t.clone(),
            quadrature: QuadratureSettings {
                order: k.quadrature_order,
                target: k.quadrature_target,
                max_nodes: k.max_nodes,
            },
            floor: k.floor,
            seed: self.seed,
        }
    }

    pub fn warp_settings(&self) -> WarpSettings {
        let d = &self.deformation;
        WarpSettings {
            reg_epsilon: d.reg_epsilon.clone(),
            order: d.order,
            panels: d.panels,
            half_width: d.half_width,
            max_nodes: d.max_nodes,
            extrapolation_tolerance: d.extrapolation_tolerance,
        }
    }

    pub fn commutant_sweep(&self) -> CommutantSweep {
        let c = &self.commutant;
        CommutantSweep {
            spacing: self.model.spacing,
            modes: c.modes,
            energy_cap: c.energy_cap,
            caps: c.caps.clone(),
            centers: c.centers.clone(),
            width: c.width,
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

/// Command-line overrides, applied before validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kappa: Option<f64>,
    pub schedule_t: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(k) = self.kappa {
            cfg.deformation.kappa = vec![k];
        }
        if let Some(s) = &self.schedule_t {
            cfg.kernel.schedule_t = s.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()
    }
}

/// `"8,16,32"` → `[8, 16, 32]`.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| config_error("kernel.schedule_t", format!("`{s}`: {e}")))
        })
        .collect()
}
