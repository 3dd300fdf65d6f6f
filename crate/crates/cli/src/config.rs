//! Batch-run configuration. One JSON file plus the seed list fully
//! determines every output byte, so runs can be reproduced bit-identically.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fronttrack_core::tracking::FtParams;
use fronttrack_core::{
    build_compression_profile, build_piecewise_datum, derive_params, mollify, PerturbKind,
    ScenarioParams, StepFunction,
};

/// Numeric mode of a run. This build computes in IEEE double throughout;
/// `extended` is reserved for builds carrying a wider float type and is
/// refused at validation here rather than silently downgraded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

/// Initial profile of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DatumKind {
    /// Two jumps that each split into three exact shocks — the profile
    /// whose slow middle shocks trap the reflection pattern between them.
    #[default]
    TwoJump,
    /// Compressive middle-family ramp profile.
    Compression,
    /// The compression profile smoothed to Lipschitz regularity.
    MollifiedCompression,
    /// Constant background state (zero total variation).
    Constant,
}

/// Optional per-field overrides of the scenario's tracking parameters.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FtOverrides {
    pub delta_rar: Option<f64>,
    pub thresh_simplified: Option<f64>,
    pub t_end: Option<f64>,
    pub max_fronts: Option<usize>,
    pub clip: Option<f64>,
    pub big2_threshold: Option<f64>,
    pub strength_floor: Option<f64>,
}

impl FtOverrides {
    pub fn apply(&self, p: &mut FtParams) {
        if let Some(v) = self.delta_rar {
            p.delta_rar = v;
        }
        if let Some(v) = self.thresh_simplified {
            p.thresh_simplified = v;
        }
        if let Some(v) = self.t_end {
            p.t_end = v;
        }
        if let Some(v) = self.max_fronts {
            p.max_fronts = v;
        }
        if let Some(v) = self.clip {
            p.clip = v;
        }
        if let Some(v) = self.big2_threshold {
            p.big2_threshold = v;
        }
        if let Some(v) = self.strength_floor {
            p.strength_floor = v;
        }
    }
}

/// Seeded perturbation applied to the base datum of every seed in a batch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub kind: PerturbKind,
    /// Size in the kind's norm; must stay below the scenario radius.
    pub budget: f64,
}

fn default_min_generations() -> u32 {
    3
}

fn default_k_cap() -> f64 {
    100.0
}

/// One batch of runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Path to a `scenario.json` written by `fronttrack scenario gen`;
    /// relative paths resolve against the config file's directory.
    /// Exactly one of `scenario` and `eps` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<PathBuf>,
    /// Inline alternative: derive the scenario from `eps` directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default)]
    pub datum: DatumKind,
    #[serde(default)]
    pub ft: FtOverrides,
    pub out_dir: PathBuf,
    /// Seeds, one run directory each; must be distinct.
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default = "default_min_generations")]
    pub min_generations: u32,
    #[serde(default = "default_k_cap")]
    pub k_cap: f64,
    #[serde(default)]
    pub precision: Precision,
}

impl RunConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.scenario, self.eps) {
            (Some(_), Some(_)) => bail!("config gives both a scenario file and eps; pick one"),
            (None, None) => bail!("config gives neither a scenario file nor eps"),
            _ => {}
        }
        if self.seeds.is_empty() {
            bail!("config lists no seeds");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            bail!("seeds must be distinct");
        }
        if let Some(p) = &self.perturbation {
            if !p.budget.is_finite() || p.budget <= 0.0 {
                bail!("perturbation budget must be positive, got {}", p.budget);
            }
        }
        if self.precision == Precision::Extended {
            bail!("this build computes in double precision only");
        }
        if self.min_generations == 0 {
            bail!("min_generations must be at least 1");
        }
        if !(self.k_cap > 0.0) {
            bail!("k_cap must be positive, got {}", self.k_cap);
        }
        Ok(())
    }

    /// Resolves the scenario parameters, either from the referenced file or
    /// from the inline `eps`. A scenario file that disagrees with its own
    /// `eps` (hand-edited derived fields) is rejected: every downstream
    /// output is supposed to be a pure function of `(config, seed)`.
    pub fn scenario_params(&self, config_dir: &Path) -> Result<ScenarioParams> {
        if let Some(rel) = &self.scenario {
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                config_dir.join(rel)
            };
            let text = fs::read_to_string(&path)
                .with_context(|| format!("reading scenario {}", path.display()))?;
            let sp: ScenarioParams = serde_json::from_str(&text)
                .with_context(|| format!("parsing scenario {}", path.display()))?;
            let rederived = derive_params(sp.eps)?;
            if sp != rederived {
                bail!(
                    "scenario {} is inconsistent with eps = {}",
                    path.display(),
                    sp.eps
                );
            }
            Ok(sp)
        } else {
            Ok(derive_params(self.eps.expect("validated"))?)
        }
    }

    /// Tracking parameters: the scenario defaults with this config's
    /// overrides applied on top.
    pub fn ft_params(&self, sp: &ScenarioParams) -> FtParams {
        let mut p = sp.default_ft_params();
        self.ft.apply(&mut p);
        p
    }

    /// Builds the unperturbed base datum.
    pub fn build_datum(&self, sp: &ScenarioParams) -> Result<StepFunction> {
        Ok(build_datum_of_kind(self.datum, sp)?)
    }
}

/// Mesh of the compression ramp and mollification radius, as fractions of
/// the base wave amplitude. Fine enough that the ramp's six merged shocks
/// form well before the reflection pattern starts.
const COMPRESSION_MESH_FRACTION: f64 = 1.0 / 100.0;
const MOLLIFY_RADIUS_FRACTION: f64 = 1.0 / 800.0;

pub fn build_datum_of_kind(
    kind: DatumKind,
    sp: &ScenarioParams,
) -> fronttrack_core::Result<StepFunction> {
    match kind {
        DatumKind::TwoJump => build_piecewise_datum(sp),
        DatumKind::Compression => build_compression_profile(sp, sp.omega * COMPRESSION_MESH_FRACTION),
        DatumKind::MollifiedCompression => {
            let ramp = build_compression_profile(sp, sp.omega * COMPRESSION_MESH_FRACTION)?;
            mollify(&ramp, sp.omega * MOLLIFY_RADIUS_FRACTION, sp)
        }
        DatumKind::Constant => Ok(StepFunction::constant(sp.u_i)),
    }
}
