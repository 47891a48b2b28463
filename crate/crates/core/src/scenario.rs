//! Scenario files: TOML with `[domain]`, `[reaction]`, `[grid]`, `[run]` and an
//! optional `[sweep]` table. Unknown keys are rejected.
//!
//! ```toml
//! [domain]
//! c = 0.0
//! T = 1.0
//! L = { mean = 1.0, sin = [0.1] }   # L(t) = 1 + 0.1 sin(2 pi t / T)
//! A = { cos = [0.0, 0.02] }         # optional, defaults to 0
//!
//! [reaction]
//! r1 = 20.0
//! r2 = 15.0
//! h1_hat = 1.0
//! h2_hat = 1.0
//! g2_hat = 0.5
//!
//! [sweep]
//! "reaction.r2" = [10.0, 15.0, 20.0]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::pde::Grid;
use crate::periodic_fn::PeriodicFunction;
use crate::reaction::ReactionModel;
use crate::simulate::{default_growth_margin, default_seed_amplitude};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    pub reaction: ReactionConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sweep: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default)]
    pub c: f64,
    #[serde(rename = "T", default = "one")]
    pub period: f64,
    /// Reference length; defaults to `L(0)`.
    #[serde(rename = "L0", default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(rename = "L")]
    pub length: HarmonicConfig,
    #[serde(rename = "A", default)]
    pub offset: HarmonicConfig,
}

/// `mean + sum_k cos[k-1] cos(2 pi k t / T) + sin[k-1] sin(2 pi k t / T)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicConfig {
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionConfig {
    pub r1: f64,
    pub r2: f64,
    #[serde(default = "one")]
    pub n: f64,
    pub h1_hat: f64,
    pub h2_hat: f64,
    pub g2_hat: f64,
    #[serde(default)]
    pub g1_hat: f64,
    #[serde(rename = "D1", default = "one")]
    pub d1: f64,
    #[serde(rename = "D2", default = "one")]
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "M", default = "GridConfig::default_m")]
    pub m: usize,
    #[serde(rename = "Nt", default = "GridConfig::default_nt")]
    pub nt: usize,
}

impl GridConfig {
    fn default_m() -> usize {
        100
    }

    fn default_nt() -> usize {
        1000
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            m: Self::default_m(),
            nt: Self::default_nt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "RunConfig::default_periods")]
    pub periods: usize,
    /// Defaults to `1e-4 K2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_amplitude: Option<f64>,
    /// Defaults to `0.02 / T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_margin: Option<f64>,
}

impl RunConfig {
    fn default_periods() -> usize {
        40
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            periods: Self::default_periods(),
            seed_amplitude: None,
            growth_margin: None,
        }
    }
}

/// Keys accepted in `[sweep]`.
pub const SWEEP_KEYS: &[&str] = &[
    "domain.c",
    "domain.T",
    "domain.L0",
    "domain.L.mean",
    "domain.A.mean",
    "reaction.r1",
    "reaction.r2",
    "reaction.n",
    "reaction.h1_hat",
    "reaction.h2_hat",
    "reaction.g2_hat",
    "reaction.g1_hat",
    "reaction.D1",
    "reaction.D2",
    "grid.M",
    "grid.Nt",
    "run.periods",
    "run.seed_amplitude",
    "run.growth_margin",
];

fn as_count(key: &str, value: f64) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::invalid(
            key,
            format!("must be a non-negative integer, got {value}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Sets one of [`SWEEP_KEYS`].
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let (d, r) = (&mut self.domain, &mut self.reaction);
        match key {
            "domain.c" => d.c = value,
            "domain.T" => d.period = value,
            "domain.L0" => d.l0 = Some(value),
            "domain.L.mean" => d.length.mean = value,
            "domain.A.mean" => d.offset.mean = value,
            "reaction.r1" => r.r1 = value,
            "reaction.r2" => r.r2 = value,
            "reaction.n" => r.n = value,
            "reaction.h1_hat" => r.h1_hat = value,
            "reaction.h2_hat" => r.h2_hat = value,
            "reaction.g2_hat" => r.g2_hat = value,
            "reaction.g1_hat" => r.g1_hat = value,
            "reaction.D1" => r.d1 = value,
            "reaction.D2" => r.d2 = value,
            "grid.M" => self.grid.m = as_count(key, value)?,
            "grid.Nt" => self.grid.nt = as_count(key, value)?,
            "run.periods" => self.run.periods = as_count(key, value)?,
            "run.seed_amplitude" => self.run.seed_amplitude = Some(value),
            "run.growth_margin" => self.run.growth_margin = Some(value),
            _ => {
                return Err(Error::Config(format!(
                    "unknown sweep key `{key}`; expected one of {}",
                    SWEEP_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    raw: ScenarioConfig,
    config: ScenarioConfig,
    pub domain: DomainMotion,
    pub model: ReactionModel,
    pub grid: Grid,
    pub periods: usize,
    pub seed_amplitude: f64,
    pub growth_margin: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Assigned values in key order.
    pub parameters: Vec<(String, f64)>,
    pub scenario: Scenario,
}

impl Scenario {
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        let dc = &config.domain;
        let harmonic = |name: &str, h: &HarmonicConfig| {
            PeriodicFunction::new(dc.period, h.mean, h.cos.clone(), h.sin.clone()).map_err(|e| {
                match e {
                    Error::InvalidParameter {
                        name: inner,
                        reason,
                    } => Error::invalid(format!("{name}.{inner}"), reason),
                    other => other,
                }
            })
        };
        if !(dc.period.is_finite() && dc.period > 0.0) {
            return Err(Error::invalid(
                "domain.T",
                format!("must be positive, got {}", dc.period),
            ));
        }
        let domain = DomainMotion::new(
            dc.c,
            harmonic("domain.L", &dc.length)?,
            harmonic("domain.A", &dc.offset)?,
            dc.l0,
        )?;
        let rc = &config.reaction;
        let model = ReactionModel {
            r1: rc.r1,
            r2: rc.r2,
            n: rc.n,
            h1_hat: rc.h1_hat,
            h2_hat: rc.h2_hat,
            g2_hat: rc.g2_hat,
            g1_hat: rc.g1_hat,
            d1: rc.d1,
            d2: rc.d2,
        };
        model.validate()?;
        let grid = Grid::for_domain(&domain, config.grid.m, config.grid.nt)?;
        let run = &config.run;
        if run.periods == 0 {
            return Err(Error::invalid("run.periods", "must be positive"));
        }
        let seed_amplitude = run
            .seed_amplitude
            .unwrap_or_else(|| default_seed_amplitude(&model));
        if !(seed_amplitude.is_finite() && seed_amplitude >= 0.0) {
            return Err(Error::invalid(
                "run.seed_amplitude",
                format!("must be non-negative, got {seed_amplitude}"),
            ));
        }
        let growth_margin = run
            .growth_margin
            .unwrap_or_else(|| default_growth_margin(dc.period));
        if !(growth_margin.is_finite() && growth_margin >= 0.0) {
            return Err(Error::invalid(
                "run.growth_margin",
                format!("must be non-negative, got {growth_margin}"),
            ));
        }
        for key in config.sweep.keys() {
            if !SWEEP_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown sweep key `{key}`; expected one of {}",
                    SWEEP_KEYS.join(", ")
                )));
            }
        }

        let periods = config.run.periods;
        let raw = config.clone();
        let mut config = config;
        config.domain.l0 = Some(domain.reference_length());
        config.run.seed_amplitude = Some(seed_amplitude);
        config.run.growth_margin = Some(growth_margin);
        Ok(Self {
            raw,
            config,
            domain,
            model,
            grid,
            periods,
            seed_amplitude,
            growth_margin,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_config(ScenarioConfig::from_toml(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The configuration with defaults filled in.
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Rebuilds the scenario with some keys replaced. Defaults are re-derived
    /// from the new parameters unless the original file set them.
    pub fn with_overrides(&self, overrides: &[(&str, f64)]) -> Result<Self> {
        let mut config = self.raw.clone();
        for (key, value) in overrides {
            config.set(key, *value)?;
        }
        Self::from_config(config)
    }

    /// Cartesian product of the `[sweep]` table; the last key varies fastest.
    /// Without a sweep table the scenario itself is the single point.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>> {
        let mut base = self.clone();
        base.raw.sweep.clear();
        let axes: Vec<(&String, &Vec<f64>)> = self.config.sweep.iter().collect();
        if axes.iter().any(|(_, v)| v.is_empty()) {
            return Err(Error::Config(
                "sweep axes must list at least one value".into(),
            ));
        }
        let total: usize = axes.iter().map(|(_, v)| v.len()).product();
        let mut points = Vec::with_capacity(total);
        for index in 0..total {
            let mut rem = index;
            let mut parameters = vec![(String::new(), 0.0); axes.len()];
            for (slot, (key, values)) in parameters.iter_mut().zip(&axes).rev() {
                *slot = ((*key).clone(), values[rem % values.len()]);
                rem /= values.len();
            }
            let overrides: Vec<(&str, f64)> =
                parameters.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let scenario = base.with_overrides(&overrides).map_err(|e| {
                Error::Config(format!("sweep point {}: {e}", describe(&parameters)))
            })?;
            points.push(SweepPoint {
                parameters,
                scenario,
            });
        }
        Ok(points)
    }
}

fn describe(parameters: &[(String, f64)]) -> String {
    parameters
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}
