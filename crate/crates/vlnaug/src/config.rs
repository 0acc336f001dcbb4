//! `key = value` run configuration with `#` comments.
//!
//! The schema is closed: unknown keys, repeated keys and values that fail to
//! parse are errors naming the line. Keys left out take their defaults.
//!
//! | key | default |
//! |-----|---------|
//! | `lambda` | 0.5 |
//! | `beta` | 0.3 |
//! | `n_objects` | 2 |
//! | `num_paths` | 100 |
//! | `seed` | 42 |
//! | `min_hops`, `max_hops` | 4, 7 |
//! | `min_geodesic` | 5.0 |
//! | `max_distance` | 3.5 |
//! | `min_area` | 0.2 |
//! | `blacklist` | floor, ceiling, wall, column, beam, misc, void, unlabeled |
//! | `require_unique` | true |
//! | `fov_half_width`, `fov_elevation_lo`, `fov_elevation_hi` | π/3, −π/6, π/6 |
//! | `success_radius` | 3.0 |
//! | `scene`, `graph`, `paths`, `dataset`, `lexicon` | unset |
//!
//! Input paths are resolved against the configuration file's directory and
//! must exist when the file is loaded.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use vlnaug_core::executor::DEFAULT_SUCCESS_RADIUS;
use vlnaug_core::graph::SamplerConfig;
use vlnaug_core::saliency::SaliencyConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error("line {line}: `{key}` file `{path}` does not exist")]
    MissingFile { line: usize, key: String, path: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSettings {
    pub num_paths: usize,
    pub seed: u64,
    pub constraints: SamplerConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxSettings {
    pub lambda: f64,
    pub beta: f64,
    pub n_objects: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputPaths {
    pub scene: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub paths: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub saliency: SaliencyConfig,
    pub sampler: SamplerSettings,
    pub aux: AuxSettings,
    pub success_radius: f64,
    pub inputs: InputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            saliency: SaliencyConfig::default(),
            sampler: SamplerSettings {
                num_paths: 100,
                seed: 42,
                constraints: SamplerConfig::default(),
            },
            aux: AuxSettings {
                lambda: 0.5,
                beta: 0.3,
                n_objects: 2,
            },
            success_radius: DEFAULT_SUCCESS_RADIUS,
            inputs: InputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !self.saliency.is_valid() {
            return fail("saliency settings out of range");
        }
        if self.sampler.constraints.min_hops > self.sampler.constraints.max_hops {
            return fail("min_hops exceeds max_hops");
        }
        if !(self.aux.lambda >= 0.0 && self.aux.beta >= 0.0) {
            return fail("lambda and beta must be non-negative");
        }
        if self.aux.n_objects == 0 {
            return fail("n_objects must be at least 1");
        }
        if !(self.success_radius > 0.0) {
            return fail("success_radius must be positive");
        }
        Ok(())
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| ConfigError::Value {
        line,
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn finite(line: usize, key: &str, raw: &str, min: Option<f64>) -> Result<f64, ConfigError> {
    let v: f64 = value(line, key, raw)?;
    let bad = |reason: String| ConfigError::Value {
        line,
        key: key.to_string(),
        reason,
    };
    if !v.is_finite() {
        return Err(bad("not a finite number".into()));
    }
    if let Some(m) = min {
        if v < m {
            return Err(bad(format!("must be at least {}", m)));
        }
    }
    Ok(v)
}

/// Parses configuration text. `base_dir` anchors relative input paths; with
/// `None` they are taken as given.
pub fn load_config(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, val) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let key = key.trim();
        let val = val.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());
        let input = |slot: &mut Option<PathBuf>| -> Result<(), ConfigError> {
            let p = match base_dir {
                Some(dir) => dir.join(val),
                None => PathBuf::from(val),
            };
            if !p.exists() {
                return Err(ConfigError::MissingFile {
                    line,
                    key: key.to_string(),
                    path: p.display().to_string(),
                });
            }
            *slot = Some(p);
            Ok(())
        };
        match key {
            "lambda" => cfg.aux.lambda = finite(line, key, val, Some(0.0))?,
            "beta" => cfg.aux.beta = finite(line, key, val, Some(0.0))?,
            "n_objects" => {
                cfg.aux.n_objects = value(line, key, val)?;
                if cfg.aux.n_objects == 0 {
                    return Err(ConfigError::Value {
                        line,
                        key: key.into(),
                        reason: "must be at least 1".into(),
                    });
                }
            }
            "num_paths" => cfg.sampler.num_paths = value(line, key, val)?,
            "seed" => cfg.sampler.seed = value(line, key, val)?,
            "min_hops" => cfg.sampler.constraints.min_hops = value(line, key, val)?,
            "max_hops" => cfg.sampler.constraints.max_hops = value(line, key, val)?,
            "min_geodesic" => cfg.sampler.constraints.min_geodesic = finite(line, key, val, Some(0.0))?,
            "max_distance" => cfg.saliency.max_distance = finite(line, key, val, Some(0.0))?,
            "min_area" => cfg.saliency.min_area = finite(line, key, val, Some(0.0))?,
            "blacklist" => {
                cfg.saliency.blacklist = val
                    .split(',')
                    .map(|s| s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            "require_unique" => cfg.saliency.require_unique = value(line, key, val)?,
            "fov_half_width" => cfg.saliency.fov.half_width = finite(line, key, val, None)?,
            "fov_elevation_lo" => cfg.saliency.fov.elevation_lo = finite(line, key, val, None)?,
            "fov_elevation_hi" => cfg.saliency.fov.elevation_hi = finite(line, key, val, None)?,
            "success_radius" => cfg.success_radius = finite(line, key, val, Some(0.0))?,
            "scene" => input(&mut cfg.inputs.scene)?,
            "graph" => input(&mut cfg.inputs.graph)?,
            "paths" => input(&mut cfg.inputs.paths)?,
            "dataset" => input(&mut cfg.inputs.dataset)?,
            "lexicon" => input(&mut cfg.inputs.lexicon)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    cfg.check()?;
    Ok(cfg)
}
