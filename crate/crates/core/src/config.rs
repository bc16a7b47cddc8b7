//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Absent keys take their defaults.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::ConfigError;
use crate::mechanisms::{MechanismParams, MechanismSchedule, ScheduleMode};
use crate::netgen::GenParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub gen: GenParams,
    pub mechanisms: MechanismParams,
    pub schedule: MechanismSchedule,
    pub replications: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            gen: GenParams::default(),
            mechanisms: MechanismParams::default(),
            schedule: MechanismSchedule::default(),
            replications: 100,
            base_seed: 1,
            output_dir: PathBuf::from("results"),
        }
    }
}

/// Every recognised key with its default and a short description, in file
/// order.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("n", "1000", "total node count"),
    (
        "m",
        "3",
        "base ties brought by each new node (preferential attachment)",
    ),
    (
        "p_close",
        "0.67",
        "probability a base tie becomes a close tie (about 4 close friends per person at m = 3)",
    ),
    (
        "p_mutual",
        "0.5",
        "probability a close tie is mutual rather than one-way",
    ),
    (
        "contagion_weight",
        "0.05",
        "contagion pull toward a named friend, in (0, 0.5]; doubled on mutual ties",
    ),
    (
        "homophily_threshold",
        "0.8",
        "attitude at or above which a node counts as strong, in (0, 1)",
    ),
    (
        "confounding_weight",
        "1",
        "pull toward the shared external stimulus, in (0, 1]",
    ),
    (
        "mode",
        "PureContagion",
        "PureContagion | PureHomophily | PureConfounding | Mixed",
    ),
    (
        "mix_contagion",
        "1/3",
        "Mixed mode: per-iteration probability of a contagion step",
    ),
    (
        "mix_homophily",
        "1/3",
        "Mixed mode: per-iteration probability of a homophily step",
    ),
    (
        "mix_confounding",
        "1/3",
        "Mixed mode: per-iteration probability of a confounding step",
    ),
    ("iterations", "50000", "mechanism steps per replication"),
    (
        "snapshot_every",
        "500",
        "iterations between correlation snapshots",
    ),
    (
        "replications",
        "100",
        "independent runs; replication r uses seed base_seed + r",
    ),
    ("base_seed", "1", "seed of replication 0"),
    ("output_dir", "results", "directory for result tables"),
];

impl SimulationConfig {
    /// Seed used by replication `r`.
    pub fn replication_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gen.validate().map_err(|e| match e {
            crate::error::GenError::InvalidParam { field, reason } => validation(field, reason),
            other => validation("n", other.to_string()),
        })?;
        self.mechanisms
            .validate()
            .and_then(|_| self.schedule.validate())
            .map_err(|e| match e {
                crate::error::SimError::InvalidParam { field, reason } => validation(field, reason),
            })?;
        if self.replications == 0 {
            return Err(validation("replications", "must be positive"));
        }
        Ok(())
    }

    /// Assigns one key from its textual value. `mix_*` keys require a Mixed
    /// schedule.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "n" => self.gen.n = parse(key, v)?,
            "m" => self.gen.m = parse(key, v)?,
            "p_close" => self.gen.p_close = parse(key, v)?,
            "p_mutual" => self.gen.p_mutual = parse(key, v)?,
            "contagion_weight" => self.mechanisms.contagion_weight = parse(key, v)?,
            "homophily_threshold" => self.mechanisms.homophily_threshold = parse(key, v)?,
            "confounding_weight" => self.mechanisms.confounding_weight = parse(key, v)?,
            "mode" => {
                let mode: ScheduleMode = v.parse().map_err(|e| validation("mode", e))?;
                self.schedule.mode = match (mode, self.schedule.mode) {
                    (ScheduleMode::Mixed { .. }, old @ ScheduleMode::Mixed { .. }) => old,
                    (new, _) => new,
                };
            }
            "mix_contagion" | "mix_homophily" | "mix_confounding" => {
                let p: f64 = parse(key, v)?;
                let ScheduleMode::Mixed {
                    contagion,
                    homophily,
                    confounding,
                } = &mut self.schedule.mode
                else {
                    return Err(validation(key, "only valid with mode = Mixed"));
                };
                match key {
                    "mix_contagion" => *contagion = p,
                    "mix_homophily" => *homophily = p,
                    _ => *confounding = p,
                }
            }
            "iterations" => self.schedule.iterations = parse(key, v)?,
            "snapshot_every" => self.schedule.snapshot_every = parse(key, v)?,
            "replications" => self.replications = parse(key, v)?,
            "base_seed" => self.base_seed = parse(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    fn mix(&self) -> (f64, f64, f64) {
        match self.schedule.mode {
            ScheduleMode::Mixed {
                contagion,
                homophily,
                confounding,
            } => (contagion, homophily, confounding),
            _ => (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        }
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = SimulationConfig::default();
        let mut mixed_keys = Vec::new();
        let mut mode_line = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("expected `key = value`, found `{line}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    path: origin.to_string(),
                    line: i + 1,
                    message: "missing key before `=`".into(),
                });
            }
            if key.starts_with("mix_") {
                mixed_keys.push((key.to_string(), value.to_string()));
            } else if key == "mode" {
                mode_line = Some(value.to_string());
            } else {
                cfg.set(key, value)?;
            }
        }
        // Mode first so that mix_* keys refine a Mixed schedule regardless of
        // their position in the file.
        if let Some(mode) = mode_line {
            cfg.set("mode", &mode)?;
        }
        for (key, value) in mixed_keys {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let (c, h, f) = self.mix();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("n", self.gen.n.to_string());
        kv("m", self.gen.m.to_string());
        kv("p_close", self.gen.p_close.to_string());
        kv("p_mutual", self.gen.p_mutual.to_string());
        kv(
            "contagion_weight",
            self.mechanisms.contagion_weight.to_string(),
        );
        kv(
            "homophily_threshold",
            self.mechanisms.homophily_threshold.to_string(),
        );
        kv(
            "confounding_weight",
            self.mechanisms.confounding_weight.to_string(),
        );
        kv("mode", self.schedule.mode.name().to_string());
        if matches!(self.schedule.mode, ScheduleMode::Mixed { .. }) {
            kv("mix_contagion", c.to_string());
            kv("mix_homophily", h.to_string());
            kv("mix_confounding", f.to_string());
        }
        kv("iterations", self.schedule.iterations.to_string());
        kv("snapshot_every", self.schedule.snapshot_every.to_string());
        kv("replications", self.replications.to_string());
        kv("base_seed", self.base_seed.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        out
    }
}

pub fn load_config(path: &Path) -> Result<SimulationConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SimulationConfig::parse_str(&text, &path.display().to_string())
}

pub fn save_config(config: &SimulationConfig, path: &Path) -> Result<(), ConfigError> {
    fs::write(path, config.to_text()).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn validation(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| validation(key, format!("cannot parse `{value}`: {e}")))
}
