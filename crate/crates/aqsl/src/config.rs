//! Experiment configuration: a flat key=value file with command-line
//! overrides. Flags win over file values, defaults fill the rest.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::states::BellDiagonalParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Unreadable(String),
    #[error("malformed config line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {value:?}")]
    InvalidValue { key: String, value: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Time,
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Decay,
    Creation,
    Both,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub initial_c: (f64, f64, f64),
    pub big_gamma: f64,
    pub gamma: f64,
    pub t_max: f64,
    pub steps: usize,
    pub sweep: SweepKind,
    pub coupling_range: (f64, f64, usize),
    pub mode: ModeChoice,
    pub seed: u64,
    pub out_path: String,
    pub emit_svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            initial_c: (1.0, 1.0, -1.0),
            big_gamma: 1.0,
            gamma: 1.0,
            t_max: 5.0,
            steps: 200,
            sweep: SweepKind::Time,
            coupling_range: (0.2, 5.0, 20),
            mode: ModeChoice::Decay,
            seed: 7,
            out_path: "out.csv".to_string(),
            emit_svg: false,
        }
    }
}

/// Optional command-line overrides; `None` keeps the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub big_gamma: Option<f64>,
    pub gamma: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub sweep: Option<SweepKind>,
    pub coupling_lo: Option<f64>,
    pub coupling_hi: Option<f64>,
    pub coupling_n: Option<usize>,
    pub mode: Option<ModeChoice>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub svg: bool,
}

fn parse_sweep(v: &str) -> Result<SweepKind, ConfigError> {
    match v {
        "time" => Ok(SweepKind::Time),
        "coupling" => Ok(SweepKind::Coupling),
        _ => Err(ConfigError::InvalidValue { key: "sweep".into(), value: v.into() }),
    }
}

fn parse_mode(v: &str) -> Result<ModeChoice, ConfigError> {
    match v {
        "decay" => Ok(ModeChoice::Decay),
        "creation" => Ok(ModeChoice::Creation),
        "both" => Ok(ModeChoice::Both),
        _ => Err(ConfigError::InvalidValue { key: "mode".into(), value: v.into() }),
    }
}

impl ExperimentConfig {
    /// Resolve defaults <- config file <- CLI overrides, then validate.
    pub fn resolve(config_path: Option<&Path>, ov: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Unreadable(format!("{}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply_overrides(ov);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut kv = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::MalformedLine {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        for (k, v) in kv {
            let bad = || ConfigError::InvalidValue { key: k.clone(), value: v.clone() };
            match k.as_str() {
                "c1" => self.initial_c.0 = v.parse().map_err(|_| bad())?,
                "c2" => self.initial_c.1 = v.parse().map_err(|_| bad())?,
                "c3" => self.initial_c.2 = v.parse().map_err(|_| bad())?,
                "big_gamma" => self.big_gamma = v.parse().map_err(|_| bad())?,
                "gamma" => self.gamma = v.parse().map_err(|_| bad())?,
                "t_max" => self.t_max = v.parse().map_err(|_| bad())?,
                "steps" => self.steps = v.parse().map_err(|_| bad())?,
                "sweep" => self.sweep = parse_sweep(&v)?,
                "coupling_lo" => self.coupling_range.0 = v.parse().map_err(|_| bad())?,
                "coupling_hi" => self.coupling_range.1 = v.parse().map_err(|_| bad())?,
                "coupling_n" => self.coupling_range.2 = v.parse().map_err(|_| bad())?,
                "mode" => self.mode = parse_mode(&v)?,
                "seed" => self.seed = v.parse().map_err(|_| bad())?,
                "out" => self.out_path = v.clone(),
                "svg" => {
                    self.emit_svg = match v.as_str() {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        _ => {
                            return Err(ConfigError::InvalidValue {
                                key: k.clone(),
                                value: v.clone(),
                            })
                        }
                    }
                }
                _ => return Err(ConfigError::UnknownKey(k.clone())),
            }
        }
        Ok(())
    }

    fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(v) = ov.c1 {
            self.initial_c.0 = v;
        }
        if let Some(v) = ov.c2 {
            self.initial_c.1 = v;
        }
        if let Some(v) = ov.c3 {
            self.initial_c.2 = v;
        }
        if let Some(v) = ov.big_gamma {
            self.big_gamma = v;
        }
        if let Some(v) = ov.gamma {
            self.gamma = v;
        }
        if let Some(v) = ov.t_max {
            self.t_max = v;
        }
        if let Some(v) = ov.steps {
            self.steps = v;
        }
        if let Some(v) = ov.sweep {
            self.sweep = v;
        }
        if let Some(v) = ov.coupling_lo {
            self.coupling_range.0 = v;
        }
        if let Some(v) = ov.coupling_hi {
            self.coupling_range.1 = v;
        }
        if let Some(v) = ov.coupling_n {
            self.coupling_range.2 = v;
        }
        if let Some(v) = ov.mode {
            self.mode = v;
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = &ov.out {
            self.out_path = v.clone();
        }
        if ov.svg {
            self.emit_svg = true;
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.steps < 2 {
            return Err(ConfigError::Invalid(format!("steps must be >= 2, got {}", self.steps)));
        }
        if self.t_max.is_nan() || self.t_max <= 0.0 {
            return Err(ConfigError::Invalid(format!("t_max must be > 0, got {}", self.t_max)));
        }
        let (lo, hi, n) = self.coupling_range;
        if lo.is_nan() || hi.is_nan() || lo >= hi || n < 2 {
            return Err(ConfigError::Invalid(format!(
                "coupling range needs lo < hi and n >= 2, got ({lo}, {hi}, {n})"
            )));
        }
        if !(self.big_gamma > 0.0 && self.gamma > 0.0) {
            return Err(ConfigError::Invalid("Gamma and gamma must be positive".into()));
        }
        let (c1, c2, c3) = self.initial_c;
        BellDiagonalParams::new(c1, c2, c3)
            .map_err(|e| ConfigError::Invalid(format!("initial_c: {e}")))?;
        Ok(())
    }

    pub fn bell_params(&self) -> BellDiagonalParams {
        let (c1, c2, c3) = self.initial_c;
        BellDiagonalParams::new(c1, c2, c3).expect("validated at resolve time")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::resolve(None, &Overrides::default()).unwrap();
        assert_eq!(cfg.steps, 200);
        assert_eq!(cfg.initial_c, (1.0, 1.0, -1.0));
    }

    #[test]
    fn file_then_override_precedence() {
        let dir = std::env::temp_dir();
        let path = dir.join("aqsl_cfg_test.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment\nc1=0.8\nc2=0.8\nc3=-0.6\nbig_gamma=2.5\nsweep=coupling").unwrap();
        let ov = Overrides { big_gamma: Some(3.0), ..Default::default() };
        let cfg = ExperimentConfig::resolve(Some(&path), &ov).unwrap();
        assert_eq!(cfg.initial_c.0, 0.8);
        assert_eq!(cfg.initial_c.2, -0.6);
        assert_eq!(cfg.big_gamma, 3.0); // flag wins
        assert_eq!(cfg.sweep, SweepKind::Coupling);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn rejects_unknown_key_and_bad_state() {
        let dir = std::env::temp_dir();
        let path = dir.join("aqsl_cfg_bad.conf");
        std::fs::write(&path, "nope=1\n").unwrap();
        assert!(matches!(
            ExperimentConfig::resolve(Some(&path), &Overrides::default()),
            Err(ConfigError::UnknownKey(_))
        ));
        std::fs::remove_file(path).ok();

        let ov = Overrides { c1: Some(1.0), c2: Some(1.0), c3: Some(1.0), ..Default::default() };
        assert!(ExperimentConfig::resolve(None, &ov).is_err());
    }

    #[test]
    fn rejects_bad_steps() {
        let ov = Overrides { steps: Some(1), ..Default::default() };
        assert!(ExperimentConfig::resolve(None, &ov).is_err());
    }
}
