use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::methods::StepSchedule;
use crate::stationarity::DEFAULT_TOL;

/// Largest objective count accepted from a config.
pub const MAX_OBJECTIVES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    StronglyConvex,
    Oblivious,
    Universal,
    UpperAgd,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::StronglyConvex => "strongly-convex",
            ExperimentKind::Oblivious => "oblivious",
            ExperimentKind::Universal => "universal",
            ExperimentKind::UpperAgd => "upper-agd",
        }
    }
}

/// Step schedule for the oblivious experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    /// `"constant"` (every step `1/L`) or `"random"` (uniform in `[0, 1/L]`).
    Named(String),
    Explicit(Vec<f64>),
}

fn default_l() -> f64 {
    1.0
}

fn default_r() -> f64 {
    1.0
}

fn default_m() -> usize {
    2
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// One experiment run, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "R", default = "default_r")]
    pub r: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    /// Target accuracy for the iteration-count check of `upper-agd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// Validated parameters with `mu` and `kappa` reconciled.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub kind: ExperimentKind,
    pub l: f64,
    /// Zero for the convex experiments.
    pub mu: f64,
    pub t: usize,
    pub r: f64,
    pub m: usize,
    pub seed: u64,
    pub tol: f64,
    pub epsilon: Option<f64>,
}

impl Resolved {
    pub fn kappa(&self) -> f64 {
        self.l / self.mu
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.mu > 0.0
    }
}

fn bad(msg: String) -> LabError {
    LabError::Config(msg)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| bad(format!("cannot parse config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// A config with defaults for everything but the experiment and horizon.
    pub fn new(experiment: ExperimentKind, t: usize) -> Self {
        Self {
            experiment,
            l: default_l(),
            mu: None,
            kappa: None,
            t,
            r: default_r(),
            m: default_m(),
            seed: 0,
            tol: default_tol(),
            output_dir: None,
            schedule: None,
            epsilon: None,
        }
    }

    /// Check consistency and derive `mu`.
    pub fn resolve(&self) -> Result<Resolved> {
        positive("L", self.l)?;
        positive("R", self.r)?;
        positive("tol", self.tol)?;
        if self.t < 1 {
            return Err(bad("T must be >= 1".into()));
        }
        if self.m < 2 || self.m > MAX_OBJECTIVES {
            return Err(bad(format!("m must lie in [2, {MAX_OBJECTIVES}], got {}", self.m)));
        }
        let mu = match (self.mu, self.kappa) {
            (Some(mu), Some(kappa)) => {
                positive("mu", mu)?;
                positive("kappa", kappa)?;
                let implied = self.l / mu;
                if (implied - kappa).abs() > 1e-12 * kappa {
                    return Err(bad(format!("kappa={kappa} disagrees with L/mu={implied}")));
                }
                mu
            }
            (Some(mu), None) => {
                if !(mu >= 0.0 && mu.is_finite()) {
                    return Err(bad(format!("mu must be finite and >= 0, got {mu}")));
                }
                mu
            }
            (None, Some(kappa)) => {
                positive("kappa", kappa)?;
                self.l / kappa
            }
            (None, None) => 0.0,
        };
        if mu > self.l {
            return Err(bad(format!("mu={mu} exceeds L={}", self.l)));
        }
        let strongly_convex_needed = matches!(self.experiment, ExperimentKind::StronglyConvex);
        let convex_only = matches!(self.experiment, ExperimentKind::Oblivious | ExperimentKind::Universal);
        if strongly_convex_needed && mu == 0.0 {
            return Err(bad("strongly-convex needs mu or kappa".into()));
        }
        if convex_only && mu != 0.0 {
            return Err(bad(format!("{} is a convex experiment; drop mu and kappa", self.experiment.tag())));
        }
        if mu > 0.0 && self.l / mu <= 1.0 {
            return Err(bad("kappa must exceed 1: the extremal value is undefined at kappa = 1".into()));
        }
        if self.schedule.is_some() && self.experiment != ExperimentKind::Oblivious {
            return Err(bad("schedule applies to the oblivious experiment only".into()));
        }
        if let Some(eps) = self.epsilon {
            if self.experiment != ExperimentKind::UpperAgd {
                return Err(bad("epsilon applies to the upper-agd experiment only".into()));
            }
            positive("epsilon", eps)?;
        }
        Ok(Resolved {
            kind: self.experiment,
            l: self.l,
            mu,
            t: self.t,
            r: self.r,
            m: self.m,
            seed: self.seed,
            tol: self.tol,
            epsilon: self.epsilon,
        })
    }

    /// The schedule of an oblivious run: `1/L` throughout unless configured.
    pub fn step_schedule(&self) -> Result<StepSchedule> {
        match &self.schedule {
            None => StepSchedule::constant(1.0 / self.l, self.t, self.l),
            Some(ScheduleSpec::Named(name)) => match name.as_str() {
                "constant" => StepSchedule::constant(1.0 / self.l, self.t, self.l),
                "random" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                    StepSchedule::random(self.t, self.l, &mut rng)
                }
                other => Err(bad(format!("unknown schedule {other:?}; use \"constant\", \"random\" or a list"))),
            },
            Some(ScheduleSpec::Explicit(alphas)) => {
                if alphas.len() != self.t {
                    return Err(bad(format!("schedule has {} steps but T={}", alphas.len(), self.t)));
                }
                StepSchedule::new(alphas.clone(), self.l).map_err(|e| bad(e.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment":"oblivious","T":4}"#).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!((r.l, r.mu, r.t, r.m), (1.0, 0.0, 4, 2));
        assert_eq!(r.tol, DEFAULT_TOL);
    }

    #[test]
    fn kappa_and_mu_reconcile() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::StronglyConvex, 3);
        cfg.l = 9.0;
        cfg.kappa = Some(9.0);
        assert_eq!(cfg.resolve().unwrap().mu, 1.0);
        cfg.mu = Some(2.0);
        assert!(matches!(cfg.resolve(), Err(LabError::Config(_))));
    }

    #[test]
    fn rejects_unit_condition_number() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::StronglyConvex, 3);
        cfg.kappa = Some(1.0);
        assert!(matches!(cfg.resolve(), Err(LabError::Config(_))));
    }

    #[test]
    fn rejects_unknown_fields_and_experiments() {
        assert!(ExperimentConfig::from_json(r#"{"experiment":"oblivious","T":4,"x":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"adaptive","T":4}"#).is_err());
    }

    #[test]
    fn random_schedule_is_seeded() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Oblivious, 5);
        cfg.schedule = Some(ScheduleSpec::Named("random".into()));
        cfg.seed = 7;
        assert_eq!(cfg.step_schedule().unwrap(), cfg.step_schedule().unwrap());
        cfg.seed = 8;
        let other = cfg.step_schedule().unwrap();
        cfg.seed = 7;
        assert_ne!(cfg.step_schedule().unwrap(), other);
    }
}
