//! Run configuration, read from TOML. Every table is optional and falls back
//! to the defaults below.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuation::{ActuatorSet, PayloadSearch};
use crate::dynamics::{Gains, SimConfig};
use crate::energetics::EvalConfig;
use crate::gait::GaitParams;
use crate::morphology::{
    BaseStructure, Bounds, ComponentSpec, DesignSpaceSpec, Geometry, MorphologyError,
    MorphologySample, Placement,
};
use crate::search::GaConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("design space: {0}")]
    Morphology(#[from] MorphologyError),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub kp: f64,
    pub kd: f64,
    /// Simulated time; `None` runs one gait period.
    pub t_end_s: Option<f64>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let g = Gains::default();
        Self { kp: g.kp, kd: g.kd, t_end_s: None }
    }
}

impl SimulationConfig {
    pub fn sim_config(&self, period: f64, dt: f64, mu: f64) -> SimConfig {
        SimConfig {
            gains: Gains { kp: self.kp, kd: self.kd },
            t_end: self.t_end_s.unwrap_or(period),
            dt,
            mu,
            ..SimConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub design_space: DesignSpaceSpec,
    pub gait: GaitParams,
    pub actuators: ActuatorSet,
    pub evaluation: EvalConfig,
    pub ga: GaConfig,
    pub simulation: SimulationConfig,
    /// Design used by `simulate`; unplaced components sit at their bounds centre.
    pub nominal: Vec<Placement>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            design_space: default_design_space(),
            gait: GaitParams::default(),
            actuators: ActuatorSet::default(),
            evaluation: EvalConfig {
                payload: PayloadSearch { cap: 40.0, ..PayloadSearch::default() },
                ..EvalConfig::default()
            },
            ga: GaConfig::default(),
            simulation: SimulationConfig::default(),
            nominal: vec![Placement::new("payload_bay", 0.05, 0.0)],
        }
    }
}

/// A 4.3 kg torso: a payload bay sliding fore-aft (Cx in [-0.1, 0.1] m), an
/// actuator bank sliding vertically (Cy in [-0.05, 0.05] m) and a mirrored
/// pair of harmonic drives whose spread sets Ib (about 0.05 to 0.29 kg m^2).
pub fn default_design_space() -> DesignSpaceSpec {
    DesignSpaceSpec::new(
        vec![
            ComponentSpec::point_mass(
                "payload_bay",
                2.15,
                Bounds { xmin: -0.2, xmax: 0.2, ymin: 0.0, ymax: 0.0 },
            )
            .with_grid(10, 1),
            ComponentSpec::point_mass(
                "actuator_bank",
                1.075,
                Bounds { xmin: 0.0, xmax: 0.0, ymin: -0.2, ymax: 0.2 },
            )
            .with_grid(1, 5),
            ComponentSpec::point_mass(
                "harmonic_drives",
                0.8,
                Bounds { xmin: 0.158, xmax: 0.484, ymin: 0.0, ymax: 0.0 },
            )
            .with_grid(5, 1)
            .mirrored(),
        ],
        BaseStructure { mass: 0.275, com: [0.0, 0.0], inertia: 0.03 },
        Geometry::default(),
    )
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.design_space.validate()?;
        let positive = [
            ("gait.speed_mps", self.gait.speed, true),
            ("gait.period_s", self.gait.period, false),
            ("gait.stance_height_m", self.gait.stance_height, false),
            ("evaluation.dt_s", self.evaluation.dt, false),
            ("evaluation.mu", self.evaluation.mu, false),
            ("simulation.kp", self.simulation.kp, true),
            ("simulation.kd", self.simulation.kd, true),
        ];
        for (field, v, zero_ok) in positive {
            let ok = v.is_finite() && (v > 0.0 || (zero_ok && v == 0.0));
            if !ok {
                let bound = if zero_ok { ">= 0" } else { "> 0" };
                return Err(invalid(field, format!("must be {bound}, got {v}")));
            }
        }
        if !(self.gait.duty_factor > 0.0 && self.gait.duty_factor <= 1.0) {
            return Err(invalid("gait.duty_factor", format!("must be in (0, 1], got {}", self.gait.duty_factor)));
        }
        for (name, a) in [
            ("actuators.knee", &self.actuators.knee),
            ("actuators.hip_sagittal", &self.actuators.hip_sagittal),
            ("actuators.hip_frontal", &self.actuators.hip_frontal),
        ] {
            a.validate().map_err(|m| invalid(name, m))?;
        }
        let p = &self.evaluation.payload;
        if !(p.cap >= 0.0 && p.resolution > 0.0) {
            return Err(invalid("evaluation.payload", "cap_kg must be >= 0 and resolution_kg > 0"));
        }
        if let Some(t) = self.simulation.t_end_s {
            if !(t > 0.0) {
                return Err(invalid("simulation.t_end_s", format!("must be > 0, got {t}")));
            }
        }
        self.ga.validate().map_err(|e| invalid("ga", e.to_string()))?;
        self.nominal_sample().map_err(|e| invalid("nominal", e.to_string()))?;
        Ok(())
    }

    /// The nominal design, with unlisted components at their bounds centre.
    pub fn nominal_sample(&self) -> Result<MorphologySample, MorphologyError> {
        let mut placements = self.design_space.center_placements();
        for p in &self.nominal {
            match placements.iter_mut().find(|q| q.component == p.component) {
                Some(q) => q.position = p.position,
                None => return Err(MorphologyError::UnknownComponent(p.component.clone())),
            }
        }
        MorphologySample::new(0, &self.design_space, placements)
    }
}
