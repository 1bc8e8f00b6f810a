//! Energy over one gait cycle and the dimensionless total cost of transport.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuation::{
    check_torque_feasibility, payload_margin, ActuatorSet, PayloadSearch, PowerTrace,
};
use crate::dynamics::{inverse_dynamics_trace, DEFAULT_MU};
use crate::gait::{plan_gait, GaitParams};
use crate::morphology::MorphologySample;
use crate::GRAVITY;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("cost of transport undefined for distance {0} m")]
    UndefinedTcot(f64),
    #[error("cost of transport undefined for mass {0} kg")]
    InvalidMass(f64),
    #[error("energy integral needs at least two samples, got {0}")]
    TooFewSamples(usize),
}

/// Trapezoidal integral of a uniformly sampled signal.
pub fn trapezoid(values: &[f64], dt: f64) -> Result<f64, EnergyError> {
    if values.len() < 2 {
        return Err(EnergyError::TooFewSamples(values.len()));
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    Ok(dt * (inner + 0.5 * (values[0] + values[values.len() - 1])))
}

/// Electrical energy drawn over the trace, J.
pub fn energy_integral(power: &PowerTrace) -> Result<f64, EnergyError> {
    trapezoid(&power.total, power.dt)
}

pub fn tcot(energy: f64, mass: f64, distance: f64) -> Result<f64, EnergyError> {
    if !(distance > 0.0) {
        return Err(EnergyError::UndefinedTcot(distance));
    }
    if !(mass > 0.0) {
        return Err(EnergyError::InvalidMass(mass));
    }
    Ok(energy / (mass * GRAVITY * distance))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub distance: f64,
    pub mean_power: f64,
    pub tcot: f64,
    pub mechanical: f64,
    pub copper: f64,
}

impl EnergyReport {
    /// Report for one period of `power` covering `distance` with `mass`.
    pub fn from_power(power: &PowerTrace, mass: f64, distance: f64) -> Result<Self, EnergyError> {
        let energy = energy_integral(power)?;
        let period = power.dt * (power.total.len() - 1) as f64;
        Ok(Self {
            energy,
            distance,
            mean_power: energy / period,
            tcot: tcot(energy, mass, distance)?,
            mechanical: trapezoid(&power.mechanical, power.dt)?,
            copper: trapezoid(&power.copper, power.dt)?,
        })
    }
}

/// Settings shared by every evaluation in a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(rename = "dt_s")]
    pub dt: f64,
    pub mu: f64,
    pub payload: PayloadSearch,
    /// Skip the payload search (records then carry no margin).
    pub compute_payload: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { dt: 1e-3, mu: DEFAULT_MU, payload: PayloadSearch::default(), compute_payload: true }
    }
}

/// One evaluated design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub id: usize,
    pub cx: f64,
    pub cy: f64,
    pub ib: f64,
    pub mass: f64,
    pub tcot: Option<f64>,
    pub payload_margin: Option<f64>,
    pub min_stability_margin: Option<f64>,
    pub feasible: bool,
    /// Why the design is infeasible, if it is.
    #[serde(skip)]
    pub reason: Option<String>,
}

impl EvaluationRecord {
    /// TCOT as a minimisation fitness: infeasible designs score `+inf`.
    pub fn fitness(&self) -> f64 {
        match (self.feasible, self.tcot) {
            (true, Some(t)) => t,
            _ => f64::INFINITY,
        }
    }
}

/// Runs one design through planning, inverse dynamics, power, energy and the
/// payload search. Failures mark the record infeasible instead of aborting.
pub fn evaluate_morphology(
    sample: &MorphologySample,
    gait: &GaitParams,
    specs: &ActuatorSet,
    cfg: &EvalConfig,
) -> EvaluationRecord {
    let body = &sample.body;
    let mut record = EvaluationRecord {
        id: sample.id,
        cx: body.cx(),
        cy: body.cy(),
        ib: body.inertia_sagittal,
        mass: body.mass,
        tcot: None,
        payload_margin: None,
        min_stability_margin: None,
        feasible: false,
        reason: None,
    };
    let plan = match plan_gait(gait, body) {
        Ok(p) => p,
        Err(e) => {
            record.reason = Some(e.to_string());
            return record;
        }
    };
    let trace = match inverse_dynamics_trace(body, &plan, cfg.dt, cfg.mu) {
        Ok(t) => t,
        Err(e) => {
            record.reason = Some(e.to_string());
            return record;
        }
    };
    record.min_stability_margin = Some(trace.min_margin());
    let limits = check_torque_feasibility(&trace.torque, specs);
    if !limits.is_feasible() {
        record.reason = Some(format!("{} actuator limit violation(s)", limits.violations.len()));
        return record;
    }
    let power = PowerTrace::from_torques(&trace.torque, specs);
    match EnergyReport::from_power(&power, body.mass, plan.distance_per_cycle()) {
        Ok(r) => record.tcot = Some(r.tcot),
        Err(e) => {
            record.reason = Some(e.to_string());
            return record;
        }
    }
    if cfg.compute_payload {
        match payload_margin(body, gait, specs, &cfg.payload, cfg.dt, cfg.mu) {
            Ok(m) => record.payload_margin = Some(m),
            Err(e) => {
                record.reason = Some(e.to_string());
                return record;
            }
        }
    }
    record.feasible = true;
    record
}
