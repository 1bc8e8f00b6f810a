//! Actuator model: brushless winding behind a harmonic drive. Converts joint
//! torque and speed into electrical power, checks limits and finds the
//! payload margin.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{inverse_dynamics_trace, DynamicsError, TorqueTrace};
use crate::gait::{plan_gait, GaitError, GaitParams, LegId};
use crate::morphology::BodyParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorSpec {
    #[serde(rename = "kv_rpm_per_v")]
    pub kv: f64,
    #[serde(rename = "resistance_ohm")]
    pub winding_resistance: f64,
    pub gear_ratio: f64,
    #[serde(rename = "torque_limit_nm")]
    pub torque_limit: f64,
    #[serde(rename = "speed_limit_rad_s")]
    pub speed_limit: f64,
    #[serde(rename = "efficiency")]
    pub gearbox_efficiency: f64,
}

impl ActuatorSpec {
    pub fn knee() -> Self {
        Self {
            kv: 400.0,
            winding_resistance: 0.15,
            gear_ratio: 30.0,
            torque_limit: 12.0,
            speed_limit: 33.0,
            gearbox_efficiency: 0.85,
        }
    }

    pub fn hip_sagittal() -> Self {
        Self { gear_ratio: 50.0, torque_limit: 20.0, speed_limit: 20.0, ..Self::knee() }
    }

    pub fn hip_frontal() -> Self {
        Self { gear_ratio: 100.0, torque_limit: 20.0, speed_limit: 10.0, ..Self::knee() }
    }

    pub fn with_limits(mut self, torque: f64, speed: f64) -> Self {
        self.torque_limit = torque;
        self.speed_limit = speed;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("kv_rpm_per_v", self.kv),
            ("resistance_ohm", self.winding_resistance),
            ("gear_ratio", self.gear_ratio),
            ("torque_limit_nm", self.torque_limit),
            ("speed_limit_rad_s", self.speed_limit),
            ("efficiency", self.gearbox_efficiency),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
            return Err(format!("{name} must be positive, got {v}"));
        }
        if self.gearbox_efficiency > 1.0 {
            return Err(format!("efficiency must be <= 1, got {}", self.gearbox_efficiency));
        }
        Ok(())
    }
}

/// One spec per joint type. Hip-frontal joints carry no load in the sagittal
/// model and are not part of the power totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorSet {
    pub knee: ActuatorSpec,
    pub hip_sagittal: ActuatorSpec,
    pub hip_frontal: ActuatorSpec,
}

impl Default for ActuatorSet {
    fn default() -> Self {
        Self {
            knee: ActuatorSpec::knee(),
            hip_sagittal: ActuatorSpec::hip_sagittal(),
            hip_frontal: ActuatorSpec::hip_frontal(),
        }
    }
}

impl ActuatorSet {
    /// Spec for joint slot `j` of a leg: 0 hip sagittal, 1 knee.
    pub fn joint(&self, j: usize) -> &ActuatorSpec {
        if j == 0 {
            &self.hip_sagittal
        } else {
            &self.knee
        }
    }

    pub fn unlimited() -> Self {
        let inf = |s: ActuatorSpec| s.with_limits(f64::INFINITY, f64::INFINITY);
        let d = Self::default();
        Self { knee: inf(d.knee), hip_sagittal: inf(d.hip_sagittal), hip_frontal: inf(d.hip_frontal) }
    }
}

/// Torque constant in N m / A from a speed constant in rpm / V.
pub fn motor_torque_constant(kv: f64) -> f64 {
    60.0 / (2.0 * PI * kv)
}

/// Winding current drawn to hold joint torque `tau`.
pub fn winding_current(spec: &ActuatorSpec, tau: f64) -> f64 {
    tau / (spec.gear_ratio * spec.gearbox_efficiency) / motor_torque_constant(spec.kv)
}

pub fn copper_loss(spec: &ActuatorSpec, tau: f64) -> f64 {
    winding_current(spec, tau).powi(2) * spec.winding_resistance
}

/// Positive mechanical power plus copper loss; negative work is dissipated.
pub fn electrical_power(spec: &ActuatorSpec, tau: f64, omega: f64) -> f64 {
    (tau * omega).max(0.0) + copper_loss(spec, tau)
}

/// Electrical power per joint slot (`[leg][hip, knee]`) on the torque grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTrace {
    pub dt: f64,
    pub time: Vec<f64>,
    pub per_joint: Vec<[[f64; 2]; 4]>,
    pub total: Vec<f64>,
    pub mechanical: Vec<f64>,
    pub copper: Vec<f64>,
}

impl PowerTrace {
    pub fn from_torques(trace: &TorqueTrace, specs: &ActuatorSet) -> Self {
        let n = trace.len();
        let mut per_joint = Vec::with_capacity(n);
        let mut total = Vec::with_capacity(n);
        let mut mechanical = Vec::with_capacity(n);
        let mut copper = Vec::with_capacity(n);
        for row in &trace.joints {
            let mut p = [[0.0; 2]; 4];
            let (mut mech, mut cu) = (0.0, 0.0);
            for (leg, joints) in row.iter().enumerate() {
                for (j, js) in joints.iter().enumerate() {
                    let spec = specs.joint(j);
                    let m = (js.torque * js.velocity).max(0.0);
                    let c = copper_loss(spec, js.torque);
                    p[leg][j] = m + c;
                    mech += m;
                    cu += c;
                }
            }
            per_joint.push(p);
            total.push(p.iter().flatten().sum());
            mechanical.push(mech);
            copper.push(cu);
        }
        Self { dt: trace.dt, time: trace.time.clone(), per_joint, total, mechanical, copper }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let scale = |v: &Vec<f64>| v.iter().map(|x| x * s).collect();
        Self {
            dt: self.dt,
            time: self.time.clone(),
            per_joint: self.per_joint.iter().map(|r| r.map(|l| l.map(|x| x * s))).collect(),
            total: scale(&self.total),
            mechanical: scale(&self.mechanical),
            copper: scale(&self.copper),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    Torque,
    Speed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub leg: LegId,
    /// 0 hip sagittal, 1 knee.
    pub joint: usize,
    pub kind: LimitKind,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every `(t, joint)` whose torque or speed magnitude exceeds its limit.
/// Values exactly at a limit are feasible.
pub fn check_torque_feasibility(trace: &TorqueTrace, specs: &ActuatorSet) -> FeasibilityReport {
    let mut violations = Vec::new();
    for (t, row) in trace.time.iter().zip(&trace.joints) {
        for (leg, joints) in LegId::ALL.iter().zip(row) {
            for (j, js) in joints.iter().enumerate() {
                let spec = specs.joint(j);
                if js.torque.abs() > spec.torque_limit {
                    violations.push(Violation {
                        t: *t,
                        leg: *leg,
                        joint: j,
                        kind: LimitKind::Torque,
                        value: js.torque.abs(),
                        limit: spec.torque_limit,
                    });
                }
                if js.velocity.abs() > spec.speed_limit {
                    violations.push(Violation {
                        t: *t,
                        leg: *leg,
                        joint: j,
                        kind: LimitKind::Speed,
                        value: js.velocity.abs(),
                        limit: spec.speed_limit,
                    });
                }
            }
        }
    }
    FeasibilityReport { violations }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PayloadError {
    #[error("payload margin undefined: nominal design violates {0} actuator limit(s)")]
    NominalInfeasible(usize),
    #[error("payload margin undefined: {0}")]
    Gait(#[from] GaitError),
    #[error("payload margin undefined: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("invalid payload search: {0}")]
    Invalid(String),
}

/// Payload search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayloadSearch {
    /// Attachment point in the torso frame, m.
    pub attach: [f64; 2],
    #[serde(rename = "cap_kg")]
    pub cap: f64,
    #[serde(rename = "resolution_kg")]
    pub resolution: f64,
}

impl Default for PayloadSearch {
    fn default() -> Self {
        Self { attach: [0.0, 0.0], cap: 5.0, resolution: 1e-3 }
    }
}

/// Whether the gait stays within actuator limits carrying `added` kg.
pub fn payload_feasible(
    body: &BodyParams,
    gait: &GaitParams,
    specs: &ActuatorSet,
    search: &PayloadSearch,
    added: f64,
    dt: f64,
    mu: f64,
) -> Result<bool, PayloadError> {
    let loaded = body.with_point_mass(added, Vector2::from(search.attach));
    let plan = match plan_gait(gait, &loaded) {
        Ok(p) => p,
        Err(GaitError::OutOfReach { .. }) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    match inverse_dynamics_trace(&loaded, &plan, dt, mu) {
        Ok(tr) => Ok(check_torque_feasibility(&tr.torque, specs).is_feasible()),
        Err(_) if added > 0.0 => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Largest added point mass (on the `resolution` grid, capped at `cap`) that
/// keeps the gait within actuator limits, found by bisection.
pub fn payload_margin(
    body: &BodyParams,
    gait: &GaitParams,
    specs: &ActuatorSet,
    search: &PayloadSearch,
    dt: f64,
    mu: f64,
) -> Result<f64, PayloadError> {
    if !(search.resolution > 0.0 && search.cap >= 0.0) {
        return Err(PayloadError::Invalid("cap must be >= 0 and resolution > 0".into()));
    }
    let plan = plan_gait(gait, body)?;
    let nominal = inverse_dynamics_trace(body, &plan, dt, mu)?;
    let report = check_torque_feasibility(&nominal.torque, specs);
    if !report.is_feasible() {
        return Err(PayloadError::NominalInfeasible(report.violations.len()));
    }
    let steps = (search.cap / search.resolution).floor() as u64;
    let feasible = |k: u64| payload_feasible(body, gait, specs, search, k as f64 * search.resolution, dt, mu);
    if feasible(steps)? {
        return Ok(on_grid(steps, search.resolution));
    }
    // invariant: lo feasible, hi infeasible
    let (mut lo, mut hi) = (0u64, steps);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(on_grid(lo, search.resolution))
}

/// `k * resolution`, rounded to the nanogram so grid values print cleanly.
fn on_grid(k: u64, resolution: f64) -> f64 {
    (k as f64 * resolution * 1e12).round() / 1e12
}
