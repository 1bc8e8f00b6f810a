//! Fixed-step RK4 simulation of the torso driven by massless legs.
//!
//! Stance feet are pinned at their scheduled footholds. Each stance leg's
//! joint torques (PD tracking plus optional inverse-dynamics feedforward) map
//! to a ground reaction through `F = -J^-T tau`, which is the constraint force
//! reported per sample.

use nalgebra::{Rotation2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::contact::cross;
use super::inverse::{inverse_dynamics_at, time_grid, JointSample, TorqueTrace};
use super::leg::{foot_force_from_joint_torques, joint_rates, leg_ik, JointTorques, LegConfig};
use super::stability::{sagittal_margin, Margin};
use super::DynamicsError;
use crate::gait::{com_reference, GaitPlan, LegId};
use crate::morphology::BodyParams;
use crate::GRAVITY;

/// Deviation from the COM reference treated as divergence, m.
const DIVERGENCE_BOUND: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub kp: f64,
    pub kd: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self { kp: 100.0, kd: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub gains: Gains,
    pub t_end: f64,
    pub dt: f64,
    /// Apply the gait's stance schedule; `false` gives a free-flying torso.
    pub contacts: bool,
    /// Add inverse-dynamics torques to the PD law.
    pub feedforward: bool,
    pub mu: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            gains: Gains::default(),
            t_end: 0.25,
            dt: 1e-3,
            contacts: true,
            feedforward: true,
            mu: super::DEFAULT_MU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsoState {
    pub position: Vector2<f64>,
    pub pitch: f64,
    pub velocity: Vector2<f64>,
    pub pitch_rate: f64,
}

impl TorsoState {
    pub fn on_reference(plan: &GaitPlan, t: f64) -> Self {
        let c = com_reference(plan, t);
        Self { position: c.position, pitch: 0.0, velocity: c.velocity, pitch_rate: 0.0 }
    }

    fn axpy(&self, h: f64, d: &Derivative) -> Self {
        Self {
            position: self.position + d.velocity * h,
            pitch: self.pitch + d.pitch_rate * h,
            velocity: self.velocity + d.acceleration * h,
            pitch_rate: self.pitch_rate + d.pitch_acc * h,
        }
    }

    fn energy(&self, body: &BodyParams) -> f64 {
        0.5 * body.mass * self.velocity.norm_squared()
            + 0.5 * body.inertia_sagittal * self.pitch_rate.powi(2)
            + body.mass * GRAVITY * self.position.y
    }
}

#[derive(Debug, Clone, Copy)]
struct Derivative {
    velocity: Vector2<f64>,
    pitch_rate: f64,
    acceleration: Vector2<f64>,
    pitch_acc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimLeg {
    pub stance: bool,
    pub config: Option<LegConfig>,
    pub torques: JointTorques,
    /// Joint rates relative to the torso `(hip, knee)`.
    pub rates: (f64, f64),
    pub force: Vector2<f64>,
}

impl Default for SimLeg {
    fn default() -> Self {
        Self {
            stance: false,
            config: None,
            torques: JointTorques::default(),
            rates: (0.0, 0.0),
            force: Vector2::zeros(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSample {
    pub t: f64,
    pub torso: TorsoState,
    pub legs: [SimLeg; 4],
    pub margin: Margin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub dt: f64,
    pub samples: Vec<SimSample>,
}

impl SimTrace {
    /// Largest COM deviation from the reference over the trace.
    pub fn max_tracking_error(&self, plan: &GaitPlan) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.torso.position - com_reference(plan, s.t).position).norm())
            .fold(0.0, f64::max)
    }

    pub fn energies(&self, body: &BodyParams) -> Vec<f64> {
        self.samples.iter().map(|s| s.torso.energy(body)).collect()
    }

    /// Applied joint torques and rates on the trace grid.
    pub fn torque_trace(&self) -> TorqueTrace {
        TorqueTrace {
            dt: self.dt,
            time: self.samples.iter().map(|s| s.t).collect(),
            joints: self
                .samples
                .iter()
                .map(|s| {
                    s.legs.map(|l| {
                        [
                            JointSample { torque: l.torques.hip, velocity: l.rates.0 },
                            JointSample { torque: l.torques.knee, velocity: l.rates.1 },
                        ]
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("simulation diverged at t = {t:.6} s: {reason}")]
    Unstable { t: f64, reason: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

struct Model<'a> {
    body: &'a BodyParams,
    plan: &'a GaitPlan,
    cfg: &'a SimConfig,
}

impl Model<'_> {
    /// Hip offset from the COM in the body frame.
    fn hip_body(&self, leg: LegId) -> Vector2<f64> {
        Vector2::new(self.plan.leg(leg).hip_offset, self.plan.hip_drop)
    }

    fn evaluate(&self, t: f64, s: &TorsoState) -> Result<(Derivative, [SimLeg; 4]), SimError> {
        let mut legs = [SimLeg::default(); 4];
        let mut force = Vector2::zeros();
        let mut moment = 0.0;
        if self.cfg.contacts {
            let link = self.body.leg_link_length;
            let rot = Rotation2::new(s.pitch);
            let feedforward = if self.cfg.feedforward {
                Some(inverse_dynamics_at(self.body, self.plan, t, self.cfg.mu)?)
            } else {
                None
            };
            for leg in LegId::ALL {
                let foot_ref = self.plan.foot_reference(leg, t);
                let hip_w = rot * self.hip_body(leg);
                let hip = s.position + hip_w;
                let hip_vel = s.velocity + s.pitch_rate * Vector2::new(-hip_w.y, hip_w.x);
                let ref_hip = self.plan.hip_position(leg, t);
                let desired = leg_ik(ref_hip, foot_ref.position, link).map_err(|e| {
                    SimError::Unstable { t, reason: format!("reference leg {leg}: {e}") }
                })?;
                let (dphi_ref, dq_ref) = joint_rates(
                    ref_hip,
                    foot_ref.position,
                    foot_ref.velocity - com_reference(self.plan, t).velocity,
                    &desired,
                    link,
                );
                if !foot_ref.stance {
                    legs[leg.index()] = SimLeg {
                        stance: false,
                        config: leg_ik(hip, foot_ref.position, link).ok(),
                        ..SimLeg::default()
                    };
                    continue;
                }
                let foot = foot_ref.position;
                let actual = leg_ik(hip, foot, link).map_err(|e| SimError::Unstable {
                    t,
                    reason: format!("leg {leg}: {e}"),
                })?;
                let (dphi_w, dq) = joint_rates(hip, foot, -hip_vel, &actual, link);
                let dphi = dphi_w - s.pitch_rate;
                let phi_rel = actual.phi - s.pitch;
                let ff = feedforward
                    .as_ref()
                    .map(|f| f.legs[leg.index()].torques)
                    .unwrap_or_default();
                let g = self.cfg.gains;
                let tau = JointTorques {
                    hip: ff.hip + g.kp * (desired.phi - phi_rel) + g.kd * (dphi_ref - dphi),
                    knee: ff.knee + g.kp * (desired.knee - actual.knee) + g.kd * (dq_ref - dq),
                };
                let f = foot_force_from_joint_torques(&actual, &tau, link).map_err(|e| {
                    SimError::Unstable { t, reason: format!("leg {leg}: {e}") }
                })?;
                force += f;
                moment += cross(foot - s.position, f);
                legs[leg.index()] = SimLeg {
                    stance: true,
                    config: Some(actual),
                    torques: tau,
                    rates: (dphi, dq),
                    force: f,
                };
            }
        }
        let acceleration = force / self.body.mass - Vector2::new(0.0, GRAVITY);
        let pitch_acc = if self.body.inertia_sagittal > 0.0 {
            moment / self.body.inertia_sagittal
        } else {
            0.0
        };
        Ok((
            Derivative { velocity: s.velocity, pitch_rate: s.pitch_rate, acceleration, pitch_acc },
            legs,
        ))
    }

    fn check(&self, t: f64, s: &TorsoState) -> Result<(), SimError> {
        let finite = s.position.iter().chain(s.velocity.iter()).all(|v| v.is_finite())
            && s.pitch.is_finite()
            && s.pitch_rate.is_finite();
        let reference = if self.cfg.contacts {
            com_reference(self.plan, t).position
        } else {
            s.position
        };
        let tipped = self.cfg.contacts && s.pitch.abs() > 1.5;
        if !finite || (s.position - reference).norm() > DIVERGENCE_BOUND || tipped {
            return Err(SimError::Unstable {
                t,
                reason: format!(
                    "state left the sanity bound (x = {:.4}, z = {:.4}, pitch = {:.4})",
                    s.position.x, s.position.y, s.pitch
                ),
            });
        }
        Ok(())
    }

    fn sample(&self, t: f64, s: &TorsoState) -> Result<SimSample, SimError> {
        let (_, legs) = self.evaluate(t, s)?;
        let feet: Vec<f64> = if self.cfg.contacts {
            self.plan
                .stance_legs(t)
                .into_iter()
                .map(|l| self.plan.foot_reference(l, t).position.x)
                .collect()
        } else {
            Vec::new()
        };
        Ok(SimSample { t, torso: *s, legs, margin: sagittal_margin(s.position.x, &feet) })
    }
}

/// Integrates the torso from `initial` over `[0, t_end]` with fixed-step RK4.
pub fn forward_simulate(
    body: &BodyParams,
    plan: &GaitPlan,
    cfg: &SimConfig,
    initial: TorsoState,
) -> Result<SimTrace, SimError> {
    let (steps, dt) = time_grid(cfg.t_end, cfg.dt)?;
    let model = Model { body, plan, cfg };
    let mut state = initial;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..steps {
        let t = k as f64 * dt;
        model.check(t, &state)?;
        samples.push(model.sample(t, &state)?);
        let (k1, _) = model.evaluate(t, &state)?;
        let (k2, _) = model.evaluate(t + 0.5 * dt, &state.axpy(0.5 * dt, &k1))?;
        let (k3, _) = model.evaluate(t + 0.5 * dt, &state.axpy(0.5 * dt, &k2))?;
        let (k4, _) = model.evaluate(t + dt, &state.axpy(dt, &k3))?;
        let combine = |f: fn(&Derivative) -> Vector2<f64>| {
            (f(&k1) + 2.0 * f(&k2) + 2.0 * f(&k3) + f(&k4)) * (dt / 6.0)
        };
        let combine_s = |f: fn(&Derivative) -> f64| {
            (f(&k1) + 2.0 * f(&k2) + 2.0 * f(&k3) + f(&k4)) * (dt / 6.0)
        };
        state = TorsoState {
            position: state.position + combine(|d| d.velocity),
            pitch: state.pitch + combine_s(|d| d.pitch_rate),
            velocity: state.velocity + combine(|d| d.acceleration),
            pitch_rate: state.pitch_rate + combine_s(|d| d.pitch_acc),
        };
    }
    let t_end = steps as f64 * dt;
    model.check(t_end, &state)?;
    samples.push(model.sample(t_end, &state)?);
    Ok(SimTrace { dt, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gait::{plan_gait, GaitParams};
    use approx::assert_relative_eq;

    fn body() -> BodyParams {
        BodyParams::lumped(4.3, Vector2::new(0.02, 0.0), 0.12)
    }

    #[test]
    fn ballistic_matches_projectile() {
        let plan = plan_gait(&GaitParams::default(), &body()).unwrap();
        let cfg = SimConfig { t_end: 1.0, contacts: false, feedforward: false, ..SimConfig::default() };
        let init = TorsoState {
            position: Vector2::new(0.0, 0.0),
            pitch: 0.0,
            velocity: Vector2::new(1.0, 2.0),
            pitch_rate: 0.0,
        };
        let tr = forward_simulate(&body(), &plan, &cfg, init).unwrap();
        assert_eq!(tr.samples.len(), 1001);
        for s in &tr.samples {
            let exact = Vector2::new(s.t, 2.0 * s.t - 0.5 * GRAVITY * s.t * s.t);
            assert_relative_eq!(s.torso.position, exact, epsilon = 1e-6);
        }
    }

    #[test]
    fn standing_feedforward_holds_reference() {
        let params = GaitParams { speed: 0.0, duty_factor: 1.0, ..GaitParams::default() };
        let plan = plan_gait(&params, &body()).unwrap();
        let cfg = SimConfig {
            gains: Gains { kp: 0.0, kd: 0.0 },
            t_end: 0.5,
            ..SimConfig::default()
        };
        let tr = forward_simulate(&body(), &plan, &cfg, TorsoState::on_reference(&plan, 0.0)).unwrap();
        assert!(tr.max_tracking_error(&plan) < 1e-6);
    }

    #[test]
    fn divergence_is_reported_with_time() {
        let params = GaitParams { speed: 0.0, duty_factor: 1.0, ..GaitParams::default() };
        let plan = plan_gait(&params, &body()).unwrap();
        // no feedforward and no feedback: the torso falls onto its legs
        let cfg = SimConfig {
            gains: Gains { kp: 0.0, kd: 0.0 },
            feedforward: false,
            t_end: 2.0,
            ..SimConfig::default()
        };
        let err = forward_simulate(&body(), &plan, &cfg, TorsoState::on_reference(&plan, 0.0))
            .unwrap_err();
        assert!(matches!(err, SimError::Unstable { t, .. } if t > 0.0));
    }
}
