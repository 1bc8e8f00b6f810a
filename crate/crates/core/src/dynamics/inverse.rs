use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::contact::{distribute_contact_forces, required_net_wrench, ContactForce};
use super::leg::{joint_rates, joint_torques_from_foot_force, leg_ik, JointTorques, LegConfig};
use super::stability::{sagittal_margin, Margin};
use super::{DynamicsError, DynamicsErrorKind};
use crate::gait::{com_reference, ComState, GaitPlan, LegId};
use crate::morphology::BodyParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegSample {
    pub leg: LegId,
    pub stance: bool,
    pub foot: Vector2<f64>,
    pub config: LegConfig,
    pub phi_dot: f64,
    pub knee_dot: f64,
    pub torques: JointTorques,
    /// Ground reaction on the foot; zero in swing.
    pub force: Vector2<f64>,
}

/// Inverse-dynamics solution at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct IdSample {
    pub t: f64,
    pub com: ComState,
    pub legs: [LegSample; 4],
    pub margin: Margin,
}

impl IdSample {
    pub fn contacts(&self) -> Vec<(LegId, ContactForce)> {
        self.legs
            .iter()
            .filter(|l| l.stance)
            .enumerate()
            .map(|(i, l)| (l.leg, ContactForce { foot: i, force: l.force, point: l.foot }))
            .collect()
    }
}

/// Torso pose and per-leg polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub pitch: f64,
    pub x_dot: f64,
    pub z_dot: f64,
    pub pitch_dot: f64,
    pub phi: [f64; 4],
    pub ell: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateTrace {
    pub dt: f64,
    pub samples: Vec<PlanarState>,
}

/// Torque and rate of one joint.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointSample {
    pub torque: f64,
    pub velocity: f64,
}

/// Per-sample `[leg][hip, knee]` joint torques and rates on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorqueTrace {
    pub dt: f64,
    pub time: Vec<f64>,
    pub joints: Vec<[[JointSample; 2]; 4]>,
}

impl TorqueTrace {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Copy with every torque multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.joints {
            for leg in row.iter_mut() {
                for j in leg.iter_mut() {
                    j.torque *= s;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseDynamicsTrace {
    pub state: StateTrace,
    pub torque: TorqueTrace,
    pub contacts: Vec<Vec<(LegId, ContactForce)>>,
    pub margins: Vec<Margin>,
    pub samples: Vec<IdSample>,
}

impl InverseDynamicsTrace {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().map(|m| m.value).fold(f64::INFINITY, f64::min)
    }
}

/// Uniform grid closing exactly on `duration`: `round(duration / dt)` steps.
pub fn time_grid(duration: f64, dt: f64) -> Result<(usize, f64), DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) || !(duration.is_finite() && duration >= 0.0) {
        return Err(DynamicsError::at(0.0, DynamicsErrorKind::InvalidStep(dt)));
    }
    let steps = ((duration / dt).round() as usize).max(1);
    Ok((steps, duration / steps as f64))
}

pub fn inverse_dynamics_at(
    body: &BodyParams,
    plan: &GaitPlan,
    t: f64,
    mu: f64,
) -> Result<IdSample, DynamicsError> {
    let com = com_reference(plan, t);
    let link = body.leg_link_length;
    let hip_velocity = com.velocity;

    let mut legs = [None; 4];
    let mut stance_points = Vec::with_capacity(4);
    for leg in LegId::ALL {
        let hip = plan.hip_position(leg, t);
        let foot = plan.foot_reference(leg, t);
        let config = leg_ik(hip, foot.position, link)
            .map_err(|source| DynamicsError::at(t, DynamicsErrorKind::Leg { leg, source }))?;
        let (phi_dot, knee_dot) =
            joint_rates(hip, foot.position, foot.velocity - hip_velocity, &config, link);
        if foot.stance {
            stance_points.push(foot.position);
        }
        legs[leg.index()] = Some(LegSample {
            leg,
            stance: foot.stance,
            foot: foot.position,
            config,
            phi_dot,
            knee_dot,
            torques: JointTorques::default(),
            force: Vector2::zeros(),
        });
    }
    let mut legs = legs.map(Option::unwrap);

    let wrench = required_net_wrench(body, com.acceleration, 0.0);
    let forces = distribute_contact_forces(&wrench, &stance_points, com.position, mu)
        .map_err(|e| DynamicsError::at(t, e))?;
    let mut next = forces.iter();
    for sample in legs.iter_mut().filter(|l| l.stance) {
        let f = next.next().expect("one force per stance foot").force;
        sample.force = f;
        sample.torques = joint_torques_from_foot_force(&sample.config, f, link).map_err(|source| {
            DynamicsError::at(t, DynamicsErrorKind::Leg { leg: sample.leg, source })
        })?;
    }
    let feet_x: Vec<f64> = stance_points.iter().map(|p| p.x).collect();
    Ok(IdSample { t, com, legs, margin: sagittal_margin(com.position.x, &feet_x) })
}

/// Inverse dynamics over one gait period on a grid of `round(period / dt) + 1`
/// samples. Swing legs carry zero torque.
pub fn inverse_dynamics_trace(
    body: &BodyParams,
    plan: &GaitPlan,
    dt: f64,
    mu: f64,
) -> Result<InverseDynamicsTrace, DynamicsError> {
    let (steps, dt) = time_grid(plan.period, dt)?;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        samples.push(inverse_dynamics_at(body, plan, k as f64 * dt, mu)?);
    }

    let state = StateTrace {
        dt,
        samples: samples
            .iter()
            .map(|s| PlanarState {
                t: s.t,
                x: s.com.position.x,
                z: s.com.position.y,
                pitch: 0.0,
                x_dot: s.com.velocity.x,
                z_dot: s.com.velocity.y,
                pitch_dot: 0.0,
                phi: s.legs.map(|l| l.config.phi),
                ell: s.legs.map(|l| l.config.ell),
            })
            .collect(),
    };
    let torque = TorqueTrace {
        dt,
        time: samples.iter().map(|s| s.t).collect(),
        joints: samples
            .iter()
            .map(|s| {
                s.legs.map(|l| {
                    [
                        JointSample { torque: l.torques.hip, velocity: l.phi_dot },
                        JointSample { torque: l.torques.knee, velocity: l.knee_dot },
                    ]
                })
            })
            .collect(),
    };
    Ok(InverseDynamicsTrace {
        state,
        torque,
        contacts: samples.iter().map(IdSample::contacts).collect(),
        margins: samples.iter().map(|s| s.margin).collect(),
        samples,
    })
}
