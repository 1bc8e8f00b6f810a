//! Prescribed forward-walking trot: the COM path constraint and per-leg foot
//! references with footfall scheduling.
//!
//! World frame: `x` forward, `z` up, ground at `z = 0`. The COM starts at
//! `x = 0` at `t = 0` and moves at constant speed with zero pitch.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::BodyParams;
use crate::GRAVITY;

/// Samples per cycle used for the workspace check in [`plan_gait`].
const REACH_SAMPLES: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaitError {
    #[error("invalid gait parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible gait: leg {leg} needs reach {reach:.4} m, workspace limit {limit:.4} m")]
    OutOfReach { leg: LegId, reach: f64, limit: f64 },
    #[error("infeasible gait: duty factor 1 leaves no swing phase to relocate feet at speed {0} m/s")]
    NoSwingPhase(f64),
}

/// Sagittal legs. Left and right legs share a hip position in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LegId {
    FrontLeft,
    FrontRight,
    RearLeft,
    RearRight,
}

impl LegId {
    pub const ALL: [LegId; 4] = [LegId::FrontLeft, LegId::FrontRight, LegId::RearLeft, LegId::RearRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_front(self) -> bool {
        matches!(self, LegId::FrontLeft | LegId::FrontRight)
    }

    /// Trot phase offset: diagonal pairs {FL, RR} and {FR, RL} alternate.
    pub fn trot_offset(self) -> f64 {
        match self {
            LegId::FrontLeft | LegId::RearRight => 0.0,
            LegId::FrontRight | LegId::RearLeft => 0.5,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            LegId::FrontLeft => "fl",
            LegId::FrontRight => "fr",
            LegId::RearLeft => "rl",
            LegId::RearRight => "rr",
        }
    }
}

impl std::fmt::Display for LegId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Where each stance sweep sits relative to the hip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootPlacement {
    /// Sweep centred under the hip: touchdown `+D*S/2`, liftoff `-D*S/2`.
    Centered,
    /// Touchdown at the capture point `v*sqrt(h/g)` ahead of the hip.
    #[default]
    CapturePoint,
}

/// User-facing gait parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitParams {
    #[serde(rename = "speed_mps")]
    pub speed: f64,
    #[serde(rename = "period_s")]
    pub period: f64,
    pub duty_factor: f64,
    #[serde(rename = "swing_apex_m")]
    pub swing_apex: f64,
    /// Height of the hip line (torso geometric centre) above ground.
    #[serde(rename = "stance_height_m")]
    pub stance_height: f64,
    #[serde(default)]
    pub foot_placement: FootPlacement,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            speed: 0.2,
            period: 0.25,
            duty_factor: 0.6,
            swing_apex: 0.02,
            stance_height: 0.37,
            foot_placement: FootPlacement::CapturePoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegPlan {
    pub id: LegId,
    pub phase_offset: f64,
    /// Hip x relative to the COM, m.
    pub hip_offset: f64,
}

/// A resolved gait for one morphology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitPlan {
    pub period: f64,
    pub speed: f64,
    pub duty_factor: f64,
    pub stride_length: f64,
    /// COM height above ground.
    pub stance_height: f64,
    /// Hip-line height above ground, identical for every morphology.
    pub hip_height: f64,
    pub swing_apex: f64,
    /// Touchdown position of each foot ahead of its hip, m.
    pub touchdown_lead: f64,
    /// Hip z relative to the COM (= -Cy).
    pub hip_drop: f64,
    pub legs: [LegPlan; 4],
}

/// COM position, velocity and acceleration in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComState {
    pub position: Vector2<f64>,
    pub velocity: Vector2<f64>,
    pub acceleration: Vector2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootState {
    pub position: Vector2<f64>,
    pub velocity: Vector2<f64>,
    pub stance: bool,
}

pub fn plan_gait(params: &GaitParams, body: &BodyParams) -> Result<GaitPlan, GaitError> {
    let GaitParams { speed, period, duty_factor, swing_apex, stance_height, foot_placement } = *params;
    if !(period.is_finite() && period > 0.0) {
        return Err(GaitError::InvalidParameter(format!("period must be > 0, got {period}")));
    }
    if !(speed.is_finite() && speed >= 0.0) {
        return Err(GaitError::InvalidParameter(format!("speed must be >= 0, got {speed}")));
    }
    if !(duty_factor > 0.0 && duty_factor <= 1.0) {
        return Err(GaitError::InvalidParameter(format!(
            "duty factor must be in (0, 1], got {duty_factor}"
        )));
    }
    if !(swing_apex.is_finite() && swing_apex >= 0.0) {
        return Err(GaitError::InvalidParameter(format!("swing apex must be >= 0, got {swing_apex}")));
    }
    if !(stance_height.is_finite() && stance_height > swing_apex) {
        return Err(GaitError::InvalidParameter(format!(
            "stance height must exceed the swing apex, got {stance_height}"
        )));
    }
    if duty_factor == 1.0 && speed > 0.0 {
        return Err(GaitError::NoSwingPhase(speed));
    }

    let stride_length = speed * period;
    let touchdown_lead = match foot_placement {
        FootPlacement::Centered => 0.5 * duty_factor * stride_length,
        FootPlacement::CapturePoint => speed * (stance_height / GRAVITY).sqrt(),
    };
    let half = 0.5 * body.hip_spacing;
    let cx = body.cx();
    let legs = LegId::ALL.map(|id| LegPlan {
        id,
        phase_offset: id.trot_offset(),
        hip_offset: if id.is_front() { half - cx } else { -half - cx },
    });
    let plan = GaitPlan {
        period,
        speed,
        duty_factor,
        stride_length,
        stance_height: stance_height + body.cy(),
        hip_height: stance_height,
        swing_apex,
        touchdown_lead,
        hip_drop: -body.cy(),
        legs,
    };

    let limit = 2.0 * body.leg_link_length;
    for leg in LegId::ALL {
        let reach = (0..REACH_SAMPLES)
            .map(|k| {
                let t = period * k as f64 / REACH_SAMPLES as f64;
                (plan.foot_reference(leg, t).position - plan.hip_position(leg, t)).norm()
            })
            .chain([
                Vector2::new(touchdown_lead, stance_height).norm(),
                Vector2::new(touchdown_lead - duty_factor * stride_length, stance_height).norm(),
            ])
            .fold(0.0, f64::max);
        if reach >= limit {
            return Err(GaitError::OutOfReach { leg, reach, limit });
        }
    }
    Ok(plan)
}

/// Reference COM motion: straight line at `stance_height`, constant speed.
pub fn com_reference(plan: &GaitPlan, t: f64) -> ComState {
    ComState {
        position: Vector2::new(plan.speed * t, plan.stance_height),
        velocity: Vector2::new(plan.speed, 0.0),
        acceleration: Vector2::zeros(),
    }
}

pub fn foot_reference(plan: &GaitPlan, leg: LegId, t: f64) -> FootState {
    plan.foot_reference(leg, t)
}

impl GaitPlan {
    pub fn leg(&self, leg: LegId) -> &LegPlan {
        &self.legs[leg.index()]
    }

    /// Hip position on the reference trajectory.
    pub fn hip_position(&self, leg: LegId, t: f64) -> Vector2<f64> {
        Vector2::new(self.speed * t + self.leg(leg).hip_offset, self.hip_height)
    }

    /// Cycle index and phase in `[0, 1)` of `leg` at time `t`.
    fn cycle(&self, leg: LegId, t: f64) -> (f64, f64) {
        let tau = t / self.period - self.leg(leg).phase_offset;
        let n = tau.floor();
        (n, (tau - n).clamp(0.0, 1.0))
    }

    /// Ground contact point of the `n`-th stance of `leg`.
    pub fn foothold(&self, leg: LegId, n: f64) -> f64 {
        let touchdown = (n + self.leg(leg).phase_offset) * self.period;
        self.speed * touchdown + self.leg(leg).hip_offset + self.touchdown_lead
    }

    pub fn in_stance(&self, leg: LegId, t: f64) -> bool {
        self.duty_factor >= 1.0 || self.cycle(leg, t).1 < self.duty_factor
    }

    pub fn stance_legs(&self, t: f64) -> Vec<LegId> {
        LegId::ALL.into_iter().filter(|&l| self.in_stance(l, t)).collect()
    }

    pub fn foot_reference(&self, leg: LegId, t: f64) -> FootState {
        let (n, phase) = self.cycle(leg, t);
        if self.in_stance(leg, t) {
            return FootState {
                position: Vector2::new(self.foothold(leg, n), 0.0),
                velocity: Vector2::zeros(),
                stance: true,
            };
        }
        let swing_time = (1.0 - self.duty_factor) * self.period;
        let s = (phase - self.duty_factor) / (1.0 - self.duty_factor);
        let (sin, cos) = (2.0 * PI * s).sin_cos();
        let stride = self.stride_length;
        let x = self.foothold(leg, n) + stride * (s - sin / (2.0 * PI));
        let z = 0.5 * self.swing_apex * (1.0 - cos);
        FootState {
            position: Vector2::new(x, z),
            velocity: Vector2::new(
                stride * (1.0 - cos) / swing_time,
                self.swing_apex * PI * sin / swing_time,
            ),
            stance: false,
        }
    }

    /// COM displacement over one period.
    pub fn distance_per_cycle(&self) -> f64 {
        self.stride_length
    }
}
