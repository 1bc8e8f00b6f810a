//! Planar (sagittal) quadruped model with massless legs: inverse dynamics
//! along the prescribed gait, a forward-dynamics validator and the support
//! stability margin.

mod contact;
mod forward;
mod inverse;
mod leg;
mod stability;

use thiserror::Error;

pub use contact::{
    balance_residual, cross, distribute_contact_forces, required_net_wrench, ContactError,
    ContactForce, Wrench,
};
pub use forward::{forward_simulate, Gains, SimConfig, SimError, SimLeg, SimSample, SimTrace, TorsoState};
pub use inverse::{
    inverse_dynamics_at, inverse_dynamics_trace, time_grid, IdSample, InverseDynamicsTrace,
    JointSample, LegSample, PlanarState, StateTrace, TorqueTrace,
};
pub use leg::{
    foot_force_from_joint_torques, joint_rates, joint_torques_from_foot_force, knee_lever,
    leg_fk, leg_fk_joints, leg_ik, leg_jacobian, JointTorques, LegConfig, LegError,
};
pub use stability::{sagittal_margin, stability_margin, Margin, StabilityError, SupportPolygon};

use crate::gait::LegId;

/// Default Coulomb friction coefficient.
pub const DEFAULT_MU: f64 = 0.6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsErrorKind {
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error("leg {leg}: {source}")]
    Leg { leg: LegId, source: LegError },
    #[error("invalid time step {0}")]
    InvalidStep(f64),
}

/// A dynamics failure with the time stamp it occurred at.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("at t = {t:.6} s: {kind}")]
pub struct DynamicsError {
    pub t: f64,
    pub kind: DynamicsErrorKind,
}

impl DynamicsError {
    pub(crate) fn at(t: f64, kind: impl Into<DynamicsErrorKind>) -> Self {
        Self { t, kind: kind.into() }
    }
}
