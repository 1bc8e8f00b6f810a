//! Morphology evaluation for a planar quadruped: aggregate a design's inertial
//! parameters, walk it through a prescribed trot with inverse dynamics, turn
//! joint torques into electrical energy and search the design space for low
//! cost of transport.

pub mod actuation;
pub mod config;
pub mod dynamics;
pub mod energetics;
pub mod gait;
pub mod morphology;
pub mod search;

/// Standard gravity, m/s^2.
pub const GRAVITY: f64 = 9.81;
