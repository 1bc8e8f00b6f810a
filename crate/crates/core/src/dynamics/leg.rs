//! Massless symmetric two-link leg in polar form.
//!
//! The leg is described by the hip angle `phi` (from straight down, positive
//! with the foot ahead of the hip) and the hip-to-foot length `ell`. The knee
//! angle `q` closes the chain through `ell = 2 l sin(q / 2)`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LegError {
    #[error("foot at distance {distance:.6} m is outside the leg workspace (0, {limit:.6})")]
    Unreachable { distance: f64, limit: f64 },
    #[error("knee singularity: straight leg cannot balance an axial force of {0:.6} N")]
    Singular(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegConfig {
    pub phi: f64,
    pub ell: f64,
    pub knee: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointTorques {
    pub hip: f64,
    pub knee: f64,
}

pub fn leg_ik(hip: Vector2<f64>, foot: Vector2<f64>, link: f64) -> Result<LegConfig, LegError> {
    let r = foot - hip;
    let ell = r.norm();
    let limit = 2.0 * link;
    if !(ell > 0.0 && ell < limit) {
        return Err(LegError::Unreachable { distance: ell, limit });
    }
    Ok(LegConfig {
        phi: r.x.atan2(-r.y),
        ell,
        knee: 2.0 * (ell / limit).asin(),
    })
}

/// Foot position from the polar coordinates.
pub fn leg_fk(hip: Vector2<f64>, cfg: &LegConfig) -> Vector2<f64> {
    let (s, c) = cfg.phi.sin_cos();
    hip + cfg.ell * Vector2::new(s, -c)
}

/// Foot position from hip and knee angles only.
pub fn leg_fk_joints(hip: Vector2<f64>, phi: f64, knee: f64, link: f64) -> Vector2<f64> {
    leg_fk(hip, &LegConfig { phi, ell: 2.0 * link * (0.5 * knee).sin(), knee })
}

/// `d ell / d q`.
pub fn knee_lever(cfg: &LegConfig, link: f64) -> f64 {
    link * (0.5 * cfg.knee).cos()
}

/// Jacobian of the hip-to-foot vector with respect to `(phi, q)`.
pub fn leg_jacobian(cfg: &LegConfig, link: f64) -> Matrix2<f64> {
    let (s, c) = cfg.phi.sin_cos();
    let lever = knee_lever(cfg, link);
    Matrix2::new(cfg.ell * c, s * lever, cfg.ell * s, -c * lever)
}

/// Unit vector from foot to hip (axial, compression positive) and the
/// tangential direction used for the hip moment.
fn leg_axes(cfg: &LegConfig) -> (Vector2<f64>, Vector2<f64>) {
    let (s, c) = cfg.phi.sin_cos();
    (Vector2::new(-s, c), Vector2::new(-c, -s))
}

/// Joint torques that hold a ground reaction `force` on the foot of a
/// massless leg: `tau_hip = F_t ell`, `tau_knee = F_a l cos(q / 2)`.
pub fn joint_torques_from_foot_force(
    cfg: &LegConfig,
    force: Vector2<f64>,
    link: f64,
) -> Result<JointTorques, LegError> {
    let (axial, tangential) = leg_axes(cfg);
    let fa = force.dot(&axial);
    let ft = force.dot(&tangential);
    let lever = knee_lever(cfg, link);
    if lever.abs() < 1e-12 && fa != 0.0 {
        return Err(LegError::Singular(fa));
    }
    Ok(JointTorques { hip: ft * cfg.ell, knee: fa * lever })
}

/// Ground reaction produced at the foot by joint torques `tau`: the inverse of
/// [`joint_torques_from_foot_force`].
pub fn foot_force_from_joint_torques(
    cfg: &LegConfig,
    tau: &JointTorques,
    link: f64,
) -> Result<Vector2<f64>, LegError> {
    // tau = -J^T F
    let jt = leg_jacobian(cfg, link).transpose();
    let lu = jt.lu();
    lu.solve(&Vector2::new(-tau.hip, -tau.knee))
        .ok_or(LegError::Singular(tau.knee))
}

/// Joint rates `(phi_dot, q_dot)` for relative foot velocity `r_dot = v_foot - v_hip`.
pub fn joint_rates(
    hip: Vector2<f64>,
    foot: Vector2<f64>,
    r_dot: Vector2<f64>,
    cfg: &LegConfig,
    link: f64,
) -> (f64, f64) {
    let r = foot - hip;
    let ell2 = r.norm_squared();
    let phi_dot = (-r.y * r_dot.x + r.x * r_dot.y) / ell2;
    let ell_dot = r.dot(&r_dot) / cfg.ell;
    (phi_dot, ell_dot / knee_lever(cfg, link))
}
