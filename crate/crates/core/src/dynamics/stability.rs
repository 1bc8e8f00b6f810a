//! Support-polygon stability margin: signed distance from the projected COM
//! to the boundary of the support region.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::contact::cross;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("support polygon has no contact points")]
    Empty,
    #[error("support polygon has a non-finite point")]
    NonFinite,
}

/// Ordered stance contact points (convex, either winding).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPolygon {
    pub points: Vec<Vector2<f64>>,
}

impl SupportPolygon {
    pub fn new(points: Vec<Vector2<f64>>) -> Result<Self, StabilityError> {
        if points.is_empty() {
            return Err(StabilityError::Empty);
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(StabilityError::NonFinite);
        }
        Ok(Self { points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    /// Positive inside, zero on the boundary, negative outside, m.
    pub value: f64,
    /// Set when the support has no interior (a point or a segment).
    pub degenerate: bool,
}

pub(crate) fn segment_distance(p: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Signed distance from `com` to the polygon boundary.
///
/// Inside a convex polygon the nearest boundary point is the foot of the
/// perpendicular on the closest edge line, so the margin is the smallest
/// edge-line distance; outside it is minus the smallest edge-segment distance.
pub fn stability_margin(com: Vector2<f64>, polygon: &SupportPolygon) -> Margin {
    let pts = &polygon.points;
    match pts.len() {
        0 => Margin { value: f64::NEG_INFINITY, degenerate: true },
        1 => Margin { value: -(com - pts[0]).norm(), degenerate: true },
        2 => Margin { value: -segment_distance(com, pts[0], pts[1]), degenerate: true },
        n => {
            let area2: f64 = (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum();
            if area2 == 0.0 {
                let d = (0..n)
                    .map(|i| segment_distance(com, pts[i], pts[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                return Margin { value: -d, degenerate: true };
            }
            let orient = area2.signum();
            let mut inside = true;
            let mut line_min = f64::INFINITY;
            let mut seg_min = f64::INFINITY;
            for i in 0..n {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                let edge = b - a;
                let len = edge.norm();
                if len == 0.0 {
                    continue;
                }
                let signed = orient * cross(edge, com - a) / len;
                if signed < 0.0 {
                    inside = false;
                }
                line_min = line_min.min(signed);
                seg_min = seg_min.min(segment_distance(com, a, b));
            }
            let value = if inside { line_min } else { -seg_min };
            Margin { value, degenerate: false }
        }
    }
}

/// Margin along the ground line for the sagittal model: distance from the
/// COM projection to the nearer end of the support segment spanned by the
/// stance feet.
pub fn sagittal_margin(com_x: f64, feet_x: &[f64]) -> Margin {
    match feet_x {
        [] => Margin { value: f64::NEG_INFINITY, degenerate: true },
        _ => {
            let lo = feet_x.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = feet_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                Margin { value: -(com_x - lo).abs(), degenerate: true }
            } else {
                Margin { value: (com_x - lo).min(hi - com_x), degenerate: false }
            }
        }
    }
}
