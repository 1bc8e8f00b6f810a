//! Parametric design space: placeable point-mass components on a torso frame,
//! aggregated into the inertial decision parameters (mass, Cx, Cy, Ib).
//!
//! The torso frame has its origin at the torso geometric centre, `x` pointing
//! forward and `y` pointing up. All COM offsets are expressed in this frame.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of enumerated samples.
pub const DEFAULT_SAMPLE_CAP: usize = 1_000_000;

/// Default deadband used by [`classify_morphology`], m.
pub const DEFAULT_DEADBAND: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorphologyError {
    #[error("component `{component}` placed at ({x}, {y}) outside its bounds")]
    OutOfBounds { component: String, x: f64, y: f64 },
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` has no placement")]
    MissingPlacement(String),
    #[error("component `{0}` placed more than once")]
    DuplicatePlacement(String),
    #[error("degenerate design: total mass is zero")]
    Degenerate,
    #[error("invalid design space: {0}")]
    InvalidSpec(String),
    #[error("design space has {count} samples, above the cap of {cap}")]
    SpaceTooLarge { count: u128, cap: usize },
}

/// Axis-aligned rectangle in the torso frame, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub fn point(x: f64, y: f64) -> Self {
        Self { xmin: x, xmax: x, ymin: y, ymax: y }
    }

    pub fn contains(&self, p: Vector2<f64>) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn clamp(&self, p: Vector2<f64>) -> Vector2<f64> {
        Vector2::new(p.x.clamp(self.xmin, self.xmax), p.y.clamp(self.ymin, self.ymax))
    }

    pub fn center(&self) -> Vector2<f64> {
        Vector2::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    fn is_valid(&self) -> bool {
        [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite())
            && self.xmin <= self.xmax
            && self.ymin <= self.ymax
    }
}

/// Grid resolution per axis used by [`enumerate_design_space`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 1, ny: 1 }
    }
}

/// One placeable mass.
///
/// A `mirror_x` component is a symmetric pair: half the mass sits at the
/// placement `(x, y)` and half at `(-x, y)`. It moves `Ib` without moving `Cx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub name: String,
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    pub bounds: Bounds,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub mirror_x: bool,
    /// Own inertia about the component's centre, kg m^2.
    #[serde(rename = "inertia_kgm2", default)]
    pub inertia: f64,
}

impl ComponentSpec {
    pub fn point_mass(name: impl Into<String>, mass: f64, bounds: Bounds) -> Self {
        Self {
            name: name.into(),
            mass,
            bounds,
            grid: GridSpec::default(),
            mirror_x: false,
            inertia: 0.0,
        }
    }

    pub fn with_grid(mut self, nx: usize, ny: usize) -> Self {
        self.grid = GridSpec { nx, ny };
        self
    }

    pub fn mirrored(mut self) -> Self {
        self.mirror_x = true;
        self
    }

    /// Point masses `(mass, position, own inertia)` this component contributes.
    fn masses_at(&self, p: Vector2<f64>) -> impl Iterator<Item = (f64, Vector2<f64>, f64)> {
        let (first, second) = if self.mirror_x {
            let half = 0.5 * self.mass;
            let half_i = 0.5 * self.inertia;
            (
                (half, p, half_i),
                Some((half, Vector2::new(-p.x, p.y), half_i)),
            )
        } else {
            ((self.mass, p, self.inertia), None)
        };
        std::iter::once(first).chain(second)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub component: String,
    pub position: Vector2<f64>,
}

impl Placement {
    pub fn new(component: impl Into<String>, x: f64, y: f64) -> Self {
        Self { component: component.into(), position: Vector2::new(x, y) }
    }
}

/// Fixed torso and leg dimensions, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(rename = "torso_length_m")]
    pub torso_length: f64,
    #[serde(rename = "torso_height_m", default = "default_torso_height")]
    pub torso_height: f64,
    #[serde(rename = "hip_spacing_m")]
    pub hip_spacing: f64,
    #[serde(rename = "leg_link_length_m")]
    pub leg_link_length: f64,
}

fn default_torso_height() -> f64 {
    0.1
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            torso_length: 0.4,
            torso_height: default_torso_height(),
            hip_spacing: 0.4,
            leg_link_length: 0.2,
        }
    }
}

impl Geometry {
    fn validate(&self) -> Result<(), MorphologyError> {
        let lengths = [self.torso_length, self.torso_height, self.hip_spacing, self.leg_link_length];
        if lengths.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(MorphologyError::InvalidSpec("geometry lengths must be positive".into()));
        }
        if self.hip_spacing > self.torso_length {
            return Err(MorphologyError::InvalidSpec(
                "hip_spacing_m must not exceed torso_length_m".into(),
            ));
        }
        Ok(())
    }
}

/// Structure mass that does not move between designs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseStructure {
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    pub com: [f64; 2],
    #[serde(rename = "inertia_kgm2")]
    pub inertia: f64,
}

/// Aggregated inertial and geometric parameters of one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    pub mass: f64,
    /// (Cx, Cy) relative to the torso geometric centre.
    pub com_offset: Vector2<f64>,
    /// Sagittal moment of inertia about the COM.
    pub inertia_sagittal: f64,
    pub torso_length: f64,
    pub torso_height: f64,
    pub hip_spacing: f64,
    pub leg_link_length: f64,
}

impl BodyParams {
    /// Lumped body with the default geometry.
    pub fn lumped(mass: f64, com_offset: Vector2<f64>, inertia_sagittal: f64) -> Self {
        Self::from_parts(mass, com_offset, inertia_sagittal, &Geometry::default())
    }

    pub fn from_parts(
        mass: f64,
        com_offset: Vector2<f64>,
        inertia_sagittal: f64,
        geometry: &Geometry,
    ) -> Self {
        Self {
            mass,
            com_offset,
            inertia_sagittal,
            torso_length: geometry.torso_length,
            torso_height: geometry.torso_height,
            hip_spacing: geometry.hip_spacing,
            leg_link_length: geometry.leg_link_length,
        }
    }

    pub fn cx(&self) -> f64 {
        self.com_offset.x
    }

    pub fn cy(&self) -> f64 {
        self.com_offset.y
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            torso_length: self.torso_length,
            torso_height: self.torso_height,
            hip_spacing: self.hip_spacing,
            leg_link_length: self.leg_link_length,
        }
    }

    /// Re-aggregates the body with an extra point mass at `at` (torso frame).
    pub fn with_point_mass(&self, mass: f64, at: Vector2<f64>) -> Self {
        if mass == 0.0 {
            return *self;
        }
        let total = self.mass + mass;
        let com = (self.com_offset * self.mass + at * mass) / total;
        let inertia = self.inertia_sagittal
            + self.mass * (self.com_offset - com).norm_squared()
            + mass * (at - com).norm_squared();
        Self { mass: total, com_offset: com, inertia_sagittal: inertia, ..*self }
    }

    pub fn validate(&self) -> Result<(), MorphologyError> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(MorphologyError::Degenerate);
        }
        if !(self.inertia_sagittal.is_finite() && self.inertia_sagittal >= 0.0) {
            return Err(MorphologyError::InvalidSpec("Ib must be nonnegative".into()));
        }
        self.geometry().validate()
    }
}

/// The full parametric design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpaceSpec {
    pub components: Vec<ComponentSpec>,
    pub base: BaseStructure,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default = "default_sample_cap")]
    pub sample_cap: usize,
}

fn default_sample_cap() -> usize {
    DEFAULT_SAMPLE_CAP
}

impl DesignSpaceSpec {
    pub fn new(components: Vec<ComponentSpec>, base: BaseStructure, geometry: Geometry) -> Self {
        Self { components, base, geometry, sample_cap: DEFAULT_SAMPLE_CAP }
    }

    pub fn validate(&self) -> Result<(), MorphologyError> {
        if self.components.is_empty() {
            return Err(MorphologyError::InvalidSpec("at least one component is required".into()));
        }
        self.geometry.validate()?;
        if !(self.base.mass.is_finite() && self.base.mass >= 0.0 && self.base.inertia >= 0.0) {
            return Err(MorphologyError::InvalidSpec(
                "base mass and inertia must be nonnegative".into(),
            ));
        }
        for c in &self.components {
            if !(c.mass.is_finite() && c.mass > 0.0) {
                return Err(MorphologyError::InvalidSpec(format!(
                    "component `{}` mass must be positive",
                    c.name
                )));
            }
            if !c.bounds.is_valid() {
                return Err(MorphologyError::InvalidSpec(format!(
                    "component `{}` bounds must satisfy min <= max",
                    c.name
                )));
            }
            if c.inertia < 0.0 {
                return Err(MorphologyError::InvalidSpec(format!(
                    "component `{}` inertia must be nonnegative",
                    c.name
                )));
            }
            if c.grid.nx == 0 || c.grid.ny == 0 {
                return Err(MorphologyError::InvalidSpec(format!(
                    "component `{}` grid resolution must be at least 1",
                    c.name
                )));
            }
        }
        for (i, c) in self.components.iter().enumerate() {
            if self.components[..i].iter().any(|o| o.name == c.name) {
                return Err(MorphologyError::InvalidSpec(format!(
                    "duplicate component name `{}`",
                    c.name
                )));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.base.mass + self.components.iter().map(|c| c.mass).sum::<f64>()
    }

    /// Placement of every component at the centre of its bounds.
    pub fn center_placements(&self) -> Vec<Placement> {
        self.components
            .iter()
            .map(|c| Placement { component: c.name.clone(), position: c.bounds.center() })
            .collect()
    }

    /// Number of grid samples, without the cap check.
    pub fn sample_count(&self) -> u128 {
        self.components
            .iter()
            .map(|c| c.grid.nx as u128 * c.grid.ny as u128)
            .product()
    }
}

/// One candidate design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphologySample {
    pub id: usize,
    pub placements: Vec<Placement>,
    pub body: BodyParams,
}

impl MorphologySample {
    pub fn new(
        id: usize,
        spec: &DesignSpaceSpec,
        placements: Vec<Placement>,
    ) -> Result<Self, MorphologyError> {
        let body = aggregate_body_params(spec, &placements)?;
        Ok(Self { id, placements, body })
    }
}

/// Composite COM and parallel-axis inertia of the base plus placed components.
pub fn aggregate_body_params(
    spec: &DesignSpaceSpec,
    placements: &[Placement],
) -> Result<BodyParams, MorphologyError> {
    let mut seen = vec![false; spec.components.len()];
    let mut masses: Vec<(f64, Vector2<f64>, f64)> = Vec::with_capacity(placements.len() * 2 + 1);
    if spec.base.mass > 0.0 || spec.base.inertia > 0.0 {
        masses.push((spec.base.mass, Vector2::from(spec.base.com), spec.base.inertia));
    }
    for p in placements {
        let idx = spec
            .components
            .iter()
            .position(|c| c.name == p.component)
            .ok_or_else(|| MorphologyError::UnknownComponent(p.component.clone()))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(MorphologyError::DuplicatePlacement(p.component.clone()));
        }
        let c = &spec.components[idx];
        if !c.bounds.contains(p.position) {
            return Err(MorphologyError::OutOfBounds {
                component: c.name.clone(),
                x: p.position.x,
                y: p.position.y,
            });
        }
        masses.extend(c.masses_at(p.position));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(MorphologyError::MissingPlacement(spec.components[i].name.clone()));
    }

    let mass: f64 = masses.iter().map(|(m, _, _)| m).sum();
    if !(mass > 0.0) {
        return Err(MorphologyError::Degenerate);
    }
    let com = masses.iter().fold(Vector2::zeros(), |acc, (m, p, _)| acc + p * *m) / mass;
    let inertia = masses
        .iter()
        .map(|(m, p, own)| own + m * (p - com).norm_squared())
        .sum();
    Ok(BodyParams::from_parts(mass, com, inertia, &spec.geometry))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForeAft {
    Front,
    Back,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vertical {
    Top,
    Bottom,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphologyClass {
    pub fore_aft: ForeAft,
    pub vertical: Vertical,
}

impl std::fmt::Display for MorphologyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let x = match self.fore_aft {
            ForeAft::Front => "front-heavy",
            ForeAft::Back => "back-heavy",
            ForeAft::Neutral => "neutral-x",
        };
        let y = match self.vertical {
            Vertical::Top => "top-heavy",
            Vertical::Bottom => "bottom-heavy",
            Vertical::Neutral => "neutral-y",
        };
        write!(f, "{x}, {y}")
    }
}

/// Front/back and top/bottom label of a design; offsets within `deadband`
/// of the geometric centre are neutral.
pub fn classify_morphology(body: &BodyParams, deadband: f64) -> MorphologyClass {
    let fore_aft = match body.cx() {
        c if c.abs() < deadband => ForeAft::Neutral,
        c if c > 0.0 => ForeAft::Front,
        _ => ForeAft::Back,
    };
    let vertical = match body.cy() {
        c if c.abs() < deadband => Vertical::Neutral,
        c if c > 0.0 => Vertical::Top,
        _ => Vertical::Bottom,
    };
    MorphologyClass { fore_aft, vertical }
}

/// `i`-th of `n` evenly spaced values on `[lo, hi]`, hitting both ends exactly.
pub(crate) fn grid_value(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 || lo == hi {
        return if n <= 1 { 0.5 * (lo + hi) } else { lo };
    }
    if i + 1 == n {
        return hi;
    }
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Grid points of one component, x-major.
fn component_grid(c: &ComponentSpec) -> Vec<Vector2<f64>> {
    let b = &c.bounds;
    let mut points = Vec::with_capacity(c.grid.nx * c.grid.ny);
    for i in 0..c.grid.nx {
        let x = grid_value(b.xmin, b.xmax, i, c.grid.nx);
        for j in 0..c.grid.ny {
            points.push(Vector2::new(x, grid_value(b.ymin, b.ymax, j, c.grid.ny)));
        }
    }
    points
}

/// Cartesian grid over every component's bounds.
///
/// Ordering is row-major: the first component varies slowest and, within a
/// component, x varies slower than y.
pub fn enumerate_design_space(
    spec: &DesignSpaceSpec,
) -> Result<Vec<MorphologySample>, MorphologyError> {
    spec.validate()?;
    let count = spec.sample_count();
    if count > spec.sample_cap as u128 {
        return Err(MorphologyError::SpaceTooLarge { count, cap: spec.sample_cap });
    }
    let grids: Vec<Vec<Vector2<f64>>> = spec.components.iter().map(component_grid).collect();
    let count = count as usize;
    let mut samples = Vec::with_capacity(count);
    let mut index = vec![0usize; grids.len()];
    for id in 0..count {
        let placements = spec
            .components
            .iter()
            .zip(&grids)
            .zip(&index)
            .map(|((c, g), &k)| Placement { component: c.name.clone(), position: g[k] })
            .collect();
        samples.push(MorphologySample::new(id, spec, placements)?);
        for axis in (0..grids.len()).rev() {
            index[axis] += 1;
            if index[axis] < grids[axis].len() {
                break;
            }
            index[axis] = 0;
        }
    }
    Ok(samples)
}

/// Per-component grid indices of sample `id` in enumeration order.
pub fn grid_indices(spec: &DesignSpaceSpec, id: usize) -> Vec<(usize, usize)> {
    let sizes: Vec<usize> = spec.components.iter().map(|c| c.grid.nx * c.grid.ny).collect();
    let mut rest = id;
    let mut flat = vec![0usize; sizes.len()];
    for axis in (0..sizes.len()).rev() {
        flat[axis] = rest % sizes[axis];
        rest /= sizes[axis];
    }
    flat.iter()
        .zip(&spec.components)
        .map(|(&k, c)| (k / c.grid.ny, k % c.grid.ny))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_space(components: Vec<ComponentSpec>) -> DesignSpaceSpec {
        DesignSpaceSpec::new(
            components,
            BaseStructure { mass: 0.0, com: [0.0, 0.0], inertia: 0.0 },
            Geometry::default(),
        )
    }

    #[test]
    fn single_point_mass() {
        let spec = unit_space(vec![ComponentSpec::point_mass("a", 1.0, Bounds::point(0.1, 0.0))]);
        let body = aggregate_body_params(&spec, &[Placement::new("a", 0.1, 0.0)]).unwrap();
        assert_eq!(body.mass, 1.0);
        assert_relative_eq!(body.com_offset.x, 0.1);
        assert_eq!(body.com_offset.y, 0.0);
        assert_eq!(body.inertia_sagittal, 0.0);
    }

    #[test]
    fn symmetric_pair() {
        let b = Bounds { xmin: -0.2, xmax: 0.2, ymin: 0.0, ymax: 0.0 };
        let spec = unit_space(vec![
            ComponentSpec::point_mass("a", 1.0, b),
            ComponentSpec::point_mass("b", 1.0, b),
        ]);
        let body = aggregate_body_params(
            &spec,
            &[Placement::new("a", -0.1, 0.0), Placement::new("b", 0.1, 0.0)],
        )
        .unwrap();
        assert_eq!(body.mass, 2.0);
        assert_relative_eq!(body.com_offset.norm(), 0.0);
        assert_relative_eq!(body.inertia_sagittal, 0.02, epsilon = 1e-15);
    }

    #[test]
    fn mirrored_component_keeps_com() {
        let spec = unit_space(vec![ComponentSpec::point_mass(
            "drives",
            1.0,
            Bounds { xmin: 0.1, xmax: 0.3, ymin: 0.0, ymax: 0.0 },
        )
        .mirrored()]);
        let body = aggregate_body_params(&spec, &[Placement::new("drives", 0.3, 0.0)]).unwrap();
        assert_eq!(body.com_offset.x, 0.0);
        assert_relative_eq!(body.inertia_sagittal, 0.09, epsilon = 1e-15);
    }

    #[test]
    fn out_of_bounds_names_component() {
        let spec = unit_space(vec![ComponentSpec::point_mass(
            "battery",
            1.0,
            Bounds { xmin: -0.1, xmax: 0.1, ymin: 0.0, ymax: 0.0 },
        )]);
        let err = aggregate_body_params(&spec, &[Placement::new("battery", 0.2, 0.0)]).unwrap_err();
        assert!(matches!(err, MorphologyError::OutOfBounds { ref component, .. } if component == "battery"));
    }

    #[test]
    fn empty_design_is_degenerate() {
        let spec = unit_space(vec![]);
        assert_eq!(aggregate_body_params(&spec, &[]), Err(MorphologyError::Degenerate));
    }

    #[test]
    fn classification() {
        let body = |cx, cy| BodyParams::lumped(1.0, Vector2::new(cx, cy), 0.1);
        let c = classify_morphology(&body(0.03, -0.01), DEFAULT_DEADBAND);
        assert_eq!((c.fore_aft, c.vertical), (ForeAft::Front, Vertical::Bottom));
        let c = classify_morphology(&body(0.0, 0.0), DEFAULT_DEADBAND);
        assert_eq!((c.fore_aft, c.vertical), (ForeAft::Neutral, Vertical::Neutral));
        let c = classify_morphology(&body(-0.05, 0.02), DEFAULT_DEADBAND);
        assert_eq!((c.fore_aft, c.vertical), (ForeAft::Back, Vertical::Top));
        assert_eq!(c.to_string(), "back-heavy, top-heavy");
        let c = classify_morphology(&body(0.0009, -0.0009), DEFAULT_DEADBAND);
        assert_eq!((c.fore_aft, c.vertical), (ForeAft::Neutral, Vertical::Neutral));
    }

    #[test]
    fn enumeration_counts() {
        let b = Bounds { xmin: -0.1, xmax: 0.1, ymin: -0.05, ymax: 0.05 };
        let one = unit_space(vec![ComponentSpec::point_mass("a", 1.0, b)]);
        assert_eq!(enumerate_design_space(&one).unwrap().len(), 1);
        let two = unit_space(vec![
            ComponentSpec::point_mass("a", 1.0, b).with_grid(3, 3),
            ComponentSpec::point_mass("b", 1.0, b).with_grid(3, 3),
        ]);
        let samples = enumerate_design_space(&two).unwrap();
        assert_eq!(samples.len(), 81);
        assert!(samples.iter().enumerate().all(|(i, s)| s.id == i));
        for s in &samples {
            let idx = grid_indices(&two, s.id);
            let b = &two.components[0].bounds;
            assert_eq!(s.placements[0].position.x, grid_value(b.xmin, b.xmax, idx[0].0, 3));
            assert_eq!(s.placements[1].position.y, grid_value(b.ymin, b.ymax, idx[1].1, 3));
        }
    }

    #[test]
    fn enumeration_sweeps_cx_monotonically() {
        let spec = unit_space(vec![ComponentSpec::point_mass(
            "a",
            1.0,
            Bounds { xmin: -0.1, xmax: 0.1, ymin: 0.0, ymax: 0.0 },
        )
        .with_grid(5, 1)]);
        let cx: Vec<f64> = enumerate_design_space(&spec)
            .unwrap()
            .iter()
            .map(|s| s.body.cx())
            .collect();
        // hand-computed: a lone 1 kg mass is its own COM
        for (got, want) in cx.iter().zip([-0.1, -0.05, 0.0, 0.05, 0.1]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        assert_eq!(cx.len(), 5);
    }

    #[test]
    fn enumeration_errors() {
        let b = Bounds::point(0.0, 0.0);
        let zero = unit_space(vec![ComponentSpec::point_mass("a", 1.0, b).with_grid(0, 1)]);
        assert!(matches!(enumerate_design_space(&zero), Err(MorphologyError::InvalidSpec(_))));
        let mut big = unit_space(vec![
            ComponentSpec::point_mass("a", 1.0, b).with_grid(1000, 1),
            ComponentSpec::point_mass("b", 1.0, b).with_grid(1001, 1),
        ]);
        assert!(matches!(
            enumerate_design_space(&big),
            Err(MorphologyError::SpaceTooLarge { count: 1_001_000, .. })
        ));
        big.sample_cap = 2_000_000;
        assert_eq!(big.sample_count(), 1_001_000);
    }

    #[test]
    fn point_mass_reaggregation_matches_aggregate() {
        let b = Bounds { xmin: -0.2, xmax: 0.2, ymin: -0.1, ymax: 0.1 };
        let spec = unit_space(vec![
            ComponentSpec::point_mass("a", 1.5, b),
            ComponentSpec::point_mass("b", 0.5, b),
        ]);
        let a_only = DesignSpaceSpec {
            components: vec![spec.components[0].clone()],
            ..spec.clone()
        };
        let body = aggregate_body_params(&a_only, &[Placement::new("a", 0.1, 0.05)]).unwrap();
        let added = body.with_point_mass(0.5, Vector2::new(-0.15, 0.02));
        let full = aggregate_body_params(
            &spec,
            &[Placement::new("a", 0.1, 0.05), Placement::new("b", -0.15, 0.02)],
        )
        .unwrap();
        assert_relative_eq!(added.mass, full.mass);
        assert_relative_eq!(added.com_offset, full.com_offset, epsilon = 1e-15);
        assert_relative_eq!(added.inertia_sagittal, full.inertia_sagittal, epsilon = 1e-15);
    }
}
