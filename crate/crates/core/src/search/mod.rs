//! Design-space search: exhaustive grid sweep, a genetic algorithm over
//! component placements and Pareto extraction over (TCOT, payload margin).

mod exec;
mod ga;
mod pareto;

use nalgebra::Vector2;
use thiserror::Error;

pub use exec::Executor;
pub use ga::{evolve_with, GaConfig, GaResult, GenerationStats, MAX_RESEEDS};
pub use pareto::{dominates, pareto_front};

use crate::actuation::ActuatorSet;
use crate::energetics::{evaluate_morphology, EvalConfig, EvaluationRecord};
use crate::gait::GaitParams;
use crate::morphology::{
    enumerate_design_space, DesignSpaceSpec, MorphologyError, MorphologySample, Placement,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Morphology(#[from] MorphologyError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("search failed: initial population infeasible after {attempts} attempt(s)")]
    SearchFailed { attempts: usize },
    #[error("no feasible records to build a front from")]
    EmptyFront,
}

/// Evaluates every grid sample of `spec`, in enumeration order.
pub fn grid_sweep(
    spec: &DesignSpaceSpec,
    gait: &GaitParams,
    specs: &ActuatorSet,
    cfg: &EvalConfig,
    exec: &Executor,
) -> Result<Vec<EvaluationRecord>, SearchError> {
    let samples = enumerate_design_space(spec)?;
    Ok(exec.map(&samples, |s| evaluate_morphology(s, gait, specs, cfg)))
}

/// Gene bounds: one `(x, y)` pair per component.
pub fn gene_bounds(spec: &DesignSpaceSpec) -> Vec<(f64, f64)> {
    spec.components
        .iter()
        .flat_map(|c| [(c.bounds.xmin, c.bounds.xmax), (c.bounds.ymin, c.bounds.ymax)])
        .collect()
}

/// Placements encoded by a chromosome.
pub fn decode(spec: &DesignSpaceSpec, genes: &[f64]) -> Vec<Placement> {
    spec.components
        .iter()
        .zip(genes.chunks_exact(2))
        .map(|(c, g)| Placement { component: c.name.clone(), position: Vector2::new(g[0], g[1]) })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveResult {
    pub best: EvaluationRecord,
    pub placements: Vec<Placement>,
    pub history: Vec<GenerationStats>,
}

/// GA over component placements with TCOT as fitness. The payload search is
/// skipped inside the loop and run once for the final best design.
pub fn evolve(
    spec: &DesignSpaceSpec,
    gait: &GaitParams,
    specs: &ActuatorSet,
    eval: &EvalConfig,
    cfg: &GaConfig,
    exec: &Executor,
) -> Result<EvolveResult, SearchError> {
    spec.validate()?;
    let bounds = gene_bounds(spec);
    let inner = EvalConfig { compute_payload: false, ..*eval };
    let fitness = |genes: &[f64]| match MorphologySample::new(0, spec, decode(spec, genes)) {
        Ok(s) => evaluate_morphology(&s, gait, specs, &inner).fitness(),
        Err(_) => f64::INFINITY,
    };
    let run = evolve_with(&bounds, cfg, exec, fitness)?;
    let placements = decode(spec, &run.best);
    let sample = MorphologySample::new(0, spec, placements.clone())?;
    let best = evaluate_morphology(&sample, gait, specs, eval);
    Ok(EvolveResult { best, placements, history: run.history })
}
