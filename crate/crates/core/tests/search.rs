use std::sync::atomic::{AtomicBool, Ordering};

use mvam::config::{default_design_space, Config};
use mvam::energetics::{EvalConfig, EvaluationRecord};
use mvam::morphology::{BaseStructure, Bounds, ComponentSpec, DesignSpaceSpec, Geometry};
use mvam::search::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rec(id: usize, tcot: f64, margin: f64) -> EvaluationRecord {
    EvaluationRecord {
        id,
        cx: 0.0,
        cy: 0.0,
        ib: 0.1,
        mass: 4.3,
        tcot: Some(tcot),
        payload_margin: Some(margin),
        min_stability_margin: Some(0.1),
        feasible: true,
        reason: None,
    }
}

/// Quantised objectives so ties and duplicates occur.
fn random_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<EvaluationRecord> {
    (0..n)
        .map(|i| {
            let mut r = rec(i, rng.random_range(0..40) as f64 / 100.0, rng.random_range(0..30) as f64 / 10.0);
            r.feasible = rng.random_bool(0.9);
            r
        })
        .collect()
}

fn brute_force_front(records: &[EvaluationRecord]) -> Vec<usize> {
    let pts: Vec<(usize, (f64, f64))> = records
        .iter()
        .filter(|r| r.feasible)
        .map(|r| (r.id, (r.tcot.unwrap(), r.payload_margin.unwrap())))
        .collect();
    let mut ids: Vec<usize> = pts
        .iter()
        .filter(|(_, p)| !pts.iter().any(|(_, q)| dominates(*q, *p)))
        .map(|(i, _)| *i)
        .collect();
    ids.sort();
    ids
}

#[test]
fn pareto_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let records = random_records(&mut rng, 200);
        let mut got: Vec<usize> = pareto_front(&records).unwrap().iter().map(|r| r.id).collect();
        got.sort();
        assert_eq!(got, brute_force_front(&records));
    }
}

proptest! {
    #[test]
    fn pareto_is_idempotent(seed in 0u64..1000, n in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut records = random_records(&mut rng, n);
        records[0].feasible = true;
        let once = pareto_front(&records).unwrap();
        let twice = pareto_front(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn ga_respects_bounds_and_elitism(seed in 0u64..500) {
        let bounds = [(-1.0, 2.0), (0.5, 0.5), (-3.0, -1.0)];
        let out_of_bounds = AtomicBool::new(false);
        let cfg = GaConfig { population_size: 12, generations: 15, rng_seed: seed, ..GaConfig::default() };
        let run = evolve_with(&bounds, &cfg, &Executor::sequential(), |g| {
            if g.iter().zip(&bounds).any(|(x, (lo, hi))| x < lo || x > hi) {
                out_of_bounds.store(true, Ordering::Relaxed);
            }
            g.iter().map(|x| (x - 0.3).powi(2)).sum::<f64>().sqrt().sin().abs()
        })
        .unwrap();
        prop_assert!(!out_of_bounds.load(Ordering::Relaxed));
        prop_assert_eq!(run.history.len(), 15);
        for w in run.history.windows(2) {
            prop_assert!(w[1].best <= w[0].best);
        }
        prop_assert_eq!(run.best_fitness, run.history.last().unwrap().best);
    }
}

fn sphere(g: &[f64], center: &[f64]) -> f64 {
    g.iter().zip(center).map(|(x, c)| (x - c).powi(2)).sum()
}

#[test]
fn sphere_optimum_found_with_defaults() {
    let bounds = [(-2.0, 4.0), (0.0, 10.0), (-1.0, 1.0)];
    let center: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    for seed in 0..3 {
        let cfg = GaConfig { rng_seed: seed, ..GaConfig::default() };
        let run = evolve_with(&bounds, &cfg, &Executor::sequential(), |g| sphere(g, &center)).unwrap();
        for ((x, c), (lo, hi)) in run.best.iter().zip(&center).zip(&bounds) {
            assert!((x - c).abs() <= 0.01 * (hi - lo), "seed {seed}: {x} vs {c}");
        }
    }
}

#[test]
fn ga_is_seed_deterministic_for_any_worker_count() {
    let bounds = [(-1.0, 1.0); 4];
    let cfg = GaConfig { population_size: 20, generations: 25, rng_seed: 42, ..GaConfig::default() };
    let f = |g: &[f64]| sphere(g, &[0.1, -0.2, 0.3, 0.0]);
    let a = evolve_with(&bounds, &cfg, &Executor::sequential(), f).unwrap();
    let b = evolve_with(&bounds, &cfg, &Executor::parallel(Some(4)), f).unwrap();
    let c = evolve_with(&bounds, &cfg, &Executor::sequential(), f).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = evolve_with(&bounds, &GaConfig { rng_seed: 43, ..cfg }, &Executor::sequential(), f).unwrap();
    assert_ne!(a.history, other.history);
}

fn one_sample_space() -> DesignSpaceSpec {
    DesignSpaceSpec::new(
        vec![ComponentSpec::point_mass("bay", 2.0, Bounds::point(0.03, 0.0))],
        BaseStructure { mass: 2.3, com: [0.0, 0.0], inertia: 0.1 },
        Geometry::default(),
    )
}

#[test]
fn sweep_counts_and_order() {
    let cfg = Config::default();
    let eval = EvalConfig { compute_payload: false, ..cfg.evaluation };
    let one = grid_sweep(&one_sample_space(), &cfg.gait, &cfg.actuators, &eval, &Executor::sequential()).unwrap();
    assert_eq!(one.len(), 1);
    let space = default_design_space();
    let seq = grid_sweep(&space, &cfg.gait, &cfg.actuators, &eval, &Executor::sequential()).unwrap();
    let par = grid_sweep(&space, &cfg.gait, &cfg.actuators, &eval, &Executor::parallel(Some(3))).unwrap();
    assert_eq!(seq.len(), space.sample_count() as usize);
    assert_eq!(seq, par);
    assert!(seq.iter().enumerate().all(|(i, r)| r.id == i));
}

#[test]
fn evolve_stays_in_the_design_space() {
    let cfg = Config::default();
    let spec = default_design_space();
    let ga = GaConfig { population_size: 10, generations: 4, rng_seed: 7, ..GaConfig::default() };
    let run = evolve(&spec, &cfg.gait, &cfg.actuators, &cfg.evaluation, &ga, &Executor::sequential()).unwrap();
    assert_eq!(run.history.len(), 4);
    for (p, c) in run.placements.iter().zip(&spec.components) {
        assert!(c.bounds.contains(p.position));
    }
    assert!(run.best.feasible);
    assert!(run.best.payload_margin.is_some());
}

#[test]
fn all_infeasible_space_fails_the_search() {
    let mut cfg = Config::default();
    cfg.actuators.knee = cfg.actuators.knee.with_limits(0.01, 1.0);
    let ga = GaConfig { population_size: 4, generations: 2, ..GaConfig::default() };
    let r = evolve(&default_design_space(), &cfg.gait, &cfg.actuators, &cfg.evaluation, &ga, &Executor::sequential());
    assert_eq!(r.unwrap_err(), SearchError::SearchFailed { attempts: MAX_RESEEDS + 1 });
}
