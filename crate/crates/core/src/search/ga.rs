//! Real-coded genetic algorithm over box-bounded genes.
//!
//! The generation loop owns the RNG and runs sequentially; only fitness
//! evaluation goes through the executor, so a seed fixes the run for any
//! worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::exec::Executor;
use super::SearchError;

/// Reseeds of an all-infeasible initial population before giving up.
pub const MAX_RESEEDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_sigma: f64,
    pub elitism_count: usize,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 100,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_sigma: 0.1,
            elitism_count: 2,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let fail = |m: String| Err(SearchError::InvalidConfig(m));
        if self.population_size < 2 {
            return fail(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if self.generations < 1 {
            return fail("generations must be >= 1".into());
        }
        if self.elitism_count < 1 || self.elitism_count >= self.population_size {
            return fail(format!(
                "elitism_count must be in [1, population_size), got {}",
                self.elitism_count
            ));
        }
        for (name, v) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.mutation_sigma.is_finite() && self.mutation_sigma >= 0.0) {
            return fail(format!("mutation_sigma must be >= 0, got {}", self.mutation_sigma));
        }
        Ok(())
    }
}

/// Best and mean finite fitness of one generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    /// Mean over finite fitness values; `inf` if there are none.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
}

fn stats(generation: usize, fitness: &[f64]) -> GenerationStats {
    let best = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let finite: Vec<f64> = fitness.iter().copied().filter(|f| f.is_finite()).collect();
    let mean = if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    GenerationStats { generation, best, mean }
}

fn random_genes(bounds: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
        .collect()
}

/// Index of the lowest fitness; ties go to the lower index.
fn argmin(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (i, f) in fitness.iter().enumerate() {
        if *f < fitness[best] {
            best = i;
        }
    }
    best
}

fn tournament(fitness: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[b] < fitness[a] {
        b
    } else {
        a
    }
}

/// Minimises `fitness` over the box `bounds`. Fitness may be `+inf` for
/// infeasible genes.
pub fn evolve_with<F>(
    bounds: &[(f64, f64)],
    cfg: &GaConfig,
    exec: &Executor,
    fitness: F,
) -> Result<GaResult, SearchError>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    cfg.validate()?;
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(SearchError::InvalidConfig("gene bounds must be finite with lo <= hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let eval = |pop: &[Vec<f64>]| exec.map(pop, |g| fitness(g));

    let n = cfg.population_size;
    let mut attempts = 0;
    let (mut pop, mut fit) = loop {
        let pop: Vec<Vec<f64>> = (0..n).map(|_| random_genes(bounds, &mut rng)).collect();
        let fit = eval(&pop);
        if fit.iter().any(|f| f.is_finite()) {
            break (pop, fit);
        }
        if attempts == MAX_RESEEDS {
            return Err(SearchError::SearchFailed { attempts: attempts + 1 });
        }
        attempts += 1;
    };

    let normals: Vec<Option<Normal<f64>>> = bounds
        .iter()
        .map(|(lo, hi)| Normal::new(0.0, cfg.mutation_sigma * (hi - lo)).ok().filter(|_| hi > lo))
        .collect();
    let mut history = vec![stats(0, &fit)];
    for generation in 1..cfg.generations {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]).then(a.cmp(&b)));
        let elites: Vec<usize> = order[..cfg.elitism_count].to_vec();

        let mut children = Vec::with_capacity(n - elites.len());
        while children.len() < n - elites.len() {
            let a = &pop[tournament(&fit, &mut rng)];
            let b = &pop[tournament(&fit, &mut rng)];
            let mut child = if rng.random_bool(cfg.crossover_rate) {
                a.iter().zip(b).map(|(x, y)| if rng.random_bool(0.5) { *x } else { *y }).collect()
            } else {
                a.clone()
            };
            for ((g, &(lo, hi)), normal) in child.iter_mut().zip(bounds).zip(&normals) {
                if let Some(normal) = normal {
                    if rng.random_bool(cfg.mutation_rate) {
                        *g = (*g + normal.sample(&mut rng)).clamp(lo, hi);
                    }
                }
            }
            children.push(child);
        }
        let child_fit = eval(&children);

        let mut next_pop: Vec<Vec<f64>> = elites.iter().map(|&i| pop[i].clone()).collect();
        let mut next_fit: Vec<f64> = elites.iter().map(|&i| fit[i]).collect();
        next_pop.extend(children);
        next_fit.extend(child_fit);
        pop = next_pop;
        fit = next_fit;
        history.push(stats(generation, &fit));
    }

    let i = argmin(&fit);
    Ok(GaResult { best: pop[i].clone(), best_fitness: fit[i], history })
}
