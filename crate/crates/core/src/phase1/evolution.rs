use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::decode::{Decoder, ShareSampling};
use super::operators::{crossover_1pt, merge_populations, mutate_reposition, rank, tournament};
use super::Candidate;
use crate::dataset::Dataset;
use crate::model::{PartIdx, SourcingMode};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Number of best candidates returned.
    pub elite_return_count: usize,
    pub seed: u64,
    pub mode: SourcingMode,
    /// Parallel final-assembly units for the root part.
    pub fal_count: usize,
    pub share_sampling: ShareSampling,
    pub unused_preference: f64,
}

impl Default for EaConfig {
    fn default() -> Self {
        EaConfig {
            population_size: 500,
            max_generations: 200,
            tournament_size: 3,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            elite_return_count: 5,
            seed: 0,
            mode: SourcingMode::Single,
            fal_count: 1,
            share_sampling: ShareSampling::Grid,
            unused_preference: 1.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EaConfigError {
    #[error("{0} must be at least 1")]
    Size(&'static str),
    #[error("{name} = {value} is outside [0, 1]")]
    Rate { name: &'static str, value: f64 },
    #[error("tournament size {tournament} exceeds population size {population}")]
    Tournament { tournament: usize, population: usize },
}

impl EaConfig {
    pub fn validate(&self) -> Result<(), EaConfigError> {
        for (name, v) in [
            ("population_size", self.population_size),
            ("tournament_size", self.tournament_size),
            ("elite_return_count", self.elite_return_count),
            ("fal_count", self.fal_count),
        ] {
            if v == 0 {
                return Err(EaConfigError::Size(name));
            }
        }
        for (name, value) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
            ("unused_preference", self.unused_preference),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(EaConfigError::Rate { name, value });
            }
        }
        if self.tournament_size > self.population_size {
            return Err(EaConfigError::Tournament {
                tournament: self.tournament_size,
                population: self.population_size,
            });
        }
        Ok(())
    }
}

/// One row of the run trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub gen: usize,
    pub best_sr: f64,
    pub mean_sr: f64,
    pub best_dist: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Phase1Result<S> {
    /// Best candidates of the final population, best first.
    pub best: Vec<Candidate<S>>,
    /// Generation 0 is the initial population.
    pub trace: Vec<GenerationStats>,
    /// Set when no complete assignment was found.
    pub diagnostic: Option<String>,
}

impl<S: Scalar> Phase1Result<S> {
    pub fn champion(&self) -> &Candidate<S> {
        &self.best[0]
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("gen,best_sr,mean_sr,best_dist\n");
        for g in &self.trace {
            let dist = g.best_dist.map(|d| format!("{d:.3}")).unwrap_or_default();
            out.push_str(&format!("{},{:.6},{:.6},{}\n", g.gen, g.best_sr, g.mean_sr, dist));
        }
        out
    }
}

/// Decode stream for candidate `idx` of generation `gen`, independent of
/// evaluation order.
fn derived_rng(seed: u64, gen: usize, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((gen as u64 + 1) << 32) | idx as u64);
    rng
}

fn evaluate<S: Scalar>(decoder: &Decoder<'_, S>, lists: Vec<Vec<PartIdx>>, seed: u64, gen: usize) -> Vec<Candidate<S>> {
    let ds = decoder.dataset();
    let m = ds.part_count();
    lists
        .into_par_iter()
        .enumerate()
        .map(|(idx, list)| {
            let mut rng = derived_rng(seed, gen, idx);
            let out = decoder.decode(&list, &mut rng);
            let dist = if out.placed == m {
                decoder.bounds().total(ds, &out.assignment).ok()
            } else {
                None
            };
            Candidate {
                sr: out.sr(m),
                placed: out.placed,
                dist,
                assignment: out.assignment,
                priority_list: list,
            }
        })
        .collect()
}

fn stats<S: Scalar>(gen: usize, pop: &[Candidate<S>]) -> GenerationStats {
    let best = pop.iter().min_by(|a, b| rank(a, b)).expect("non-empty population");
    let mean = pop.iter().map(|c| c.sr.as_f64()).sum::<f64>() / pop.len() as f64;
    GenerationStats {
        gen,
        best_sr: best.sr.as_f64(),
        mean_sr: mean,
        best_dist: best.dist.map(Scalar::as_f64),
    }
}

/// Runs the evolutionary search. Deterministic for a given dataset and
/// configuration regardless of the number of worker threads.
pub fn run_phase1<S: Scalar>(ds: &Dataset<S>, config: &EaConfig) -> Result<Phase1Result<S>, EaConfigError> {
    config.validate()?;
    let mut decoder = Decoder::new(ds, config.mode).with_fal_count(config.fal_count);
    decoder.share_sampling = config.share_sampling;
    decoder.unused_preference = config.unused_preference;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let parts: Vec<PartIdx> = (0..ds.part_count()).map(PartIdx).collect();
    let initial: Vec<Vec<PartIdx>> = (0..config.population_size)
        .map(|_| {
            let mut l = parts.clone();
            l.shuffle(&mut rng);
            l
        })
        .collect();
    let mut pop = evaluate(&decoder, initial, config.seed, 0);
    let mut trace = vec![stats(0, &pop)];

    for gen in 1..=config.max_generations {
        let mut lists = Vec::with_capacity(pop.len());
        while lists.len() < pop.len() {
            let p1 = tournament(&pop, config.tournament_size, &mut rng);
            let p2 = tournament(&pop, config.tournament_size, &mut rng);
            let child = if rng.gen_bool(config.crossover_rate) {
                let c = crossover_1pt(&p1.priority_list, &p2.priority_list, &mut rng);
                if rng.gen_bool(config.mutation_rate) {
                    mutate_reposition(&c, &mut rng)
                } else {
                    c
                }
            } else {
                mutate_reposition(&p1.priority_list, &mut rng)
            };
            lists.push(child);
        }
        let interpop = evaluate(&decoder, lists, config.seed, gen);
        pop = merge_populations(pop, interpop);
        trace.push(stats(gen, &pop));
    }

    pop.sort_by(rank);
    pop.truncate(config.elite_return_count.min(pop.len()));
    let diagnostic = (pop[0].placed < ds.part_count()).then(|| {
        let champion = &pop[0];
        let stuck = champion
            .priority_list
            .get(champion.placed)
            .map(|&p| ds.part(p).id.clone())
            .unwrap_or_default();
        format!(
            "no complete assignment found: best candidate placed {}/{} parts and stopped at `{stuck}`",
            champion.placed,
            ds.part_count()
        )
    });
    Ok(Phase1Result {
        best: pop,
        trace,
        diagnostic,
    })
}
