use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{crossover, perturb};
use super::{Evaluator, Method, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{random_sequence_with, Instance, ObjectiveSpec, ObjectiveVector, OperationSequence};

/// Nondominated layer index of every vector, starting at 1.
pub fn pareto_rank(vectors: &[ObjectiveVector]) -> Vec<usize> {
    let mut rank = vec![0usize; vectors.len()];
    let mut unranked: Vec<usize> = (0..vectors.len()).collect();
    let mut layer = 1;
    while !unranked.is_empty() {
        let front: Vec<usize> = unranked
            .iter()
            .copied()
            .filter(|&i| !unranked.iter().any(|&j| vectors[j].dominates(&vectors[i])))
            .collect();
        for &i in &front {
            rank[i] = layer;
        }
        unranked.retain(|i| rank[*i] == 0);
        layer += 1;
    }
    rank
}

/// Generational elitist EA over gene strings.
///
/// Per generation: μ offspring from binary tournaments on Pareto rank,
/// crossover with the configured probability (else a copy of the first
/// parent), then mutation with the configured probability. Afterwards up to
/// `elitism_fraction · μ` archive members, sampled uniformly, replace the
/// worst-ranked offspring.
pub fn moea_run(inst: &Instance, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveReport> {
    let config = SolverConfig {
        method: Method::Moea,
        ..config.clone()
    };
    super::solve(inst, spec, &config)
}

type Member = (OperationSequence, ObjectiveVector);

pub(super) fn run(eval: &mut Evaluator<'_>, config: &SolverConfig) -> Result<()> {
    let mu = config.population_size;
    if config.budget < mu as u64 {
        return Err(Error::contract(format!(
            "budget {} is smaller than the population size {mu}",
            config.budget
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pop: Vec<Member> = Vec::with_capacity(mu);
    for _ in 0..mu {
        let seq = random_sequence_with(eval.inst, &mut rng);
        let v = eval.evaluate(&seq).expect("budget covers the initial population");
        pop.push((seq, v));
    }

    let elites = ((mu as f64) * config.elitism_fraction).floor() as usize;
    loop {
        if eval.exhausted() {
            return Ok(());
        }
        let ranks = pareto_rank(&pop.iter().map(|m| m.1.clone()).collect::<Vec<_>>());
        let mut offspring: Vec<Member> = Vec::with_capacity(mu);
        while offspring.len() < mu {
            let a = tournament(&ranks, &mut rng);
            let b = tournament(&ranks, &mut rng);
            let mut child = if rng.gen_bool(config.crossover_probability) {
                crossover(&pop[a].0, &pop[b].0, config.crossover, &mut rng)?
            } else {
                pop[a].0.clone()
            };
            if rng.gen_bool(config.mutation_probability) {
                child = perturb(&child, config.mutation, &mut rng);
            }
            match eval.evaluate(&child) {
                Some(v) => offspring.push((child, v)),
                None => return Ok(()),
            }
        }
        pop = offspring;
        eval.iterations += 1;

        let archive = eval.archive();
        let e = elites.min(archive.len());
        if e > 0 {
            let ranks = pareto_rank(&pop.iter().map(|m| m.1.clone()).collect::<Vec<_>>());
            let mut worst: Vec<usize> = (0..mu).collect();
            worst.sort_by(|&x, &y| ranks[y].cmp(&ranks[x]).then(y.cmp(&x)));
            let picks = sample(&mut rng, archive.len(), e);
            for (slot, idx) in worst.into_iter().zip(picks.iter()) {
                let entry = &archive.entries()[idx];
                pop[slot] = (entry.payload.sequence.clone(), entry.vector.clone());
            }
        }
    }
}

fn tournament<R: Rng + ?Sized>(ranks: &[usize], rng: &mut R) -> usize {
    let i = rng.gen_range(0..ranks.len());
    let j = rng.gen_range(0..ranks.len());
    match ranks[i].cmp(&ranks[j]) {
        std::cmp::Ordering::Less => i,
        std::cmp::Ordering::Greater => j,
        std::cmp::Ordering::Equal => {
            if rng.gen_bool(0.5) {
                i
            } else {
                j
            }
        }
    }
}
