use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::perturb;
use super::{Evaluator, Method, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{random_sequence_with, Instance, ObjectiveSpec, ObjectiveVector, OperationSequence};

/// Metropolis acceptance: 1 for non-degrading moves, `exp(-delta / t)`
/// otherwise.
pub fn mosa_accept_probability(delta: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::contract(format!("temperature must be positive, got {t}")));
    }
    Ok(if delta <= 0.0 { 1.0 } else { (-delta / t).exp() })
}

/// One Metropolis draw: accepts non-degrading moves outright and other
/// moves with probability `exp(-delta / t)`.
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, t: f64, rng: &mut R) -> Result<bool> {
    let p = mosa_accept_probability(delta, t)?;
    Ok(p >= 1.0 || rng.gen::<f64>() < p)
}

/// `count` weight vectors spread over the unit simplex in `k` dimensions.
///
/// For two objectives the weights are evenly spaced. Otherwise the points
/// come from the coarsest simplex lattice holding at least `count` points,
/// thinned by farthest-point selection starting at the first vertex. A
/// single weight vector is the centroid.
pub fn simplex_weights(k: usize, count: usize) -> Vec<Vec<f64>> {
    if k == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![vec![1.0 / k as f64; k]];
    }
    if k == 1 {
        return vec![vec![1.0]; count];
    }
    if k == 2 {
        return (0..count)
            .map(|i| {
                let w = i as f64 / (count - 1) as f64;
                vec![1.0 - w, w]
            })
            .collect();
    }
    let mut h = 1;
    let lattice = loop {
        let pts = lattice_points(k, h);
        if pts.len() >= count {
            break pts;
        }
        h += 1;
    };
    if lattice.len() == count {
        return lattice;
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut chosen = vec![0usize];
    let mut nearest: Vec<f64> = lattice.iter().map(|p| dist(p, &lattice[0])).collect();
    while chosen.len() < count {
        let (next, _) = nearest.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, &d)| if d > best.1 { (i, d) } else { best },
        );
        chosen.push(next);
        for (i, p) in lattice.iter().enumerate() {
            nearest[i] = nearest[i].min(dist(p, &lattice[next]));
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| lattice[i].clone()).collect()
}

/// All compositions of `h` into `k` parts, scaled by 1/h, with the first
/// component descending.
fn lattice_points(k: usize, h: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, h: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / h as f64).collect());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(k, left - c, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, h, h, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Multi-objective simulated annealing with one chain per weight vector.
///
/// A neighbour is one mutation move. The move's degradation is the weighted
/// sum of per-objective differences, each divided by the range of that
/// objective seen so far in the chain (1 while the range is zero). The
/// temperature is multiplied by the cooling factor every `chain_length`
/// steps. Chains take turns, one step each.
pub fn mosa_run(inst: &Instance, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveReport> {
    let config = SolverConfig {
        method: Method::Mosa,
        ..config.clone()
    };
    super::solve(inst, spec, &config)
}

struct Chain {
    weights: Vec<f64>,
    seq: OperationSequence,
    vector: ObjectiveVector,
    lo: Vec<u64>,
    hi: Vec<u64>,
    temperature: f64,
    steps: usize,
}

impl Chain {
    fn observe(&mut self, v: &ObjectiveVector) {
        for (i, &x) in v.values().iter().enumerate() {
            self.lo[i] = self.lo[i].min(x);
            self.hi[i] = self.hi[i].max(x);
        }
    }

    fn degradation(&self, new: &ObjectiveVector) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let range = match self.hi[i] - self.lo[i] {
                    0 => 1.0,
                    r => r as f64,
                };
                w * (new[i] as f64 - self.vector[i] as f64) / range
            })
            .sum()
    }
}

pub(super) fn run(eval: &mut Evaluator<'_>, config: &SolverConfig) -> Result<()> {
    if config.budget < config.weight_count as u64 {
        return Err(Error::contract(format!(
            "budget {} is smaller than the weight count {}",
            config.budget, config.weight_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut chains = Vec::with_capacity(config.weight_count);
    for weights in simplex_weights(eval.spec.len(), config.weight_count) {
        let seq = random_sequence_with(eval.inst, &mut rng);
        let vector = eval.evaluate(&seq).expect("budget covers one start per chain");
        chains.push(Chain {
            weights,
            seq,
            lo: vector.values().to_vec(),
            hi: vector.values().to_vec(),
            vector,
            temperature: config.initial_temperature,
            steps: 0,
        });
    }

    loop {
        for chain in chains.iter_mut() {
            let cand = perturb(&chain.seq, config.mutation, &mut rng);
            let Some(v) = eval.evaluate(&cand) else {
                return Ok(());
            };
            chain.observe(&v);
            let delta = chain.degradation(&v);
            if metropolis_accept(delta, chain.temperature, &mut rng)? {
                chain.seq = cand;
                chain.vector = v;
            }
            chain.steps += 1;
            if chain.steps % config.chain_length == 0 {
                chain.temperature *= config.cooling_factor;
                eval.iterations += 1;
            }
        }
    }
}
