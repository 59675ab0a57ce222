use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, Method, Neighborhood, SolveReport, SolverConfig};
use crate::error::Result;
use crate::model::{random_sequence_with, Instance, ObjectiveSpec, ObjectiveVector, OperationSequence};

/// Multi-point hillclimber. Each point scans its neighbourhood in random
/// order and moves to the first neighbour that dominates it; a point with no
/// dominating neighbour restarts from a fresh random sequence. Points take
/// turns, one scan each, until the budget is spent.
pub fn hillclimb(inst: &Instance, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveReport> {
    let config = SolverConfig {
        method: Method::Hillclimb,
        ..config.clone()
    };
    super::solve(inst, spec, &config)
}

struct Point {
    seq: OperationSequence,
    vector: ObjectiveVector,
}

pub(super) fn run(eval: &mut Evaluator<'_>, config: &SolverConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = Vec::with_capacity(config.climbers);
    for _ in 0..config.climbers {
        let seq = random_sequence_with(eval.inst, &mut rng);
        match eval.evaluate(&seq) {
            Some(vector) => points.push(Point { seq, vector }),
            None => return,
        }
    }

    let mut moves = Vec::new();
    loop {
        for point in points.iter_mut() {
            neighbourhood(&point.seq, config.neighborhood, &mut moves);
            moves.shuffle(&mut rng);
            let mut moved = false;
            for &(i, j) in &moves {
                let mut cand = point.seq.clone();
                match config.neighborhood {
                    Neighborhood::Shift => cand.shift_gene(i, j),
                    _ => cand.swap_genes(i, j),
                }
                if cand == point.seq {
                    continue;
                }
                let Some(vector) = eval.evaluate(&cand) else {
                    return;
                };
                if vector.dominates(&point.vector) {
                    *point = Point { seq: cand, vector };
                    moved = true;
                    break;
                }
            }
            if !moved {
                // dominance-local optimum
                let seq = random_sequence_with(eval.inst, &mut rng);
                let Some(vector) = eval.evaluate(&seq) else {
                    return;
                };
                eval.restarts += 1;
                *point = Point { seq, vector };
            }
        }
    }
}

/// Index pairs of all moves that can change `seq`.
fn neighbourhood(seq: &OperationSequence, kind: Neighborhood, out: &mut Vec<(usize, usize)>) {
    let g = seq.genes();
    let n = g.len();
    out.clear();
    match kind {
        Neighborhood::AdjacentSwap => out.extend((1..n).filter(|&i| g[i - 1] != g[i]).map(|i| (i - 1, i))),
        Neighborhood::GeneralSwap => {
            for i in 0..n {
                out.extend((i + 1..n).filter(|&j| g[i] != g[j]).map(|j| (i, j)));
            }
        }
        Neighborhood::Shift => {
            for from in 0..n {
                // moving `from` one step left equals moving its left
                // neighbour one step right, so that pair is listed once
                out.extend((0..n).filter(|&to| to != from && to + 1 != from).map(|to| (from, to)));
            }
        }
    }
}
