//! Variation operators on permutations with repetition.
//!
//! Every crossover keeps some positions of the first parent, offers a
//! preferred stream of genes for the vacated positions, and finally repairs
//! any still-empty slots from the second parent. Both fill passes walk the
//! empty slots left to right and skip genes whose job quota is already used
//! up, so a child always holds each job exactly as often as its parents.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JobId, OperationSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    /// Uniform order-based: a random mask keeps genes of the first parent;
    /// the rest appear in the second parent's order.
    Uobx,
    /// Order-based: genes at random positions of the second parent are
    /// re-placed in the first parent in the second parent's order.
    Obx,
    /// Two-point order: a window of the first parent is kept; the outside
    /// is filled from the second parent's outside genes.
    Tpox,
    /// Partially mapped: a window of the first parent is kept and the
    /// second parent's outside genes are mapped through the window.
    Pmx,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 4] = [
        CrossoverKind::Uobx,
        CrossoverKind::Obx,
        CrossoverKind::Tpox,
        CrossoverKind::Pmx,
    ];
}

impl std::str::FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uobx" => Ok(CrossoverKind::Uobx),
            "obx" => Ok(CrossoverKind::Obx),
            "tpox" => Ok(CrossoverKind::Tpox),
            "pmx" => Ok(CrossoverKind::Pmx),
            other => Err(Error::contract(format!("unknown crossover '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Swap,
    Shift,
}

impl std::str::FromStr for MutationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" => Ok(MutationKind::Swap),
            "shift" => Ok(MutationKind::Shift),
            other => Err(Error::contract(format!("unknown mutation '{other}'"))),
        }
    }
}

/// Recombines two parents with randomly drawn masks or cut points.
pub fn crossover<R: Rng + ?Sized>(
    p1: &OperationSequence,
    p2: &OperationSequence,
    kind: CrossoverKind,
    rng: &mut R,
) -> Result<OperationSequence> {
    check_parents(p1, p2)?;
    let n = p1.len();
    if n == 0 {
        return Ok(p1.clone());
    }
    match kind {
        CrossoverKind::Uobx => {
            let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            uniform_order_based(p1, p2, &mask)
        }
        CrossoverKind::Obx => {
            let picked: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            order_based(p1, p2, &picked)
        }
        CrossoverKind::Tpox | CrossoverKind::Pmx => {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let (lo, hi) = (a.min(b), a.max(b));
            if kind == CrossoverKind::Tpox {
                two_point_order(p1, p2, lo, hi)
            } else {
                partially_mapped(p1, p2, lo, hi)
            }
        }
    }
}

/// Uniform order-based crossover: positions with `keep[i]` inherit from
/// `p1`; the first parent's remaining operations fill the gaps in the order
/// they appear in `p2`.
pub fn uniform_order_based(p1: &OperationSequence, p2: &OperationSequence, keep: &[bool]) -> Result<OperationSequence> {
    check_parents(p1, p2)?;
    if keep.len() != p1.len() {
        return Err(Error::contract("mask length differs from parent length"));
    }
    let g1 = p1.genes();
    let r1 = occurrence_ranks(g1);
    let missing: HashSet<(JobId, usize)> = (0..g1.len()).filter(|&i| !keep[i]).map(|i| (g1[i], r1[i])).collect();
    let child: Vec<Option<JobId>> = (0..g1.len()).map(|i| keep[i].then_some(g1[i])).collect();
    let g2 = p2.genes();
    let r2 = occurrence_ranks(g2);
    let preferred = (0..g2.len())
        .filter(|&i| missing.contains(&(g2[i], r2[i])))
        .map(|i| g2[i]);
    Ok(quota_fill(child, preferred, g2))
}

/// Order-based crossover: the operations at `picked` positions of `p2` are
/// removed from `p1` and written back into the freed slots in `p2`'s order.
pub fn order_based(p1: &OperationSequence, p2: &OperationSequence, picked: &[usize]) -> Result<OperationSequence> {
    check_parents(p1, p2)?;
    let g2 = p2.genes();
    if picked.iter().any(|&i| i >= g2.len()) {
        return Err(Error::contract("picked position out of range"));
    }
    let mut picked = picked.to_vec();
    picked.sort_unstable();
    picked.dedup();
    let r2 = occurrence_ranks(g2);
    let tokens: HashSet<(JobId, usize)> = picked.iter().map(|&i| (g2[i], r2[i])).collect();
    let g1 = p1.genes();
    let r1 = occurrence_ranks(g1);
    let child: Vec<Option<JobId>> = (0..g1.len())
        .map(|i| (!tokens.contains(&(g1[i], r1[i]))).then_some(g1[i]))
        .collect();
    let preferred = picked.iter().map(|&i| g2[i]);
    Ok(quota_fill(child, preferred, g2))
}

/// Two-point order crossover: `p1[lo..=hi]` is kept; the outside positions
/// take `p2`'s outside genes in order.
pub fn two_point_order(
    p1: &OperationSequence,
    p2: &OperationSequence,
    lo: usize,
    hi: usize,
) -> Result<OperationSequence> {
    check_window(p1, p2, lo, hi)?;
    let g1 = p1.genes();
    let g2 = p2.genes();
    let child: Vec<Option<JobId>> = (0..g1.len()).map(|i| (lo..=hi).contains(&i).then_some(g1[i])).collect();
    let preferred = (0..g2.len()).filter(|i| !(lo..=hi).contains(i)).map(|i| g2[i]);
    Ok(quota_fill(child, preferred, g2))
}

/// Partially mapped crossover: `p1[lo..=hi]` is kept; each outside position
/// takes `p2`'s gene, following the window mapping `p1[t] -> p2[t]` while
/// the gene's quota is exhausted. Unresolved positions are quota-repaired.
pub fn partially_mapped(
    p1: &OperationSequence,
    p2: &OperationSequence,
    lo: usize,
    hi: usize,
) -> Result<OperationSequence> {
    check_window(p1, p2, lo, hi)?;
    let g1 = p1.genes();
    let g2 = p2.genes();
    let mut child: Vec<Option<JobId>> = (0..g1.len()).map(|i| (lo..=hi).contains(&i).then_some(g1[i])).collect();
    let mut remaining = quotas(g1);
    for &g in &g1[lo..=hi] {
        remaining[g - 1] -= 1;
    }
    let width = hi - lo + 1;
    for i in (0..g1.len()).filter(|i| !(lo..=hi).contains(i)) {
        let mut g = g2[i];
        let mut steps = 0;
        while remaining[g - 1] == 0 && steps < width {
            match (lo..=hi).find(|&t| g1[t] == g) {
                Some(t) => g = g2[t],
                None => break,
            }
            steps += 1;
        }
        if remaining[g - 1] > 0 {
            remaining[g - 1] -= 1;
            child[i] = Some(g);
        }
    }
    Ok(quota_fill(child, std::iter::empty(), g2))
}

/// Applies one random swap or shift move; the move may be the identity.
#[must_use]
pub fn mutate<R: Rng + ?Sized>(s: &OperationSequence, kind: MutationKind, rng: &mut R) -> OperationSequence {
    let mut out = s.clone();
    let n = s.len();
    if n < 2 {
        return out;
    }
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    match kind {
        MutationKind::Swap => out.swap_genes(i, j),
        MutationKind::Shift => out.shift_gene(i, j),
    }
    out
}

/// Draws moves until the sequence actually changes, giving up after a few
/// attempts (sequences with a single job have no non-identity move).
pub(crate) fn perturb<R: Rng + ?Sized>(s: &OperationSequence, kind: MutationKind, rng: &mut R) -> OperationSequence {
    let mut out = mutate(s, kind, rng);
    for _ in 0..8 {
        if out != *s {
            break;
        }
        out = mutate(s, kind, rng);
    }
    out
}

fn check_parents(p1: &OperationSequence, p2: &OperationSequence) -> Result<()> {
    let mut a = p1.genes().to_vec();
    let mut b = p2.genes().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b || a.first().is_some_and(|&g| g == 0) {
        return Err(Error::contract(
            "parents are not permutations of the same gene multiset",
        ));
    }
    Ok(())
}

fn check_window(p1: &OperationSequence, p2: &OperationSequence, lo: usize, hi: usize) -> Result<()> {
    check_parents(p1, p2)?;
    if lo > hi || hi >= p1.len() {
        return Err(Error::contract(format!(
            "window {lo}..={hi} invalid for length {}",
            p1.len()
        )));
    }
    Ok(())
}

/// `ranks[i]` counts earlier occurrences of `genes[i]`.
fn occurrence_ranks(genes: &[JobId]) -> Vec<usize> {
    let max = genes.iter().copied().max().unwrap_or(0);
    let mut seen = vec![0usize; max + 1];
    genes
        .iter()
        .map(|&g| {
            let r = seen[g];
            seen[g] += 1;
            r
        })
        .collect()
}

fn quotas(genes: &[JobId]) -> Vec<usize> {
    let max = genes.iter().copied().max().unwrap_or(0);
    let mut q = vec![0usize; max];
    for &g in genes {
        q[g - 1] += 1;
    }
    q
}

/// Fills empty slots left to right, first from `preferred`, then from
/// `donor`, skipping genes whose quota is exhausted.
fn quota_fill(
    mut child: Vec<Option<JobId>>,
    preferred: impl Iterator<Item = JobId>,
    donor: &[JobId],
) -> OperationSequence {
    let mut remaining = quotas(donor);
    for &g in child.iter().flatten() {
        remaining[g - 1] -= 1;
    }
    let mut slots = (0..child.len())
        .filter(|&i| child[i].is_none())
        .collect::<Vec<_>>()
        .into_iter();
    for g in preferred.chain(donor.iter().copied()) {
        if remaining[g - 1] == 0 {
            continue;
        }
        match slots.next() {
            Some(i) => {
                child[i] = Some(g);
                remaining[g - 1] -= 1;
            }
            None => break,
        }
    }
    OperationSequence::from_genes(child.into_iter().map(|g| g.expect("quota fill completes")).collect())
}
