//! Pareto dominance, the nondominated archive, exhaustive fronts and the
//! coverage comparison between two fronts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    decode_unchecked, evaluate_unchecked, Instance, ObjectiveSpec, ObjectiveVector, OperationSequence, Schedule,
};

/// Checked dominance test: `a` is no worse than `b` everywhere and strictly
/// better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "cannot compare objective vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.dominates(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsertOutcome {
    Added,
    RejectedDominated,
    RejectedDuplicate,
}

/// A genotype together with the schedule it was evaluated on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub sequence: OperationSequence,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveEntry<P> {
    pub vector: ObjectiveVector,
    pub payload: P,
}

/// Set of mutually nondominated objective vectors with one payload each.
///
/// Without a capacity the archive holds exactly the nondominated subset of
/// everything inserted. With a capacity, overflow evicts the entry in the
/// most crowded region, sparing the newcomer and every entry holding the
/// best value of some objective.
#[derive(Debug, Clone)]
pub struct Archive<P = Solution> {
    entries: Vec<ArchiveEntry<P>>,
    capacity: Option<usize>,
}

impl<P> Default for Archive<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Archive<P> {
    pub fn new() -> Self {
        Archive {
            entries: Vec::new(),
            capacity: None,
        }
    }

    pub fn with_capacity_limit(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::contract("archive capacity must be positive"));
        }
        Ok(Archive {
            entries: Vec::new(),
            capacity: Some(capacity),
        })
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry<P>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry<P>> {
        self.entries
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ObjectiveVector> {
        self.entries.iter().map(|e| &e.vector)
    }

    /// Vectors in lexicographic order.
    pub fn sorted_vectors(&self) -> Vec<ObjectiveVector> {
        let mut v: Vec<_> = self.vectors().cloned().collect();
        v.sort();
        v
    }

    pub fn insert(&mut self, vector: ObjectiveVector, payload: P) -> InsertOutcome {
        if let Some(first) = self.entries.first() {
            assert_eq!(
                first.vector.len(),
                vector.len(),
                "candidate vector length differs from the archive's"
            );
        }
        for e in &self.entries {
            if e.vector == vector {
                return InsertOutcome::RejectedDuplicate;
            }
            if e.vector.dominates(&vector) {
                return InsertOutcome::RejectedDominated;
            }
        }
        self.entries.retain(|e| !vector.dominates(&e.vector));
        self.entries.push(ArchiveEntry { vector, payload });
        if let Some(cap) = self.capacity {
            while self.entries.len() > cap {
                let victim = self.crowded_victim();
                self.entries.remove(victim);
            }
        }
        InsertOutcome::Added
    }

    /// Index of the entry with the most neighbours inside its box of
    /// half-width range/10 per objective.
    fn crowded_victim(&self) -> usize {
        let k = self.entries[0].vector.len();
        let newest = self.entries.len() - 1;
        let mut lo = vec![u64::MAX; k];
        let mut hi = vec![0u64; k];
        for e in &self.entries {
            for i in 0..k {
                lo[i] = lo[i].min(e.vector[i]);
                hi[i] = hi[i].max(e.vector[i]);
            }
        }
        let protected: Vec<bool> = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, e)| idx == newest || (0..k).any(|i| e.vector[i] == lo[i]))
            .collect();
        let density = |a: &ObjectiveVector| {
            self.entries
                .iter()
                .filter(|b| {
                    (0..k).all(|i| {
                        // |a_i - b_i| <= range_i / 10, in exact integer form
                        10 * a.values()[i].abs_diff(b.vector[i]) <= hi[i] - lo[i]
                    })
                })
                .count()
        };
        let pick = |allow: &dyn Fn(usize) -> bool| {
            let mut best: Option<(usize, usize)> = None;
            for (idx, e) in self.entries.iter().enumerate() {
                if !allow(idx) {
                    continue;
                }
                let d = density(&e.vector);
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((idx, d));
                }
            }
            best.map(|(idx, _)| idx)
        };
        pick(&|idx| !protected[idx])
            .or_else(|| pick(&|idx| idx != newest))
            .unwrap_or(0)
    }
}

/// Nondominated subset of `vectors`, duplicates collapsed, in order of first
/// occurrence. Quadratic pairwise comparison.
pub fn nondominated_filter(vectors: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut out: Vec<ObjectiveVector> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let dominated = vectors.iter().any(|w| w.dominates(v));
        if !dominated && !vectors[..i].contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Exact front over all gene strings of `inst`, sorted lexicographically.
/// Refuses when the number of strings exceeds `limit`.
pub fn brute_force_front(inst: &Instance, spec: &ObjectiveSpec, limit: u128) -> Result<Vec<ObjectiveVector>> {
    spec.check(inst)?;
    let count = inst.sequence_count();
    if count > limit {
        return Err(Error::EnumerationTooLarge { count, limit });
    }
    let mut archive: Archive<()> = Archive::new();
    let mut genes = OperationSequence::sorted(inst).into_genes();
    loop {
        let sched = decode_unchecked(&genes, inst);
        archive.insert(evaluate_unchecked(sched.completions(), inst, spec), ());
        if !next_permutation(&mut genes) {
            break;
        }
    }
    Ok(archive.sorted_vectors())
}

/// Advances to the next lexicographic permutation of a multiset; returns
/// false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Fraction of `b` that is equalled or dominated by some member of `a`.
/// An empty `b` is fully covered.
pub fn coverage(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> f64 {
    if b.is_empty() {
        return 1.0;
    }
    let covered = b.iter().filter(|y| a.iter().any(|x| x.covers(y))).count();
    covered as f64 / b.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t2;
    use proptest::prelude::*;

    fn v(x: &[u64]) -> ObjectiveVector {
        ObjectiveVector::new(x.to_vec())
    }

    fn archive_of(points: &[&[u64]]) -> Archive<()> {
        let mut a = Archive::new();
        for p in points {
            a.insert(v(p), ());
        }
        a
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&v(&[3, 5]), &v(&[4, 5])).unwrap());
        assert!(!dominates(&v(&[3, 5]), &v(&[5, 3])).unwrap());
        assert!(!dominates(&v(&[5, 3]), &v(&[3, 5])).unwrap());
        assert!(!dominates(&v(&[3, 5]), &v(&[3, 5])).unwrap());
        assert!(matches!(dominates(&v(&[1]), &v(&[1, 2])), Err(Error::Contract(_))));
    }

    #[test]
    fn archive_examples() {
        let mut a = archive_of(&[&[3, 9], &[8, 2]]);
        assert_eq!(a.insert(v(&[5, 5]), ()), InsertOutcome::Added);
        assert_eq!(a.sorted_vectors(), vec![v(&[3, 9]), v(&[5, 5]), v(&[8, 2])]);
        assert_eq!(a.insert(v(&[2, 1]), ()), InsertOutcome::Added);
        assert_eq!(a.sorted_vectors(), vec![v(&[2, 1])]);

        let mut a = archive_of(&[&[5, 5]]);
        assert_eq!(a.insert(v(&[6, 6]), ()), InsertOutcome::RejectedDominated);
        assert_eq!(a.insert(v(&[5, 5]), ()), InsertOutcome::RejectedDuplicate);
        assert_eq!(a.sorted_vectors(), vec![v(&[5, 5])]);
    }

    #[test]
    fn duplicate_keeps_first_payload() {
        let mut a = Archive::new();
        a.insert(v(&[1, 2]), "first");
        a.insert(v(&[1, 2]), "second");
        assert_eq!(a.entries()[0].payload, "first");
    }

    #[test]
    fn filter_examples() {
        let input = vec![v(&[3, 9]), v(&[5, 5]), v(&[8, 2]), v(&[6, 6])];
        assert_eq!(nondominated_filter(&input), vec![v(&[3, 9]), v(&[5, 5]), v(&[8, 2])]);
        assert!(nondominated_filter(&[]).is_empty());
        assert_eq!(nondominated_filter(&[v(&[1, 1]), v(&[1, 1])]), vec![v(&[1, 1])]);
    }

    #[test]
    fn brute_force_on_t2() {
        let spec = "cmax,tmax".parse().unwrap();
        assert_eq!(brute_force_front(&t2(), &spec, 10).unwrap(), vec![v(&[7, 0])]);
        match brute_force_front(&t2(), &spec, 5) {
            Err(Error::EnumerationTooLarge { count: 6, limit: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn permutation_enumeration_counts() {
        let mut genes = vec![1, 1, 2, 2, 3, 3, 3];
        let mut n = 1;
        while next_permutation(&mut genes) {
            n += 1;
        }
        assert_eq!(n, 210);
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&[v(&[1, 1])], &[v(&[2, 2]), v(&[0, 3])]), 0.5);
        let a = vec![v(&[3, 9]), v(&[5, 5])];
        assert_eq!(coverage(&a, &a), 1.0);
        assert_eq!(coverage(&[], &[v(&[1, 1])]), 0.0);
        assert_eq!(coverage(&[], &[]), 1.0);
    }

    #[test]
    fn capacity_prunes_crowded_region_but_keeps_extremes() {
        let mut a: Archive<()> = Archive::with_capacity_limit(3).unwrap();
        for p in [[0u64, 100], [100, 0], [50, 50], [51, 49]] {
            a.insert(v(&p), ());
        }
        assert_eq!(a.len(), 3);
        let kept = a.sorted_vectors();
        assert!(kept.contains(&v(&[0, 100])));
        assert!(kept.contains(&v(&[100, 0])));
        assert!(kept.contains(&v(&[51, 49])));
        // a dominating vector is never refused
        assert_eq!(a.insert(v(&[0, 0]), ()), InsertOutcome::Added);
        assert_eq!(a.sorted_vectors(), vec![v(&[0, 0])]);
        assert!(Archive::<()>::with_capacity_limit(0).is_err());
    }

    fn vecs(k: usize) -> impl Strategy<Value = Vec<ObjectiveVector>> {
        prop::collection::vec(prop::collection::vec(0u64..12, k).prop_map(ObjectiveVector::new), 0..60)
    }

    proptest! {
        #[test]
        fn archive_matches_filter(k in 2usize..=4, seed in any::<u64>()) {
            let points = {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                (0..200).map(|_| v(&(0..k).map(|_| rng.gen_range(0..20)).collect::<Vec<_>>())).collect::<Vec<_>>()
            };
            let mut a = Archive::new();
            for p in &points {
                a.insert(p.clone(), ());
            }
            let mut expect = nondominated_filter(&points);
            expect.sort();
            prop_assert_eq!(a.sorted_vectors(), expect);
        }

        #[test]
        fn dominance_is_a_strict_partial_order(
            x in prop::collection::vec(0u64..4, 3),
            y in prop::collection::vec(0u64..4, 3),
            z in prop::collection::vec(0u64..4, 3),
        ) {
            let (x, y, z) = (v(&x), v(&y), v(&z));
            prop_assert!(!x.dominates(&x));
            prop_assert!(!(x.dominates(&y) && y.dominates(&x)));
            if x.dominates(&y) && y.dominates(&z) {
                prop_assert!(x.dominates(&z));
            }
        }

        #[test]
        fn coverage_of_front_superset_is_one(a in vecs(2), b in vecs(2)) {
            let mut union = a.clone();
            union.extend(b.iter().cloned());
            let mut front_holder = a.clone();
            front_holder.extend(nondominated_filter(&union));
            prop_assert_eq!(coverage(&front_holder, &b), 1.0);
            let c = coverage(&a, &b);
            prop_assert!((0.0..=1.0).contains(&c));
        }

        #[test]
        fn bounded_archive_stays_nondominated(points in vecs(3), cap in 1usize..6) {
            let mut a: Archive<()> = Archive::with_capacity_limit(cap).unwrap();
            for p in points {
                a.insert(p, ());
                prop_assert!(a.len() <= cap);
                let vs: Vec<_> = a.vectors().cloned().collect();
                prop_assert_eq!(nondominated_filter(&vs).len(), vs.len());
            }
        }
    }
}
