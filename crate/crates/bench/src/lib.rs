//! Workloads shared by the benchmarks.

use paretoshop_core::io::generate_random_instance;
use paretoshop_core::{Instance, ObjectiveVector};

/// Random job shop with due dates at 1.3 times each job's work content.
pub fn job_shop(n: usize, m: usize) -> Instance {
    generate_random_instance(n, m, 1, 99, Some(1.3), 2024).expect("benchmark parameters are valid")
}

/// `count` pseudo-random `k`-objective vectors from a fixed linear
/// congruential stream, so the benchmarks need no generator of their own.
pub fn vectors(count: usize, k: usize) -> Vec<ObjectiveVector> {
    let mut x: u64 = 0x2545_f491_4f6c_dd1d;
    (0..count)
        .map(|_| {
            ObjectiveVector::new(
                (0..k)
                    .map(|_| {
                        x = x
                            .wrapping_mul(6_364_136_223_846_793_005)
                            .wrapping_add(1_442_695_040_888_963_407);
                        (x >> 33) % 1000
                    })
                    .collect(),
            )
        })
        .collect()
}
