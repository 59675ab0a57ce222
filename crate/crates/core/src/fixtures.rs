//! Small instances shipped with the crate for examples, tests and benches.

use crate::model::Instance;

/// Two jobs on two machines with due dates 5 and 7:
/// job 1 runs (M0, 3) then (M1, 2); job 2 runs (M1, 2) then (M0, 4).
pub fn t2() -> Instance {
    Instance::job_shop("T2", 2, vec![vec![(0, 3), (1, 2)], vec![(1, 2), (0, 4)]])
        .and_then(|i| i.with_due_dates(&[5, 7]))
        .expect("fixture is valid")
}

/// The fixed 3×3 job shop used for exhaustive-front comparisons
/// (1680 gene strings). Generated with
/// `generate_random_instance(3, 3, 1..=9, due factor 1.5, seed 34)`.
/// Under `cmax,csum,tmax,u` its exact front has five points.
pub fn js3x3() -> Instance {
    let mut inst =
        crate::io::generate_random_instance(3, 3, 1, 9, Some(1.5), 34).expect("fixture parameters are valid");
    inst.set_name("js3x3");
    inst
}
