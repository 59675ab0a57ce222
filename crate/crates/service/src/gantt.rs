use paretoshop_core::{Instance, JobId, MachineId, Schedule, Time};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bar {
    pub job: JobId,
    pub op: usize,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineLane {
    pub machine: MachineId,
    pub bars: Vec<Bar>,
}

/// Chart data for one schedule: a lane per machine with its bars in start
/// order, and the horizon (the makespan).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GanttData {
    pub machines: Vec<MachineLane>,
    pub horizon: Time,
}

impl GanttData {
    /// Projects `schedule` onto the machines of `inst`. The schedule must
    /// have been built for `inst`.
    pub fn new(inst: &Instance, schedule: &Schedule) -> Self {
        let mut machines: Vec<MachineLane> = (0..inst.machine_count())
            .map(|machine| MachineLane {
                machine,
                bars: Vec::new(),
            })
            .collect();
        for job in inst.jobs() {
            for op in job.operations() {
                let start = schedule.start(op.job, op.index);
                machines[op.machine].bars.push(Bar {
                    job: op.job,
                    op: op.index,
                    start,
                    end: start + op.duration,
                });
            }
        }
        for lane in &mut machines {
            lane.bars.sort_by_key(|b| (b.start, b.end, b.job, b.op));
        }
        GanttData {
            machines,
            horizon: schedule.makespan(),
        }
    }

    /// Completion time of every job, read off the bars.
    pub fn completions(&self, job_count: usize) -> Vec<Time> {
        let mut c = vec![0; job_count];
        for bar in self.machines.iter().flat_map(|l| &l.bars) {
            c[bar.job - 1] = c[bar.job - 1].max(bar.end);
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use paretoshop_core::fixtures::t2;

    #[test]
    fn t2_projection() {
        let inst = t2();
        let s = Schedule::from_starts(vec![vec![0, 3], vec![0, 3]], &inst).unwrap();
        let g = GanttData::new(&inst, &s);
        let bars = |m: usize| -> Vec<(usize, usize, u64, u64)> {
            g.machines[m]
                .bars
                .iter()
                .map(|b| (b.job, b.op, b.start, b.end))
                .collect()
        };
        assert_eq!(bars(0), vec![(1, 1, 0, 3), (2, 2, 3, 7)]);
        assert_eq!(bars(1), vec![(2, 1, 0, 2), (1, 2, 3, 5)]);
        assert_eq!(g.horizon, 7);
        assert_eq!(g.completions(2), vec![5, 7]);
    }
}
