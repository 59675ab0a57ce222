//! Interactive selection over a computed front by aspiration levels.
//!
//! A session holds a fixed front and one aspiration level per objective.
//! The front splits into the alternatives meeting every level and those
//! that do not; the decision maker moves levels until exactly one
//! alternative remains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ObjectiveVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub id: String,
    pub vector: ObjectiveVector,
}

/// Ids meeting all levels and ids missing at least one, each in front order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub satisfied: Vec<String>,
    pub unsatisfied: Vec<String>,
}

/// One recorded level change; objectives are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelChange {
    pub objective: usize,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AimSession {
    front: Vec<FrontPoint>,
    levels: Vec<i64>,
}

impl AimSession {
    /// Opens a session with every level at the worst value found in the
    /// front, so that all alternatives satisfy them.
    pub fn start(front: Vec<FrontPoint>) -> Result<Self> {
        let first = front
            .first()
            .ok_or_else(|| Error::contract("cannot start an aspiration session on an empty front"))?;
        let k = first.vector.len();
        if k == 0 {
            return Err(Error::contract("objective vectors are empty"));
        }
        let mut levels = vec![i64::MIN; k];
        for (i, p) in front.iter().enumerate() {
            if p.vector.len() != k {
                return Err(Error::contract("front vectors differ in length"));
            }
            if front[..i].iter().any(|q| q.id == p.id) {
                return Err(Error::contract(format!("solution id {} appears twice", p.id)));
            }
            for (l, &v) in levels.iter_mut().zip(p.vector.values()) {
                *l = (*l).max(i64::try_from(v).unwrap_or(i64::MAX));
            }
        }
        Ok(AimSession { front, levels })
    }

    /// Replays a level-change log from the start state.
    pub fn replay(front: Vec<FrontPoint>, log: &[LevelChange]) -> Result<Self> {
        let mut s = Self::start(front)?;
        for c in log {
            s.set_level(c.objective, c.value)?;
        }
        Ok(s)
    }

    pub fn front(&self) -> &[FrontPoint] {
        &self.front
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn objective_count(&self) -> usize {
        self.levels.len()
    }

    /// Replaces the level of objective `objective` (1-based). Raising a level
    /// is allowed, and so is a level that no alternative meets.
    pub fn set_level(&mut self, objective: usize, value: i64) -> Result<()> {
        if objective == 0 || objective > self.levels.len() {
            return Err(Error::contract(format!(
                "objective index {objective} outside 1..={}",
                self.levels.len()
            )));
        }
        self.levels[objective - 1] = value;
        Ok(())
    }

    pub fn meets_levels(&self, v: &ObjectiveVector) -> bool {
        v.values()
            .iter()
            .zip(&self.levels)
            .all(|(&x, &a)| (x as i128) <= a as i128)
    }

    pub fn satisfied(&self) -> impl Iterator<Item = &FrontPoint> {
        self.front.iter().filter(|p| self.meets_levels(&p.vector))
    }

    pub fn satisfied_count(&self) -> usize {
        self.satisfied().count()
    }

    pub fn partition(&self) -> Partition {
        let (sat, unsat): (Vec<_>, Vec<_>) = self.front.iter().partition(|p| self.meets_levels(&p.vector));
        Partition {
            satisfied: sat.into_iter().map(|p| p.id.clone()).collect(),
            unsatisfied: unsat.into_iter().map(|p| p.id.clone()).collect(),
        }
    }

    /// The single alternative meeting all levels.
    pub fn finalize(&self) -> Result<&FrontPoint> {
        let mut it = self.satisfied();
        match (it.next(), it.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(Error::NotConverged {
                count: self.satisfied_count(),
            }),
        }
    }

    /// Chooses `id` when every satisfied alternative has the same vector,
    /// which level-setting alone cannot narrow down further.
    pub fn pick_among_equals(&self, id: &str) -> Result<&FrontPoint> {
        let sat: Vec<&FrontPoint> = self.satisfied().collect();
        let Some(chosen) = sat.iter().find(|p| p.id == id) else {
            return Err(Error::contract(format!(
                "solution {id} does not meet the current levels"
            )));
        };
        if sat.iter().any(|p| p.vector != chosen.vector) {
            return Err(Error::NotConverged { count: sat.len() });
        }
        Ok(chosen)
    }
}
