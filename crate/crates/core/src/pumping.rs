//! Pumping a path segment and deciding whether the pumped path is infinite.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{l1_diameter, Point, Vector};
use crate::model::{Assembly, PathAssembly, TileAssemblySystem, TileId};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum PumpError {
    #[error("indices must satisfy 1 <= i < j <= {len}, got i={i}, j={j}")]
    InvalidIndices { i: usize, j: usize, len: usize },
    #[error("tiles {i} and {j} have different types")]
    TypeMismatch { i: usize, j: usize },
    #[error("tiles {i} and {j} share a position, the pumping vector is zero")]
    ZeroPeriod { i: usize, j: usize },
}

/// The infinite sequence obtained by repeating `P[i, j-1]` along `vec(P_i P_j)`.
#[derive(Clone, Copy, Debug)]
pub struct Pumping<'a> {
    path: &'a PathAssembly,
    i: usize,
    j: usize,
    vector: Vector,
}

impl<'a> Pumping<'a> {
    pub fn new(path: &'a PathAssembly, i: usize, j: usize) -> Result<Pumping<'a>, PumpError> {
        if i == 0 || i >= j || j > path.len() {
            return Err(PumpError::InvalidIndices { i, j, len: path.len() });
        }
        if path.tile(i) != path.tile(j) {
            return Err(PumpError::TypeMismatch { i, j });
        }
        let vector = path.pos(j) - path.pos(i);
        if vector.is_zero() {
            return Err(PumpError::ZeroPeriod { i, j });
        }
        Ok(Pumping { path, i, j, vector })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn vector(&self) -> Vector {
        self.vector
    }

    pub fn period(&self) -> usize {
        self.j - self.i
    }

    /// The `k`-th tile of the pumped sequence, `k >= 1`.
    pub fn get(&self, k: usize) -> (Point, TileId) {
        if k < self.i {
            return self.path.steps()[k - 1];
        }
        let p = self.period();
        let r = (k - self.i) % p;
        let n = ((k - self.i) / p) as i64;
        let (q, t) = self.path.steps()[self.i + r - 1];
        (q + self.vector * n, t)
    }

    /// Iteration number of the `k`-th tile: tiles `P[i+1, j]` form iteration 0.
    pub fn iteration(&self, k: usize) -> u64 {
        iteration_of(self.i, self.j, k)
    }

    /// The first `n` tiles of the pumped sequence.
    pub fn prefix(&self, n: usize) -> Vec<(Point, TileId)> {
        (1..=n).map(|k| self.get(k)).collect()
    }
}

pub fn iteration_of(i: usize, j: usize, k: usize) -> u64 {
    if k > i {
        ((k - i - 1) / (j - i)) as u64
    } else {
        0
    }
}

/// Iterations beyond which no new conflict can appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionHorizon {
    /// Number of period translates that can still meet the obstacles.
    pub iterations: u64,
    /// Largest translate offset at which the period can meet itself.
    pub self_offsets: u64,
}

/// Horizon for a period with the given positions and vector, against the given obstacles.
pub fn decision_horizon(
    period: impl IntoIterator<Item = Point> + Clone,
    obstacles: impl IntoIterator<Item = Point>,
    vector: Vector,
) -> DecisionHorizon {
    let step = vector.linf().max(1);
    let d_period = l1_diameter(period.clone());
    let d_all = l1_diameter(period.into_iter().chain(obstacles));
    DecisionHorizon {
        iterations: ((d_all + d_period) / step) as u64 + 2,
        self_offsets: (d_period / step) as u64 + 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictSource {
    Obstacle,
    SelfIntersection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PumpDecision {
    Infinite { horizon: DecisionHorizon },
    ConflictAt { point: Point, iteration: u64, against: ConflictSource, index: usize },
}

impl PumpDecision {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PumpDecision::Infinite { .. })
    }
}

/// A periodic tile sequence `base[s mod p] + (s div p) * vector`, scanned from offset `start`.
#[derive(Clone, Debug)]
pub struct PeriodicRun<'a> {
    pub base: &'a [(Point, TileId)],
    pub vector: Vector,
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanOutcome {
    Infinite { horizon: DecisionHorizon },
    Conflict { offset: usize, point: Point, against: ConflictSource },
}

impl PeriodicRun<'_> {
    pub fn tile(&self, s: usize) -> (Point, TileId) {
        let p = self.base.len();
        let (q, t) = self.base[s % p];
        (q + self.vector * (s / p) as i64, t)
    }

    pub fn horizon(&self, obstacles: &HashMap<Point, TileId>) -> DecisionHorizon {
        let period = self.base.iter().map(|s| s.0).chain(std::iter::once(self.base[0].0 + self.vector));
        decision_horizon(period, obstacles.keys().copied(), self.vector)
    }

    /// Grows the sequence from `start` against `obstacles` and reports the first conflict.
    ///
    /// Positions revisited with the same tile are not conflicts.
    pub fn scan(&self, obstacles: &HashMap<Point, TileId>) -> ScanOutcome {
        let p = self.base.len();
        let horizon = self.horizon(obstacles);
        let offsets: HashMap<Point, usize> = self.base.iter().enumerate().map(|(r, s)| (s.0, r)).collect();
        let last_block = horizon.iterations as usize + 1;
        let end = (last_block + 1) * p;
        for s in self.start..end {
            let n = s / p;
            let r = s % p;
            let (q, t) = self.tile(s);
            if let Some(&u) = obstacles.get(&q) {
                if u != t {
                    return ScanOutcome::Conflict { offset: s, point: q, against: ConflictSource::Obstacle };
                }
            }
            let max_delta = n.min(horizon.self_offsets as usize);
            for delta in 1..=max_delta {
                let Some(&r2) = offsets.get(&(self.base[r].0 + self.vector * delta as i64)) else {
                    continue;
                };
                let s2 = (n - delta) * p + r2;
                if s2 >= self.start && s2 < s && self.base[r2].1 != t {
                    return ScanOutcome::Conflict { offset: s, point: q, against: ConflictSource::SelfIntersection };
                }
            }
        }
        ScanOutcome::Infinite { horizon }
    }
}

/// Decides whether the pumping of `P[i, j]` grows forever from `seed ∪ P[1, i-1] ∪ extra`.
pub fn decide_pumping(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    i: usize,
    j: usize,
    extra: &Assembly,
) -> Result<PumpDecision, PumpError> {
    let pumping = Pumping::new(path, i, j)?;
    let mut obstacles: HashMap<Point, TileId> = tas.seed.iter().collect();
    obstacles.extend(path.steps()[..i - 1].iter().copied());
    for (p, t) in extra.iter() {
        obstacles.entry(p).or_insert(t);
    }
    let run = PeriodicRun { base: &path.steps()[i - 1..j - 1], vector: pumping.vector(), start: 0 };
    Ok(match run.scan(&obstacles) {
        ScanOutcome::Infinite { horizon } => PumpDecision::Infinite { horizon },
        ScanOutcome::Conflict { offset, point, against } => {
            let k = i + offset;
            PumpDecision::ConflictAt { point, iteration: pumping.iteration(k), against, index: k }
        }
    })
}

/// The decision horizon [`decide_pumping`] uses for `(i, j)` with no extra obstacles.
pub fn pumping_horizon(tas: &TileAssemblySystem, path: &PathAssembly, i: usize, j: usize) -> Result<DecisionHorizon, PumpError> {
    let pumping = Pumping::new(path, i, j)?;
    let obstacles: HashMap<Point, TileId> = tas.seed.iter().chain(path.steps()[..i - 1].iter().copied()).collect();
    let run = PeriodicRun { base: &path.steps()[i - 1..j - 1], vector: pumping.vector(), start: 0 };
    Ok(run.horizon(&obstacles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::pt;

    /// Materialises the pumping tile by tile and reports the first conflict.
    fn naive(tas: &TileAssemblySystem, path: &PathAssembly, i: usize, j: usize, iterations: u64) -> Option<(Point, usize)> {
        let pumping = Pumping::new(path, i, j).unwrap();
        let mut placed: HashMap<Point, TileId> = tas.seed.iter().collect();
        for k in 1..=(i + (iterations as usize + 1) * (j - i)) {
            let (q, t) = pumping.get(k);
            match placed.get(&q) {
                Some(&u) if u != t => return Some((q, k)),
                Some(_) => {}
                None => {
                    placed.insert(q, t);
                }
            }
        }
        None
    }

    #[test]
    fn pumping_formula_matches_definition() {
        let f = fixtures::nshape();
        let pumping = Pumping::new(&f.path, 2, 5).unwrap();
        assert_eq!(pumping.vector(), crate::geom::vec2(0, 3));
        assert_eq!(pumping.get(1), f.path.steps()[0]);
        assert_eq!(pumping.get(5).0, pt(0, 5));
        assert_eq!(pumping.get(8).0, pt(0, 8));
        assert_eq!(pumping.get(9).0, pt(0, 6 + 3));
        assert_eq!(pumping.iteration(5), 0);
        assert_eq!(pumping.iteration(6), 1);
        assert_eq!(pumping.iteration(2), 0);
    }

    #[test]
    fn rejects_bad_indices() {
        let f = fixtures::col_n();
        assert!(matches!(Pumping::new(&f.path, 2, 2), Err(PumpError::InvalidIndices { .. })));
        assert!(matches!(Pumping::new(&f.path, 0, 2), Err(PumpError::InvalidIndices { .. })));
        assert!(matches!(Pumping::new(&f.path, 1, 6), Err(PumpError::InvalidIndices { .. })));
    }

    #[test]
    fn line_east_pumps_forever() {
        let f = fixtures::line_e();
        let d = decide_pumping(&f.tas, &f.path, 1, 2, &Assembly::empty()).unwrap();
        assert!(d.is_infinite());
        assert_eq!(naive(&f.tas, &f.path, 1, 2, 30), None);
    }

    #[test]
    fn hook_conflicts_with_the_seed_on_its_first_iteration() {
        let f = fixtures::hook_s();
        let d = decide_pumping(&f.tas, &f.path, 3, 4, &Assembly::empty()).unwrap();
        match d {
            PumpDecision::ConflictAt { point, iteration, against, .. } => {
                assert_eq!(point, pt(1, 0));
                assert_eq!(iteration, 1);
                assert_eq!(against, ConflictSource::Obstacle);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(naive(&f.tas, &f.path, 3, 4, 10).map(|c| c.0), Some(pt(1, 0)));
    }

    #[test]
    fn self_intersection_is_detected() {
        let f = fixtures::nshape();
        // The N shape pumped from its first tile to a tile on the way down folds back onto itself.
        let i = 1;
        let j = 12;
        let d = decide_pumping(&f.tas, &f.path, i, j, &Assembly::empty()).unwrap();
        let oracle = naive(&f.tas, &f.path, i, j, 40);
        match d {
            PumpDecision::ConflictAt { point, index, .. } => assert_eq!(Some((point, index)), oracle),
            PumpDecision::Infinite { .. } => assert_eq!(oracle, None),
        }
    }

    #[test]
    fn extra_obstacles_block_the_pumping() {
        let f = fixtures::col_n();
        let other = TileId(0);
        let extra = Assembly::from_tiles([(pt(0, 9), other)]);
        let d = decide_pumping(&f.tas, &f.path, 1, 2, &extra).unwrap();
        assert!(d.is_infinite(), "same tile type does not conflict");
        let mut ts = f.tas.tileset.tiles().to_vec();
        ts.push(crate::model::TileType::uniform("z", crate::model::Glue::null()));
        let tas = TileAssemblySystem::new(crate::model::TileSet::new(ts).unwrap(), f.tas.seed.clone()).unwrap();
        let extra = Assembly::from_tiles([(pt(0, 9), TileId(1))]);
        let d = decide_pumping(&tas, &f.path, 1, 2, &extra).unwrap();
        assert!(matches!(d, PumpDecision::ConflictAt { point, .. } if point == pt(0, 9)));
    }
}
