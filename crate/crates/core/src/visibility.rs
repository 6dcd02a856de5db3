//! Glue visibility from the east and west, and the orderings it induces.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Direction, Point, Vector};
use crate::model::{PathAssembly, TileAssemblySystem};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VisibilityError {
    #[error("the last tile of the path is not (one of) the highest")]
    LastNotHighest,
    #[error("zero direction vector")]
    ZeroVector,
}

/// East or west: the side a glue is seen from, or the hand an analysis favours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    West,
    East,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::West => Side::East,
            Side::East => Side::West,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Side::West => Direction::West,
            Side::East => Direction::East,
        }
    }

    /// Whether `x` lies strictly further towards this side than `than`.
    pub fn beyond(self, x: i64, than: i64) -> bool {
        match self {
            Side::West => x < than,
            Side::East => x > than,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::West => "west",
            Side::East => "east",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlueKind {
    North,
    South,
}

/// The bond between tiles `index` and `index + 1` when they are vertically adjacent.
///
/// Its `level` is the lower of the two rows and `x` their common column.
/// Index 0 denotes the bond between the seed and the first tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlueEdge {
    pub index: usize,
    pub level: i64,
    pub x: i64,
    pub kind: GlueKind,
}

fn vertical_edge(index: usize, from: Point, to: Point) -> Option<GlueEdge> {
    let kind = match to.y - from.y {
        1 => GlueKind::North,
        -1 => GlueKind::South,
        _ => return None,
    };
    (from.x == to.x).then_some(GlueEdge { index, level: from.y.min(to.y), x: from.x, kind })
}

/// Vertical bonds internal to the path, in path order.
pub fn glue_edges(path: &PathAssembly) -> Vec<GlueEdge> {
    (1..path.len()).filter_map(|i| vertical_edge(i, path.pos(i), path.pos(i + 1))).collect()
}

/// Vertical bonds of the path, including the bond to the seed when it is vertical.
pub fn glue_edges_with_seed(tas: &TileAssemblySystem, path: &PathAssembly) -> Vec<GlueEdge> {
    let mut out: Vec<GlueEdge> =
        path.anchor(tas).and_then(|a| vertical_edge(0, a, path.pos(1))).into_iter().collect();
    out.extend(glue_edges(path));
    out
}

/// A horizontal half-line from a glue edge towards one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityRay {
    pub level: i64,
    pub x: i64,
    pub toward: Side,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub side: Side,
    pub visible: Vec<GlueEdge>,
    pub rays: Vec<VisibilityRay>,
}

/// Vertical edges other than the path's own that block visibility rays, keyed by level.
fn blockers(tas: &TileAssemblySystem, path: &PathAssembly) -> HashMap<i64, Vec<i64>> {
    let mut out: HashMap<i64, Vec<i64>> = HashMap::new();
    for p in tas.seed.points() {
        if tas.seed.contains(p.step(Direction::North)) {
            out.entry(p.y).or_default().push(p.x);
        }
    }
    if let Some(e) = path.anchor(tas).and_then(|a| vertical_edge(0, a, path.pos(1))) {
        out.entry(e.level).or_default().push(e.x);
    }
    out
}

/// Glue edges of the path whose ray towards `side` meets no other vertical edge.
pub fn visible_glues(tas: &TileAssemblySystem, path: &PathAssembly, side: Side) -> VisibilityReport {
    let edges = glue_edges(path);
    let blocking = blockers(tas, path);
    let mut by_level: HashMap<i64, Vec<&GlueEdge>> = HashMap::new();
    for e in &edges {
        by_level.entry(e.level).or_default().push(e);
    }
    let visible: Vec<GlueEdge> = edges
        .iter()
        .filter(|e| {
            let others_clear = by_level[&e.level].iter().all(|o| o.index == e.index || side.beyond(e.x, o.x));
            let seed_clear = blocking.get(&e.level).is_none_or(|xs| xs.iter().all(|&x| side.beyond(e.x, x)));
            others_clear && seed_clear
        })
        .copied()
        .collect();
    let rays = visible.iter().map(|e| VisibilityRay { level: e.level, x: e.x, toward: side, index: e.index }).collect();
    VisibilityReport { side, visible, rays }
}

fn last_is_highest(path: &PathAssembly) -> bool {
    let top = path.steps().iter().map(|s| s.0.y).max().expect("paths are non-empty");
    path.pos(path.len()).y == top
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "value", rename_all = "snake_case")]
pub enum Watershed {
    /// East-visible glues at levels `>= y0` are north glues and those below are south glues.
    Split(i64),
    /// Index of an east-visible south glue lying at or above an east-visible north glue.
    Violation(usize),
}

/// Splits the east-visible glues of a path whose last tile is highest.
pub fn watershed(tas: &TileAssemblySystem, path: &PathAssembly) -> Result<Watershed, VisibilityError> {
    if !last_is_highest(path) {
        return Err(VisibilityError::LastNotHighest);
    }
    let report = visible_glues(tas, path, Side::East);
    let min_north = report.visible.iter().filter(|e| e.kind == GlueKind::North).map(|e| e.level).min();
    let max_south = report.visible.iter().filter(|e| e.kind == GlueKind::South).map(|e| e.level).max();
    match (min_north, max_south) {
        (Some(n), Some(s)) if s >= n => {
            let bad = report
                .visible
                .iter()
                .find(|e| e.kind == GlueKind::South && e.level >= n)
                .expect("a south glue at or above the lowest north glue exists");
            Ok(Watershed::Violation(bad.index))
        }
        (_, Some(s)) => Ok(Watershed::Split(s + 1)),
        (_, None) => {
            let bottom = tas.seed.points().chain(path.steps().iter().map(|s| s.0)).map(|p| p.y).min();
            Ok(Watershed::Split(bottom.expect("seed is non-empty")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum OrderCheck {
    Ok,
    Violation { i: usize, j: usize },
}

/// East-visible north glues climb and south glues descend in path order.
pub fn check_order(tas: &TileAssemblySystem, path: &PathAssembly) -> Result<OrderCheck, VisibilityError> {
    if !last_is_highest(path) {
        return Err(VisibilityError::LastNotHighest);
    }
    let report = visible_glues(tas, path, Side::East);
    for kind in [GlueKind::North, GlueKind::South] {
        let glues: Vec<&GlueEdge> = report.visible.iter().filter(|e| e.kind == kind).collect();
        for w in glues.windows(2) {
            let ordered = match kind {
                GlueKind::North => w[0].level < w[1].level,
                GlueKind::South => w[0].level > w[1].level,
            };
            if !ordered {
                return Ok(OrderCheck::Violation { i: w[0].index, j: w[1].index });
            }
        }
    }
    Ok(OrderCheck::Ok)
}

/// Indices `i` such that the ray `P_i + k v`, `k >= 1`, avoids every tile of the path.
pub fn dominating_tiles(path: &PathAssembly, v: Vector) -> Result<Vec<usize>, VisibilityError> {
    if v.is_zero() {
        return Err(VisibilityError::ZeroVector);
    }
    Ok((1..=path.len())
        .filter(|&i| {
            let origin = path.pos(i);
            path.steps().iter().all(|(q, _)| (*q - origin).positive_multiple_of(v).is_none())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{pt, vec2};

    #[test]
    fn column_has_one_north_edge_per_step() {
        let f = fixtures::col_n();
        let edges = glue_edges(&f.path);
        assert_eq!(edges.len(), 4);
        assert!(edges.iter().all(|e| e.kind == GlueKind::North && e.x == 0));
        assert_eq!(edges.iter().map(|e| e.level).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let with_seed = glue_edges_with_seed(&f.tas, &f.path);
        assert_eq!(with_seed.len(), 5);
        assert_eq!(with_seed[0].level, 0);
    }

    #[test]
    fn line_has_no_vertical_edges() {
        let f = fixtures::line_e();
        assert!(glue_edges(&f.path).is_empty());
        assert!(visible_glues(&f.tas, &f.path, Side::East).visible.is_empty());
    }

    #[test]
    fn column_glues_are_visible_from_both_sides() {
        let f = fixtures::col_n();
        assert_eq!(visible_glues(&f.tas, &f.path, Side::East).visible.len(), 4);
        assert_eq!(visible_glues(&f.tas, &f.path, Side::West).visible.len(), 4);
    }

    #[test]
    fn nshape_columns_hide_each_other() {
        let f = fixtures::nshape();
        let west = visible_glues(&f.tas, &f.path, Side::West);
        let east = visible_glues(&f.tas, &f.path, Side::East);
        assert!(west.visible.iter().filter(|e| e.level >= 1).all(|e| e.x == 0));
        assert!(east.visible.iter().all(|e| e.x == 4));
        assert!(west.visible.iter().any(|e| e.level < 1 && e.x == 4));
    }

    #[test]
    fn watershed_of_column_is_at_the_seed() {
        let f = fixtures::col_n();
        assert_eq!(watershed(&f.tas, &f.path).unwrap(), Watershed::Split(0));
        assert_eq!(check_order(&f.tas, &f.path).unwrap(), OrderCheck::Ok);
    }

    #[test]
    fn watershed_needs_highest_last_tile() {
        let f = fixtures::nshape();
        assert_eq!(watershed(&f.tas, &f.path), Err(VisibilityError::LastNotHighest));
    }

    #[test]
    fn dominating_tiles_against_brute_force() {
        let f = fixtures::nshape();
        for v in [vec2(0, 1), vec2(1, 0), vec2(-1, 1), vec2(0, -2), vec2(2, 1)] {
            let fast = dominating_tiles(&f.path, v).unwrap();
            let brute: Vec<usize> = (1..=f.path.len())
                .filter(|&i| (1..=40).all(|k| f.path.index_of(f.path.pos(i) + v * k).is_none()))
                .collect();
            assert_eq!(fast, brute, "vector {v}");
        }
        assert_eq!(dominating_tiles(&f.path, Vector::ZERO), Err(VisibilityError::ZeroVector));
        let col = fixtures::col_n();
        assert_eq!(dominating_tiles(&col.path, vec2(0, 1)).unwrap(), vec![5]);
        assert_eq!(col.path.pos(5), pt(0, 5));
    }
}
