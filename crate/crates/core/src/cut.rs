//! Partitioning a finite window of the lattice by paths, rays and lines.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{line_side, BBox, Direction, Point, Vector};
use crate::visibility::Side;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutError {
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("point {0} lies outside the window")]
    OutsideWindow(Point),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CutGenerator {
    /// Removes every edge incident to the listed vertices.
    VertexPath { points: Vec<Point> },
    /// Removes every edge incident to `origin + k * vector`, `k >= 0`.
    VertexRay { origin: Point, vector: Vector },
    /// Cuts the vertical edges at `level` from column `x` towards `toward`.
    DualRay { level: i64, x: i64, toward: Side },
    /// Cuts every edge whose endpoints lie on different sides of the line.
    Line { anchor: Point, direction: Vector },
}

impl CutGenerator {
    fn anchors(&self) -> Vec<Point> {
        match self {
            CutGenerator::VertexPath { points } => points.clone(),
            CutGenerator::VertexRay { origin, .. } => vec![*origin],
            CutGenerator::DualRay { level, x, .. } => vec![Point { x: *x, y: *level }, Point { x: *x, y: level + 1 }],
            CutGenerator::Line { anchor, .. } => vec![*anchor],
        }
    }
}

/// The components of a window after removing the generators' vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub window: BBox,
    /// Components of the window minus the removed vertices, each sorted.
    pub components: Vec<Vec<Point>>,
    /// Whether each component touches the window border.
    pub unbounded: Vec<bool>,
    /// The largest component touching the border.
    pub infinite: Option<usize>,
    /// Vertices isolated by vertex generators, each forming its own singleton.
    pub separator: Vec<Point>,
    #[serde(skip)]
    labels: HashMap<Point, usize>,
}

impl Cut {
    /// Component index of `p`, or `None` when `p` is a separator vertex.
    pub fn component_of(&self, p: Point) -> Result<Option<usize>, CutError> {
        if !self.window.contains(p) {
            return Err(CutError::OutsideWindow(p));
        }
        Ok(self.labels.get(&p).copied())
    }

    pub fn is_infinite(&self, component: usize) -> bool {
        self.infinite == Some(component)
    }
}

pub fn region_cut(generators: &[CutGenerator], margin: i64) -> Result<Cut, CutError> {
    if generators.is_empty() {
        return Err(CutError::InvalidCut("no generators".into()));
    }
    if margin < 2 {
        return Err(CutError::InvalidCut(format!("window margin {margin} is below 2")));
    }
    for g in generators {
        match g {
            CutGenerator::VertexRay { vector, .. } | CutGenerator::Line { direction: vector, .. } if vector.is_zero() => {
                return Err(CutError::InvalidCut("zero direction vector".into()));
            }
            _ => {}
        }
    }
    let window = BBox::of(generators.iter().flat_map(CutGenerator::anchors))
        .ok_or_else(|| CutError::InvalidCut("empty vertex path".into()))?
        .expanded(margin);

    let mut removed: HashSet<Point> = HashSet::new();
    for g in generators {
        match g {
            CutGenerator::VertexPath { points } => removed.extend(points.iter().copied()),
            CutGenerator::VertexRay { origin, vector } => {
                let mut q = *origin;
                while window.contains(q) {
                    removed.insert(q);
                    q = q + *vector;
                }
            }
            _ => {}
        }
    }
    let cut_edge = |p: Point, q: Point| -> bool {
        generators.iter().any(|g| match g {
            CutGenerator::DualRay { level, x, toward } => {
                p.x == q.x && p.y.min(q.y) == *level && p.y != q.y && (p.x == *x || toward.beyond(p.x, *x))
            }
            CutGenerator::Line { anchor, direction } => {
                line_side(*anchor, *direction, p).ok() != line_side(*anchor, *direction, q).ok()
            }
            _ => false,
        })
    };

    let mut labels: HashMap<Point, usize> = HashMap::new();
    let mut components: Vec<Vec<Point>> = Vec::new();
    let mut unbounded = Vec::new();
    for start in window.points() {
        if removed.contains(&start) || labels.contains_key(&start) {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        let mut touches = window.is_on_border(start);
        labels.insert(start, id);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for d in Direction::ALL {
                let q = p.step(d);
                if !window.contains(q) || removed.contains(&q) || labels.contains_key(&q) || cut_edge(p, q) {
                    continue;
                }
                labels.insert(q, id);
                touches |= window.is_on_border(q);
                members.push(q);
                queue.push_back(q);
            }
        }
        members.sort();
        components.push(members);
        unbounded.push(touches);
    }
    let infinite = (0..components.len())
        .filter(|&c| unbounded[c])
        .max_by_key(|&c| (components[c].len(), std::cmp::Reverse(c)));
    let mut separator: Vec<Point> = removed.into_iter().filter(|p| window.contains(*p)).collect();
    separator.sort();
    Ok(Cut { window, components, unbounded, infinite, separator, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{pt, vec2};

    #[test]
    fn single_vertex_is_isolated() {
        let cut = region_cut(&[CutGenerator::VertexPath { points: vec![pt(0, 0)] }], 2).unwrap();
        assert_eq!(cut.window.width(), 5);
        assert_eq!(cut.components.len(), 1);
        assert_eq!(cut.components[0].len(), 24);
        assert_eq!(cut.infinite, Some(0));
        assert_eq!(cut.separator, vec![pt(0, 0)]);
        assert_eq!(cut.component_of(pt(0, 0)).unwrap(), None);
    }

    #[test]
    fn dual_ray_alone_does_not_separate() {
        let cut = region_cut(&[CutGenerator::DualRay { level: 0, x: 0, toward: Side::West }], 2).unwrap();
        assert_eq!(cut.components.len(), 1);
        assert!(cut.is_infinite(0));
    }

    #[test]
    fn ring_encloses_the_centre() {
        let ring = vec![pt(-1, -1), pt(0, -1), pt(1, -1), pt(1, 0), pt(1, 1), pt(0, 1), pt(-1, 1), pt(-1, 0)];
        let cut = region_cut(&[CutGenerator::VertexPath { points: ring }], 2).unwrap();
        assert_eq!(cut.components.len(), 2);
        let inside = cut.component_of(pt(0, 0)).unwrap().unwrap();
        assert_eq!(cut.components[inside], vec![pt(0, 0)]);
        assert!(!cut.is_infinite(inside));
        assert!(!cut.unbounded[inside]);
    }

    #[test]
    fn line_splits_the_window() {
        let cut = region_cut(&[CutGenerator::Line { anchor: pt(0, 0), direction: vec2(1, 0) }], 3).unwrap();
        assert_eq!(cut.components.len(), 2);
        let up = cut.component_of(pt(0, 1)).unwrap();
        let on = cut.component_of(pt(0, 0)).unwrap();
        let down = cut.component_of(pt(0, -1)).unwrap();
        assert_eq!(up, on);
        assert_ne!(up, down);
    }

    #[test]
    fn queries_outside_the_window_fail() {
        let cut = region_cut(&[CutGenerator::VertexPath { points: vec![pt(0, 0)] }], 2).unwrap();
        assert_eq!(cut.component_of(pt(9, 9)), Err(CutError::OutsideWindow(pt(9, 9))));
        assert!(region_cut(&[], 2).is_err());
        assert!(region_cut(&[CutGenerator::VertexPath { points: vec![pt(0, 0)] }], 1).is_err());
    }

    #[test]
    fn dual_ray_splits_a_half_plane_bounded_by_a_wall() {
        let gens = [
            CutGenerator::VertexRay { origin: pt(0, 0), vector: vec2(0, 1) },
            CutGenerator::VertexRay { origin: pt(0, -1), vector: vec2(0, -1) },
            CutGenerator::DualRay { level: 0, x: 0, toward: Side::East },
        ];
        let cut = region_cut(&gens, 2).unwrap();
        let above = cut.component_of(pt(1, 1)).unwrap();
        let below = cut.component_of(pt(1, 0)).unwrap();
        let west = cut.component_of(pt(-1, 0)).unwrap();
        assert_ne!(above, below);
        assert_eq!(cut.component_of(pt(2, 2)).unwrap(), above);
        assert_ne!(west, above);
    }
}
