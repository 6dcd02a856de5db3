//! Exhaustive enumeration of small instances that contain a nice U-turn.
//!
//! The instances are single-tile seeds at the origin with paths of at most
//! `max_len` tiles inside a square window, over at most two tile types. The
//! analysis only depends on the path's positions and on which tiles share a
//! type, so instances are generated as (shape, type pattern) pairs and then
//! realised with at most two glue labels.

use std::collections::HashSet;

use crate::engine::uturn::{uturn_candidates, NiceUTurn};
use crate::geom::{pt, BBox, Direction, Point};
use crate::model::{Assembly, Glue, PathAssembly, TileAssemblySystem, TileId, TileSet, TileType};
use crate::visibility::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_len: usize,
    pub window: BBox,
    pub hand: Side,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { max_len: 10, window: BBox { min: pt(-5, -5), max: pt(6, 6) }, hand: Side::West }
    }
}

/// Every self-avoiding walk of 1 to `max_len` cells starting next to the origin,
/// avoiding the origin and staying inside the window.
pub fn shapes(config: &CorpusConfig) -> Vec<Vec<Point>> {
    fn extend(config: &CorpusConfig, walk: &mut Vec<Point>, out: &mut Vec<Vec<Point>>) {
        out.push(walk.clone());
        if walk.len() == config.max_len {
            return;
        }
        let last = *walk.last().expect("non-empty walk");
        for d in Direction::ALL {
            let q = last.step(d);
            if q == Point::ORIGIN || !config.window.contains(q) || walk.contains(&q) {
                continue;
            }
            walk.push(q);
            extend(config, walk, out);
            walk.pop();
        }
    }
    let mut out = Vec::new();
    for d in Direction::ALL {
        let q = Point::ORIGIN.step(d);
        if config.window.contains(q) {
            extend(config, &mut vec![q], &mut out);
        }
    }
    out
}

fn probe_system() -> TileAssemblySystem {
    let ts = TileSet::new(vec![TileType::uniform("a", Glue::new("a", 1))]).expect("one tile");
    TileAssemblySystem::new(ts, Assembly::from_tiles([(Point::ORIGIN, TileId(0))])).expect("stable seed")
}

/// A corpus entry: the path truncated right after its U-turn, with the type
/// pattern as a bit mask (bit `k-1` set means tile `k` has the second type).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorpusKey {
    pub shape: Vec<Point>,
    pub pattern: u32,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// All distinct instances obtained by truncating a typed path of the corpus
/// after the U-turn its lexicographically least detection selects.
pub fn corpus_keys(config: &CorpusConfig) -> Vec<CorpusKey> {
    let probe = probe_system();
    let mut seen: HashSet<CorpusKey> = HashSet::new();
    let mut out = Vec::new();
    for shape in shapes(config) {
        let path = PathAssembly::from_steps_unchecked(shape.iter().map(|p| (*p, TileId(0))).collect());
        let cands: Vec<NiceUTurn> = uturn_candidates(&probe, &path, config.hand);
        if cands.is_empty() {
            continue;
        }
        let n = shape.len();
        for pattern in 0u32..(1 << n) {
            let bit = |k: usize| (pattern >> (k - 1)) & 1;
            let Some(u) = cands.iter().find(|u| bit(u.i) == bit(u.j)) else { continue };
            let key = CorpusKey { shape: shape[..=u.k].to_vec(), pattern: pattern & ((1 << (u.k + 1)) - 1), i: u.i, j: u.j, k: u.k };
            if seen.insert(key.clone()) {
                out.push(key);
            }
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn var(tile: usize, side: Direction) -> usize {
    let s = match side {
        Direction::North => 0,
        Direction::East => 1,
        Direction::South => 2,
        Direction::West => 3,
    };
    tile * 4 + s
}

/// Builds a system realising the shape and pattern with glue labels `a` and `b`,
/// or `None` when the pattern forces both types to have identical glues.
pub fn realize(shape: &[Point], pattern: u32) -> Option<(TileAssemblySystem, PathAssembly)> {
    let ty = |k: usize| ((pattern >> (k - 1)) & 1) as usize;
    let mut uf = UnionFind((0..8).collect());
    let mut constrained = [false; 8];
    let mut bind = |a: usize, b: usize, uf: &mut UnionFind| {
        constrained[a] = true;
        constrained[b] = true;
        uf.union(a, b);
    };
    let mut prev = (Point::ORIGIN, 0usize);
    for (k, &p) in shape.iter().enumerate() {
        let t = ty(k + 1);
        let d = prev.0.direction_to(p).expect("shapes are lattice walks");
        bind(var(prev.1, d), var(t, d.opposite()), &mut uf);
        prev = (p, t);
    }
    let two_types = (1..=shape.len()).any(|k| ty(k) == 1);
    let mut labels = [None::<&str>; 8];
    for x in 0..8 {
        if constrained[x] {
            labels[x] = Some("a");
        }
    }
    let mut inert_marker = None;
    if two_types {
        let identical = Direction::ALL.iter().all(|&d| {
            let (x, y) = (var(0, d), var(1, d));
            constrained[x] == constrained[y] && (!constrained[x] || uf.find(x) == uf.find(y))
        });
        if identical && (0..8).all(|x| constrained[x]) {
            return None;
        }
        if identical {
            let d = Direction::ALL.into_iter().find(|&d| !constrained[var(1, d)]).expect("some side is free");
            inert_marker = Some(var(1, d));
        } else if let Some(d) = Direction::ALL
            .into_iter()
            .find(|&d| constrained[var(0, d)] && constrained[var(1, d)] && uf.find(var(0, d)) != uf.find(var(1, d)))
        {
            let class = uf.find(var(1, d));
            for x in 0..8 {
                if constrained[x] && uf.find(x) == class {
                    labels[x] = Some("b");
                }
            }
        }
    }
    let glue = |x: usize| match labels[x] {
        Some(l) => Glue::new(l, 1),
        None if inert_marker == Some(x) => Glue::new("b", 0),
        None => Glue::null(),
    };
    let make = |t: usize, name: &str| {
        TileType::new(name, glue(var(t, Direction::North)), glue(var(t, Direction::East)), glue(var(t, Direction::South)), glue(var(t, Direction::West)))
    };
    let mut tiles = vec![make(0, "t0")];
    if two_types {
        tiles.push(make(1, "t1"));
    }
    debug_assert!(tiles.len() < 2 || tiles[0].north != tiles[1].north || tiles[0].east != tiles[1].east || tiles[0].south != tiles[1].south || tiles[0].west != tiles[1].west);
    let ts = TileSet::new(tiles).expect("distinct names");
    let tas = TileAssemblySystem::new(ts, Assembly::from_tiles([(Point::ORIGIN, TileId(0))])).ok()?;
    let steps = shape.iter().enumerate().map(|(k, p)| (*p, TileId(ty(k + 1)))).collect();
    let path = PathAssembly::new(&tas, steps).ok()?;
    Some((tas, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_of_length_two_in_a_large_window() {
        let config = CorpusConfig { max_len: 2, window: BBox { min: pt(-9, -9), max: pt(9, 9) }, hand: Side::West };
        let all = shapes(&config);
        assert_eq!(all.iter().filter(|s| s.len() == 1).count(), 4);
        assert_eq!(all.iter().filter(|s| s.len() == 2).count(), 12);
    }

    #[test]
    fn realised_instances_keep_the_pattern() {
        let shape = vec![pt(0, 1), pt(0, 2), pt(1, 2)];
        for pattern in 0..8 {
            let (tas, path) = realize(&shape, pattern).unwrap();
            for k in 1..=3 {
                assert_eq!(path.tile(k).0 as u32, (pattern >> (k - 1)) & 1);
            }
            assert!(tas.tileset.len() <= 2);
            let labels: HashSet<&str> = tas
                .tileset
                .tiles()
                .iter()
                .flat_map(|t| Direction::ALL.map(|d| t.glue(d).label.as_str()))
                .filter(|l| !l.is_empty())
                .collect();
            assert!(labels.len() <= 2);
        }
    }

    #[test]
    fn fully_constrained_identical_types_are_unrealisable() {
        // t0 t1 t0 t1 around a square forces both types to carry the same glues on all sides
        let shape = vec![pt(1, 0), pt(1, 1), pt(0, 1), pt(-1, 1), pt(-1, 0), pt(-1, -1), pt(0, -1), pt(1, -1), pt(2, -1)];
        let count = (0..(1u32 << shape.len())).filter(|&p| realize(&shape, p).is_none()).count();
        assert!(count > 0);
    }
}
