//! Tiles, assemblies, path assemblies and temperature-1 growth.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{BBox, Direction, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ModelError {
    #[error("invalid assembly: {reason}")]
    InvalidAssembly { reason: String },
    #[error("position {point} is already occupied")]
    PositionOccupied { point: Point },
    #[error("unknown tile `{name}`")]
    UnknownTile { name: String },
    #[error("duplicate tile name `{name}`")]
    DuplicateTile { name: String },
    #[error("seed assembly is not stable at temperature 1")]
    UnstableSeed,
    #[error("invalid path at step {step}: {reason}")]
    InvalidPath { step: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[error("growth failed at step {step}: {kind}")]
pub struct GrowthError {
    /// 1-based index into the growth order.
    pub step: usize,
    pub kind: GrowthFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum GrowthFailure {
    NotAttachable { point: Point },
    Conflict { point: Point },
    UnknownTile,
}

impl fmt::Display for GrowthFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFailure::NotAttachable { point } => write!(f, "tile at {point} has no bond to the assembly"),
            GrowthFailure::Conflict { point } => write!(f, "position {point} holds a different tile"),
            GrowthFailure::UnknownTile => f.write_str("unknown tile id"),
        }
    }
}

/// A glue: a label and a strength. Strength 0 means the side is inert.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Glue {
    pub label: String,
    pub strength: u32,
}

impl Glue {
    pub fn new(label: impl Into<String>, strength: u32) -> Glue {
        Glue { label: label.into(), strength }
    }

    pub fn null() -> Glue {
        Glue::default()
    }

    pub fn is_active(&self) -> bool {
        self.strength >= 1 && !self.label.is_empty()
    }

    pub fn binds(&self, other: &Glue) -> bool {
        self.is_active() && self == other
    }
}

impl Serialize for Glue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.label, self.strength).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Glue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (label, strength) = <(String, u32)>::deserialize(d)?;
        Ok(Glue { label, strength })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileType {
    pub name: String,
    pub north: Glue,
    pub east: Glue,
    pub south: Glue,
    pub west: Glue,
}

impl TileType {
    pub fn new(name: impl Into<String>, north: Glue, east: Glue, south: Glue, west: Glue) -> TileType {
        TileType { name: name.into(), north, east, south, west }
    }

    /// A tile type with the same glue on every side.
    pub fn uniform(name: impl Into<String>, glue: Glue) -> TileType {
        TileType::new(name, glue.clone(), glue.clone(), glue.clone(), glue)
    }

    pub fn glue(&self, side: Direction) -> &Glue {
        match side {
            Direction::North => &self.north,
            Direction::East => &self.east,
            Direction::South => &self.south,
            Direction::West => &self.west,
        }
    }

    pub fn mirrored(&self) -> TileType {
        TileType {
            name: self.name.clone(),
            north: self.north.clone(),
            east: self.west.clone(),
            south: self.south.clone(),
            west: self.east.clone(),
        }
    }
}

/// Index of a tile type within its [`TileSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileId(pub usize);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TileSet {
    tiles: Vec<TileType>,
    by_name: HashMap<String, TileId>,
}

impl TileSet {
    pub fn new(tiles: Vec<TileType>) -> Result<TileSet, ModelError> {
        let mut by_name = HashMap::with_capacity(tiles.len());
        for (idx, t) in tiles.iter().enumerate() {
            if by_name.insert(t.name.clone(), TileId(idx)).is_some() {
                return Err(ModelError::DuplicateTile { name: t.name.clone() });
            }
        }
        Ok(TileSet { tiles, by_name })
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, id: TileId) -> &TileType {
        &self.tiles[id.0]
    }

    pub fn try_get(&self, id: TileId) -> Option<&TileType> {
        self.tiles.get(id.0)
    }

    pub fn id(&self, name: &str) -> Result<TileId, ModelError> {
        self.by_name.get(name).copied().ok_or_else(|| ModelError::UnknownTile { name: name.to_string() })
    }

    pub fn name(&self, id: TileId) -> &str {
        &self.tiles[id.0].name
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    /// Whether a tile `a` and a tile `b` placed one step in direction `dir` from it bind.
    pub fn interacts(&self, a: TileId, dir: Direction, b: TileId) -> bool {
        self.get(a).glue(dir).binds(self.get(b).glue(dir.opposite()))
    }

    pub fn mirrored(&self) -> TileSet {
        TileSet::new(self.tiles.iter().map(TileType::mirrored).collect()).expect("names stay unique")
    }
}

/// A finite partial map from lattice points to tile types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assembly {
    tiles: BTreeMap<Point, TileId>,
}

impl Assembly {
    pub fn empty() -> Assembly {
        Assembly::default()
    }

    /// Builds an assembly and checks that its domain is non-empty and 4-connected.
    pub fn new(tiles: impl IntoIterator<Item = (Point, TileId)>) -> Result<Assembly, ModelError> {
        let a = Assembly::from_tiles(tiles);
        if a.is_empty() {
            return Err(ModelError::InvalidAssembly { reason: "empty domain".into() });
        }
        if !a.is_connected() {
            return Err(ModelError::InvalidAssembly { reason: "domain is not 4-connected".into() });
        }
        Ok(a)
    }

    /// Builds an assembly without connectivity checks. Later entries overwrite earlier ones.
    pub fn from_tiles(tiles: impl IntoIterator<Item = (Point, TileId)>) -> Assembly {
        Assembly { tiles: tiles.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, p: Point) -> Option<TileId> {
        self.tiles.get(&p).copied()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.tiles.contains_key(&p)
    }

    pub fn insert(&mut self, p: Point, t: TileId) -> Option<TileId> {
        self.tiles.insert(p, t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, TileId)> + '_ {
        self.tiles.iter().map(|(p, t)| (*p, *t))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.tiles.keys().copied()
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::of(self.points())
    }

    pub fn max_y(&self) -> Option<i64> {
        self.tiles.keys().map(|p| p.y).max()
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.tiles.keys().next().copied() else {
            return true;
        };
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in p.neighbors() {
                if self.contains(q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.len() == self.len()
    }

    /// Union that keeps `self`'s tile where both are defined.
    pub fn union(&self, other: &Assembly) -> Assembly {
        let mut out = other.clone();
        for (p, t) in self.iter() {
            out.insert(p, t);
        }
        out
    }

    pub fn mirrored(&self) -> Assembly {
        Assembly::from_tiles(self.iter().map(|(p, t)| (p.mirrored(), t)))
    }
}

impl FromIterator<(Point, TileId)> for Assembly {
    fn from_iter<I: IntoIterator<Item = (Point, TileId)>>(iter: I) -> Self {
        Assembly::from_tiles(iter)
    }
}

/// Least point (by `y`, then `x`) where both assemblies hold different tiles.
pub fn conflict(a: &Assembly, b: &Assembly) -> Option<Point> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().find(|(p, t)| large.get(*p).is_some_and(|u| u != *t)).map(|(p, _)| p)
}

/// Whether the binding graph of `a` is connected at temperature 1.
pub fn is_stable(tileset: &TileSet, a: &Assembly) -> Result<bool, ModelError> {
    let Some(start) = a.points().next() else {
        return Err(ModelError::InvalidAssembly { reason: "empty domain".into() });
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let t = a.get(p).expect("visited points are in the domain");
        for d in Direction::ALL {
            let q = p.step(d);
            if let Some(u) = a.get(q) {
                if tileset.interacts(t, d, u) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(seen.len() == a.len())
}

/// Whether tile `t` can attach to `a` at the empty position `p`.
pub fn attachable(tileset: &TileSet, a: &Assembly, p: Point, t: TileId) -> Result<bool, ModelError> {
    if a.contains(p) {
        return Err(ModelError::PositionOccupied { point: p });
    }
    Ok(binds_into(tileset, |q| a.get(q), p, t))
}

pub(crate) fn binds_into(tileset: &TileSet, lookup: impl Fn(Point) -> Option<TileId>, p: Point, t: TileId) -> bool {
    Direction::ALL.iter().any(|&d| lookup(p.step(d)).is_some_and(|u| tileset.interacts(t, d, u)))
}

/// A temperature-1 tile assembly system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileAssemblySystem {
    pub tileset: TileSet,
    pub seed: Assembly,
}

impl TileAssemblySystem {
    pub fn new(tileset: TileSet, seed: Assembly) -> Result<TileAssemblySystem, ModelError> {
        if seed.is_empty() {
            return Err(ModelError::InvalidAssembly { reason: "empty seed".into() });
        }
        if let Some((_, t)) = seed.iter().find(|(_, t)| tileset.try_get(*t).is_none()) {
            return Err(ModelError::UnknownTile { name: format!("#{}", t.0) });
        }
        if !is_stable(&tileset, &seed)? {
            return Err(ModelError::UnstableSeed);
        }
        Ok(TileAssemblySystem { tileset, seed })
    }

    pub fn mirrored(&self) -> TileAssemblySystem {
        TileAssemblySystem { tileset: self.tileset.mirrored(), seed: self.seed.mirrored() }
    }

    pub fn seed_top(&self) -> i64 {
        self.seed.max_y().expect("seed is non-empty")
    }
}

/// Grows `order` tile by tile from the seed.
///
/// A tile placed on a position already holding the same tile is a no-op; any
/// other occupied position is a conflict.
pub fn grow_sequence(tas: &TileAssemblySystem, order: &[(Point, TileId)]) -> Result<Assembly, GrowthError> {
    let mut a = tas.seed.clone();
    for (idx, &(p, t)) in order.iter().enumerate() {
        let step = idx + 1;
        if tas.tileset.try_get(t).is_none() {
            return Err(GrowthError { step, kind: GrowthFailure::UnknownTile });
        }
        match a.get(p) {
            Some(u) if u == t => continue,
            Some(_) => return Err(GrowthError { step, kind: GrowthFailure::Conflict { point: p } }),
            None => {}
        }
        if !binds_into(&tas.tileset, |q| a.get(q), p, t) {
            return Err(GrowthError { step, kind: GrowthFailure::NotAttachable { point: p } });
        }
        a.insert(p, t);
    }
    Ok(a)
}

/// A simple path of tiles growing from the seed, each bound to its predecessor.
///
/// Indices are 1-based: `pos(1)` is the first tile after the seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathAssembly {
    steps: Vec<(Point, TileId)>,
    index: HashMap<Point, usize>,
}

impl PathAssembly {
    /// Validates the path against a system.
    pub fn new(tas: &TileAssemblySystem, steps: Vec<(Point, TileId)>) -> Result<PathAssembly, ModelError> {
        let invalid = |step: usize, reason: String| ModelError::InvalidPath { step, reason };
        if steps.is_empty() {
            return Err(invalid(1, "path is empty".into()));
        }
        let mut index = HashMap::with_capacity(steps.len());
        for (k, &(p, t)) in steps.iter().enumerate() {
            let step = k + 1;
            if tas.tileset.try_get(t).is_none() {
                return Err(invalid(step, format!("unknown tile id {}", t.0)));
            }
            if tas.seed.contains(p) {
                return Err(invalid(step, format!("position {p} overlaps the seed")));
            }
            if index.insert(p, step).is_some() {
                return Err(invalid(step, format!("position {p} is visited twice")));
            }
            if k == 0 {
                let bound = Direction::ALL
                    .iter()
                    .any(|&d| tas.seed.get(p.step(d)).is_some_and(|u| tas.tileset.interacts(t, d, u)));
                if !bound {
                    return Err(invalid(step, format!("first tile at {p} does not bind to the seed")));
                }
            } else {
                let (q, u) = steps[k - 1];
                let Some(d) = q.direction_to(p) else {
                    return Err(invalid(step, format!("{p} is not adjacent to {q}")));
                };
                if !tas.tileset.interacts(u, d, t) {
                    return Err(invalid(step, format!("tile at {p} does not bind to its predecessor")));
                }
            }
        }
        Ok(PathAssembly { steps, index })
    }

    /// Builds a path without validation. Callers guarantee simplicity.
    pub(crate) fn from_steps_unchecked(steps: Vec<(Point, TileId)>) -> PathAssembly {
        let index = steps.iter().enumerate().map(|(k, (p, _))| (*p, k + 1)).collect();
        PathAssembly { steps, index }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn pos(&self, i: usize) -> Point {
        self.steps[i - 1].0
    }

    pub fn tile(&self, i: usize) -> TileId {
        self.steps[i - 1].1
    }

    pub fn steps(&self) -> &[(Point, TileId)] {
        &self.steps
    }

    /// 1-based index of the tile at `p`, if any.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.index.get(&p).copied()
    }

    /// Direction from tile `i` to tile `i + 1`.
    pub fn out_dir(&self, i: usize) -> Option<Direction> {
        if i == 0 || i >= self.len() {
            return None;
        }
        self.pos(i).direction_to(self.pos(i + 1))
    }

    /// Prefix `P[1, n]`.
    pub fn prefix(&self, n: usize) -> PathAssembly {
        PathAssembly::from_steps_unchecked(self.steps[..n.min(self.len())].to_vec())
    }

    pub fn assembly(&self) -> Assembly {
        Assembly::from_tiles(self.steps.iter().copied())
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(self.steps.iter().map(|s| s.0)).expect("paths are non-empty")
    }

    /// The seed tile the first tile binds to, probing sides in N, E, S, W order.
    pub fn anchor(&self, tas: &TileAssemblySystem) -> Option<Point> {
        let (p, t) = self.steps[0];
        Direction::ALL
            .iter()
            .map(|&d| (d, p.step(d)))
            .find(|&(d, q)| tas.seed.get(q).is_some_and(|u| tas.tileset.interacts(t, d, u)))
            .map(|(_, q)| q)
    }

    pub fn mirrored(&self) -> PathAssembly {
        PathAssembly::from_steps_unchecked(self.steps.iter().map(|(p, t)| (p.mirrored(), *t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;

    fn one_tile_system() -> (TileAssemblySystem, TileId) {
        let ts = TileSet::new(vec![TileType::uniform("t", Glue::new("a", 1))]).unwrap();
        let t = ts.id("t").unwrap();
        let seed = Assembly::new([(pt(0, 0), t)]).unwrap();
        (TileAssemblySystem::new(ts, seed).unwrap(), t)
    }

    #[test]
    fn glues_bind_only_when_equal_and_active() {
        assert!(Glue::new("a", 1).binds(&Glue::new("a", 1)));
        assert!(!Glue::new("a", 1).binds(&Glue::new("b", 1)));
        assert!(!Glue::new("a", 0).binds(&Glue::new("a", 0)));
        assert!(!Glue::null().binds(&Glue::null()));
    }

    #[test]
    fn assembly_requires_connected_domain() {
        let t = TileId(0);
        assert!(Assembly::new([(pt(0, 0), t), (pt(2, 0), t)]).is_err());
        assert!(Assembly::new([(pt(0, 0), t), (pt(1, 0), t)]).is_ok());
        assert!(Assembly::new([]).is_err());
    }

    #[test]
    fn stability_follows_bonds_not_adjacency() {
        let ts = TileSet::new(vec![
            TileType::new("a", Glue::null(), Glue::new("x", 1), Glue::null(), Glue::null()),
            TileType::new("b", Glue::null(), Glue::null(), Glue::null(), Glue::new("y", 1)),
        ])
        .unwrap();
        let a = Assembly::new([(pt(0, 0), TileId(0)), (pt(1, 0), TileId(1))]).unwrap();
        assert!(!is_stable(&ts, &a).unwrap());
        assert!(is_stable(&ts, &Assembly::new([(pt(0, 0), TileId(0))]).unwrap()).unwrap());
        assert!(is_stable(&ts, &Assembly::empty()).is_err());
    }

    #[test]
    fn attachable_checks_occupancy_and_bonds() {
        let (tas, t) = one_tile_system();
        assert!(attachable(&tas.tileset, &tas.seed, pt(1, 0), t).unwrap());
        assert!(!attachable(&tas.tileset, &tas.seed, pt(1, 1), t).unwrap());
        assert_eq!(
            attachable(&tas.tileset, &tas.seed, pt(0, 0), t),
            Err(ModelError::PositionOccupied { point: pt(0, 0) })
        );
    }

    #[test]
    fn conflict_reports_least_point() {
        let a = Assembly::from_tiles([(pt(3, 0), TileId(0)), (pt(0, 1), TileId(0)), (pt(9, 9), TileId(0))]);
        let b = Assembly::from_tiles([(pt(3, 0), TileId(1)), (pt(0, 1), TileId(1)), (pt(9, 9), TileId(0))]);
        assert_eq!(conflict(&a, &b), Some(pt(3, 0)));
        assert_eq!(conflict(&a, &a), None);
    }

    #[test]
    fn grow_sequence_reports_failing_step() {
        let (tas, t) = one_tile_system();
        let ok = grow_sequence(&tas, &[(pt(1, 0), t), (pt(1, 1), t), (pt(1, 1), t)]).unwrap();
        assert_eq!(ok.len(), 3);
        let err = grow_sequence(&tas, &[(pt(1, 0), t), (pt(5, 5), t)]).unwrap_err();
        assert_eq!(err.step, 2);
        assert!(matches!(err.kind, GrowthFailure::NotAttachable { .. }));
    }

    #[test]
    fn path_validation() {
        let (tas, t) = one_tile_system();
        let p = PathAssembly::new(&tas, vec![(pt(1, 0), t), (pt(2, 0), t)]).unwrap();
        assert_eq!(p.pos(2), pt(2, 0));
        assert_eq!(p.index_of(pt(1, 0)), Some(1));
        assert_eq!(p.out_dir(1), Some(Direction::East));
        assert_eq!(p.anchor(&tas), Some(pt(0, 0)));
        let gap = PathAssembly::new(&tas, vec![(pt(1, 0), t), (pt(3, 0), t)]).unwrap_err();
        assert!(matches!(gap, ModelError::InvalidPath { step: 2, .. }));
        let over = PathAssembly::new(&tas, vec![(pt(0, 0), t)]).unwrap_err();
        assert!(matches!(over, ModelError::InvalidPath { step: 1, .. }));
        let loose = PathAssembly::new(&tas, vec![(pt(2, 0), t)]).unwrap_err();
        assert!(matches!(loose, ModelError::InvalidPath { step: 1, .. }));
    }
}
