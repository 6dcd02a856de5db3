//! The JSON instance file: a tile set, a seed and a path, with tiles named.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::model::{Assembly, ModelError, PathAssembly, TileAssemblySystem, TileSet, TileType};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedTile {
    pub x: i64,
    pub y: i64,
    pub tile: String,
}

impl NamedTile {
    pub fn point(&self) -> Point {
        Point { x: self.x, y: self.y }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub tileset: Vec<TileType>,
    pub seed: Vec<NamedTile>,
    pub path: Vec<NamedTile>,
}

/// A validated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub tas: TileAssemblySystem,
    pub path: PathAssembly,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum InstanceError {
    #[error("syntax error at `{field}` (line {line}, column {column}): {reason}")]
    Syntax { field: String, line: usize, column: usize, reason: String },
    #[error("unknown tile `{name}` at `{field}`")]
    UnknownTile { name: String, field: String },
    #[error("duplicate tile name `{name}` at `{field}`")]
    DuplicateTile { name: String, field: String },
    #[error("invalid seed: {reason}")]
    InvalidSeed { reason: String },
    #[error("seed assembly is not stable at temperature 1")]
    UnstableSeed,
    #[error("invalid path at step {step}: {reason}")]
    InvalidPath { step: usize, reason: String },
}

impl InstanceError {
    /// JSON path of the offending field, when there is one.
    pub fn field(&self) -> Option<String> {
        match self {
            InstanceError::Syntax { field, .. }
            | InstanceError::UnknownTile { field, .. }
            | InstanceError::DuplicateTile { field, .. } => Some(field.clone()),
            InstanceError::InvalidPath { step, .. } => Some(format!("path[{}]", step - 1)),
            InstanceError::InvalidSeed { .. } | InstanceError::UnstableSeed => Some("seed".into()),
        }
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<(InstanceFile, Instance), InstanceError> {
    let file = parse_file(text)?;
    let instance = file.validate()?;
    Ok((file, instance))
}

/// Parses the JSON structure only, reporting the path of the first bad field.
pub fn parse_file(text: &str) -> Result<InstanceFile, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        InstanceError::Syntax { field, line: inner.line(), column: inner.column(), reason: inner.to_string() }
    })
}

impl InstanceFile {
    pub fn validate(&self) -> Result<Instance, InstanceError> {
        let mut names = HashSet::new();
        for (k, t) in self.tileset.iter().enumerate() {
            if !names.insert(t.name.as_str()) {
                return Err(InstanceError::DuplicateTile { name: t.name.clone(), field: format!("tileset[{k}].name") });
            }
        }
        let tileset = TileSet::new(self.tileset.clone()).map_err(|e| InstanceError::InvalidSeed { reason: e.to_string() })?;
        let resolve = |list: &str, k: usize, t: &NamedTile| {
            tileset
                .id(&t.tile)
                .map(|id| (t.point(), id))
                .map_err(|_| InstanceError::UnknownTile { name: t.tile.clone(), field: format!("{list}[{k}].tile") })
        };
        let seed = self.seed.iter().enumerate().map(|(k, t)| resolve("seed", k, t)).collect::<Result<Vec<_>, _>>()?;
        let steps = self.path.iter().enumerate().map(|(k, t)| resolve("path", k, t)).collect::<Result<Vec<_>, _>>()?;

        let mut seen = HashSet::new();
        if let Some((p, _)) = seed.iter().find(|(p, _)| !seen.insert(*p)) {
            return Err(InstanceError::InvalidSeed { reason: format!("position {p} is listed twice") });
        }
        let seed = Assembly::new(seed).map_err(|e| InstanceError::InvalidSeed { reason: e.to_string() })?;
        let tas = TileAssemblySystem::new(tileset, seed).map_err(|e| match e {
            ModelError::UnstableSeed => InstanceError::UnstableSeed,
            other => InstanceError::InvalidSeed { reason: other.to_string() },
        })?;
        let path = PathAssembly::new(&tas, steps).map_err(|e| match e {
            ModelError::InvalidPath { step, reason } => InstanceError::InvalidPath { step, reason },
            other => InstanceError::InvalidPath { step: 1, reason: other.to_string() },
        })?;
        Ok(Instance { tas, path })
    }

    /// The file describing a system and a path. The seed is listed in (y, x) order.
    pub fn from_system(tas: &TileAssemblySystem, path: &PathAssembly) -> InstanceFile {
        let named = |(p, t): (Point, crate::model::TileId)| NamedTile { x: p.x, y: p.y, tile: tas.tileset.name(t).to_string() };
        let mut seed: Vec<(Point, _)> = tas.seed.iter().collect();
        seed.sort_by_key(|(p, _)| *p);
        InstanceFile {
            tileset: tas.tileset.tiles().to_vec(),
            seed: seed.into_iter().map(named).collect(),
            path: path.steps().iter().copied().map(named).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }
}
