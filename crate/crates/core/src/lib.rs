//! Pumping and fragility analysis for temperature-1 tile assembly paths.

pub mod api;
pub mod certify;
pub mod corpus;
pub mod cut;
pub mod engine;
pub mod fixtures;
pub mod fragility;
pub mod geom;
pub mod instance;
pub mod model;
pub mod movies;
pub mod pumping;
pub mod render;
pub mod visibility;

pub use geom::{pt, vec2, BBox, Direction, Point, Vector};
pub use model::{Assembly, Glue, PathAssembly, TileAssemblySystem, TileId, TileSet, TileType};
