//! Classifying how a lattice walk meets a path: apart, touching, or crossing.

use serde::{Deserialize, Serialize};

use crate::geom::{walk_side, Point, WalkSide};
use crate::model::{PathAssembly, TileAssemblySystem};

use super::path_frame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contact {
    Disjoint,
    Touches,
    Crosses,
}

/// Side of the path from which `outside` (adjacent to path tile `m`) is reached.
fn side_at(tas: &TileAssemblySystem, path: &PathAssembly, m: usize, outside: Point) -> Option<WalkSide> {
    let (back, out) = path_frame(tas, path, m)?;
    let d = path.pos(m).direction_to(outside)?;
    walk_side(back, out, d)
}

/// Walks along every maximal run of `walk` on `path` and compares the sides it
/// arrives from and leaves towards. Runs touching either end of the walk, or
/// either end of the path, have an undetermined side and count as touching.
pub fn classify_contact(tas: &TileAssemblySystem, walk: &[Point], path: &PathAssembly) -> Contact {
    let on: Vec<Option<usize>> = walk.iter().map(|p| path.index_of(*p)).collect();
    if on.iter().all(Option::is_none) {
        return Contact::Disjoint;
    }
    let mut s = 0;
    while s < walk.len() {
        if on[s].is_none() {
            s += 1;
            continue;
        }
        let mut e = s;
        while e + 1 < walk.len() && on[e + 1].is_some() {
            e += 1;
        }
        if s > 0 && e + 1 < walk.len() {
            let entry = side_at(tas, path, on[s].expect("run vertex"), walk[s - 1]);
            let exit = side_at(tas, path, on[e].expect("run vertex"), walk[e + 1]);
            if let (Some(a), Some(b)) = (entry, exit) {
                if a != b {
                    return Contact::Crosses;
                }
            }
        }
        s = e + 1;
    }
    Contact::Touches
}
