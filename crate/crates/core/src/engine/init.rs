//! Choosing the pair of tiles the stake-path algorithm starts from.

use serde::{Deserialize, Serialize};

use crate::model::{PathAssembly, TileAssemblySystem};
use crate::visibility::{visible_glues, GlueKind, Side};

use super::uturn::{detect_nice_uturn, NiceUTurn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum InitialPair {
    Pair { i: usize, j: usize },
    UTurnFound { i: usize, j: usize, k: usize },
    TooShort,
}

/// Default height the path must climb above the seed before a pair is sought.
pub fn default_height_budget(tas: &TileAssemblySystem) -> i64 {
    2 * tas.tileset.len() as i64 + 2
}

/// Finds two same-type north glues visible from `hand` once the path has
/// climbed more than `height_budget` rows above the seed.
///
/// The pair must be visible both on the prefix that first exceeds the budget
/// and on the whole path; otherwise a nice U-turn is sought. When neither
/// exists, the first pair visible on the prefix is returned.
pub fn find_initial_pair(tas: &TileAssemblySystem, path: &PathAssembly, height_budget: i64, hand: Side) -> InitialPair {
    let top = tas.seed_top();
    let Some(k) = (1..=path.len()).find(|&k| path.pos(k).y - top > height_budget) else {
        return InitialPair::TooShort;
    };
    let north_visible = |p: &PathAssembly| -> Vec<usize> {
        visible_glues(tas, p, hand).visible.iter().filter(|e| e.kind == GlueKind::North).map(|e| e.index).collect()
    };
    let on_prefix = north_visible(&path.prefix(k));
    let on_path = north_visible(path);
    let mut pairs = Vec::new();
    for (a, &i) in on_prefix.iter().enumerate() {
        for &j in &on_prefix[a + 1..] {
            if path.tile(i) == path.tile(j) && path.pos(i).y < path.pos(j).y {
                pairs.push((i, j));
            }
        }
    }
    if let Some(&(i, j)) = pairs.iter().find(|(i, j)| on_path.contains(i) && on_path.contains(j)) {
        return InitialPair::Pair { i, j };
    }
    if let Some(NiceUTurn { i, j, k }) = detect_nice_uturn(tas, path, hand) {
        return InitialPair::UTurnFound { i, j, k };
    }
    match pairs.first() {
        Some(&(i, j)) => InitialPair::Pair { i, j },
        None => InitialPair::TooShort,
    }
}
