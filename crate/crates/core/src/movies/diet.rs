//! Paths that leave a flat rectangle around the seed sideways.

use serde::{Deserialize, Serialize};

use crate::geom::{vec2, BBox, Direction, Point, Vector};
use crate::model::{PathAssembly, TileAssemblySystem};

use super::movie::{movies_equal_upto, record_movie, Movie};
use super::window::Window;

/// The rectangle `R^d`: the seed's bounding box widened by `half_width`
/// columns and `half_height` rows on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DietConfig {
    pub half_width: i64,
    pub half_height: i64,
}

impl Default for DietConfig {
    fn default() -> Self {
        DietConfig { half_width: 16, half_height: 4 }
    }
}

impl DietConfig {
    pub fn rectangle(&self, tas: &TileAssemblySystem) -> BBox {
        let seed = tas.seed.bbox().expect("seed is non-empty");
        BBox {
            min: Point { x: seed.min.x - self.half_width, y: seed.min.y - self.half_height },
            max: Point { x: seed.max.x + self.half_width, y: seed.max.y + self.half_height },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DietOutcome {
    /// The path leaves the rectangle through its north or south side first.
    Escape { side: Direction, index: usize },
    /// The path leaves east or west, and the prefix up to the exit has equal
    /// movies on `first` and on `first + vector`.
    RepeatFound { side: Direction, index: usize, first: Window, second: Window, vector: Vector },
    /// The path never leaves the rectangle, or leaves sideways without a repeated movie.
    Exhausted { escape: Option<(Direction, usize)> },
}

/// Looks for the first exit of the path from the rectangle and, on a sideways
/// exit, for two vertical windows the prefix crosses with equal movies.
pub fn diet_check(tas: &TileAssemblySystem, path: &PathAssembly, config: &DietConfig) -> DietOutcome {
    let rect = config.rectangle(tas);
    let Some(index) = (1..=path.len()).find(|&k| !rect.contains(path.pos(k))) else {
        return DietOutcome::Exhausted { escape: None };
    };
    let p = path.pos(index);
    let side = if p.y > rect.max.y {
        Direction::North
    } else if p.y < rect.min.y {
        Direction::South
    } else if p.x > rect.max.x {
        Direction::East
    } else {
        Direction::West
    };
    if side.is_vertical() {
        return DietOutcome::Escape { side, index };
    }
    let prefix = path.prefix(index);
    let seed = tas.seed.bbox().expect("seed is non-empty");
    let clip = rect.union(prefix.bbox()).expanded(1);
    // windows with the whole seed on their low (east exit) or high (west exit) side
    let xs: Vec<i64> = match side {
        Direction::East => (seed.max.x..p.x).collect(),
        _ => (p.x..seed.min.x).rev().collect(),
    };
    let movies: Vec<(i64, Movie)> = xs
        .into_iter()
        .map(|x| (x, record_movie(tas, &prefix, &Window::vertical(x, clip)).expect("clip covers the prefix")))
        .filter(|(_, m)| !m.is_empty())
        .collect();
    for (b, (xb, mb)) in movies.iter().enumerate() {
        for (xa, ma) in &movies[..b] {
            let vector = vec2(xb - xa, 0);
            if movies_equal_upto(ma, mb, vector) {
                return DietOutcome::RepeatFound {
                    side,
                    index,
                    first: Window::vertical(*xa, clip),
                    second: Window::vertical(*xb, clip),
                    vector,
                };
            }
        }
    }
    DietOutcome::Exhausted { escape: Some((side, index)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::movies::wml::{wml_pump, WmlOutcome};

    #[test]
    fn line_escapes_east_with_a_repeat() {
        let f = fixtures::line_e();
        let out = diet_check(&f.tas, &f.path, &DietConfig { half_width: 2, half_height: 1 });
        let DietOutcome::RepeatFound { side, index, first, vector, .. } = out else { panic!("unexpected {out:?}") };
        assert_eq!((side, index, vector), (Direction::East, 3, vec2(1, 0)));
        assert_eq!(first.kind, crate::movies::WindowKind::VerticalLine { x: 0 });
        let prefix = f.path.prefix(index);
        assert!(matches!(wml_pump(&f.tas, &prefix, &first, vector).unwrap(), WmlOutcome::Pumpable { .. }));
    }

    #[test]
    fn column_escapes_north() {
        let f = fixtures::col_n();
        let out = diet_check(&f.tas, &f.path, &DietConfig { half_width: 2, half_height: 2 });
        assert_eq!(out, DietOutcome::Escape { side: Direction::North, index: 3 });
    }

    #[test]
    fn short_paths_stay_inside() {
        let f = fixtures::hook_s();
        assert_eq!(diet_check(&f.tas, &f.path, &DietConfig::default()), DietOutcome::Exhausted { escape: None });
    }

    #[test]
    fn west_exits_are_mirrored() {
        let f = fixtures::line_e();
        let (tas, path) = (f.tas.mirrored(), f.path.mirrored());
        let out = diet_check(&tas, &path, &DietConfig { half_width: 2, half_height: 1 });
        let DietOutcome::RepeatFound { side, vector, .. } = out else { panic!("unexpected {out:?}") };
        assert_eq!((side, vector), (Direction::West, vec2(-1, 0)));
    }
}
