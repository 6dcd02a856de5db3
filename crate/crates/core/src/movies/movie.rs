//! Recording the glues a path places across a window.

use serde::{Deserialize, Serialize};

use crate::geom::{BBox, Direction, Point, Vector};
use crate::model::{PathAssembly, TileAssemblySystem, TileId};

use super::window::Window;
use super::MovieError;

/// One glue placed across a window: the step from `from` towards `direction`
/// binds with glue `label` and places a tile of type `tile`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub from: Point,
    pub direction: Direction,
    pub label: String,
    pub tile: TileId,
    /// Path index of the placed tile.
    pub step: usize,
}

impl Event {
    pub fn placed(&self) -> Point {
        self.from.step(self.direction)
    }

    fn matches_translate(&self, other: &Event, v: Vector) -> bool {
        self.from + v == other.from && self.direction == other.direction && self.label == other.label && self.tile == other.tile
    }
}

/// Events in growth order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Movie {
    pub events: Vec<Event>,
}

impl Movie {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The movie of the prefix `P[1, k]`.
    pub fn up_to(&self, k: usize) -> Movie {
        Movie { events: self.events.iter().take_while(|e| e.step <= k).cloned().collect() }
    }
}

/// The glues of `seed -> P_1` and of every `P_k -> P_(k+1)` that cross `w`.
pub fn record_movie(tas: &TileAssemblySystem, path: &PathAssembly, w: &Window) -> Result<Movie, MovieError> {
    let needed = BBox::of(tas.seed.points().chain(path.steps().iter().map(|s| s.0))).expect("seed is non-empty");
    if !(w.clip.contains(needed.min) && w.clip.contains(needed.max)) {
        return Err(MovieError::WindowClip { clip: w.clip, needed });
    }
    let mut events = Vec::new();
    let mut prev = path.anchor(tas);
    for (k, &(p, t)) in path.steps().iter().enumerate() {
        if let Some(q) = prev {
            if w.crosses(q, p) {
                let direction = q.direction_to(p).expect("path steps are adjacent");
                let label = tas.tileset.get(t).glue(direction.opposite()).label.clone();
                events.push(Event { from: q, direction, label, tile: t, step: k + 1 });
            }
        }
        prev = Some(p);
    }
    Ok(Movie { events })
}

/// Whether translating every event of `m1` by `v` gives exactly `m2`, in order.
pub fn movies_equal_upto(m1: &Movie, m2: &Movie, v: Vector) -> bool {
    m1.events.len() == m2.events.len() && m1.events.iter().zip(&m2.events).all(|(a, b)| a.matches_translate(b, v))
}
