//! Windows: cuts of the grid into a low side and a high side.

use serde::{Deserialize, Serialize};

use crate::geom::{BBox, Direction, Point, Vector};

use super::MovieError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    /// The dual line between columns `x` and `x + 1`; the low side is `x' <= x`.
    VerticalLine { x: i64 },
    /// The dual line between rows `y` and `y + 1`; the low side is `y' <= y`.
    HorizontalLine { y: i64 },
    /// The bi-infinite path `C_k = base[k mod |base|] + (k div |base|) * vector + offset`.
    ///
    /// The low side is the component to the left of `C` (walking north); `C`
    /// itself belongs to the high side.
    PeriodicSeparator { base: Vec<Point>, vector: Vector, offset: Vector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(flatten)]
    pub kind: WindowKind,
    pub clip: BBox,
}

impl Window {
    pub fn vertical(x: i64, clip: BBox) -> Window {
        Window { kind: WindowKind::VerticalLine { x }, clip }
    }

    pub fn horizontal(y: i64, clip: BBox) -> Window {
        Window { kind: WindowKind::HorizontalLine { y }, clip }
    }

    /// A periodic separator; `base` must be a lattice walk whose last point is
    /// adjacent to `base[0] + vector`, and `vector` must point strictly north.
    pub fn periodic(base: Vec<Point>, vector: Vector, offset: Vector, clip: BBox) -> Result<Window, MovieError> {
        if vector.y <= 0 {
            return Err(MovieError::PreconditionFailed(format!("separator vector {vector} must point north")));
        }
        let Some(&first) = base.first() else {
            return Err(MovieError::PreconditionFailed("empty separator base".into()));
        };
        let closes = base.windows(2).all(|w| w[0].is_adjacent(w[1])) && base[base.len() - 1].is_adjacent(first + vector);
        if !closes {
            return Err(MovieError::PreconditionFailed("separator base is not a lattice walk of one period".into()));
        }
        Ok(Window { kind: WindowKind::PeriodicSeparator { base, vector, offset }, clip })
    }

    pub fn translated(&self, v: Vector) -> Window {
        let kind = match &self.kind {
            WindowKind::VerticalLine { x } => WindowKind::VerticalLine { x: x + v.x },
            WindowKind::HorizontalLine { y } => WindowKind::HorizontalLine { y: y + v.y },
            WindowKind::PeriodicSeparator { base, vector, offset } => {
                WindowKind::PeriodicSeparator { base: base.clone(), vector: *vector, offset: *offset + v }
            }
        };
        Window { kind, clip: self.clip }
    }

    pub fn is_low(&self, p: Point) -> bool {
        match &self.kind {
            WindowKind::VerticalLine { x } => p.x <= *x,
            WindowKind::HorizontalLine { y } => p.y <= *y,
            WindowKind::PeriodicSeparator { base, vector, offset } => {
                !on_separator(base, *vector, *offset, p) && crossings_east(base, *vector, *offset, p) % 2 == 1
            }
        }
    }

    /// Whether the edge between adjacent cells `a` and `b` crosses the window.
    pub fn crosses(&self, a: Point, b: Point) -> bool {
        self.is_low(a) != self.is_low(b)
    }

    /// Cells of the periodic path inside the clip (empty for lines).
    pub fn separator_cells(&self) -> Vec<Point> {
        match &self.kind {
            WindowKind::PeriodicSeparator { base, vector, offset } => {
                self.clip.points().filter(|&p| on_separator(base, *vector, *offset, p)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Grid edges with both ends inside the clip that cross the window, as `(low, high)` pairs.
    pub fn crossing_edges(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::new();
        for p in self.clip.points() {
            for d in [Direction::East, Direction::North] {
                let q = p.step(d);
                if self.clip.contains(q) && self.crosses(p, q) {
                    out.push(if self.is_low(p) { (p, q) } else { (q, p) });
                }
            }
        }
        out
    }
}

fn shift(vector: Vector, offset: Vector, base_y: i64, y: i64) -> Option<i64> {
    let dy = y - base_y - offset.y;
    (dy.rem_euclid(vector.y) == 0).then(|| dy.div_euclid(vector.y))
}

fn on_separator(base: &[Point], vector: Vector, offset: Vector, p: Point) -> bool {
    base.iter().any(|b| shift(vector, offset, b.y, p.y).is_some_and(|m| b.x + m * vector.x + offset.x == p.x))
}

/// Vertical edges of the separator that the half-line from `p` at height
/// `p.y + 1/2` towards the east crosses.
fn crossings_east(base: &[Point], vector: Vector, offset: Vector, p: Point) -> usize {
    let n = base.len();
    (0..n)
        .filter(|&k| {
            let a = base[k];
            let b = if k + 1 < n { base[k + 1] } else { base[0] + vector };
            a.x == b.x
                && shift(vector, offset, a.y.min(b.y), p.y).is_some_and(|m| a.x + m * vector.x + offset.x > p.x)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{pt, vec2};

    fn clip() -> BBox {
        BBox { min: pt(-6, -6), max: pt(6, 6) }
    }

    #[test]
    fn vertical_line_sides() {
        let w = Window::vertical(2, clip());
        assert!(w.is_low(pt(2, 5)));
        assert!(!w.is_low(pt(3, -1)));
        assert!(w.crosses(pt(2, 0), pt(3, 0)));
        assert!(!w.crosses(pt(2, 0), pt(2, 1)));
        assert_eq!(w.crossing_edges().len(), 13);
        assert_eq!(w.translated(vec2(3, 7)).kind, WindowKind::VerticalLine { x: 5 });
    }

    #[test]
    fn straight_periodic_column_splits_west_from_east() {
        let w = Window::periodic(vec![pt(0, 0)], vec2(0, 1), Vector::ZERO, clip()).unwrap();
        assert!(w.is_low(pt(-1, 3)));
        assert!(!w.is_low(pt(0, 3)));
        assert!(!w.is_low(pt(1, -4)));
        assert_eq!(w.separator_cells().len(), 13);
    }

    #[test]
    fn staircase_separator() {
        // up one, then west one, repeated: cells (-m, m) and (-m, m + 1)
        let w = Window::periodic(vec![pt(0, 0), pt(0, 1)], vec2(-1, 1), Vector::ZERO, clip()).unwrap();
        assert!(!w.is_low(pt(0, 1)));
        assert!(w.is_low(pt(-1, 0)));
        assert!(w.is_low(pt(-2, 1)));
        assert!(!w.is_low(pt(1, 0)));
        assert!(!w.is_low(pt(-1, 3)));
        assert!(!w.is_low(pt(-3, 3)));
        assert!(w.is_low(pt(-4, 3)));
        let moved = w.translated(vec2(2, 0));
        assert!(moved.is_low(pt(1, 0)));
    }

    #[test]
    fn separator_validation() {
        assert!(Window::periodic(vec![pt(0, 0)], vec2(1, 0), Vector::ZERO, clip()).is_err());
        assert!(Window::periodic(vec![pt(0, 0)], vec2(1, 1), Vector::ZERO, clip()).is_err());
        assert!(Window::periodic(vec![], vec2(0, 1), Vector::ZERO, clip()).is_err());
    }
}
