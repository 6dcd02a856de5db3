//! Exact integer geometry on the square lattice.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate line: direction vector is zero")]
    DegenerateLine,
}

/// A lattice point. Points are ordered by `y` first, then `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

/// A lattice displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Vector {
    pub x: i64,
    pub y: i64,
}

pub const fn pt(x: i64, y: i64) -> Point {
    Point { x, y }
}

pub const fn vec2(x: i64, y: i64) -> Vector {
    Vector { x, y }
}

impl Point {
    pub const ORIGIN: Point = pt(0, 0);

    pub fn step(self, dir: Direction) -> Point {
        self + dir.delta()
    }

    pub fn neighbors(self) -> [Point; 4] {
        Direction::ALL.map(|d| self.step(d))
    }

    pub fn is_adjacent(self, other: Point) -> bool {
        (self - other).l1() == 1
    }

    /// Direction of the unit step from `self` to `other`, if adjacent.
    pub fn direction_to(self, other: Point) -> Option<Direction> {
        Direction::from_delta(other - self)
    }

    /// Reflection across the vertical axis `x = 0`.
    pub fn mirrored(self) -> Point {
        pt(-self.x, self.y)
    }

    pub fn as_vector(self) -> Vector {
        vec2(self.x, self.y)
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Vector {
    pub const ZERO: Vector = vec2(0, 0);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn l1(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    pub fn linf(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// `self.x * other.y - self.y * other.x`
    pub fn det(self, other: Vector) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn mirrored(self) -> Vector {
        vec2(-self.x, self.y)
    }

    /// If `self == k * base` for some integer `k >= 1`, returns `k`.
    pub fn positive_multiple_of(self, base: Vector) -> Option<i64> {
        if base.is_zero() || self.det(base) != 0 {
            return None;
        }
        let (num, den) = if base.x != 0 { (self.x, base.x) } else { (self.y, base.y) };
        if num % den != 0 {
            return None;
        }
        let k = num / den;
        (k >= 1).then_some(k)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.x, self.y)
    }
}

impl Add<Vector> for Point {
    type Output = Point;
    fn add(self, v: Vector) -> Point {
        pt(self.x + v.x, self.y + v.y)
    }
}

impl Sub<Vector> for Point {
    type Output = Point;
    fn sub(self, v: Vector) -> Point {
        pt(self.x - v.x, self.y - v.y)
    }
}

impl Sub for Point {
    type Output = Vector;
    fn sub(self, o: Point) -> Vector {
        vec2(self.x - o.x, self.y - o.y)
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        vec2(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, o: Vector) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        vec2(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        vec2(-self.x, -self.y)
    }
}

impl Mul<i64> for Vector {
    type Output = Vector;
    fn mul(self, k: i64) -> Vector {
        vec2(self.x * k, self.y * k)
    }
}

/// The four cardinal directions, in counter-clockwise order starting east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    East,
    North,
    West,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub fn delta(self) -> Vector {
        match self {
            Direction::East => vec2(1, 0),
            Direction::North => vec2(0, 1),
            Direction::West => vec2(-1, 0),
            Direction::South => vec2(0, -1),
        }
    }

    pub fn from_delta(v: Vector) -> Option<Direction> {
        match (v.x, v.y) {
            (1, 0) => Some(Direction::East),
            (0, 1) => Some(Direction::North),
            (-1, 0) => Some(Direction::West),
            (0, -1) => Some(Direction::South),
            _ => None,
        }
    }

    pub fn opposite(self) -> Direction {
        self.rotate_ccw(2)
    }

    /// Quarter turns counter-clockwise from east.
    pub fn quarter_turns(self) -> u8 {
        match self {
            Direction::East => 0,
            Direction::North => 1,
            Direction::West => 2,
            Direction::South => 3,
        }
    }

    pub fn from_quarter_turns(q: u8) -> Direction {
        match q % 4 {
            0 => Direction::East,
            1 => Direction::North,
            2 => Direction::West,
            _ => Direction::South,
        }
    }

    pub fn rotate_ccw(self, quarter_turns: u8) -> Direction {
        Direction::from_quarter_turns(self.quarter_turns() + quarter_turns)
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::North | Direction::South)
    }

    pub fn mirrored(self) -> Direction {
        match self {
            Direction::East => Direction::West,
            Direction::West => Direction::East,
            d => d,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::East => "east",
            Direction::North => "north",
            Direction::West => "west",
            Direction::South => "south",
        };
        f.write_str(s)
    }
}

/// Whether `d` lies strictly inside the counter-clockwise sweep from `from` to `to`.
pub fn strictly_ccw_between(from: Direction, d: Direction, to: Direction) -> bool {
    let span = (to.quarter_turns() + 4 - from.quarter_turns()) % 4;
    let off = (d.quarter_turns() + 4 - from.quarter_turns()) % 4;
    off > 0 && (span == 0 || off < span)
}

/// Which side of a walk a direction leaves from, at a vertex with known
/// incoming and outgoing edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkSide {
    Left,
    Right,
}

impl WalkSide {
    pub fn flip(self) -> WalkSide {
        match self {
            WalkSide::Left => WalkSide::Right,
            WalkSide::Right => WalkSide::Left,
        }
    }
}

/// Side of the walk `back <- v -> out` that the direction `d` points into.
///
/// `back` is the direction from the vertex to its predecessor and `out` the
/// direction to its successor. Returns `None` when `d` is one of the walk's
/// own edges.
pub fn walk_side(back: Direction, out: Direction, d: Direction) -> Option<WalkSide> {
    if d == back || d == out {
        return None;
    }
    if strictly_ccw_between(out, d, back) {
        Some(WalkSide::Left)
    } else {
        Some(WalkSide::Right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineSide {
    LeftOrOn,
    Right,
}

/// Classifies `x` against the oriented line through `a` with direction `v`.
///
/// Points with a non-negative determinant `det(v, x - a)` are on the left or on the line.
pub fn line_side(a: Point, v: Vector, x: Point) -> Result<LineSide, GeomError> {
    if v.is_zero() {
        return Err(GeomError::DegenerateLine);
    }
    if v.det(x - a) >= 0 {
        Ok(LineSide::LeftOrOn)
    } else {
        Ok(LineSide::Right)
    }
}

/// Axis-aligned inclusive bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn point(p: Point) -> BBox {
        BBox { min: p, max: p }
    }

    pub fn of<I: IntoIterator<Item = Point>>(points: I) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        Some(it.fold(BBox::point(first), |b, p| b.including(p)))
    }

    pub fn including(self, p: Point) -> BBox {
        BBox {
            min: pt(self.min.x.min(p.x), self.min.y.min(p.y)),
            max: pt(self.max.x.max(p.x), self.max.y.max(p.y)),
        }
    }

    pub fn union(self, o: BBox) -> BBox {
        self.including(o.min).including(o.max)
    }

    pub fn expanded(self, margin: i64) -> BBox {
        BBox {
            min: pt(self.min.x - margin, self.min.y - margin),
            max: pt(self.max.x + margin, self.max.y + margin),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn width(&self) -> i64 {
        self.max.x - self.min.x + 1
    }

    pub fn height(&self) -> i64 {
        self.max.y - self.min.y + 1
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.min.y..=self.max.y).flat_map(move |y| (self.min.x..=self.max.x).map(move |x| pt(x, y)))
    }

    pub fn is_on_border(&self, p: Point) -> bool {
        p.x == self.min.x || p.x == self.max.x || p.y == self.min.y || p.y == self.max.y
    }
}

/// Largest Manhattan distance between two points of the set (0 for fewer than two points).
pub fn l1_diameter<I: IntoIterator<Item = Point>>(points: I) -> i64 {
    let mut sum = (i64::MAX, i64::MIN);
    let mut diff = (i64::MAX, i64::MIN);
    let mut any = false;
    for p in points {
        any = true;
        let s = p.x + p.y;
        let d = p.x - p.y;
        sum = (sum.0.min(s), sum.1.max(s));
        diff = (diff.0.min(d), diff.1.max(d));
    }
    if !any {
        return 0;
    }
    (sum.1 - sum.0).max(diff.1 - diff.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn line_side_on_horizontal_line() {
        let a = pt(0, 0);
        let v = vec2(1, 0);
        assert_eq!(line_side(a, v, pt(3, 1)).unwrap(), LineSide::LeftOrOn);
        assert_eq!(line_side(a, v, pt(3, 0)).unwrap(), LineSide::LeftOrOn);
        assert_eq!(line_side(a, v, pt(-3, -1)).unwrap(), LineSide::Right);
    }

    #[test]
    fn line_side_rejects_zero_vector() {
        assert_eq!(line_side(pt(0, 0), Vector::ZERO, pt(1, 1)), Err(GeomError::DegenerateLine));
    }

    #[test]
    fn ordering_is_row_major_from_the_bottom() {
        let mut pts = vec![pt(5, 0), pt(-3, 1), pt(0, 0), pt(-1, -1)];
        pts.sort();
        assert_eq!(pts, vec![pt(-1, -1), pt(0, 0), pt(5, 0), pt(-3, 1)]);
    }

    #[test]
    fn walk_side_of_a_straight_north_walk() {
        // predecessor to the south, successor to the north
        let back = Direction::South;
        let out = Direction::North;
        assert_eq!(walk_side(back, out, Direction::West), Some(WalkSide::Left));
        assert_eq!(walk_side(back, out, Direction::East), Some(WalkSide::Right));
        assert_eq!(walk_side(back, out, Direction::North), None);
    }

    #[test]
    fn walk_side_at_a_right_turn() {
        // arriving moving north, leaving east: the left side is north and west
        let back = Direction::South;
        let out = Direction::East;
        assert_eq!(walk_side(back, out, Direction::North), Some(WalkSide::Left));
        assert_eq!(walk_side(back, out, Direction::West), Some(WalkSide::Left));
    }

    #[test]
    fn l1_diameter_matches_pairwise_maximum() {
        let pts = [pt(0, 0), pt(3, -1), pt(-2, 4), pt(1, 1)];
        let brute = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| (*a - *b).l1()))
            .max()
            .unwrap();
        assert_eq!(l1_diameter(pts), brute);
        assert_eq!(l1_diameter([pt(1, 1)]), 0);
        assert_eq!(l1_diameter(std::iter::empty()), 0);
    }

    #[test]
    fn positive_multiple() {
        assert_eq!(vec2(4, -2).positive_multiple_of(vec2(2, -1)), Some(2));
        assert_eq!(vec2(-4, 2).positive_multiple_of(vec2(2, -1)), None);
        assert_eq!(vec2(3, 0).positive_multiple_of(vec2(2, 0)), None);
        assert_eq!(vec2(0, 3).positive_multiple_of(vec2(0, 1)), Some(3));
        assert_eq!(vec2(1, 3).positive_multiple_of(vec2(0, 1)), None);
    }

    proptest! {
        #[test]
        fn l1_diameter_agrees_with_brute_force(pts in proptest::collection::vec((-20i64..20, -20i64..20), 1..12)) {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| pt(x, y)).collect();
            let brute = pts.iter().flat_map(|a| pts.iter().map(move |b| (*a - *b).l1())).max().unwrap();
            prop_assert_eq!(l1_diameter(pts.iter().copied()), brute);
        }

        #[test]
        fn walk_side_is_mirror_antisymmetric(b in 0u8..4, o in 0u8..4, d in 0u8..4) {
            let (b, o, d) = (Direction::from_quarter_turns(b), Direction::from_quarter_turns(o), Direction::from_quarter_turns(d));
            prop_assume!(b != o);
            let s = walk_side(b, o, d);
            let m = walk_side(b.mirrored(), o.mirrored(), d.mirrored());
            prop_assert_eq!(s.map(WalkSide::flip), m);
        }

        #[test]
        fn line_side_flips_with_direction(ax in -9i64..9, ay in -9i64..9, vx in -5i64..5, vy in -5i64..5, x in -9i64..9, y in -9i64..9) {
            prop_assume!(vx != 0 || vy != 0);
            let a = pt(ax, ay);
            let p = pt(x, y);
            let v = vec2(vx, vy);
            let on_line = v.det(p - a) == 0;
            let fwd = line_side(a, v, p).unwrap();
            let bwd = line_side(a, -v, p).unwrap();
            if on_line {
                prop_assert_eq!(fwd, LineSide::LeftOrOn);
                prop_assert_eq!(bwd, LineSide::LeftOrOn);
            } else {
                prop_assert_ne!(fwd, bwd);
            }
        }
    }
}
