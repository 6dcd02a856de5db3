//! Periodic separators along a path suffix that its translate never meets.

use std::collections::BTreeMap;

use crate::geom::{BBox, Point, Vector};
use crate::model::{PathAssembly, TileAssemblySystem};

use super::window::Window;
use super::MovieError;

/// A shortest lattice walk from `from` to `from + v` (excluded), vertical steps first.
fn shortest_base(from: Point, v: Vector) -> Vec<Point> {
    let mut out = vec![from];
    let mut p = from;
    for _ in 1..v.y.abs() + v.x.abs() {
        p = if p.y != from.y + v.y { Point { x: p.x, y: p.y + v.y.signum() } } else { Point { x: p.x + v.x.signum(), y: p.y } };
        out.push(p);
    }
    out
}

/// One periodic separator per stripe of `v.y` rows, through the first tile of
/// `P[n, |P|]` in that stripe, skipping stripes that contain a tile of
/// `seed ∪ P[1, n-1]`. Separators are sorted from south to north.
pub fn cagefree_separators(tas: &TileAssemblySystem, path: &PathAssembly, n: usize, v: Vector) -> Result<Vec<Window>, MovieError> {
    if v.y <= 0 {
        return Err(MovieError::PreconditionFailed(format!("vector {v} must point north")));
    }
    if n == 0 || n > path.len() {
        return Err(MovieError::PreconditionFailed(format!("index {n} is not on the path")));
    }
    if let Some(k) = (n..path.len()).find(|&k| path.index_of(path.pos(k) + v).is_some()) {
        return Err(MovieError::PreconditionFailed(format!("P_{k} + {v} lies on the path")));
    }
    let origin = path.pos(n);
    let stripe = |y: i64| (y - origin.y).div_euclid(v.y);
    let blocked: Vec<i64> = tas.seed.points().chain(path.steps()[..n - 1].iter().map(|s| s.0)).map(|p| stripe(p.y)).collect();
    let mut first: BTreeMap<i64, usize> = BTreeMap::new();
    for k in n..=path.len() {
        first.entry(stripe(path.pos(k).y)).or_insert(k);
    }
    let clip = BBox::of(tas.seed.points().chain(path.steps().iter().map(|s| s.0)))
        .expect("seed is non-empty")
        .expanded(v.l1() + 1);
    let base = shortest_base(origin, v);
    first
        .into_iter()
        .filter(|(s, _)| !blocked.contains(s))
        .map(|(_, k)| Window::periodic(base.clone(), v, path.pos(k) - origin, clip))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{pt, vec2};
    use crate::movies::WindowKind;

    #[test]
    fn base_is_a_shortest_walk() {
        assert_eq!(shortest_base(pt(0, 0), vec2(-2, 1)), vec![pt(0, 0), pt(0, 1), pt(-1, 1)]);
        assert_eq!(shortest_base(pt(3, 3), vec2(0, 2)), vec![pt(3, 3), pt(3, 4)]);
        assert_eq!(shortest_base(pt(0, 0), vec2(1, 1)).len(), 2);
    }

    #[test]
    fn column_gets_one_separator_per_stripe() {
        let f = fixtures::col_n_tall(10);
        let seps = cagefree_separators(&f.tas, &f.path, 1, vec2(1, 2)).unwrap();
        assert_eq!(seps.len(), 5);
        for (s, w) in seps.iter().enumerate() {
            let k = 1 + 2 * s;
            assert!(w.separator_cells().contains(&f.path.pos(k)));
            assert!(!w.is_low(f.path.pos(k)));
            assert!(w.separator_cells().contains(&(f.path.pos(k) + vec2(-1, 0))));
            assert!(w.is_low(f.path.pos(k) + vec2(-2, 0)));
        }
        let seps = cagefree_separators(&f.tas, &f.path, 4, vec2(1, 2)).unwrap();
        assert_eq!(seps.len(), 4);
    }

    #[test]
    fn preconditions() {
        let f = fixtures::col_n_tall(10);
        assert!(cagefree_separators(&f.tas, &f.path, 1, vec2(1, 0)).is_err());
        assert!(cagefree_separators(&f.tas, &f.path, 1, vec2(0, 1)).is_err());
        assert!(cagefree_separators(&f.tas, &f.path, 1, vec2(0, 2)).is_err());
        assert!(cagefree_separators(&f.tas, &f.path, 11, vec2(1, 2)).is_err());
    }

    #[test]
    fn separators_are_periodic_with_the_vector() {
        let f = fixtures::col_n_tall(10);
        let seps = cagefree_separators(&f.tas, &f.path, 1, vec2(1, 2)).unwrap();
        let WindowKind::PeriodicSeparator { base, vector, .. } = &seps[0].kind else { panic!() };
        assert_eq!((base.len(), *vector), (3, vec2(1, 2)));
        let cells = seps[0].separator_cells();
        for c in &cells {
            if seps[0].clip.contains(*c + vec2(1, 2)) {
                assert!(cells.contains(&(*c + vec2(1, 2))));
            }
        }
    }
}
