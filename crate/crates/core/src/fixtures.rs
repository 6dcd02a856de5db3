//! Small named instances used by tests, benchmarks and the command line.

use crate::geom::{pt, Point};
use crate::model::{Assembly, Glue, PathAssembly, TileAssemblySystem, TileSet, TileType};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub tas: TileAssemblySystem,
    pub path: PathAssembly,
}

fn build(name: &'static str, tiles: Vec<TileType>, seed: &[(Point, &str)], path: &[(Point, &str)]) -> Fixture {
    let tileset = TileSet::new(tiles).expect("fixture tile names are unique");
    let id = |n: &str| tileset.id(n).expect("fixture tile exists");
    let seed = Assembly::new(seed.iter().map(|(p, n)| (*p, id(n)))).expect("fixture seed is connected");
    let steps = path.iter().map(|(p, n)| (*p, id(n))).collect();
    let tas = TileAssemblySystem::new(tileset, seed).expect("fixture seed is stable");
    let path = PathAssembly::new(&tas, steps).expect("fixture path is valid");
    Fixture { name, tas, path }
}

fn straight(name: &'static str, horizontal: bool, len: i64) -> Fixture {
    let a = Glue::new("a", 1);
    let t = if horizontal {
        TileType::new("t", Glue::null(), a.clone(), Glue::null(), a)
    } else {
        TileType::new("t", a.clone(), Glue::null(), a, Glue::null())
    };
    let path: Vec<(Point, &str)> =
        (1..=len).map(|k| (if horizontal { pt(k, 0) } else { pt(0, k) }, "t")).collect();
    build(name, vec![t], &[(pt(0, 0), "t")], &path)
}

/// A straight eastward line of five tiles.
pub fn line_e() -> Fixture {
    straight("LINE-E", true, 5)
}

/// A straight northward column of five tiles.
pub fn col_n() -> Fixture {
    straight("COL-N", false, 5)
}

/// A northward column of `len` tiles.
pub fn col_n_tall(len: i64) -> Fixture {
    straight("COL-N-TALL", false, len)
}

/// A hook that bends back towards the seed.
pub fn hook_s() -> Fixture {
    let s = TileType::new("s", Glue::new("p", 1), Glue::new("s", 1), Glue::null(), Glue::new("s", 1));
    let p = TileType::uniform("p", Glue::new("p", 1));
    build(
        "HOOK-S",
        vec![s, p],
        &[(pt(0, 0), "s"), (pt(1, 0), "s")],
        &[(pt(0, 1), "p"), (pt(0, 2), "p"), (pt(1, 2), "p"), (pt(1, 1), "p")],
    )
}

/// Up five, east four, down seven.
pub fn nshape() -> Fixture {
    let p = TileType::uniform("p", Glue::new("p", 1));
    let mut path: Vec<(Point, &str)> = (1..=5).map(|y| (pt(0, y), "p")).collect();
    path.extend((1..=4).map(|x| (pt(x, 5), "p")));
    path.extend((-2..=4).rev().map(|y| (pt(4, y), "p")));
    build("NSHAPE", vec![p], &[(pt(0, 0), "p")], &path)
}

/// Two tile types compete for the same position next to the seed.
pub fn fork() -> Fixture {
    let s0 = TileType::new("s0", Glue::null(), Glue::new("x", 1), Glue::null(), Glue::null());
    let a = TileType::new("a", Glue::new("a", 1), Glue::null(), Glue::null(), Glue::new("x", 1));
    let b = TileType::new("b", Glue::new("b", 1), Glue::null(), Glue::null(), Glue::new("x", 1));
    build("FORK", vec![s0, a, b], &[(pt(0, 0), "s0")], &[(pt(1, 0), "a")])
}

/// A path whose movies on the row cuts `0|1` and `3|4` agree, but whose part
/// between the cuts, repeated, disagrees with the path above the second cut.
pub fn wml_break() -> Fixture {
    let g = |k: u32| Glue::new(format!("g{k}"), 1);
    let n = Glue::null;
    let tile = |name: &str, north: Glue, east: Glue, south: Glue, west: Glue| TileType::new(name, north, east, south, west);
    let tiles = vec![
        tile("seed", g(1), n(), n(), n()),
        tile("x", g(15), g(2), g(1), n()),
        tile("t2", n(), g(3), n(), g(2)),
        tile("t3", n(), n(), g(4), g(3)),
        tile("y", g(4), g(5), n(), n()),
        tile("t5", n(), g(6), n(), g(5)),
        tile("t6", g(7), n(), n(), g(6)),
        tile("z", g(8), n(), g(7), n()),
        tile("t8", n(), n(), g(8), g(9)),
        tile("t9", n(), g(9), n(), g(10)),
        tile("t10", n(), g(10), n(), g(11)),
        tile("t11", n(), g(11), n(), g(12)),
        tile("t12", g(13), g(12), n(), n()),
        tile("t13", g(1), n(), g(13), n()),
        tile("t15", n(), g(16), g(15), n()),
        tile("t16", n(), g(17), n(), g(16)),
        tile("t17", n(), n(), g(18), g(17)),
        tile("t18", g(18), n(), g(4), n()),
        tile("t20", n(), g(21), n(), g(5)),
        tile("t21", g(7), n(), n(), g(21)),
    ];
    let path = [
        ((0, 1), "x"), ((1, 1), "t2"), ((2, 1), "t3"), ((2, 0), "y"), ((3, 0), "t5"), ((4, 0), "t6"),
        ((4, 1), "z"), ((4, 2), "t8"), ((3, 2), "t9"), ((2, 2), "t10"), ((1, 2), "t11"), ((0, 2), "t12"),
        ((0, 3), "t13"), ((0, 4), "x"), ((0, 5), "t15"), ((1, 5), "t16"), ((2, 5), "t17"), ((2, 4), "t18"),
        ((2, 3), "y"), ((3, 3), "t20"), ((4, 3), "t21"), ((4, 4), "z"),
    ];
    let path: Vec<(Point, &str)> = path.iter().map(|&((x, y), t)| (pt(x, y), t)).collect();
    build("WML-BREAK", tiles, &[(pt(0, 0), "seed")], &path)
}

pub fn all() -> Vec<Fixture> {
    vec![line_e(), col_n(), col_n_tall(12), hook_s(), nshape(), fork(), wml_break()]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name.eq_ignore_ascii_case(name))
}
