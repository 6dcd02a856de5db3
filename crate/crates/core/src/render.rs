//! SVG drawings of a seed and path with optional analysis overlays.
//!
//! The y axis points north: row `y` is drawn above row `y - 1`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::geom::{BBox, Direction, Point};
use crate::model::{PathAssembly, TileAssemblySystem, TileId};
use crate::visibility::{Side, VisibilityRay};

const CELL: i64 = 40;

/// A tile drawn translucently, e.g. a repetition of a pumped segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhostTile {
    pub x: i64,
    pub y: i64,
    pub tile: usize,
    /// Which repetition the tile belongs to; 0 for tiles of a growth order.
    pub iteration: u64,
}

impl GhostTile {
    pub fn new(p: Point, t: TileId, iteration: u64) -> GhostTile {
        GhostTile { x: p.x, y: p.y, tile: t.0, iteration }
    }

    pub fn point(&self) -> Point {
        Point { x: self.x, y: self.y }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overlays {
    pub rays: Vec<VisibilityRay>,
    /// Path indices whose ray along the pumping vector avoids the path.
    pub dominating: Vec<usize>,
    pub stake: Vec<Point>,
    pub pumping: Vec<GhostTile>,
    pub conflicts: Vec<Point>,
}

impl Overlays {
    pub fn is_empty(&self) -> bool {
        self == &Overlays::default()
    }

    fn points<'a>(&'a self, path: &'a PathAssembly) -> impl Iterator<Item = Point> + 'a {
        self.rays
            .iter()
            .map(|r| Point { x: r.x, y: r.level })
            .chain(self.stake.iter().copied())
            .chain(self.pumping.iter().map(GhostTile::point))
            .chain(self.conflicts.iter().copied())
            .chain(self.dominating.iter().filter(|&&i| i >= 1 && i <= path.len()).map(|&i| path.pos(i)))
    }
}

struct Canvas {
    bbox: BBox,
}

impl Canvas {
    /// Pixel coordinates of the point `(x, y)` in cell units, cell centres at integers.
    fn at(&self, x: f64, y: f64) -> (f64, f64) {
        let px = (x - self.bbox.min.x as f64 + 0.5) * CELL as f64;
        let py = (self.bbox.max.y as f64 - y + 0.5) * CELL as f64;
        (px, py)
    }

    fn width(&self) -> i64 {
        self.bbox.width() * CELL
    }

    fn height(&self) -> i64 {
        self.bbox.height() * CELL
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tile(out: &mut String, c: &Canvas, tas: &TileAssemblySystem, p: Point, t: TileId, class: &str, label: &str) {
    let (cx, cy) = c.at(p.x as f64, p.y as f64);
    let half = CELL as f64 / 2.0;
    let name = escape(tas.tileset.name(t));
    let _ = writeln!(
        out,
        r#"<g class="{class}" data-x="{}" data-y="{}"><rect x="{}" y="{}" width="{CELL}" height="{CELL}"/><text x="{cx}" y="{}">{name}{label}</text>"#,
        p.x,
        p.y,
        cx - half,
        cy - half,
        cy + 4.0
    );
    let tick = 6.0;
    let ty = tas.tileset.get(t);
    for d in Direction::ALL {
        if ty.glue(d).strength == 0 {
            continue;
        }
        let v = d.delta();
        let (ex, ey) = (cx + v.x as f64 * half, cy - v.y as f64 * half);
        let (ix, iy) = (ex - v.x as f64 * tick, ey + v.y as f64 * tick);
        let _ = writeln!(out, r#"<line class="glue" x1="{ex}" y1="{ey}" x2="{ix}" y2="{iy}"/>"#);
    }
    out.push_str("</g>\n");
}

/// Draws the seed, the path and the overlays as a standalone SVG document.
pub fn render_svg(tas: &TileAssemblySystem, path: &PathAssembly, overlays: &Overlays) -> String {
    let points = tas.seed.points().chain(path.steps().iter().map(|s| s.0)).chain(overlays.points(path));
    let bbox = BBox::of(points).expect("the seed is non-empty").expanded(1);
    let c = Canvas { bbox };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = c.width(),
        h = c.height()
    );
    out.push_str(concat!(
        "<style>",
        "rect{stroke:#333;stroke-width:1}",
        ".seed rect{fill:#b0b0b0}.path rect{fill:#dbe7f5}",
        ".ghost rect{fill:#dbe7f5;fill-opacity:0.35;stroke-dasharray:4 3}",
        ".stake rect{fill:none;stroke:#d08000;stroke-width:3}",
        ".glue{stroke:#000;stroke-width:2}",
        ".ray{stroke:#2a7d2a;stroke-width:2}",
        ".dominating{fill:#2a7d2a}",
        ".conflict{stroke:#c00000;stroke-width:3;fill:none}",
        ".origin{fill:#c00000}",
        "text{font:10px sans-serif;text-anchor:middle}",
        "</style>\n"
    ));

    let mut seed: Vec<(Point, TileId)> = tas.seed.iter().collect();
    seed.sort_by_key(|s| s.0);
    for (p, t) in seed {
        tile(&mut out, &c, tas, p, t, "seed", "");
    }
    for (k, &(p, t)) in path.steps().iter().enumerate() {
        tile(&mut out, &c, tas, p, t, "path", &format!(" {}", k + 1));
    }
    for g in &overlays.pumping {
        if path.index_of(g.point()).is_none() && !tas.seed.contains(g.point()) {
            tile(&mut out, &c, tas, g.point(), TileId(g.tile), "ghost", "");
        }
    }
    for &p in &overlays.stake {
        let (cx, cy) = c.at(p.x as f64, p.y as f64);
        let half = CELL as f64 / 2.0 - 3.0;
        let _ = writeln!(
            out,
            r#"<g class="stake"><rect x="{}" y="{}" width="{}" height="{}"/></g>"#,
            cx - half,
            cy - half,
            2.0 * half,
            2.0 * half
        );
    }
    for r in &overlays.rays {
        let (x1, y1) = c.at(r.x as f64, r.level as f64 + 0.5);
        let x2 = match r.toward {
            Side::East => c.width() as f64,
            Side::West => 0.0,
        };
        let _ = writeln!(out, r#"<line class="ray" data-index="{}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y1}"/>"#, r.index);
    }
    for &i in overlays.dominating.iter().filter(|&&i| i >= 1 && i <= path.len()) {
        let (cx, cy) = c.at(path.pos(i).x as f64, path.pos(i).y as f64);
        let _ = writeln!(out, r#"<circle class="dominating" data-index="{i}" cx="{cx}" cy="{}" r="4"/>"#, cy - 10.0);
    }
    for p in &overlays.conflicts {
        let (cx, cy) = c.at(p.x as f64, p.y as f64);
        let _ = writeln!(out, r#"<circle class="conflict" data-x="{}" data-y="{}" cx="{cx}" cy="{cy}" r="15"/>"#, p.x, p.y);
    }
    if bbox.contains(Point { x: 0, y: 0 }) {
        let (cx, cy) = c.at(0.0, 0.0);
        let _ = writeln!(out, r#"<circle class="origin" cx="{cx}" cy="{}" r="3"/>"#, cy + 14.0);
    }
    out.push_str("</svg>\n");
    out
}
