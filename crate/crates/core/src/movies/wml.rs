//! Pumping a path between two windows with equal movies, or breaking it by
//! growing the assembly pumped between the windows first.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certify::{verify_fragile, verify_pumpable, FragileCertificate, PumpableCertificate};
use crate::geom::{Point, Vector};
use crate::model::{Assembly, PathAssembly, TileAssemblySystem, TileId};
use crate::pumping::{decide_pumping, PumpDecision};

use super::movie::{movies_equal_upto, record_movie};
use super::window::Window;
use super::MovieError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotApplicable {
    ZeroVector,
    /// The window and its translate share a crossing edge.
    SharedEdge,
    /// The seed is not entirely on one side of both windows.
    SeedSplit,
    /// The translated window is not entirely on the far side of the first one.
    NotNested,
    MoviesDiffer,
    EmptyMovie,
    /// The last crossing of the prefix goes back towards the seed.
    LastCrossingInward { u: usize, v: usize },
    CertificateRejected,
    /// The pumping conflicts but growing the pumped assembly first found no conflict with the path.
    NoWitness,
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotApplicable::ZeroVector => f.write_str("translation vector is zero"),
            NotApplicable::SharedEdge => f.write_str("window and its translate share an edge"),
            NotApplicable::SeedSplit => f.write_str("seed is not on one side of both windows"),
            NotApplicable::NotNested => f.write_str("translated window is not beyond the first one"),
            NotApplicable::MoviesDiffer => f.write_str("movies differ"),
            NotApplicable::EmptyMovie => f.write_str("the path does not cross the window"),
            NotApplicable::LastCrossingInward { u, v } => write!(f, "last crossings ({u},{v}) do not lead away from the seed"),
            NotApplicable::CertificateRejected => f.write_str("candidate certificate failed verification"),
            NotApplicable::NoWitness => f.write_str("no conflict found by growing the pumped assembly"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WmlOutcome {
    Pumpable { certificate: PumpableCertificate, k: usize },
    /// Growing `copies` translates of the part between the windows breaks the path.
    Fragile { certificate: FragileCertificate, copies: usize },
    NotApplicable(NotApplicable),
}

/// Applies the window movie argument to `w` and `w + v`.
///
/// The prefix `P[1, k]` is the shortest one whose movies on both windows
/// agree; `u` and `v'` are its last tiles with a glue on `w` and `w + v`.
/// The pumping of `P[u, v']` is decided; when it conflicts, the assembly
/// obtained by repeating the part of the path between the windows is grown
/// from the seed until it disagrees with the path.
pub fn wml_pump(tas: &TileAssemblySystem, path: &PathAssembly, w: &Window, v: Vector) -> Result<WmlOutcome, MovieError> {
    let na = |r| Ok(WmlOutcome::NotApplicable(r));
    if v.is_zero() {
        return na(NotApplicable::ZeroVector);
    }
    let w2 = w.translated(v);
    let m1 = record_movie(tas, path, w)?;
    let m2 = record_movie(tas, path, &w2)?;

    let low = tas.seed.points().next().is_some_and(|p| w.is_low(p));
    if !tas.seed.points().all(|p| w.is_low(p) == low && w2.is_low(p) == low) {
        return na(NotApplicable::SeedSplit);
    }
    let e1: HashSet<(Point, Point)> = w.crossing_edges().into_iter().collect();
    let e2 = w2.crossing_edges();
    if e2.iter().any(|e| e1.contains(e)) {
        return na(NotApplicable::SharedEdge);
    }
    if e2.iter().any(|&(a, b)| w.is_low(a) == low || w.is_low(b) == low) {
        return na(NotApplicable::NotNested);
    }
    if !movies_equal_upto(&m1, &m2, v) {
        return na(NotApplicable::MoviesDiffer);
    }
    if m1.is_empty() {
        return na(NotApplicable::EmptyMovie);
    }

    let k = m1
        .events
        .iter()
        .chain(&m2.events)
        .map(|e| e.step)
        .filter(|&k| {
            let (a, b) = (m1.up_to(k), m2.up_to(k));
            !a.is_empty() && movies_equal_upto(&a, &b, v)
        })
        .min()
        .expect("the full movies agree");
    let last1 = m1.up_to(k).events.pop().expect("non-empty");
    let last2 = m2.up_to(k).events.pop().expect("non-empty");
    let (u, vv) = (last1.step, last2.step);
    if w.is_low(last1.placed()) == low || u >= vv {
        return na(NotApplicable::LastCrossingInward { u, v: vv });
    }

    match decide_pumping(tas, path, u, vv, &Assembly::empty()).expect("u < v' with equal types") {
        PumpDecision::Infinite { horizon } => {
            let certificate =
                PumpableCertificate { i: u, j: vv, verified_horizon: horizon.iterations, decision_horizon: horizon.iterations };
            if verify_pumpable(tas, path, &certificate).expect("u < v'").is_accepted() {
                Ok(WmlOutcome::Pumpable { certificate, k })
            } else {
                na(NotApplicable::CertificateRejected)
            }
        }
        PumpDecision::ConflictAt { .. } => {
            for copies in 2..=4 {
                let Some(gamma) = pumped_assembly(tas, path, w, &w2, low, v, copies) else { continue };
                if let Some(certificate) = grow_until_conflict(tas, path, &gamma) {
                    if verify_fragile(tas, path, &certificate).expect("non-empty order").is_accepted() {
                        return Ok(WmlOutcome::Fragile { certificate, copies });
                    }
                }
            }
            na(NotApplicable::NoWitness)
        }
    }
}

/// `seed ∪ α ∪ M ∪ (M + v) ∪ … ∪ (M + (copies-1)v) ∪ (β' + (copies-1)v)`, where
/// `α` is the path on the seed side of `w`, `M` the path between the windows and
/// `β'` the path beyond `w + v`; `None` when the translates disagree somewhere.
fn pumped_assembly(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    w: &Window,
    w2: &Window,
    low: bool,
    v: Vector,
    copies: usize,
) -> Option<HashMap<Point, TileId>> {
    let mut gamma: HashMap<Point, TileId> = tas.seed.iter().collect();
    let mut put = |p: Point, t: TileId| match gamma.insert(p, t) {
        Some(u) if u != t => None,
        _ => Some(()),
    };
    for &(p, t) in path.steps() {
        if w.is_low(p) == low {
            put(p, t)?;
        } else if w2.is_low(p) == low {
            for c in 0..copies {
                put(p + v * c as i64, t)?;
            }
        } else {
            put(p + v * (copies as i64 - 1), t)?;
        }
    }
    Some(gamma)
}

/// Grows `gamma` from the seed in breadth-first order and stops at the first
/// tile that disagrees with the path.
fn grow_until_conflict(tas: &TileAssemblySystem, path: &PathAssembly, gamma: &HashMap<Point, TileId>) -> Option<FragileCertificate> {
    let mut placed: HashSet<Point> = tas.seed.points().collect();
    let mut order = Vec::new();
    let mut queue: VecDeque<Point> = tas.seed.points().collect();
    while let Some(p) = queue.pop_front() {
        let t = gamma[&p];
        for d in crate::geom::Direction::ALL {
            let q = p.step(d);
            let Some(&u) = gamma.get(&q) else { continue };
            if placed.contains(&q) || !tas.tileset.interacts(t, d, u) {
                continue;
            }
            placed.insert(q);
            order.push((q, u));
            if path.index_of(q).is_some_and(|k| path.tile(k) != u) {
                return Some(FragileCertificate::new(&order, q));
            }
            queue.push_back(q);
        }
    }
    None
}
