//! Watching the pumping attempts of a run for two southward attempts whose
//! pumpings meet without a northward attempt between them.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::model::PathAssembly;
use crate::pumping::decision_horizon;

use super::algo::{PumpAttempt, PumpDirection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TrousCheck {
    /// No pair of intersecting southward attempts.
    NotApplicable,
    /// Every intersecting southward pair is separated by this northward attempt (the first one found).
    Confirmed { first: PumpAttempt, second: PumpAttempt, north: PumpAttempt },
    Violation { first: PumpAttempt, second: PumpAttempt },
}

/// Positions covered by the pumping of `P[a, b]` from index `a`, up to a horizon
/// beyond which translates of the two segments compared cannot meet.
fn pumped_points(path: &PathAssembly, a: usize, b: usize, iterations: usize) -> HashSet<Point> {
    let v = path.pos(b) - path.pos(a);
    let mut out = HashSet::new();
    for n in 0..=iterations {
        for k in a..b {
            out.insert(path.pos(k) + v * n as i64);
        }
    }
    out
}

fn pumpings_meet(path: &PathAssembly, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let span = (1..=path.len()).map(|k| path.pos(k));
    let h1 = decision_horizon(span.clone(), std::iter::empty(), path.pos(b) - path.pos(a)).iterations;
    let h2 = decision_horizon(span, std::iter::empty(), path.pos(d) - path.pos(c)).iterations;
    let iterations = (h1.max(h2) * 2) as usize;
    let first = pumped_points(path, a, b, iterations);
    pumped_points(path, c, d, iterations).iter().any(|p| first.contains(p))
}

/// For southward attempts on `P[a, b]` then `P[c, d]` with `b < c` whose
/// pumpings meet, looks for a northward attempt recorded between them.
///
/// Pumpings are compared over a finite horizon: twice the larger decision
/// horizon of the two periods over the path's extent.
pub fn south_pump_monitor(path: &PathAssembly, history: &[PumpAttempt]) -> TrousCheck {
    let mut confirmed = None;
    for (x, first) in history.iter().enumerate() {
        if first.direction != PumpDirection::South {
            continue;
        }
        for (y, second) in history.iter().enumerate().skip(x + 1) {
            if second.direction != PumpDirection::South {
                continue;
            }
            let (a, b) = first.segment();
            let (c, d) = second.segment();
            if b >= c || !pumpings_meet(path, (a, b), (c, d)) {
                continue;
            }
            match history[x + 1..y].iter().find(|h| h.direction == PumpDirection::North) {
                Some(north) => {
                    confirmed.get_or_insert(TrousCheck::Confirmed { first: *first, second: *second, north: *north });
                }
                None => return TrousCheck::Violation { first: *first, second: *second },
            }
        }
    }
    confirmed.unwrap_or(TrousCheck::NotApplicable)
}
