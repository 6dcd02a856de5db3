//! Bounded search for assemblies that disagree with a path.
//!
//! At temperature 1 every tile of a producible assembly is reached from the
//! seed by a simple bonded path, so it suffices to search simple paths that
//! grow out of the seed.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::FragileCertificate;
use crate::geom::{Direction, Point};
use crate::model::{PathAssembly, TileAssemblySystem, TileId};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FragilityError {
    #[error("search budget of {budget} expansions exhausted")]
    SearchBudgetExhausted { budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum number of search nodes expanded.
    pub expansions: usize,
    /// Maximum number of tiles in a candidate branch.
    pub max_len: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { expansions: 200_000, max_len: 16 }
    }
}

#[derive(Clone, Copy)]
struct Node {
    parent: Option<usize>,
    point: Point,
    tile: TileId,
    depth: usize,
}

/// Breadth-first search over simple branches from the seed.
///
/// Returns `Ok(None)` when every branch of at most `budget.max_len` tiles was
/// examined without finding a disagreement.
pub fn fragility_witness(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    budget: SearchBudget,
) -> Result<Option<FragileCertificate>, FragilityError> {
    let types: Vec<TileId> = (0..tas.tileset.len()).map(TileId).collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut expansions = 0usize;

    let seed_starts: Vec<(Point, TileId)> = tas.seed.iter().collect();
    let mut level: Vec<(Option<usize>, Point, TileId)> = Vec::new();
    for (s, u) in seed_starts {
        for d in Direction::ALL {
            let q = s.step(d);
            if tas.seed.contains(q) {
                continue;
            }
            for &t in &types {
                if tas.tileset.interacts(u, d, t) {
                    level.push((None, q, t));
                }
            }
        }
    }
    dedup_preserving_order(&mut level);

    let mut depth = 1;
    loop {
        frontier.clear();
        for (parent, q, t) in level.drain(..) {
            let idx = nodes.len();
            nodes.push(Node { parent, point: q, tile: t, depth });
            if let Some(k) = path.index_of(q) {
                if path.tile(k) != t {
                    return Ok(Some(certificate_for(&nodes, idx)));
                }
            }
            frontier.push(idx);
        }
        if frontier.is_empty() || depth >= budget.max_len {
            return Ok(None);
        }
        for &idx in &frontier {
            expansions += 1;
            if expansions > budget.expansions {
                return Err(FragilityError::SearchBudgetExhausted { budget: budget.expansions });
            }
            let node = nodes[idx];
            let occupied = branch_points(&nodes, idx);
            for d in Direction::ALL {
                let q = node.point.step(d);
                if tas.seed.contains(q) || occupied.contains(&q) {
                    continue;
                }
                for &t in &types {
                    if tas.tileset.interacts(node.tile, d, t) {
                        level.push((Some(idx), q, t));
                    }
                }
            }
        }
        depth += 1;
        debug_assert!(nodes.iter().all(|n| n.depth <= depth));
    }
}

fn dedup_preserving_order(level: &mut Vec<(Option<usize>, Point, TileId)>) {
    let mut seen = HashSet::new();
    level.retain(|(_, q, t)| seen.insert((*q, *t)));
}

fn branch_points(nodes: &[Node], mut idx: usize) -> HashSet<Point> {
    let mut out = HashSet::new();
    loop {
        out.insert(nodes[idx].point);
        match nodes[idx].parent {
            Some(p) => idx = p,
            None => return out,
        }
    }
}

fn certificate_for(nodes: &[Node], mut idx: usize) -> FragileCertificate {
    let conflict = nodes[idx].point;
    let mut order = Vec::new();
    loop {
        order.push((nodes[idx].point, nodes[idx].tile));
        match nodes[idx].parent {
            Some(p) => idx = p,
            None => break,
        }
    }
    order.reverse();
    FragileCertificate::new(&order, conflict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::verify_fragile;
    use crate::fixtures;
    use crate::geom::pt;

    #[test]
    fn fork_is_fragile_at_its_only_tile() {
        let f = fixtures::fork();
        let cert = fragility_witness(&f.tas, &f.path, SearchBudget::default()).unwrap().unwrap();
        assert_eq!(cert.conflict_point, pt(1, 0));
        assert_eq!(cert.growth_order.len(), 1);
        assert!(verify_fragile(&f.tas, &f.path, &cert).unwrap().is_accepted());
    }

    #[test]
    fn hook_is_fragile_under_its_last_tile() {
        let f = fixtures::hook_s();
        let cert = fragility_witness(&f.tas, &f.path, SearchBudget::default()).unwrap().unwrap();
        assert!(verify_fragile(&f.tas, &f.path, &cert).unwrap().is_accepted());
    }

    #[test]
    fn single_tile_line_is_not_fragile() {
        let f = fixtures::line_e();
        let budget = SearchBudget { expansions: 10_000, max_len: 8 };
        assert_eq!(fragility_witness(&f.tas, &f.path, budget).unwrap(), None);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = fixtures::nshape();
        let budget = SearchBudget { expansions: 5, max_len: 50 };
        assert!(matches!(
            fragility_witness(&f.tas, &f.path, budget),
            Err(FragilityError::SearchBudgetExhausted { budget: 5 })
        ));
    }
}
