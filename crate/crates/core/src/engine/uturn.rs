//! Detecting a U-turn that guarantees the stake-path algorithm succeeds.

use serde::{Deserialize, Serialize};

use crate::model::{PathAssembly, TileAssemblySystem};
use crate::visibility::{visible_glues, GlueKind, Side};

/// A pair `i < j` of same-type north glues visible from the chosen hand, and a
/// later south glue `k` visible from the other side of `P[1, k+1]`, such that
/// `P_k + vec(P_j P_i)` is at or below every tile of `P[i, k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceUTurn {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// All triples meeting the geometric conditions, ignoring tile types, in lexicographic order.
pub fn uturn_candidates(tas: &TileAssemblySystem, path: &PathAssembly, hand: Side) -> Vec<NiceUTurn> {
    let n = path.len();
    let pairs_side: Vec<usize> = visible_glues(tas, path, hand)
        .visible
        .iter()
        .filter(|e| e.kind == GlueKind::North)
        .map(|e| e.index)
        .collect();
    if pairs_side.len() < 2 {
        return Vec::new();
    }
    let ks: Vec<usize> = (2..n).filter(|&k| south_visible_on_prefix(tas, path, k, hand.opposite())).collect();
    let mut out = Vec::new();
    for (a, &i) in pairs_side.iter().enumerate() {
        for &j in &pairs_side[a + 1..] {
            let drop = path.pos(i).y - path.pos(j).y;
            let mut lowest = (i..=j).map(|m| path.pos(m).y).min().expect("non-empty range");
            let mut m = j;
            for &k in ks.iter().filter(|&&k| k > j) {
                while m < k {
                    m += 1;
                    lowest = lowest.min(path.pos(m).y);
                }
                if path.pos(k).y + drop <= lowest {
                    out.push(NiceUTurn { i, j, k });
                }
            }
        }
    }
    out
}

fn south_visible_on_prefix(tas: &TileAssemblySystem, path: &PathAssembly, k: usize, side: Side) -> bool {
    let (p, q) = (path.pos(k), path.pos(k + 1));
    if p.x != q.x || q.y != p.y - 1 {
        return false;
    }
    let report = visible_glues(tas, &path.prefix(k + 1), side);
    report.visible.iter().any(|e| e.index == k && e.kind == GlueKind::South)
}

/// The lexicographically least nice U-turn whose pair has equal tile types.
pub fn detect_nice_uturn(tas: &TileAssemblySystem, path: &PathAssembly, hand: Side) -> Option<NiceUTurn> {
    uturn_candidates(tas, path, hand).into_iter().find(|u| path.tile(u.i) == path.tile(u.j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::visibility::glue_edges;

    /// Direct transcription of the three conditions.
    fn brute(tas: &TileAssemblySystem, path: &PathAssembly, hand: Side) -> Option<NiceUTurn> {
        let n = path.len();
        let vis = visible_glues(tas, path, hand).visible;
        let north_visible = |i: usize| vis.iter().any(|e| e.index == i && e.kind == GlueKind::North);
        for i in 1..n {
            for j in i + 1..n {
                if !(north_visible(i) && north_visible(j) && path.tile(i) == path.tile(j)) {
                    continue;
                }
                for k in j + 1..n {
                    let prefix = path.prefix(k + 1);
                    let south = glue_edges(&prefix).iter().any(|e| e.index == k && e.kind == GlueKind::South);
                    let seen = visible_glues(tas, &prefix, hand.opposite()).visible.iter().any(|e| e.index == k);
                    let lowest = (i..=k).map(|m| path.pos(m).y).min().unwrap();
                    let target = path.pos(k).y + path.pos(i).y - path.pos(j).y;
                    if south && seen && target <= lowest {
                        return Some(NiceUTurn { i, j, k });
                    }
                }
            }
        }
        None
    }

    #[test]
    fn nshape_has_a_uturn_on_its_left_column() {
        let f = fixtures::nshape();
        let u = detect_nice_uturn(&f.tas, &f.path, Side::West).unwrap();
        assert_eq!(u, NiceUTurn { i: 1, j: 2, k: 12 });
        assert_eq!(Some(u), brute(&f.tas, &f.path, Side::West));
        assert_eq!(f.path.pos(u.k).x, 4);
    }

    #[test]
    fn straight_paths_have_no_uturn() {
        for f in [fixtures::col_n(), fixtures::line_e()] {
            assert_eq!(detect_nice_uturn(&f.tas, &f.path, Side::West), None);
            assert_eq!(brute(&f.tas, &f.path, Side::West), None);
        }
    }

    #[test]
    fn mirrored_nshape_turns_the_other_way() {
        let f = fixtures::nshape();
        let tas = f.tas.mirrored();
        let path = f.path.mirrored();
        assert_eq!(detect_nice_uturn(&tas, &path, Side::West), None);
        assert_eq!(detect_nice_uturn(&tas, &path, Side::East), Some(NiceUTurn { i: 1, j: 2, k: 12 }));
    }
}
