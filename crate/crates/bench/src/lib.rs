//! Workloads shared by the benchmarks.

use tilepump_core::corpus::{corpus_keys, realize, CorpusConfig};
use tilepump_core::fixtures::{self, Fixture};
use tilepump_core::geom::{pt, BBox};
use tilepump_core::{PathAssembly, TileAssemblySystem};

/// A column of `len` tiles, pumpable from its first two tiles.
pub fn column(len: i64) -> Fixture {
    fixtures::col_n_tall(len)
}

/// The realised instances of a small corpus: paths of at most `max_len` tiles in a 9×9 window.
pub fn corpus(max_len: usize) -> Vec<(TileAssemblySystem, PathAssembly, usize, usize)> {
    let config = CorpusConfig { max_len, window: BBox { min: pt(-4, -4), max: pt(4, 4) }, ..Default::default() };
    corpus_keys(&config)
        .into_iter()
        .filter_map(|k| realize(&k.shape, k.pattern).map(|(tas, path)| (tas, path, k.i, k.j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_non_trivial() {
        assert_eq!(column(20).path.len(), 20);
        let c = corpus(6);
        assert!(!c.is_empty());
        assert!(c.iter().all(|(_, p, i, j)| i < j && *j <= p.len()));
    }
}
