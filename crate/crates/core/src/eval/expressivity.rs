//! Two edges of a directed four-node complete graph that no symmetric
//! model with undirected edge features can tell apart, but directed
//! sequence counts can.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Edge};
use crate::error::{Error, Result};
use crate::featurize;
use crate::model::{DecoderKind, EncoderKind, GraphContext, LinkPredictor, ModelConfig, StructuralMode};

const PAIRS: [Edge; 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `(node, in-degree, out-degree)` constraints of the fixture.
const DEGREES: [(usize, usize, usize); 3] = [(0, 2, 1), (1, 1, 2), (3, 3, 1)];

/// The unique orientation of K4 (each pair one-way either way, or both
/// ways) meeting the degree constraints on nodes 0, 1 and 3.
pub fn k4_fixture() -> Result<DirectedGraph> {
    let mut found = Vec::new();
    for code in 0..3usize.pow(6) {
        let mut edges = Vec::new();
        let mut c = code;
        for &(a, b) in &PAIRS {
            match c % 3 {
                0 => edges.push((a, b)),
                1 => edges.push((b, a)),
                _ => edges.extend([(a, b), (b, a)]),
            }
            c /= 3;
        }
        let g = DirectedGraph::from_edges(4, edges)?.0;
        if DEGREES
            .iter()
            .all(|&(u, i, o)| g.in_degree(u) == i && g.out_degree(u) == o)
        {
            found.push(g);
        }
    }
    match found.len() {
        1 => Ok(found.remove(0)),
        k => Err(Error::Fixture(format!(
            "{k} orientations of K4 satisfy the degree constraints"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressivityReport {
    pub sgnn_distinguishes: bool,
    pub dirlp_distinguishes: bool,
    pub fixture_edges: Vec<Edge>,
    /// First two `L` entries followed by first two `R` entries, radius 1.
    pub lr_prefix_01: Vec<f64>,
    pub lr_prefix_03: Vec<f64>,
    pub undirected_features_equal: bool,
    pub symmetric_scores: [f64; 2],
    pub dirlp_scores: [f64; 2],
}

impl ExpressivityReport {
    pub fn passed(&self) -> bool {
        !self.sgnn_distinguishes
            && self.dirlp_distinguishes
            && self.lr_prefix_01 == [2.0, 1.0, 1.0, 2.0]
            && self.lr_prefix_03 == [2.0, 1.0, 3.0, 1.0]
    }
}

fn lr_prefix(g: &DirectedGraph, (u, v): Edge) -> Result<Vec<f64>> {
    let z = featurize::directed_edge_features(g, u, v, 1)?;
    // radius 1: U(4) I(4) L(2) R(2)
    Ok(z[8..12].to_vec())
}

fn scores(cfg: ModelConfig, g: &DirectedGraph, seed: u64) -> Result<[f64; 2]> {
    let ctx = GraphContext::new(g.clone(), None, &cfg)?;
    let model = LinkPredictor::new(cfg, Arc::new(ctx), seed)?;
    let s = model.score_pairs(&[(0, 1), (0, 3)])?;
    Ok([s[0], s[1]])
}

/// Compares edges `(0, 1)` and `(0, 3)` of [`k4_fixture`] under a GraphSage
/// encoder with symmetric decoding plus undirected features, and under
/// directed edge features.
pub fn expressivity_check_k4() -> Result<ExpressivityReport> {
    let g = k4_fixture()?;
    let radius = 2;
    let (a, b) = (
        featurize::edge_features(&g, 0, 1, radius)?,
        featurize::edge_features(&g, 0, 3, radius)?,
    );
    let undirected_features_equal = a.z_undir == b.z_undir;

    let mut sgnn = ModelConfig::baseline(EncoderKind::GraphSage, DecoderKind::Hmlp);
    sgnn.structural = StructuralMode::Undirected;
    sgnn.radius = radius;
    let symmetric_scores = scores(sgnn, &g, 0)?;

    let mut dirlp = ModelConfig::dirlp();
    dirlp.labels = None;
    dirlp.radius = radius;
    let dirlp_scores = scores(dirlp, &g, 0)?;

    Ok(ExpressivityReport {
        sgnn_distinguishes: !undirected_features_equal || symmetric_scores[0] != symmetric_scores[1],
        dirlp_distinguishes: a.z_dir != b.z_dir && dirlp_scores[0] != dirlp_scores[1],
        fixture_edges: g.edges().to_vec(),
        lr_prefix_01: lr_prefix(&g, (0, 1))?,
        lr_prefix_03: lr_prefix(&g, (0, 3))?,
        undirected_features_equal,
        symmetric_scores,
        dirlp_scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_the_expected_orientation() {
        let g = k4_fixture().unwrap();
        let mut expect = vec![(0, 3), (1, 0), (2, 0), (1, 3), (2, 3), (3, 2), (2, 1)];
        expect.sort_unstable();
        assert_eq!(g.edges(), expect);
    }

    #[test]
    fn check_passes() {
        let r = expressivity_check_k4().unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.symmetric_scores[0], r.symmetric_scores[1]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["sgnn_distinguishes"], false);
        assert_eq!(json["dirlp_distinguishes"], true);
    }

    #[test]
    fn undirected_k4_edges_look_alike() {
        let g = DirectedGraph::from_edges(4, PAIRS.iter().flat_map(|&(a, b)| [(a, b), (b, a)]))
            .unwrap()
            .0;
        let first = featurize::edge_features(&g, 0, 1, 2).unwrap();
        for &(a, b) in &PAIRS {
            assert_eq!(featurize::edge_features(&g, a, b, 2).unwrap(), first);
        }
    }
}
