//! Similarity heuristics for link prediction: local path index (LP),
//! resource allocation (RA) and Adamic–Adar (AA).
//!
//! Symmetric variants operate on the symmetrized graph. The asymmetric LP
//! counts directed walks; the four directional RA/AA variants restrict the
//! common-neighbor set to `N_{d_u}(u) ∩ N_{d_v}(v)` while keeping the
//! undirected degree `|N(t)|` in the weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Direction, Edge, NodeId};
use crate::error::{Error, Result};
use crate::eval::{self, EvalProtocol};
use crate::setops::{for_each_common, intersection_size};

pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lp,
    Ra,
    Aa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Sym,
    Asym,
    InIn,
    InOut,
    OutIn,
    OutOut,
}

impl Variant {
    /// Fixed evaluation and tie-break order of the directional variants.
    pub const DIRECTIONAL: [Variant; 4] =
        [Variant::InIn, Variant::InOut, Variant::OutIn, Variant::OutOut];

    pub fn directions(self) -> Option<(Direction, Direction)> {
        use Direction::{In, Out};
        match self {
            Variant::InIn => Some((In, In)),
            Variant::InOut => Some((In, Out)),
            Variant::OutIn => Some((Out, In)),
            Variant::OutOut => Some((Out, Out)),
            Variant::Sym | Variant::Asym => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Variant::Sym => "sym",
            Variant::Asym => "asym",
            Variant::InIn => "in-in",
            Variant::InOut => "in-out",
            Variant::OutIn => "out-in",
            Variant::OutOut => "out-out",
        }
    }
}

impl Family {
    fn as_str(self) -> &'static str {
        match self {
            Family::Lp => "lp",
            Family::Ra => "ra",
            Family::Aa => "aa",
        }
    }
}

/// A fully specified heuristic score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicSpec {
    pub family: Family,
    pub variant: Variant,
    pub epsilon: f64,
}

impl HeuristicSpec {
    pub fn new(family: Family, variant: Variant) -> Result<Self> {
        Self::with_epsilon(family, variant, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(family: Family, variant: Variant, epsilon: f64) -> Result<Self> {
        let ok = match family {
            Family::Lp => matches!(variant, Variant::Sym | Variant::Asym),
            Family::Ra | Family::Aa => variant != Variant::Asym,
        };
        if !ok {
            return Err(Error::Domain(format!(
                "variant {} is not defined for {}",
                variant.as_str(),
                family.as_str()
            )));
        }
        if family == Family::Lp && !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("LP epsilon must be > 0, got {epsilon}")));
        }
        Ok(HeuristicSpec {
            family,
            variant,
            epsilon,
        })
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family.as_str(), self.variant.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Family::Lp),
            "ra" => Ok(Family::Ra),
            "aa" => Ok(Family::Aa),
            _ => Err(Error::Config(format!("unknown heuristic family {s:?}"))),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" => Ok(Variant::Sym),
            "asym" => Ok(Variant::Asym),
            "in-in" => Ok(Variant::InIn),
            "in-out" => Ok(Variant::InOut),
            "out-in" => Ok(Variant::OutIn),
            "out-out" => Ok(Variant::OutOut),
            _ => Err(Error::Config(format!("unknown heuristic variant {s:?}"))),
        }
    }
}

impl FromStr for HeuristicSpec {
    type Err = Error;
    /// Parses names such as `lp-asym`, `ra-sym`, `aa-out-in`.
    fn from_str(s: &str) -> Result<Self> {
        let (fam, var) = s
            .split_once('-')
            .ok_or_else(|| Error::Config(format!("bad heuristic name {s:?}")))?;
        HeuristicSpec::new(fam.parse()?, var.parse()?)
    }
}

/// Scores pairs on a fixed graph; holds the symmetrized copy.
pub struct Heuristics<'g> {
    graph: &'g DirectedGraph,
    sym: DirectedGraph,
}

impl<'g> Heuristics<'g> {
    pub fn new(graph: &'g DirectedGraph) -> Self {
        Heuristics {
            graph,
            sym: graph.symmetrize(),
        }
    }

    pub fn graph(&self) -> &DirectedGraph {
        self.graph
    }

    fn check_pair(&self, u: NodeId, v: NodeId) -> Result<()> {
        let n = self.graph.num_nodes();
        for id in [u, v] {
            if id >= n {
                return Err(Error::NodeRange { id, num_nodes: n });
            }
        }
        if u == v {
            return Err(Error::Domain(format!("heuristic score undefined for u = v = {u}")));
        }
        Ok(())
    }

    pub fn score(&self, spec: &HeuristicSpec, u: NodeId, v: NodeId) -> Result<f64> {
        match spec.family {
            Family::Lp => self.lp(u, v, spec.variant, spec.epsilon),
            fam => self.common_neighbor(u, v, fam, spec.variant),
        }
    }

    /// `A²[u,v] + ε·A³[u,v]` on the directed (`Asym`) or symmetrized (`Sym`) adjacency.
    pub fn lp(&self, u: NodeId, v: NodeId, variant: Variant, epsilon: f64) -> Result<f64> {
        self.check_pair(u, v)?;
        let g = match variant {
            Variant::Sym => &self.sym,
            Variant::Asym => self.graph,
            other => {
                return Err(Error::Domain(format!(
                    "LP has no {} variant",
                    other.as_str()
                )))
            }
        };
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("LP epsilon must be > 0, got {epsilon}")));
        }
        let into_v = g.in_neighbors(v);
        let two = intersection_size(g.out_neighbors(u), into_v);
        let three: usize = g
            .out_neighbors(u)
            .iter()
            .map(|&t| intersection_size(g.out_neighbors(t), into_v))
            .sum();
        Ok(two as f64 + epsilon * three as f64)
    }

    /// RA or AA over the symmetric or a directional common neighborhood.
    pub fn common_neighbor(
        &self,
        u: NodeId,
        v: NodeId,
        family: Family,
        variant: Variant,
    ) -> Result<f64> {
        self.check_pair(u, v)?;
        let (nu, nv) = match variant {
            Variant::Sym => (self.sym.out_neighbors(u), self.sym.out_neighbors(v)),
            Variant::Asym => {
                return Err(Error::Domain(
                    "resolve RA/AA asym to a directional variant first".into(),
                ))
            }
            directional => {
                let (du, dv) = directional.directions().expect("directional variant");
                (self.graph.adj(u, du), self.graph.adj(v, dv))
            }
        };
        let mut total = 0.0;
        for_each_common(nu, nv, |t| {
            let deg = self.sym.out_degree(t);
            total += match family {
                Family::Ra => 1.0 / deg as f64,
                // ln(1) = 0 would divide by zero; such t are skipped.
                Family::Aa if deg > 1 => 1.0 / (deg as f64).ln(),
                Family::Aa => 0.0,
                Family::Lp => unreachable!("LP is not a common-neighbor score"),
            };
        });
        Ok(total)
    }

    pub fn score_pairs(&self, spec: &HeuristicSpec, pairs: &[Edge]) -> Result<Vec<f64>> {
        pairs
            .iter()
            .map(|&(u, v)| {
                self.score(spec, u, v).map_err(|e| Error::Scorer {
                    u,
                    v,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// Picks the directional RA/AA variant with the best validation MRR.
///
/// Variants are scored in [`Variant::DIRECTIONAL`] order and only a strictly
/// better MRR replaces the incumbent, so ties go to the earlier variant.
pub fn best_directional_variant(
    scorer: &Heuristics<'_>,
    family: Family,
    validation: &[Edge],
    full_graph: &DirectedGraph,
    protocol: &EvalProtocol,
) -> Result<Variant> {
    best_directional_variant_in_order(
        scorer,
        family,
        validation,
        full_graph,
        protocol,
        &Variant::DIRECTIONAL,
    )
}

/// Same selection with a caller-chosen evaluation order. The result does not
/// depend on the order: ties are resolved by position in
/// [`Variant::DIRECTIONAL`], not by evaluation order.
pub fn best_directional_variant_in_order(
    scorer: &Heuristics<'_>,
    family: Family,
    validation: &[Edge],
    full_graph: &DirectedGraph,
    protocol: &EvalProtocol,
    order: &[Variant],
) -> Result<Variant> {
    if validation.is_empty() {
        return Err(Error::Contract("empty validation set".into()));
    }
    if family == Family::Lp {
        return Err(Error::Domain("LP has no directional variants".into()));
    }
    let rank_in_fixed = |v: Variant| {
        Variant::DIRECTIONAL
            .iter()
            .position(|&x| x == v)
            .expect("directional variant")
    };
    let mut best: Option<(f64, Variant)> = None;
    for &variant in order {
        let spec = HeuristicSpec::new(family, variant)?;
        if spec.variant.directions().is_none() {
            return Err(Error::Domain(format!("{spec} is not directional")));
        }
        let report = eval::evaluate(
            |pairs| scorer.score_pairs(&spec, pairs),
            validation,
            full_graph,
            protocol,
        )?;
        let better = match best {
            None => true,
            Some((m, b)) => {
                report.mrr > m || (report.mrr == m && rank_in_fixed(variant) < rank_in_fixed(b))
            }
        };
        if better {
            best = Some((report.mrr, variant));
        }
    }
    best.map(|(_, v)| v)
        .ok_or_else(|| Error::Contract("no variants evaluated".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> DirectedGraph {
        DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)])
            .unwrap()
            .0
    }

    #[test]
    fn lp_examples() {
        let g = g1();
        let h = Heuristics::new(&g);
        let asym = h.lp(1, 3, Variant::Asym, 1e-3).unwrap();
        assert!((asym - 0.001).abs() < 1e-15);
        let sym = h.lp(1, 3, Variant::Sym, 1e-3).unwrap();
        assert!((sym - 1.001).abs() < 1e-15);
        assert_eq!(h.lp(3, 2, Variant::Asym, 1e-3).unwrap(), 0.0);
        assert!(matches!(h.lp(2, 2, Variant::Sym, 1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn ra_examples() {
        let g = g1();
        let h = Heuristics::new(&g);
        let s = h.common_neighbor(1, 3, Family::Ra, Variant::Sym).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        let s = h.common_neighbor(1, 2, Family::Ra, Variant::InOut).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(h.common_neighbor(0, 1, Family::Ra, Variant::OutOut).unwrap(), 0.0);
        assert!(h.common_neighbor(1, 1, Family::Aa, Variant::Sym).is_err());
    }

    #[test]
    fn aa_uses_natural_log() {
        let g = g1();
        let h = Heuristics::new(&g);
        let s = h.common_neighbor(1, 3, Family::Aa, Variant::Sym).unwrap();
        assert!((s - 1.0 / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn spec_validation_and_parsing() {
        assert!(HeuristicSpec::new(Family::Lp, Variant::InOut).is_err());
        assert!(HeuristicSpec::new(Family::Ra, Variant::Asym).is_err());
        assert!(HeuristicSpec::with_epsilon(Family::Lp, Variant::Sym, 0.0).is_err());
        let s: HeuristicSpec = "aa-out-in".parse().unwrap();
        assert_eq!(s.family, Family::Aa);
        assert_eq!(s.variant, Variant::OutIn);
        assert_eq!(s.to_string(), "aa-out-in");
        assert!("zz-sym".parse::<HeuristicSpec>().is_err());
    }
}
