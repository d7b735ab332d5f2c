//! Experiment driver behind the `dirlp` binary: configuration, dataset
//! loading and the command implementations.

mod experiment;
mod ingest;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datasets::{self, SyntheticConfig};
use crate::digraph::{DirectedGraph, NodeFeatures};
use crate::error::{Error, Result};
use crate::eval::EvalProtocol;
use crate::heuristics::{Family, HeuristicSpec};
use crate::model::{ModelConfig, SearchSpace, TrainConfig};
use crate::sampling::SplitRatios;

pub use experiment::{
    cmd_ablate, cmd_evaluate, cmd_heuristic, cmd_split, cmd_train, cmd_verify, heuristic_fold, mean_std, method_name,
    train_fold,
    AblationAxis, AblationRow, EvalSummary, Experiment, FoldRun, HeuristicRow, TrainRow,
};
pub use ingest::{cmd_ingest, IngestStats};

/// Where the graph of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    /// Dense-id edge list, e.g. the output of `ingest`.
    Files {
        edges: PathBuf,
        #[serde(default)]
        features: Option<PathBuf>,
        #[serde(default)]
        name: Option<String>,
    },
    /// Featureless circulant lattice.
    Ring { nodes: usize, k: usize },
    Synthetic {
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        params: SyntheticConfig,
    },
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec::Ring { nodes: 60, k: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub ratios: SplitRatios,
    pub folds: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            ratios: SplitRatios::default(),
            folds: 10,
        }
    }
}

/// A heuristic row of the `heuristic` command: a fixed score, or the
/// directional RA/AA variant chosen on each fold's validation edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeuristicMethod {
    Fixed(HeuristicSpec),
    BestDirectional(Family),
}

impl FromStr for HeuristicMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ra-asym" => Ok(HeuristicMethod::BestDirectional(Family::Ra)),
            "aa-asym" => Ok(HeuristicMethod::BestDirectional(Family::Aa)),
            _ => Ok(HeuristicMethod::Fixed(s.parse()?)),
        }
    }
}

impl std::fmt::Display for HeuristicMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeuristicMethod::Fixed(spec) => write!(f, "{spec}"),
            HeuristicMethod::BestDirectional(Family::Aa) => f.write_str("aa-asym"),
            HeuristicMethod::BestDirectional(_) => f.write_str("ra-asym"),
        }
    }
}

/// Everything a run needs. Serialized back next to the results so that any
/// row can be reproduced from its directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub split: SplitConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub eval: EvalProtocol,
    /// Names such as `lp-asym`, `ra-sym`, `aa-out-in`; `ra-asym` and
    /// `aa-asym` select the best directional variant per fold.
    pub heuristics: Vec<String>,
    pub search: SearchSpace,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSpec::default(),
            split: SplitConfig::default(),
            model: ModelConfig::dirlp(),
            train: TrainConfig::default(),
            eval: EvalProtocol::default(),
            heuristics: ["lp-sym", "lp-asym", "ra-sym", "ra-asym", "aa-sym", "aa-asym"]
                .map(String::from)
                .to_vec(),
            search: SearchSpace::default(),
            seed: 0,
            out: PathBuf::from("runs"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.train.validate()?;
        self.split.ratios.validate()?;
        self.search.validate()?;
        if self.split.folds == 0 {
            return Err(Error::Config("split.folds must be >= 1".into()));
        }
        if self.eval.candidates == 0 || self.eval.hits_k == 0 {
            return Err(Error::Config("eval.candidates and eval.hits_k must be >= 1".into()));
        }
        self.heuristic_methods()?;
        Ok(())
    }

    pub fn heuristic_methods(&self) -> Result<Vec<HeuristicMethod>> {
        self.heuristics.iter().map(|s| s.parse()).collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding,
    /// with `out` cleared so the hash does not depend on where results go.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig {
            out: PathBuf::new(),
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Crate version plus the git commit it was built from, when known.
pub fn build_id() -> &'static str {
    env!("DIRLP_BUILD_ID")
}

/// A loaded graph with optional node features.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graph: DirectedGraph,
    pub features: Option<NodeFeatures>,
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    match spec {
        DatasetSpec::Files { edges, features, name } => {
            let file = File::open(edges).map_err(|e| Error::Ingest(format!("{}: {e}", edges.display())))?;
            let features = features
                .as_ref()
                .map(|p| {
                    let f = File::open(p).map_err(|e| Error::Ingest(format!("{}: {e}", p.display())))?;
                    NodeFeatures::read_csv(BufReader::new(f))
                })
                .transpose()?;
            let (graph, _) = DirectedGraph::load_edge_list(BufReader::new(file), features.as_ref().map(|f| f.num_nodes()))?;
            let name = name.clone().unwrap_or_else(|| {
                edges
                    .parent()
                    .and_then(|p| p.file_name())
                    .or_else(|| edges.file_stem())
                    .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
            });
            Ok(Dataset { name, graph, features })
        }
        DatasetSpec::Ring { nodes, k } => Ok(Dataset {
            name: format!("ring{nodes}k{k}"),
            graph: datasets::ring_lattice(*nodes, *k)?,
            features: None,
        }),
        DatasetSpec::Synthetic { seed, params } => {
            let (graph, features) = datasets::synthetic_digraph(params, *seed)?;
            Ok(Dataset {
                name: format!("synthetic{}", params.nodes),
                graph,
                features: Some(features),
            })
        }
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

/// Parses the value of `--search`, e.g. `trials=48`.
pub fn parse_search(arg: &str) -> Result<usize> {
    let n = arg
        .strip_prefix("trials=")
        .ok_or_else(|| Error::Config(format!("expected trials=N, got {arg:?}")))?;
    match n.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Config(format!("invalid trial count {n:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::Variant;

    #[test]
    fn config_roundtrips_and_rejects_unknown_keys() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sede": 1}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"dataset": {"kind": "ring", "nodes": 5, "k": 1, "x": 0}}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"model": {"encoder": {"depth": 2}}}"#).is_err());
        let partial: ExperimentConfig = serde_json::from_str(r#"{"seed": 4, "split": {"folds": 3}}"#).unwrap();
        assert_eq!(partial.split.folds, 3);
        assert_eq!(partial.split.ratios, SplitRatios::default());
        assert_ne!(partial.hash(), cfg.hash());
        let moved = ExperimentConfig {
            out: "elsewhere".into(),
            ..cfg.clone()
        };
        assert_eq!(moved.hash(), cfg.hash());
    }

    #[test]
    fn heuristic_names() {
        let cfg = ExperimentConfig::default();
        let names: Vec<String> = cfg.heuristic_methods().unwrap().iter().map(|m| m.to_string()).collect();
        assert_eq!(names, cfg.heuristics);
        assert_eq!(
            "aa-in-out".parse::<HeuristicMethod>().unwrap(),
            HeuristicMethod::Fixed(HeuristicSpec::new(Family::Aa, Variant::InOut).unwrap())
        );
        assert!("ra-sideways".parse::<HeuristicMethod>().is_err());
    }

    #[test]
    fn search_flag() {
        assert_eq!(parse_search("trials=48").unwrap(), 48);
        assert!(parse_search("trials=0").is_err());
        assert!(parse_search("48").is_err());
    }

    #[test]
    fn builtin_datasets_load() {
        let ring = load_dataset(&DatasetSpec::Ring { nodes: 10, k: 2 }).unwrap();
        assert_eq!(ring.graph.num_edges(), 20);
        assert!(ring.features.is_none());
        assert!(!build_id().is_empty());
    }
}
