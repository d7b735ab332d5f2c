use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_id, load_dataset, write_csv, write_json, Dataset, ExperimentConfig, HeuristicMethod};
use crate::digraph::DirectedGraph;
use crate::error::{Error, Result};
use crate::eval::{self, EvalProtocol, EvalReport, TiePolicy};
use crate::featurize::LabelMode;
use crate::heuristics::{self, HeuristicSpec, Heuristics};
use crate::model::{
    self, DecoderKind, EncoderKind, GraphContext, LabelConfig, LinkPredictor, ModelConfig, StructuralMode,
    TrainConfig, TrainReport, Trial,
};
use crate::rng;
use crate::sampling::{self, EdgeSplit, NegativeMode};
use crate::verify::{self, VerifyReport};

/// A loaded dataset with its folds.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub dataset: Dataset,
    pub splits: Vec<EdgeSplit>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let dataset = load_dataset(&config.dataset)?;
        let splits = sampling::make_splits(&dataset.graph, config.split.ratios, config.seed, config.split.folds)?;
        Ok(Experiment { config, dataset, splits })
    }

    /// Test protocol of one fold: the configured one with a per-fold seed.
    pub fn protocol(&self, split: &EdgeSplit) -> EvalProtocol {
        EvalProtocol {
            seed: rng::derive_seed(self.config.eval.seed, &[split.seed]),
            ..self.config.eval
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.config.out.join(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRow {
    pub dataset: String,
    pub method: String,
    /// The concrete score used; differs from `method` for `ra-asym` / `aa-asym`.
    pub selected: String,
    pub fold: usize,
    pub fold_seed: u64,
    pub mrr: f64,
    pub hits: f64,
    pub hits_k: usize,
    pub wall_time_s: f64,
    pub config_hash: String,
    pub build_id: String,
}

/// Scores one fold's test edges with `method` on that fold's training graph.
pub fn heuristic_fold(
    full: &DirectedGraph,
    split: &EdgeSplit,
    method: HeuristicMethod,
    protocol: &EvalProtocol,
) -> Result<(HeuristicSpec, EvalReport)> {
    let g_train = split.train_graph(full.num_nodes())?;
    let h = Heuristics::new(&g_train);
    let spec = match method {
        HeuristicMethod::Fixed(spec) => spec,
        HeuristicMethod::BestDirectional(family) => {
            let val = EvalProtocol {
                seed: rng::derive_seed(protocol.seed, &[1]),
                ..*protocol
            };
            let variant = heuristics::best_directional_variant(&h, family, &split.valid_pos, full, &val)?;
            HeuristicSpec::new(family, variant)?
        }
    };
    let report = eval::evaluate(|p| h.score_pairs(&spec, p), &split.test_pos, full, protocol)?;
    Ok((spec, report))
}

/// Runs every configured heuristic on every fold and writes `heuristic.csv`.
pub fn cmd_heuristic(cfg: &ExperimentConfig) -> Result<Vec<HeuristicRow>> {
    let exp = Experiment::new(cfg.clone())?;
    let methods = cfg.heuristic_methods()?;
    let hash = cfg.hash();
    let cells: Vec<(usize, HeuristicMethod)> = (0..exp.splits.len())
        .flat_map(|f| methods.iter().map(move |&m| (f, m)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(fold, method)| {
            let split = &exp.splits[fold];
            let start = Instant::now();
            let (spec, report) = heuristic_fold(&exp.dataset.graph, split, method, &exp.protocol(split))?;
            log::info!("fold {fold} {method}: MRR {:.4}", report.mrr);
            Ok(HeuristicRow {
                dataset: exp.dataset.name.clone(),
                method: method.to_string(),
                selected: spec.to_string(),
                fold,
                fold_seed: split.seed,
                mrr: report.mrr,
                hits: report.hits,
                hits_k: report.hits_k,
                wall_time_s: start.elapsed().as_secs_f64(),
                config_hash: hash.clone(),
                build_id: build_id().to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    cfg.write(&exp.out("config.json"))?;
    write_csv(&exp.out("heuristic.csv"), &rows)?;
    Ok(rows)
}

/// Writes each fold's edge lists and a manifest under `splits/`.
pub fn cmd_split(cfg: &ExperimentConfig) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct FoldEntry {
        fold: usize,
        seed: u64,
        train: usize,
        valid: usize,
        test: usize,
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        dataset: &'a str,
        nodes: usize,
        edges: usize,
        seed: u64,
        ratios: sampling::SplitRatios,
        folds: Vec<FoldEntry>,
    }
    let exp = Experiment::new(cfg.clone())?;
    let dir = exp.out("splits");
    let mut folds = Vec::new();
    for (k, s) in exp.splits.iter().enumerate() {
        let fold_dir = dir.join(format!("fold_{k}"));
        std::fs::create_dir_all(&fold_dir)?;
        for (name, edges) in [("train", &s.train_pos), ("valid", &s.valid_pos), ("test", &s.test_pos)] {
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            let g = DirectedGraph::from_edges(exp.dataset.graph.num_nodes(), sorted)?.0;
            g.write_edge_list(BufWriter::new(File::create(fold_dir.join(format!("{name}.txt")))?))?;
        }
        folds.push(FoldEntry {
            fold: k,
            seed: s.seed,
            train: s.train_pos.len(),
            valid: s.valid_pos.len(),
            test: s.test_pos.len(),
        });
    }
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            dataset: &exp.dataset.name,
            nodes: exp.dataset.graph.num_nodes(),
            edges: exp.dataset.graph.num_edges(),
            seed: cfg.seed,
            ratios: cfg.split.ratios,
            folds,
        },
    )?;
    cfg.write(&exp.out("config.json"))?;
    Ok(dir)
}

/// A trained model and its test evaluation.
pub struct FoldRun {
    pub model: LinkPredictor,
    pub report: TrainReport,
    pub eval: EvalReport,
}

/// Trains on one fold's training edges (model seeded with `seed`) and
/// evaluates the best-validation checkpoint on its test edges.
pub fn train_fold(
    ds: &Dataset,
    split: &EdgeSplit,
    mcfg: &ModelConfig,
    tc: &TrainConfig,
    protocol: &EvalProtocol,
    seed: u64,
) -> Result<FoldRun> {
    let ctx = GraphContext::new(split.train_graph(ds.graph.num_nodes())?, ds.features.as_ref(), mcfg)?;
    let mut model = LinkPredictor::new(mcfg.clone(), Arc::new(ctx), seed)?;
    let report = model::train(&mut model, split, &ds.graph, tc, protocol, seed)?;
    let eval = model.evaluate(&split.test_pos, &ds.graph, protocol)?;
    Ok(FoldRun { model, report, eval })
}

/// Short label such as `dirgnn+cmlp+de15-d+sf-directed`.
pub fn method_name(cfg: &ModelConfig) -> String {
    let mut name = format!("{}+{}", cfg.encoder.kind.name(), cfg.decoder.kind.name());
    if let Some(l) = &cfg.labels {
        name.push('+');
        name.push_str(&l.name());
    }
    match cfg.structural {
        StructuralMode::None => {}
        StructuralMode::Undirected => name.push_str("+sf-undirected"),
        StructuralMode::Directed => name.push_str("+sf-directed"),
    }
    name
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub dataset: String,
    pub method: String,
    pub fold: usize,
    pub fold_seed: u64,
    pub best_epoch: usize,
    pub epochs: usize,
    pub val_mrr: Option<f64>,
    pub mrr: f64,
    pub hits: f64,
    pub hits_k: usize,
    pub config_hash: String,
    pub build_id: String,
}

fn train_row(ds: &Dataset, method: &str, fold: usize, split: &EdgeSplit, run: &FoldRun, hash: &str) -> TrainRow {
    TrainRow {
        dataset: ds.name.clone(),
        method: method.to_string(),
        fold,
        fold_seed: split.seed,
        best_epoch: run.report.best_epoch,
        epochs: run.report.history.len(),
        val_mrr: run.report.best_val_mrr,
        mrr: run.eval.mrr,
        hits: run.eval.hits,
        hits_k: run.eval.hits_k,
        config_hash: hash.to_string(),
        build_id: build_id().to_string(),
    }
}

#[derive(Serialize)]
struct TrialRow {
    index: usize,
    seed: u64,
    hidden_layers: usize,
    hidden_dim: usize,
    final_dim: usize,
    dropout: f64,
    lr: f64,
    val_mrr: f64,
}

impl From<&Trial> for TrialRow {
    fn from(t: &Trial) -> Self {
        TrialRow {
            index: t.index,
            seed: t.seed,
            hidden_layers: t.params.hidden_layers,
            hidden_dim: t.params.hidden_dim,
            final_dim: t.params.final_dim,
            dropout: t.params.dropout,
            lr: t.params.lr,
            val_mrr: t.val_mrr,
        }
    }
}

/// Random search scored by validation MRR on the first fold; returns the
/// configuration with the best trial applied.
fn search(exp: &Experiment, trials: usize) -> Result<ExperimentConfig> {
    let cfg = &exp.config;
    let split = &exp.splits[0];
    if split.valid_pos.is_empty() {
        return Err(Error::Config("hyperparameter search needs validation edges".into()));
    }
    let protocol = exp.protocol(split);
    let result = model::random_search(&cfg.search, trials, cfg.seed, |hp, seed| {
        let (mut m, mut t) = (cfg.model.clone(), cfg.train.clone());
        hp.apply(&mut m, &mut t);
        let run = train_fold(&exp.dataset, split, &m, &t, &protocol, seed)?;
        Ok(run.report.best_val_mrr.unwrap_or(0.0))
    })?;
    let rows: Vec<TrialRow> = result.trials.iter().map(TrialRow::from).collect();
    write_csv(&exp.out("search.csv"), &rows)?;
    let mut best = cfg.clone();
    result.best.params.apply(&mut best.model, &mut best.train);
    log::info!("search: best trial {} with val MRR {:.4}", result.best.index, result.best.val_mrr);
    Ok(best)
}

/// Trains the configured model on every fold. Writes the resolved
/// `config.json`, `train.csv` and per fold `fold_k/checkpoint.json` and
/// `fold_k/history.csv`; with `search_trials`, runs a random search first
/// and writes `search.csv`.
pub fn cmd_train(cfg: &ExperimentConfig, search_trials: Option<usize>) -> Result<Vec<TrainRow>> {
    let mut exp = Experiment::new(cfg.clone())?;
    if let Some(trials) = search_trials {
        exp.config = search(&exp, trials)?;
    }
    let cfg = &exp.config;
    let hash = cfg.hash();
    let method = method_name(&cfg.model);
    let runs = exp
        .splits
        .par_iter()
        .map(|s| train_fold(&exp.dataset, s, &cfg.model, &cfg.train, &exp.protocol(s), s.seed))
        .collect::<Result<Vec<_>>>()?;
    cfg.write(&exp.out("config.json"))?;
    let mut rows = Vec::with_capacity(runs.len());
    for (k, (split, run)) in exp.splits.iter().zip(&runs).enumerate() {
        let dir = exp.out(&format!("fold_{k}"));
        std::fs::create_dir_all(&dir)?;
        run.model.params().save(&dir.join("checkpoint.json"))?;
        run.report.write_history_csv(BufWriter::new(File::create(dir.join("history.csv"))?))?;
        log::info!("fold {k}: test MRR {:.4}", run.eval.mrr);
        rows.push(train_row(&exp.dataset, &method, k, split, run, &hash));
    }
    write_csv(&exp.out("train.csv"), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AblationAxis {
    Encoder,
    Decoder,
    Labeling,
    Sampling,
    Features,
}

impl AblationAxis {
    pub const ALL: [AblationAxis; 5] = [
        AblationAxis::Encoder,
        AblationAxis::Decoder,
        AblationAxis::Labeling,
        AblationAxis::Sampling,
        AblationAxis::Features,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationAxis::Encoder => "encoder",
            AblationAxis::Decoder => "decoder",
            AblationAxis::Labeling => "labeling",
            AblationAxis::Sampling => "sampling",
            AblationAxis::Features => "features",
        }
    }

    /// The settings swept along this axis, each applied to `base`.
    pub fn variants(self, base: &ExperimentConfig) -> Vec<(String, ExperimentConfig)> {
        let with = |f: &dyn Fn(&mut ExperimentConfig)| {
            let mut c = base.clone();
            f(&mut c);
            c
        };
        match self {
            AblationAxis::Encoder => [EncoderKind::Gcn, EncoderKind::GraphSage, EncoderKind::DirGnn]
                .map(|k| (k.name().to_string(), with(&|c| c.model.encoder.kind = k)))
                .to_vec(),
            AblationAxis::Decoder => DecoderKind::ALL
                .map(|k| {
                    let c = with(&|c| {
                        c.model.decoder.kind = k;
                        if !k.has_mlp() {
                            c.model.structural = StructuralMode::None;
                        }
                    });
                    (k.name().to_string(), c)
                })
                .to_vec(),
            AblationAxis::Labeling => {
                let landmarks = base.model.labels.map_or(2, |l| l.landmarks);
                let mut out = Vec::new();
                for directed in [false, true] {
                    for mode in [LabelMode::DeK(3), LabelMode::DeK(15), LabelMode::DeLog] {
                        let labels = LabelConfig { mode, directed, landmarks };
                        out.push((labels.name(), with(&|c| c.model.labels = Some(labels))));
                    }
                }
                out
            }
            AblationAxis::Sampling => [NegativeMode::Undirected, NegativeMode::Directed]
                .map(|m| {
                    let name = if m == NegativeMode::Directed { "directed" } else { "undirected" };
                    (name.to_string(), with(&|c| c.train.negative_mode = m))
                })
                .to_vec(),
            AblationAxis::Features => [StructuralMode::Undirected, StructuralMode::Directed]
                .map(|m| {
                    let name = if m == StructuralMode::Directed { "directed" } else { "undirected" };
                    (name.to_string(), with(&|c| c.model.structural = m))
                })
                .to_vec(),
        }
    }
}

impl FromStr for AblationAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AblationAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown ablation axis {s:?}")))
    }
}

impl fmt::Display for AblationAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub axis: String,
    pub variant: String,
    pub folds: usize,
    pub mrr_mean: f64,
    pub mrr_std: f64,
    pub hits_mean: f64,
    pub hits_std: f64,
    pub config_hash: String,
    pub build_id: String,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Sweeps one design axis with everything else fixed; writes
/// `ablate_<axis>.csv` (mean ± std per setting) and
/// `ablate_<axis>_folds.csv` (the per-fold rows behind it).
pub fn cmd_ablate(cfg: &ExperimentConfig, axis: AblationAxis) -> Result<Vec<AblationRow>> {
    let exp = Experiment::new(cfg.clone())?;
    let variants = axis.variants(cfg);
    for (name, v) in &variants {
        v.validate()
            .map_err(|e| Error::Config(format!("{axis} setting {name}: {e}")))?;
    }
    let cells: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..exp.splits.len()).map(move |f| (v, f)))
        .collect();
    let fold_rows = cells
        .par_iter()
        .map(|&(v, f)| {
            let (name, vc) = &variants[v];
            let split = &exp.splits[f];
            let run = train_fold(&exp.dataset, split, &vc.model, &vc.train, &exp.protocol(split), split.seed)?;
            log::info!("{axis}={name} fold {f}: test MRR {:.4}", run.eval.mrr);
            Ok(train_row(&exp.dataset, name, f, split, &run, &vc.hash()))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<AblationRow> = variants
        .iter()
        .map(|(name, vc)| {
            let mine: Vec<&TrainRow> = fold_rows.iter().filter(|r| &r.method == name).collect();
            let (mrr_mean, mrr_std) = mean_std(&mine.iter().map(|r| r.mrr).collect::<Vec<_>>());
            let (hits_mean, hits_std) = mean_std(&mine.iter().map(|r| r.hits).collect::<Vec<_>>());
            AblationRow {
                axis: axis.to_string(),
                variant: name.clone(),
                folds: mine.len(),
                mrr_mean,
                mrr_std,
                hits_mean,
                hits_std,
                config_hash: vc.hash(),
                build_id: build_id().to_string(),
            }
        })
        .collect();
    cfg.write(&exp.out("config.json"))?;
    write_csv(&exp.out(&format!("ablate_{axis}_folds.csv")), &fold_rows)?;
    write_csv(&exp.out(&format!("ablate_{axis}.csv")), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub dataset: String,
    pub method: String,
    pub fold: usize,
    pub fold_seed: u64,
    pub mrr: f64,
    pub hits: f64,
    pub hits_k: usize,
    pub candidates: usize,
    pub tie_policy: TiePolicy,
}

/// Re-scores a fold's test edges from a saved checkpoint (default
/// `fold_<fold>/checkpoint.json` under the output directory). Writes
/// `eval_fold_<fold>.json` and the per-edge ranks in `eval_fold_<fold>_ranks.csv`.
pub fn cmd_evaluate(cfg: &ExperimentConfig, checkpoint: Option<&Path>, fold: usize) -> Result<EvalSummary> {
    let exp = Experiment::new(cfg.clone())?;
    let split = exp
        .splits
        .get(fold)
        .ok_or_else(|| Error::Config(format!("fold {fold} out of range ({} folds)", exp.splits.len())))?;
    let path = checkpoint.map_or_else(|| exp.out(&format!("fold_{fold}/checkpoint.json")), Path::to_path_buf);
    let ctx = GraphContext::new(split.train_graph(exp.dataset.graph.num_nodes())?, exp.dataset.features.as_ref(), &cfg.model)?;
    let mut model = LinkPredictor::new(cfg.model.clone(), Arc::new(ctx), split.seed)?;
    model.params_mut().load_into(&path)?;
    let protocol = exp.protocol(split);
    let report = model.evaluate(&split.test_pos, &exp.dataset.graph, &protocol)?;
    let ranks = exp.out(&format!("eval_fold_{fold}_ranks.csv"));
    super::ensure_parent(&ranks)?;
    report.write_rank_csv(BufWriter::new(File::create(&ranks)?))?;
    let summary = EvalSummary {
        dataset: exp.dataset.name.clone(),
        method: method_name(&cfg.model),
        fold,
        fold_seed: split.seed,
        mrr: report.mrr,
        hits: report.hits,
        hits_k: report.hits_k,
        candidates: protocol.candidates,
        tie_policy: protocol.tie_policy,
    };
    write_json(&exp.out(&format!("eval_fold_{fold}.json")), &summary)?;
    Ok(summary)
}

/// Runs the oracle suite; writes `verify.json` when `out` is given.
pub fn cmd_verify(seed: u64, out: Option<&Path>) -> Result<VerifyReport> {
    let report = verify::run_all(seed)?;
    if let Some(dir) = out {
        write_json(&dir.join("verify.json"), &report)?;
    }
    Ok(report)
}
