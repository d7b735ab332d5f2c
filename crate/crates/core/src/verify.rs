//! Built-in oracle suite: dense brute-force references for the sparse code
//! paths, gradient checks, metric fixtures and sampling invariants.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::autodiff::{self, GradcheckReport, Init, ParamStore, SparseRows, Tape, Tensor};
use crate::digraph::{DirectedGraph, Direction, Edge, NodeFeatures};
use crate::error::Result;
use crate::eval::{self, EvalProtocol, TiePolicy};
use crate::featurize::{self, DirectionalitySequence, LabelMode};
use crate::heuristics::{Family, HeuristicSpec, Heuristics, Variant};
use crate::model::{DecoderKind, EncoderKind, GraphContext, LabelConfig, LinkPredictor, ModelConfig, StructuralMode};
use crate::rng;
use crate::sampling::{self, NegativeMode, SplitRatios};

/// Relative tolerance of every gradient check.
pub const GRAD_TOL: f64 = 1e-4;
/// Agreement required between sparse scores and dense references.
pub const FLOAT_TOL: f64 = 1e-12;

/// Dense reference implementations. Deliberately naive: adjacency matrices,
/// explicit loops and no shared code with the sparse paths.
pub mod oracle {
    use super::*;

    pub struct Dense {
        pub n: usize,
        pub a: Vec<Vec<bool>>,
    }

    impl Dense {
        pub fn new(g: &DirectedGraph) -> Self {
            let n = g.num_nodes();
            let mut a = vec![vec![false; n]; n];
            for &(u, v) in g.edges() {
                a[u][v] = true;
            }
            Dense { n, a }
        }

        fn sym(&self, i: usize, j: usize) -> bool {
            self.a[i][j] || self.a[j][i]
        }

        fn walks(&self, len: usize, u: usize, v: usize, symmetric: bool) -> f64 {
            let step = |i: usize, j: usize| if symmetric { self.sym(i, j) } else { self.a[i][j] };
            let mut row = vec![0.0; self.n];
            row[u] = 1.0;
            for _ in 0..len {
                let mut next = vec![0.0; self.n];
                for i in 0..self.n {
                    for j in 0..self.n {
                        if step(i, j) {
                            next[j] += row[i];
                        }
                    }
                }
                row = next;
            }
            row[v]
        }

        pub fn sym_degree(&self, t: usize) -> usize {
            (0..self.n).filter(|&x| x != t && self.sym(t, x)).count()
        }

        fn member(&self, u: usize, t: usize, dir: Direction) -> bool {
            match dir {
                Direction::Out => self.a[u][t],
                Direction::In => self.a[t][u],
            }
        }

        pub fn score(&self, spec: &HeuristicSpec, u: usize, v: usize) -> f64 {
            match spec.family {
                Family::Lp => {
                    let s = spec.variant == Variant::Sym;
                    self.walks(2, u, v, s) + spec.epsilon * self.walks(3, u, v, s)
                }
                Family::Ra | Family::Aa => {
                    let mut total = 0.0;
                    for t in 0..self.n {
                        let common = match spec.variant.directions() {
                            None => self.sym(u, t) && self.sym(v, t),
                            Some((du, dv)) => self.member(u, t, du) && self.member(v, t, dv),
                        };
                        if !common {
                            continue;
                        }
                        let d = self.sym_degree(t) as f64;
                        total += match spec.family {
                            Family::Ra => 1.0 / d,
                            _ if d > 1.0 => 1.0 / d.ln(),
                            _ => 0.0,
                        };
                    }
                    total
                }
            }
        }

        /// Indicator-vector propagation of `{u}` along `steps`.
        pub fn sequence_neighborhood(&self, u: usize, steps: &[Direction]) -> Vec<usize> {
            let mut x = vec![false; self.n];
            x[u] = true;
            for &d in steps {
                let mut y = vec![false; self.n];
                for i in 0..self.n {
                    for j in 0..self.n {
                        if x[i] && self.member(i, j, d) {
                            y[j] = true;
                        }
                    }
                }
                x = y;
            }
            (0..self.n).filter(|&i| x[i]).collect()
        }

        /// Symmetrized hop distances from `u` by relaxation.
        fn distances(&self, u: usize) -> Vec<usize> {
            let mut d = vec![usize::MAX; self.n];
            d[u] = 0;
            for _ in 0..self.n {
                for i in 0..self.n {
                    for j in 0..self.n {
                        if self.sym(i, j) && d[i] != usize::MAX && d[i] + 1 < d[j] {
                            d[j] = d[i] + 1;
                        }
                    }
                }
            }
            d
        }

        pub fn directed_features(&self, u: usize, v: usize, radius: usize) -> Vec<f64> {
            let seqs = sequences(radius);
            let nu: Vec<Vec<usize>> = seqs.iter().map(|s| self.sequence_neighborhood(u, s)).collect();
            let nv: Vec<Vec<usize>> = seqs.iter().map(|s| self.sequence_neighborhood(v, s)).collect();
            let count = |a: &[usize], b: &[usize], union: bool| {
                (0..self.n)
                    .filter(|x| {
                        let (p, q) = (a.contains(x), b.contains(x));
                        if union { p || q } else { p && q }
                    })
                    .count() as f64
            };
            let mut z = Vec::new();
            for union in [true, false] {
                for a in &nu {
                    for b in &nv {
                        z.push(count(a, b, union));
                    }
                }
            }
            z.extend(nu.iter().map(|s| s.len() as f64));
            z.extend(nv.iter().map(|s| s.len() as f64));
            z
        }

        pub fn undirected_features(&self, u: usize, v: usize, radius: usize) -> Vec<f64> {
            let (du, dv) = (self.distances(u), self.distances(v));
            let mut union = Vec::new();
            let mut inter = Vec::new();
            let mut left = Vec::new();
            let mut right = Vec::new();
            for k in 1..=radius {
                let (mut un, mut it, mut l, mut r) = (0.0, 0.0, 0.0, 0.0);
                for x in 0..self.n {
                    let (p, q) = (du[x] == k, dv[x] == k);
                    un += f64::from(u8::from(p || q));
                    it += f64::from(u8::from(p && q));
                    l += f64::from(u8::from(p));
                    r += f64::from(u8::from(q));
                }
                union.push(un);
                inter.push(it);
                left.push(l);
                right.push(r);
            }
            [union, inter, left, right].concat()
        }
    }

    /// Every in/out sequence of length `1..=max_len`, shorter first, `in`
    /// before `out` position by position.
    pub fn sequences(max_len: usize) -> Vec<Vec<Direction>> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            for code in 0..(1usize << len) {
                out.push(
                    (0..len)
                        .map(|i| if code >> (len - 1 - i) & 1 == 1 { Direction::Out } else { Direction::In })
                        .collect(),
                );
            }
        }
        out
    }

    pub fn rank(pos: f64, negs: &[f64], tie: TiePolicy) -> f64 {
        let mut above = 0.0;
        let mut ties = 0.0;
        for &s in negs {
            if s > pos {
                above += 1.0;
            } else if s == pos {
                ties += 1.0;
            }
        }
        1.0 + above
            + match tie {
                TiePolicy::Optimistic => 0.0,
                TiePolicy::Mid => ties / 2.0,
                TiePolicy::Pessimistic => ties,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub module: String,
    pub case: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(module: &str, case: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            module: module.into(),
            case: case.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{status} {}::{}", self.module, self.case)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Erdős–Rényi digraph without self-loops.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    let mut r = rng::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && r.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(DirectedGraph::from_edges(n, edges)?.0)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TOL * 1f64.max(b.abs())
}

fn grad_check(case: &str, report: GradcheckReport) -> Check {
    Check::new(
        "autodiff",
        case,
        report.passed(GRAD_TOL),
        format!("{} entries, max rel err {:.2e}", report.entries, report.max_rel_err),
    )
}

fn random_tensor(r: &mut rng::Rng, rows: usize, cols: usize) -> Tensor {
    Tensor::new(rows, cols, (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect()).expect("sized")
}

type Case<'a> = Box<dyn Fn(&mut Tape, [autodiff::Var; 4]) -> autodiff::Var + 'a>;

/// Central-difference checks of every tape primitive.
pub fn primitive_gradchecks(seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::rng(seed);
    let mut store = ParamStore::new(seed);
    let a = store.add_init("a", 4, 3, Init::Glorot)?;
    let b = store.add_init("b", 3, 5, Init::Glorot)?;
    let c = store.add_init("c", 4, 3, Init::Glorot)?;
    let bias = store.add("bias", random_tensor(&mut r, 1, 3))?;
    let weights = random_tensor(&mut r, 4, 3);
    let sparse = Arc::new(SparseRows::new(4, &[vec![(0, 0.5), (2, -1.5)], vec![], vec![(3, 2.0), (1, 0.25)], vec![(0, 1.0)]])?);
    let mean = Arc::new(SparseRows::mean(4, &[&[1, 2], &[], &[0, 1, 3]])?);
    let idx = Arc::new(vec![3, 0, 0, 2, 1]);
    let rows = Arc::new((0..12).map(|i| i % 4).collect::<Vec<_>>());
    let targets = Arc::new((0..12).map(|i| f64::from(u8::from(i % 3 != 1))).collect::<Vec<_>>());

    // Squares the result so that every primitive sees a non-constant upstream gradient.
    fn square_sum(t: &mut Tape, y: autodiff::Var) -> autodiff::Var {
        let y = t.mul(y, y);
        t.sum_all(y)
    }
    let cases: Vec<(&str, Case)> = vec![
        ("matmul", Box::new(|t, [a, b, _, _]| {
            let y = t.matmul(a, b);
            square_sum(t, y)
        })),
        ("add", Box::new(|t, [a, _, c, _]| {
            let y = t.add(a, c);
            square_sum(t, y)
        })),
        ("add_bias", Box::new(|t, [a, _, _, bias]| {
            let y = t.add_bias(a, bias);
            square_sum(t, y)
        })),
        ("mul", Box::new(|t, [a, _, c, _]| {
            let y = t.mul(a, c);
            t.sum_all(y)
        })),
        ("scale", Box::new(|t, [a, ..]| {
            let y = t.scale(a, -2.5);
            square_sum(t, y)
        })),
        ("concat", Box::new(|t, [a, b, c, _]| {
            let ab = t.matmul(a, b);
            let y = t.concat(&[a, ab, c]);
            square_sum(t, y)
        })),
        ("relu", Box::new(|t, [a, _, c, _]| {
            let y = t.relu(a);
            let y = t.mul(y, c);
            t.sum_all(y)
        })),
        ("sigmoid", Box::new(|t, [a, ..]| {
            let y = t.sigmoid(a);
            square_sum(t, y)
        })),
        ("dropout", Box::new(|t, [a, ..]| {
            let y = t.dropout(a, 0.4, &mut rng::rng(seed));
            square_sum(t, y)
        })),
        ("spmm", Box::new(|t, [a, ..]| {
            let y = t.spmm(&sparse, a);
            square_sum(t, y)
        })),
        ("spmm_mean", Box::new(|t, [a, ..]| {
            let y = t.spmm(&mean, a);
            square_sum(t, y)
        })),
        ("gather", Box::new(|t, [a, ..]| {
            let y = t.gather(a, &idx);
            square_sum(t, y)
        })),
        ("sum_all", Box::new(|t, [a, ..]| {
            let w = t.constant(weights.clone());
            let y = t.mul(a, w);
            t.sum_all(y)
        })),
        ("bce_with_logits", Box::new(|t, [a, ..]| {
            let ones = t.constant(Tensor::filled(3, 1, 1.0));
            let y = t.matmul(a, ones);
            let y = t.scale(y, 3.0);
            let logits = t.gather(y, &rows);
            t.bce_with_logits(logits, &targets)
        })),
    ];
    cases
        .into_iter()
        .map(|(name, f)| {
            let report = autodiff::gradcheck_tape(&store, 1e-6, |t, s| {
                let vars = [a, b, c, bias].map(|id| t.param(s, id));
                Ok(f(t, vars))
            })?;
            Ok(grad_check(name, report))
        })
        .collect()
}


fn small(mut cfg: ModelConfig, dropout: f64) -> ModelConfig {
    cfg.encoder.hidden_dim = 8;
    cfg.encoder.out_dim = 6;
    cfg.encoder.dropout = dropout;
    cfg.decoder.hidden_dims = vec![8];
    cfg.decoder.dropout = dropout;
    cfg.radius = 2;
    cfg
}

/// The three model configurations used for end-to-end gradient checks.
pub fn gradcheck_networks() -> Vec<(&'static str, ModelConfig)> {
    let mut dirlp = small(ModelConfig::dirlp(), 0.2);
    dirlp.labels = Some(LabelConfig { mode: LabelMode::DeK(3), directed: true, landmarks: 2 });
    let mut sage = small(ModelConfig::baseline(EncoderKind::GraphSage, DecoderKind::Mhmlp), 0.1);
    sage.structural = StructuralMode::Undirected;
    let mut gcn = small(ModelConfig::baseline(EncoderKind::Gcn, DecoderKind::Mdp), 0.0);
    gcn.encoder.hidden_layers = 2;
    gcn.labels = Some(LabelConfig { mode: LabelMode::DeLog, directed: false, landmarks: 2 });
    vec![("dirgnn_cmlp", dirlp), ("graphsage_mhmlp", sage), ("gcn_mdp", gcn)]
}

/// Gradient check of the full training loss of a freshly initialised model
/// on a random 12-node digraph, dropout included.
pub fn network_gradcheck(cfg: &ModelConfig, seed: u64) -> Result<GradcheckReport> {
    let g = random_digraph(12, 0.2, seed)?;
    let mut r = rng::rng(seed);
    let feats = NodeFeatures::new(12, 3, (0..36).map(|_| r.gen_range(-1.0..1.0)).collect())?;
    let ctx = GraphContext::new(g.clone(), Some(&feats), cfg)?;
    let model = LinkPredictor::new(cfg.clone(), Arc::new(ctx), seed)?;
    let pos: Vec<Edge> = g.edges().iter().copied().take(8).collect();
    let neg = sampling::sample_negatives(&g, 8, NegativeMode::Directed, seed, &HashSet::new())?.edges;
    let drop_seed = rng::derive_seed(seed, &[7]);
    let (_, grads) = model.loss_and_grads(&pos, &neg, Some(&mut rng::rng(drop_seed)))?;
    autodiff::gradcheck(model.params(), &grads, 1e-6, |s| {
        Ok(model.loss_with_params(s, &pos, &neg, Some(&mut rng::rng(drop_seed)))?.0)
    })
}

pub fn gradient_suite(seed: u64) -> Result<Vec<Check>> {
    let mut checks = primitive_gradchecks(seed)?;
    for (i, (name, cfg)) in gradcheck_networks().into_iter().enumerate() {
        checks.push(grad_check(name, network_gradcheck(&cfg, rng::derive_seed(seed, &[i as u64]))?));
    }
    Ok(checks)
}

/// All heuristic specs with a default epsilon.
pub fn all_heuristic_specs() -> Vec<HeuristicSpec> {
    let mut specs = vec![
        HeuristicSpec::new(Family::Lp, Variant::Sym).expect("valid"),
        HeuristicSpec::new(Family::Lp, Variant::Asym).expect("valid"),
    ];
    for fam in [Family::Ra, Family::Aa] {
        for var in [Variant::Sym, Variant::InIn, Variant::InOut, Variant::OutIn, Variant::OutOut] {
            specs.push(HeuristicSpec::new(fam, var).expect("valid"));
        }
    }
    specs
}

/// Compares heuristics, sequence neighborhoods, structural features and
/// `evaluate` with the dense references on one graph. Returns the first
/// disagreement per component.
pub fn compare_with_oracles(g: &DirectedGraph, radius: usize, seed: u64) -> Result<Vec<(String, Option<String>)>> {
    let d = oracle::Dense::new(g);
    let n = g.num_nodes();
    let h = Heuristics::new(g);
    let mut out = Vec::new();

    let mut bad = None;
    'h: for spec in all_heuristic_specs() {
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                let (s, o) = (h.score(&spec, u, v)?, d.score(&spec, u, v));
                if !close(s, o) {
                    bad = Some(format!("{spec} ({u},{v}): {s} vs {o}"));
                    break 'h;
                }
            }
        }
    }
    out.push(("heuristics".to_string(), bad));

    let mut bad = None;
    'n: for steps in oracle::sequences(3) {
        let seq = DirectionalitySequence::new(steps.clone())?;
        for u in 0..n {
            let (s, o) = (featurize::sequence_neighborhood(g, u, &seq)?, d.sequence_neighborhood(u, &steps));
            if s != o {
                bad = Some(format!("N_{seq}({u}): {s:?} vs {o:?}"));
                break 'n;
            }
        }
    }
    out.push(("sequence_neighborhoods".to_string(), bad));

    let mut bad = None;
    'f: for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            let z = featurize::edge_features(g, u, v, radius)?;
            let (dz, uz) = (d.directed_features(u, v, radius), d.undirected_features(u, v, radius));
            if z.z_dir != dz || z.z_undir != uz {
                bad = Some(format!("z({u},{v}) differs"));
                break 'f;
            }
        }
    }
    out.push(("structural_features".to_string(), bad));

    let mut bad = None;
    if g.num_edges() > 0 && n > 2 {
        let spec = HeuristicSpec::new(Family::Ra, Variant::Sym)?;
        let protocol = EvalProtocol { candidates: 5, seed, ..EvalProtocol::default() };
        let positives = g.edges();
        let report = eval::evaluate(|p| h.score_pairs(&spec, p), positives, g, &protocol)?;
        let mut recip = 0.0;
        for (i, &(u, v)) in positives.iter().enumerate() {
            let cands = sampling::eval_candidates(g, (u, v), protocol.candidates, protocol.seed)?;
            let negs: Vec<f64> = cands.candidates.iter().map(|&(a, b)| d.score(&spec, a, b)).collect();
            let rank = oracle::rank(d.score(&spec, u, v), &negs, protocol.tie_policy);
            recip += 1.0 / rank;
            if report.per_edge[i].rank != rank {
                bad = Some(format!("rank of ({u},{v}): {} vs {rank}", report.per_edge[i].rank));
                break;
            }
        }
        let mrr = recip / positives.len() as f64;
        if bad.is_none() && !close(report.mrr, mrr) {
            bad = Some(format!("mrr {} vs {mrr}", report.mrr));
        }
    }
    out.push(("evaluate".to_string(), bad));
    Ok(out)
}

/// [`compare_with_oracles`] over `graphs` random digraphs of 2 to
/// `max_nodes` nodes with varied densities.
pub fn brute_force_suite(graphs: usize, max_nodes: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::rng(seed);
    let mut failures: Vec<Option<String>> = vec![None; 4];
    let mut names = Vec::new();
    for i in 0..graphs {
        let n = r.gen_range(2..=max_nodes.max(2));
        let p = r.gen_range(0.05..0.5);
        let g = random_digraph(n, p, rng::derive_seed(seed, &[i as u64]))?;
        let radius = if n <= 12 { 3 } else { 2 };
        let results = compare_with_oracles(&g, radius, seed)?;
        names = results.iter().map(|(name, _)| name.clone()).collect();
        for (slot, (_, bad)) in failures.iter_mut().zip(results) {
            if slot.is_none() {
                *slot = bad.map(|b| format!("graph {i} (n={n}): {b}"));
            }
        }
    }
    Ok(names
        .into_iter()
        .zip(failures)
        .map(|(name, bad)| {
            let detail = bad.clone().unwrap_or_else(|| format!("{graphs} graphs"));
            Check::new("oracle", name, bad.is_none(), detail)
        })
        .collect())
}

pub fn metric_suite() -> Result<Vec<Check>> {
    let m = eval::mrr(&[1.0, 2.0, 4.0])?;
    let hits = eval::hits_at_k(&[20.0, 21.0], 20)?;
    let c = 9;
    let constant = eval::rank_of_positive(0.5, &vec![0.5; c], TiePolicy::Mid)?;
    let expected = 1.0 / (1.0 + c as f64 / 2.0);
    Ok(vec![
        Check::new("eval", "mrr_fixture", m == 7.0 / 12.0, format!("{m}")),
        Check::new("eval", "hits_inclusive", hits == 0.5, format!("{hits}")),
        Check::new(
            "eval",
            "constant_scorer_mid",
            eval::mrr(&[constant])? == expected,
            format!("{}", 1.0 / constant),
        ),
    ])
}

pub fn expressivity_suite() -> Result<Vec<Check>> {
    let r = eval::expressivity_check_k4()?;
    Ok(vec![Check::new(
        "eval",
        "expressivity_k4",
        r.passed(),
        format!("L|R {:?} vs {:?}", r.lr_prefix_01, r.lr_prefix_03),
    )])
}

pub fn sampling_suite(seed: u64) -> Result<Vec<Check>> {
    let g = random_digraph(30, 0.15, seed)?;
    let splits = sampling::make_splits(&g, SplitRatios::default(), seed, 3)?;
    let partition = splits.iter().all(|s| {
        let mut all: Vec<Edge> = s.train_pos.iter().chain(&s.valid_pos).chain(&s.test_pos).copied().collect();
        all.sort_unstable();
        all == g.edges()
    });
    let mut negatives_ok = true;
    for mode in [NegativeMode::Directed, NegativeMode::Undirected] {
        let neg = sampling::sample_negatives(&g, 50, mode, seed, &HashSet::new())?;
        let distinct: HashSet<Edge> = neg.edges.iter().copied().collect();
        negatives_ok &= distinct.len() == neg.edges.len()
            && neg.edges.iter().all(|&(u, v)| {
                u != v && !g.has_edge(u, v) && (mode == NegativeMode::Directed || !g.has_edge(v, u))
            });
    }
    let mut candidates_ok = true;
    for &(u, v) in g.edges().iter().take(20) {
        let c = sampling::eval_candidates(&g, (u, v), 10, seed)?;
        let distinct: HashSet<Edge> = c.candidates.iter().copied().collect();
        candidates_ok &= distinct.len() == c.candidates.len()
            && c.candidates.iter().all(|&(a, w)| a == u && w != v && w != u && !g.has_edge(u, w))
            && (c.shortfall || c.candidates.len() == 10);
    }
    Ok(vec![
        Check::new("sampling", "splits_partition_edges", partition, ""),
        Check::new("sampling", "negatives_are_non_edges", negatives_ok, ""),
        Check::new("sampling", "candidates_are_filtered", candidates_ok, ""),
    ])
}

/// Every suite, with 50 random graphs of at most 25 nodes.
pub fn run_all(seed: u64) -> Result<VerifyReport> {
    let mut checks = gradient_suite(seed)?;
    checks.extend(brute_force_suite(50, 25, seed)?);
    checks.extend(metric_suite()?);
    checks.extend(expressivity_suite()?);
    checks.extend(sampling_suite(seed)?);
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_sequences_match_canonical_order() {
        let names: Vec<String> = featurize::canonical_sequences(2).iter().map(|s| s.to_string()).collect();
        let ours: Vec<String> = oracle::sequences(2)
            .iter()
            .map(|s| DirectionalitySequence::new(s.clone()).unwrap().to_string())
            .collect();
        assert_eq!(names, ours);
    }

    #[test]
    fn oracle_knows_g1() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)]).unwrap().0;
        let d = oracle::Dense::new(&g);
        let lp = HeuristicSpec::new(Family::Lp, Variant::Asym).unwrap();
        assert!((d.score(&lp, 1, 3) - 0.001).abs() < 1e-15);
        let ra = HeuristicSpec::new(Family::Ra, Variant::Sym).unwrap();
        assert!((d.score(&ra, 1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.undirected_features(1, 3, 1), vec![2.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn suites_pass_on_a_small_budget() {
        let mut checks = brute_force_suite(5, 10, 3).unwrap();
        checks.extend(metric_suite().unwrap());
        checks.extend(sampling_suite(3).unwrap());
        checks.extend(primitive_gradchecks(3).unwrap());
        for c in &checks {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn a_broken_check_is_reported() {
        let report = VerifyReport {
            checks: vec![Check::new("m", "a", true, ""), Check::new("m", "b", false, "boom")],
        };
        assert!(!report.passed());
        assert_eq!(report.failures().map(|c| c.to_string()).collect::<Vec<_>>(), ["FAIL m::b (boom)"]);
    }
}
