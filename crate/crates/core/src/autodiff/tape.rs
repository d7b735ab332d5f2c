use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::{ParamId, ParamStore, Tensor};
use crate::error::{Error, Result};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

/// Row-sparse weighted aggregation matrix: `out[i] = Σ_k w_ik · x[idx_ik]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows {
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseRows {
    /// `rows[i]` lists `(column, weight)` entries of row `i`.
    pub fn new(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        for row in rows {
            for &(j, w) in row {
                if j >= cols {
                    return Err(Error::Shape(format!("column {j} out of range {cols}")));
                }
                indices.push(j);
                weights.push(w);
            }
            offsets.push(indices.len());
        }
        Ok(SparseRows {
            cols,
            offsets,
            indices,
            weights,
        })
    }

    /// Row-mean over `groups[i]`; an empty group yields a zero row.
    pub fn mean(cols: usize, groups: &[&[usize]]) -> Result<Self> {
        let rows: Vec<Vec<(usize, f64)>> = groups
            .iter()
            .map(|g| {
                let w = 1.0 / g.len().max(1) as f64;
                g.iter().map(|&j| (j, w)).collect()
            })
            .collect();
        SparseRows::new(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddBias(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Concat(Vec<Var>),
    Relu(Var),
    Sigmoid(Var),
    Dropout(Var, Vec<f64>),
    SpMM(Arc<SparseRows>, Var),
    Gather(Var, Arc<Vec<usize>>),
    SumAll(Var),
    Bce(Var, Arc<Vec<f64>>),
}

struct Node {
    value: Tensor,
    op: Op,
    requires_grad: bool,
}

/// Records operations in order; [`backward`](Tape::backward) walks them in
/// reverse. Non-finite values are reported as [`Error::Numeric`] when the
/// loss is read or differentiated.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    params: Vec<(ParamId, Var)>,
    grads: Vec<Option<Tensor>>,
    fault: Option<String>,
    differentiated: bool,
}

fn matmul(a: &Tensor, b: &Tensor) -> Tensor {
    let (n, k, m) = (a.rows, a.cols, b.cols);
    let mut out = vec![0.0; n * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, row)| {
        for p in 0..k {
            let x = a.data[i * k + p];
            if x != 0.0 {
                for (o, y) in row.iter_mut().zip(&b.data[p * m..(p + 1) * m]) {
                    *o += x * y;
                }
            }
        }
    });
    Tensor {
        rows: n,
        cols: m,
        data: out,
    }
}

/// `aᵀ · b`.
fn matmul_tn(a: &Tensor, b: &Tensor) -> Tensor {
    let (n, k, m) = (a.rows, a.cols, b.cols);
    let mut out = vec![0.0; k * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(p, row)| {
        for i in 0..n {
            let x = a.data[i * k + p];
            if x != 0.0 {
                for (o, y) in row.iter_mut().zip(&b.data[i * m..(i + 1) * m]) {
                    *o += x * y;
                }
            }
        }
    });
    Tensor {
        rows: k,
        cols: m,
        data: out,
    }
}

/// `a · bᵀ`.
fn matmul_nt(a: &Tensor, b: &Tensor) -> Tensor {
    let (n, k, m) = (a.rows, a.cols, b.rows);
    let mut out = vec![0.0; n * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, row)| {
        let ai = &a.data[i * k..(i + 1) * k];
        for (j, o) in row.iter_mut().enumerate() {
            *o = ai.iter().zip(&b.data[j * k..(j + 1) * k]).map(|(x, y)| x * y).sum();
        }
    });
    Tensor {
        rows: n,
        cols: m,
        data: out,
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn map(t: &Tensor, f: impl Fn(f64) -> f64) -> Tensor {
    Tensor {
        rows: t.rows,
        cols: t.cols,
        data: t.data.iter().map(|&x| f(x)).collect(),
    }
}

fn zip(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    Tensor {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    /// Clears all recorded values so the tape can be reused.
    pub fn reset(&mut self) {
        self.nodes.clear();
        self.params.clear();
        self.grads.clear();
        self.fault = None;
        self.differentiated = false;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        if self.fault.is_none() && !value.is_finite() {
            self.fault = Some(format!("non-finite output of {op:?}"));
        }
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn rg(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// The 1×1 value of `v`, failing if any recorded value is non-finite.
    pub fn scalar(&self, v: Var) -> Result<f64> {
        if let Some(f) = &self.fault {
            return Err(Error::Numeric(f.clone()));
        }
        let t = self.value(v);
        if t.shape() != (1, 1) {
            return Err(Error::Shape(format!("expected scalar, got {:?}", t.shape())));
        }
        Ok(t.data[0])
    }

    pub fn check_finite(&self) -> Result<()> {
        match &self.fault {
            Some(f) => Err(Error::Numeric(f.clone())),
            None => Ok(()),
        }
    }

    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf, false)
    }

    /// Records the current value of a parameter as a differentiable leaf.
    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> Var {
        let v = self.push(store.get(id).clone(), Op::Leaf, true);
        self.params.push((id, v));
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.cols, tb.rows, "matmul {:?} x {:?}", ta.shape(), tb.shape());
        let out = matmul(ta, tb);
        let rg = self.rg(&[a, b]);
        self.push(out, Op::MatMul(a, b), rg)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape(), tb.shape(), "add shape mismatch");
        let out = zip(ta, tb, |x, y| x + y);
        let rg = self.rg(&[a, b]);
        self.push(out, Op::Add(a, b), rg)
    }

    /// Adds the `1×c` row `bias` to every row of `a`.
    pub fn add_bias(&mut self, a: Var, bias: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(bias));
        assert_eq!((1, ta.cols), tb.shape(), "bias shape mismatch");
        let mut out = ta.clone();
        for row in out.data.chunks_mut(ta.cols.max(1)) {
            for (o, b) in row.iter_mut().zip(&tb.data) {
                *o += b;
            }
        }
        let rg = self.rg(&[a, bias]);
        self.push(out, Op::AddBias(a, bias), rg)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape(), tb.shape(), "mul shape mismatch");
        let out = zip(ta, tb, |x, y| x * y);
        let rg = self.rg(&[a, b]);
        self.push(out, Op::Mul(a, b), rg)
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let out = map(self.value(a), |x| c * x);
        let rg = self.rg(&[a]);
        self.push(out, Op::Scale(a, c), rg)
    }

    /// Column-wise concatenation.
    pub fn concat(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat of nothing");
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for &p in parts {
                let t = self.value(p);
                assert_eq!(t.rows, rows, "concat row mismatch");
                data.extend_from_slice(t.row(i));
            }
        }
        let rg = self.rg(parts);
        self.push(Tensor { rows, cols, data }, Op::Concat(parts.to_vec()), rg)
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = map(self.value(a), |x| x.max(0.0));
        let rg = self.rg(&[a]);
        self.push(out, Op::Relu(a), rg)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = map(self.value(a), sigmoid);
        let rg = self.rg(&[a]);
        self.push(out, Op::Sigmoid(a), rg)
    }

    /// Inverted dropout: kept entries are scaled by `1 / (1 - p)`.
    pub fn dropout<R: Rng>(&mut self, a: Var, p: f64, rng: &mut R) -> Var {
        if p <= 0.0 {
            return a;
        }
        let keep = 1.0 / (1.0 - p);
        let t = self.value(a);
        let mask: Vec<f64> = (0..t.data.len())
            .map(|_| if rng.gen::<f64>() < p { 0.0 } else { keep })
            .collect();
        let out = Tensor {
            rows: t.rows,
            cols: t.cols,
            data: t.data.iter().zip(&mask).map(|(x, m)| x * m).collect(),
        };
        let rg = self.rg(&[a]);
        self.push(out, Op::Dropout(a, mask), rg)
    }

    pub fn spmm(&mut self, s: &Arc<SparseRows>, x: Var) -> Var {
        let t = self.value(x);
        assert_eq!(s.cols, t.rows, "spmm shape mismatch");
        let c = t.cols;
        let mut data = vec![0.0; s.rows() * c];
        data.par_chunks_mut(c.max(1)).enumerate().for_each(|(i, row)| {
            for (j, w) in s.row(i) {
                for (o, y) in row.iter_mut().zip(t.row(j)) {
                    *o += w * y;
                }
            }
        });
        let out = Tensor {
            rows: s.rows(),
            cols: c,
            data,
        };
        let rg = self.rg(&[x]);
        self.push(out, Op::SpMM(Arc::clone(s), x), rg)
    }

    /// Rows `idx[k]` of `x`, in order.
    pub fn gather(&mut self, x: Var, idx: &Arc<Vec<usize>>) -> Var {
        let t = self.value(x);
        let mut data = Vec::with_capacity(idx.len() * t.cols);
        for &i in idx.iter() {
            assert!(i < t.rows, "gather index {i} out of {} rows", t.rows);
            data.extend_from_slice(t.row(i));
        }
        let out = Tensor {
            rows: idx.len(),
            cols: t.cols,
            data,
        };
        let rg = self.rg(&[x]);
        self.push(out, Op::Gather(x, Arc::clone(idx)), rg)
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let s = self.value(a).data.iter().sum();
        let rg = self.rg(&[a]);
        self.push(Tensor::new(1, 1, vec![s]).unwrap(), Op::SumAll(a), rg)
    }

    /// Mean binary cross-entropy of an `n×1` column of logits, computed in the
    /// stable form `max(x, 0) - x·y + ln(1 + e^{-|x|})`.
    pub fn bce_with_logits(&mut self, logits: Var, targets: &Arc<Vec<f64>>) -> Var {
        let t = self.value(logits);
        assert_eq!(t.shape(), (targets.len(), 1), "bce shape mismatch");
        let n = targets.len().max(1) as f64;
        let loss: f64 = t
            .data
            .iter()
            .zip(targets.iter())
            .map(|(&x, &y)| x.max(0.0) - x * y + (-x.abs()).exp().ln_1p())
            .sum::<f64>()
            / n;
        let rg = self.rg(&[logits]);
        self.push(
            Tensor::new(1, 1, vec![loss]).unwrap(),
            Op::Bce(logits, Arc::clone(targets)),
            rg,
        )
    }

    fn accumulate(grads: &mut [Option<Tensor>], v: Var, g: Tensor) {
        match &mut grads[v.0] {
            Some(acc) => acc.add_assign(&g),
            slot => *slot = Some(g),
        }
    }

    /// Propagates gradients from the scalar `loss`. Fails on a second call
    /// without an intervening [`reset`](Tape::reset).
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.differentiated {
            return Err(Error::Contract("backward called twice on one tape".into()));
        }
        self.scalar(loss)?;
        self.differentiated = true;
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Tensor::filled(1, 1, 1.0));
        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            let val = |v: Var| &self.nodes[v.0].value;
            let wants = |v: Var| self.nodes[v.0].requires_grad;
            match &node.op {
                Op::Leaf => {
                    grads[idx] = Some(g);
                    continue;
                }
                Op::MatMul(a, b) => {
                    if wants(*a) {
                        Self::accumulate(&mut grads, *a, matmul_nt(&g, val(*b)));
                    }
                    if wants(*b) {
                        Self::accumulate(&mut grads, *b, matmul_tn(val(*a), &g));
                    }
                }
                Op::Add(a, b) => {
                    if wants(*a) {
                        Self::accumulate(&mut grads, *a, g.clone());
                    }
                    if wants(*b) {
                        Self::accumulate(&mut grads, *b, g);
                    }
                }
                Op::AddBias(a, b) => {
                    if wants(*b) {
                        let mut gb = Tensor::zeros(1, g.cols);
                        for row in g.data.chunks(g.cols.max(1)) {
                            for (o, x) in gb.data.iter_mut().zip(row) {
                                *o += x;
                            }
                        }
                        Self::accumulate(&mut grads, *b, gb);
                    }
                    if wants(*a) {
                        Self::accumulate(&mut grads, *a, g);
                    }
                }
                Op::Mul(a, b) => {
                    if wants(*a) {
                        Self::accumulate(&mut grads, *a, zip(&g, val(*b), |x, y| x * y));
                    }
                    if wants(*b) {
                        Self::accumulate(&mut grads, *b, zip(&g, val(*a), |x, y| x * y));
                    }
                }
                Op::Scale(a, c) => {
                    let c = *c;
                    Self::accumulate(&mut grads, *a, map(&g, |x| c * x));
                }
                Op::Concat(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let w = val(p).cols;
                        if wants(p) {
                            let mut data = Vec::with_capacity(g.rows * w);
                            for i in 0..g.rows {
                                data.extend_from_slice(&g.row(i)[offset..offset + w]);
                            }
                            let t = Tensor {
                                rows: g.rows,
                                cols: w,
                                data,
                            };
                            Self::accumulate(&mut grads, p, t);
                        }
                        offset += w;
                    }
                }
                Op::Relu(a) => {
                    let t = zip(&g, val(*a), |g, x| if x > 0.0 { g } else { 0.0 });
                    Self::accumulate(&mut grads, *a, t);
                }
                Op::Sigmoid(a) => {
                    let t = zip(&g, &node.value, |g, s| g * s * (1.0 - s));
                    Self::accumulate(&mut grads, *a, t);
                }
                Op::Dropout(a, mask) => {
                    let t = Tensor {
                        rows: g.rows,
                        cols: g.cols,
                        data: g.data.iter().zip(mask).map(|(x, m)| x * m).collect(),
                    };
                    Self::accumulate(&mut grads, *a, t);
                }
                Op::SpMM(s, x) => {
                    let mut t = Tensor::zeros(s.cols, g.cols);
                    for i in 0..s.rows() {
                        for (j, w) in s.row(i) {
                            let dst = &mut t.data[j * g.cols..(j + 1) * g.cols];
                            for (o, y) in dst.iter_mut().zip(g.row(i)) {
                                *o += w * y;
                            }
                        }
                    }
                    Self::accumulate(&mut grads, *x, t);
                }
                Op::Gather(x, idx) => {
                    let src = val(*x);
                    let mut t = Tensor::zeros(src.rows, src.cols);
                    for (k, &i) in idx.iter().enumerate() {
                        let dst = &mut t.data[i * src.cols..(i + 1) * src.cols];
                        for (o, y) in dst.iter_mut().zip(g.row(k)) {
                            *o += y;
                        }
                    }
                    Self::accumulate(&mut grads, *x, t);
                }
                Op::SumAll(a) => {
                    let (r, c) = val(*a).shape();
                    Self::accumulate(&mut grads, *a, Tensor::filled(r, c, g.data[0]));
                }
                Op::Bce(a, targets) => {
                    let x = val(*a);
                    let n = targets.len().max(1) as f64;
                    let s = g.data[0] / n;
                    let t = Tensor {
                        rows: x.rows,
                        cols: 1,
                        data: x
                            .data
                            .iter()
                            .zip(targets.iter())
                            .map(|(&x, &y)| s * (sigmoid(x) - y))
                            .collect(),
                    };
                    Self::accumulate(&mut grads, *a, t);
                }
            }
        }
        self.grads = grads;
        Ok(())
    }

    /// Gradient of a recorded value after [`backward`](Tape::backward).
    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    /// Per-parameter gradients indexed by [`ParamId`], summed over every use.
    pub fn param_grads(&self, store: &ParamStore) -> Result<Vec<Option<Tensor>>> {
        if !self.differentiated {
            return Err(Error::Contract("param_grads before backward".into()));
        }
        let mut out: Vec<Option<Tensor>> = vec![None; store.len()];
        for &(id, v) in &self.params {
            if let Some(g) = self.grad(v) {
                match &mut out[id.index()] {
                    Some(acc) => acc.add_assign(g),
                    slot => *slot = Some(g.clone()),
                }
            }
        }
        for g in out.iter().flatten() {
            if !g.is_finite() {
                return Err(Error::Numeric("non-finite gradient".into()));
            }
        }
        Ok(out)
    }
}
