use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Tensor;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// Uniform on `±sqrt(6 / (fan_in + fan_out))`.
    Glorot,
    Zeros,
    Identity,
}

/// Named parameters in insertion order. Initial values derive from the
/// store seed and the parameter's position, so the same construction
/// sequence always yields the same weights.
#[derive(Debug, Clone)]
pub struct ParamStore {
    seed: u64,
    names: Vec<String>,
    values: Vec<Tensor>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub params: Vec<NamedTensor>,
}

impl ParamStore {
    pub fn new(seed: u64) -> Self {
        ParamStore {
            seed,
            names: Vec::new(),
            values: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    pub fn add(&mut self, name: &str, value: Tensor) -> Result<ParamId> {
        if self.index.contains_key(name) {
            return Err(Error::Contract(format!("duplicate parameter {name:?}")));
        }
        self.index.insert(name.to_string(), self.values.len());
        self.names.push(name.to_string());
        self.values.push(value);
        Ok(ParamId(self.values.len() - 1))
    }

    pub fn add_init(&mut self, name: &str, rows: usize, cols: usize, init: Init) -> Result<ParamId> {
        let value = match init {
            Init::Zeros => Tensor::zeros(rows, cols),
            Init::Identity => {
                let mut t = Tensor::zeros(rows, cols);
                for i in 0..rows.min(cols) {
                    t.data_mut()[i * cols + i] = 1.0;
                }
                t
            }
            Init::Glorot => {
                let bound = (6.0 / (rows + cols).max(1) as f64).sqrt();
                let mut r = rng::derived_rng(self.seed, &[self.values.len() as u64]);
                let data = (0..rows * cols).map(|_| r.gen_range(-bound..=bound)).collect();
                Tensor::new(rows, cols, data)?
            }
        };
        self.add(name, value)
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.values[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.values[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn lookup(&self, name: &str) -> Option<ParamId> {
        self.index.get(name).copied().map(ParamId)
    }

    pub fn num_scalars(&self) -> usize {
        self.values.iter().map(|t| t.data().len()).sum()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            params: self
                .names
                .iter()
                .zip(&self.values)
                .map(|(name, t)| NamedTensor {
                    name: name.clone(),
                    rows: t.rows(),
                    cols: t.cols(),
                    values: t.data().to_vec(),
                })
                .collect(),
        }
    }

    /// Overwrites every parameter from `ckpt`; names and shapes must match.
    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        if ckpt.params.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "checkpoint has {} parameters, model has {}",
                ckpt.params.len(),
                self.values.len()
            )));
        }
        for p in &ckpt.params {
            let id = self
                .lookup(&p.name)
                .ok_or_else(|| Error::Shape(format!("unknown parameter {:?}", p.name)))?;
            let t = Tensor::new(p.rows, p.cols, p.values.clone())?;
            if t.shape() != self.get(id).shape() {
                return Err(Error::Shape(format!(
                    "parameter {:?}: checkpoint {:?} vs model {:?}",
                    p.name,
                    t.shape(),
                    self.get(id).shape()
                )));
            }
            self.values[id.0] = t;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, &self.checkpoint())?;
        Ok(())
    }

    pub fn load_into(&mut self, path: &Path) -> Result<()> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let ckpt: Checkpoint = serde_json::from_reader(f)?;
        self.restore(&ckpt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_seeded() {
        let build = |seed| {
            let mut s = ParamStore::new(seed);
            s.add_init("a", 3, 4, Init::Glorot).unwrap();
            s.add_init("b", 2, 2, Init::Identity).unwrap();
            s
        };
        assert_eq!(build(1).checkpoint(), build(1).checkpoint());
        assert_ne!(build(1).checkpoint(), build(2).checkpoint());
        let s = build(1);
        let bound = (6.0f64 / 7.0).sqrt();
        assert!(s.get(ParamId(0)).data().iter().all(|x| x.abs() <= bound));
        assert_eq!(s.get(ParamId(1)).data(), &[1.0, 0.0, 0.0, 1.0]);
        assert!(build(1).add_init("a", 1, 1, Init::Zeros).is_err());
    }

    #[test]
    fn checkpoint_restores() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        let mut a = ParamStore::new(4);
        a.add_init("w", 3, 2, Init::Glorot).unwrap();
        a.save(&path).unwrap();
        let mut b = ParamStore::new(5);
        b.add_init("w", 3, 2, Init::Glorot).unwrap();
        b.load_into(&path).unwrap();
        assert_eq!(a.checkpoint(), b.checkpoint());
        let mut c = ParamStore::new(5);
        c.add_init("w", 2, 3, Init::Glorot).unwrap();
        assert!(matches!(c.restore(&a.checkpoint()), Err(Error::Shape(_))));
    }
}
