use serde::{Deserialize, Serialize};

use super::{ParamStore, Tape, Tensor, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub entries: usize,
    /// `|numeric - analytic| / max(1, |numeric|, |analytic|)`, maximised over entries.
    pub max_rel_err: f64,
    /// Parameter name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
}

impl GradcheckReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_rel_err < tol
    }
}

/// Compares `analytic` parameter gradients against central differences of
/// `loss`, perturbing every entry of a copy of `store` by `±step`.
pub fn gradcheck<F>(
    store: &ParamStore,
    analytic: &[Option<Tensor>],
    step: f64,
    mut loss: F,
) -> Result<GradcheckReport>
where
    F: FnMut(&ParamStore) -> Result<f64>,
{
    if analytic.len() != store.len() {
        return Err(Error::Shape(format!(
            "{} gradients for {} parameters",
            analytic.len(),
            store.len()
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Contract(format!("finite-difference step {step} must be positive")));
    }
    let mut scratch = store.clone();
    let mut report = GradcheckReport {
        entries: 0,
        max_rel_err: 0.0,
        worst: None,
    };
    for id in store.ids() {
        let base = store.get(id).data().to_vec();
        let grad = analytic[id.index()].as_ref();
        if grad.is_some_and(|g| g.data().len() != base.len()) {
            return Err(Error::Shape(format!("gradient of {} has the wrong size", store.name(id))));
        }
        for (k, &x) in base.iter().enumerate() {
            scratch.get_mut(id).data_mut()[k] = x + step;
            let plus = loss(&scratch)?;
            scratch.get_mut(id).data_mut()[k] = x - step;
            let minus = loss(&scratch)?;
            scratch.get_mut(id).data_mut()[k] = x;
            let numeric = (plus - minus) / (2.0 * step);
            let a = grad.map_or(0.0, |g| g.data()[k]);
            let rel = (numeric - a).abs() / 1f64.max(numeric.abs()).max(a.abs());
            if !rel.is_finite() {
                return Err(Error::Numeric(format!("non-finite gradient at {}[{k}]", store.name(id))));
            }
            report.entries += 1;
            if rel > report.max_rel_err || report.worst.is_none() {
                report.max_rel_err = report.max_rel_err.max(rel);
                report.worst = Some((store.name(id).to_string(), k));
            }
        }
    }
    Ok(report)
}

/// [`gradcheck`] for a scalar built on a fresh tape by `f`.
pub fn gradcheck_tape<F>(store: &ParamStore, step: f64, f: F) -> Result<GradcheckReport>
where
    F: Fn(&mut Tape, &ParamStore) -> Result<Var>,
{
    let mut tape = Tape::new();
    let loss = f(&mut tape, store)?;
    tape.backward(loss)?;
    let grads = tape.param_grads(store)?;
    gradcheck(store, &grads, step, |s| {
        let mut tape = Tape::new();
        let l = f(&mut tape, s)?;
        tape.scalar(l)
    })
}
