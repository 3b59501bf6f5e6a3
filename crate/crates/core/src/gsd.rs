//! Generalized stochastic dominance between acts and the choice functions
//! built on it.
//!
//! `margin(x, y)` is the smallest expected-utility advantage of `x` over `y`
//! over all normalized representations (at slack `delta`) and all extreme
//! points of the credal set; `x` dominates `y` when it is `>= -TAU_SIGN`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::credal::{extreme_points, CredalSet, Pmf};
use crate::error::{Error, Result};
use crate::lp::TAU_SIGN;
use crate::order::ElementId;
use crate::preference::{constraints_for, PreferenceSystem, RepresentationConstraintSet, RepresentationVector};

/// A mapping from states to consequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Act {
    pub name: String,
    pub mapping: BTreeMap<String, ElementId>,
}

impl Act {
    pub fn new(name: &str, states: &[String], outcomes: &[ElementId]) -> Result<Self> {
        if states.len() != outcomes.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: outcomes.len(),
            });
        }
        Ok(Self {
            name: name.to_string(),
            mapping: states.iter().cloned().zip(outcomes.iter().cloned()).collect(),
        })
    }

    pub fn outcome(&self, state: &str) -> Option<&ElementId> {
        self.mapping.get(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    StrictForward,
    StrictBackward,
    Indifferent,
    Incomparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub forward_margin: f64,
    pub backward_margin: f64,
    pub relation: DominanceRelation,
}

impl DominanceVerdict {
    pub fn from_margins(forward: f64, backward: f64) -> Self {
        let f = forward >= -TAU_SIGN;
        let b = backward >= -TAU_SIGN;
        let relation = match (f, b) {
            (true, false) => DominanceRelation::StrictForward,
            (false, true) => DominanceRelation::StrictBackward,
            (true, true) => DominanceRelation::Indifferent,
            (false, false) => DominanceRelation::Incomparable,
        };
        Self {
            forward_margin: forward,
            backward_margin: backward,
            relation,
        }
    }
}

/// Everything shared by the margins of one decision problem: the row set at
/// `delta` and the extreme points of the credal set.
pub struct GsdContext<'a> {
    ps: &'a PreferenceSystem,
    set: RepresentationConstraintSet,
    vertices: Vec<Pmf>,
}

impl<'a> GsdContext<'a> {
    pub fn new(ps: &'a PreferenceSystem, m: &CredalSet, delta: f64) -> Result<Self> {
        let set = constraints_for(ps, delta)?;
        // Surface an empty representation set up front.
        set.minimize(&vec![0.0; ps.len()])?;
        let vertices = extreme_points(m)?;
        Ok(Self { ps, set, vertices })
    }

    pub fn vertices(&self) -> &[Pmf] {
        &self.vertices
    }

    fn check_act(&self, act: &Act) -> Result<()> {
        let states = self.vertices[0].states();
        if act.mapping.len() != states.len() || states.iter().any(|s| !act.mapping.contains_key(s)) {
            return Err(Error::StateMismatch(format!(
                "act {} is not defined on exactly the credal states {states:?}",
                act.name
            )));
        }
        for e in act.mapping.values() {
            self.ps.position(e)?;
        }
        Ok(())
    }

    /// Objective coefficients of `E_pi(u o x) - E_pi(u o y)`.
    fn objective(&self, x: &Act, y: &Act, pi: &Pmf) -> Vec<f64> {
        let mut c = vec![0.0; self.ps.len()];
        for (s, p) in pi.states().iter().zip(pi.probs()) {
            let i = self.ps.index_of(&x.mapping[s]).expect("checked");
            let j = self.ps.index_of(&y.mapping[s]).expect("checked");
            c[i] += p;
            c[j] -= p;
        }
        c
    }

    pub fn margin(&self, x: &Act, y: &Act) -> Result<f64> {
        self.check_act(x)?;
        self.check_act(y)?;
        let mut best = f64::INFINITY;
        for pi in &self.vertices {
            let c = self.objective(x, y, pi);
            let v = if c.iter().all(|&v| v == 0.0) {
                0.0
            } else {
                self.set.minimize(&c)?.value
            };
            best = best.min(v);
        }
        Ok(best)
    }

    pub fn compare(&self, x: &Act, y: &Act) -> Result<DominanceVerdict> {
        Ok(DominanceVerdict::from_margins(self.margin(x, y)?, self.margin(y, x)?))
    }

    /// All ordered-pair margins; the diagonal is zero.
    pub fn margin_matrix(&self, acts: &[Act]) -> Result<Vec<Vec<f64>>> {
        for a in acts {
            self.check_act(a)?;
        }
        let k = acts.len();
        let flat: Vec<f64> = (0..k * k)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / k, ij % k);
                if i == j {
                    Ok(0.0)
                } else {
                    self.margin(&acts[i], &acts[j])
                }
            })
            .collect::<Result<_>>()?;
        Ok(flat.chunks(k).map(<[f64]>::to_vec).collect())
    }
}

pub fn dominance_margin(x: &Act, y: &Act, ps: &PreferenceSystem, m: &CredalSet, delta: f64) -> Result<f64> {
    GsdContext::new(ps, m, delta)?.margin(x, y)
}

pub fn gsd_compare(x: &Act, y: &Act, ps: &PreferenceSystem, m: &CredalSet, delta: f64) -> Result<DominanceVerdict> {
    GsdContext::new(ps, m, delta)?.compare(x, y)
}

/// Indices of acts not strictly dominated by any other act, given the
/// pairwise margin matrix.
pub fn undominated(margins: &[Vec<f64>]) -> Vec<usize> {
    let k = margins.len();
    (0..k)
        .filter(|&x| {
            !(0..k).any(|y| {
                y != x
                    && DominanceVerdict::from_margins(margins[y][x], margins[x][y]).relation
                        == DominanceRelation::StrictForward
            })
        })
        .collect()
}

/// Indices of acts that weakly dominate every other act.
pub fn dominating_all(margins: &[Vec<f64>]) -> Vec<usize> {
    let k = margins.len();
    (0..k)
        .filter(|&x| (0..k).all(|y| y == x || margins[x][y] >= -TAU_SIGN))
        .collect()
}

fn nonempty(acts: &[Act]) -> Result<()> {
    if acts.is_empty() {
        return Err(Error::InvalidInput("act set is empty".into()));
    }
    Ok(())
}

/// Acts not strictly GSD-dominated within `acts` (indices, ascending).
pub fn choice_und(acts: &[Act], ps: &PreferenceSystem, m: &CredalSet, delta: f64) -> Result<Vec<usize>> {
    nonempty(acts)?;
    let ctx = GsdContext::new(ps, m, delta)?;
    Ok(undominated(&ctx.margin_matrix(acts)?))
}

/// Acts that dominate every other act (indices, ascending).
pub fn choice_max(acts: &[Act], ps: &PreferenceSystem, m: &CredalSet, delta: f64) -> Result<Vec<usize>> {
    nonempty(acts)?;
    let ctx = GsdContext::new(ps, m, delta)?;
    Ok(dominating_all(&ctx.margin_matrix(acts)?))
}

/// Maximizers of expected utility under a fixed `u` and `pi`.
pub fn eu_choice(acts: &[Act], u: &RepresentationVector, pi: &Pmf) -> Result<Vec<usize>> {
    nonempty(acts)?;
    let values: Vec<f64> = acts
        .iter()
        .map(|a| {
            pi.states()
                .iter()
                .zip(pi.probs())
                .map(|(s, p)| {
                    let e = a.outcome(s).ok_or_else(|| {
                        Error::StateMismatch(format!("act {} has no outcome for state {s}", a.name))
                    })?;
                    let v = u.get(e).ok_or_else(|| Error::UnknownElement(e.to_string()))?;
                    Ok(p * v)
                })
                .sum::<Result<f64>>()
        })
        .collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..acts.len()).filter(|&i| values[i] >= best - TAU_SIGN).collect())
}

/// First-order stochastic dominance choice: `choice_und` with a precise
/// `pi`, no regularization, and a system without intensity information.
pub fn fsd_choice(acts: &[Act], ps: &PreferenceSystem, pi: &Pmf) -> Result<Vec<usize>> {
    if !ps.has_trivial_r2() {
        return Err(Error::InvalidInput("fsd_choice needs a trivial r2".into()));
    }
    choice_und(acts, ps, &CredalSet::singleton(pi.clone()), 0.0)
}
