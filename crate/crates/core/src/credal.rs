//! Finitely generated credal sets over a finite state space.
//!
//! Every form exposes an explicit list of extreme points, which is what the
//! dominance computations iterate over. Constraint-form sets are enumerated
//! with the double-description method in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Comparison, LinearProgram, Sense, TAU_FEAS};

/// Largest state count accepted for constraint-form enumeration.
pub const CONSTRAINT_FORM_STATE_CAP: usize = 8;

/// Probability mass function over an ordered list of states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    states: Vec<String>,
    probs: Vec<f64>,
}

fn check_states(states: &[String]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::InvalidInput("state list is empty".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for s in states {
        if s.is_empty() || !seen.insert(s) {
            return Err(Error::InvalidInput(format!("bad or duplicate state {s:?}")));
        }
    }
    Ok(())
}

impl Pmf {
    pub fn new(states: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        let pmf = Self { states, probs };
        pmf.validate()?;
        Ok(pmf)
    }

    pub fn uniform(states: Vec<String>) -> Result<Self> {
        let k = states.len() as f64;
        let probs = vec![1.0 / k; states.len()];
        Self::new(states, probs)
    }

    pub fn point_mass(states: Vec<String>, at: usize) -> Result<Self> {
        let mut probs = vec![0.0; states.len()];
        *probs
            .get_mut(at)
            .ok_or_else(|| Error::InvalidInput(format!("state index {at} out of range")))? = 1.0;
        Self::new(states, probs)
    }

    pub fn validate(&self) -> Result<()> {
        check_states(&self.states)?;
        if self.probs.len() != self.states.len() {
            return Err(Error::DimensionMismatch {
                expected: self.states.len(),
                got: self.probs.len(),
            });
        }
        if self.probs.iter().any(|p| !p.is_finite() || *p < -TAU_FEAS) {
            return Err(Error::InvalidInput("negative or non-finite probability".into()));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > TAU_FEAS {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, state: &str) -> Option<f64> {
        self.states.iter().position(|s| s == state).map(|i| self.probs[i])
    }

    fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CredalSet {
    Singleton {
        pmf: Pmf,
    },
    #[serde(rename = "vertices")]
    VertexList {
        vertices: Vec<Pmf>,
    },
    /// `{(1 - zeta) base + zeta q : q any pmf}`.
    LinearVacuous {
        base: Pmf,
        zeta: f64,
    },
    /// `{pi : pi(chain[0]) >= pi(chain[1]) >= ...}`. `states` fixes the state
    /// order of the returned pmfs; it defaults to the chain itself.
    OrderingChain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        states: Option<Vec<String>>,
        chain: Vec<String>,
    },
    /// `{pi : lower[l] <= sum_s functions[l][s] pi(s) <= upper[l]}`.
    #[serde(rename = "constraints")]
    ConstraintForm {
        states: Vec<String>,
        functions: Vec<Vec<f64>>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl CredalSet {
    pub fn singleton(pmf: Pmf) -> Self {
        CredalSet::Singleton { pmf }
    }

    pub fn linear_vacuous(base: Pmf, zeta: f64) -> Result<Self> {
        let m = CredalSet::LinearVacuous { base, zeta };
        m.validate()?;
        Ok(m)
    }

    pub fn ordering_chain(states: Vec<String>, chain: Vec<String>) -> Result<Self> {
        let m = CredalSet::OrderingChain { states: Some(states), chain };
        m.validate()?;
        Ok(m)
    }

    pub fn states(&self) -> &[String] {
        match self {
            CredalSet::Singleton { pmf } => pmf.states(),
            CredalSet::VertexList { vertices } => vertices.first().map_or(&[], |v| v.states()),
            CredalSet::LinearVacuous { base, .. } => base.states(),
            CredalSet::OrderingChain { states, chain } => states.as_deref().unwrap_or(chain),
            CredalSet::ConstraintForm { states, .. } => states,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CredalSet::Singleton { pmf } => pmf.validate(),
            CredalSet::VertexList { vertices } => {
                let first = vertices.first().ok_or(Error::EmptyCredalSet)?;
                for v in vertices {
                    v.validate()?;
                    if v.states != first.states {
                        return Err(Error::StateMismatch("vertices use different state lists".into()));
                    }
                }
                Ok(())
            }
            CredalSet::LinearVacuous { base, zeta } => {
                base.validate()?;
                if !(0.0..=1.0).contains(zeta) {
                    return Err(Error::InvalidInput(format!("contamination {zeta} outside [0, 1]")));
                }
                Ok(())
            }
            CredalSet::OrderingChain { states, chain } => {
                check_states(chain)?;
                if let Some(states) = states {
                    check_states(states)?;
                    let mut a = states.clone();
                    let mut b = chain.clone();
                    a.sort();
                    b.sort();
                    if a != b {
                        return Err(Error::StateMismatch(
                            "ordering chain must list every state exactly once".into(),
                        ));
                    }
                }
                Ok(())
            }
            CredalSet::ConstraintForm {
                states,
                functions,
                lower,
                upper,
            } => {
                check_states(states)?;
                if functions.len() != lower.len() || functions.len() != upper.len() {
                    return Err(Error::InvalidInput("one lower and one upper bound per function".into()));
                }
                for (f, (lo, hi)) in functions.iter().zip(lower.iter().zip(upper)) {
                    if f.len() != states.len() {
                        return Err(Error::DimensionMismatch {
                            expected: states.len(),
                            got: f.len(),
                        });
                    }
                    if f.iter().chain([lo, hi]).any(|x| !x.is_finite()) || lo > hi {
                        return Err(Error::InvalidInput("invalid expectation bounds".into()));
                    }
                }
                Ok(())
            }
        }
    }

    fn check_same_states(&self, pi: &Pmf) -> Result<()> {
        if pi.states() != self.states() {
            return Err(Error::StateMismatch(format!(
                "pmf states {:?} vs credal set states {:?}",
                pi.states(),
                self.states()
            )));
        }
        Ok(())
    }
}

/// Vertex set of the credal set, duplicates (within `TAU_FEAS`) removed.
pub fn extreme_points(m: &CredalSet) -> Result<Vec<Pmf>> {
    m.validate()?;
    let states = m.states().to_vec();
    let raw = match m {
        CredalSet::Singleton { pmf } => vec![pmf.clone()],
        CredalSet::VertexList { vertices } => vertices.clone(),
        CredalSet::LinearVacuous { base, zeta } => (0..states.len())
            .map(|s| {
                let probs = base
                    .probs()
                    .iter()
                    .enumerate()
                    .map(|(t, p)| (1.0 - zeta) * p + if s == t { *zeta } else { 0.0 })
                    .collect();
                Pmf::new(states.clone(), probs)
            })
            .collect::<Result<_>>()?,
        CredalSet::OrderingChain { chain, .. } => (1..=chain.len())
            .map(|k| {
                let probs = states
                    .iter()
                    .map(|s| {
                        let rank = chain.iter().position(|c| c == s).expect("validated");
                        if rank < k {
                            1.0 / k as f64
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Pmf::new(states.clone(), probs)
            })
            .collect::<Result<_>>()?,
        CredalSet::ConstraintForm {
            functions,
            lower,
            upper,
            ..
        } => constraint_vertices(&states, functions, lower, upper)?,
    };
    let mut out: Vec<Pmf> = Vec::with_capacity(raw.len());
    for v in raw {
        if !out.iter().any(|w| w.max_abs_diff(&v) <= TAU_FEAS) {
            out.push(v);
        }
    }
    Ok(out)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Double description on the homogenized cone
/// `{x >= 0 : (f - lo) . x >= 0, (hi - f) . x >= 0}` whose rays, scaled to
/// sum one, are the vertices.
fn constraint_vertices(
    states: &[String],
    functions: &[Vec<f64>],
    lower: &[f64],
    upper: &[f64],
) -> Result<Vec<Pmf>> {
    let k = states.len();
    if k > CONSTRAINT_FORM_STATE_CAP {
        return Err(Error::TooManyStates {
            states: k,
            cap: CONSTRAINT_FORM_STATE_CAP,
        });
    }
    let mut halfspaces: Vec<Vec<BigRational>> = Vec::new();
    for (f, (lo, hi)) in functions.iter().zip(lower.iter().zip(upper)) {
        let (lo, hi) = (rational(*lo), rational(*hi));
        let f: Vec<BigRational> = f.iter().map(|&x| rational(x)).collect();
        halfspaces.push(f.iter().map(|fs| fs - &lo).collect());
        halfspaces.push(f.iter().map(|fs| &hi - fs).collect());
    }

    // Start: the orthant, rays e_s, constraint s tight on every ray but e_s.
    let mut rays: Vec<Vec<BigRational>> = (0..k)
        .map(|s| (0..k).map(|t| if s == t { one() } else { BigRational::zero() }).collect())
        .collect();
    let mut tight: Vec<Vec<bool>> = (0..k).map(|s| (0..k).map(|t| s != t).collect()).collect();

    for a in &halfspaces {
        let vals: Vec<BigRational> = rays.iter().map(|r| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > BigRational::zero()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < BigRational::zero()).collect();
        let zero: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_zero()).collect();

        let mut new_rays = Vec::new();
        let mut new_tight = Vec::new();
        for &i in pos.iter().chain(&zero) {
            new_rays.push(rays[i].clone());
            let mut t = tight[i].clone();
            t.push(vals[i].is_zero());
            new_tight.push(t);
        }
        for &p in &pos {
            for &n in &neg {
                if !adjacent(p, n, &tight) {
                    continue;
                }
                // (a.p) n - (a.n) p lies on the hyperplane a.x = 0
                let r: Vec<BigRational> = rays[p]
                    .iter()
                    .zip(&rays[n])
                    .map(|(xp, xn)| &vals[p] * xn - &vals[n] * xp)
                    .collect();
                let mut t: Vec<bool> = tight[p].iter().zip(&tight[n]).map(|(x, y)| *x && *y).collect();
                t.push(true);
                new_rays.push(normalize(r));
                new_tight.push(t);
            }
        }
        rays = new_rays;
        tight = new_tight;
    }

    if rays.is_empty() {
        return Err(Error::EmptyCredalSet);
    }
    let mut seen: Vec<Vec<BigRational>> = Vec::new();
    let mut out = Vec::new();
    for r in rays {
        let r = normalize(r);
        if seen.contains(&r) {
            continue;
        }
        let probs = r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        seen.push(r);
        out.push(Pmf::new(states.to_vec(), probs)?);
    }
    out.sort_by(|a, b| {
        b.probs
            .iter()
            .zip(&a.probs)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

fn dot(a: &[BigRational], x: &[BigRational]) -> BigRational {
    a.iter().zip(x).fold(BigRational::zero(), |acc, (p, q)| acc + p * q)
}

/// Scales a ray so its coordinates sum to one (rays here are nonnegative and
/// nonzero).
fn normalize(r: Vec<BigRational>) -> Vec<BigRational> {
    let total = r.iter().fold(BigRational::zero(), |acc, x| acc + x);
    r.into_iter().map(|x| x / &total).collect()
}

/// Combinatorial adjacency: no third ray is tight on every constraint that
/// is tight on both `p` and `n`.
fn adjacent(p: usize, n: usize, tight: &[Vec<bool>]) -> bool {
    let common: Vec<usize> = (0..tight[p].len()).filter(|&c| tight[p][c] && tight[n][c]).collect();
    !(0..tight.len()).any(|r| r != p && r != n && common.iter().all(|&c| tight[r][c]))
}

/// Membership via the defining constraints, within `TAU_FEAS` (hull LP for
/// vertex lists).
pub fn contains(m: &CredalSet, pi: &Pmf) -> Result<bool> {
    m.validate()?;
    pi.validate()?;
    m.check_same_states(pi)?;
    let p = pi.probs();
    Ok(match m {
        CredalSet::Singleton { pmf } => pmf.max_abs_diff(pi) <= TAU_FEAS,
        CredalSet::VertexList { vertices } => {
            let probs: Vec<Vec<f64>> = vertices.iter().map(|v| v.probs.clone()).collect();
            in_convex_hull(p, &probs)?
        }
        CredalSet::LinearVacuous { base, zeta } => {
            if *zeta == 0.0 {
                base.max_abs_diff(pi) <= TAU_FEAS
            } else {
                p.iter().zip(base.probs()).all(|(x, b)| *x >= (1.0 - zeta) * b - TAU_FEAS)
            }
        }
        CredalSet::OrderingChain { chain, .. } => chain.windows(2).all(|w| {
            let a = pi.prob(&w[0]).expect("same states");
            let b = pi.prob(&w[1]).expect("same states");
            a >= b - TAU_FEAS
        }),
        CredalSet::ConstraintForm {
            functions,
            lower,
            upper,
            ..
        } => functions.iter().zip(lower.iter().zip(upper)).all(|(f, (lo, hi))| {
            let e: f64 = f.iter().zip(p).map(|(a, b)| a * b).sum();
            e >= lo - TAU_FEAS && e <= hi + TAU_FEAS
        }),
    })
}

/// Is `point` a convex combination of `generators` (within `TAU_FEAS`)?
/// An LP feasibility check; used as the separation test for redundancy.
pub fn in_convex_hull(point: &[f64], generators: &[Vec<f64>]) -> Result<bool> {
    if generators.is_empty() {
        return Ok(false);
    }
    let g = generators.len();
    let mut lp = LinearProgram::new(g, Sense::Minimize);
    lp.add_constraint(vec![1.0; g], Comparison::Eq, 1.0)?;
    for (s, &x) in point.iter().enumerate() {
        let row: Vec<f64> = generators.iter().map(|v| v[s]).collect();
        lp.add_constraint(row, Comparison::Eq, x)?;
    }
    lp::feasible(&lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn singleton_vertices() {
        let u = Pmf::uniform(st(&["a", "b", "c"])).unwrap();
        let v = extreme_points(&CredalSet::singleton(u.clone())).unwrap();
        assert_eq!(v, vec![u.clone()]);
        assert!(contains(&CredalSet::singleton(u.clone()), &u).unwrap());
    }

    #[test]
    fn ordering_chain_prefix_vertices() {
        let m = CredalSet::ordering_chain(st(&["s1", "s2", "s3", "s4"]), st(&["s1", "s2", "s4", "s3"])).unwrap();
        let v = extreme_points(&m).unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0],
            [0.25, 0.25, 0.25, 0.25],
        ];
        assert_eq!(v.len(), 4);
        for (got, want) in v.iter().zip(&expected) {
            assert!(close(got.probs(), want), "{got:?}");
        }
    }

    #[test]
    fn linear_vacuous_degenerate_cases() {
        let base = Pmf::new(st(&["a", "b", "c"]), vec![0.5, 0.3, 0.2]).unwrap();
        let m0 = CredalSet::linear_vacuous(base.clone(), 0.0).unwrap();
        assert_eq!(extreme_points(&m0).unwrap(), vec![base.clone()]);
        let other = Pmf::new(st(&["a", "b", "c"]), vec![0.4, 0.4, 0.2]).unwrap();
        assert!(!contains(&m0, &other).unwrap());
        assert!(contains(&m0, &base).unwrap());

        let m1 = CredalSet::linear_vacuous(base, 1.0).unwrap();
        let v = extreme_points(&m1).unwrap();
        assert_eq!(v.len(), 3);
        for (s, p) in v.iter().enumerate() {
            assert_eq!(p, &Pmf::point_mass(st(&["a", "b", "c"]), s).unwrap());
        }
    }

    #[test]
    fn bad_zeta_rejected() {
        let base = Pmf::uniform(st(&["a", "b"])).unwrap();
        assert!(CredalSet::linear_vacuous(base, 1.5).is_err());
    }

    #[test]
    fn constraint_form_simplex_and_cap() {
        let states = st(&["a", "b", "c"]);
        // no constraints: the whole simplex
        let m = CredalSet::ConstraintForm {
            states: states.clone(),
            functions: vec![],
            lower: vec![],
            upper: vec![],
        };
        assert_eq!(extreme_points(&m).unwrap().len(), 3);

        let big = CredalSet::ConstraintForm {
            states: (0..9).map(|i| format!("s{i}")).collect(),
            functions: vec![],
            lower: vec![],
            upper: vec![],
        };
        assert!(matches!(extreme_points(&big), Err(Error::TooManyStates { states: 9, cap: 8 })));
    }

    #[test]
    fn constraint_form_box() {
        // pi(a) in [0.2, 0.5] on three states
        let m = CredalSet::ConstraintForm {
            states: st(&["a", "b", "c"]),
            functions: vec![vec![1.0, 0.0, 0.0]],
            lower: vec![0.2],
            upper: vec![0.5],
        };
        let v = extreme_points(&m).unwrap();
        assert_eq!(v.len(), 4);
        for p in &v {
            assert!(contains(&m, p).unwrap());
            assert!(p.probs()[0] == 0.2 || p.probs()[0] == 0.5);
        }
    }

    #[test]
    fn constraint_form_empty() {
        let m = CredalSet::ConstraintForm {
            states: st(&["a", "b"]),
            functions: vec![vec![1.0, 0.0]],
            lower: vec![1.5],
            upper: vec![2.0],
        };
        assert_eq!(extreme_points(&m).unwrap_err(), Error::EmptyCredalSet);
    }

    #[test]
    fn state_mismatch() {
        let m = CredalSet::singleton(Pmf::uniform(st(&["a", "b"])).unwrap());
        let p = Pmf::uniform(st(&["a", "c"])).unwrap();
        assert!(matches!(contains(&m, &p), Err(Error::StateMismatch(_))));
    }

    #[test]
    fn document_round_trip() {
        let m = CredalSet::ordering_chain(st(&["x", "y"]), st(&["y", "x"])).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains(r#""kind":"ordering_chain""#), "{json}");
        let back: CredalSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let doc = r#"{"kind": "linear_vacuous", "base": {"states": ["a", "b"], "probs": [0.5, 0.5]}, "zeta": 0.2}"#;
        let m: CredalSet = serde_json::from_str(doc).unwrap();
        assert_eq!(extreme_points(&m).unwrap().len(), 2);
    }
}
