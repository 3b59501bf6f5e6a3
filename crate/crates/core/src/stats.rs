//! Empirical GSD statistics, observation-randomization tests, the
//! contamination-robust variant, and GSD / Pareto fronts of evaluation tables.
//!
//! Orientation: the null of every permutation test is exchangeability; a large
//! observed statistic is evidence for dominance of `x` over `y`.
//!
//! Seeding: replicate `b` of a test draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `b` (stream `(k << 32) | b` for the `k`-th sub-test of a
//! front-membership test). Replicates are independent of each other and of
//! the thread they run on, so results do not depend on the worker count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{TAU_FEAS, TAU_SIGN};
use crate::order::ElementId;
use crate::preference::{
    constraints_for, embed_encoded, EmbeddedSystem, MetricValue, PreferenceSystem, RepresentationConstraintSet,
    ScaleSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    Paired,
    TwoSample,
}

/// Finitely supported probability measure on elements of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub atoms: Vec<(ElementId, f64)>,
}

impl WeightedSample {
    pub fn new(atoms: Vec<(ElementId, f64)>) -> Result<Self> {
        if atoms.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > TAU_FEAS {
            return Err(Error::InvalidInput(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Empirical measure of a list of observations.
    pub fn uniform(obs: &[ElementId]) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        let w = 1.0 / obs.len() as f64;
        Ok(Self {
            atoms: obs.iter().map(|e| (e.clone(), w)).collect(),
        })
    }
}

/// Solves statistic LPs against one fixed row set.
pub struct StatisticEngine {
    set: RepresentationConstraintSet,
    n: usize,
}

impl StatisticEngine {
    pub fn new(ps: &PreferenceSystem, delta: f64) -> Result<Self> {
        let set = constraints_for(ps, delta)?;
        let n = ps.len();
        set.minimize(&vec![0.0; n])?;
        Ok(Self { set, n })
    }

    pub fn delta(&self) -> f64 {
        self.set.delta()
    }

    /// `min_u sum c_j u_j`, short-circuiting the all-zero objective.
    pub fn minimize(&self, c: &[f64]) -> Result<f64> {
        if c.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        Ok(self.set.minimize(c)?.value)
    }

    /// `min_u [sx * E_x u - sy * E_y u]` for index-weight lists.
    pub fn statistic(&self, x: &[(usize, f64)], y: &[(usize, f64)], sx: f64, sy: f64) -> Result<f64> {
        let mut c = vec![0.0; self.n];
        for &(i, w) in x {
            c[i] += sx * w;
        }
        for &(j, w) in y {
            c[j] -= sy * w;
        }
        self.minimize(&c)
    }

    /// Statistic of two observation lists with uniform weights.
    fn statistic_obs(&self, x: &[usize], y: &[usize], sx: f64, sy: f64) -> Result<f64> {
        let wx = 1.0 / x.len() as f64;
        let wy = 1.0 / y.len() as f64;
        let xs: Vec<(usize, f64)> = x.iter().map(|&i| (i, wx)).collect();
        let ys: Vec<(usize, f64)> = y.iter().map(|&j| (j, wy)).collect();
        self.statistic(&xs, &ys, sx, sy)
    }
}

fn indexed(sample: &WeightedSample, ps: &PreferenceSystem) -> Result<Vec<(usize, f64)>> {
    sample.atoms.iter().map(|(e, w)| Ok((ps.position(e)?, *w))).collect()
}

/// `min_u E_x u - E_y u` over the normalized representations at `delta`.
pub fn empirical_statistic(sx: &WeightedSample, sy: &WeightedSample, ps: &PreferenceSystem, delta: f64) -> Result<f64> {
    let engine = StatisticEngine::new(ps, delta)?;
    engine.statistic(&indexed(sx, ps)?, &indexed(sy, ps)?, 1.0, 1.0)
}

/// Statistic against the least favorable contamination: `zeta_x` of the
/// mass of `x` moved to the bottom, `zeta_y` of the mass of `y` to the top.
pub fn robust_statistic(
    sx: &WeightedSample,
    sy: &WeightedSample,
    ps: &PreferenceSystem,
    delta: f64,
    zeta_x: f64,
    zeta_y: f64,
) -> Result<f64> {
    check_zeta(zeta_x)?;
    check_zeta(zeta_y)?;
    let engine = StatisticEngine::new(ps, delta)?;
    Ok(engine.statistic(&indexed(sx, ps)?, &indexed(sy, ps)?, 1.0 - zeta_x, 1.0 - zeta_y)? - zeta_y)
}

fn check_zeta(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidInput(format!("contamination {z} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub delta: f64,
    pub design: Design,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub replicates: usize,
    /// Replicates with statistic `>= statistic - TAU_SIGN`.
    pub exceedances: usize,
    pub delta: f64,
    pub design: Design,
    pub seed: u64,
    pub n_x: usize,
    pub n_y: usize,
    #[serde(skip)]
    pub replicate_statistics: Vec<f64>,
}

/// RNG of replicate `stream` under `seed`.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn p_value(exceed: usize, b: usize) -> f64 {
    (1 + exceed) as f64 / (b + 1) as f64
}

fn count_at_least(reps: &[f64], threshold: f64) -> usize {
    reps.iter().filter(|&&d| d >= threshold - TAU_SIGN).count()
}

/// Replicate statistics under label exchange.
fn null_distribution(engine: &StatisticEngine, x: &[usize], y: &[usize], cfg: &TestConfig) -> Result<Vec<f64>> {
    (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(cfg.seed, b);
            match cfg.design {
                Design::TwoSample => {
                    let mut pooled: Vec<usize> = x.iter().chain(y).copied().collect();
                    pooled.shuffle(&mut rng);
                    let (px, py) = pooled.split_at(x.len());
                    engine.statistic_obs(px, py, 1.0, 1.0)
                }
                Design::Paired => {
                    let mut px = x.to_vec();
                    let mut py = y.to_vec();
                    for i in 0..px.len() {
                        if rng.gen_bool(0.5) {
                            std::mem::swap(&mut px[i], &mut py[i]);
                        }
                    }
                    engine.statistic_obs(&px, &py, 1.0, 1.0)
                }
            }
        })
        .collect()
}

fn validate_test(x: &[ElementId], y: &[ElementId], cfg: &TestConfig) -> Result<()> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidInput("both samples must be nonempty".into()));
    }
    if cfg.design == Design::Paired && x.len() != y.len() {
        return Err(Error::DesignMismatch(format!(
            "paired design needs equal sample sizes, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn positions(obs: &[ElementId], ps: &PreferenceSystem) -> Result<Vec<usize>> {
    obs.iter().map(|e| ps.position(e)).collect()
}

/// Permutation test of `x` against `y`; `ps` should cover the pooled sample.
pub fn permutation_test(x_obs: &[ElementId], y_obs: &[ElementId], ps: &PreferenceSystem, cfg: &TestConfig) -> Result<TestResult> {
    validate_test(x_obs, y_obs, cfg)?;
    let engine = StatisticEngine::new(ps, cfg.delta)?;
    let x = positions(x_obs, ps)?;
    let y = positions(y_obs, ps)?;
    run_test(&engine, &x, &y, cfg)
}

fn run_test(engine: &StatisticEngine, x: &[usize], y: &[usize], cfg: &TestConfig) -> Result<TestResult> {
    let statistic = engine.statistic_obs(x, y, 1.0, 1.0)?;
    let reps = null_distribution(engine, x, y, cfg)?;
    let exceedances = count_at_least(&reps, statistic);
    Ok(TestResult {
        statistic,
        p_value: p_value(exceedances, cfg.replicates),
        replicates: cfg.replicates,
        exceedances,
        delta: cfg.delta,
        design: cfg.design,
        seed: cfg.seed,
        n_x: x.len(),
        n_y: y.len(),
        replicate_statistics: reps,
    })
}

/// Embeds the pooled oriented vectors of two samples; returns the system and
/// the element ids of both samples.
pub fn embed_samples(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    spec: &ScaleSpec,
) -> Result<(EmbeddedSystem, Vec<ElementId>, Vec<ElementId>)> {
    let pooled: Vec<Vec<f64>> = x.iter().chain(y).cloned().collect();
    let e = embed_encoded(&pooled, spec)?;
    let ids: Vec<ElementId> = e.point_element.iter().map(|&i| e.system.elements()[i].clone()).collect();
    let (xi, yi) = ids.split_at(x.len());
    let (xi, yi) = (xi.to_vec(), yi.to_vec());
    Ok((e, xi, yi))
}

/// Convenience: embed two samples of oriented vectors, then test.
pub fn permutation_test_vectors(x: &[Vec<f64>], y: &[Vec<f64>], spec: &ScaleSpec, cfg: &TestConfig) -> Result<TestResult> {
    let (e, xi, yi) = embed_samples(x, y, spec)?;
    permutation_test(&xi, &yi, &e.system, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustPoint {
    pub zeta: f64,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustTestResult {
    pub test: TestResult,
    pub alpha: f64,
    pub grid: Vec<RobustPoint>,
    /// Largest contamination still significant at `alpha`.
    pub zeta_star: Option<f64>,
}

/// Permutation test whose observed statistic is replaced by the robust one
/// at `(zeta, zeta)` for every grid value; the null replicates are computed
/// once, uncontaminated.
pub fn robust_test(
    x_obs: &[ElementId],
    y_obs: &[ElementId],
    ps: &PreferenceSystem,
    cfg: &TestConfig,
    zeta_grid: &[f64],
    alpha: f64,
) -> Result<RobustTestResult> {
    validate_test(x_obs, y_obs, cfg)?;
    if zeta_grid.first() != Some(&0.0) || zeta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("zeta grid must start at 0 and increase strictly".into()));
    }
    for &z in zeta_grid {
        check_zeta(z)?;
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1)")));
    }
    let engine = StatisticEngine::new(ps, cfg.delta)?;
    let x = positions(x_obs, ps)?;
    let y = positions(y_obs, ps)?;
    let test = run_test(&engine, &x, &y, cfg)?;
    let mut grid = Vec::with_capacity(zeta_grid.len());
    for &zeta in zeta_grid {
        let statistic = engine.statistic_obs(&x, &y, 1.0 - zeta, 1.0 - zeta)? - zeta;
        let p = p_value(count_at_least(&test.replicate_statistics, statistic), cfg.replicates);
        grid.push(RobustPoint {
            zeta,
            statistic,
            p_value: p,
        });
    }
    let zeta_star = grid.iter().filter(|g| g.p_value <= alpha).map(|g| g.zeta).fold(None, |acc: Option<f64>, z| {
        Some(acc.map_or(z, |a| a.max(z)))
    });
    Ok(RobustTestResult {
        test,
        alpha,
        grid,
        zeta_star,
    })
}

// ---------------------------------------------------------------------------
// Evaluation tables and fronts

/// Subjects x instances table of metric vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationTable {
    subjects: Vec<String>,
    instances: Vec<String>,
    spec: ScaleSpec,
    values: Vec<Vec<Vec<MetricValue>>>,
    coords: Vec<Vec<Vec<f64>>>,
}

impl EvaluationTable {
    /// `values[s][d]` is the metric vector of subject `s` on instance `d`.
    pub fn new(
        subjects: Vec<String>,
        instances: Vec<String>,
        spec: ScaleSpec,
        values: Vec<Vec<Vec<MetricValue>>>,
    ) -> Result<Self> {
        if subjects.is_empty() || instances.is_empty() {
            return Err(Error::InvalidInput("table needs subjects and instances".into()));
        }
        for names in [&subjects, &instances] {
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != names.len() {
                return Err(Error::InvalidInput("duplicate subject or instance id".into()));
            }
        }
        if values.len() != subjects.len() || values.iter().any(|row| row.len() != instances.len()) {
            return Err(Error::InvalidInput("table is not total over subjects x instances".into()));
        }
        let coords = values
            .iter()
            .map(|row| row.iter().map(|v| spec.encode(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            subjects,
            instances,
            spec,
            values,
            coords,
        })
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn instances(&self) -> &[String] {
        &self.instances
    }

    pub fn spec(&self) -> &ScaleSpec {
        &self.spec
    }

    pub fn value(&self, subject: usize, instance: usize) -> &[MetricValue] {
        &self.values[subject][instance]
    }

    /// Oriented coordinates (larger is better, ordinal levels as ranks).
    pub fn coords(&self, subject: usize, instance: usize) -> &[f64] {
        &self.coords[subject][instance]
    }

    pub fn subject_index(&self, name: &str) -> Result<usize> {
        self.subjects
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownSubject(name.to_string()))
    }
}

/// The embedding of every table cell plus a statistic engine on it.
pub struct TableEngine {
    embedded: EmbeddedSystem,
    engine: StatisticEngine,
    /// Element index of every `[subject][instance]` cell.
    cell: Vec<Vec<usize>>,
}

impl TableEngine {
    pub fn new(table: &EvaluationTable, delta: f64) -> Result<Self> {
        let points: Vec<Vec<f64>> = table.coords.iter().flatten().cloned().collect();
        let embedded = embed_encoded(&points, &table.spec)?;
        let k = table.instances.len();
        let cell = embedded.point_element.chunks(k).map(<[usize]>::to_vec).collect();
        let engine = StatisticEngine::new(&embedded.system, delta)?;
        Ok(Self { embedded, engine, cell })
    }

    pub fn system(&self) -> &PreferenceSystem {
        &self.embedded.system
    }

    /// `min_u sum_d w_d (u(phi(i, d)) - u(phi(j, d)))`.
    pub fn margin(&self, i: usize, j: usize, weights: &[f64]) -> Result<f64> {
        self.margin_cells(&self.cell[i], &self.cell[j], weights)
    }

    fn margin_cells(&self, a: &[usize], b: &[usize], weights: &[f64]) -> Result<f64> {
        let xs: Vec<(usize, f64)> = a.iter().zip(weights).map(|(&e, &w)| (e, w)).collect();
        let ys: Vec<(usize, f64)> = b.iter().zip(weights).map(|(&e, &w)| (e, w)).collect();
        self.engine.statistic(&xs, &ys, 1.0, 1.0)
    }

    /// Full margin matrix under instance weights.
    pub fn margins(&self, weights: &[f64]) -> Result<Vec<Vec<f64>>> {
        let s = self.cell.len();
        if weights.len() != self.cell[0].len() {
            return Err(Error::DimensionMismatch {
                expected: self.cell[0].len(),
                got: weights.len(),
            });
        }
        let flat: Vec<f64> = (0..s * s)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / s, ij % s);
                if i == j {
                    Ok(0.0)
                } else {
                    self.margin(i, j, weights)
                }
            })
            .collect::<Result<_>>()?;
        Ok(flat.chunks(s).map(<[f64]>::to_vec).collect())
    }

    /// Provenance notes of the embedding (synthetic bound points).
    pub fn notes(&self) -> Vec<String> {
        let ps = &self.embedded.system;
        let mut notes = ps.notes().to_vec();
        for (i, e) in ps.elements().iter().enumerate() {
            if ps.is_synthetic(i) {
                notes.push(format!("synthetic bound point {e} at oriented coordinates {:?}", self.embedded.coords[i]));
            }
        }
        notes
    }
}

fn uniform_weights(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginMatrix {
    pub subjects: Vec<String>,
    pub delta: f64,
    /// `margins[i][j]`: worst-case advantage of subject `i` over subject `j`.
    pub margins: Vec<Vec<f64>>,
}

pub fn pairwise_margins(table: &EvaluationTable, delta: f64) -> Result<MarginMatrix> {
    let engine = TableEngine::new(table, delta)?;
    Ok(MarginMatrix {
        subjects: table.subjects.clone(),
        delta,
        margins: engine.margins(&uniform_weights(table.instances.len()))?,
    })
}

/// Indices not excluded at relaxation `epsilon`: `i` is excluded by `j` when
/// `margin(j, i) >= epsilon - TAU_SIGN` and `margin(i, j) < -epsilon - TAU_SIGN`.
pub fn front_from_margins(margins: &[Vec<f64>], epsilon: f64) -> Vec<usize> {
    let s = margins.len();
    (0..s)
        .filter(|&i| {
            !(0..s).any(|j| j != i && margins[j][i] >= epsilon - TAU_SIGN && margins[i][j] < -epsilon - TAU_SIGN)
        })
        .collect()
}

/// Subjects not Pareto-dominated: `j` dominates `i` when it is component-wise
/// at least as good on every instance and strictly better somewhere.
pub fn pareto_front(table: &EvaluationTable) -> Vec<usize> {
    let s = table.subjects.len();
    let k = table.instances.len();
    let dominates = |j: usize, i: usize| {
        let mut strict = false;
        for d in 0..k {
            for (a, b) in table.coords[j][d].iter().zip(&table.coords[i][d]) {
                if a < b {
                    return false;
                }
                strict |= a > b;
            }
        }
        strict
    };
    (0..s).filter(|&i| !(0..s).any(|j| j != i && dominates(j, i))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontResult {
    pub delta: f64,
    pub epsilon: f64,
    pub subjects: Vec<String>,
    pub gsd_front: Vec<String>,
    pub pareto_front: Vec<String>,
    pub margins: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} must be >= 0")));
    }
    Ok(())
}

pub fn gsd_front(table: &EvaluationTable, delta: f64, epsilon: f64) -> Result<FrontResult> {
    gsd_front_weighted(table, delta, epsilon, &uniform_weights(table.instances.len()))
}

/// Front under arbitrary instance weights (e.g. a known population
/// distribution over a finite instance universe).
pub fn gsd_front_weighted(table: &EvaluationTable, delta: f64, epsilon: f64, weights: &[f64]) -> Result<FrontResult> {
    check_epsilon(epsilon)?;
    let engine = TableEngine::new(table, delta)?;
    let margins = engine.margins(weights)?;
    let names = |idx: Vec<usize>| idx.into_iter().map(|i| table.subjects[i].clone()).collect();
    Ok(FrontResult {
        delta,
        epsilon,
        subjects: table.subjects.clone(),
        gsd_front: names(front_from_margins(&margins, epsilon)),
        pareto_front: names(pareto_front(table)),
        margins,
        notes: engine.notes(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipConfig {
    pub delta: f64,
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubTest {
    pub opponent: String,
    /// Empirical margin of the opponent over the candidate.
    pub statistic: f64,
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub candidate: String,
    pub in_front: bool,
    pub alpha: f64,
    pub delta: f64,
    pub replicates: usize,
    pub seed: u64,
    pub subtests: Vec<SubTest>,
}

/// Intersection-union test of "candidate is in the GSD-front": for each
/// opponent, the sub-null "opponent weakly dominates candidate" is tested
/// with paired swaps; the candidate is declared in the front iff all sub-nulls
/// are rejected.
pub fn front_membership_test(
    table: &EvaluationTable,
    candidate: &str,
    opponents: Option<&[String]>,
    cfg: &MembershipConfig,
) -> Result<MembershipResult> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    let c = table.subject_index(candidate)?;
    let opp: Vec<usize> = match opponents {
        Some(list) => list
            .iter()
            .map(|o| {
                let i = table.subject_index(o)?;
                if i == c {
                    return Err(Error::InvalidInput("candidate cannot be its own opponent".into()));
                }
                Ok(i)
            })
            .collect::<Result<_>>()?,
        None => (0..table.subjects.len()).filter(|&i| i != c).collect(),
    };
    let engine = if opp.is_empty() { None } else { Some(TableEngine::new(table, cfg.delta)?) };
    let k = table.instances.len();
    let weights = uniform_weights(k);
    let mut subtests = Vec::with_capacity(opp.len());
    for (n, &o) in opp.iter().enumerate() {
        let engine = engine.as_ref().expect("opponents present");
        let s_obs = engine.margin(o, c, &weights)?;
        let reps: Vec<f64> = (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|b| {
                let mut rng = replicate_rng(cfg.seed, ((n as u64) << 32) | b);
                let mut a = engine.cell[o].clone();
                let mut z = engine.cell[c].clone();
                for d in 0..k {
                    if rng.gen_bool(0.5) {
                        std::mem::swap(&mut a[d], &mut z[d]);
                    }
                }
                engine.margin_cells(&a, &z, &weights)
            })
            .collect::<Result<_>>()?;
        let below = reps.iter().filter(|&&s| s <= s_obs + TAU_SIGN).count();
        let p = p_value(below, cfg.replicates);
        subtests.push(SubTest {
            opponent: table.subjects[o].clone(),
            statistic: s_obs,
            p_value: p,
            rejected: p <= cfg.alpha,
        });
    }
    Ok(MembershipResult {
        candidate: candidate.to_string(),
        in_front: subtests.iter().all(|t| t.rejected),
        alpha: cfg.alpha,
        delta: cfg.delta,
        replicates: cfg.replicates,
        seed: cfg.seed,
        subtests,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::Dimension;

    fn spec1() -> ScaleSpec {
        ScaleSpec::new(vec![Dimension::cardinal("v")]).unwrap()
    }

    fn cfg(design: Design) -> TestConfig {
        TestConfig {
            delta: 0.0,
            design,
            replicates: 99,
            seed: 5,
        }
    }

    fn col(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn identical_samples_give_zero() {
        let (e, xi, _) = embed_samples(&col(&[0.0, 0.5, 1.0]), &col(&[0.0]), &spec1()).unwrap();
        let s = WeightedSample::uniform(&xi).unwrap();
        assert_eq!(empirical_statistic(&s, &s, &e.system, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn paired_identical_gives_p_one() {
        let x = col(&[0.1, 0.4, 0.9, 0.3]);
        let r = permutation_test_vectors(&x, &x, &spec1(), &cfg(Design::Paired)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn paired_needs_equal_lengths() {
        let err = permutation_test_vectors(&col(&[0.0, 1.0]), &col(&[0.5]), &spec1(), &cfg(Design::Paired)).unwrap_err();
        assert!(matches!(err, Error::DesignMismatch(_)));
    }

    #[test]
    fn robust_extremes() {
        let (e, xi, yi) = embed_samples(&col(&[0.0, 0.5, 1.0]), &col(&[0.2, 0.3]), &spec1()).unwrap();
        let sx = WeightedSample::uniform(&xi).unwrap();
        let sy = WeightedSample::uniform(&yi).unwrap();
        let d0 = empirical_statistic(&sx, &sy, &e.system, 0.0).unwrap();
        assert_eq!(robust_statistic(&sx, &sy, &e.system, 0.0, 0.0, 0.0).unwrap(), d0);
        assert_eq!(robust_statistic(&sx, &sy, &e.system, 0.0, 1.0, 1.0).unwrap(), -1.0);
    }

    #[test]
    fn zero_grid_matches_plain_test() {
        let x = col(&[0.6, 0.7, 0.8, 0.9, 1.0]);
        let y = col(&[0.0, 0.1, 0.2, 0.3, 0.4]);
        let c = cfg(Design::TwoSample);
        let (e, xi, yi) = embed_samples(&x, &y, &spec1()).unwrap();
        let plain = permutation_test(&xi, &yi, &e.system, &c).unwrap();
        let rob = robust_test(&xi, &yi, &e.system, &c, &[0.0], 0.05).unwrap();
        assert_eq!(rob.grid[0].p_value, plain.p_value);
        assert_eq!(rob.grid[0].statistic, plain.statistic);
        assert!(robust_test(&xi, &yi, &e.system, &c, &[0.1, 0.2], 0.05).is_err());
    }

    fn table(rows: &[&[f64]]) -> EvaluationTable {
        let subjects = (0..rows.len()).map(|i| format!("c{i}")).collect();
        let instances = (0..rows[0].len()).map(|d| format!("d{d}")).collect();
        let values = rows
            .iter()
            .map(|r| r.iter().map(|&v| vec![MetricValue::Number(v)]).collect())
            .collect();
        EvaluationTable::new(subjects, instances, spec1(), values).unwrap()
    }

    #[test]
    fn margins_diagonal_and_dominance() {
        let t = table(&[&[0.9, 0.8, 0.7], &[0.5, 0.6, 0.7], &[0.2, 0.9, 0.4]]);
        let m = pairwise_margins(&t, 0.0).unwrap();
        for i in 0..3 {
            assert_eq!(m.margins[i][i], 0.0);
        }
        assert!(m.margins[0][1] >= -TAU_SIGN);
    }

    #[test]
    fn single_subject_front() {
        let t = table(&[&[0.1, 0.2]]);
        let f = gsd_front(&t, 0.0, 0.0).unwrap();
        assert_eq!(f.gsd_front, vec!["c0".to_string()]);
        assert_eq!(f.pareto_front, vec!["c0".to_string()]);
    }

    #[test]
    fn membership_edge_cases() {
        let t = table(&[&[0.9, 0.8, 0.7, 0.6], &[0.9, 0.8, 0.7, 0.6], &[0.1, 0.2, 0.3, 0.0]]);
        let c = MembershipConfig {
            delta: 0.0,
            replicates: 19,
            seed: 1,
            alpha: 0.05,
        };
        let r = front_membership_test(&t, "c0", Some(&[]), &c).unwrap();
        assert!(r.in_front && r.subtests.is_empty());
        let r = front_membership_test(&t, "c0", Some(&["c1".to_string()]), &c).unwrap();
        assert_eq!(r.subtests[0].statistic, 0.0);
        assert!(!r.in_front);
        assert!(matches!(
            front_membership_test(&t, "zz", None, &c),
            Err(Error::UnknownSubject(_))
        ));
    }

    #[test]
    fn replicate_streams_differ() {
        let a: u64 = replicate_rng(1, 0).gen();
        let b: u64 = replicate_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, replicate_rng(1, 0).gen::<u64>());
    }
}
