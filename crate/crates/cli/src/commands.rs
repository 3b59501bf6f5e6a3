use std::path::Path;

use gsd_core::credal::{CredalSet, Pmf};
use gsd_core::gsd::{dominating_all, undominated, Act, DominanceVerdict, GsdContext};
use gsd_core::order::ElementId;
use gsd_core::preference::{build_system, check_consistency, EmbeddedSystem, Pair, PreferenceSystem};
use gsd_core::stats::{
    embed_samples, front_membership_test, gsd_front, permutation_test, robust_test, EvaluationTable,
    MembershipConfig, TableEngine, TestConfig,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::dot::front_dot;
use crate::ingest::ingest_evaluations;
use crate::{read_json, CliError, Command, SCHEMA_VERSION};

/// A finished command: the JSON report and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'a str,
    input: Value,
    result: Value,
    notes: Vec<String>,
}

fn outcome(command: &str, input: Value, result: Value, notes: Vec<String>, exit_code: i32) -> Outcome {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        result,
        notes,
    };
    Outcome {
        report: serde_json::to_value(report).expect("report serializes"),
        exit_code,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Preference-system document: `elements`, `r1`, `r2`, optional `bounds`
/// as `[bottom, top]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub elements: Vec<ElementId>,
    #[serde(default)]
    pub r1: Vec<Pair>,
    #[serde(default)]
    pub r2: Vec<(Pair, Pair)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(ElementId, ElementId)>,
}

impl SystemDocument {
    pub fn build(&self) -> Result<PreferenceSystem, CliError> {
        let ps = build_system(self.elements.clone(), &self.r1, &self.r2)?;
        Ok(match &self.bounds {
            Some((bottom, top)) => ps.with_bounds(bottom, top)?,
            None => ps,
        })
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Consistency { system, delta } => consistency(system, *delta),
        Command::Compare {
            system,
            credal,
            acts,
            delta,
        } => compare(system, credal, acts, *delta),
        Command::Test { evals, config, subjects } => {
            let (cfg, table) = load(evals, config, |c| {
                if subjects.is_some() {
                    c.subjects = subjects.clone();
                }
            })?;
            test(evals, &cfg, &table)
        }
        Command::RobustTest {
            evals,
            config,
            subjects,
            zeta_grid,
        } => {
            let (cfg, table) = load(evals, config, |c| {
                if subjects.is_some() {
                    c.subjects = subjects.clone();
                }
                if let Some(g) = zeta_grid {
                    c.zeta_grid = g.clone();
                }
            })?;
            robust(evals, &cfg, &table)
        }
        Command::Front {
            evals,
            config,
            epsilon,
            candidate,
            opponents,
            dot,
        } => {
            let (cfg, table) = load(evals, config, |c| {
                if let Some(e) = epsilon {
                    c.epsilon = *e;
                }
                if candidate.is_some() {
                    c.candidate = candidate.clone();
                    c.opponents = opponents.clone();
                }
            })?;
            front(evals, &cfg, &table, dot.as_deref())
        }
    }
}

fn load(
    evals: &Path,
    config: &Path,
    overrides: impl FnOnce(&mut RunConfig),
) -> Result<(RunConfig, EvaluationTable), CliError> {
    let mut cfg = RunConfig::load(config)?;
    overrides(&mut cfg);
    cfg.validate()?;
    let table = ingest_evaluations(evals, &cfg)?;
    Ok((cfg, table))
}

fn consistency(system: &Path, delta: f64) -> Result<Outcome, CliError> {
    let doc: SystemDocument = read_json(system)?;
    let ps = doc.build()?;
    let rep = check_consistency(&ps, delta)?;
    let exit = if rep.feasible && rep.consistent { 0 } else { 3 };
    let mut notes = rep.notes.clone();
    if !rep.feasible {
        notes.push(format!("the normalized representation set is empty at delta = {delta}"));
    } else if !rep.consistent {
        notes.push("no representation satisfies the strict comparisons with positive slack".into());
    }
    Ok(outcome(
        "consistency",
        json!({ "system": doc, "delta": delta }),
        to_value(&rep),
        notes,
        exit,
    ))
}

#[derive(Serialize)]
struct Comparison<'a> {
    x: &'a str,
    y: &'a str,
    #[serde(flatten)]
    verdict: DominanceVerdict,
}

fn compare(system: &Path, credal: &Path, acts: &Path, delta: f64) -> Result<Outcome, CliError> {
    let doc: SystemDocument = read_json(system)?;
    let m: CredalSet = read_json(credal)?;
    let acts_doc: Vec<Act> = read_json(acts)?;
    if acts_doc.is_empty() {
        return Err(CliError::Usage("acts document lists no acts".into()));
    }
    let ps = doc.build()?;
    let ctx = GsdContext::new(&ps, &m, delta)?;
    let margins = ctx.margin_matrix(&acts_doc)?;
    let mut comparisons = Vec::new();
    for i in 0..acts_doc.len() {
        for j in i + 1..acts_doc.len() {
            comparisons.push(Comparison {
                x: &acts_doc[i].name,
                y: &acts_doc[j].name,
                verdict: DominanceVerdict::from_margins(margins[i][j], margins[j][i]),
            });
        }
    }
    let names = |idx: Vec<usize>| -> Vec<&str> { idx.into_iter().map(|i| acts_doc[i].name.as_str()).collect() };
    let vertices: &[Pmf] = ctx.vertices();
    let mut notes = ps.notes().to_vec();
    notes.push(format!("credal set has {} extreme points", vertices.len()));
    let result = json!({
        "vertex_count": vertices.len(),
        "vertices": vertices,
        "margins": margins,
        "comparisons": comparisons,
        "choice_und": names(undominated(&margins)),
        "choice_max": names(dominating_all(&margins)),
    });
    Ok(outcome(
        "compare",
        json!({ "system": doc, "credal": m, "acts": acts_doc, "delta": delta }),
        result,
        notes,
        0,
    ))
}

fn embedding_notes(e: &EmbeddedSystem) -> Vec<String> {
    let ps = &e.system;
    let mut notes = ps.notes().to_vec();
    for (i, id) in ps.elements().iter().enumerate() {
        if ps.is_synthetic(i) {
            notes.push(format!("synthetic bound point {id} at oriented coordinates {:?}", e.coords[i]));
        }
    }
    notes
}

fn two_subjects(cfg: &RunConfig, table: &EvaluationTable) -> Result<(usize, usize), CliError> {
    match cfg.subjects.as_deref() {
        Some([a, b]) if a != b => Ok((table.subject_index(a)?, table.subject_index(b)?)),
        _ => Err(CliError::Usage("exactly two distinct subjects are required (--subjects A,B)".into())),
    }
}

fn subject_vectors(table: &EvaluationTable, s: usize) -> Vec<Vec<f64>> {
    (0..table.instances().len()).map(|d| table.coords(s, d).to_vec()).collect()
}

fn input_echo(evals: &Path, cfg: &RunConfig, table: &EvaluationTable) -> Value {
    json!({
        "evals": evals.display().to_string(),
        "subjects": table.subjects(),
        "instances": table.instances(),
        "config": cfg,
    })
}

fn multi_delta_note(cfg: &RunConfig, notes: &mut Vec<String>) {
    if cfg.deltas.len() > 1 {
        notes.push("p-values are reported per delta without multiplicity correction".into());
    }
}

fn test(evals: &Path, cfg: &RunConfig, table: &EvaluationTable) -> Result<Outcome, CliError> {
    let (a, b) = two_subjects(cfg, table)?;
    let (e, xi, yi) = embed_samples(&subject_vectors(table, a), &subject_vectors(table, b), table.spec())?;
    let delta_max = check_consistency(&e.system, 0.0)?.delta_max;
    let mut tests = Vec::new();
    for &delta in &cfg.deltas {
        let tc = TestConfig {
            delta,
            design: cfg.design,
            replicates: cfg.replicates,
            seed: cfg.seed,
        };
        tests.push(permutation_test(&xi, &yi, &e.system, &tc)?);
    }
    let mut notes = embedding_notes(&e);
    multi_delta_note(cfg, &mut notes);
    let result = json!({
        "x": table.subjects()[a],
        "y": table.subjects()[b],
        "delta_max": delta_max,
        "elements": e.system.len(),
        "tests": tests,
    });
    Ok(outcome("test", input_echo(evals, cfg, table), result, notes, 0))
}

fn robust(evals: &Path, cfg: &RunConfig, table: &EvaluationTable) -> Result<Outcome, CliError> {
    let (a, b) = two_subjects(cfg, table)?;
    let (e, xi, yi) = embed_samples(&subject_vectors(table, a), &subject_vectors(table, b), table.spec())?;
    let delta_max = check_consistency(&e.system, 0.0)?.delta_max;
    let mut runs = Vec::new();
    for &delta in &cfg.deltas {
        let tc = TestConfig {
            delta,
            design: cfg.design,
            replicates: cfg.replicates,
            seed: cfg.seed,
        };
        runs.push(robust_test(&xi, &yi, &e.system, &tc, &cfg.zeta_grid, cfg.alpha)?);
    }
    let mut notes = embedding_notes(&e);
    multi_delta_note(cfg, &mut notes);
    notes.push("only the observed statistic is contaminated; replicates are uncontaminated".into());
    let result = json!({
        "x": table.subjects()[a],
        "y": table.subjects()[b],
        "delta_max": delta_max,
        "runs": runs,
    });
    Ok(outcome("robust-test", input_echo(evals, cfg, table), result, notes, 0))
}

fn front(evals: &Path, cfg: &RunConfig, table: &EvaluationTable, dot: Option<&Path>) -> Result<Outcome, CliError> {
    let engine = TableEngine::new(table, 0.0)?;
    let delta_max = check_consistency(engine.system(), 0.0)?.delta_max;
    let mut notes = engine.notes();
    let mut fronts = Vec::new();
    let mut membership = Vec::new();
    let mut graphs = String::new();
    for &delta in &cfg.deltas {
        let f = gsd_front(table, delta, cfg.epsilon)?;
        graphs.push_str(&front_dot(&f, &format!("gsd_front_delta_{delta}")));
        if let Some(candidate) = &cfg.candidate {
            let mc = MembershipConfig {
                delta,
                replicates: cfg.replicates,
                seed: cfg.seed,
                alpha: cfg.alpha,
            };
            membership.push(front_membership_test(table, candidate, cfg.opponents.as_deref(), &mc)?);
        }
        fronts.push(f);
    }
    if let Some(path) = dot {
        std::fs::write(path, graphs).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    multi_delta_note(cfg, &mut notes);
    let mut result = json!({
        "delta_max": delta_max,
        "fronts": fronts,
    });
    if cfg.candidate.is_some() {
        result["membership"] = to_value(&membership);
    }
    Ok(outcome("front", input_echo(evals, cfg, table), result, notes, 0))
}
