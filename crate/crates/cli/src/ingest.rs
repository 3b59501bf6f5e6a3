//! Long-format evaluation CSV: `subject,instance,metric,value`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use gsd_core::preference::{MetricValue, Scale, ScaleSpec};
use gsd_core::stats::EvaluationTable;
use thiserror::Error;

use crate::config::RunConfig;

pub const HEADER: [&str; 4] = ["subject", "instance", "metric", "value"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },

    #[error("line {line}: metric {metric:?} is not declared in the config")]
    UndeclaredMetric { line: u64, metric: String },

    #[error("line {line}: level {level:?} is not declared for ordinal metric {metric:?}")]
    UnknownOrdinalLevel { line: u64, metric: String, level: String },

    #[error("line {line}: duplicate value for ({subject}, {instance}, {metric})")]
    DuplicateCell {
        line: u64,
        subject: String,
        instance: String,
        metric: String,
    },

    #[error("missing value for subject {subject:?}, instance {instance:?}, metric {metric:?}")]
    MissingCell {
        subject: String,
        instance: String,
        metric: String,
    },

    #[error(transparent)]
    Core(#[from] gsd_core::Error),
}

pub fn ingest_evaluations(path: &Path, config: &RunConfig) -> Result<EvaluationTable, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_evaluations(file, &config.metrics)
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    IngestError::ParseError {
        line,
        message: e.to_string(),
    }
}

/// Subjects and instances keep their order of first appearance.
pub fn read_evaluations<R: Read>(reader: R, spec: &ScaleSpec) -> Result<EvaluationTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(IngestError::ParseError {
            line: 1,
            message: format!("expected header {}, got {}", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let metric_index: HashMap<&str, usize> =
        spec.dimensions.iter().enumerate().map(|(i, d)| (d.name.as_str(), i)).collect();
    let mut subjects: Vec<String> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    let mut cells: HashMap<(usize, usize, usize), MetricValue> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let (subject, instance, metric, raw) = (&rec[0], &rec[1], &rec[2], &rec[3]);
        if subject.is_empty() || instance.is_empty() {
            return Err(IngestError::ParseError {
                line,
                message: "empty subject or instance".into(),
            });
        }
        let &m = metric_index.get(metric).ok_or_else(|| IngestError::UndeclaredMetric {
            line,
            metric: metric.to_string(),
        })?;
        let value = match &spec.dimensions[m].scale {
            Scale::Cardinal => match raw.parse::<f64>() {
                Ok(x) if x.is_finite() => MetricValue::Number(x),
                _ => {
                    return Err(IngestError::ParseError {
                        line,
                        message: format!("metric {metric:?} expects a finite number, got {raw:?}"),
                    })
                }
            },
            Scale::Ordinal { levels } => {
                if !levels.iter().any(|l| l == raw) {
                    return Err(IngestError::UnknownOrdinalLevel {
                        line,
                        metric: metric.to_string(),
                        level: raw.to_string(),
                    });
                }
                MetricValue::Level(raw.to_string())
            }
        };
        let s = intern(&mut subjects, subject);
        let d = intern(&mut instances, instance);
        if cells.insert((s, d, m), value).is_some() {
            return Err(IngestError::DuplicateCell {
                line,
                subject: subject.into(),
                instance: instance.into(),
                metric: metric.into(),
            });
        }
    }
    if subjects.is_empty() {
        return Err(IngestError::ParseError {
            line: 1,
            message: "no evaluation rows".into(),
        });
    }
    let mut values = Vec::with_capacity(subjects.len());
    for (s, subject) in subjects.iter().enumerate() {
        let mut row = Vec::with_capacity(instances.len());
        for (d, instance) in instances.iter().enumerate() {
            let mut v = Vec::with_capacity(spec.r());
            for (m, dim) in spec.dimensions.iter().enumerate() {
                let x = cells.remove(&(s, d, m)).ok_or_else(|| IngestError::MissingCell {
                    subject: subject.clone(),
                    instance: instance.clone(),
                    metric: dim.name.clone(),
                })?;
                v.push(x);
            }
            row.push(v);
        }
        values.push(row);
    }
    Ok(EvaluationTable::new(subjects, instances, spec.clone(), values)?)
}

fn intern(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|x| x == name) {
        Some(i) => i,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

/// Writes the table back in long format (subject-major, then instance, then
/// metric in declaration order).
pub fn write_evaluations<W: Write>(table: &EvaluationTable, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for (s, subject) in table.subjects().iter().enumerate() {
        for (d, instance) in table.instances().iter().enumerate() {
            for (dim, v) in table.spec().dimensions.iter().zip(table.value(s, d)) {
                w.write_record([subject.as_str(), instance.as_str(), dim.name.as_str(), &v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
