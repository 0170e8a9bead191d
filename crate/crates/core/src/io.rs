//! File formats.
//!
//! Instances, assignments, segment problems and allocations are JSON
//! documents tagged with `"schema": "offeropt/v1"`. Benchmark results and
//! greedy traces are CSV. Floats are written in shortest round-trip form, so
//! a write followed by a read reproduces every value exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{GeneratorConfig, GENERATOR_ALGORITHM};
use crate::greedy::GreedyTrace;
use crate::model::{validate_subscribers, Assignment, OfferCatalog, OfferType, Pair, Subscriber};
use crate::segments::{AllocationMatrix, BudgetInstance, SegmentInstance};

pub const SCHEMA: &str = "offeropt/v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{path}: unsupported schema {found:?}, expected {SCHEMA:?}")]
    Schema { path: PathBuf, found: String },

    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: crate::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

pub type IoResult<T> = std::result::Result<T, IoError>;

trait Versioned {
    fn schema(&self) -> &str;
}

fn read_doc<T: DeserializeOwned + Versioned>(path: &Path) -> IoResult<T> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    parse_doc(&text, path)
}

fn parse_doc<T: DeserializeOwned + Versioned>(text: &str, path: &Path) -> IoResult<T> {
    // check the tag first so a version mismatch is not reported as a
    // missing field
    #[derive(Deserialize)]
    struct Tag {
        schema: Option<String>,
    }
    if let Ok(Tag {
        schema: Some(found),
    }) = serde_json::from_str::<Tag>(text)
    {
        if found != SCHEMA {
            return Err(IoError::Schema {
                path: path.into(),
                found,
            });
        }
    }
    let doc: T = serde_json::from_str(text).map_err(|source| IoError::Parse {
        path: path.into(),
        source,
    })?;
    if doc.schema() != SCHEMA {
        return Err(IoError::Schema {
            path: path.into(),
            found: doc.schema().to_string(),
        });
    }
    Ok(doc)
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn write_text(path: &Path, text: &str) -> IoResult<()> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}

macro_rules! versioned {
    ($($t:ty),*) => {$(
        impl Versioned for $t {
            fn schema(&self) -> &str {
                &self.schema
            }
        }
    )*};
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub algorithm: String,
    pub config: GeneratorConfig,
}

impl GeneratorInfo {
    pub fn new(config: GeneratorConfig) -> Self {
        GeneratorInfo {
            algorithm: GENERATOR_ALGORITHM.to_string(),
            config,
        }
    }
}

/// A subscriber base with its offer catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub subscribers: Vec<Subscriber>,
    pub catalog: OfferCatalog,
    pub generator: Option<GeneratorInfo>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    schema: String,
    subscribers: Vec<Subscriber>,
    offers: Vec<OfferType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorInfo>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentDoc {
    schema: String,
    pairs: Vec<Pair>,
    objective: f64,
}

/// Segment problem in either mode, tagged by `"mode"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SegmentProblem {
    Counts(SegmentInstance),
    Budget(BudgetInstance),
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    schema: String,
    #[serde(flatten)]
    problem: SegmentProblem,
}

#[derive(Serialize, Deserialize)]
struct AllocationDoc {
    schema: String,
    x: Vec<Vec<u64>>,
    objective: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
}

versioned!(InstanceDoc, AssignmentDoc, SegmentDoc, AllocationDoc);

impl Instance {
    pub fn new(subscribers: Vec<Subscriber>, catalog: OfferCatalog) -> Self {
        Instance {
            subscribers,
            catalog,
            generator: None,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(&InstanceDoc {
            schema: SCHEMA.into(),
            subscribers: self.subscribers.clone(),
            offers: self.catalog.offers.clone(),
            generator: self.generator.clone(),
        })
    }

    pub fn from_json(text: &str, origin: &Path) -> IoResult<Self> {
        let doc: InstanceDoc = parse_doc(text, origin)?;
        let inst = Instance {
            subscribers: doc.subscribers,
            catalog: OfferCatalog::new(doc.offers),
            generator: doc.generator,
        };
        validate_subscribers(&inst.subscribers)
            .and_then(|_| inst.catalog.validate())
            .map_err(|source| IoError::Invalid {
                path: origin.into(),
                source,
            })?;
        Ok(inst)
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> IoResult<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    Instance::from_json(&text, path)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> IoResult<()> {
    write_text(path.as_ref(), &instance.to_json())
}

pub fn assignment_to_json(assignment: &Assignment) -> String {
    to_json(&AssignmentDoc {
        schema: SCHEMA.into(),
        pairs: assignment.pairs.clone(),
        objective: assignment.objective,
    })
}

pub fn read_assignment(path: impl AsRef<Path>) -> IoResult<Assignment> {
    let doc: AssignmentDoc = read_doc(path.as_ref())?;
    Ok(Assignment {
        pairs: doc.pairs,
        objective: doc.objective,
    })
}

pub fn write_assignment(path: impl AsRef<Path>, assignment: &Assignment) -> IoResult<()> {
    write_text(path.as_ref(), &assignment_to_json(assignment))
}

pub fn segment_problem_to_json(problem: &SegmentProblem) -> String {
    to_json(&SegmentDoc {
        schema: SCHEMA.into(),
        problem: problem.clone(),
    })
}

pub fn read_segment_instance(path: impl AsRef<Path>) -> IoResult<SegmentProblem> {
    let path = path.as_ref();
    let doc: SegmentDoc = read_doc(path)?;
    let checked = match &doc.problem {
        SegmentProblem::Counts(inst) => inst.validate(),
        SegmentProblem::Budget(inst) => inst.validate(),
    };
    checked.map_err(|source| IoError::Invalid {
        path: path.into(),
        source,
    })?;
    Ok(doc.problem)
}

pub fn write_segment_instance(path: impl AsRef<Path>, problem: &SegmentProblem) -> IoResult<()> {
    write_text(path.as_ref(), &segment_problem_to_json(problem))
}

/// An allocation plus the completion flag of the solver that produced it
/// (`None` for solvers that always finish).
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationRecord {
    pub allocation: AllocationMatrix,
    pub complete: Option<bool>,
}

pub fn allocation_to_json(allocation: &AllocationMatrix, complete: Option<bool>) -> String {
    to_json(&AllocationDoc {
        schema: SCHEMA.into(),
        x: allocation.x.clone(),
        objective: allocation.objective,
        complete,
    })
}

pub fn read_allocation(path: impl AsRef<Path>) -> IoResult<AllocationRecord> {
    let doc: AllocationDoc = read_doc(path.as_ref())?;
    Ok(AllocationRecord {
        allocation: AllocationMatrix {
            x: doc.x,
            objective: doc.objective,
        },
        complete: doc.complete,
    })
}

pub fn write_allocation(
    path: impl AsRef<Path>,
    allocation: &AllocationMatrix,
    complete: Option<bool>,
) -> IoResult<()> {
    write_text(path.as_ref(), &allocation_to_json(allocation, complete))
}

/// One row of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
    pub objective: f64,
    pub assigned: usize,
}

pub const BENCH_HEADER: &str = "n,k,build_ms,solve_ms,total_ms,objective,assigned";

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv {
        path: path.into(),
        source,
    }
}

pub fn write_bench_csv(path: impl AsRef<Path>, rows: &[BenchRow]) -> IoResult<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    if rows.is_empty() {
        w.write_record(BENCH_HEADER.split(','))
            .map_err(csv_err(path))?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}

pub fn read_bench_csv(path: impl AsRef<Path>) -> IoResult<Vec<BenchRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(csv_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub subscriber: usize,
    pub offer: usize,
    pub revenue: f64,
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &GreedyTrace) -> IoResult<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    if trace.steps.is_empty() {
        w.write_record(["step", "subscriber", "offer", "revenue"])
            .map_err(csv_err(path))?;
    }
    for (step, s) in trace.steps.iter().enumerate() {
        w.serialize(TraceRow {
            step,
            subscriber: s.subscriber,
            offer: s.offer,
            revenue: s.revenue,
        })
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> IoResult<Vec<TraceRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(csv_err(path))
}
