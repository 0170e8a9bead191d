//! Both stages in one run.
//!
//! A manifest names the segment problem, the value of each offer type and
//! one subscriber file per segment:
//!
//! ```json
//! {
//!   "schema": "offeropt/v1",
//!   "segments": "segments.json",
//!   "offers": [{"label": "small", "value": 5.0}, {"value": 10.0}],
//!   "subscribers": [{"segment": 0, "path": "seg0.json"}, {"segment": 1, "path": "seg1.json"}]
//! }
//! ```
//!
//! Paths are relative to the manifest. Subscriber files are instance
//! documents; their own offer lists are ignored, since each segment's
//! catalog is column `j` of the stage-one allocation.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use offeropt::io::{self, SegmentProblem, SCHEMA};
use offeropt::{
    acceptance_probability, greedy_offer_with, AllocationMatrix, BranchBoundOptions, GreedyOptions,
    OfferCatalog, OfferType, Pair,
};
use serde::{Deserialize, Serialize};

use crate::segments::solve_problem;
use crate::{exec, CliError, CliResult, Status};

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Extension: never hand out an offer that earns less than the zero
    /// offer.
    #[arg(long)]
    pub no_harm: bool,
    #[arg(long, default_value_t = BranchBoundOptions::default().node_limit)]
    pub node_limit: u64,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestOffer {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFile {
    pub segment: usize,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub segments: PathBuf,
    pub offers: Vec<ManifestOffer>,
    pub subscribers: Vec<SegmentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentAssignment {
    pub segment: usize,
    /// Offer units per type granted to this segment.
    pub counts: Vec<u64>,
    pub pairs: Vec<Pair>,
    pub objective: f64,
    /// Sum of acceptance probabilities over the assigned pairs.
    pub expected_acceptances: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelinePlan {
    pub schema: String,
    pub segment_allocation: AllocationMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    pub per_segment_assignments: Vec<SegmentAssignment>,
    /// Expected acceptances of the subscriber-level assignments, summed
    /// over all segments.
    pub combined_expected_acceptances: f64,
    /// Expected revenue summed over all segments.
    pub total_objective: f64,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|source| io::IoError::Io {
        path: path.into(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| io::IoError::Parse {
        path: path.into(),
        source,
    })?;
    if manifest.schema != SCHEMA {
        return Err(io::IoError::Schema {
            path: path.into(),
            found: manifest.schema,
        }
        .into());
    }
    Ok(manifest)
}

pub fn run_pipeline(args: &PipelineArgs) -> CliResult<PipelinePlan> {
    let manifest = read_manifest(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let problem = io::read_segment_instance(base.join(&manifest.segments))?;
    let (k, m) = match &problem {
        SegmentProblem::Counts(inst) => (inst.k(), inst.m()),
        SegmentProblem::Budget(inst) => (inst.k(), inst.m()),
    };
    if manifest.offers.len() != k {
        return Err(bad(format!(
            "manifest lists {} offers, segment problem has {k} offer types",
            manifest.offers.len()
        )));
    }
    if manifest.subscribers.len() != m {
        return Err(bad(format!(
            "manifest lists {} subscriber files, segment problem has {m} segments",
            manifest.subscribers.len()
        )));
    }
    let mut files: Vec<Option<&Path>> = vec![None; m];
    for f in &manifest.subscribers {
        let slot = files
            .get_mut(f.segment)
            .ok_or_else(|| bad(format!("segment {} out of range", f.segment)))?;
        if slot.replace(&f.path).is_some() {
            return Err(bad(format!("segment {} listed twice", f.segment)));
        }
    }

    let (allocation, complete) = solve_problem(&problem, args.node_limit)?;
    let options = GreedyOptions {
        no_harm: args.no_harm,
        exec: exec(args.sequential),
        ..Default::default()
    };
    let mut per_segment = Vec::with_capacity(m);
    for (j, file) in files.into_iter().enumerate() {
        let subscribers =
            io::read_instance(base.join(file.expect("every segment has a file")))?.subscribers;
        let counts = allocation.column(j);
        let catalog = OfferCatalog::new(
            manifest
                .offers
                .iter()
                .zip(&counts)
                .map(|(o, &count)| OfferType {
                    label: o.label.clone(),
                    value: o.value,
                    count,
                })
                .collect(),
        );
        let (assignment, _) = greedy_offer_with(&subscribers, &catalog, &options)?;
        let mut expected_acceptances = 0.0;
        for p in &assignment.pairs {
            expected_acceptances += acceptance_probability(
                subscribers[p.subscriber].gamma,
                catalog.offers[p.offer].value,
            )?;
        }
        per_segment.push(SegmentAssignment {
            segment: j,
            counts,
            pairs: assignment.pairs,
            objective: assignment.objective,
            expected_acceptances,
        });
    }
    Ok(PipelinePlan {
        schema: SCHEMA.into(),
        segment_allocation: allocation,
        complete,
        combined_expected_acceptances: per_segment.iter().map(|s| s.expected_acceptances).sum(),
        total_objective: per_segment.iter().map(|s| s.objective).sum(),
        per_segment_assignments: per_segment,
    })
}

pub fn cmd_pipeline(args: &PipelineArgs, out: &mut dyn Write) -> CliResult<Status> {
    let plan = run_pipeline(args)?;
    let mut text = serde_json::to_string_pretty(&plan).expect("plan serializes");
    text.push('\n');
    std::fs::write(&args.out, text).map_err(|source| io::IoError::Io {
        path: args.out.clone(),
        source,
    })?;
    writeln!(
        out,
        "segments {}  stage-1 objective {:.6}  total objective {:.6}  expected acceptances {:.6}",
        plan.per_segment_assignments.len(),
        plan.segment_allocation.objective,
        plan.total_objective,
        plan.combined_expected_acceptances,
    )?;
    Ok(if plan.complete == Some(false) {
        Status::Incomplete
    } else {
        Status::Success
    })
}
