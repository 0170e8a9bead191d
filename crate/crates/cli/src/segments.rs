use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use offeropt::io::{self, SegmentProblem};
use offeropt::{
    solve_budget_allocation, solve_count_allocation, AllocationMatrix, BranchBoundOptions,
};

use crate::{CliResult, Status};

#[derive(Debug, Clone, Args)]
pub struct SegmentsArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Branch-and-bound node limit (budget mode).
    #[arg(long, default_value_t = BranchBoundOptions::default().node_limit)]
    pub node_limit: u64,
}

/// Solves either mode. The flag is `None` in count mode, which always
/// finishes.
pub(crate) fn solve_problem(
    problem: &SegmentProblem,
    node_limit: u64,
) -> CliResult<(AllocationMatrix, Option<bool>)> {
    Ok(match problem {
        SegmentProblem::Counts(inst) => (solve_count_allocation(inst)?, None),
        SegmentProblem::Budget(inst) => {
            let s = solve_budget_allocation(inst, &BranchBoundOptions { node_limit })?;
            (s.allocation, Some(s.complete))
        }
    })
}

pub fn cmd_segments(args: &SegmentsArgs, out: &mut dyn Write) -> CliResult<Status> {
    let problem = io::read_segment_instance(&args.instance)?;
    let (allocation, complete) = solve_problem(&problem, args.node_limit)?;
    io::write_allocation(&args.out, &allocation, complete)?;
    let mode = match problem {
        SegmentProblem::Counts(_) => "counts",
        SegmentProblem::Budget(_) => "budget",
    };
    let units: u64 = allocation.x.iter().flatten().sum();
    writeln!(
        out,
        "mode {mode}  objective {:.6}  units {units}",
        allocation.objective
    )?;
    Ok(if complete == Some(false) {
        Status::Incomplete
    } else {
        Status::Success
    })
}
