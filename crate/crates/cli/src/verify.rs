use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use offeropt::io;
use offeropt::verify_assignment;

use crate::{CliResult, Status};

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub assignment: PathBuf,
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<Status> {
    let instance = io::read_instance(&args.instance)?;
    let assignment = io::read_assignment(&args.assignment)?;
    let report = verify_assignment(&assignment, &instance.subscribers, &instance.catalog);
    for c in &report.checks {
        if c.passed {
            writeln!(out, "ok    {}", c.name)?;
        } else {
            writeln!(out, "FAIL  {}: {}", c.name, c.detail)?;
        }
    }
    if let Some(obj) = report.recomputed_objective {
        writeln!(
            out,
            "objective reported {:.9} recomputed {:.9}",
            assignment.objective, obj
        )?;
    }
    Ok(if report.passed() {
        Status::Success
    } else {
        Status::Failed
    })
}
