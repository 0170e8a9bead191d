use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use offeropt::io;
use offeropt::{GreedyOffer, GreedyOptions};

use crate::{exec, CliResult, Selector, Status};

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Extension: leave a subscriber on the zero offer when every
    /// remaining offer would earn less than that.
    #[arg(long)]
    pub no_harm: bool,
    /// Also write the selection trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub selector: Selector,
    /// Build the queues on one thread.
    #[arg(long)]
    pub sequential: bool,
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CliResult<Status> {
    let instance = io::read_instance(&args.instance)?;
    let options = GreedyOptions {
        no_harm: args.no_harm,
        selector: args.selector.into(),
        exec: exec(args.sequential),
    };

    let start = Instant::now();
    let greedy = GreedyOffer::build(&instance.subscribers, &instance.catalog, options)?;
    let built = Instant::now();
    let (assignment, trace) = greedy.solve();
    let done = Instant::now();

    io::write_assignment(&args.out, &assignment)?;
    if let Some(path) = &args.trace {
        io::write_trace_csv(path, &trace)?;
    }
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    writeln!(
        out,
        "objective {:.6}  assigned {}/{}  build {:.3} ms  solve {:.3} ms  total {:.3} ms",
        assignment.objective,
        trace.assigned_count,
        instance.subscribers.len(),
        ms(built - start),
        ms(done - built),
        ms(done - start),
    )?;
    if args.no_harm {
        writeln!(
            out,
            "no-harm: {} subscribers left on the zero offer",
            trace.skipped.len()
        )?;
    }
    Ok(Status::Success)
}
