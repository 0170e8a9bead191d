use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use offeropt::io::{self, BenchRow};
use offeropt::{generate_instance, GeneratorConfig, GreedyOffer, GreedyOptions};

use crate::{exec, CliError, CliResult, Selector, Status};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k_list: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Print the fitted exponent of total time against n for each k.
    #[arg(long)]
    pub fit: bool,
    /// Run the (n, k) cells concurrently.
    #[arg(long)]
    pub parallel: bool,
    /// Time each cell this many times and keep the fastest run.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long, default_value_t = 0.5)]
    pub coverage: f64,
    #[arg(long, value_enum, default_value_t)]
    pub selector: Selector,
    /// Build the queues on one thread.
    #[arg(long)]
    pub sequential: bool,
}

fn run_cell(args: &BenchArgs, n: usize, k: usize) -> CliResult<BenchRow> {
    let cfg = GeneratorConfig {
        coverage: args.coverage,
        ..GeneratorConfig::new(n, k, args.seed)
    };
    let (subs, catalog) = generate_instance(&cfg)?;
    let options = GreedyOptions {
        selector: args.selector.into(),
        exec: exec(args.sequential),
        ..Default::default()
    };
    let mut best: Option<BenchRow> = None;
    for _ in 0..args.repeat.max(1) {
        let start = Instant::now();
        let greedy = GreedyOffer::build(&subs, &catalog, options)?;
        let built = Instant::now();
        let (assignment, trace) = greedy.solve();
        let done = Instant::now();
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        let row = BenchRow {
            n,
            k,
            build_ms: ms(built - start),
            solve_ms: ms(done - built),
            total_ms: ms(done - start),
            objective: assignment.objective,
            assigned: trace.assigned_count,
        };
        if best.as_ref().is_none_or(|b| row.total_ms < b.total_ms) {
            best = Some(row);
        }
    }
    Ok(best.expect("at least one run"))
}

/// Times every `(n, k)` cell, `n` outer and `k` inner, in list order.
pub fn run_bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let cells: Vec<(usize, usize)> = args
        .n_list
        .iter()
        .flat_map(|&n| args.k_list.iter().map(move |&k| (n, k)))
        .collect();
    if cells.is_empty() {
        return Err(CliError::Usage(
            "--n-list and --k-list must not be empty".into(),
        ));
    }
    #[cfg(feature = "parallel")]
    if args.parallel {
        use rayon::prelude::*;
        return cells
            .par_iter()
            .map(|&(n, k)| run_cell(args, n, k))
            .collect();
    }
    cells.iter().map(|&(n, k)| run_cell(args, n, k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub k: usize,
    /// Least-squares slope of `ln(total_ms)` against `ln(n)`.
    pub exponent: f64,
    pub points: usize,
}

/// One fit per `k` that has at least two distinct positive `n`.
pub fn fit_exponents(rows: &[BenchRow]) -> Vec<Fit> {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .filter_map(|k| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.k == k && r.n > 0 && r.total_ms > 0.0)
                .map(|r| ((r.n as f64).ln(), r.total_ms.ln()))
                .collect();
            let len = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            (pts.len() >= 2 && sxx > 0.0).then(|| Fit {
                k,
                exponent: sxy / sxx,
                points: pts.len(),
            })
        })
        .collect()
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<Status> {
    let rows = run_bench(args)?;
    io::write_bench_csv(&args.out, &rows)?;
    for r in &rows {
        writeln!(
            out,
            "n {:>8}  k {:>3}  build {:>10.3} ms  solve {:>10.3} ms  total {:>10.3} ms",
            r.n, r.k, r.build_ms, r.solve_ms, r.total_ms
        )?;
    }
    if args.fit {
        for f in fit_exponents(&rows) {
            writeln!(
                out,
                "fit k {}: total time ~ n^{:.3} over {} sizes",
                f.k, f.exponent, f.points
            )?;
        }
    }
    Ok(Status::Success)
}
