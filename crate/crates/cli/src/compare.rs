use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use offeropt::io;
use offeropt::oracle::{summarize, ComparisonReport};
use offeropt::{compare_greedy_vs_oracle_with, generate_instance, GeneratorConfig, GreedyOptions};

use crate::{exec, CliError, CliResult, Status};

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Compare on a single instance file.
    #[arg(long, conflicts_with = "trials")]
    pub instance: Option<PathBuf>,
    /// Number of generated instances; trial `t` uses seed `seed + t`.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subscriber counts cycled through by the trials.
    #[arg(long, value_delimiter = ',', default_value = "6")]
    pub n_list: Vec<usize>,
    /// Offer-type counts cycled through by the trials.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub k_list: Vec<usize>,
    /// Total offer units as a fraction of n; below 1 makes offers scarce.
    #[arg(long, default_value_t = 0.5)]
    pub coverage: f64,
    /// Give every offer type n units, so nothing is scarce.
    #[arg(long)]
    pub unlimited: bool,
    #[arg(long)]
    pub no_harm: bool,
    #[arg(long)]
    pub sequential: bool,
}

impl CompareArgs {
    /// Generator settings for trial `t`.
    pub fn trial_config(&self, t: usize) -> GeneratorConfig {
        let a = self.n_list.len().max(1);
        let n = self.n_list.get(t % a).copied().unwrap_or(6);
        let k = self
            .k_list
            .get((t / a) % self.k_list.len().max(1))
            .copied()
            .unwrap_or(3);
        let coverage = if self.unlimited { 1.0 } else { self.coverage };
        GeneratorConfig {
            coverage,
            ..GeneratorConfig::new(n, k, self.seed.wrapping_add(t as u64))
        }
    }

    fn options(&self) -> GreedyOptions {
        GreedyOptions {
            no_harm: self.no_harm,
            exec: exec(self.sequential),
            ..Default::default()
        }
    }
}

/// Runs the generated trials and returns one report per trial.
pub fn run_batch(args: &CompareArgs) -> CliResult<Vec<ComparisonReport>> {
    let trials = args
        .trials
        .ok_or_else(|| CliError::Usage("--trials or --instance is required".into()))?;
    if args.n_list.is_empty() || args.k_list.is_empty() {
        return Err(CliError::Usage(
            "--n-list and --k-list must not be empty".into(),
        ));
    }
    let options = args.options();
    (0..trials)
        .map(|t| {
            let cfg = args.trial_config(t);
            let (subs, mut catalog) = generate_instance(&cfg)?;
            if args.unlimited {
                for o in &mut catalog.offers {
                    o.count = cfg.n as u64;
                }
            }
            Ok(compare_greedy_vs_oracle_with(&subs, &catalog, &options)?)
        })
        .collect()
}

fn exceeds_oracle(r: &ComparisonReport) -> bool {
    r.greedy_objective > r.oracle_objective + 1e-9 * r.oracle_objective.abs().max(1.0)
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<Status> {
    let reports = match &args.instance {
        Some(path) => {
            let inst = io::read_instance(path)?;
            let r =
                compare_greedy_vs_oracle_with(&inst.subscribers, &inst.catalog, &args.options())?;
            writeln!(
                out,
                "greedy {:.9}  oracle {:.9}  ratio {:.9}",
                r.greedy_objective, r.oracle_objective, r.ratio
            )?;
            vec![r]
        }
        None => {
            let reports = run_batch(args)?;
            let s = summarize(&reports);
            writeln!(
                out,
                "trials {}  min ratio {:.9}  mean ratio {:.9}  below optimum {}",
                s.trials, s.min, s.mean, s.suboptimal
            )?;
            reports
        }
    };
    let violations = reports.iter().filter(|r| exceeds_oracle(r)).count();
    if violations > 0 {
        writeln!(
            out,
            "greedy exceeded the exhaustive optimum on {violations} instance(s)"
        )?;
        return Ok(Status::Failed);
    }
    Ok(Status::Success)
}
