use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use offeropt::io::{self, GeneratorInfo, Instance};
use offeropt::{generate_instance, GeneratorConfig};

use crate::{parse_range, CliResult, Status};

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Number of subscribers.
    #[arg(long)]
    pub n: usize,
    /// Number of offer types.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Range of monthly value p, as LO,HI.
    #[arg(long, value_parser = parse_range, default_value = "10,100")]
    pub p_range: [f64; 2],
    #[arg(long, value_parser = parse_range, default_value = "0.05,0.6")]
    pub alpha_range: [f64; 2],
    #[arg(long, value_parser = parse_range, default_value = "0.01,0.2")]
    pub gamma_range: [f64; 2],
    /// Value of the cheapest offer type.
    #[arg(long, default_value_t = 5.0)]
    pub delta_base: f64,
    /// Ratio between consecutive offer values.
    #[arg(long, default_value_t = 2.0)]
    pub delta_multiplier: f64,
    /// Total offer units as a fraction of n.
    #[arg(long, default_value_t = 0.5)]
    pub coverage: f64,
}

impl GenArgs {
    pub fn config(&self) -> GeneratorConfig {
        GeneratorConfig {
            n: self.n,
            k: self.k,
            seed: self.seed,
            p_range: self.p_range,
            alpha_range: self.alpha_range,
            gamma_range: self.gamma_range,
            delta_base: self.delta_base,
            delta_multiplier: self.delta_multiplier,
            coverage: self.coverage,
        }
    }
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<Status> {
    let config = args.config();
    let (subscribers, catalog) = generate_instance(&config)?;
    let units = catalog.total_count();
    let mut instance = Instance::new(subscribers, catalog);
    instance.generator = Some(GeneratorInfo::new(config));
    io::write_instance(&args.out, &instance)?;
    writeln!(
        out,
        "wrote {}: {} subscribers, {} offer types, {} offer units",
        args.out.display(),
        args.n,
        args.k,
        units
    )?;
    Ok(Status::Success)
}
