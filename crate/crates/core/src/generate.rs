//! Seeded synthetic instances.
//!
//! The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`, both of
//! which have value-stability guarantees. Uniform reals use the top 53 bits
//! of each `u64` draw, and each subscriber consumes three draws in the order
//! `p`, `alpha`, `gamma`. The same config therefore yields the same instance
//! on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{OfferCatalog, OfferType, Subscriber};

/// Name recorded in generated instance files.
pub const GENERATOR_ALGORITHM: &str = "chacha8/seed_from_u64/u53";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub p_range: [f64; 2],
    pub alpha_range: [f64; 2],
    pub gamma_range: [f64; 2],
    /// Offer `j` (0-based) has value `delta_base * delta_multiplier^j`.
    pub delta_base: f64,
    pub delta_multiplier: f64,
    /// Fraction of `n` covered by the total offer count.
    pub coverage: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n: 100,
            k: 5,
            seed: 0,
            p_range: [10.0, 100.0],
            alpha_range: [0.05, 0.6],
            gamma_range: [0.01, 0.2],
            delta_base: 5.0,
            delta_multiplier: 2.0,
            coverage: 0.5,
        }
    }
}

impl GeneratorConfig {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        GeneratorConfig {
            n,
            k,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        for (name, [lo, hi], min, max) in [
            ("p_range", self.p_range, 0.0, f64::INFINITY),
            ("alpha_range", self.alpha_range, 0.0, 1.0),
            ("gamma_range", self.gamma_range, 0.0, f64::INFINITY),
        ] {
            if !(lo.is_finite() && hi.is_finite() && min <= lo && lo <= hi && hi <= max) {
                return bad(format!("{name} [{lo}, {hi}] is invalid"));
            }
        }
        if !(self.delta_base.is_finite() && self.delta_base > 0.0) {
            return bad(format!("delta_base {} must be positive", self.delta_base));
        }
        if !(self.delta_multiplier.is_finite() && self.delta_multiplier > 0.0) {
            return bad(format!(
                "delta_multiplier {} must be positive",
                self.delta_multiplier
            ));
        }
        let top = self.delta_base * self.delta_multiplier.powi(self.k as i32 - 1);
        if !(top.is_finite() && top > 0.0) {
            return bad("offer values overflow".into());
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return bad(format!("coverage {} must lie in (0, 1]", self.coverage));
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    lo + (hi - lo) * u
}

/// Splits `total` over `k` parts as evenly as possible, remainder to the
/// lowest indices.
pub fn even_split(total: u64, k: usize) -> Vec<u64> {
    let (base, extra) = (total / k as u64, (total % k as u64) as usize);
    (0..k).map(|j| base + u64::from(j < extra)).collect()
}

pub fn generate_instance(config: &GeneratorConfig) -> Result<(Vec<Subscriber>, OfferCatalog)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let subscribers = (0..config.n)
        .map(|id| {
            let p = uniform(&mut rng, config.p_range);
            let alpha = uniform(&mut rng, config.alpha_range);
            let gamma = uniform(&mut rng, config.gamma_range);
            Subscriber {
                id,
                p,
                alpha,
                gamma,
            }
        })
        .collect();
    let total = (config.coverage * config.n as f64).floor() as u64;
    let mut value = config.delta_base;
    let offers = even_split(total, config.k)
        .into_iter()
        .map(|count| {
            let o = OfferType::new(value, count);
            value *= config.delta_multiplier;
            o
        })
        .collect();
    Ok((subscribers, OfferCatalog::new(offers)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance() {
        let (subs, catalog) = generate_instance(&GeneratorConfig::new(0, 3, 1)).unwrap();
        assert!(subs.is_empty());
        assert_eq!(catalog.counts(), vec![0, 0, 0]);
    }

    #[test]
    fn deterministic() {
        let cfg = GeneratorConfig::new(50, 4, 99);
        assert_eq!(
            generate_instance(&cfg).unwrap(),
            generate_instance(&cfg).unwrap()
        );
        let other = GeneratorConfig::new(50, 4, 100);
        assert_ne!(
            generate_instance(&cfg).unwrap().0,
            generate_instance(&other).unwrap().0
        );
    }

    #[test]
    fn even_counts() {
        let (_, catalog) = generate_instance(&GeneratorConfig::new(100, 5, 7)).unwrap();
        assert_eq!(catalog.counts(), vec![10; 5]);
        assert_eq!(catalog.total_count(), 50);
        let values: Vec<f64> = catalog.offers.iter().map(|o| o.value).collect();
        assert_eq!(values, vec![5.0, 10.0, 20.0, 40.0, 80.0]);
        assert_eq!(even_split(7, 3), vec![3, 2, 2]);
    }

    #[test]
    fn samples_respect_ranges() {
        let cfg = GeneratorConfig::new(2000, 2, 3);
        let (subs, _) = generate_instance(&cfg).unwrap();
        crate::model::validate_subscribers(&subs).unwrap();
        for s in &subs {
            assert!((10.0..100.0).contains(&s.p));
            assert!((0.05..0.6).contains(&s.alpha));
            assert!((0.01..0.2).contains(&s.gamma));
        }
    }

    #[test]
    fn pinned_stream() {
        // first draws of the pinned generator; changing them breaks
        // reproducibility of every published instance
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = rng.next_u64();
        let mut again = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(a, again.next_u64());
        let (subs, _) = generate_instance(&GeneratorConfig::new(1, 1, 42)).unwrap();
        assert_eq!(
            subs[0].p,
            10.0 + 90.0 * ((a >> 11) as f64 / (1u64 << 53) as f64)
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let base = GeneratorConfig::new(10, 2, 0);
        assert!(generate_instance(&GeneratorConfig {
            k: 0,
            ..base.clone()
        })
        .is_err());
        assert!(generate_instance(&GeneratorConfig {
            coverage: 0.0,
            ..base.clone()
        })
        .is_err());
        assert!(generate_instance(&GeneratorConfig {
            coverage: 1.5,
            ..base.clone()
        })
        .is_err());
        assert!(generate_instance(&GeneratorConfig {
            alpha_range: [0.2, 1.2],
            ..base.clone()
        })
        .is_err());
        assert!(generate_instance(&GeneratorConfig {
            p_range: [50.0, 10.0],
            ..base
        })
        .is_err());
    }
}
