//! Exhaustive reference solvers for small instances.
//!
//! These enumerate every candidate and keep the first maximizer in
//! lexicographic order. They share no search logic with the real solvers.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::greedy::{greedy_offer_with, GreedyOptions};
use crate::model::{validate_subscribers, Assignment, OfferCatalog, Pair, Subscriber};
use crate::segments::{allocation_objective, AllocationMatrix, BudgetInstance, SegmentInstance};

/// Largest number of candidates any oracle will enumerate.
pub const SEARCH_LIMIT: f64 = 1e7;

fn check_size(size: f64) -> Result<()> {
    if size > SEARCH_LIMIT {
        Err(Error::SearchSpaceTooLarge {
            size,
            limit: SEARCH_LIMIT,
        })
    } else {
        Ok(())
    }
}

struct OfferEnumeration<'a> {
    // revenue[i][c]: c = 0 is the zero offer, c = j + 1 is offer type j
    revenue: &'a [Vec<f64>],
    left: Vec<u64>,
    choice: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl OfferEnumeration<'_> {
    fn walk(&mut self, i: usize, acc: f64) {
        if i == self.revenue.len() {
            if self.best.as_ref().is_none_or(|(b, _)| acc > *b) {
                self.best = Some((acc, self.choice.clone()));
            }
            return;
        }
        for c in 0..self.revenue[i].len() {
            if c > 0 {
                if self.left[c - 1] == 0 {
                    continue;
                }
                self.left[c - 1] -= 1;
            }
            self.choice[i] = c;
            self.walk(i + 1, acc + self.revenue[i][c]);
            if c > 0 {
                self.left[c - 1] += 1;
            }
        }
    }
}

/// Optimal assignment by enumerating all `(k + 1)^n` offer vectors.
pub fn brute_force_oop(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
) -> Result<(Assignment, f64)> {
    brute_force_oop_with(subscribers, catalog, Exec::default())
}

/// As [`brute_force_oop`]; the parallel policy splits the search on the
/// first subscriber's choice and returns the identical result.
pub fn brute_force_oop_with(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
    exec: Exec,
) -> Result<(Assignment, f64)> {
    validate_subscribers(subscribers)?;
    catalog.validate()?;
    let n = subscribers.len();
    let k = catalog.len();
    check_size(((k + 1) as f64).powi(n as i32))?;

    let revenue: Vec<Vec<f64>> = subscribers
        .iter()
        .map(|s| {
            std::iter::once(0.0)
                .chain(catalog.offers.iter().map(|o| o.value))
                .map(|x| s.revenue(x))
                .collect()
        })
        .collect();
    let counts = catalog.counts();

    let best = if n == 0 {
        Some((0.0, Vec::new()))
    } else {
        let partial = exec.map_range(k + 1, |first| {
            let mut left = counts.clone();
            if first > 0 {
                if left[first - 1] == 0 {
                    return None;
                }
                left[first - 1] -= 1;
            }
            let mut choice = vec![0; n];
            choice[0] = first;
            let mut search = OfferEnumeration {
                revenue: &revenue,
                left,
                choice,
                best: None,
            };
            search.walk(1, 0.0 + revenue[0][first]);
            search.best
        });
        partial
            .into_iter()
            .flatten()
            .fold(None, |best: Option<(f64, Vec<usize>)>, cand| match best {
                Some(b) if b.0 >= cand.0 => Some(b),
                _ => Some(cand),
            })
    };
    let (objective, choice) = best.expect("the all-zero vector is always feasible");
    let pairs = choice
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| Pair::new(i, c - 1))
        .collect();
    Ok((Assignment { pairs, objective }, objective))
}

/// Steps an odometer with per-digit bounds; returns false after the last
/// combination.
fn advance(digits: &mut [u64], bounds: &[u64]) -> bool {
    for d in (0..digits.len()).rev() {
        if digits[d] < bounds[d] {
            digits[d] += 1;
            return true;
        }
        digits[d] = 0;
    }
    false
}

fn enumerate_matrices(
    probs: &[Vec<f64>],
    bounds: Vec<u64>,
    m: usize,
    feasible: impl Fn(&[Vec<u64>]) -> bool,
) -> Result<AllocationMatrix> {
    check_size(bounds.iter().map(|&b| (b + 1) as f64).product())?;
    let k = probs.len();
    let mut digits = vec![0u64; bounds.len()];
    let mut x = vec![vec![0u64; m]; k];
    let mut best: Option<(f64, Vec<Vec<u64>>)> = None;
    loop {
        for (d, &v) in digits.iter().enumerate() {
            x[d / m][d % m] = v;
        }
        if feasible(&x) {
            let value = allocation_objective(probs, &x);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, x.clone()));
            }
        }
        if !advance(&mut digits, &bounds) {
            break;
        }
    }
    let (_, x) = best.expect("the zero matrix is always feasible");
    Ok(AllocationMatrix::from_counts(probs, x))
}

/// Optimal count allocation by enumerating every matrix with
/// `0 <= x[i][j] <= min(K_i, M_j)`.
pub fn brute_force_segments(instance: &SegmentInstance) -> Result<AllocationMatrix> {
    instance.validate()?;
    let m = instance.m();
    let bounds = (0..instance.k() * m)
        .map(|d| instance.row_caps[d / m].min(instance.col_caps[d % m]))
        .collect();
    enumerate_matrices(&instance.probs, bounds, m, |x| instance.is_feasible(x))
}

/// Optimal budget allocation by enumerating every matrix within the
/// per-variable bounds.
pub fn brute_force_budget(instance: &BudgetInstance) -> Result<AllocationMatrix> {
    instance.validate()?;
    let m = instance.m();
    let bounds = (0..instance.k() * m)
        .map(|d| instance.var_bound(d / m, d % m))
        .collect();
    enumerate_matrices(&instance.probs, bounds, m, |x| instance.is_feasible(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDigest {
    pub n: usize,
    pub k: usize,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub greedy_objective: f64,
    pub oracle_objective: f64,
    /// `greedy / oracle`, or 1 when the oracle objective is not positive.
    pub ratio: f64,
    pub digest: InstanceDigest,
    pub greedy_assignment: Assignment,
    pub optimal_assignment: Assignment,
}

pub fn compare_greedy_vs_oracle(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
) -> Result<ComparisonReport> {
    compare_greedy_vs_oracle_with(subscribers, catalog, &GreedyOptions::default())
}

/// Same as [`compare_greedy_vs_oracle`] with explicit greedy options; the
/// oracle runs on `options.exec`.
pub fn compare_greedy_vs_oracle_with(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
    options: &GreedyOptions,
) -> Result<ComparisonReport> {
    let (optimal_assignment, oracle_objective) =
        brute_force_oop_with(subscribers, catalog, options.exec)?;
    let (greedy_assignment, _) = greedy_offer_with(subscribers, catalog, options)?;
    let greedy_objective = greedy_assignment.objective;
    let ratio = if oracle_objective > 0.0 {
        greedy_objective / oracle_objective
    } else {
        1.0
    };
    Ok(ComparisonReport {
        greedy_objective,
        oracle_objective,
        ratio,
        digest: InstanceDigest {
            n: subscribers.len(),
            k: catalog.len(),
            counts: catalog.counts(),
        },
        greedy_assignment,
        optimal_assignment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSummary {
    pub trials: usize,
    pub min: f64,
    pub mean: f64,
    /// Trials where greedy fell short of the optimum by more than 1e-9.
    pub suboptimal: usize,
}

pub fn summarize(reports: &[ComparisonReport]) -> RatioSummary {
    let trials = reports.len();
    let min = reports.iter().map(|r| r.ratio).fold(1.0, f64::min);
    let mean = if trials == 0 {
        1.0
    } else {
        reports.iter().map(|r| r.ratio).sum::<f64>() / trials as f64
    };
    let suboptimal = reports.iter().filter(|r| r.ratio < 1.0 - 1e-9).count();
    RatioSummary {
        trials,
        min,
        mean,
        suboptimal,
    }
}
