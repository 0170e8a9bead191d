//! Greedy offer assignment.
//!
//! Repeatedly picks the remaining `(subscriber, offer)` pair with the largest
//! expected revenue, assigns it, removes the subscriber from every queue and
//! retires an offer type once its units run out. Stops when no offers or no
//! subscribers remain.

use crate::error::Result;
use crate::exec::Exec;
use crate::heapset::{HeapSet, RootSelector};
use crate::model::{objective_of_choices, within_rel, Assignment, OfferCatalog, Pair, Subscriber};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Skip a subscriber whose best available offer earns less than the
    /// zero-offer baseline. Off by default.
    pub no_harm: bool,
    pub selector: RootSelector,
    pub exec: Exec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub subscriber: usize,
    pub offer: usize,
    pub revenue: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyTrace {
    /// Assignments in selection order.
    pub steps: Vec<Step>,
    /// Units left per offer type.
    pub remaining_offers: Vec<u64>,
    pub assigned_count: usize,
    /// Subscribers passed over in no-harm mode, in the order they came up.
    pub skipped: Vec<usize>,
}

/// A built instance, ready to run. Splitting construction from the loop
/// lets callers time the two phases separately.
#[derive(Debug, Clone)]
pub struct GreedyOffer<'a> {
    subscribers: &'a [Subscriber],
    catalog: &'a OfferCatalog,
    heaps: HeapSet,
    options: GreedyOptions,
}

impl<'a> GreedyOffer<'a> {
    pub fn build(
        subscribers: &'a [Subscriber],
        catalog: &'a OfferCatalog,
        options: GreedyOptions,
    ) -> Result<Self> {
        let heaps = HeapSet::build_with(subscribers, catalog, options.exec, options.selector)?;
        Ok(GreedyOffer {
            subscribers,
            catalog,
            heaps,
            options,
        })
    }

    pub fn solve(mut self) -> (Assignment, GreedyTrace) {
        let mut counts = self.catalog.counts();
        let mut offers_left: u64 = counts.iter().sum();
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                self.heaps.delete_queue(j).expect("fresh queue");
            }
        }

        let mut trace = GreedyTrace::default();
        let mut choices = vec![None; self.subscribers.len()];
        while offers_left > 0 && self.heaps.remaining_subscribers() > 0 {
            let (i, j, revenue) = self
                .heaps
                .peek_max()
                .expect("live queue while offers remain");
            self.heaps.delete_subscriber(i).expect("subscriber is live");
            if self.options.no_harm && revenue < self.subscribers[i].baseline() {
                trace.skipped.push(i);
                continue;
            }
            choices[i] = Some(j);
            trace.steps.push(Step {
                subscriber: i,
                offer: j,
                revenue,
            });
            counts[j] -= 1;
            offers_left -= 1;
            if counts[j] == 0 {
                self.heaps.delete_queue(j).expect("queue is live");
            }
        }

        let objective = objective_of_choices(self.subscribers, self.catalog, &choices);
        let pairs = trace
            .steps
            .iter()
            .map(|s| Pair::new(s.subscriber, s.offer))
            .collect();
        trace.assigned_count = trace.steps.len();
        trace.remaining_offers = counts;
        (Assignment { pairs, objective }, trace)
    }
}

pub fn greedy_offer(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
) -> Result<(Assignment, GreedyTrace)> {
    greedy_offer_with(subscribers, catalog, &GreedyOptions::default())
}

pub fn greedy_offer_with(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
    options: &GreedyOptions,
) -> Result<(Assignment, GreedyTrace)> {
    Ok(GreedyOffer::build(subscribers, catalog, *options)?.solve())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Objective recomputed from scratch, when the pairs reference valid
    /// subscribers and offers.
    pub recomputed_objective: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, problems: Vec<String>) {
        let passed = problems.is_empty();
        let detail = if passed {
            "ok".to_string()
        } else {
            problems.join("; ")
        };
        self.checks.push(Check {
            name,
            passed,
            detail,
        });
    }
}

const BUDGET_TOL: f64 = 1e-9;

/// Checks an assignment against every constraint of the offer problem and
/// recomputes its objective. Violations are reported, never raised.
pub fn verify_assignment(
    assignment: &Assignment,
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
) -> VerificationReport {
    let mut report = VerificationReport::default();
    let n = subscribers.len();
    let k = catalog.len();

    let mut input_problems = Vec::new();
    if let Err(e) = crate::model::validate_subscribers(subscribers) {
        input_problems.push(e.to_string());
    }
    if let Err(e) = catalog.validate() {
        input_problems.push(e.to_string());
    }
    let inputs_ok = input_problems.is_empty();
    report.push("inputs", input_problems);

    let mut refs = Vec::new();
    for p in &assignment.pairs {
        if p.subscriber >= n {
            refs.push(format!("unknown subscriber {}", p.subscriber));
        }
        if p.offer >= k {
            refs.push(format!("unknown offer type {}", p.offer));
        }
    }
    let refs_ok = refs.is_empty();
    report.push("references", refs);

    let valid: Vec<Pair> = assignment
        .pairs
        .iter()
        .copied()
        .filter(|p| p.subscriber < n && p.offer < k)
        .collect();

    let mut sorted = valid.clone();
    sorted.sort_unstable();
    let dup_pairs: Vec<String> = sorted
        .windows(2)
        .filter(|w| w[0] == w[1])
        .map(|w| format!("pair ({}, {}) repeated", w[0].subscriber, w[0].offer))
        .collect();
    report.push("binary_decision", dup_pairs);

    let mut per_subscriber = vec![0usize; n];
    let mut per_offer = vec![0u64; k];
    for p in &valid {
        per_subscriber[p.subscriber] += 1;
        per_offer[p.offer] += 1;
    }
    report.push(
        "one_offer_per_subscriber",
        per_subscriber
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 1)
            .map(|(i, c)| format!("subscriber {i} receives {c} offers"))
            .collect(),
    );
    report.push(
        "offer_count",
        per_offer
            .iter()
            .zip(&catalog.offers)
            .enumerate()
            .filter(|(_, (&used, o))| used > o.count)
            .map(|(j, (used, o))| format!("offer type {j} used {used} > {}", o.count))
            .collect(),
    );

    let spend: Vec<f64> = per_offer
        .iter()
        .zip(&catalog.offers)
        .map(|(&u, o)| u as f64 * o.value)
        .collect();
    report.push(
        "type_budget",
        spend
            .iter()
            .zip(&catalog.offers)
            .enumerate()
            .filter(|(_, (&s, o))| s > o.total_value() + BUDGET_TOL * o.total_value().max(1.0))
            .map(|(j, (s, o))| format!("offer type {j} spends {s} > {}", o.total_value()))
            .collect(),
    );
    let total: f64 = spend.iter().sum();
    let budget = catalog.total_value();
    report.push(
        "total_budget",
        if total > budget + BUDGET_TOL * budget.max(1.0) {
            vec![format!("total spend {total} > {budget}")]
        } else {
            vec![]
        },
    );

    if inputs_ok && refs_ok {
        let mut choices = vec![None; n];
        for p in &valid {
            choices[p.subscriber] = Some(p.offer);
        }
        // with duplicates present the last pair wins; the constraint checks
        // above already flag that case
        let recomputed = objective_of_choices(subscribers, catalog, &choices);
        report.recomputed_objective = Some(recomputed);
        report.push(
            "objective",
            if within_rel(recomputed, assignment.objective, 1e-9) {
                vec![]
            } else {
                vec![format!(
                    "reported {} but recomputed {recomputed}",
                    assignment.objective
                )]
            },
        );
    } else {
        report.push(
            "objective",
            vec!["not recomputable from invalid inputs".into()],
        );
    }
    report
}
