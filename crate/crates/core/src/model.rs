//! Churn-aware revenue model.
//!
//! A subscriber with monthly top-up `p`, churn probability `alpha` and
//! acceptance rate `gamma` who is offered an incentive `x` accepts with
//! probability `beta = 1 - exp(-gamma * x)`. Accepting yields `p - x`;
//! otherwise the subscriber stays with probability `1 - alpha` and pays `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(name: &'static str, value: f64, ok: bool) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::Domain { name, value })
    }
}

/// Probability that an offer of value `x` is accepted.
pub fn acceptance_probability(gamma: f64, x: f64) -> Result<f64> {
    check("gamma", gamma, gamma >= 0.0)?;
    check("x", x, x >= 0.0)?;
    Ok(beta(gamma, x))
}

#[inline]
fn beta(gamma: f64, x: f64) -> f64 {
    -(-gamma * x).exp_m1()
}

#[inline]
fn revenue(x: f64, alpha: f64, gamma: f64, p: f64) -> f64 {
    let b = beta(gamma, x);
    b * (p - x) + (1.0 - b) * (1.0 - alpha) * p
}

/// Expected revenue `f(x; alpha, gamma, p)` from one subscriber.
pub fn expected_revenue(x: f64, alpha: f64, gamma: f64, p: f64) -> Result<f64> {
    check("x", x, x >= 0.0)?;
    check("alpha", alpha, (0.0..=1.0).contains(&alpha))?;
    check("gamma", gamma, gamma >= 0.0)?;
    check("p", p, p >= 0.0)?;
    Ok(revenue(x, alpha, gamma, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subscriber {
    pub id: usize,
    /// Monthly top-up.
    pub p: f64,
    /// Churn probability.
    pub alpha: f64,
    /// Acceptance rate, per currency unit.
    pub gamma: f64,
}

impl Subscriber {
    pub fn new(id: usize, p: f64, alpha: f64, gamma: f64) -> Self {
        Subscriber {
            id,
            p,
            alpha,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidSubscriber {
            position: self.id,
            reason,
        };
        for (name, v, ok) in [
            ("p", self.p, self.p >= 0.0),
            ("alpha", self.alpha, (0.0..=1.0).contains(&self.alpha)),
            ("gamma", self.gamma, self.gamma >= 0.0),
        ] {
            if !(v.is_finite() && ok) {
                return Err(fail(format!("{name} = {v} is out of range")));
            }
        }
        Ok(())
    }

    /// Revenue for offer value `x`. The subscriber must be valid and `x`
    /// non-negative; use [`expected_revenue`] for checked evaluation.
    #[inline]
    pub fn revenue(&self, x: f64) -> f64 {
        revenue(x, self.alpha, self.gamma, self.p)
    }

    /// Expected revenue under the zero offer, `(1 - alpha) p`.
    pub fn baseline(&self) -> f64 {
        revenue(0.0, self.alpha, self.gamma, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfferType {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Denomination, in currency units. Non-monetary offers carry their
    /// equivalent monetary value.
    pub value: f64,
    /// Number of units available.
    pub count: u64,
}

impl OfferType {
    pub fn new(value: f64, count: u64) -> Self {
        OfferType {
            label: None,
            value,
            count,
        }
    }

    pub fn labeled(label: impl Into<String>, value: f64, count: u64) -> Self {
        OfferType {
            label: Some(label.into()),
            value,
            count,
        }
    }

    /// `value * count`.
    pub fn total_value(&self) -> f64 {
        self.value * self.count as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OfferCatalog {
    pub offers: Vec<OfferType>,
}

impl OfferCatalog {
    pub fn new(offers: Vec<OfferType>) -> Self {
        OfferCatalog { offers }
    }

    pub fn len(&self) -> usize {
        self.offers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offers.is_empty()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.offers.iter().map(|o| o.count).collect()
    }

    pub fn total_count(&self) -> u64 {
        self.offers.iter().map(|o| o.count).sum()
    }

    pub fn total_value(&self) -> f64 {
        self.offers.iter().map(OfferType::total_value).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.offers.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        for (index, o) in self.offers.iter().enumerate() {
            if !(o.value.is_finite() && o.value > 0.0) {
                return Err(Error::InvalidOffer {
                    index,
                    reason: format!("value = {} must be positive and finite", o.value),
                });
            }
        }
        Ok(())
    }
}

/// Checks every subscriber and that ids run `0..n` in order.
pub fn validate_subscribers(subscribers: &[Subscriber]) -> Result<()> {
    for (position, s) in subscribers.iter().enumerate() {
        if s.id != position {
            return Err(Error::InvalidSubscriber {
                position,
                reason: format!("id {} does not match its position", s.id),
            });
        }
        s.validate()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub subscriber: usize,
    pub offer: usize,
}

impl Pair {
    pub fn new(subscriber: usize, offer: usize) -> Self {
        Pair { subscriber, offer }
    }
}

/// Offer assignment. Subscribers absent from `pairs` receive the zero offer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    pub pairs: Vec<Pair>,
    pub objective: f64,
}

impl Assignment {
    /// Per-subscriber offer choice (`None` = zero offer), validating the
    /// one-offer and count constraints.
    pub fn choices(&self, n: usize, catalog: &OfferCatalog) -> Result<Vec<Option<usize>>> {
        let mut choice = vec![None; n];
        let mut used = vec![0u64; catalog.len()];
        for pair in &self.pairs {
            if pair.subscriber >= n {
                return Err(Error::UnknownSubscriber(pair.subscriber));
            }
            if pair.offer >= catalog.len() {
                return Err(Error::UnknownOffer(pair.offer));
            }
            if choice[pair.subscriber].replace(pair.offer).is_some() {
                return Err(Error::DuplicateSubscriber(pair.subscriber));
            }
            used[pair.offer] += 1;
        }
        for (offer, (&u, o)) in used.iter().zip(&catalog.offers).enumerate() {
            if u > o.count {
                return Err(Error::OfferOverused {
                    offer,
                    used: u,
                    available: o.count,
                });
            }
        }
        Ok(choice)
    }
}

/// Sums revenues over subscribers in index order. Inputs must be valid.
pub(crate) fn objective_of_choices(
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
    choices: &[Option<usize>],
) -> f64 {
    subscribers
        .iter()
        .zip(choices)
        .map(|(s, c)| s.revenue(c.map_or(0.0, |j| catalog.offers[j].value)))
        .sum()
}

/// Total expected revenue `F(x)` of an assignment, including the zero-offer
/// baseline of every unassigned subscriber.
pub fn objective_value(
    assignment: &Assignment,
    subscribers: &[Subscriber],
    catalog: &OfferCatalog,
) -> Result<f64> {
    validate_subscribers(subscribers)?;
    catalog.validate()?;
    let choices = assignment.choices(subscribers.len(), catalog)?;
    Ok(objective_of_choices(subscribers, catalog, &choices))
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn within_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
