use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be finite and within its domain, got {value}")]
    Domain { name: &'static str, value: f64 },

    #[error("subscriber at position {position}: {reason}")]
    InvalidSubscriber { position: usize, reason: String },

    #[error("offer type {index}: {reason}")]
    InvalidOffer { index: usize, reason: String },

    #[error("offer catalog must contain at least one offer type")]
    EmptyCatalog,

    #[error("assignment references unknown subscriber {0}")]
    UnknownSubscriber(usize),

    #[error("assignment references unknown offer type {0}")]
    UnknownOffer(usize),

    #[error("subscriber {0} is assigned more than one offer")]
    DuplicateSubscriber(usize),

    #[error("offer type {offer} is used {used} times but only {available} are available")]
    OfferOverused {
        offer: usize,
        used: u64,
        available: u64,
    },

    #[error("no live non-empty priority queue")]
    NoLiveQueue,

    #[error("subscriber {0} was already deleted")]
    SubscriberAlreadyDeleted(usize),

    #[error("queue {0} was already deleted")]
    QueueAlreadyDeleted(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("search space of {size:.3e} candidates exceeds the limit of {limit:.0e}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}
