use std::path::PathBuf;

use chrono::NaiveDate;

use crate::auction::{BidReport, CustomerId};
use crate::rules::PriceRule;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("date {date} is outside the horizon starting {start} ({length} nights)")]
    OutOfHorizon {
        date: NaiveDate,
        start: NaiveDate,
        length: u32,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("{} invalid bid(s): {}", .0.len(), summarize_reports(.0))]
    InvalidBids(Vec<BidReport>),

    #[error("arrival order is not a permutation of the bidding customers: {0}")]
    NotAPermutation(String),

    #[error("unknown customer {0}")]
    UnknownCustomer(CustomerId),

    #[error(
        "brute force would enumerate {combinations} assignments (cap {cap}); use the exact solver instead"
    )]
    EnumerationCapExceeded { combinations: u128, cap: u128 },

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conflicting price rules: lower bound {lower_bound} exceeds upper bound {upper_bound}")]
    RuleConflict {
        lower_bound: crate::Money,
        upper_bound: crate::Money,
        lower: Vec<PriceRule>,
        upper: Vec<PriceRule>,
    },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("store validation failed: {}", .0.join("; "))]
    StoreValidation(Vec<String>),

    #[error("unsupported store schema version {0}")]
    SchemaVersion(u32),

    #[error("{0} not found")]
    NotFound(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used in CLI and HTTP error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfHorizon { .. } => "out_of_horizon",
            Error::InvalidInstance(_) => "invalid_instance",
            Error::InvalidBids(_) => "invalid_bids",
            Error::NotAPermutation(_) => "not_a_permutation",
            Error::UnknownCustomer(_) => "unknown_customer",
            Error::EnumerationCapExceeded { .. } => "enumeration_cap_exceeded",
            Error::EmptyInput(_) => "empty_input",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::RuleConflict { .. } => "rule_conflict",
            Error::Parse { .. } => "parse",
            Error::StoreValidation(_) => "store_validation",
            Error::SchemaVersion(_) => "schema_version",
            Error::NotFound(_) => "not_found",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

fn summarize_reports(reports: &[BidReport]) -> String {
    reports
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
