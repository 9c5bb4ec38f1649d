use thiserror::Error;

use crate::spec::{Channel, VisType};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every fault the engine can report. Violations found by `validate` are
/// data, not errors; they only surface here wrapped in `IllegalChange` or
/// `InvalidSpec`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttributeName(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("illegal change: {}", .0.join("; "))]
    IllegalChange(Vec<String>),
    #[error("stale revision: change built against {expected}, spec is at {actual}")]
    StaleRevision { expected: u64, actual: u64 },
    #[error("invalid spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("X and Y must both be bound before rendering")]
    MissingAxes,

    #[error("channel {0} is not bound")]
    ChannelUnbound(Channel),
    #[error("channel {channel} is required by {vis_type} and can only be replaced")]
    RequiredChannel { channel: Channel, vis_type: VisType },
    #[error("channel {0} cannot be used by this operation")]
    WrongChannel(Channel),
    #[error("operation requires a bar chart or stacked bar chart, current type is {0}")]
    WrongVisType(VisType),
    #[error("unknown filter rule `{0}`")]
    UnknownRule(String),
    #[error("selection outside the widget domain: {0}")]
    OutOfDomain(String),

    #[error("invalid demonstration: {0}")]
    InvalidDemonstration(String),
    #[error("selection is empty")]
    EmptySelection,
    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("unknown recommendation `{0}`")]
    UnknownRecommendation(String),
    #[error("recommendation `{0}` is no longer pending")]
    Expired(String),

    #[error("nothing to undo")]
    NothingToUndo,
    #[error("nothing to redo")]
    NothingToRedo,

    #[error("script error: {0}")]
    Script(String),
}

/// Coarse classification used by transports to pick a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    NotFound,
    Conflict,
    Unprocessable,
    BadRequest,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            UnknownAttribute(_) | UnknownRule(_) | UnknownRecommendation(_) | UnknownCategory(_) => {
                ErrorClass::NotFound
            }
            StaleRevision { .. } => ErrorClass::Conflict,
            MalformedCsv(_) | DuplicateAttributeName(_) | Script(_) => ErrorClass::BadRequest,
            _ => ErrorClass::Unprocessable,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            MalformedCsv(_) => "MalformedCsv",
            DuplicateAttributeName(_) => "DuplicateAttributeName",
            UnknownAttribute(_) => "UnknownAttribute",
            IllegalChange(_) => "IllegalChange",
            StaleRevision { .. } => "StaleRevision",
            InvalidSpec(_) => "InvalidSpec",
            MissingAxes => "MissingAxes",
            ChannelUnbound(_) => "ChannelUnbound",
            RequiredChannel { .. } => "RequiredChannel",
            WrongChannel(_) => "WrongChannel",
            WrongVisType(_) => "WrongVisType",
            UnknownRule(_) => "UnknownRule",
            OutOfDomain(_) => "OutOfDomain",
            InvalidDemonstration(_) => "InvalidDemonstration",
            EmptySelection => "EmptySelection",
            UnknownCategory(_) => "UnknownCategory",
            UnknownRecommendation(_) => "UnknownRecommendation",
            Expired(_) => "Expired",
            NothingToUndo => "NothingToUndo",
            NothingToRedo => "NothingToRedo",
            Script(_) => "Script",
        }
    }
}
