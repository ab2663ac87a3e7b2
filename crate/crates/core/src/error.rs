use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("state {x} is outside the map domain: {reason}")]
    Domain { x: f64, reason: &'static str },

    #[error("map evaluation at {x} produced a non-finite value")]
    NonFinite { x: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("splitting parameter is zero; the itinerary of the primary homoclinic is undefined")]
    DegenerateParameter,

    #[error("sequence is too short (length {len}, need at least {min})")]
    EmptySequence { len: usize, min: usize },

    #[error("no sign change found in the field")]
    EmptyResult,

    #[error("invalid axis: {0}")]
    InvalidAxis(String),
}

pub type Result<T> = std::result::Result<T, MapError>;
