use alloc::string::String;
use core::fmt;

use crate::model::Mode;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate or error value outside its valid domain.
    InvalidRecord(String),
    /// Trip with no records or non-increasing timestamps.
    InvalidTrip { trip_id: String, reason: String },
    /// Two trips in one dataset share an identifier.
    DuplicateTrip(String),
    EmptyInput(&'static str),
    SegmentTooShort { trip_id: String, points: usize },
    /// No trips of the requested mode were found.
    NoTripsForMode(Mode),
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidRecord(msg) => write!(f, "invalid record: {msg}"),
            Error::InvalidTrip { trip_id, reason } => write!(f, "invalid trip {trip_id:?}: {reason}"),
            Error::DuplicateTrip(id) => write!(f, "duplicate trip id {id:?}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::SegmentTooShort { trip_id, points } => {
                write!(f, "trip {trip_id:?} has {points} records, at least 3 are required")
            }
            Error::NoTripsForMode(mode) => write!(f, "no trips with mode {mode}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
