//! File formats, threaded execution and the command-line front end for
//! [`modetrace_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod parallel;

pub use error::FormatError;
pub use modetrace_core as core;
