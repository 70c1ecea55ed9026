// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

/// Position of a parse error inside an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Byte(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Byte(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{location}: {message}")]
    Parse { location: Location, message: String },
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("invalid design: {0}")]
    Invalid(String),
    #[error("combinational cycle through {0}")]
    Cycle(String),
    #[error("cell library: {0}")]
    Library(String),
    #[error("polarity assignment: {0}")]
    Polarity(String),
    #[error("simulation: {0}")]
    Simulation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_line(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            location: Location::Line(line),
            message: message.into(),
        }
    }

    pub(crate) fn at_byte(byte: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            location: Location::Byte(byte),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
