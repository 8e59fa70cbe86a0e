// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

use crate::trackmap::GapReport;

/// Errors produced by the track-map toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "degenerate transitional arc: start and end curvature are both {0}; model it as a straight or circular arc"
    )]
    DegenerateShape(f64),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameter(String),

    #[error("emission refused: {0}")]
    EmissionRefused(GapReport),

    #[error("assignment error: {0}")]
    Assignment(String),

    #[error("residual evaluation failed at finite-difference probe {index}: {source}")]
    Probe {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("initialization error: {0}")]
    Initialization(String),

    #[error("normal equations could not be solved (lambda = {lambda:e}, nu = {nu})")]
    Solve { lambda: f64, nu: f64 },

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
