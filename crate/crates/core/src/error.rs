// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::io;

use thiserror::Error;

/// Errors raised by graph construction, the detectors and the CLI plumbing.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed edge-list input. `line` is 1-based.
    #[error("line {line}: {message}")]
    Input { line: usize, message: String },
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    /// The brute-force oracle refuses graphs above its size cap.
    #[error("graph has {nodes} nodes, the limit for this method is {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A failure inside one null-model replicate.
    #[error("replicate {index}: {source}")]
    Replicate { index: usize, source: Box<Error> },
    #[error("time budget exhausted")]
    TimedOut,
    #[error("unknown node label `{0}`")]
    UnknownNode(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
