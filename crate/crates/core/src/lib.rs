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

//! Detection of k-components — maximal node sets in which every pair of
//! nodes is joined by at least `k` node-independent paths — in large
//! networks, with the exact methods used to check the results.

pub mod analysis;
pub mod budget;
pub mod cli;
pub mod complement;
pub mod components;
pub mod connectivity;
pub mod decomposition;
pub mod error;
pub mod exact;
mod flow;
pub mod generators;
pub mod graph;
pub mod heuristic;
pub mod hierarchy;
pub mod layout;

/// Exact rational used for densities and average connectivities.
pub type Ratio = num_rational::Ratio<u64>;

pub use crate::complement::ComplementView;
pub use crate::components::{KComponent, KComponents, Method};
pub use crate::error::{Error, Result};
pub use crate::graph::{Graph, GraphView, NodeIndex};
