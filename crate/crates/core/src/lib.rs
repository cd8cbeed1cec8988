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

//! Topology analysis for payment-channel network snapshots.
//!
//! A snapshot is turned into a [`ChannelGraph`] whose channels carry a USD
//! capacity and a routing cost of `1 / capacity_usd`. On top of that graph
//! the crate computes descriptive metrics, power-law fits of the degree
//! sequence, attack and failure robustness, topological anonymity and the
//! Laplacian eigenratio.

pub mod anonymity;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod powerlaw;
pub mod report;
pub mod robustness;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{build_graph, ChannelGraph, DistanceMatrix, DistanceMode, NodeId, SkipTally};
