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

//! Snapshot and exchange-rate ingestion, remote fetching and synthetic
//! snapshot generation.

mod fetch;
mod rates;
mod snapshot;
mod synth;

pub use fetch::{fetch_snapshot, FetchClient};
pub use rates::{parse_rates, RateTable};
pub use snapshot::{parse_snapshot, ChannelRecord, NodeRecord, ParsedSnapshot, Snapshot};
pub use synth::{generate_synthetic, synthetic_channel_count, SynthParams};
