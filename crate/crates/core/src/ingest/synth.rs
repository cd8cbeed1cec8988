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

use chrono::{DateTime, TimeZone, Utc};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::snapshot::{ChannelRecord, NodeRecord, Snapshot};
use crate::error::{Error, Result};

/// Parameters of the preferential-attachment snapshot generator.
#[derive(Clone, Debug)]
pub struct SynthParams {
    pub n_nodes: usize,
    pub m_attach: usize,
    /// Mean of ln(capacity in satoshi).
    pub capacity_mu: f64,
    /// Standard deviation of ln(capacity in satoshi).
    pub capacity_sigma: f64,
    pub seed: u64,
    pub timestamp: DateTime<Utc>,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_nodes: 2000,
            m_attach: 3,
            // median channel around 0.01 BTC
            capacity_mu: 13.8,
            capacity_sigma: 1.5,
            seed: 42,
            timestamp: Utc.with_ymd_and_hms(2018, 2, 12, 0, 0, 0).unwrap(),
        }
    }
}

/// Channel count produced for `n` nodes and `m` attachments per node: a
/// fully connected seed of `m + 1` nodes, then `m` channels per later node.
pub fn synthetic_channel_count(n: usize, m: usize) -> usize {
    m * (m + 1) / 2 + (n - m - 1) * m
}

/// Generate a scale-free snapshot by preferential attachment.
///
/// Nodes `0..=m` form a clique. Every later node links to `m` distinct
/// existing nodes, each picked with probability proportional to its current
/// degree. Capacities are log-normal in satoshi, rounded and clamped to at
/// least 1.
pub fn generate_synthetic(params: &SynthParams) -> Result<Snapshot> {
    let SynthParams {
        n_nodes: n,
        m_attach: m,
        capacity_mu,
        capacity_sigma,
        seed,
        timestamp,
    } = *params;
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n_nodes must be >= 3, got {n}")));
    }
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "m_attach must satisfy 1 <= m < n_nodes, got {m}"
        )));
    }
    let capacity = LogNormal::new(capacity_mu, capacity_sigma)
        .map_err(|e| Error::InvalidParameter(format!("capacity distribution: {e}")))?;
    if !(capacity_sigma > 0.0) {
        return Err(Error::InvalidParameter("capacity_sigma must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (n - 1).to_string().len();
    let name = |v: usize| format!("n{v:0width$}");

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(synthetic_channel_count(n, m));
    // every channel contributes both endpoints, so uniform picks are degree-weighted
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * synthetic_channel_count(n, m));
    for a in 0..=m {
        for b in a + 1..=m {
            pairs.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            pairs.push((t, v));
            endpoints.extend([t, v]);
        }
    }

    let channels = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let sat = capacity.sample(&mut rng).round();
            let capacity_sat = if sat >= u64::MAX as f64 { u64::MAX } else { (sat as u64).max(1) };
            ChannelRecord {
                channel_id: format!("ch{i:07}"),
                node1_pub: name(a),
                node2_pub: name(b),
                capacity_sat,
            }
        })
        .collect();
    let nodes = (0..n).map(|v| NodeRecord { pub_key: name(v) }).collect();
    Ok(Snapshot {
        timestamp,
        nodes,
        channels,
    })
}
