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

//! Descriptive metric suite for one snapshot graph.
//!
//! All weighted quantities use the channel cost (`1 / capacity_usd`) as the
//! edge weight.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ChannelGraph, DistanceMode, KahanSum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeStrength {
    pub median_degree: f64,
    /// Median over nodes of the summed incident cost (1/USD).
    pub median_strength: f64,
}

/// One row of descriptive metrics. `None` marks a statistic that is
/// undefined for this graph (never a silent zero).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub snapshot_date: NaiveDate,
    pub btc_usd_rate: f64,
    pub n_nodes: usize,
    pub n_channels: usize,
    pub median_degree: f64,
    pub median_strength: f64,
    pub total_capacity_btc: f64,
    pub total_capacity_usd: f64,
    pub assort_unweighted: Option<f64>,
    pub assort_weighted: Option<f64>,
    pub efficiency_hop: f64,
    pub efficiency_cost: f64,
    pub transitivity: Option<f64>,
    pub mst_ratio: Option<f64>,
    pub density: f64,
    pub degree_capacity_corr: Option<f64>,
}

/// Median with the even-count convention (mean of the two central values).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Pearson correlation; `None` when either series has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if negligible_spread(sxx, xs) || negligible_spread(syy, ys) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn negligible_spread(sum_sq_dev: f64, xs: &[f64]) -> bool {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    sum_sq_dev <= (1e-12 * scale).powi(2) * xs.len() as f64
}

pub fn degree_strength_stats(g: &ChannelGraph) -> Result<DegreeStrength> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let degrees: Vec<f64> = g.degrees().into_iter().map(|k| k as f64).collect();
    let strengths: Vec<f64> = (0..g.node_count()).map(|v| g.strength(v)).collect();
    Ok(DegreeStrength {
        median_degree: median(&degrees).unwrap(),
        median_strength: median(&strengths).unwrap(),
    })
}

/// Degree assortativity: Pearson correlation of the endpoint degrees, each
/// channel counted in both orientations.
pub fn assortativity_degree(g: &ChannelGraph) -> Result<f64> {
    let mut xs = Vec::with_capacity(2 * g.edge_count());
    let mut ys = Vec::with_capacity(2 * g.edge_count());
    for e in g.channels() {
        let (j, k) = (g.degree(e.a) as f64, g.degree(e.b) as f64);
        xs.extend([j, k]);
        ys.extend([k, j]);
    }
    pearson(&xs, &ys).ok_or(Error::Undefined("degree assortativity"))
}

/// Weighted assortativity in the Leung–Chau form, with channel cost as the
/// weight:
///
/// `r_w = [Σ w j k / H - (Σ w (j+k) / 2H)^2] / [Σ w (j²+k²) / 2H - (Σ w (j+k) / 2H)^2]`
///
/// where `H = Σ w` and `j`, `k` are the endpoint degrees.
pub fn assortativity_weighted(g: &ChannelGraph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Undefined("weighted assortativity"));
    }
    let (mut h, mut prod, mut sum, mut sq) = (0.0, 0.0, 0.0, 0.0);
    for e in g.channels() {
        let (j, k, w) = (g.degree(e.a) as f64, g.degree(e.b) as f64, e.cost);
        h += w;
        prod += w * j * k;
        sum += 0.5 * w * (j + k);
        sq += 0.5 * w * (j * j + k * k);
    }
    let mean = sum / h;
    let den = sq / h - mean * mean;
    if den <= 1e-12 * (sq / h) {
        return Err(Error::Undefined("weighted assortativity"));
    }
    Ok(((prod / h - mean * mean) / den).clamp(-1.0, 1.0))
}

/// Σ over ordered connected pairs of `1 / d(i, j)`.
pub(crate) fn efficiency_numerator(g: &ChannelGraph, mode: DistanceMode) -> f64 {
    g.sum_over_pairs(mode, |d| 1.0 / d)
}

/// Global efficiency `(1 / n(n-1)) Σ_{i≠j} 1/d(i,j)`, with `1/∞ = 0`.
///
/// In hop mode this lies in [0, 1]. In cost mode distances are in 1/USD,
/// so the value is in USD and unbounded.
pub fn global_efficiency(g: &ChannelGraph, mode: DistanceMode) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "efficiency needs at least 2 nodes, graph has {n}"
        )));
    }
    Ok(efficiency_numerator(g, mode) / (n * (n - 1)) as f64)
}

/// Fraction of connected triples that are closed into triangles.
pub fn transitivity(g: &ChannelGraph) -> Result<f64> {
    let triples: usize = g.degrees().iter().map(|&k| k * k.saturating_sub(1) / 2).sum();
    if triples == 0 {
        return Err(Error::Undefined("transitivity"));
    }
    // per-node triangle counts already sum to 3 × triangles
    let closed: usize = g.triangles().iter().sum();
    Ok(closed as f64 / triples as f64)
}

/// `2m / (n(n-1))` from raw counts.
pub fn density_from_counts(n_nodes: usize, n_channels: usize) -> Result<f64> {
    if n_nodes < 2 {
        return Err(Error::InsufficientData(format!(
            "density needs at least 2 nodes, got {n_nodes}"
        )));
    }
    Ok(2.0 * n_channels as f64 / (n_nodes as f64 * (n_nodes - 1) as f64))
}

pub fn density(g: &ChannelGraph) -> Result<f64> {
    density_from_counts(g.node_count(), g.edge_count())
}

/// Minimum-spanning-tree cost as a share of the total channel cost.
pub fn mst_ratio(g: &ChannelGraph) -> Result<f64> {
    let mst = g.mst_total_weight()?;
    let mut total = KahanSum::default();
    for e in g.channels() {
        total.add(e.cost);
    }
    if g.edge_count() == 0 {
        return Err(Error::Undefined("MST ratio"));
    }
    Ok((mst / total.total()).min(1.0))
}

/// Correlation across nodes between degree and mean USD capacity per
/// channel. Isolated nodes are skipped.
pub fn degree_capacity_correlation(g: &ChannelGraph) -> Result<f64> {
    let (mut degs, mut caps) = (Vec::new(), Vec::new());
    for v in 0..g.node_count() {
        let k = g.degree(v);
        if k > 0 {
            degs.push(k as f64);
            caps.push(g.capacity_strength(v) / k as f64);
        }
    }
    pearson(&degs, &caps).ok_or(Error::Undefined("degree/capacity correlation"))
}

fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Assemble the full metric row for a connected graph.
pub fn metrics_report(g: &ChannelGraph, snapshot_date: NaiveDate, btc_usd_rate: f64) -> Result<MetricsReport> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let ds = degree_strength_stats(g)?;
    let (mut sat, mut usd) = (0u128, KahanSum::default());
    for e in g.channels() {
        sat += e.capacity_sat as u128;
        usd.add(e.capacity_usd);
    }
    Ok(MetricsReport {
        snapshot_date,
        btc_usd_rate,
        n_nodes: g.node_count(),
        n_channels: g.edge_count(),
        median_degree: ds.median_degree,
        median_strength: ds.median_strength,
        total_capacity_btc: sat as f64 * 1e-8,
        total_capacity_usd: usd.total(),
        assort_unweighted: defined(assortativity_degree(g))?,
        assort_weighted: defined(assortativity_weighted(g))?,
        efficiency_hop: global_efficiency(g, DistanceMode::Hop)?,
        efficiency_cost: global_efficiency(g, DistanceMode::Cost)?,
        transitivity: defined(transitivity(g))?,
        mst_ratio: defined(mst_ratio(g))?,
        density: density(g)?,
        degree_capacity_corr: defined(degree_capacity_correlation(g))?,
    })
}
