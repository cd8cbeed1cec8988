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

//! Node-removal campaigns: targeted attacks ranked by centrality and
//! uniform random failures, scored by efficiency loss and surviving
//! largest-component share.
//!
//! Efficiency before and after removal share the intact graph's
//! `n(n-1)` denominator, so the loss is monotone in the removal set.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ChannelGraph, DistanceMode, NodeId};
use crate::metrics::efficiency_numerator;
use crate::powerlaw::replicate_rng;

/// Default removal budgets.
pub const DEFAULT_BUDGETS: [usize; 6] = [1, 2, 5, 10, 25, 50];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackKind {
    Degree,
    /// Σ incident USD capacity, largest first.
    Strength,
    BetweennessHop,
    BetweennessCost,
    /// Seeded uniform order.
    Random { seed: u64 },
}

impl AttackKind {
    pub fn label(&self) -> &'static str {
        match self {
            AttackKind::Degree => "degree",
            AttackKind::Strength => "strength",
            AttackKind::BetweennessHop => "bc-hop",
            AttackKind::BetweennessCost => "bc-cost",
            AttackKind::Random { .. } => "random",
        }
    }

    /// Parse a CLI name; `seed` is only used for `random`.
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        Ok(match name {
            "degree" => AttackKind::Degree,
            "strength" => AttackKind::Strength,
            "bc-hop" | "betweenness_hop" => AttackKind::BetweennessHop,
            "bc-cost" | "betweenness_cost" => AttackKind::BetweennessCost,
            "random" => AttackKind::Random { seed },
            other => return Err(Error::InvalidParameter(format!("unknown strategy `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackMode {
    /// Rank once on the intact graph.
    #[default]
    Static,
    /// Re-rank after every removal.
    Adaptive,
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackMode::Static => "static",
            AttackMode::Adaptive => "adaptive",
        })
    }
}

impl FromStr for AttackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(AttackMode::Static),
            "adaptive" => Ok(AttackMode::Adaptive),
            other => Err(Error::InvalidParameter(format!("unknown attack mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttackStrategy {
    pub kind: AttackKind,
    pub mode: AttackMode,
}

impl AttackStrategy {
    pub fn new(kind: AttackKind, mode: AttackMode) -> Self {
        AttackStrategy { kind, mode }
    }
}

/// Damage after removing `budget` nodes. Both percentages are fractions:
/// `delta_eff_pct = -0.4` is a 40 % efficiency loss.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackRow {
    pub strategy: String,
    pub mode: AttackMode,
    pub measure: DistanceMode,
    pub budget: usize,
    pub delta_eff_pct: f64,
    pub lcc_pct: f64,
    pub trials: usize,
    pub eff_std: Option<f64>,
    pub lcc_std: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AttackReport {
    pub rows: Vec<AttackRow>,
}

/// Relative tolerance under which two float scores rank as tied.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-9;

/// Nodes ordered by descending strategy score; ties go to the smaller
/// node id. Float scores within [`SCORE_TIE_TOLERANCE`] of their
/// neighbour in the ordering count as tied.
pub fn rank_targets(g: &ChannelGraph, kind: AttackKind) -> Vec<usize> {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    let scores: Vec<f64> = match kind {
        AttackKind::Random { seed } => {
            order.shuffle(&mut replicate_rng(seed, 0));
            return order;
        }
        AttackKind::Degree => (0..n).map(|v| g.degree(v) as f64).collect(),
        AttackKind::Strength => (0..n).map(|v| g.capacity_strength(v)).collect(),
        AttackKind::BetweennessHop => g.betweenness(DistanceMode::Hop),
        AttackKind::BetweennessCost => g.betweenness(DistanceMode::Cost),
    };
    order.sort_by(|&x, &y| scores[y].total_cmp(&scores[x]).then(x.cmp(&y)));
    let mut start = 0;
    for i in 1..=n {
        let tied = i < n && {
            let (a, b) = (scores[order[i - 1]], scores[order[i]]);
            a - b <= SCORE_TIE_TOLERANCE * a.abs().max(b.abs()).max(1e-3)
        };
        if !tied {
            order[start..i].sort_unstable();
            start = i;
        }
    }
    order
}

/// [`rank_targets`] with node ids.
pub fn rank_targets_by_id(g: &ChannelGraph, kind: AttackKind) -> Vec<NodeId> {
    rank_targets(g, kind).into_iter().map(|v| g.node_id(v).clone()).collect()
}

/// Removal sequence of length `count` in original node indices.
fn removal_sequence(g: &ChannelGraph, strategy: AttackStrategy, count: usize) -> Vec<usize> {
    let adaptive = strategy.mode == AttackMode::Adaptive
        && !matches!(strategy.kind, AttackKind::Random { .. });
    if !adaptive {
        let mut order = rank_targets(g, strategy.kind);
        order.truncate(count);
        return order;
    }
    let mut removed = Vec::with_capacity(count);
    let mut current = g.clone();
    // current index -> original index
    let mut origin: Vec<usize> = (0..g.node_count()).collect();
    while removed.len() < count {
        let top = rank_targets(&current, strategy.kind)[0];
        removed.push(origin[top]);
        origin.remove(top);
        current = current.without_nodes(&[top]);
    }
    removed
}

fn check_budgets(g: &ChannelGraph, budgets: &[usize]) -> Result<usize> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let max = budgets.iter().copied().max().unwrap_or(0);
    if max >= g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "budget {max} must be smaller than the node count {}",
            g.node_count()
        )));
    }
    Ok(max)
}

struct Baseline {
    numerator: f64,
    lcc: usize,
}

impl Baseline {
    fn new(g: &ChannelGraph, measure: DistanceMode) -> Result<Self> {
        let numerator = efficiency_numerator(g, measure);
        if numerator <= 0.0 {
            return Err(Error::Undefined("efficiency loss (intact efficiency is zero)"));
        }
        Ok(Baseline {
            numerator,
            lcc: g.largest_component_size(),
        })
    }

    fn damage(&self, g: &ChannelGraph, removed: &[usize], measure: DistanceMode) -> (f64, f64) {
        let after = g.without_nodes(removed);
        let delta = (efficiency_numerator(&after, measure) - self.numerator) / self.numerator;
        let lcc = after.largest_component_size() as f64 / self.lcc as f64;
        (delta.min(0.0), lcc)
    }
}

/// Remove the top targets for each budget and record the damage against
/// the intact graph.
pub fn run_attack(
    g: &ChannelGraph,
    strategy: AttackStrategy,
    budgets: &[usize],
    measure: DistanceMode,
) -> Result<AttackReport> {
    let max = check_budgets(g, budgets)?;
    let base = Baseline::new(g, measure)?;
    let order = removal_sequence(g, strategy, max);
    let mode = if matches!(strategy.kind, AttackKind::Random { .. }) {
        AttackMode::Static
    } else {
        strategy.mode
    };
    let rows = budgets
        .par_iter()
        .map(|&b| {
            let (delta, lcc) = base.damage(g, &order[..b], measure);
            AttackRow {
                strategy: strategy.kind.label().to_owned(),
                mode,
                measure,
                budget: b,
                delta_eff_pct: delta,
                lcc_pct: lcc,
                trials: 1,
                eff_std: None,
                lcc_std: None,
            }
        })
        .collect();
    Ok(AttackReport { rows })
}

/// Relative efficiency change `(E_after - E_before) / E_before`, with both
/// efficiencies normalized by the intact node count.
pub fn delta_weighted_efficiency(before: &ChannelGraph, after: &ChannelGraph, mode: DistanceMode) -> Result<f64> {
    check_subset(before, after)?;
    let e_before = efficiency_numerator(before, mode);
    if e_before <= 0.0 {
        return Err(Error::Undefined("efficiency loss (intact efficiency is zero)"));
    }
    Ok((efficiency_numerator(after, mode) - e_before) / e_before)
}

/// `|LCC(after)| / |LCC(before)|` by node count.
pub fn lcc_fraction(before: &ChannelGraph, after: &ChannelGraph) -> Result<f64> {
    check_subset(before, after)?;
    let lcc = before.largest_component_size();
    if lcc == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(after.largest_component_size() as f64 / lcc as f64)
}

fn check_subset(before: &ChannelGraph, after: &ChannelGraph) -> Result<()> {
    let known: HashSet<&NodeId> = before.node_ids().iter().collect();
    match after.node_ids().iter().find(|id| !known.contains(id)) {
        Some(id) => Err(Error::InvalidParameter(format!(
            "node {id} is not part of the original graph"
        ))),
        None => Ok(()),
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Random failures: `trials` seeded draws, each removing a uniformly
/// random node sequence whose prefixes give the budgets. Rows carry the
/// mean and population standard deviation over trials.
pub fn random_failure_campaign(
    g: &ChannelGraph,
    budgets: &[usize],
    trials: usize,
    seed: u64,
    measure: DistanceMode,
) -> Result<AttackReport> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    check_budgets(g, budgets)?;
    let base = Baseline::new(g, measure)?;
    let n = g.node_count();
    // outcomes[trial][budget index]
    let outcomes: Vec<Vec<(f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut replicate_rng(seed, t as u64));
            budgets
                .iter()
                .map(|&b| base.damage(g, &order[..b], measure))
                .collect()
        })
        .collect();
    let rows = budgets
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let effs: Vec<f64> = outcomes.iter().map(|o| o[i].0).collect();
            let lccs: Vec<f64> = outcomes.iter().map(|o| o[i].1).collect();
            let (eff, eff_std) = mean_std(&effs);
            let (lcc, lcc_std) = mean_std(&lccs);
            AttackRow {
                strategy: "random".to_owned(),
                mode: AttackMode::Static,
                measure,
                budget: b,
                delta_eff_pct: eff,
                lcc_pct: lcc,
                trials,
                eff_std: Some(eff_std),
                lcc_std: Some(lcc_std),
            }
        })
        .collect();
    Ok(AttackReport { rows })
}
