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

//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the algorithms it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lntopo::ChannelGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Riemann zeta by direct summation plus the midpoint integral tail.
pub fn zeta_direct(alpha: f64, terms: usize) -> f64 {
    let head: f64 = (1..=terms).map(|k| (k as f64).powf(-alpha)).sum();
    head + (terms as f64 + 0.5).powf(1.0 - alpha) / (alpha - 1.0)
}

/// Inverse-CDF sampler for the discrete power law with x_min = 1.
pub struct PowerLawOracle {
    cdf: Vec<f64>,
}

impl PowerLawOracle {
    pub fn new(alpha: f64) -> Self {
        const K: usize = 1_000_000;
        let z = zeta_direct(alpha, K);
        let mut acc = 0.0;
        let cdf = (1..=K)
            .map(|k| {
                acc += (k as f64).powf(-alpha) / z;
                acc
            })
            .collect();
        PowerLawOracle { cdf }
    }

    pub fn draw(&self, rng: &mut impl Rng, n: usize) -> Vec<u64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let i = self.cdf.partition_point(|&c| c <= u);
                (i + 1) as u64
            })
            .collect()
    }
}

/// Model CDF of the x_min = 1 discrete power law at every integer 1..=max.
pub fn power_law_cdf(alpha: f64, max: u64) -> Vec<f64> {
    let z = zeta_direct(alpha, 1_000_000);
    let mut acc = 0.0;
    (1..=max)
        .map(|k| {
            acc += (k as f64).powf(-alpha) / z;
            acc
        })
        .collect()
}

/// Erdős–Rényi style graph on `n` nodes named `v0..`, with random costs
/// when `random_costs` is set (unit costs otherwise).
pub fn random_graph(seed: u64, n: usize, p: f64, random_costs: bool) -> ChannelGraph {
    let mut r = rng(seed);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                let usd = if random_costs { r.random_range(0.5..4.0) } else { 1.0 };
                edges.push((names[i].clone(), names[j].clone(), usd));
            }
        }
    }
    ChannelGraph::from_usd_edges_with_nodes(names.iter(), &edges).unwrap()
}

fn edge_len(g: &ChannelGraph, u: usize, v: usize, weighted: bool) -> f64 {
    if !weighted {
        return 1.0;
    }
    let k = g.neighbors(u).iter().find(|&&(w, _)| w == v).unwrap().1;
    g.channels()[k].cost
}

/// Every simple path from `s` to `t` with its length.
pub fn all_simple_paths(g: &ChannelGraph, s: usize, t: usize, weighted: bool) -> Vec<(f64, Vec<usize>)> {
    fn walk(
        g: &ChannelGraph,
        t: usize,
        weighted: bool,
        path: &mut Vec<usize>,
        len: f64,
        on: &mut [bool],
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            out.push((len, path.clone()));
            return;
        }
        for &(w, _) in g.neighbors(v) {
            if !on[w] {
                on[w] = true;
                path.push(w);
                walk(g, t, weighted, path, len + edge_len(g, v, w, weighted), on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    let mut out = Vec::new();
    walk(g, t, weighted, &mut vec![s], 0.0, &mut on, &mut out);
    out
}

fn same_len(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Shortest paths between `s` and `t` by exhaustive enumeration.
pub fn shortest_paths(g: &ChannelGraph, s: usize, t: usize, weighted: bool) -> (f64, Vec<Vec<usize>>) {
    let paths = all_simple_paths(g, s, t, weighted);
    let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let keep = paths
        .into_iter()
        .filter(|p| same_len(p.0, best))
        .map(|p| p.1)
        .collect();
    (best, keep)
}

/// Betweenness by enumerating all shortest paths of every unordered pair.
pub fn betweenness_oracle(g: &ChannelGraph, weighted: bool) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let (_, paths) = shortest_paths(g, s, t, weighted);
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += share;
                }
            }
        }
    }
    bc
}

/// Efficiency numerator Σ_{i≠j} 1/d(i,j) from enumerated distances.
pub fn efficiency_numerator_oracle(g: &ChannelGraph, weighted: bool) -> f64 {
    let n = g.node_count();
    let mut total = 0.0;
    for s in 0..n {
        for t in 0..n {
            if s != t {
                let (d, _) = shortest_paths(g, s, t, weighted);
                if d.is_finite() {
                    total += 1.0 / d;
                }
            }
        }
    }
    total
}

/// Component sizes by repeated flood fill over an explicit adjacency map.
pub fn largest_component_oracle(g: &ChannelGraph) -> usize {
    let n = g.node_count();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in g.channels() {
        adj.entry(e.a).or_default().push(e.b);
        adj.entry(e.b).or_default().push(e.a);
    }
    let mut label = vec![usize::MAX; n];
    let mut best = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = s;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if label[w] == usize::MAX {
                    label[w] = s;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Like [`random_graph`] but with capacities from {1, 1/2, 1/4} USD, so
/// many paths have exactly equal cost.
pub fn random_graph_tied(seed: u64, n: usize, p: f64) -> ChannelGraph {
    let mut r = rng(seed ^ 0x5eed);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                let usd = [1.0, 0.5, 0.25][r.random_range(0..3)];
                edges.push((names[i].clone(), names[j].clone(), usd));
            }
        }
    }
    ChannelGraph::from_usd_edges_with_nodes(names.iter(), &edges).unwrap()
}

/// Rebuild `g` from its channel list without the named nodes.
pub fn without_ids(g: &ChannelGraph, removed: &[String]) -> ChannelGraph {
    let keep = |id: &str| !removed.iter().any(|r| r == id);
    let names: Vec<String> = g
        .node_ids()
        .iter()
        .map(|id| id.to_string())
        .filter(|id| keep(id))
        .collect();
    let edges: Vec<(String, String, f64)> = g
        .channels()
        .iter()
        .map(|c| (g.node_id(c.a).to_string(), g.node_id(c.b).to_string(), c.capacity_usd))
        .filter(|(a, b, _)| keep(a) && keep(b))
        .collect();
    ChannelGraph::from_usd_edges_with_nodes(names.iter(), &edges).unwrap()
}

/// Score-based target choice: highest score, ties (relative 1e-9) to the
/// smallest id.
pub fn top_target(g: &ChannelGraph, scores: &[f64]) -> String {
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * best.abs().max(1e-3);
    let mut ties: Vec<String> = (0..g.node_count())
        .filter(|&v| best - scores[v] <= tol)
        .map(|v| g.node_id(v).to_string())
        .collect();
    ties.sort();
    ties.swap_remove(0)
}

/// Full descending order of `scores` under the same tie rule.
pub fn order_by_scores(g: &ChannelGraph, scores: &[f64]) -> Vec<String> {
    let mut left: Vec<(String, f64)> = (0..g.node_count()).map(|v| (g.node_id(v).to_string(), scores[v])).collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let best = left.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-9 * best.abs().max(1e-3);
        let pick = left
            .iter()
            .enumerate()
            .filter(|(_, x)| best - x.1 <= tol)
            .min_by(|a, b| a.1 .0.cmp(&b.1 .0))
            .unwrap()
            .0;
        out.push(left.remove(pick).0);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleScore {
    Degree,
    Strength,
    BetweennessHop,
    BetweennessCost,
}

pub fn oracle_scores(g: &ChannelGraph, score: OracleScore) -> Vec<f64> {
    let n = g.node_count();
    match score {
        OracleScore::Degree => {
            let mut d = vec![0.0; n];
            for c in g.channels() {
                d[c.a] += 1.0;
                d[c.b] += 1.0;
            }
            d
        }
        OracleScore::Strength => {
            let mut s = vec![0.0; n];
            for c in g.channels() {
                s[c.a] += c.capacity_usd;
                s[c.b] += c.capacity_usd;
            }
            s
        }
        OracleScore::BetweennessHop => betweenness_oracle(g, false),
        OracleScore::BetweennessCost => betweenness_oracle(g, true),
    }
}

/// Removal sequence of length `count`, re-scoring after every removal
/// when `adaptive`.
pub fn removal_oracle(g: &ChannelGraph, score: OracleScore, adaptive: bool, count: usize) -> Vec<String> {
    if !adaptive {
        let mut order = order_by_scores(g, &oracle_scores(g, score));
        order.truncate(count);
        return order;
    }
    let mut removed = Vec::new();
    let mut current = g.clone();
    while removed.len() < count {
        let top = top_target(&current, &oracle_scores(&current, score));
        removed.push(top);
        current = without_ids(g, &removed);
    }
    removed
}

/// `(delta_eff, lcc_fraction)` after deleting `removed`, recomputed from
/// scratch against the intact graph.
pub fn damage_oracle(g: &ChannelGraph, removed: &[String], weighted: bool) -> (f64, f64) {
    let before = efficiency_numerator_oracle(g, weighted);
    let after_g = without_ids(g, removed);
    let after = efficiency_numerator_oracle(&after_g, weighted);
    let delta = ((after - before) / before).min(0.0);
    let lcc = largest_component_oracle(&after_g) as f64 / largest_component_oracle(g) as f64;
    (delta, lcc)
}
