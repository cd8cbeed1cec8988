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

//! Canonical channel-graph representation and the shared graph algorithms
//! (components, shortest paths, betweenness, clustering, spanning tree).
//!
//! Nodes are stored in lexicographic order of their [`NodeId`], so a node
//! index doubles as its tie-break rank everywhere in the crate.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Snapshot;

/// Relative tolerance used when two path lengths are compared for equality.
pub const DIST_REL_TOL: f64 = 1e-12;

/// Sources handled by one rayon task; partial sums are combined in chunk
/// order so results never depend on scheduling.
const SOURCE_CHUNK: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// One undirected channel between node indices `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub a: usize,
    pub b: usize,
    pub capacity_sat: u64,
    pub capacity_usd: f64,
    /// Routing cost, always `1 / capacity_usd`.
    pub cost: f64,
}

impl Channel {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Every channel has unit length.
    Hop,
    /// Channels are as long as their cost weight.
    Cost,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Hop => "hop",
            DistanceMode::Cost => "cost",
        })
    }
}

/// Weighted undirected simple graph of payment channels.
#[derive(Clone, Debug)]
pub struct ChannelGraph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Channel>,
    // (neighbor, edge index), sorted by neighbor
    adj: Vec<Vec<(usize, usize)>>,
    // flat (neighbor, cost) rows for distance-only searches
    cost_adj: Vec<(u32, f64)>,
    cost_start: Vec<usize>,
}

impl ChannelGraph {
    /// Assemble a graph from a node set and already-merged channels keyed by
    /// unordered endpoint pair. Every channel endpoint must be in `nodes`.
    pub(crate) fn assemble(
        nodes: BTreeSet<NodeId>,
        channels: BTreeMap<(NodeId, NodeId), (u64, f64)>,
    ) -> Result<Self> {
        let ids: Vec<NodeId> = nodes.into_iter().collect();
        let index: HashMap<NodeId, usize> =
            ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let mut edges = Vec::with_capacity(channels.len());
        for ((x, y), (sat, usd)) in channels {
            let (ia, ib) = match (index.get(&x), index.get(&y)) {
                (Some(&ia), Some(&ib)) => (ia.min(ib), ia.max(ib)),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "channel {x}-{y} references an unknown node"
                    )))
                }
            };
            if ia == ib {
                return Err(Error::InvalidParameter(format!("self-loop on {x}")));
            }
            if sat == 0 || !(usd > 0.0) || !usd.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "channel {x}-{y} has non-positive capacity"
                )));
            }
            edges.push(Channel {
                a: ia,
                b: ib,
                capacity_sat: sat,
                capacity_usd: usd,
                cost: 1.0 / usd,
            });
        }
        edges.sort_by_key(|e| (e.a, e.b));
        Ok(Self::from_indexed(ids, index, edges))
    }

    fn from_indexed(ids: Vec<NodeId>, index: HashMap<NodeId, usize>, edges: Vec<Channel>) -> Self {
        let mut adj = vec![Vec::new(); ids.len()];
        for (k, e) in edges.iter().enumerate() {
            adj[e.a].push((e.b, k));
            adj[e.b].push((e.a, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut cost_start = Vec::with_capacity(ids.len() + 1);
        let mut cost_adj = Vec::with_capacity(2 * edges.len());
        cost_start.push(0);
        for list in &adj {
            cost_adj.extend(list.iter().map(|&(w, k)| (w as u32, edges[k].cost)));
            cost_start.push(cost_adj.len());
        }
        ChannelGraph {
            ids,
            index,
            edges,
            adj,
            cost_adj,
            cost_start,
        }
    }

    /// Build a graph from `(a, b, capacity_usd)` triples. Repeated pairs are
    /// merged by summing capacity. The nominal satoshi capacity assumes a
    /// rate of 1 USD/BTC. Mostly useful for tests and bindings.
    pub fn from_usd_edges<S: AsRef<str>>(edges: &[(S, S, f64)]) -> Result<Self> {
        Self::from_usd_edges_with_nodes(std::iter::empty::<&str>(), edges)
    }

    /// Like [`ChannelGraph::from_usd_edges`] but also declares extra
    /// (possibly isolated) nodes.
    pub fn from_usd_edges_with_nodes<N, S>(nodes: N, edges: &[(S, S, f64)]) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
        S: AsRef<str>,
    {
        let mut set: BTreeSet<NodeId> = nodes.into_iter().map(|n| NodeId::from(n.as_ref())).collect();
        let mut merged: BTreeMap<(NodeId, NodeId), (u64, f64)> = BTreeMap::new();
        for (x, y, usd) in edges {
            let (x, y) = (NodeId::from(x.as_ref()), NodeId::from(y.as_ref()));
            if x == y {
                return Err(Error::InvalidParameter(format!("self-loop on {x}")));
            }
            if !(*usd > 0.0) || !usd.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "channel {x}-{y} has non-positive capacity"
                )));
            }
            set.insert(x.clone());
            set.insert(y.clone());
            let key = if x < y { (x, y) } else { (y, x) };
            let sat = ((usd * 1e8).round() as u64).max(1);
            let entry = merged.entry(key).or_insert((0, 0.0));
            entry.0 += sat;
            entry.1 += usd;
        }
        Self::assemble(set, merged)
    }

    /// Unit-capacity graph (every cost is 1) from endpoint pairs.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self> {
        let edges: Vec<(&str, &str, f64)> =
            pairs.iter().map(|(a, b)| (a.as_ref(), b.as_ref(), 1.0)).collect();
        Self::from_usd_edges(&edges)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node identifiers in index order (lexicographic).
    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn node_id(&self, v: usize) -> &NodeId {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(&NodeId::from(id)).copied()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.edges
    }

    /// `(neighbor, channel index)` pairs of `v`, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Sum of incident channel costs.
    pub fn strength(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, k)| self.edges[k].cost).sum()
    }

    /// Sum of incident channel capacities in USD.
    pub fn capacity_strength(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, k)| self.edges[k].capacity_usd).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search_by_key(&v, |&(w, _)| w).is_ok()
    }

    /// Subgraph induced by the nodes with `keep[v] == true`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> ChannelGraph {
        assert_eq!(keep.len(), self.ids.len());
        let mut remap = vec![usize::MAX; self.ids.len()];
        let mut ids = Vec::new();
        for (v, id) in self.ids.iter().enumerate() {
            if keep[v] {
                remap[v] = ids.len();
                ids.push(id.clone());
            }
        }
        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.a] && keep[e.b])
            .map(|e| Channel {
                a: remap[e.a],
                b: remap[e.b],
                ..e.clone()
            })
            .collect();
        Self::from_indexed(ids, index, edges)
    }

    /// Graph with the given node indices (and their channels) removed.
    pub fn without_nodes(&self, removed: &[usize]) -> ChannelGraph {
        let mut keep = vec![true; self.ids.len()];
        for &v in removed {
            keep[v] = false;
        }
        self.induced_subgraph(&keep)
    }

    /// Copy of the graph with the channel between `u` and `v` deleted.
    pub fn without_edge(&self, u: usize, v: usize) -> ChannelGraph {
        let (a, b) = (u.min(v), u.max(v));
        let edges = self
            .edges
            .iter()
            .filter(|e| !(e.a == a && e.b == b))
            .cloned()
            .collect();
        Self::from_indexed(self.ids.clone(), self.index.clone(), edges)
    }

    /// Connected components as sorted index lists, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(w, _) in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        !self.ids.is_empty() && self.components().len() == 1
    }

    /// Size of the largest connected component (0 for an empty graph).
    pub fn largest_component_size(&self) -> usize {
        self.components().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Induced subgraph on the largest connected component. Equal-sized
    /// components are resolved in favour of the one holding the
    /// lexicographically smallest node id.
    pub fn largest_component(&self) -> Result<ChannelGraph> {
        if self.ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let comps = self.components();
        let mut best = &comps[0];
        for c in &comps[1..] {
            if c.len() > best.len() {
                best = c;
            }
        }
        let mut keep = vec![false; self.ids.len()];
        for &v in best {
            keep[v] = true;
        }
        Ok(self.induced_subgraph(&keep))
    }

    /// Distances from `source` to every node; `f64::INFINITY` when
    /// unreachable.
    pub fn distances_from(&self, source: usize, mode: DistanceMode) -> Vec<f64> {
        let mut ws = SpWorkspace::new(self.ids.len());
        ws.run(self, source, mode, false);
        ws.dist
    }

    /// All-pairs shortest-path distances.
    pub fn sp_distances(&self, mode: DistanceMode) -> DistanceMatrix {
        let n = self.ids.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map_init(|| SpWorkspace::new(n), |ws, s| {
                ws.run(self, s, mode, false);
                ws.dist.clone()
            })
            .collect();
        DistanceMatrix {
            mode,
            ids: self.ids.clone(),
            dist: rows.concat(),
        }
    }

    /// Sum of `f(d(s, t))` over ordered pairs `s != t` that are connected.
    /// Per-source totals use compensated summation and are combined in
    /// source order.
    pub(crate) fn sum_over_pairs<F>(&self, mode: DistanceMode, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let n = self.ids.len();
        let chunk_sums: Vec<f64> = (0..n.div_ceil(SOURCE_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut ws = SpWorkspace::new(n);
                let mut acc = KahanSum::default();
                for s in c * SOURCE_CHUNK..((c + 1) * SOURCE_CHUNK).min(n) {
                    ws.run(self, s, mode, false);
                    for &t in &ws.order {
                        if t != s {
                            acc.add(f(ws.dist[t]));
                        }
                    }
                }
                acc.total()
            })
            .collect();
        let mut acc = KahanSum::default();
        for x in chunk_sums {
            acc.add(x);
        }
        acc.total()
    }

    /// Unnormalized shortest-path betweenness, indexed by node.
    ///
    /// Each unordered pair contributes one unit, split equally over all of
    /// its shortest paths. In cost mode two path lengths count as equal when
    /// they agree within [`DIST_REL_TOL`].
    pub fn betweenness(&self, mode: DistanceMode) -> Vec<f64> {
        let n = self.ids.len();
        let partials: Vec<Vec<f64>> = (0..n.div_ceil(SOURCE_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut ws = SpWorkspace::new(n);
                let mut delta = vec![0.0; n];
                let mut bc = vec![0.0; n];
                for s in c * SOURCE_CHUNK..((c + 1) * SOURCE_CHUNK).min(n) {
                    ws.run(self, s, mode, true);
                    for &v in &ws.order {
                        delta[v] = 0.0;
                    }
                    for &w in ws.order.iter().rev() {
                        let coeff = (1.0 + delta[w]) / ws.sigma[w];
                        for &v in &ws.preds[w] {
                            delta[v] += ws.sigma[v] * coeff;
                        }
                        if w != s {
                            bc[w] += delta[w];
                        }
                    }
                }
                bc
            })
            .collect();
        let mut bc = vec![0.0; n];
        for part in partials {
            for (acc, x) in bc.iter_mut().zip(part) {
                *acc += x;
            }
        }
        // every unordered pair was visited from both ends
        bc.iter_mut().for_each(|x| *x /= 2.0);
        bc
    }

    /// Betweenness keyed by node id.
    pub fn betweenness_by_id(&self, mode: DistanceMode) -> BTreeMap<NodeId, f64> {
        self.ids.iter().cloned().zip(self.betweenness(mode)).collect()
    }

    /// Number of triangles through each node.
    pub fn triangles(&self) -> Vec<usize> {
        let n = self.ids.len();
        let mut tri = vec![0usize; n];
        let mut mark = vec![false; n];
        for v in 0..n {
            for &(u, _) in &self.adj[v] {
                mark[u] = true;
            }
            for &(u, _) in &self.adj[v] {
                if u <= v {
                    continue;
                }
                for &(w, _) in &self.adj[u] {
                    if w > u && mark[w] {
                        tri[v] += 1;
                        tri[u] += 1;
                        tri[w] += 1;
                    }
                }
            }
            for &(u, _) in &self.adj[v] {
                mark[u] = false;
            }
        }
        tri
    }

    /// Local clustering coefficient of every node; 0 when degree < 2.
    pub fn clustering_coeffs(&self) -> Vec<f64> {
        self.triangles()
            .into_iter()
            .enumerate()
            .map(|(v, t)| {
                let k = self.degree(v);
                if k < 2 {
                    0.0
                } else {
                    t as f64 / (k * (k - 1) / 2) as f64
                }
            })
            .collect()
    }

    /// Total cost of a minimum spanning tree over channel costs.
    pub fn mst_total_weight(&self) -> Result<f64> {
        if self.ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&x, &y| {
            let (ex, ey) = (&self.edges[x], &self.edges[y]);
            ex.cost
                .total_cmp(&ey.cost)
                .then((ex.a, ex.b).cmp(&(ey.a, ey.b)))
        });
        let mut uf = UnionFind::new(self.ids.len());
        let mut total = KahanSum::default();
        let mut taken = 0;
        for k in order {
            let e = &self.edges[k];
            if uf.union(e.a, e.b) {
                total.add(e.cost);
                taken += 1;
                if taken + 1 == self.ids.len() {
                    break;
                }
            }
        }
        Ok(total.total())
    }
}

/// Channels dropped or merged while building a graph from a snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SkipTally {
    pub self_loops: usize,
    pub zero_capacity: usize,
    /// Channels folded into an earlier channel on the same node pair.
    pub merged_parallel: usize,
}

/// Convert a snapshot into a channel graph at the given BTC/USD rate.
///
/// Parallel channels are merged by summing satoshi capacity before the USD
/// conversion. Self-loops and zero-capacity channels are dropped and
/// counted. Declared nodes without channels are kept as isolated nodes.
pub fn build_graph(snapshot: &Snapshot, btc_usd_rate: f64) -> Result<(ChannelGraph, SkipTally)> {
    if !(btc_usd_rate > 0.0) || !btc_usd_rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "BTC/USD rate must be positive, got {btc_usd_rate}"
        )));
    }
    let mut tally = SkipTally::default();
    let mut nodes: BTreeSet<NodeId> = snapshot
        .nodes
        .iter()
        .map(|n| NodeId::from(n.pub_key.as_str()))
        .collect();
    let mut sats: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for ch in &snapshot.channels {
        if ch.node1_pub == ch.node2_pub {
            tally.self_loops += 1;
            continue;
        }
        if ch.capacity_sat == 0 {
            tally.zero_capacity += 1;
            continue;
        }
        let (x, y) = (NodeId::from(ch.node1_pub.as_str()), NodeId::from(ch.node2_pub.as_str()));
        nodes.insert(x.clone());
        nodes.insert(y.clone());
        let key = if x < y { (x, y) } else { (y, x) };
        let slot = sats.entry(key).or_insert(0);
        if *slot > 0 {
            tally.merged_parallel += 1;
        }
        *slot = slot.saturating_add(ch.capacity_sat);
    }
    if sats.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let channels = sats
        .into_iter()
        .map(|(k, sat)| (k, (sat, sat as f64 * 1e-8 * btc_usd_rate)))
        .collect();
    Ok((ChannelGraph::assemble(nodes, channels)?, tally))
}

/// Dense all-pairs distance table.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub mode: DistanceMode,
    ids: Vec<NodeId>,
    dist: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.ids.len() + j]
    }

    pub fn get_by_id(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.ids.binary_search_by(|x| x.as_str().cmp(a)).ok()?;
        let j = self.ids.binary_search_by(|x| x.as_str().cmp(b)).ok()?;
        Some(self.get(i, j))
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= DIST_REL_TOL * a.abs().max(b.abs())
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            Ordering::Less => self.parent[rx] = ry,
            Ordering::Greater => self.parent[ry] = rx,
            Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
        true
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable single-source shortest-path state.
struct SpWorkspace {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
    done: Vec<bool>,
    /// Nodes in non-decreasing distance order (reached nodes only).
    order: Vec<usize>,
    heap: BinaryHeap<HeapEntry>,
    // min-heap on (distance bits, node); non-negative floats order like
    // their bit patterns
    dist_heap: BinaryHeap<Reverse<(u64, u32)>>,
    queue: VecDeque<usize>,
}

impl SpWorkspace {
    fn new(n: usize) -> Self {
        SpWorkspace {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            preds: vec![Vec::new(); n],
            done: vec![false; n],
            order: Vec::with_capacity(n),
            heap: BinaryHeap::new(),
            dist_heap: BinaryHeap::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self, track_paths: bool) {
        for &v in &self.order {
            self.dist[v] = f64::INFINITY;
            self.done[v] = false;
            if track_paths {
                self.sigma[v] = 0.0;
                self.preds[v].clear();
            }
        }
        self.order.clear();
        self.heap.clear();
        self.dist_heap.clear();
        self.queue.clear();
    }

    fn run(&mut self, g: &ChannelGraph, s: usize, mode: DistanceMode, track_paths: bool) {
        self.reset(track_paths);
        match mode {
            DistanceMode::Hop => self.bfs(g, s, track_paths),
            DistanceMode::Cost if track_paths => self.dijkstra(g, s, true),
            DistanceMode::Cost => self.dijkstra_dist(g, s),
        }
    }

    fn bfs(&mut self, g: &ChannelGraph, s: usize, track: bool) {
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v];
            for &(w, _) in &g.adj[v] {
                if self.dist[w].is_infinite() {
                    self.dist[w] = dv + 1.0;
                    self.queue.push_back(w);
                }
                if track && self.dist[w] == dv + 1.0 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
    }

    /// Distances only, over the flat cost rows. Relaxation follows the
    /// same tolerance rule as [`Self::dijkstra`]; settled nodes never pass
    /// it again, so no settled flags are kept.
    fn dijkstra_dist(&mut self, g: &ChannelGraph, s: usize) {
        self.dist[s] = 0.0;
        self.dist_heap.push(Reverse((0f64.to_bits(), s as u32)));
        while let Some(Reverse((bits, v))) = self.dist_heap.pop() {
            let v = v as usize;
            let d = f64::from_bits(bits);
            if d > self.dist[v] {
                continue;
            }
            self.order.push(v);
            for &(w, c) in &g.cost_adj[g.cost_start[v]..g.cost_start[v + 1]] {
                let wi = w as usize;
                let nd = d + c;
                let dw = self.dist[wi];
                if nd < dw && (dw.is_infinite() || !approx_eq(nd, dw)) {
                    self.dist[wi] = nd;
                    self.dist_heap.push(Reverse((nd.to_bits(), w)));
                }
            }
        }
    }

    fn dijkstra(&mut self, g: &ChannelGraph, s: usize, track: bool) {
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        self.heap.push(HeapEntry { dist: 0.0, node: s });
        while let Some(HeapEntry { dist: d, node: v }) = self.heap.pop() {
            if self.done[v] || d > self.dist[v] {
                continue;
            }
            self.done[v] = true;
            self.order.push(v);
            for &(w, k) in &g.adj[v] {
                if self.done[w] {
                    continue;
                }
                let nd = d + g.edges[k].cost;
                let dw = self.dist[w];
                if dw.is_infinite() || (nd < dw && !approx_eq(nd, dw)) {
                    self.dist[w] = nd;
                    self.heap.push(HeapEntry { dist: nd, node: w });
                    if track {
                        self.sigma[w] = self.sigma[v];
                        self.preds[w].clear();
                        self.preds[w].push(v);
                    }
                } else if track && approx_eq(nd, dw) {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
    }
}
