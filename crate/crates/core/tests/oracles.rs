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

//! Library results against brute-force reference computations on small
//! random graphs.

mod common;

use lntopo::metrics::{
    assortativity_degree, assortativity_weighted, global_efficiency, mst_ratio, transitivity,
};
use lntopo::{ChannelGraph, DistanceMode};

use common::*;

fn graphs() -> impl Iterator<Item = (u64, ChannelGraph)> {
    (0..60u64).map(|seed| {
        let n = 3 + (seed % 6) as usize;
        let g = if seed % 3 == 0 {
            random_graph_tied(seed, n, 0.5)
        } else {
            random_graph(seed, n, 0.45, seed % 3 == 1)
        };
        (seed, g)
    })
}

#[test]
fn distances_match_enumeration() {
    for (seed, g) in graphs() {
        for (mode, weighted) in [(DistanceMode::Hop, false), (DistanceMode::Cost, true)] {
            let dm = g.sp_distances(mode);
            for s in 0..g.node_count() {
                for t in 0..g.node_count() {
                    let want = if s == t { 0.0 } else { shortest_paths(&g, s, t, weighted).0 };
                    let got = dm.get(s, t);
                    assert!(
                        (got.is_infinite() && want.is_infinite()) || (got - want).abs() <= 1e-12 * want.max(1.0),
                        "seed {seed} {mode} d({s},{t}) = {got}, expected {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn efficiency_matches_enumeration() {
    for (seed, g) in graphs() {
        let n = g.node_count() as f64;
        for (mode, weighted) in [(DistanceMode::Hop, false), (DistanceMode::Cost, true)] {
            let want = efficiency_numerator_oracle(&g, weighted) / (n * (n - 1.0));
            let got = global_efficiency(&g, mode).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "seed {seed} {mode}: {got} vs {want}");
        }
    }
}

#[test]
fn largest_component_matches_flood_fill() {
    for (seed, g) in graphs() {
        assert_eq!(g.largest_component_size(), largest_component_oracle(&g), "seed {seed}");
        let lcc = g.largest_component().unwrap();
        assert_eq!(lcc.node_count(), largest_component_oracle(&g));
        assert!(lcc.is_connected());
    }
}

/// Triangles and connected triples by looping over node triples.
fn triangle_oracle(g: &ChannelGraph) -> (Vec<usize>, usize, usize) {
    let n = g.node_count();
    let mut tri = vec![0; n];
    let mut closed = 0;
    let mut triples = 0;
    for v in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if a == v || b == v || !g.has_edge(v, a) || !g.has_edge(v, b) {
                    continue;
                }
                triples += 1;
                if g.has_edge(a, b) {
                    tri[v] += 1;
                    closed += 1;
                }
            }
        }
    }
    (tri, closed, triples)
}

#[test]
fn clustering_matches_triple_enumeration() {
    for (seed, g) in graphs() {
        let (tri, closed, triples) = triangle_oracle(&g);
        assert_eq!(g.triangles(), tri, "seed {seed}");
        for (v, c) in g.clustering_coeffs().into_iter().enumerate() {
            let k = g.degree(v);
            let want = if k < 2 { 0.0 } else { 2.0 * tri[v] as f64 / (k * (k - 1)) as f64 };
            assert!((c - want).abs() < 1e-15, "seed {seed} node {v}");
        }
        match transitivity(&g) {
            Ok(t) => assert!((t - closed as f64 / triples as f64).abs() < 1e-15),
            Err(_) => assert_eq!(triples, 0, "seed {seed}"),
        }
    }
}

/// Minimum spanning tree weight over all edge subsets of size n-1.
fn mst_oracle(g: &ChannelGraph) -> Option<f64> {
    let m = g.edge_count();
    let n = g.node_count();
    let ch = g.channels();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let picked: Vec<(String, String, f64)> = (0..m)
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| (g.node_id(ch[k].a).to_string(), g.node_id(ch[k].b).to_string(), ch[k].capacity_usd))
            .collect();
        let names: Vec<String> = g.node_ids().iter().map(|i| i.to_string()).collect();
        let t = ChannelGraph::from_usd_edges_with_nodes(names.iter(), &picked).unwrap();
        if t.is_connected() {
            let w: f64 = (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| ch[k].cost).sum();
            best = Some(best.map_or(w, |b| b.min(w)));
        }
    }
    best
}

#[test]
fn mst_matches_subset_enumeration() {
    let mut checked = 0;
    for (seed, g) in graphs() {
        if g.edge_count() > 14 {
            continue;
        }
        match mst_oracle(&g) {
            Some(w) => {
                let got = g.mst_total_weight().unwrap();
                assert!((got - w).abs() <= 1e-12 * w, "seed {seed}: {got} vs {w}");
                let total: f64 = g.channels().iter().map(|c| c.cost).sum();
                assert!((mst_ratio(&g).unwrap() - w / total).abs() < 1e-12);
                checked += 1;
            }
            None => assert!(g.mst_total_weight().is_err(), "seed {seed}"),
        }
    }
    assert!(checked >= 20, "only {checked} connected graphs checked");
}

/// Pearson correlation over both orientations of every edge, with
/// optional per-edge weights.
fn assortativity_oracle(g: &ChannelGraph, weighted: bool) -> Option<f64> {
    let deg = |v: usize| g.degree(v) as f64;
    let mut rows = Vec::new();
    for c in g.channels() {
        let w = if weighted { c.cost } else { 1.0 };
        rows.push((w, deg(c.a), deg(c.b)));
        rows.push((w, deg(c.b), deg(c.a)));
    }
    let h: f64 = rows.iter().map(|r| r.0).sum();
    let mx = rows.iter().map(|r| r.0 * r.1).sum::<f64>() / h;
    let my = rows.iter().map(|r| r.0 * r.2).sum::<f64>() / h;
    let cov = rows.iter().map(|r| r.0 * (r.1 - mx) * (r.2 - my)).sum::<f64>() / h;
    let vx = rows.iter().map(|r| r.0 * (r.1 - mx).powi(2)).sum::<f64>() / h;
    let vy = rows.iter().map(|r| r.0 * (r.2 - my).powi(2)).sum::<f64>() / h;
    if vx <= 1e-12 || vy <= 1e-12 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[test]
fn assortativity_matches_weighted_pearson() {
    for (seed, g) in graphs() {
        if g.edge_count() == 0 {
            continue;
        }
        for weighted in [false, true] {
            let got = if weighted { assortativity_weighted(&g) } else { assortativity_degree(&g) };
            match (got, assortativity_oracle(&g, weighted)) {
                (Ok(a), Some(b)) => assert!((a - b).abs() < 1e-9, "seed {seed} weighted={weighted}: {a} vs {b}"),
                (Err(_), None) => {}
                (a, b) => panic!("seed {seed} weighted={weighted}: {a:?} vs {b:?}"),
            }
        }
    }
}
