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

//! Laplacian spectra against exact characteristic polynomials.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use lntopo::spectral::{eigenratio, laplacian_spectrum};
use lntopo::ChannelGraph;

use common::*;

type Q = BigRational;

/// Exact Laplacian with integer entries: unit weights, or the costs of a
/// graph whose capacities are 1, 1/2 or 1/4 USD.
fn exact_laplacian(g: &ChannelGraph, weighted: bool) -> Vec<Vec<Q>> {
    let n = g.node_count();
    let mut l = vec![vec![Q::zero(); n]; n];
    for c in g.channels() {
        let w = if weighted {
            let k = c.cost.round();
            assert_eq!(k, c.cost, "non-integer cost");
            Q::from_integer(BigInt::from(k as i64))
        } else {
            Q::one()
        };
        l[c.a][c.b] -= &w;
        l[c.b][c.a] -= &w;
        l[c.a][c.a] += &w;
        l[c.b][c.b] += &w;
    }
    l
}

/// Characteristic polynomial coefficients `c[0..=n]` of `a` (monic,
/// `c[n] = 1`) by the Faddeev–LeVerrier recursion.
fn char_poly(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // m <- a * m + c[n-k+1] * I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for t in 0..n {
                    s += &a[i][t] * &m[t][j];
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = Q::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &a[i][t] * &m[t][i];
            }
        }
        c[n - k] = -tr / Q::from_integer(BigInt::from(k));
    }
    c
}

/// Elementary symmetric polynomials e_0..=e_n of `xs`.
fn elementary(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e
}

fn small_connected(weighted: bool) -> Vec<ChannelGraph> {
    (0..200u64)
        .filter_map(|seed| {
            let n = 2 + (seed % 5) as usize;
            let g = if weighted {
                random_graph_tied(seed, n, 0.6)
            } else {
                random_graph(seed, n, 0.6, false)
            };
            g.is_connected().then_some(g)
        })
        .collect()
}

#[test]
fn spectrum_has_the_exact_characteristic_polynomial() {
    for weighted in [false, true] {
        let graphs = small_connected(weighted);
        assert!(graphs.len() > 50);
        for g in &graphs {
            let c = char_poly(&exact_laplacian(g, weighted));
            let eigs = laplacian_spectrum(g, weighted).unwrap();
            let e = elementary(&eigs);
            let n = g.node_count();
            // c[n-k] = (-1)^k e_k
            for k in 1..=n {
                let want = c[n - k].to_f64().unwrap() * if k % 2 == 0 { 1.0 } else { -1.0 };
                let scale = e[k].abs().max(want.abs()).max(1.0);
                assert!(
                    (e[k] - want).abs() <= 1e-9 * scale,
                    "weighted={weighted} n={n} e_{k}: {} vs {want}",
                    e[k]
                );
            }
            // connected: constant term zero, linear term non-zero
            assert!(c[0].is_zero());
            assert!(!c[1].is_zero());
            assert!(c[1].is_negative() == (n % 2 == 0));
        }
    }
}

#[test]
fn trace_and_single_zero_eigenvalue() {
    for weighted in [false, true] {
        for g in small_connected(weighted) {
            let eigs = laplacian_spectrum(&g, weighted).unwrap();
            let trace: f64 = eigs.iter().sum();
            let want: f64 = g.channels().iter().map(|c| if weighted { 2.0 * c.cost } else { 2.0 }).sum();
            assert!((trace - want).abs() <= 1e-9 * want);
            let scale = eigs.last().unwrap().abs();
            assert_eq!(eigs.iter().filter(|l| l.abs() <= 1e-8 * scale).count(), 1);
            assert!(eigs.windows(2).all(|w| w[0] <= w[1]), "spectrum sorted ascending");
        }
    }
}

#[test]
fn adding_an_edge_never_lowers_algebraic_connectivity() {
    let mut checked = 0;
    for g in small_connected(false) {
        let n = g.node_count();
        let l2 = laplacian_spectrum(&g, false).unwrap()[1];
        for u in 0..n {
            for v in u + 1..n {
                if g.has_edge(u, v) {
                    continue;
                }
                let mut edges: Vec<(String, String, f64)> = g
                    .channels()
                    .iter()
                    .map(|c| (g.node_id(c.a).to_string(), g.node_id(c.b).to_string(), 1.0))
                    .collect();
                edges.push((g.node_id(u).to_string(), g.node_id(v).to_string(), 1.0));
                let h = ChannelGraph::from_usd_edges(&edges).unwrap();
                let l2h = laplacian_spectrum(&h, false).unwrap()[1];
                assert!(l2h >= l2 - 1e-9, "λ2 dropped from {l2} to {l2h}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn eigenratio_ignores_uniform_cost_scaling() {
    for g in small_connected(true).into_iter().filter(|g| g.node_count() >= 3) {
        let scaled: Vec<(String, String, f64)> = g
            .channels()
            .iter()
            .map(|c| (g.node_id(c.a).to_string(), g.node_id(c.b).to_string(), c.capacity_usd * 7.0))
            .collect();
        let h = ChannelGraph::from_usd_edges(&scaled).unwrap();
        let a = eigenratio(&g, true).unwrap().eigenratio;
        let b = eigenratio(&h, true).unwrap().eigenratio;
        assert!((a - b).abs() <= 1e-9 * a);
    }
}
