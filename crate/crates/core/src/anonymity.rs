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

//! Topological anonymity over degree classes.
//!
//! Nodes are grouped by degree. Each class earns its size as a reward
//! when its Boolean clustering flag is set, and every class with fewer than
//! `epsilon` members is subtracted as re-identifiable:
//!
//! `ta = (Σ_i |D_i| · flag_i - Σ_{|D_j| < ε} |D_j|) / n`

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ChannelGraph, NodeId};

/// Default privacy level.
pub const DEFAULT_EPSILON: usize = 4;

const VARIANCE_TOL: f64 = 1e-12;

/// Which way the clustering-variance flag points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagSense {
    /// flag = 1 when clustering varies within the class.
    #[default]
    Literal,
    /// flag = 1 when the class is uniform in clustering.
    Indistinguishability,
}

impl fmt::Display for FlagSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlagSense::Literal => "paper",
            FlagSense::Indistinguishability => "flipped",
        })
    }
}

impl FromStr for FlagSense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "literal" => Ok(FlagSense::Literal),
            "flipped" | "indistinguishability" => Ok(FlagSense::Indistinguishability),
            other => Err(Error::InvalidParameter(format!("unknown sense `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeClass {
    pub degree: usize,
    pub class_size: usize,
    /// Population variance of local clustering within the class.
    pub cc_variance: f64,
    pub flag: bool,
    pub penalized: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaResult {
    pub ta: f64,
    pub epsilon: usize,
    pub sense: FlagSense,
    pub n: usize,
    pub reward_sum: usize,
    pub penalty_sum: usize,
    pub per_class: Vec<DegreeClass>,
}

/// Partition of the nodes by exact degree.
pub fn degree_classes(g: &ChannelGraph) -> BTreeMap<usize, BTreeSet<NodeId>> {
    let mut classes: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (v, id) in g.node_ids().iter().enumerate() {
        classes.entry(g.degree(v)).or_default().insert(id.clone());
    }
    classes
}

pub fn topological_anonymity(g: &ChannelGraph, epsilon: usize, sense: FlagSense) -> Result<TaResult> {
    if epsilon < 2 {
        return Err(Error::InvalidParameter(format!("epsilon must be >= 2, got {epsilon}")));
    }
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let cc = g.clustering_coeffs();
    let mut by_degree: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (v, c) in cc.into_iter().enumerate() {
        by_degree.entry(g.degree(v)).or_default().push(c);
    }

    let (mut reward, mut penalty) = (0, 0);
    let per_class = by_degree
        .into_iter()
        .map(|(degree, ccs)| {
            let size = ccs.len();
            let mean = ccs.iter().sum::<f64>() / size as f64;
            let var = ccs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / size as f64;
            let varies = var > VARIANCE_TOL;
            let flag = match sense {
                FlagSense::Literal => varies,
                FlagSense::Indistinguishability => !varies,
            };
            let penalized = size < epsilon;
            if flag {
                reward += size;
            }
            if penalized {
                penalty += size;
            }
            DegreeClass {
                degree,
                class_size: size,
                cc_variance: var,
                flag,
                penalized,
            }
        })
        .collect();

    let n = g.node_count();
    Ok(TaResult {
        ta: (reward as f64 - penalty as f64) / n as f64,
        epsilon,
        sense,
        n,
        reward_sum: reward,
        penalty_sum: penalty,
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(pairs: &[(&str, &str)]) -> ChannelGraph {
        ChannelGraph::from_pairs(pairs).unwrap()
    }

    fn ids(set: &BTreeSet<NodeId>) -> Vec<&str> {
        set.iter().map(NodeId::as_str).collect()
    }

    #[test]
    fn degree_class_examples() {
        let star = g(&[("h", "a"), ("h", "b"), ("h", "c")]);
        let classes = degree_classes(&star);
        assert_eq!(ids(&classes[&3]), ["h"]);
        assert_eq!(ids(&classes[&1]), ["a", "b", "c"]);

        let c4 = g(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        let classes = degree_classes(&c4);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[&2].len(), 4);

        let p3 = g(&[("a", "b"), ("b", "c")]);
        let classes = degree_classes(&p3);
        assert_eq!(ids(&classes[&1]), ["a", "c"]);
        assert_eq!(ids(&classes[&2]), ["b"]);
    }

    #[test]
    fn five_cycle() {
        let c5 = g(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]);
        let lit = topological_anonymity(&c5, 4, FlagSense::Literal).unwrap();
        assert_eq!(lit.ta, 0.0);
        let flip = topological_anonymity(&c5, 4, FlagSense::Indistinguishability).unwrap();
        assert_eq!(flip.ta, 1.0);
    }

    #[test]
    fn star_on_four() {
        let star = g(&[("h", "a"), ("h", "b"), ("h", "c")]);
        let r = topological_anonymity(&star, 4, FlagSense::Literal).unwrap();
        assert_eq!(r.ta, -1.0);
        assert_eq!(r.penalty_sum, 4);
        assert!(r.per_class.iter().all(|c| !c.flag && c.penalized));
    }

    #[test]
    fn varying_clustering_sets_literal_flag() {
        // degree-2 nodes: a, b on a triangle (cc 1) and e on a path (cc 0)
        let x = g(&[("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("d", "e"), ("e", "f")]);
        let r = topological_anonymity(&x, 2, FlagSense::Literal).unwrap();
        let two = r.per_class.iter().find(|c| c.degree == 2).unwrap();
        assert!(two.flag);
        assert!(two.cc_variance > 0.0);
    }

    #[test]
    fn epsilon_floor() {
        let p3 = g(&[("a", "b"), ("b", "c")]);
        assert!(topological_anonymity(&p3, 1, FlagSense::Literal).is_err());
    }
}
