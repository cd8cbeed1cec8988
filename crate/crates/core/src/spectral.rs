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

//! Laplacian spectrum and the synchronizability eigenratio
//! `λ_max / λ_2`; smaller is more synchronizable.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ChannelGraph;

const ZERO_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    /// Algebraic connectivity.
    pub lambda_2: f64,
    pub lambda_max: f64,
    pub eigenratio: f64,
    pub weighted: bool,
    pub n: usize,
}

/// Dense Laplacian `D - A`. Off-diagonal entries are `-cost` when
/// `weighted`, `-1` otherwise.
pub fn laplacian(g: &ChannelGraph, weighted: bool) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for e in g.channels() {
        let w = if weighted { e.cost } else { 1.0 };
        l[(e.a, e.b)] -= w;
        l[(e.b, e.a)] -= w;
        l[(e.a, e.a)] += w;
        l[(e.b, e.b)] += w;
    }
    l
}

/// All Laplacian eigenvalues in ascending order. The graph must be
/// connected.
pub fn laplacian_spectrum(g: &ChannelGraph, weighted: bool) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let l = laplacian(g, weighted);
    let mut eig: Vec<f64> = l.symmetric_eigenvalues().iter().copied().collect();
    if eig.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite Laplacian eigenvalue".into()));
    }
    eig.sort_by(f64::total_cmp);
    let scale = eig.last().copied().unwrap_or(0.0).max(1.0);
    if eig.len() >= 2 && eig[1] <= ZERO_TOL * scale {
        // combinatorially connected but numerically split: usually extreme
        // cost ratios in the weighted Laplacian
        return Err(Error::Disconnected);
    }
    Ok(eig)
}

pub fn eigenratio(g: &ChannelGraph, weighted: bool) -> Result<SpectralResult> {
    if g.node_count() < 3 {
        return Err(Error::InsufficientData(format!(
            "eigenratio needs at least 3 nodes, graph has {}",
            g.node_count()
        )));
    }
    let spectrum = laplacian_spectrum(g, weighted)?;
    let (lambda_2, lambda_max) = (spectrum[1], spectrum[spectrum.len() - 1]);
    Ok(SpectralResult {
        lambda_2,
        lambda_max,
        eigenratio: lambda_max / lambda_2,
        weighted,
        n: g.node_count(),
    })
}
