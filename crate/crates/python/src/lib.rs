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

//! Python bindings: snapshot parsing, graph construction and every analysis.
//! Structured results come back as plain dicts and lists.

use chrono::{DateTime, NaiveDate, Utc};
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyList, PyString};
use serde::Serialize;
use serde_json::Value;

use lntopo::anonymity::{topological_anonymity, FlagSense};
use lntopo::ingest::{generate_synthetic, parse_rates, parse_snapshot, SynthParams};
use lntopo::metrics::{global_efficiency, metrics_report};
use lntopo::powerlaw::{bootstrap_p, fit_power_law, XminRule};
use lntopo::report::{analyze_snapshot, AnalysisConfig};
use lntopo::robustness::{random_failure_campaign, run_attack, AttackKind, AttackMode, AttackStrategy};
use lntopo::spectral::{eigenratio, laplacian_spectrum};
use lntopo::{build_graph, ChannelGraph, DistanceMode, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) | Error::Transport { .. } | Error::HttpStatus(_) | Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => PyFloat::new(py, n.as_f64().unwrap_or(f64::NAN)).into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn mode(name: &str) -> PyResult<DistanceMode> {
    match name {
        "hop" => Ok(DistanceMode::Hop),
        "cost" => Ok(DistanceMode::Cost),
        other => Err(PyValueError::new_err(format!("mode must be `hop` or `cost`, got `{other}`"))),
    }
}

fn xmin_rule(xmin: Option<u64>) -> XminRule {
    xmin.map_or(XminRule::Auto, XminRule::Fixed)
}

fn parse_date(s: &str) -> PyResult<NaiveDate> {
    s.parse()
        .map_err(|e| PyValueError::new_err(format!("date `{s}`: {e}")))
}

/// Undirected channel graph weighted by routing cost (1 / USD capacity).
#[pyclass(module = "lntopo", name = "ChannelGraph", frozen)]
struct PyChannelGraph {
    inner: ChannelGraph,
}

#[pymethods]
impl PyChannelGraph {
    /// Build from `(a, b, capacity_usd)` triples.
    #[staticmethod]
    fn from_edges(edges: Vec<(String, String, f64)>) -> PyResult<Self> {
        Ok(PyChannelGraph {
            inner: ChannelGraph::from_usd_edges(&edges).map_err(py_err)?,
        })
    }

    /// Build from a snapshot JSON document and a BTC/USD rate.
    #[staticmethod]
    fn from_snapshot(data: &str, btc_usd: f64) -> PyResult<Self> {
        let parsed = parse_snapshot(data.as_bytes()).map_err(py_err)?;
        let (g, _) = build_graph(&parsed.snapshot, btc_usd).map_err(py_err)?;
        Ok(PyChannelGraph { inner: g })
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelGraph(nodes={}, channels={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }

    fn node_ids(&self) -> Vec<String> {
        self.inner.node_ids().iter().map(|id| id.to_string()).collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn largest_component(&self) -> PyResult<Self> {
        Ok(PyChannelGraph {
            inner: self.inner.largest_component().map_err(py_err)?,
        })
    }

    /// Edges as `(a, b, capacity_sat, capacity_usd, cost)`.
    fn edges(&self) -> Vec<(String, String, u64, f64, f64)> {
        let g = &self.inner;
        g.channels()
            .iter()
            .map(|c| {
                (
                    g.node_id(c.a).to_string(),
                    g.node_id(c.b).to_string(),
                    c.capacity_sat,
                    c.capacity_usd,
                    c.cost,
                )
            })
            .collect()
    }

    /// Shortest-path distance between two nodes, `None` when unreachable.
    #[pyo3(signature = (source, target, mode = "hop"))]
    fn distance(&self, source: &str, target: &str, mode: &str) -> PyResult<Option<f64>> {
        let g = &self.inner;
        let idx = |id: &str| g.index_of(id).ok_or_else(|| PyIndexError::new_err(format!("unknown node `{id}`")));
        let (s, t) = (idx(source)?, idx(target)?);
        let d = g.distances_from(s, self::mode(mode)?)[t];
        Ok(d.is_finite().then_some(d))
    }

    /// Unnormalized betweenness keyed by node id.
    #[pyo3(signature = (mode = "hop"))]
    fn betweenness(&self, py: Python<'_>, mode: &str) -> PyResult<Py<PyAny>> {
        let m = self::mode(mode)?;
        let scores = py.detach(|| self.inner.betweenness_by_id(m));
        let dict = PyDict::new(py);
        for (id, v) in scores {
            dict.set_item(id.as_str(), v)?;
        }
        Ok(dict.into_any().unbind())
    }

    #[pyo3(signature = (mode = "hop"))]
    fn global_efficiency(&self, py: Python<'_>, mode: &str) -> PyResult<f64> {
        let m = self::mode(mode)?;
        py.detach(|| global_efficiency(&self.inner, m)).map_err(py_err)
    }

    /// Full descriptive metrics; the graph must be connected.
    #[pyo3(signature = (snapshot_date, btc_usd))]
    fn metrics(&self, py: Python<'_>, snapshot_date: &str, btc_usd: f64) -> PyResult<Py<PyAny>> {
        let date = parse_date(snapshot_date)?;
        let r = py.detach(|| metrics_report(&self.inner, date, btc_usd)).map_err(py_err)?;
        Ok(serialize(py, &r)?.unbind())
    }

    #[pyo3(signature = (epsilon = 4, sense = "literal"))]
    fn topological_anonymity(&self, py: Python<'_>, epsilon: usize, sense: &str) -> PyResult<Py<PyAny>> {
        let sense: FlagSense = sense.parse().map_err(py_err)?;
        let r = topological_anonymity(&self.inner, epsilon, sense).map_err(py_err)?;
        Ok(serialize(py, &r)?.unbind())
    }

    #[pyo3(signature = (weighted = false))]
    fn laplacian_spectrum(&self, py: Python<'_>, weighted: bool) -> PyResult<Vec<f64>> {
        py.detach(|| laplacian_spectrum(&self.inner, weighted)).map_err(py_err)
    }

    #[pyo3(signature = (weighted = false))]
    fn eigenratio(&self, py: Python<'_>, weighted: bool) -> PyResult<f64> {
        py.detach(|| eigenratio(&self.inner, weighted))
            .map(|r| r.eigenratio)
            .map_err(py_err)
    }

    /// Node-removal campaign; returns one dict per budget.
    #[pyo3(signature = (strategy, budgets = vec![1, 2, 5, 10, 25, 50], mode = "static", measure = "cost", seed = 42, trials = 100))]
    fn attack(
        &self,
        py: Python<'_>,
        strategy: &str,
        budgets: Vec<usize>,
        mode: &str,
        measure: &str,
        seed: u64,
        trials: usize,
    ) -> PyResult<Py<PyAny>> {
        let kind = AttackKind::parse(strategy, seed).map_err(py_err)?;
        let attack_mode: AttackMode = mode.parse().map_err(py_err)?;
        let measure = self::mode(measure)?;
        let report = py
            .detach(|| match kind {
                AttackKind::Random { seed } => random_failure_campaign(&self.inner, &budgets, trials, seed, measure),
                _ => run_attack(&self.inner, AttackStrategy::new(kind, attack_mode), &budgets, measure),
            })
            .map_err(py_err)?;
        Ok(serialize(py, &report.rows)?.unbind())
    }
}

/// Discrete power-law fit; `xmin=None` selects x_min by KS minimization.
#[pyfunction]
#[pyo3(signature = (values, xmin = None, n_boot = 0, seed = 42))]
fn fit_powerlaw(py: Python<'_>, values: Vec<u64>, xmin: Option<u64>, n_boot: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let rule = xmin_rule(xmin);
    let fit = py
        .detach(|| {
            let mut fit = fit_power_law(&values, rule)?;
            if n_boot > 0 {
                fit.p_value = Some(bootstrap_p(&values, &fit, n_boot, seed, rule)?);
            }
            Ok(fit)
        })
        .map_err(py_err)?;
    Ok(serialize(py, &fit)?.unbind())
}

/// Synthetic preferential-attachment snapshot as a JSON string.
#[pyfunction]
#[pyo3(signature = (n_nodes = 2000, m_attach = 3, seed = 42, capacity_mu = 13.8, capacity_sigma = 1.5, timestamp = "2018-02-12T00:00:00Z"))]
fn synth_snapshot(
    n_nodes: usize,
    m_attach: usize,
    seed: u64,
    capacity_mu: f64,
    capacity_sigma: f64,
    timestamp: &str,
) -> PyResult<String> {
    let timestamp = DateTime::parse_from_rfc3339(timestamp)
        .map_err(|e| PyValueError::new_err(format!("timestamp `{timestamp}`: {e}")))?
        .with_timezone(&Utc);
    let params = SynthParams {
        n_nodes,
        m_attach,
        capacity_mu,
        capacity_sigma,
        seed,
        timestamp,
    };
    Ok(generate_synthetic(&params).map_err(py_err)?.to_json())
}

/// Validate a snapshot document and return it as a dict.
#[pyfunction]
fn load_snapshot(py: Python<'_>, data: &str) -> PyResult<Py<PyAny>> {
    let parsed = parse_snapshot(data.as_bytes()).map_err(py_err)?;
    let v: Value = serde_json::from_str(&parsed.snapshot.to_json()).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(to_py(py, &v)?.unbind())
}

/// Parse a `date,btc_usd` rate table into `{date: rate}`.
#[pyfunction]
fn load_rates(py: Python<'_>, data: &str) -> PyResult<Py<PyAny>> {
    let table = parse_rates(data.as_bytes()).map_err(py_err)?;
    let dict = PyDict::new(py);
    for (d, r) in table.iter() {
        dict.set_item(d.to_string(), r)?;
    }
    Ok(dict.into_any().unbind())
}

/// Whole pipeline on a snapshot: largest component, metrics, power-law
/// fit, anonymity and eigenratio.
#[pyfunction]
#[pyo3(signature = (data, btc_usd, xmin = None, n_boot = 200, seed = 42, epsilon = 4, sense = "literal", weighted_laplacian = false))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    py: Python<'_>,
    data: &str,
    btc_usd: f64,
    xmin: Option<u64>,
    n_boot: usize,
    seed: u64,
    epsilon: usize,
    sense: &str,
    weighted_laplacian: bool,
) -> PyResult<Py<PyAny>> {
    let parsed = parse_snapshot(data.as_bytes()).map_err(py_err)?;
    let cfg = AnalysisConfig {
        xmin: xmin_rule(xmin),
        n_boot,
        seed,
        epsilon,
        sense: sense.parse().map_err(py_err)?,
        weighted_laplacian,
    };
    let report = py
        .detach(|| analyze_snapshot(&parsed.snapshot, btc_usd, &cfg))
        .map_err(py_err)?;
    Ok(serialize(py, &report)?.unbind())
}

#[pymodule(name = "lntopo")]
fn lntopo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyChannelGraph>()?;
    m.add_function(wrap_pyfunction!(fit_powerlaw, m)?)?;
    m.add_function(wrap_pyfunction!(synth_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(load_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(load_rates, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
