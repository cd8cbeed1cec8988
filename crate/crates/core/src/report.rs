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

//! Per-snapshot analysis pipeline and tabular emission (CSV, Markdown,
//! JSON) with a metadata header.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::anonymity::{topological_anonymity, FlagSense, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::graph::{build_graph, SkipTally};
use crate::ingest::Snapshot;
use crate::metrics::{metrics_report, MetricsReport};
use crate::powerlaw::{bootstrap_p, fit_power_law, PowerLawFit, XminRule};
use crate::robustness::AttackReport;
use crate::spectral::eigenratio;

pub const TOOL_NAME: &str = "lnt";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const METRICS_COLUMNS: [&str; 20] = [
    "snapshot_date",
    "nodes",
    "channels",
    "median_degree",
    "median_strength",
    "total_cap_btc",
    "total_cap_usd",
    "assort_weighted",
    "assort_unweighted",
    "efficiency_cost",
    "efficiency_hop",
    "transitivity",
    "mst_ratio",
    "density",
    "alpha",
    "ks_stat",
    "p_val",
    "ta",
    "eigenratio",
    "degree_capacity_corr",
];

pub const ATTACK_COLUMNS: [&str; 10] = [
    "snapshot_date",
    "strategy",
    "mode",
    "measure",
    "budget",
    "delta_eff_pct",
    "lcc_pct",
    "trials",
    "eff_std",
    "lcc_std",
];

/// Settings for the power-law, anonymity and spectral columns.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub xmin: XminRule,
    pub n_boot: usize,
    pub seed: u64,
    pub epsilon: usize,
    pub sense: FlagSense,
    pub weighted_laplacian: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            xmin: XminRule::Auto,
            n_boot: 200,
            seed: 42,
            epsilon: DEFAULT_EPSILON,
            sense: FlagSense::Literal,
            weighted_laplacian: false,
        }
    }
}

/// Everything reported for one snapshot.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotReport {
    pub metrics: MetricsReport,
    pub powerlaw: Option<PowerLawFit>,
    pub ta: Option<f64>,
    pub eigenratio: Option<f64>,
    /// Share of graph nodes left out of the largest component.
    pub outside_lcc_fraction: f64,
    pub skipped: SkipTally,
}

fn not_available<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::Undefined(_)
            | Error::InsufficientData(_)
            | Error::DegenerateFit(_)
            | Error::Disconnected
            | Error::Numerical(_),
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Build the graph, restrict it to its largest component and compute the
/// full metric row.
pub fn analyze_snapshot(snapshot: &Snapshot, btc_usd_rate: f64, cfg: &AnalysisConfig) -> Result<SnapshotReport> {
    let (full, skipped) = build_graph(snapshot, btc_usd_rate)?;
    let g = full.largest_component()?;
    let outside = 1.0 - g.node_count() as f64 / full.node_count() as f64;
    let metrics = metrics_report(&g, snapshot.timestamp.date_naive(), btc_usd_rate)?;

    let degrees: Vec<u64> = g.degrees().into_iter().map(|k| k as u64).collect();
    let powerlaw = not_available(fit_power_law(&degrees, cfg.xmin).and_then(|mut fit| {
        if cfg.n_boot > 0 {
            fit.p_value = not_available(bootstrap_p(&degrees, &fit, cfg.n_boot, cfg.seed, cfg.xmin))?;
        }
        Ok(fit)
    }))?;
    let ta = Some(topological_anonymity(&g, cfg.epsilon, cfg.sense)?.ta);
    let eigenratio = not_available(eigenratio(&g, cfg.weighted_laplacian))?.map(|r| r.eigenratio);

    Ok(SnapshotReport {
        metrics,
        powerlaw,
        ta,
        eigenratio,
        outside_lcc_fraction: outside,
        skipped,
    })
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Rendered with 6 significant digits.
    Float(f64),
    /// Rendered with a fixed number of fractional digits.
    Fixed(f64, usize),
    Text(String),
    Bool(bool),
    Na,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Na, Cell::Float)
    }

    fn text(&self) -> Option<String> {
        match self {
            Cell::Int(i) => Some(i.to_string()),
            Cell::Float(x) => Some(sig6(*x)),
            Cell::Fixed(x, d) => Some(format!("{x:.d$}")),
            Cell::Text(s) => Some(s.clone()),
            Cell::Bool(b) => Some(b.to_string()),
            Cell::Na => None,
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Na => Value::Null,
            // the JSON number is the value of the printed text
            Cell::Float(_) | Cell::Fixed(..) => {
                let printed: f64 = self.text().unwrap().parse().unwrap_or(f64::NAN);
                serde_json::Number::from_f64(printed).map_or(Value::Null, Value::Number)
            }
        }
    }
}

/// Format with 6 significant digits, keeping trailing zeros.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_owned();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap();
    let exp = rounded.abs().log10().floor() as i32;
    if (-4..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{rounded:.5e}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Column-ordered table plus run metadata.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, String>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.to_owned(), value.to_string());
        self
    }

    fn meta_line(&self) -> String {
        let mut parts = vec![format!("{TOOL_NAME} {TOOL_VERSION}")];
        parts.extend(self.metadata.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown().into_bytes(),
            Format::Json => self.to_json().into_bytes(),
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.meta_line()).into_bytes();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text().unwrap_or_default()))
                .expect("in-memory write");
        }
        out.extend(w.into_inner().expect("in-memory flush"));
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("<!-- {} -->\n", self.meta_line());
        s.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        s.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.text().unwrap_or_else(|| "NA".into())).collect();
            s.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("tool".into(), json!(TOOL_NAME));
        meta.insert("version".into(), json!(TOOL_VERSION));
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), json!(v));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": Value::Object(meta), "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
        s.push('\n');
        s
    }
}

fn date_cell(d: Option<NaiveDate>) -> Cell {
    d.map_or(Cell::Na, |d| Cell::Text(d.to_string()))
}

/// Metrics rows in the fixed column order.
pub fn metrics_table(reports: &[SnapshotReport]) -> Table {
    let mut t = Table::new(&METRICS_COLUMNS);
    for r in reports {
        let m = &r.metrics;
        let pl = r.powerlaw.as_ref();
        t.push(vec![
            date_cell(Some(m.snapshot_date)),
            Cell::Int(m.n_nodes as i64),
            Cell::Int(m.n_channels as i64),
            Cell::Float(m.median_degree),
            Cell::Float(m.median_strength),
            Cell::Float(m.total_capacity_btc),
            Cell::Float(m.total_capacity_usd),
            Cell::opt(m.assort_weighted),
            Cell::opt(m.assort_unweighted),
            Cell::Float(m.efficiency_cost),
            Cell::Float(m.efficiency_hop),
            Cell::opt(m.transitivity),
            Cell::opt(m.mst_ratio),
            Cell::Float(m.density),
            Cell::opt(pl.map(|f| f.alpha)),
            Cell::opt(pl.map(|f| f.ks_stat)),
            Cell::opt(pl.and_then(|f| f.p_value)),
            Cell::opt(r.ta),
            Cell::opt(r.eigenratio),
            Cell::opt(m.degree_capacity_corr),
        ]);
    }
    t
}

/// Attack rows; percentages keep 4 fractional digits.
pub fn attack_table(snapshot_date: Option<NaiveDate>, report: &AttackReport) -> Table {
    let mut t = Table::new(&ATTACK_COLUMNS);
    for row in &report.rows {
        t.push(vec![
            date_cell(snapshot_date),
            Cell::Text(row.strategy.clone()),
            Cell::Text(row.mode.to_string()),
            Cell::Text(row.measure.to_string()),
            Cell::Int(row.budget as i64),
            Cell::Fixed(row.delta_eff_pct, 4),
            Cell::Fixed(row.lcc_pct, 4),
            Cell::Int(row.trials as i64),
            row.eff_std.map_or(Cell::Na, |s| Cell::Fixed(s, 4)),
            row.lcc_std.map_or(Cell::Na, |s| Cell::Fixed(s, 4)),
        ]);
    }
    t
}
