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

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use lntopo::anonymity::{topological_anonymity, FlagSense};
use lntopo::ingest::{generate_synthetic, RateTable, Snapshot, SynthParams};
use lntopo::powerlaw::{bootstrap_p, fit_power_law, hurwitz_zeta, PowerLawFit, XminRule};
use lntopo::report::{
    analyze_snapshot, attack_table, metrics_table, sig6, AnalysisConfig, Cell, Format, Table, TOOL_NAME,
    TOOL_VERSION,
};
use lntopo::robustness::{
    random_failure_campaign, run_attack, AttackKind, AttackMode, AttackReport, AttackStrategy,
};
use lntopo::spectral::laplacian_spectrum;
use lntopo::{build_graph, ChannelGraph, DistanceMode};
use rayon::prelude::*;

use crate::args::*;
use crate::inputs::{load_rates, load_snapshots, rate_for, Loaded};
use crate::Failure;

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Metrics(a) => metrics(a, "metrics"),
        Command::Timeseries(a) => {
            if a.shared.snapshots.is_none() {
                return Err(Failure::Usage("timeseries requires --snapshots DIR".into()));
            }
            metrics(a, "timeseries")
        }
        Command::Attack(a) => attack(a),
        Command::Anonymity(a) => anonymity(a),
        Command::Sync(a) => sync(a),
        Command::Powerlaw(a) => powerlaw(a),
        Command::Synth(a) => synth(a),
    }
}

fn format_of(f: OutFormat) -> Format {
    match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Md => Format::Markdown,
        OutFormat::Json => Format::Json,
    }
}

fn sense_of(s: Sense) -> FlagSense {
    match s {
        Sense::Literal => FlagSense::Literal,
        Sense::Flipped => FlagSense::Indistinguishability,
    }
}

fn measure_of(m: Measure) -> DistanceMode {
    match m {
        Measure::Hop => DistanceMode::Hop,
        Measure::Cost => DistanceMode::Cost,
    }
}

fn xmin_of(x: Option<u64>) -> XminRule {
    x.map_or(XminRule::Auto, XminRule::Fixed)
}

fn xmin_label(x: Option<u64>) -> String {
    x.map_or_else(|| "auto".to_owned(), |v| v.to_string())
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn path_list(paths: &[&PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(";")
}

/// Metadata common to every table of a run.
fn base_meta(command: &str, shared: &Shared, loaded: &Loaded) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("command".into(), command.to_owned());
    m.insert("seed".into(), shared.seed.to_string());
    let inputs: Vec<&PathBuf> = loaded.snapshots.iter().map(|(p, _)| p).collect();
    m.insert("inputs".into(), path_list(&inputs));
    if let Some(r) = &shared.rates {
        m.insert("rates".into(), r.display().to_string());
    }
    m.insert("skipped_snapshots".into(), loaded.skipped.to_string());
    m
}

fn outside_lcc_meta(values: &[(NaiveDate, f64)]) -> String {
    match values {
        [(_, v)] => sig6(*v),
        _ => values
            .iter()
            .map(|(d, v)| format!("{d}:{}", sig6(*v)))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn finish(mut table: Table, meta: &BTreeMap<String, String>) -> Table {
    for (k, v) in meta {
        table.meta(k, v);
    }
    table
}

/// Largest component of a snapshot and the share of nodes outside it.
fn lcc_of(snapshot: &Snapshot, rates: Option<&RateTable>) -> Result<(ChannelGraph, f64), Failure> {
    let rate = rate_for(rates, snapshot)?;
    let (full, _) = build_graph(snapshot, rate)?;
    let g = full.largest_component()?;
    let outside = 1.0 - g.node_count() as f64 / full.node_count() as f64;
    Ok((g, outside))
}

fn date_of(s: &Snapshot) -> NaiveDate {
    s.timestamp.date_naive()
}

fn metrics(a: MetricsArgs, command: &str) -> Result<(), Failure> {
    let rates = load_rates(&a.shared, true)?;
    let loaded = load_snapshots(&a.shared)?;
    let rates = rates.as_ref();
    if a.edges_out.is_some() && loaded.snapshots.len() != 1 {
        return Err(Failure::Usage("--edges-out needs a single --snapshot".into()));
    }
    let cfg = AnalysisConfig {
        xmin: xmin_of(a.xmin),
        n_boot: a.nboot,
        seed: a.shared.seed,
        epsilon: a.epsilon,
        sense: sense_of(a.sense),
        weighted_laplacian: a.weighted_laplacian,
    };
    let reports = loaded
        .snapshots
        .par_iter()
        .map(|(path, s)| {
            let rate = rate_for(rates, s)?;
            analyze_snapshot(s, rate, &cfg).map_err(|e| match Failure::from(e) {
                Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
                other => other,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let mut meta = base_meta(command, &a.shared, &loaded);
    meta.insert("xmin".into(), xmin_label(a.xmin));
    meta.insert("nboot".into(), a.nboot.to_string());
    meta.insert("epsilon".into(), a.epsilon.to_string());
    meta.insert("sense".into(), cfg.sense.to_string());
    meta.insert("weighted_laplacian".into(), a.weighted_laplacian.to_string());
    let outside: Vec<(NaiveDate, f64)> = reports
        .iter()
        .map(|r| (r.metrics.snapshot_date, r.outside_lcc_fraction))
        .collect();
    meta.insert("outside_lcc".into(), outside_lcc_meta(&outside));

    if let Some(path) = &a.edges_out {
        let (g, _) = lcc_of(&loaded.snapshots[0].1, rates)?;
        let mut t = Table::new(&["node1", "node2", "capacity_sat", "capacity_usd", "cost"]);
        for ch in g.channels() {
            t.push(vec![
                Cell::Text(g.node_id(ch.a).to_string()),
                Cell::Text(g.node_id(ch.b).to_string()),
                Cell::Int(ch.capacity_sat as i64),
                Cell::Float(ch.capacity_usd),
                Cell::Float(ch.cost),
            ]);
        }
        write_bytes(Some(path), &finish(t, &meta).to_csv())?;
    }
    let table = finish(metrics_table(&reports), &meta);
    write_bytes(a.shared.out.as_deref(), &table.emit(format_of(a.shared.format)))
}

fn attack(a: AttackArgs) -> Result<(), Failure> {
    let rates = load_rates(&a.shared, true)?;
    let loaded = load_snapshots(&a.shared)?;
    if a.budgets.is_empty() {
        return Err(Failure::Usage("--budgets must list at least one budget".into()));
    }
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let measure = measure_of(a.measure);
    let mode = match a.mode {
        Mode::Static => AttackMode::Static,
        Mode::Adaptive => AttackMode::Adaptive,
    };
    let kind = match a.strategy {
        Strategy::Degree => AttackKind::Degree,
        Strategy::Strength => AttackKind::Strength,
        Strategy::BcHop => AttackKind::BetweennessHop,
        Strategy::BcCost => AttackKind::BetweennessCost,
        Strategy::Random => AttackKind::Random { seed: a.shared.seed },
    };

    let mut rows = Table::new(&lntopo::report::ATTACK_COLUMNS);
    let mut outside = Vec::new();
    for (_, s) in &loaded.snapshots {
        let (g, out) = lcc_of(s, rates.as_ref())?;
        outside.push((date_of(s), out));
        let report: AttackReport = match kind {
            AttackKind::Random { seed } => random_failure_campaign(&g, &a.budgets, a.trials, seed, measure)?,
            _ => run_attack(&g, AttackStrategy::new(kind, mode), &a.budgets, measure)?,
        };
        rows.rows.extend(attack_table(Some(date_of(s)), &report).rows);
    }

    let mut meta = base_meta("attack", &a.shared, &loaded);
    meta.insert("strategy".into(), kind.label().to_owned());
    meta.insert("mode".into(), mode.to_string());
    meta.insert("measure".into(), measure.to_string());
    meta.insert(
        "budgets".into(),
        a.budgets.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
    );
    meta.insert("trials".into(), a.trials.to_string());
    meta.insert("outside_lcc".into(), outside_lcc_meta(&outside));
    let table = finish(rows, &meta);
    write_bytes(a.shared.out.as_deref(), &table.emit(format_of(a.shared.format)))
}

fn anonymity(a: AnonymityArgs) -> Result<(), Failure> {
    let rates = load_rates(&a.shared, false)?;
    let loaded = load_snapshots(&a.shared)?;
    let sense = sense_of(a.sense);
    let mut summary = Table::new(&[
        "snapshot_date",
        "nodes",
        "epsilon",
        "sense",
        "reward_sum",
        "penalty_sum",
        "ta",
    ]);
    let mut classes = Table::new(&[
        "snapshot_date",
        "degree",
        "class_size",
        "cc_variance",
        "flag",
        "penalized",
    ]);
    let mut outside = Vec::new();
    for (_, s) in &loaded.snapshots {
        let (g, out) = lcc_of(s, rates.as_ref())?;
        outside.push((date_of(s), out));
        let r = topological_anonymity(&g, a.epsilon, sense)?;
        let date = Cell::Text(date_of(s).to_string());
        summary.push(vec![
            date.clone(),
            Cell::Int(r.n as i64),
            Cell::Int(r.epsilon as i64),
            Cell::Text(r.sense.to_string()),
            Cell::Int(r.reward_sum as i64),
            Cell::Int(r.penalty_sum as i64),
            Cell::Float(r.ta),
        ]);
        for c in &r.per_class {
            classes.push(vec![
                date.clone(),
                Cell::Int(c.degree as i64),
                Cell::Int(c.class_size as i64),
                Cell::Float(c.cc_variance),
                Cell::Bool(c.flag),
                Cell::Bool(c.penalized),
            ]);
        }
    }
    let mut meta = base_meta("anonymity", &a.shared, &loaded);
    meta.insert("epsilon".into(), a.epsilon.to_string());
    meta.insert("sense".into(), sense.to_string());
    meta.insert("outside_lcc".into(), outside_lcc_meta(&outside));
    if let Some(path) = &a.classes_out {
        write_bytes(Some(path), &finish(classes, &meta).to_csv())?;
    }
    let table = finish(summary, &meta);
    write_bytes(a.shared.out.as_deref(), &table.emit(format_of(a.shared.format)))
}

fn sync(a: SyncArgs) -> Result<(), Failure> {
    let rates = load_rates(&a.shared, a.weighted_laplacian)?;
    let loaded = load_snapshots(&a.shared)?;
    let mut summary = Table::new(&["snapshot_date", "nodes", "weighted", "lambda_2", "lambda_max", "eigenratio"]);
    let mut spectrum = Table::new(&["snapshot_date", "index", "eigenvalue"]);
    let mut outside = Vec::new();
    for (_, s) in &loaded.snapshots {
        let (g, out) = lcc_of(s, rates.as_ref())?;
        outside.push((date_of(s), out));
        let date = Cell::Text(date_of(s).to_string());
        let (l2, lmax, ratio) = match laplacian_spectrum(&g, a.weighted_laplacian) {
            Ok(eigs) => {
                for (i, v) in eigs.iter().enumerate() {
                    spectrum.push(vec![date.clone(), Cell::Int(i as i64), Cell::Float(*v)]);
                }
                if eigs.len() >= 3 {
                    let (l2, lmax) = (eigs[1], eigs[eigs.len() - 1]);
                    (Cell::Float(l2), Cell::Float(lmax), Cell::Float(lmax / l2))
                } else {
                    (Cell::Na, Cell::Na, Cell::Na)
                }
            }
            Err(e) => match Failure::from(e) {
                Failure::Compute(_) => (Cell::Na, Cell::Na, Cell::Na),
                other => return Err(other),
            },
        };
        summary.push(vec![
            date,
            Cell::Int(g.node_count() as i64),
            Cell::Bool(a.weighted_laplacian),
            l2,
            lmax,
            ratio,
        ]);
    }
    let mut meta = base_meta("sync", &a.shared, &loaded);
    meta.insert("weighted_laplacian".into(), a.weighted_laplacian.to_string());
    meta.insert("outside_lcc".into(), outside_lcc_meta(&outside));
    if let Some(path) = &a.spectrum_out {
        write_bytes(Some(path), &finish(spectrum, &meta).to_csv())?;
    }
    let table = finish(summary, &meta);
    write_bytes(a.shared.out.as_deref(), &table.emit(format_of(a.shared.format)))
}

fn fit_with_p(degrees: &[u64], rule: XminRule, n_boot: usize, seed: u64) -> Result<Option<PowerLawFit>, Failure> {
    let mut fit = match fit_power_law(degrees, rule) {
        Ok(f) => f,
        Err(lntopo::Error::InsufficientData(_) | lntopo::Error::DegenerateFit(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    if n_boot > 0 {
        fit.p_value = bootstrap_p(degrees, &fit, n_boot, seed, rule).ok();
    }
    Ok(Some(fit))
}

fn powerlaw(a: PowerlawArgs) -> Result<(), Failure> {
    let rates = load_rates(&a.shared, false)?;
    let loaded = load_snapshots(&a.shared)?;
    let rule = xmin_of(a.xmin);
    let mut summary = Table::new(&["snapshot_date", "nodes", "n_tail", "x_min", "alpha", "ks_stat", "p_val"]);
    let mut ccdf = Table::new(&["snapshot_date", "degree", "count", "ccdf_empirical", "ccdf_fitted"]);
    let mut outside = Vec::new();
    for (_, s) in &loaded.snapshots {
        let (g, out) = lcc_of(s, rates.as_ref())?;
        outside.push((date_of(s), out));
        let degrees: Vec<u64> = g.degrees().into_iter().map(|k| k as u64).collect();
        let fit = fit_with_p(&degrees, rule, a.nboot, a.shared.seed)?;
        let date = Cell::Text(date_of(s).to_string());
        summary.push(vec![
            date.clone(),
            Cell::Int(degrees.len() as i64),
            fit.as_ref().map_or(Cell::Na, |f| Cell::Int(f.n_tail as i64)),
            fit.as_ref().map_or(Cell::Na, |f| Cell::Int(f.x_min as i64)),
            Cell::opt(fit.as_ref().map(|f| f.alpha)),
            Cell::opt(fit.as_ref().map(|f| f.ks_stat)),
            Cell::opt(fit.as_ref().and_then(|f| f.p_value)),
        ]);

        let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
        for &k in &degrees {
            *counts.entry(k).or_default() += 1;
        }
        let n = degrees.len() as f64;
        let mut at_or_above = degrees.len();
        for (&k, &c) in &counts {
            let fitted = fit.as_ref().filter(|f| k >= f.x_min).map(|f| {
                f.n_tail as f64 / n * hurwitz_zeta(f.alpha, k as f64) / hurwitz_zeta(f.alpha, f.x_min as f64)
            });
            ccdf.push(vec![
                date.clone(),
                Cell::Int(k as i64),
                Cell::Int(c as i64),
                Cell::Float(at_or_above as f64 / n),
                Cell::opt(fitted),
            ]);
            at_or_above -= c;
        }
    }
    let mut meta = base_meta("powerlaw", &a.shared, &loaded);
    meta.insert("xmin".into(), xmin_label(a.xmin));
    meta.insert("nboot".into(), a.nboot.to_string());
    meta.insert("outside_lcc".into(), outside_lcc_meta(&outside));
    if let Some(path) = &a.ccdf_out {
        write_bytes(Some(path), &finish(ccdf, &meta).to_csv())?;
    }
    let table = finish(summary, &meta);
    write_bytes(a.shared.out.as_deref(), &table.emit(format_of(a.shared.format)))
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let timestamp = DateTime::parse_from_rfc3339(&a.timestamp)
        .map_err(|e| Failure::Usage(format!("--timestamp `{}`: {e}", a.timestamp)))?
        .with_timezone(&Utc);
    let params = SynthParams {
        n_nodes: a.nodes,
        m_attach: a.m,
        capacity_mu: a.mu,
        capacity_sigma: a.sigma,
        seed: a.seed,
        timestamp,
    };
    let snapshot = generate_synthetic(&params).map_err(|e| match e {
        lntopo::Error::InvalidParameter(m) => Failure::Usage(m),
        other => other.into(),
    })?;
    let mut doc: serde_json::Value =
        serde_json::from_str(&snapshot.to_json()).map_err(|e| Failure::Compute(e.to_string()))?;
    doc["metadata"] = serde_json::json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": "synth",
        "seed": a.seed,
        "nodes": a.nodes,
        "m": a.m,
        "mu": a.mu,
        "sigma": a.sigma,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))?;
    text.push('\n');
    write_bytes(a.out.as_deref(), text.as_bytes())
}
