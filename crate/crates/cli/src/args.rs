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

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lnt", version, about = "Payment-channel network topology analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One full metrics row per snapshot.
    Metrics(MetricsArgs),
    /// Metrics rows for every snapshot in a directory, ordered by timestamp.
    Timeseries(MetricsArgs),
    /// Targeted attacks and random failures.
    Attack(AttackArgs),
    /// Topological anonymity over degree classes.
    Anonymity(AnonymityArgs),
    /// Laplacian eigenratio.
    Sync(SyncArgs),
    /// Discrete power-law fit of the degree distribution.
    Powerlaw(PowerlawArgs),
    /// Write a synthetic preferential-attachment snapshot.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Md,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Hop,
    Cost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Degree,
    Strength,
    BcHop,
    BcCost,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Static,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sense {
    #[value(name = "paper")]
    Literal,
    Flipped,
}

#[derive(Args, Debug, Clone)]
pub struct Shared {
    /// Snapshot JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "snapshots")]
    pub snapshot: Option<PathBuf>,
    /// Directory of snapshot JSON files.
    #[arg(long, value_name = "DIR")]
    pub snapshots: Option<PathBuf>,
    /// BTC/USD rate table (`date,btc_usd`).
    #[arg(long, value_name = "PATH")]
    pub rates: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutFormat,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long, value_name = "N")]
    pub xmin: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub nboot: usize,
    #[arg(long, default_value_t = 4)]
    pub epsilon: usize,
    #[arg(long, value_enum, default_value = "paper")]
    pub sense: Sense,
    #[arg(long)]
    pub weighted_laplacian: bool,
    /// Write the largest component's edge list (CSV).
    #[arg(long, value_name = "PATH")]
    pub edges_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AttackArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long, value_enum)]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value = "static")]
    pub mode: Mode,
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,25,50")]
    pub budgets: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "cost")]
    pub measure: Measure,
}

#[derive(Args, Debug, Clone)]
pub struct AnonymityArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long, default_value_t = 4)]
    pub epsilon: usize,
    #[arg(long, value_enum, default_value = "paper")]
    pub sense: Sense,
    /// Write per-degree-class detail (CSV).
    #[arg(long, value_name = "PATH")]
    pub classes_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SyncArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long)]
    pub weighted_laplacian: bool,
    /// Write the Laplacian spectrum, one eigenvalue per row (CSV).
    #[arg(long, value_name = "PATH")]
    pub spectrum_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PowerlawArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long, value_name = "N")]
    pub xmin: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub nboot: usize,
    /// Write empirical and fitted CCDF series (CSV).
    #[arg(long, value_name = "PATH")]
    pub ccdf_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Mean of log(capacity in satoshi).
    #[arg(long, default_value_t = 13.8, allow_negative_numbers = true)]
    pub mu: f64,
    /// Standard deviation of log(capacity in satoshi).
    #[arg(long, default_value_t = 1.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// RFC 3339 timestamp stamped on the snapshot.
    #[arg(long, default_value = "2018-02-12T00:00:00Z")]
    pub timestamp: String,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
