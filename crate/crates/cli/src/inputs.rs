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

//! Snapshot and rate-table loading.

use std::fs;
use std::path::{Path, PathBuf};

use lntopo::ingest::{parse_rates, parse_snapshot, RateTable, Snapshot};

use crate::args::Shared;
use crate::Failure;

pub struct Loaded {
    pub snapshots: Vec<(PathBuf, Snapshot)>,
    /// Files in directory mode that failed to parse.
    pub skipped: usize,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_snapshots(shared: &Shared) -> Result<Loaded, Failure> {
    let mut loaded = match (&shared.snapshot, &shared.snapshots) {
        (Some(path), None) => {
            let parsed = parse_snapshot(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Loaded {
                snapshots: vec![(path.clone(), parsed.snapshot)],
                skipped: 0,
            }
        }
        (None, Some(dir)) => load_dir(dir)?,
        _ => return Err(Failure::Usage("one of --snapshot or --snapshots is required".into())),
    };
    loaded
        .snapshots
        .sort_by(|a, b| a.1.timestamp.cmp(&b.1.timestamp).then_with(|| a.0.cmp(&b.0)));
    Ok(loaded)
}

fn load_dir(dir: &Path) -> Result<Loaded, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut snapshots = Vec::new();
    let mut skipped = 0;
    for path in paths {
        match fs::read(&path).map_err(lntopo::Error::from).and_then(|b| parse_snapshot(&b)) {
            Ok(parsed) => snapshots.push((path, parsed.snapshot)),
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", path.display());
                skipped += 1;
            }
        }
    }
    if snapshots.is_empty() {
        return Err(Failure::Input(format!(
            "no parseable snapshots in {} ({skipped} skipped)",
            dir.display()
        )));
    }
    Ok(Loaded { snapshots, skipped })
}

pub fn load_rates(shared: &Shared, required: bool) -> Result<Option<RateTable>, Failure> {
    match &shared.rates {
        Some(path) => parse_rates(&read(path)?)
            .map(Some)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None if required => Err(Failure::Usage("--rates is required for this command".into())),
        None => Ok(None),
    }
}

/// Rate for the snapshot's UTC date; topology-only commands run without a
/// table and use a unit rate.
pub fn rate_for(rates: Option<&RateTable>, snapshot: &Snapshot) -> Result<f64, Failure> {
    match rates {
        Some(t) => Ok(t.rate_on(snapshot.timestamp.date_naive())?),
        None => Ok(1.0),
    }
}
