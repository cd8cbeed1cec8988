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

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Daily BTC/USD exchange rates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateTable {
    rates: BTreeMap<NaiveDate, f64>,
}

impl RateTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a rate; rejects duplicates and non-positive values.
    pub fn insert(&mut self, date: NaiveDate, btc_usd: f64) -> Result<()> {
        if !(btc_usd > 0.0) || !btc_usd.is_finite() {
            return Err(Error::Rates(format!("rate for {date} must be positive, got {btc_usd}")));
        }
        if self.rates.insert(date, btc_usd).is_some() {
            return Err(Error::Rates(format!("duplicate date {date}")));
        }
        Ok(())
    }

    pub fn rate_on(&self, date: NaiveDate) -> Result<f64> {
        self.rates
            .get(&date)
            .copied()
            .ok_or_else(|| Error::Rates(format!("no BTC/USD rate for {date}")))
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.rates.iter().map(|(d, r)| (*d, *r))
    }
}

/// Parse a `date,btc_usd` CSV.
pub fn parse_rates(bytes: &[u8]) -> Result<RateTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::Rates(format!("unreadable header: {e}")))?;
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "btc_usd" {
        return Err(Error::Rates(format!(
            "expected header `date,btc_usd`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut table = RateTable::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Rates(format!("line {line}: {e}")))?;
        if record.len() != 2 {
            return Err(Error::Rates(format!("line {line}: expected 2 fields")));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| Error::Rates(format!("line {line}: bad date `{}`: {e}", &record[0])))?;
        let rate: f64 = record[1]
            .parse()
            .map_err(|_| Error::Rates(format!("line {line}: bad rate `{}`", &record[1])))?;
        table.insert(date, rate)?;
    }
    Ok(table)
}
