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

use std::thread;
use std::time::Duration;

use log::warn;

use super::snapshot::{parse_snapshot, ParsedSnapshot};
use crate::error::{Error, Result};

const MAX_BODY_BYTES: u64 = 1 << 30;

/// Blocking HTTP client for snapshot endpoints.
///
/// Transport failures and 5xx responses are retried with exponential
/// backoff; 4xx responses and unparseable bodies fail immediately.
#[derive(Clone, Debug)]
pub struct FetchClient {
    pub attempts: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl Default for FetchClient {
    fn default() -> Self {
        FetchClient {
            attempts: 3,
            initial_backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(60),
        }
    }
}

impl FetchClient {
    pub fn fetch(&self, url: &str, auth_token: Option<&str>) -> Result<ParsedSnapshot> {
        let body = self.fetch_bytes(url, auth_token)?;
        parse_snapshot(&body)
    }

    fn fetch_bytes(&self, url: &str, auth_token: Option<&str>) -> Result<Vec<u8>> {
        if self.attempts == 0 {
            return Err(Error::InvalidParameter("attempts must be at least 1".into()));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut backoff = self.initial_backoff;
        let mut last = String::new();
        for attempt in 1..=self.attempts {
            let mut req = agent.get(url).header("Accept", "application/json");
            if let Some(token) = auth_token {
                req = req.header("Authorization", &format!("Bearer {token}"));
            }
            match req.call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if (200..300).contains(&status) {
                        return resp
                            .body_mut()
                            .with_config()
                            .limit(MAX_BODY_BYTES)
                            .read_to_vec()
                            .map_err(|e| Error::Transport {
                                attempts: attempt,
                                message: e.to_string(),
                            });
                    }
                    if status < 500 {
                        return Err(Error::HttpStatus(status));
                    }
                    last = format!("HTTP {status}");
                }
                Err(e) => last = e.to_string(),
            }
            if attempt < self.attempts {
                warn!("fetch {url}: attempt {attempt} failed ({last}), retrying");
                thread::sleep(backoff);
                backoff *= 2;
            }
        }
        Err(Error::Transport {
            attempts: self.attempts,
            message: last,
        })
    }
}

/// Fetch a snapshot with the default retry policy.
pub fn fetch_snapshot(url: &str, auth_token: Option<&str>) -> Result<ParsedSnapshot> {
    FetchClient::default().fetch(url, auth_token)
}
