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

use std::collections::HashSet;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub pub_key: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub channel_id: String,
    pub node1_pub: String,
    pub node2_pub: String,
    pub capacity_sat: u64,
}

/// A dated set of nodes and channels, as published by a network explorer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    #[serde(with = "rfc3339")]
    pub timestamp: DateTime<Utc>,
    pub nodes: Vec<NodeRecord>,
    pub channels: Vec<ChannelRecord>,
}

/// A parsed snapshot plus what the permissive rules had to repair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSnapshot {
    pub snapshot: Snapshot,
    /// Channel endpoints that were not declared in `nodes`.
    pub auto_added_nodes: usize,
}

impl Snapshot {
    /// Compact JSON in the canonical field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialization cannot fail")
    }

    /// Indented JSON, ending with a newline.
    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serialization cannot fail");
        s.push('\n');
        s
    }
}

mod rfc3339 {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&raw)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
struct RawSnapshot {
    timestamp: String,
    nodes: Vec<Value>,
    channels: Vec<Value>,
}

fn field_str<'a>(obj: &'a Value, key: &str, what: &dyn Fn() -> String) -> Result<&'a str> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(Error::Parse(format!("{}: field `{key}` must be a string", what()))),
        None => Err(Error::Parse(format!("{}: missing field `{key}`", what()))),
    }
}

/// Parse a snapshot document. Unknown fields are ignored; channel endpoints
/// missing from `nodes` are appended to the node list.
pub fn parse_snapshot(bytes: &[u8]) -> Result<ParsedSnapshot> {
    let raw: RawSnapshot =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("malformed document: {e}")))?;
    let timestamp = DateTime::parse_from_rfc3339(&raw.timestamp)
        .map_err(|e| Error::Parse(format!("timestamp `{}`: {e}", raw.timestamp)))?
        .with_timezone(&Utc);

    let mut nodes = Vec::with_capacity(raw.nodes.len());
    let mut known = HashSet::with_capacity(raw.nodes.len());
    for (i, node) in raw.nodes.iter().enumerate() {
        let key = field_str(node, "pub_key", &|| format!("node #{i}"))?;
        if !known.insert(key.to_owned()) {
            return Err(Error::Parse(format!("node #{i}: duplicate pub_key `{key}`")));
        }
        nodes.push(NodeRecord {
            pub_key: key.to_owned(),
        });
    }

    let mut channels = Vec::with_capacity(raw.channels.len());
    let mut channel_ids = HashSet::with_capacity(raw.channels.len());
    let mut auto_added_nodes = 0;
    for (i, ch) in raw.channels.iter().enumerate() {
        let label = || match ch.get("channel_id").and_then(Value::as_str) {
            Some(id) => format!("channel `{id}` (#{i})"),
            None => format!("channel #{i}"),
        };
        let channel_id = field_str(ch, "channel_id", &label)?;
        let node1 = field_str(ch, "node1_pub", &label)?;
        let node2 = field_str(ch, "node2_pub", &label)?;
        let capacity_sat = match ch.get("capacity_sat") {
            None => return Err(Error::Parse(format!("{}: missing field `capacity_sat`", label()))),
            Some(v) => match (v.as_u64(), v.as_i64(), v.as_f64()) {
                (Some(c), _, _) if c > 0 => c,
                (Some(_), _, _) | (None, Some(_), _) => {
                    return Err(Error::Parse(format!("{}: capacity_sat must be positive", label())))
                }
                (None, None, Some(f)) if f <= 0.0 => {
                    return Err(Error::Parse(format!("{}: capacity_sat must be positive", label())))
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "{}: capacity_sat must be a positive integer",
                        label()
                    )))
                }
            },
        };
        if !channel_ids.insert(channel_id.to_owned()) {
            return Err(Error::Parse(format!("{}: duplicate channel_id", label())));
        }
        for key in [node1, node2] {
            if known.insert(key.to_owned()) {
                auto_added_nodes += 1;
                nodes.push(NodeRecord {
                    pub_key: key.to_owned(),
                });
            }
        }
        channels.push(ChannelRecord {
            channel_id: channel_id.to_owned(),
            node1_pub: node1.to_owned(),
            node2_pub: node2.to_owned(),
            capacity_sat,
        });
    }

    Ok(ParsedSnapshot {
        snapshot: Snapshot {
            timestamp,
            nodes,
            channels,
        },
        auto_added_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"timestamp":"2018-02-12T00:00:00Z",
        "nodes":[{"pub_key":"a"},{"pub_key":"b","alias":"ignored"}],
        "channels":[{"channel_id":"c1","node1_pub":"a","node2_pub":"b","capacity_sat":100000}]}"#;

    #[test]
    fn minimal_document() {
        let p = parse_snapshot(MINIMAL.as_bytes()).unwrap();
        assert_eq!(p.auto_added_nodes, 0);
        assert_eq!(p.snapshot.nodes.len(), 2);
        assert_eq!(p.snapshot.channels.len(), 1);
        assert_eq!(p.snapshot.channels[0].capacity_sat, 100_000);
        assert!(p.snapshot.to_json().contains("2018-02-12T00:00:00Z"));
    }

    #[test]
    fn zero_capacity_names_channel() {
        let doc = MINIMAL.replace("100000", "0");
        let err = parse_snapshot(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("c1"), "{err}");
        let doc = MINIMAL.replace("100000", "-5");
        let err = parse_snapshot(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("c1") && err.contains("positive"), "{err}");
        let doc = MINIMAL.replace("100000", "1.5");
        assert!(parse_snapshot(doc.as_bytes()).is_err());
    }

    #[test]
    fn undeclared_endpoint_is_added() {
        let doc = MINIMAL.replace(r#""node2_pub":"b""#, r#""node2_pub":"z""#);
        let p = parse_snapshot(doc.as_bytes()).unwrap();
        assert_eq!(p.auto_added_nodes, 1);
        assert_eq!(p.snapshot.nodes.last().unwrap().pub_key, "z");
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_snapshot(b"{not json"), Err(Error::Parse(_))));
        let doc = MINIMAL.replace(r#""node1_pub":"a","#, "");
        let err = parse_snapshot(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("node1_pub") && err.contains("c1"), "{err}");
        let two = MINIMAL.replace(
            r#"}]}"#,
            r#"},{"channel_id":"c1","node1_pub":"a","node2_pub":"b","capacity_sat":5}]}"#,
        );
        let err = parse_snapshot(two.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("duplicate channel_id"), "{err}");
        let bad_ts = MINIMAL.replace("2018-02-12T00:00:00Z", "yesterday");
        assert!(parse_snapshot(bad_ts.as_bytes()).is_err());
    }
}
