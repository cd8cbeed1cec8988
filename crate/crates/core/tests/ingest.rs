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

//! Fetching against a scripted local HTTP server, and rate table parsing.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use chrono::NaiveDate;
use lntopo::ingest::{parse_rates, parse_snapshot, FetchClient};
use lntopo::Error;

const BODY: &str = r#"{"timestamp":"2018-02-12T00:00:00Z",
 "nodes":[{"pub_key":"02aa"},{"pub_key":"02bb"}],
 "channels":[{"channel_id":"1x1x1","node1_pub":"02aa","node2_pub":"02bb","capacity_sat":500000},
             {"channel_id":"1x1x2","node1_pub":"02bb","node2_pub":"02cc","capacity_sat":1000}]}"#;

struct MockServer {
    url: String,
    requests: Arc<Mutex<Vec<Vec<String>>>>,
}

/// Serve `script` in order, one `(status, body)` per connection.
fn serve(script: Vec<(u16, &'static str)>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/graph", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&requests);
    thread::spawn(move || {
        for (status, body) in script {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = Vec::new();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                    break;
                }
                head.push(line.trim_end().to_string());
            }
            log.lock().unwrap().push(head);
            let reply = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    MockServer { url, requests }
}

fn client() -> FetchClient {
    FetchClient {
        attempts: 3,
        initial_backoff: Duration::from_millis(5),
        timeout: Duration::from_secs(10),
    }
}

#[test]
fn fetched_snapshot_matches_local_parse() {
    let server = serve(vec![(200, BODY)]);
    let fetched = client().fetch(&server.url, Some("s3cret")).unwrap();
    let local = parse_snapshot(BODY.as_bytes()).unwrap();
    assert_eq!(fetched.snapshot, local.snapshot);
    assert_eq!(fetched.auto_added_nodes, 1);
    let reqs = server.requests.lock().unwrap();
    assert_eq!(reqs.len(), 1);
    assert!(reqs[0][0].starts_with("GET /graph "));
    assert!(reqs[0].iter().any(|h| h.eq_ignore_ascii_case("authorization: Bearer s3cret")));
}

#[test]
fn server_errors_are_retried_then_reported() {
    let server = serve(vec![(500, ""), (503, ""), (200, BODY)]);
    let ok = client().fetch(&server.url, None).unwrap();
    assert_eq!(ok.snapshot.channels.len(), 2);
    assert_eq!(server.requests.lock().unwrap().len(), 3);

    let server = serve(vec![(500, ""), (500, ""), (500, "")]);
    match client().fetch(&server.url, None) {
        Err(Error::Transport { attempts, message }) => {
            assert_eq!(attempts, 3);
            assert!(message.contains("500"), "{message}");
        }
        other => panic!("expected transport error, got {other:?}"),
    }
    assert_eq!(server.requests.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_and_bad_bodies_are_not_retried() {
    let server = serve(vec![(404, "")]);
    assert!(matches!(client().fetch(&server.url, None), Err(Error::HttpStatus(404))));
    assert_eq!(server.requests.lock().unwrap().len(), 1);

    let server = serve(vec![(200, "{\"timestamp\": oops")]);
    assert!(matches!(client().fetch(&server.url, None), Err(Error::Parse(_))));
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = FetchClient { attempts: 2, ..client() };
    match c.fetch(&format!("http://127.0.0.1:{port}/graph"), None) {
        Err(Error::Transport { attempts, .. }) => assert_eq!(attempts, 2),
        other => panic!("expected transport error, got {other:?}"),
    }
    let none = FetchClient { attempts: 0, ..client() };
    assert!(matches!(none.fetch("http://127.0.0.1:1/", None), Err(Error::InvalidParameter(_))));
}

#[test]
fn rate_tables() {
    let day = |s| NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap();
    let t = parse_rates(b"date,btc_usd\n2018-03-12 , 9134.5\n2018-02-12,8664\n").unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t.rate_on(day("2018-03-12")).unwrap(), 9134.5);
    let dates: Vec<_> = t.iter().map(|(d, _)| d).collect();
    assert_eq!(dates, [day("2018-02-12"), day("2018-03-12")]);
    assert!(matches!(t.rate_on(day("2018-04-12")), Err(Error::Rates(_))));

    assert!(parse_rates(b"date,btc_usd\n").unwrap().is_empty());
    for bad in [
        &b"day,price\n2018-02-12,1\n"[..],
        b"date,btc_usd\n12/02/2018,1\n",
        b"date,btc_usd\n2018-02-12,abc\n",
        b"date,btc_usd\n2018-02-12,NaN\n",
        b"date,btc_usd\n2018-02-12,inf\n",
        b"date,btc_usd\n2018-02-12,1,2\n",
    ] {
        assert!(matches!(parse_rates(bad), Err(Error::Rates(_))), "{}", String::from_utf8_lossy(bad));
    }
}
