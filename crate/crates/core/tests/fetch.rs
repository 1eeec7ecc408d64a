//! `fetch_remote` against a local HTTP test double.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use satake::ingest::{fetch_remote, load_records, AngleConvention, FetchOptions, FieldMapping};
use satake::Error;

/// Serves `body(path)` to every request until the test ends; counts requests.
fn serve(body: impl Fn(&str) -> String + Send + 'static) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() {
                continue;
            }
            // drain headers
            let mut line = String::new();
            while reader.read_line(&mut line).map(|n| n > 2).unwrap_or(false) {
                line.clear();
            }
            counter.fetch_add(1, Ordering::SeqCst);
            let path = request_line
                .split_whitespace()
                .nth(1)
                .unwrap_or("/")
                .to_owned();
            let payload = body(&path);
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                payload.len(),
                payload
            );
        }
    });
    (format!("http://{addr}/api/satake"), hits)
}

fn mapping() -> FieldMapping {
    serde_json::from_str(
        r#"{"prime_field": "p", "satake_field": "angles", "angle_convention": "unit"}"#,
    )
    .unwrap()
}

fn options(dir: &std::path::Path, limit: usize) -> FetchOptions {
    let mut opts = FetchOptions::new(mapping(), dir, limit);
    opts.page_size = 10;
    opts.backoff = Duration::from_millis(5);
    opts
}

#[test]
fn two_records_are_fetched_sorted_and_cached() {
    let (url, _) = serve(|path| {
        if path.contains("_offset=0") {
            r#"{"data": [
                {"label": "2.0.4.1-x", "p": 5, "angles": [0.1, -0.1]},
                {"label": "2.0.4.1-x", "p": 3, "angles": [0.25, 0.75]}
            ]}"#
            .into()
        } else {
            r#"{"data": []}"#.into()
        }
    });
    let dir = tempfile::tempdir().unwrap();
    let recs = fetch_remote(&url, "label=2.0.4.1-x", &options(dir.path(), 100)).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].prime_norm, 3);
    assert_eq!(recs[1].prime_norm, 5);
    assert!(recs
        .iter()
        .all(|r| r.satake.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15)));
    let cached = load_records(dir.path().join("2.0.4.1-x.jsonl")).unwrap();
    assert_eq!(cached, recs);
}

#[test]
fn empty_result_is_not_an_error() {
    let (url, _) = serve(|_| "[]".into());
    let dir = tempfile::tempdir().unwrap();
    let recs = fetch_remote(&url, "", &options(dir.path(), 50)).unwrap();
    assert!(recs.is_empty());
}

#[test]
fn truncated_body_fails_after_retries() {
    let (url, hits) = serve(|_| r#"{"data": [{"p": 2, "angles": [0.1"#.into());
    let dir = tempfile::tempdir().unwrap();
    let opts = FetchOptions {
        concurrency: 1,
        ..options(dir.path(), 5)
    };
    match fetch_remote(&url, "", &opts) {
        Err(Error::Transport(msg)) => assert!(msg.contains("3 attempts"), "{msg}"),
        other => panic!("expected a transport error, got {other:?}"),
    }
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn pages_are_requested_until_a_short_page() {
    // 25 records served 10 per page, raw [re, im] values
    let (url, hits) = serve(|path| {
        let offset: usize = path
            .split("_offset=")
            .nth(1)
            .and_then(|s| s.split('&').next())
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        let items: Vec<String> = (offset..(offset + 10).min(25))
            .map(|i| format!(r#"{{"p": {}, "s": [[2.0, 0.0], [0.5, 0.0]]}}"#, 100 - i))
            .collect();
        format!("[{}]", items.join(","))
    });
    let dir = tempfile::tempdir().unwrap();
    let mut opts = options(dir.path(), 1000);
    opts.mapping = FieldMapping {
        satake_field: "s".into(),
        angle_convention: AngleConvention::Raw,
        ..mapping()
    };
    let recs = fetch_remote(&url, "q=1", &opts).unwrap();
    assert_eq!(recs.len(), 25);
    assert!(recs.windows(2).all(|w| w[0].prime_norm < w[1].prime_norm));
    assert_eq!(recs[0].object_label, "q=1");
    // one batch of four concurrent pages covers it
    assert_eq!(hits.load(Ordering::SeqCst), 4);
}
