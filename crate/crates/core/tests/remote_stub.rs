use std::net::TcpListener;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use relooper_core::harness::{run_prepared, BackendSpec, PreparedTask, SuiteConfig};
use relooper_core::llm::{RemoteBackend, RemoteConfig, RetryPolicy};
use relooper_core::{Backend, CallContext, DecodingParams, LlmError};

mod common;

struct Stub {
    url: String,
    bodies: Arc<Mutex<Vec<String>>>,
    headers: Arc<Mutex<Vec<Vec<(String, String)>>>>,
    hits: Arc<AtomicUsize>,
    server: Arc<tiny_http::Server>,
    handle: Option<JoinHandle<()>>,
}

impl Stub {
    /// Answers request `i` (0-based) with `respond(i)` = (status, body).
    fn start(respond: impl Fn(usize) -> (u16, String) + Send + 'static) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let port = server.server_addr().to_ip().unwrap().port();
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let headers = Arc::new(Mutex::new(Vec::new()));
        let hits = Arc::new(AtomicUsize::new(0));
        let (s, b, h, n) = (Arc::clone(&server), Arc::clone(&bodies), Arc::clone(&headers), Arc::clone(&hits));
        let handle = std::thread::spawn(move || {
            for mut request in s.incoming_requests() {
                let mut body = String::new();
                request.as_reader().read_to_string(&mut body).unwrap();
                b.lock().unwrap().push(body);
                h.lock().unwrap().push(
                    request
                        .headers()
                        .iter()
                        .map(|x| (x.field.to_string().to_ascii_lowercase(), x.value.to_string()))
                        .collect(),
                );
                let i = n.fetch_add(1, Ordering::SeqCst);
                let (status, text) = respond(i);
                let _ = request.respond(tiny_http::Response::from_string(text).with_status_code(status));
            }
        });
        Self {
            url: format!("http://127.0.0.1:{port}/v1/completions"),
            bodies,
            headers,
            hits,
            server,
            handle: Some(handle),
        }
    }
}

impl Drop for Stub {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn completion(text: &str) -> String {
    serde_json::json!({"choices": [{"text": text}]}).to_string()
}

fn fast_retry(max_attempts: u32) -> RetryPolicy {
    RetryPolicy { max_attempts, base_delay: Duration::from_millis(5), max_delay: Duration::from_millis(20) }
}

fn config(url: &str) -> RemoteConfig {
    RemoteConfig {
        url: url.to_string(),
        model: "gemma-2-9b-it".into(),
        request_timeout_ms: 2_000,
        retry: fast_retry(3),
        ..RemoteConfig::default()
    }
}

fn dead_url() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    drop(listener);
    format!("http://127.0.0.1:{port}/v1/completions")
}

#[test]
fn greedy_request_body_matches_golden() {
    let stub = Stub::start(|_| (200, completion("go to fridge 1\n")));
    let backend = RemoteBackend::new(config(&stub.url)).unwrap();
    let out = backend
        .complete("Your task is to: cool a tomato.\n> ", &DecodingParams::acting(), &CallContext::act("12", 1, 0))
        .unwrap();
    assert_eq!(out, "go to fridge 1\n");
    let golden = std::fs::read_to_string(common::fixture_path("remote_request.json")).unwrap();
    assert_eq!(stub.bodies.lock().unwrap()[0], golden.trim_end());
    let sent: serde_json::Value = serde_json::from_str(&golden).unwrap();
    assert_eq!(sent["temperature"], 0.0);
}

#[test]
fn bearer_token_is_sent() {
    let stub = Stub::start(|_| (200, completion("ok")));
    let mut c = config(&stub.url);
    c.token = Some("s3cret".into());
    RemoteBackend::new(c).unwrap().complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, 0)).unwrap();
    let headers = stub.headers.lock().unwrap();
    assert!(headers[0].iter().any(|(k, v)| k == "authorization" && v == "Bearer s3cret"));
}

#[test]
fn retriable_statuses_are_retried() {
    let stub = Stub::start(|i| if i < 2 { (503, "busy".into()) } else { (200, completion("look")) });
    let backend = RemoteBackend::new(config(&stub.url)).unwrap();
    let out = backend.complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, 0)).unwrap();
    assert_eq!(out, "look");
    assert_eq!(stub.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let stub = Stub::start(|_| (400, "bad".into()));
    let backend = RemoteBackend::new(config(&stub.url)).unwrap();
    let err = backend.complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, 0)).unwrap_err();
    assert_eq!(err, LlmError::Status { status: 400, body: "bad".into() });
    assert_eq!(stub.hits.load(Ordering::SeqCst), 1);
}

#[test]
fn malformed_body_is_distinct() {
    let stub = Stub::start(|_| (200, "{\"choices\": []}".into()));
    let backend = RemoteBackend::new(config(&stub.url)).unwrap();
    let err = backend.complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, 0)).unwrap_err();
    assert!(matches!(err, LlmError::MalformedResponse(_)), "{err:?}");
}

#[test]
fn transport_failure_exhausts_bounded_retries() {
    let backend = RemoteBackend::new(config(&dead_url())).unwrap();
    let err = backend.complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, 0)).unwrap_err();
    match err {
        LlmError::RetriesExhausted { attempts, last } => {
            assert_eq!(attempts, 3);
            assert!(matches!(*last, LlmError::Transport(_)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn in_flight_requests_are_bounded() {
    let active = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
    let port = server.server_addr().to_ip().unwrap().port();
    let stop = Arc::new(AtomicBool::new(false));
    let workers: Vec<_> = (0..4)
        .map(|_| {
            let (s, a, p, stop) = (Arc::clone(&server), Arc::clone(&active), Arc::clone(&peak), Arc::clone(&stop));
            std::thread::spawn(move || {
                while !stop.load(Ordering::SeqCst) {
                    let Ok(Some(r)) = s.recv_timeout(Duration::from_millis(20)) else { continue };
                    let now = a.fetch_add(1, Ordering::SeqCst) + 1;
                    p.fetch_max(now, Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(40));
                    a.fetch_sub(1, Ordering::SeqCst);
                    let _ = r.respond(tiny_http::Response::from_string(completion("x")));
                }
            })
        })
        .collect();
    let mut c = config(&format!("http://127.0.0.1:{port}/v1/completions"));
    c.max_in_flight = 2;
    let backend = Arc::new(RemoteBackend::new(c).unwrap());
    std::thread::scope(|s| {
        for i in 0..6 {
            let b = Arc::clone(&backend);
            s.spawn(move || b.complete("p", &DecodingParams::acting(), &CallContext::act("t", 1, i)).unwrap());
        }
    });
    stop.store(true, Ordering::SeqCst);
    for w in workers {
        w.join().unwrap();
    }
    assert!(peak.load(Ordering::SeqCst) <= 2, "peak {}", peak.load(Ordering::SeqCst));
}

#[test]
fn suite_records_backend_failure_and_continues() {
    let text = format!(
        r#"{{"scenarios": ["{a}", "{b}"], "backend": {{"kind": "oracle"}},
             "wall_clock_budget": "1m", "output_dir": "unused"}}"#,
        a = common::scenario_path("task01_pick").display(),
        b = common::scenario_path("task02_examine").display(),
    );
    let mut suite = SuiteConfig::from_json(&text, std::path::Path::new(".")).unwrap();
    suite.limits.max_trials = 2;
    let dead: Arc<dyn Backend> = Arc::new(RemoteBackend::new(config(&dead_url())).unwrap());
    let tasks = relooper_core::harness::prepare(&suite)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(i, t)| if i == 0 { PreparedTask { backend: Arc::clone(&dead), ..t } } else { t })
        .collect();
    let report = run_prepared(&suite, tasks, &relooper_core::agent::NullSink);
    assert_eq!(report.attempted, 2);
    assert!(report.per_task[0].error.as_deref().unwrap().contains("gave up after 3 attempts"));
    assert!(report.per_task[1].success);
    assert_eq!((report.success_rate, report.succeeded), (50, 1));
    assert!(matches!(suite.backend, BackendSpec::Oracle { .. }));
}
