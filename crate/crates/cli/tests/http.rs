use std::io::{Read, Write};
use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use orbiclust_cli::server::{bind, router, serve};
use orbiclust_cli::session::State;
use orbiclust_cli::workspace::WorkspaceFile;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(name: &str) -> Router {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    router(State::from_workspace(&WorkspaceFile::load(&path).unwrap()).unwrap())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn fresh_state_is_the_initial_seed() {
    let app = app("pentagon");
    let (status, v) = call(&app, "GET", "/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["protocol"], 1);
    assert_eq!(v["kind"], "surface");
    assert_eq!(strings(&v["pretty"]), vec!["x1", "x2"]);
    assert_eq!(v["flippable"], json!([1, 2]));
    assert_eq!(v["previews"][0]["pretty"], "x2 + 1");
    assert!(v["previews"][0]["case"].is_string());
    assert!(v["previews"][0]["description"].is_string());
    assert_eq!(v["history"], 0);
    assert!(v["triangulation"]["arcs"].is_array());
}

#[tokio::test]
async fn mutate_pentagon_arc_one() {
    let app = app("pentagon");
    let (status, v) = call(&app, "POST", "/mutate", Some(json!({"arc": 1}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["protocol"], 1);
    assert!(strings(&v["state"]["pretty"]).contains(&"(x2 + 1)/x1".to_string()), "{v}");
    assert_eq!(v["step"]["kind"], "mutate");
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(s, v["state"]);
}

#[tokio::test]
async fn undo_past_start_is_a_conflict() {
    let app = app("pentagon");
    let (status, v) = call(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["protocol"], 1);
    assert!(v["error"].as_str().unwrap().contains("nothing to undo"));
}

#[tokio::test]
async fn undo_restores_identical_payloads() {
    let app = app("triangle_orbifold_point");
    let (_, initial) = call(&app, "GET", "/state", None).await;
    assert_eq!(initial["kind"], "orbifold");
    call(&app, "POST", "/mutate", Some(json!({"arc": 2}))).await;
    let (_, mid) = call(&app, "GET", "/state", None).await;
    call(&app, "POST", "/mutate", Some(json!({"arc": 1}))).await;
    let (status, v) = call(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["state"], mid);
    call(&app, "POST", "/undo", None).await;
    let (_, back) = call(&app, "GET", "/state", None).await;
    assert_eq!(back, initial);
}

#[tokio::test]
async fn punctured_bigon_tour_matches_census() {
    let app = app("punctured_bigon_m3");
    let mut seen = std::collections::BTreeSet::new();
    let (_, initial) = call(&app, "GET", "/state", None).await;
    for arc in [1, 2, 1, 2, 1, 2] {
        let (status, v) = call(&app, "POST", "/mutate", Some(json!({"arc": arc}))).await;
        assert_eq!(status, StatusCode::OK);
        seen.extend(strings(&v["state"]["cluster"]));
    }
    let (_, h) = call(&app, "GET", "/history", None).await;
    assert_eq!(h["steps"].as_array().unwrap().len(), 6);
    let (_, end) = call(&app, "GET", "/state", None).await;
    assert_eq!(end["cluster"], initial["cluster"]);
    assert_eq!(end["triangulation"], initial["triangulation"]);
    let cli = std::process::Command::new(env!("CARGO_BIN_EXE_orbiclust"))
        .args(["--json", "enumerate"])
        .arg(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/punctured_bigon_m3.json"))
        .output()
        .unwrap();
    let census: Value = serde_json::from_slice(&cli.stdout).unwrap();
    let census: std::collections::BTreeSet<String> = strings(&census["census"]).into_iter().collect();
    assert_eq!(seen, census);
}

#[tokio::test]
async fn orbit_mutation_on_covering_workspace() {
    let app = app("hexagon_z3");
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(s["orbits"][0]["arcs"], json!([1, 2, 3]));
    assert_eq!(s["orbits"][0]["case"], "fixed_triangle");
    let (status, v) = call(&app, "POST", "/orbit-mutate", Some(json!({"orbit": 1}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["step"]["flips"].as_array().unwrap().len(), 4);
    let (status, _) = call(&app, "POST", "/orbit-mutate", Some(json!({"orbit": 9}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let oct = self::app("octahedron_a4");
    let (status, v) = call(&oct, "POST", "/orbit-mutate", Some(json!({"orbit": 1}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["protocol"], 1);
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let app = app("pentagon");
    let (status, v) = call(&app, "POST", "/mutate", Some(json!({"arc": 7}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("out of range"));
    let (status, _) = call(&app, "POST", "/mutate", Some(json!({"edge": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = call(&app, "POST", "/mutate", Some(json!({"arc": 1, "protocol": 2}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("protocol"));
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(s["history"], 0);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app("pentagon");
    let (_, created) = call(&app, "POST", "/sessions", None).await;
    let id = created["session"].as_str().unwrap().to_string();
    call(&app, "POST", &format!("/mutate?session={id}"), Some(json!({"arc": 2}))).await;
    let (_, other) = call(&app, "GET", "/state", None).await;
    assert_eq!(other["history"], 0);
    let (_, mine) = call(&app, "GET", &format!("/state?session={id}"), None).await;
    assert_eq!(mine["history"], 1);
    assert_eq!(mine["session"], id.as_str());
}

#[tokio::test]
async fn concurrent_mutations_are_serialized() {
    let app = app("pentagon");
    let calls = (0..16).map(|_| {
        let app = app.clone();
        tokio::spawn(async move { call(&app, "POST", "/mutate", Some(json!({"arc": 1}))).await })
    });
    for c in calls {
        assert_eq!(c.await.unwrap().0, StatusCode::OK);
    }
    let (_, h) = call(&app, "GET", "/history", None).await;
    assert_eq!(h["steps"].as_array().unwrap().len(), 16);
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(strings(&s["pretty"]), vec!["x1", "x2"]);
}

#[tokio::test]
async fn serves_over_tcp_and_reports_port_in_use() {
    let listener = bind(0).await.unwrap();
    let port = listener.local_addr().unwrap().port();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pentagon.json");
    let state = State::from_workspace(&WorkspaceFile::load(&path).unwrap()).unwrap();
    let server = tokio::spawn(serve(listener, state));
    assert!(bind(port).await.is_err());

    let body = tokio::task::spawn_blocking(move || {
        let mut s = std::net::TcpStream::connect(("127.0.0.1", port)).unwrap();
        write!(s, "GET /state HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
        let mut out = String::new();
        s.read_to_string(&mut out).unwrap();
        out
    })
    .await
    .unwrap();
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    let json_start = body.find("\r\n\r\n").unwrap() + 4;
    let v: Value = serde_json::from_str(&body[json_start..]).unwrap();
    assert_eq!(v["protocol"], 1);
    server.abort();
}
