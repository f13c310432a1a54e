use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use justdist::data::{dataset_to_csv, fixture_t1};
use justdist::interface::service::router;

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, Body::from))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&bytes)));
    (status, value)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(body.to_string())).await
}

fn t1_csv() -> String {
    dataset_to_csv(&fixture_t1())
}

fn eo_weights() -> Value {
    json!({"w11": 2.0, "w10": -1.0, "w01": 0.0, "w00": 1.0})
}

#[tokio::test]
async fn upload_then_fetch() {
    let app = router();
    let (status, first) = post(&app, "/datasets", json!({"csv": t1_csv()})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(first["created"], true);
    let id = first["id"].as_str().unwrap().to_owned();
    assert_eq!(id.len(), 64);

    let (status, again) = post(&app, "/datasets", json!({"csv": t1_csv()})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["id"], id.as_str());

    let (status, view) = call(&app, "GET", &format!("/datasets/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["csv"], t1_csv());
    assert!(view.get("seed").is_none());

    let (status, summary) = call(&app, "GET", &format!("/datasets/{id}/summary"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary, view["summary"]);
    assert_eq!(summary["records"], 8);
}

#[tokio::test]
async fn synthetic_upload_keeps_seed() {
    let app = router();
    let spec = json!({"groups": [{"label": "x", "size": 20, "base_rate": 0.5, "acceptance": {"policy": "rate", "rate": 0.5}}]});
    let (status, up) = post(&app, "/datasets", json!({"synthetic": spec, "seed": 4})).await;
    assert_eq!(status, StatusCode::CREATED, "{up}");
    let (_, view) = call(&app, "GET", &format!("/datasets/{}", up["id"].as_str().unwrap()), None).await;
    assert_eq!(view["seed"], 4);
}

#[tokio::test]
async fn upload_requires_exactly_one_source() {
    let app = router();
    let (status, body) = post(&app, "/datasets", json!({})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "invalid_request");
    let (status, _) = post(&app, "/datasets", json!({"csv": t1_csv(), "records": []})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn audit_by_id_and_inline() {
    let app = router();
    let (_, up) = post(&app, "/datasets", json!({"csv": t1_csv()})).await;
    let req = |dataset: Value| json!({"dataset": dataset, "weights": eo_weights(), "patterns": [{"kind": "egalitarian"}]});

    let (status, by_id) = post(&app, "/audit", req(json!({"id": up["id"]}))).await;
    assert_eq!(status, StatusCode::OK, "{by_id}");
    let entries = by_id["profile"]["entries"].as_array().unwrap();
    let utilities: Vec<f64> = entries.iter().map(|e| e["expected_utility"].as_f64().unwrap()).collect();
    assert_eq!(utilities, vec![0.5, 1.5]);
    assert_eq!(by_id["patterns"][0]["outcome"]["ok"]["value"], 1.0);

    let (_, inline) = post(&app, "/audit", req(json!({"csv": t1_csv()}))).await;
    assert_eq!(inline, by_id);
}

#[tokio::test]
async fn classify_weights_endpoint() {
    let app = router();
    let body = json!({"weights": {"w11": 1.0, "w10": 1.0, "w01": 0.0, "w00": 0.0}, "claims": {"kind": "none"}});
    let (status, finding) = post(&app, "/classify-weights", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(finding["matched"], "StatisticalParity");
    assert_eq!(finding["multiplier"], 1.0);
}

#[tokio::test]
async fn unknown_dataset_is_404() {
    let app = router();
    let (status, body) = call(&app, "GET", "/datasets/unknown", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown_dataset");
    let (status, _) = post(&app, "/audit", json!({"dataset": {"id": "nope"}, "weights": eo_weights()})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn malformed_and_invalid_requests_are_400() {
    let app = router();
    let (status, body) = call(&app, "POST", "/audit", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "invalid_request");

    let bad_csv = "a,y,d\n0,1,1\n1,0,7\n";
    let (status, body) = post(&app, "/audit", json!({"dataset": {"csv": bad_csv}, "weights": eo_weights()})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"]["message"].as_str().unwrap().contains("row 2"), "{body}");

    let weights = json!({"w11": 1.0, "w10": f64::MAX, "w01": 0.0, "w00": "x"});
    let (status, _) = post(&app, "/classify-weights", json!({"weights": weights})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn empty_relevant_group_is_422() {
    let app = router();
    let csv = "a,y,d\n0,1,1\n0,0,0\n1,0,1\n1,0,0\n";
    let body = json!({"dataset": {"csv": csv}, "weights": eo_weights(), "claims": {"kind": "outcome", "values": [1]}});
    let (status, body) = post(&app, "/audit", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    assert!(body["error"]["code"].is_string());
}

#[tokio::test]
async fn optimize_returns_rule_and_frontier() {
    let app = router();
    let mut csv = String::from("a,y,d\n");
    for (g, positives) in [(0, 2), (1, 8)] {
        for i in 0..10 {
            csv.push_str(&format!("{g},{},1\n", (i < positives) as u8));
        }
    }
    let body = json!({
        "dataset": {"csv": csv},
        "weights": {"w11": 1.0, "w10": -1.0, "w01": 0.0, "w00": 0.0},
        "objective": {"kind": "maximin"},
        "rulespace": {"kind": "group_rates", "points": 11},
    });
    let (status, report) = post(&app, "/optimize", body).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["result"]["best_rule"]["params"]["1"], 1.0);
    assert_eq!(report["result"]["evaluated"], 121);
    assert!(!report["result"]["frontier"].as_array().unwrap().is_empty());
}
