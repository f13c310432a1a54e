//! Drive the HTTP service in-process: upload a synthetic dataset, audit it,
//! classify weights, and ask for an unknown id.

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use justdist::interface::service::router;
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: &str) -> (u16, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .expect("request");
    let resp = app.clone().oneshot(req).await.expect("infallible");
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.expect("body").to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

#[tokio::main]
async fn main() {
    let app = router();
    let (status, body) = call(
        &app,
        "POST",
        "/datasets",
        r#"{"synthetic": {"groups": [
              {"label": "0", "size": 500, "base_rate": 0.3, "acceptance": {"policy": "rate", "rate": 0.4}},
              {"label": "1", "size": 500, "base_rate": 0.6, "acceptance": {"policy": "rate", "rate": 0.4}}]},
            "seed": 5}"#,
    )
    .await;
    println!("POST /datasets -> {status}");
    let id = serde_json::from_str::<serde_json::Value>(&body).expect("json")["id"]
        .as_str()
        .expect("id")
        .to_owned();

    let audit = format!(
        r#"{{"dataset": {{"id": "{id}"}}, "weights": {{"w11": 1, "w10": 1, "w01": 0, "w00": 0}}, "patterns": [{{"kind": "egalitarian"}}]}}"#
    );
    let (status, body) = call(&app, "POST", "/audit", &audit).await;
    let report: serde_json::Value = serde_json::from_str(&body).expect("json");
    println!(
        "POST /audit -> {status}, egalitarian gap {}, matched {}",
        report["patterns"][0]["outcome"]["ok"]["value"], report["equivalence"]["finding"]["matched"]
    );

    let (status, body) = call(
        &app,
        "POST",
        "/classify-weights",
        r#"{"weights": {"w11": 5, "w10": 0, "w01": 2, "w00": 0}, "claims": {"kind": "outcome", "values": [1]}}"#,
    )
    .await;
    let finding: serde_json::Value = serde_json::from_str(&body).expect("json");
    println!("POST /classify-weights -> {status}, {} x{}", finding["matched"], finding["multiplier"]);

    let (status, body) = call(&app, "GET", "/datasets/unknown", "").await;
    print!("GET /datasets/unknown -> {status} {body}");
}
