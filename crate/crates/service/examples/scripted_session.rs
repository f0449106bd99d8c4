//! Drives a teaching session through the HTTP API in-process, answering
//! every question from the synthetic labels, and prints the resulting tree.
//!
//! For a live server use `vsem serve` and the same requests over the network.

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use vsem::{generate_synthetic, HierarchyView, SyntheticConfig};
use vsem_service::{router, AppState};

async fn post(app: &Router, uri: &str, body: Value) -> Value {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    serde_json::from_slice(&bytes).unwrap()
}

async fn get(app: &Router, uri: &str) -> Value {
    let resp = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

#[tokio::main]
async fn main() {
    let data = generate_synthetic(&SyntheticConfig {
        num_genera: 2,
        sequences_with_differentia: 2,
        sequences_without_differentia: 1,
        ..Default::default()
    })
    .unwrap();
    let labels = data.labels();
    let app = router(AppState::new(Some(data.clone())));
    let session = post(&app, "/sessions", json!({})).await;
    let id = session["session_id"].as_str().unwrap().to_string();

    // The person at the keyboard: knows which sequence shows what.
    let mut founding: Vec<String> = Vec::new();

    for seq in &data.sequences {
        let mut step = post(
            &app,
            &format!("/sessions/{id}/encounters"),
            json!({"sequence_ref": seq.sequence_id}),
        )
        .await;
        while step["state"] == "query_pending" {
            let q = &step["query"];
            let object = q["object_id"].as_u64().unwrap() as usize;
            let stored = &labels[&founding[object]];
            let here = &labels[&seq.sequence_id];
            let answer = match q["kind"].as_str().unwrap() {
                "same_genus" => stored.genus_label == here.genus_label,
                _ => stored.instance_id != here.instance_id,
            };
            println!(
                "{:<9} {:<10} about object #{object}: {answer}",
                seq.sequence_id,
                q["kind"].as_str().unwrap()
            );
            step = post(&app, &format!("/sessions/{id}/answer"), json!({"answer": answer})).await;
        }
        let d = &step["decision"];
        if d["kind"] != "merged_into_existing" {
            founding.push(seq.sequence_id.clone());
        }
        println!(
            "{:<9} -> {} (object #{})",
            seq.sequence_id,
            d["kind"].as_str().unwrap(),
            d["object_id"]
        );
    }

    let view: HierarchyView = serde_json::from_value(get(&app, &format!("/sessions/{id}/hierarchy")).await).unwrap();
    print!("\n{}", view.render_tree());
}
