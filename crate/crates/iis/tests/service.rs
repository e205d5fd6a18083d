mod common;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use iis::config::{ConfigBuilder, ServiceConfig};
use iis::service::{router, router_with_state, AppState};
use iis_core::{
    build_super_image, detect, encode_iisv, read_ppm, FlowParams, SamplerKind, SamplerSpec,
};
use tower::ServiceExt;

fn config() -> ServiceConfig {
    ConfigBuilder {
        threshold: Some(0.1),
        workers: Some(2),
        queue: Some(2),
        ..Default::default()
    }
    .build()
    .unwrap()
}

async fn call(
    app: &Router,
    method: &str,
    uri: &str,
    body: Vec<u8>,
) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, headers, bytes.to_vec())
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[tokio::test]
async fn health_and_routing() {
    let app = router(config());
    let (s, h, b) = call(&app, "GET", "/v1/health", vec![]).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(json(&b)["status"], "ok");
    assert_eq!(h["x-iis-version"], env!("CARGO_PKG_VERSION"));
    let (s, h, _) = call(&app, "GET", "/v1/nope", vec![]).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert!(h.contains_key("x-iis-version"));
    let (s, h, _) = call(&app, "POST", "/v1/health", vec![]).await;
    assert_eq!(s, StatusCode::METHOD_NOT_ALLOWED);
    assert!(h.contains_key("x-iis-version"));
}

#[tokio::test]
async fn clips_matches_library() {
    let app = router(config());
    let still = common::static_clip(32, 32, 4);
    let (s, _, b) = call(&app, "POST", "/v1/clips?k=4", encode_iisv(&still)).await;
    assert_eq!(s, StatusCode::OK);
    let v = json(&b);
    assert_eq!(v["label"], "nonviolent");
    assert_eq!(
        (v["sampler"].as_str(), v["k"].as_u64()),
        (Some("uniform"), Some(4))
    );

    let moving = common::moving_clip(32, 32, 5, 1.0, 0.5);
    let (s, _, b) = call(
        &app,
        "POST",
        "/v1/clips?sampler=lk&k=3",
        encode_iisv(&moving),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let v = json(&b);
    let lib = detect(&moving, 0.1, &FlowParams::default()).unwrap();
    assert_eq!(
        v["energy"].as_f64().unwrap().to_bits(),
        lib.energy.to_bits()
    );
    assert_eq!(v["label"], lib.label.as_str());
    assert_eq!(v["frames"].as_u64(), Some(5));
    let text = String::from_utf8(b).unwrap();
    let at: Vec<usize> = [
        "label",
        "energy",
        "threshold",
        "frames",
        "sampler",
        "k",
        "processing_ms",
    ]
    .iter()
    .map(|k| text.find(&format!("\"{k}\":")).unwrap())
    .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[tokio::test]
async fn error_statuses() {
    let app = router(
        ConfigBuilder {
            max_body_bytes: Some(4096),
            ..Default::default()
        }
        .build()
        .unwrap(),
    );
    let (s, _, b) = call(
        &app,
        "POST",
        "/v1/clips",
        b"IISX0000000000000000000000".to_vec(),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(json(&b)["error"], "BadMagic");

    let five = encode_iisv(&common::gray_clip(&[1, 2, 3, 4, 5]));
    let (s, _, b) = call(&app, "POST", "/v1/clips?k=10", five.clone()).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&b)["error"], "KTooLarge");
    let (s, _, b) = call(
        &app,
        "POST",
        "/v1/superimage?sampler=random&k=2",
        five.clone(),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&b)["error"], "MissingSeed");

    let (s, _, _) = call(&app, "POST", "/v1/clips", vec![0; 5000]).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn superimage_matches_library() {
    let app = router(config());
    let clip = common::moving_clip(8, 8, 4, 1.0, 0.0);
    let (s, h, b) = call(
        &app,
        "POST",
        "/v1/superimage?sampler=uniform&k=4",
        encode_iisv(&clip),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(h["content-type"], "image/x-portable-pixmap");
    assert_eq!(h["x-grid-rows"], "2");
    assert_eq!(h["x-grid-cols"], "2");
    assert_eq!(h["x-indices"], "0,1,2,3");
    let lib = build_super_image(
        &clip,
        &SamplerSpec::new(SamplerKind::Uniform, 4),
        None,
        &FlowParams::default(),
    )
    .unwrap();
    assert_eq!(read_ppm(&b).unwrap(), lib.image);
    assert_eq!(b, iis_core::write_ppm(&lib.image));

    let (s, _, _) = call(&app, "POST", "/v1/superimage", b"garbage".to_vec()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn full_queue_sheds_load() {
    let state = AppState::new(config());
    let app = router_with_state(state.clone());
    let body = encode_iisv(&common::static_clip(16, 16, 2));
    let admission = state.admission();
    let held = admission.clone().acquire_many_owned(4).await.unwrap();
    let (s, _, b) = call(&app, "POST", "/v1/clips", body.clone()).await;
    assert_eq!(s, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(json(&b)["error"], "QueueFull");
    drop(held);
    let (s, _, _) = call(&app, "POST", "/v1/clips?k=2", body).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_within_capacity_all_succeed() {
    let app = router(config());
    let body = encode_iisv(&common::moving_clip(24, 24, 3, 1.0, 0.0));
    let tasks: Vec<_> = (0..4)
        .map(|_| {
            let app = app.clone();
            let body = body.clone();
            tokio::spawn(async move { call(&app, "POST", "/v1/clips?k=2", body).await.0 })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
}

#[tokio::test]
async fn serves_over_tcp() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let server = tokio::spawn(iis::service::serve_on(listener, AppState::new(config())));
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    stream
        .write_all(b"GET /v1/health HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut text = String::new();
    stream.read_to_string(&mut text).await.unwrap();
    assert!(text.starts_with("HTTP/1.1 200"));
    assert!(text.contains("\"status\":\"ok\""));
    server.abort();
}
