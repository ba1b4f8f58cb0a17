#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;
use vizreq_service::{router, ServiceConfig, SessionStore};

pub const BOUNDARY: &str = "vizreq-test-boundary";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub etag: Option<String>,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }

    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

pub struct Client {
    pub app: Router,
}

impl Client {
    pub fn new(store: SessionStore) -> Self {
        Client {
            app: router(Arc::new(store)),
        }
    }

    pub fn in_memory() -> Self {
        Self::new(SessionStore::in_memory(ServiceConfig::default()))
    }

    pub async fn send(&self, req: Request<Body>) -> Reply {
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let etag = resp
            .headers()
            .get(header::ETAG)
            .map(|v| v.to_str().unwrap().to_string());
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        Reply {
            status,
            etag,
            text: String::from_utf8(bytes.to_vec()).unwrap(),
        }
    }

    pub async fn get(&self, path: &str) -> Reply {
        self.send(Request::get(path).body(Body::empty()).unwrap()).await
    }

    pub async fn post(&self, path: &str, version: Option<u64>, body: String) -> Reply {
        let mut req = Request::post(path).header(header::CONTENT_TYPE, "application/json");
        if let Some(v) = version {
            req = req.header(header::IF_MATCH, v.to_string());
        }
        self.send(req.body(Body::from(body)).unwrap()).await
    }

    pub async fn upload(&self, path: &str, version: u64, parts: &[(&str, String)]) -> Reply {
        let req = Request::post(path)
            .header(
                header::CONTENT_TYPE,
                format!("multipart/form-data; boundary={BOUNDARY}"),
            )
            .header(header::IF_MATCH, version.to_string())
            .body(Body::from(multipart(parts)))
            .unwrap();
        self.send(req).await
    }

    pub async fn create(&self) -> (String, u64) {
        let r = self.post("/sessions", None, String::new()).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
        let v = r.json();
        (v["id"].as_str().unwrap().to_string(), v["version"].as_u64().unwrap())
    }
}

pub fn multipart(parts: &[(&str, String)]) -> String {
    let mut body = String::new();
    for (name, content) in parts {
        body.push_str(&format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{name}\"; filename=\"{name}.csv\"\r\nContent-Type: text/csv\r\n\r\n{content}\r\n"
        ));
    }
    body.push_str(&format!("--{BOUNDARY}--\r\n"));
    body
}

/// CSV parts for every collection of the tax data plus the typing answers.
pub fn tax_upload() -> Vec<(&'static str, String)> {
    let mut parts: Vec<(&str, String)> = ["Bills", "Date", "Dossier", "Location"]
        .into_iter()
        .map(|c| (c, read(&format!("tax-data/{c}.csv"))))
        .collect();
    parts.push(("answers", read("tax-answers.json")));
    parts
}

pub fn model_request(source: &str) -> String {
    serde_json::json!({ "kind": "model", "source": source }).to_string()
}

pub fn revise_request(patch_json: &str) -> String {
    let patch: Value = serde_json::from_str(patch_json).unwrap();
    serde_json::json!({ "patches": [patch] }).to_string()
}
