#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use reqwest::StatusCode;
use serde_json::Value;

use blendvis_core::data::{load_csv, CsvOptions, Dataset};
use blendvis_core::script::{execute, Command, Script};
use blendvis_core::{Session, SessionConfig};
use blendvis_service::api::{BASE_REVISION, REVISION};
use blendvis_service::{router, AppState};

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data_dir() -> PathBuf {
    workspace().join("data")
}

pub fn dataset(name: &str) -> Arc<Dataset> {
    let text = std::fs::read_to_string(data_dir().join(name)).unwrap();
    Arc::new(load_csv(text.as_bytes(), &CsvOptions::named(name.trim_end_matches(".csv"))).unwrap())
}

pub fn script(file: &str) -> Script {
    Script::parse(&std::fs::read_to_string(workspace().join("scripts").join(file)).unwrap()).unwrap()
}

/// Replay scripts under `scripts/`, sorted by name.
pub fn acceptance_scripts() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(workspace().join("scripts"))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".json") && !n.ends_with(".golden.json"))
        .collect();
    names.sort();
    names
}

/// Starts the service on an ephemeral port; returns its base URL.
pub async fn spawn_server() -> String {
    let state = Arc::new(AppState::new(data_dir(), SessionConfig::default()));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });
    format!("http://{addr}")
}

/// Runs every step in-process without stopping; each entry is `Ok` or the error code.
pub fn run_local(session: &mut Session, script: &Script) -> Vec<Result<(), String>> {
    script.steps.iter().map(|s| execute(session, &s.command).map(|_| ()).map_err(|e| e.code().to_string())).collect()
}

/// Drives one session over HTTP, sending the last seen revision as the base
/// revision of every write.
pub struct Client {
    pub http: reqwest::Client,
    pub base: String,
    pub session: String,
    pub revision: u64,
}

pub struct Reply {
    pub status: StatusCode,
    pub revision: Option<u64>,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap()
    }

    pub fn code(&self) -> Result<(), String> {
        if self.status.is_success() {
            Ok(())
        } else {
            Err(self.json()["error"].as_str().unwrap_or("?").to_string())
        }
    }
}

impl Client {
    pub async fn create(base: &str, body: Value) -> (Client, Reply) {
        let http = reqwest::Client::new();
        let mut client = Client { http, base: base.to_string(), session: String::new(), revision: 0 };
        let reply = client.send(reqwest::Method::POST, "/sessions", Some(body)).await;
        if reply.status.is_success() {
            client.session = reply.json()["session_id"].as_str().unwrap().to_string();
        }
        (client, reply)
    }

    pub async fn send(&mut self, method: reqwest::Method, path: &str, body: Option<Value>) -> Reply {
        let mut req = self.http.request(method.clone(), format!("{}{path}", self.base));
        if method == reqwest::Method::POST && !self.session.is_empty() {
            req = req.header(BASE_REVISION, self.revision);
        }
        if let Some(body) = body {
            req = req.header("content-type", "application/json").body(body.to_string());
        }
        let res = req.send().await.unwrap();
        let status = res.status();
        let revision = res.headers().get(REVISION).and_then(|v| v.to_str().ok()?.parse().ok());
        if let Some(r) = revision {
            self.revision = r;
        }
        Reply { status, revision, body: res.text().await.unwrap() }
    }

    pub async fn get(&mut self, what: &str) -> Reply {
        let path = format!("/sessions/{}/{what}", self.session);
        self.send(reqwest::Method::GET, &path, None).await
    }

    pub async fn post(&mut self, path: &str, body: Option<Value>) -> Reply {
        self.send(reqwest::Method::POST, path, body).await
    }

    async fn rec_id(&mut self, rank: usize) -> Result<String, String> {
        let reply = self.get("recommendations").await;
        match reply.json()["set_id"].as_str() {
            Some(set) => Ok(format!("{set}.{rank}")),
            None => Err("UnknownRecommendation".to_string()),
        }
    }

    /// The HTTP equivalent of one script command.
    pub async fn execute(&mut self, command: &Command) -> Result<(), String> {
        let s = self.session.clone();
        let reply = match command {
            Command::Demonstrate { demonstration } => {
                let body = serde_json::to_value(demonstration).unwrap();
                self.post(&format!("/sessions/{s}/demonstrations"), Some(body)).await
            }
            Command::Accept { rank } | Command::Preview { rank } | Command::Reject { rank: Some(rank) } => {
                let id = self.rec_id(*rank).await?;
                let action = command.name();
                self.post(&format!("/recommendations/{id}/{action}"), None).await
            }
            Command::Reject { rank: None } => self.post(&format!("/sessions/{s}/recommendations/reject"), None).await,
            Command::Undo => self.post(&format!("/sessions/{s}/undo"), None).await,
            Command::Redo => self.post(&format!("/sessions/{s}/redo"), None).await,
            op => {
                let mut body = serde_json::to_value(op).unwrap();
                body.as_object_mut().unwrap().remove("op");
                self.post(&format!("/sessions/{s}/ops/{}", op.name()), Some(body)).await
            }
        };
        reply.code()
    }

    pub async fn run(&mut self, script: &Script) -> Vec<Result<(), String>> {
        let mut out = Vec::new();
        for step in &script.steps {
            out.push(self.execute(&step.command).await);
        }
        out
    }
}
