#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::json;
use tabletop_core::controller::SessionConfig;
use tabletop_service::scenarios::Scenario;
use tabletop_service::{serve, SceneLibrary, SessionStore, TurnResponse};
use tokio::net::TcpListener;
use tokio::sync::oneshot;

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn library() -> SceneLibrary {
    SceneLibrary::load_dir(&scenarios_dir().join("scenes")).unwrap()
}

pub struct Server {
    pub base: String,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub async fn start() -> Server {
        let store = Arc::new(SessionStore::new(library(), SessionConfig::default()));
        let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (stop, stopped) = oneshot::channel::<()>();
        let task = tokio::spawn(serve(listener, store, async {
            let _ = stopped.await;
        }));
        Server {
            base,
            stop: Some(stop),
            task,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub async fn shutdown(mut self) {
        let _ = self.stop.take().unwrap().send(());
        self.task.await.unwrap().unwrap();
    }
}

/// Plays a scenario over HTTP the way the scenario runner does: the
/// utterance, then answers while the robot asks. Returns the last response
/// and the transcript body.
pub async fn play(client: &reqwest::Client, base: &str, s: &Scenario) -> (TurnResponse, String) {
    let created: serde_json::Value = client
        .post(format!("{base}/sessions"))
        .json(&json!({ "scene_id": s.scene }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let id = created["session_id"].as_str().unwrap().to_string();

    let mut last: TurnResponse = client
        .post(format!("{base}/sessions/{id}/utterance"))
        .json(&json!({ "text": s.utterance }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    for answer in &s.answers {
        if last.status != "question" {
            break;
        }
        last = client
            .post(format!("{base}/sessions/{id}/answer"))
            .json(&json!({ "text": answer }))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
    }
    let transcript = client
        .get(format!("{base}/sessions/{id}/transcript"))
        .send()
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    (last, transcript)
}
