//! Scene library and live dialogue sessions.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use tabletop_core::controller::{DialogueSession, SessionConfig};
use tabletop_core::scene::{load_scene, Scene, SceneError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Scene { path: PathBuf, source: SceneError },
    #[error("{path}: scene id {id} is already defined by {first}")]
    DuplicateId {
        path: PathBuf,
        id: String,
        first: PathBuf,
    },
}

/// Read-only map of scene id to scene, loaded from `*.json` files.
#[derive(Debug, Clone, Default)]
pub struct SceneLibrary {
    scenes: BTreeMap<String, Arc<Scene>>,
}

impl SceneLibrary {
    /// Loads every `*.json` file in `dir`. Any invalid file aborts loading and
    /// is named in the error.
    pub fn load_dir(dir: &Path) -> Result<Self, LibraryError> {
        let io = |source| LibraryError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
        paths.sort();

        let mut library = SceneLibrary::default();
        let mut origin: BTreeMap<String, PathBuf> = BTreeMap::new();
        for path in paths {
            let bytes = std::fs::read(&path).map_err(|source| LibraryError::Io {
                path: path.clone(),
                source,
            })?;
            let scene = load_scene(&bytes).map_err(|source| LibraryError::Scene {
                path: path.clone(),
                source,
            })?;
            if let Some(first) = origin.get(&scene.id) {
                return Err(LibraryError::DuplicateId {
                    path,
                    id: scene.id,
                    first: first.clone(),
                });
            }
            origin.insert(scene.id.clone(), path);
            library.insert(scene);
        }
        Ok(library)
    }

    pub fn insert(&mut self, scene: Scene) {
        self.scenes.insert(scene.id.clone(), Arc::new(scene));
    }

    pub fn get(&self, id: &str) -> Option<Arc<Scene>> {
        self.scenes.get(id).cloned()
    }

    pub fn ids(&self) -> Vec<String> {
        self.scenes.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }
}

/// A session together with the scene it is bound to.
pub struct SessionEntry {
    pub scene: Arc<Scene>,
    pub session: DialogueSession,
}

pub type SessionHandle = Arc<Mutex<SessionEntry>>;

/// Sessions live for the lifetime of the process. Each sits behind its own
/// mutex, so operations on one session are serialized while distinct
/// sessions proceed in parallel.
pub struct SessionStore {
    scenes: SceneLibrary,
    config: SessionConfig,
    sessions: RwLock<HashMap<String, SessionHandle>>,
}

impl SessionStore {
    pub fn new(scenes: SceneLibrary, config: SessionConfig) -> Self {
        SessionStore {
            scenes,
            config,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn scenes(&self) -> &SceneLibrary {
        &self.scenes
    }

    /// Opens a session on `scene_id`; `None` if the scene is unknown.
    pub fn create(&self, scene_id: &str) -> Option<String> {
        let scene = self.scenes.get(scene_id)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = DialogueSession::new(id.clone(), scene_id, self.config.clone());
        let entry = Arc::new(Mutex::new(SessionEntry { scene, session }));
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id.clone(), entry);
        Some(id)
    }

    pub fn get(&self, session_id: &str) -> Option<SessionHandle> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(session_id)
            .cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
