use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use mlfq_sim_core::Timeline;

pub struct Session {
    pub timeline: RwLock<Timeline>,
    pub created_at: Instant,
    last_access: Mutex<Instant>,
}

impl Session {
    fn new(timeline: Timeline) -> Self {
        let now = Instant::now();
        Self {
            timeline: RwLock::new(timeline),
            created_at: now,
            last_access: Mutex::new(now),
        }
    }

    fn touch(&self) {
        *self.last_access.lock().unwrap() = Instant::now();
    }

    fn idle_for(&self, now: Instant) -> Duration {
        now.saturating_duration_since(*self.last_access.lock().unwrap())
    }
}

/// Live sessions keyed by opaque id. Each session has its own lock, so
/// requests to different sessions never wait on each other.
pub struct Sessions {
    map: RwLock<HashMap<String, Arc<Session>>>,
    idle_timeout: Duration,
}

impl Sessions {
    pub fn new(idle_timeout: Duration) -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn insert(&self, timeline: Timeline) -> (String, Arc<Session>) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Arc::new(Session::new(timeline));
        self.map
            .write()
            .unwrap()
            .insert(id.clone(), session.clone());
        (id, session)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        let s = self.map.read().unwrap().get(id).cloned()?;
        s.touch();
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle longer than the timeout; returns how many.
    pub fn evict_idle(&self) -> usize {
        let now = Instant::now();
        let mut map = self.map.write().unwrap();
        let before = map.len();
        map.retain(|_, s| s.idle_for(now) < self.idle_timeout);
        before - map.len()
    }
}
