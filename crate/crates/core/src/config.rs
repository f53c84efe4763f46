use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::SimTime;

/// Number of counting semaphores in the machine, identified 1..=5.
pub const SEMAPHORE_COUNT: usize = 5;

pub const DEFAULT_QUANTUM_LEVEL1: u32 = 100;
pub const DEFAULT_QUANTUM_LEVEL2: u32 = 300;
pub const DEFAULT_TOTAL_MEMORY: u32 = 512;
pub const DEFAULT_MAX_TIME: SimTime = 30_000;

/// Tunable machine parameters. Together with a [`Scenario`](crate::Scenario)
/// these fully determine every state of a run.
///
/// A quantum of 0 turns that ready-queue level into first-come,
/// first-served: a dispatched process keeps the CPU until it terminates
/// or blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub quantum_level1: u32,
    pub quantum_level2: u32,
    pub total_memory: u32,
    pub semaphore_initial_values: [u32; SEMAPHORE_COUNT],
    pub max_time: SimTime,
    pub alerts_enabled: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            quantum_level1: DEFAULT_QUANTUM_LEVEL1,
            quantum_level2: DEFAULT_QUANTUM_LEVEL2,
            total_memory: DEFAULT_TOTAL_MEMORY,
            semaphore_initial_values: [0; SEMAPHORE_COUNT],
            max_time: DEFAULT_MAX_TIME,
            alerts_enabled: true,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.total_memory == 0 {
            return Err(SimError::Config("total_memory must be at least 1".into()));
        }
        if self.max_time == 0 {
            return Err(SimError::Config("max_time must be positive".into()));
        }
        Ok(())
    }

    /// Copy of `self` with the fields named in `patch` (a JSON object)
    /// replaced. Unknown keys and ill-typed values are errors; the result
    /// is validated.
    pub fn with_overrides(&self, patch: &serde_json::Value) -> Result<Config, SimError> {
        let serde_json::Value::Object(patch) = patch else {
            return Err(SimError::Config("config must be a JSON object".into()));
        };
        let mut merged = match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("config serializes to an object"),
        };
        for (k, v) in patch {
            if !merged.contains_key(k) {
                return Err(SimError::Config(format!("unknown config field '{k}'")));
            }
            merged.insert(k.clone(), v.clone());
        }
        let config: Config = serde_json::from_value(serde_json::Value::Object(merged))
            .map_err(|e| SimError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Quantum granted on dispatch from `level`; `None` means unbounded (FCFS).
    pub fn quantum_for(&self, level: crate::Level) -> Option<u32> {
        let q = match level {
            crate::Level::One => self.quantum_level1,
            crate::Level::Two => self.quantum_level2,
        };
        (q > 0).then_some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Level;

    #[test]
    fn defaults() {
        let c = Config::default();
        assert_eq!(c.quantum_for(Level::One), Some(100));
        assert_eq!(c.quantum_for(Level::Two), Some(300));
        assert_eq!(c.total_memory, 512);
        assert_eq!(c.max_time, 30_000);
        assert_eq!(c.semaphore_initial_values, [0; 5]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn zero_quantum_is_fcfs() {
        let c = Config {
            quantum_level1: 0,
            ..Config::default()
        };
        assert_eq!(c.quantum_for(Level::One), None);
    }

    #[test]
    fn rejects_zero_memory() {
        let c = Config {
            total_memory: 0,
            ..Config::default()
        };
        assert!(matches!(c.validate(), Err(SimError::Config(_))));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: Config = serde_json::from_str(r#"{"quantum_level1": 0}"#).unwrap();
        assert_eq!(c.quantum_level1, 0);
        assert_eq!(c.total_memory, 512);
    }

    #[test]
    fn overrides() {
        let base = Config {
            quantum_level2: 7,
            ..Config::default()
        };
        let c = base
            .with_overrides(&serde_json::json!({"quantum_level1": 0}))
            .unwrap();
        assert_eq!((c.quantum_level1, c.quantum_level2), (0, 7));
        for bad in [
            serde_json::json!({"quantum": 1}),
            serde_json::json!({"total_memory": 0}),
            serde_json::json!({"max_time": -1}),
            serde_json::json!({"semaphore_initial_values": [1, 2]}),
            serde_json::json!([1]),
        ] {
            assert!(
                matches!(base.with_overrides(&bad), Err(SimError::Config(_))),
                "{bad}"
            );
        }
    }
}
