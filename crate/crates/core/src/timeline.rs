//! Time travel over the deterministic engine.
//!
//! Moving backward restores the latest snapshot at or before the target
//! and replays forward. Snapshots are taken every `stride` ticks the first
//! time the engine passes them and are never invalidated: a run is a pure
//! function of its configuration and scenario.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::config::Config;
use crate::error::{Result, SimError};
use crate::metrics::{self, RunStats};
use crate::scenario::Scenario;
use crate::state::MachineState;
use crate::SimTime;

pub const DEFAULT_STRIDE: SimTime = 250;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: SimTime,
    /// Copy of the state with an empty trace.
    pub state: MachineState,
    /// Length of the trace at `time`.
    pub trace_len: usize,
    pub digest: String,
}

#[derive(Debug, Clone)]
pub struct Timeline {
    config: Config,
    scenario: Arc<Scenario>,
    stride: SimTime,
    snapshots: BTreeMap<SimTime, Snapshot>,
    current: MachineState,
}

impl Timeline {
    pub fn new(config: Config, scenario: Scenario) -> Result<Self> {
        Self::with_stride(config, scenario, DEFAULT_STRIDE)
    }

    pub fn with_stride(config: Config, scenario: Scenario, stride: SimTime) -> Result<Self> {
        if stride == 0 {
            return Err(SimError::Config("snapshot stride must be positive".into()));
        }
        let scenario = Arc::new(scenario);
        let current = MachineState::init(config.clone(), Arc::clone(&scenario))?;
        let mut timeline = Self {
            config,
            scenario,
            stride,
            snapshots: BTreeMap::new(),
            current,
        };
        timeline.take_snapshot();
        Ok(timeline)
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn stride(&self) -> SimTime {
        self.stride
    }

    pub fn current(&self) -> &MachineState {
        &self.current
    }

    pub fn now(&self) -> SimTime {
        self.current.now
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &Snapshot> {
        self.snapshots.values()
    }

    fn take_snapshot(&mut self) {
        let now = self.current.now;
        if self.snapshots.contains_key(&now) {
            return;
        }
        let (state, trace_len) = self.current.detached();
        let digest = state.digest();
        self.snapshots.insert(
            now,
            Snapshot {
                time: now,
                state,
                trace_len,
                digest,
            },
        );
    }

    fn tick(&mut self) -> Result<()> {
        self.current.tick()?;
        if self.current.now.is_multiple_of(self.stride) {
            self.take_snapshot();
        }
        Ok(())
    }

    /// Moves to exactly time `t`, forward or backward.
    pub fn goto(&mut self, t: SimTime) -> Result<&MachineState> {
        if t > self.config.max_time {
            return Err(SimError::OutOfRange {
                requested: i64::from(t),
                max_time: self.config.max_time,
            });
        }
        if t < self.current.now {
            let (_, snap) = self
                .snapshots
                .range(..=t)
                .next_back()
                .expect("snapshot at time 0 always exists");
            let mut trace = std::mem::take(&mut self.current.trace);
            trace.truncate(snap.trace_len);
            let mut restored = snap.state.clone();
            restored.trace = trace;
            self.current = restored;
        }
        while self.current.now < t {
            self.tick()?;
        }
        Ok(&self.current)
    }

    /// Moves by `dt` ticks, clamping to `0..=max_time`. Returns whether the
    /// move was clamped.
    pub fn step(&mut self, dt: i64) -> Result<bool> {
        let target = i64::from(self.current.now) + dt;
        let clamped = target.clamp(0, i64::from(self.config.max_time));
        self.goto(clamped as SimTime)?;
        Ok(clamped != target)
    }

    pub fn next_event_time(&self) -> Option<SimTime> {
        self.current.next_event_time()
    }

    /// Latest time before `now` at which the trace recorded an event.
    pub fn prev_event_time(&self) -> Option<SimTime> {
        let now = self.current.now;
        self.current
            .trace
            .iter()
            .rev()
            .find(|r| r.time < now && r.is_event())
            .map(|r| r.time)
    }

    /// Moves to the next event; stays put when there is none.
    pub fn next_event(&mut self) -> Result<Option<SimTime>> {
        let next = self.next_event_time();
        if let Some(t) = next {
            self.goto(t)?;
        }
        Ok(next)
    }

    pub fn prev_event(&mut self) -> Result<Option<SimTime>> {
        let prev = self.prev_event_time();
        if let Some(t) = prev {
            self.goto(t)?;
        }
        Ok(prev)
    }

    /// Runs until every event is consumed and every admitted process has
    /// finished, or until `max_time`.
    pub fn complete_run(&mut self) -> Result<RunStats> {
        while !self.current.is_drained() && self.current.now < self.config.max_time {
            self.tick()?;
        }
        self.stats()
    }

    /// Statistics for the replay up to `now`; live processes are censored.
    pub fn stats(&self) -> Result<RunStats> {
        metrics::compute(
            &self.current.trace,
            &self.current.pcb_table,
            self.current.now,
        )
    }

    /// Back to time 0. Snapshots stay valid.
    pub fn reset(&mut self) -> &MachineState {
        let snap = &self.snapshots[&0];
        let mut trace = std::mem::take(&mut self.current.trace);
        trace.truncate(snap.trace_len);
        let mut restored = snap.state.clone();
        restored.trace = trace;
        self.current = restored;
        &self.current
    }
}
