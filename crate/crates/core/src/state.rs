//! Machine state and the single-tick transition function.
//!
//! Processing order inside tick `t`:
//!
//! 1. the process that held the CPU at the end of `t - 1` runs one tick;
//! 2. internal events due at `t`: termination, then quantum expiration,
//!    then I/O completions in ascending `(completion_time, pid)`;
//! 3. external events scheduled at `t`, in scenario order;
//! 4. job admission;
//! 5. dispatch if the CPU is idle.
//!
//! A process dispatched during tick `t` first runs during tick `t + 1`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Config, SEMAPHORE_COUNT};
use crate::error::{Result, SimError};
use crate::process::{Location, Pid, ProcessControlBlock, SemId};
use crate::scenario::{EventKind, ExternalEvent, Scenario};
use crate::trace::{TraceEvent, TraceRecord};
use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IoEntry {
    pub pid: Pid,
    pub completion_time: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InternalEventKind {
    Termination,
    QuantumExpiration,
    IoCompletion,
}

/// An engine-generated event. Never stored: always derived from the CPU
/// occupant and the I/O wait queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InternalEvent {
    pub kind: InternalEventKind,
    pub pid: Pid,
    pub due_time: SimTime,
}

#[derive(Debug, Clone, Serialize)]
pub struct MachineState {
    pub config: Config,
    #[serde(skip)]
    scenario: Arc<Scenario>,
    pub now: SimTime,
    pub job_queue: VecDeque<Pid>,
    pub ready_l1: VecDeque<Pid>,
    pub ready_l2: VecDeque<Pid>,
    pub io_queue: Vec<IoEntry>,
    pub sem_queues: [VecDeque<Pid>; SEMAPHORE_COUNT],
    pub sem_values: [u32; SEMAPHORE_COUNT],
    pub cpu: Option<Pid>,
    pub free_memory: u32,
    pub rejected: Vec<Pid>,
    pub finished: Vec<Pid>,
    pub pcb_table: BTreeMap<Pid, ProcessControlBlock>,
    /// Index of the next unconsumed external event.
    pub event_cursor: usize,
    pub trace: Vec<TraceRecord>,
}

/// Everything hashed by [`MachineState::digest`]: all semantic fields, not
/// the trace.
#[derive(Serialize)]
struct DigestView<'a> {
    config: &'a Config,
    now: SimTime,
    job_queue: &'a VecDeque<Pid>,
    ready_l1: &'a VecDeque<Pid>,
    ready_l2: &'a VecDeque<Pid>,
    io_queue: &'a [IoEntry],
    sem_queues: &'a [VecDeque<Pid>; SEMAPHORE_COUNT],
    sem_values: &'a [u32; SEMAPHORE_COUNT],
    cpu: Option<Pid>,
    free_memory: u32,
    rejected: &'a [Pid],
    finished: &'a [Pid],
    pcb_table: &'a BTreeMap<Pid, ProcessControlBlock>,
    event_cursor: usize,
}

impl MachineState {
    /// Builds the state at time 0. External events scheduled at time 0 are
    /// applied here, followed by admission and dispatch, so the returned
    /// state is the settled state at time 0.
    pub fn init(config: Config, scenario: impl Into<Arc<Scenario>>) -> Result<Self> {
        config.validate()?;
        let scenario = scenario.into();
        scenario.validate(&config).map_err(SimError::Scenario)?;
        let mut state = Self {
            free_memory: config.total_memory,
            sem_values: config.semaphore_initial_values,
            config,
            scenario,
            now: 0,
            job_queue: VecDeque::new(),
            ready_l1: VecDeque::new(),
            ready_l2: VecDeque::new(),
            io_queue: Vec::new(),
            sem_queues: Default::default(),
            cpu: None,
            rejected: Vec::new(),
            finished: Vec::new(),
            pcb_table: BTreeMap::new(),
            event_cursor: 0,
            trace: Vec::new(),
        };
        state.apply_external_events()?;
        state.admit_jobs();
        state.dispatch();
        Ok(state)
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn pcb(&self, pid: Pid) -> Option<&ProcessControlBlock> {
        self.pcb_table.get(&pid)
    }

    pub(crate) fn pcb_mut(&mut self, pid: Pid) -> &mut ProcessControlBlock {
        self.pcb_table
            .get_mut(&pid)
            .expect("pid in a queue must have a control block")
    }

    pub(crate) fn record(&mut self, pid: Option<Pid>, event: TraceEvent) {
        self.trace.push(TraceRecord::new(self.now, pid, event));
    }

    pub(crate) fn warn(&mut self, reason: impl Into<String>) {
        self.record(
            None,
            TraceEvent::Warning {
                reason: reason.into(),
            },
        );
    }

    /// Advances the clock by exactly one tick.
    pub fn tick(&mut self) -> Result<()> {
        if self.now >= self.config.max_time {
            return Err(SimError::OutOfRange {
                requested: i64::from(self.now) + 1,
                max_time: self.config.max_time,
            });
        }
        self.now += 1;
        self.accrue_waits();
        self.run_cpu();
        self.fire_internal_events();
        self.apply_external_events()?;
        self.admit_jobs();
        self.dispatch();
        Ok(())
    }

    /// Applies `dt` ticks. Fails without changing anything if that would
    /// pass `max_time`.
    pub fn advance(&mut self, dt: u32) -> Result<()> {
        if dt == 0 {
            return Err(SimError::NonPositiveDuration);
        }
        let target = i64::from(self.now) + i64::from(dt);
        if target > i64::from(self.config.max_time) {
            return Err(SimError::OutOfRange {
                requested: target,
                max_time: self.config.max_time,
            });
        }
        for _ in 0..dt {
            self.tick()?;
        }
        Ok(())
    }

    /// Like [`advance`](Self::advance) but stops at `max_time`. Returns
    /// whether the request was clamped.
    pub fn advance_clamped(&mut self, dt: u32) -> Result<bool> {
        if dt == 0 {
            return Err(SimError::NonPositiveDuration);
        }
        let room = self.config.max_time - self.now;
        let steps = dt.min(room);
        for _ in 0..steps {
            self.tick()?;
        }
        Ok(steps < dt)
    }

    fn accrue_waits(&mut self) {
        let Self {
            job_queue,
            ready_l1,
            ready_l2,
            io_queue,
            sem_queues,
            pcb_table,
            ..
        } = self;
        let mut bump = |pid: &Pid, f: fn(&mut ProcessControlBlock)| {
            if let Some(pcb) = pcb_table.get_mut(pid) {
                f(pcb);
            }
        };
        for pid in job_queue.iter() {
            bump(pid, |p| p.waits.job_queue += 1);
        }
        for pid in ready_l1.iter().chain(ready_l2.iter()) {
            bump(pid, |p| p.waits.ready += 1);
        }
        for entry in io_queue.iter() {
            bump(&entry.pid, |p| p.waits.io += 1);
        }
        for pid in sem_queues.iter().flatten() {
            bump(pid, |p| p.waits.sem += 1);
        }
    }

    fn run_cpu(&mut self) {
        let Some(pid) = self.cpu else { return };
        let pcb = self.pcb_mut(pid);
        pcb.remaining_runtime -= 1;
        if let Some(q) = pcb.remaining_quantum.as_mut() {
            *q -= 1;
        }
        let event = TraceEvent::RanTick {
            remaining_runtime: pcb.remaining_runtime,
            remaining_quantum: pcb.remaining_quantum,
        };
        self.record(Some(pid), event);
    }

    fn fire_internal_events(&mut self) {
        if let Some(pid) = self.cpu {
            let pcb = &self.pcb_table[&pid];
            if pcb.remaining_runtime == 0 {
                self.on_termination();
            } else if pcb.remaining_quantum == Some(0) {
                self.on_quantum_expiration();
            }
        }

        let now = self.now;
        let mut due: Vec<IoEntry> = self
            .io_queue
            .iter()
            .copied()
            .filter(|e| e.completion_time <= now)
            .collect();
        due.sort_by_key(|e| (e.completion_time, e.pid));
        for entry in due {
            self.complete_io(entry.pid);
        }
    }

    fn apply_external_events(&mut self) -> Result<()> {
        let scenario = Arc::clone(&self.scenario);
        while let Some(event) = scenario.events.get(self.event_cursor) {
            if event.time > self.now {
                break;
            }
            self.event_cursor += 1;
            self.apply_external(event)?;
        }
        Ok(())
    }

    fn apply_external(&mut self, event: &ExternalEvent) -> Result<()> {
        match event.kind {
            EventKind::Arrival { runtime, memory } => {
                let pid = Pid(self.pcb_table.len() as u32 + 1);
                self.record(Some(pid), TraceEvent::Arrived { runtime, memory });
                let job = ProcessControlBlock::new(pid, self.now, runtime, memory);
                self.reject_or_enqueue(job)?;
            }
            EventKind::IoRequest { burst } => self.request_io(burst),
            EventKind::SemWait { sem_id } => self.sem_wait(sem_id),
            EventKind::SemSignal { sem_id } => self.sem_signal(sem_id),
            EventKind::DisplayStatus => self.record(None, TraceEvent::StatusDumped),
        }
        Ok(())
    }

    /// Internal events that will fire if no external event intervenes,
    /// earliest first.
    pub fn pending_internal_events(&self) -> Vec<InternalEvent> {
        let mut events = Vec::new();
        if let Some(pid) = self.cpu {
            let pcb = &self.pcb_table[&pid];
            let run = pcb.remaining_runtime;
            let event = match pcb.remaining_quantum {
                Some(q) if q < run => InternalEvent {
                    kind: InternalEventKind::QuantumExpiration,
                    pid,
                    due_time: self.now + q,
                },
                _ => InternalEvent {
                    kind: InternalEventKind::Termination,
                    pid,
                    due_time: self.now + run,
                },
            };
            events.push(event);
        }
        events.extend(self.io_queue.iter().map(|e| InternalEvent {
            kind: InternalEventKind::IoCompletion,
            pid: e.pid,
            due_time: e.completion_time,
        }));
        events.sort_by_key(|e| (e.due_time, e.kind, e.pid));
        events
    }

    /// Time of the next external event not yet applied.
    pub fn next_external_time(&self) -> Option<SimTime> {
        self.scenario.events.get(self.event_cursor).map(|e| e.time)
    }

    /// Smallest time after `now` at which a tick will record anything other
    /// than CPU accounting, bounded by `max_time`.
    pub fn next_event_time(&self) -> Option<SimTime> {
        let internal = self.pending_internal_events().first().map(|e| e.due_time);
        let next = match (internal, self.next_external_time()) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b)?,
        };
        (next <= self.config.max_time).then_some(next)
    }

    /// Whether every external event has been consumed and no process is
    /// still live.
    pub fn is_drained(&self) -> bool {
        self.event_cursor == self.scenario.events.len()
            && self.pcb_table.values().all(|p| !p.location.is_live())
    }

    /// Stable hex digest over every semantic field except the trace.
    pub fn digest(&self) -> String {
        let view = DigestView {
            config: &self.config,
            now: self.now,
            job_queue: &self.job_queue,
            ready_l1: &self.ready_l1,
            ready_l2: &self.ready_l2,
            io_queue: &self.io_queue,
            sem_queues: &self.sem_queues,
            sem_values: &self.sem_values,
            cpu: self.cpu,
            free_memory: self.free_memory,
            rejected: &self.rejected,
            finished: &self.finished,
            pcb_table: &self.pcb_table,
            event_cursor: self.event_cursor,
        };
        let bytes = serde_json::to_vec(&view).expect("state serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Copy of the state without its trace, plus the trace length at the
    /// moment of the copy.
    pub fn detached(&mut self) -> (MachineState, usize) {
        let trace = std::mem::take(&mut self.trace);
        let copy = self.clone();
        let len = trace.len();
        self.trace = trace;
        (copy, len)
    }

    /// Checks memory conservation, exclusive location, and semaphore
    /// safety. Returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut seen: BTreeMap<Pid, Location> = BTreeMap::new();
        let mut place = |pid: Pid, loc: Location| -> std::result::Result<(), String> {
            match seen.insert(pid, loc) {
                Some(prev) => Err(format!("pid {pid} found in both {prev} and {loc}")),
                None => Ok(()),
            }
        };
        for &pid in &self.job_queue {
            place(pid, Location::JobQueue)?;
        }
        for &pid in &self.ready_l1 {
            place(pid, Location::ReadyL1)?;
        }
        for &pid in &self.ready_l2 {
            place(pid, Location::ReadyL2)?;
        }
        if let Some(pid) = self.cpu {
            place(pid, Location::Cpu)?;
        }
        for e in &self.io_queue {
            place(
                e.pid,
                Location::IoWait {
                    completion_time: e.completion_time,
                },
            )?;
        }
        for (i, queue) in self.sem_queues.iter().enumerate() {
            let sem_id = SemId::new(i as u8 + 1).expect("slot index in range");
            for &pid in queue {
                place(pid, Location::SemWait { sem_id })?;
            }
        }
        for &pid in &self.finished {
            place(pid, Location::Finished)?;
        }
        for &pid in &self.rejected {
            place(pid, Location::Rejected)?;
        }

        if seen.len() != self.pcb_table.len() {
            return Err(format!(
                "{} pids in containers but {} control blocks",
                seen.len(),
                self.pcb_table.len()
            ));
        }
        let mut resident = 0u64;
        for (pid, pcb) in &self.pcb_table {
            match seen.get(pid) {
                Some(&loc) if loc == pcb.location => {}
                other => {
                    return Err(format!(
                        "pid {pid} says {} but is held by {other:?}",
                        pcb.location
                    ))
                }
            }
            if pcb.location.is_resident() {
                resident += u64::from(pcb.memory_required);
            }
            if (pcb.remaining_runtime == 0) != (pcb.location == Location::Finished) {
                return Err(format!("pid {pid} runtime/finished mismatch"));
            }
            let too_big = pcb.memory_required > self.config.total_memory;
            if too_big != (pcb.location == Location::Rejected) {
                return Err(format!("pid {pid} rejection mismatch"));
            }
        }
        if u64::from(self.free_memory) + resident != u64::from(self.config.total_memory) {
            return Err(format!(
                "memory leak: free {} + resident {resident} != total {}",
                self.free_memory, self.config.total_memory
            ));
        }
        for (i, queue) in self.sem_queues.iter().enumerate() {
            if self.sem_values[i] > 0 && !queue.is_empty() {
                return Err(format!(
                    "semaphore {} has value {} and {} waiters",
                    i + 1,
                    self.sem_values[i],
                    queue.len()
                ));
            }
        }
        Ok(())
    }
}
