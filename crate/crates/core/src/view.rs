//! JSON state document: the shape clients (HTTP, CLI `--format json`,
//! Python) see for one moment of a run.

use serde::Serialize;

use crate::config::Config;
use crate::process::{Level, Pid, ProcessControlBlock};
use crate::scenario::{EventKind, Scenario};
use crate::state::MachineState;
use crate::timeline::Timeline;
use crate::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessView {
    pub pid: Pid,
    pub arrival_time: SimTime,
    pub runtime: u32,
    pub remaining_runtime: u32,
    pub memory: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completion_time: Option<SimTime>,
}

impl From<&ProcessControlBlock> for ProcessView {
    fn from(p: &ProcessControlBlock) -> Self {
        Self {
            pid: p.pid,
            arrival_time: p.arrival_time,
            runtime: p.total_runtime,
            remaining_runtime: p.remaining_runtime,
            memory: p.memory_required,
            completion_time: p.completion_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CpuView {
    #[serde(flatten)]
    pub process: ProcessView,
    /// `null` when the level runs first-come, first-served.
    pub remaining_quantum: Option<u32>,
    pub level: Option<Level>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IoView {
    #[serde(flatten)]
    pub process: ProcessView,
    pub completion_time: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemaphoreView {
    pub id: u8,
    pub value: u32,
    pub waiters: Vec<ProcessView>,
}

/// An external event not yet applied, as shown in the incoming list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PendingEvent {
    pub kind: char,
    pub time: SimTime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pid: Option<Pid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burst: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sem_id: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateDocument {
    pub now: SimTime,
    pub config: Config,
    pub free_memory: u32,
    pub total_memory: u32,
    pub cpu: Option<CpuView>,
    pub job_queue: Vec<ProcessView>,
    pub ready_l1: Vec<ProcessView>,
    pub ready_l2: Vec<ProcessView>,
    pub io_queue: Vec<IoView>,
    pub semaphores: Vec<SemaphoreView>,
    pub sem_values: Vec<u32>,
    pub rejected: Vec<ProcessView>,
    pub finished: Vec<ProcessView>,
    pub pending_events: Vec<PendingEvent>,
    pub next_event_time: Option<SimTime>,
    pub prev_event_time: Option<SimTime>,
    pub digest: String,
}

fn pending(scenario: &Scenario, cursor: usize) -> Vec<PendingEvent> {
    let mut pid = scenario.events[..cursor.min(scenario.events.len())]
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Arrival { .. }))
        .count() as u32;
    scenario
        .events
        .iter()
        .skip(cursor)
        .map(|e| {
            let mut view = PendingEvent {
                kind: e.kind.letter(),
                time: e.time,
                pid: None,
                runtime: None,
                memory: None,
                burst: None,
                sem_id: None,
            };
            match e.kind {
                EventKind::Arrival { runtime, memory } => {
                    pid += 1;
                    view.pid = Some(Pid(pid));
                    view.runtime = Some(runtime);
                    view.memory = Some(memory);
                }
                EventKind::IoRequest { burst } => view.burst = Some(burst),
                EventKind::SemWait { sem_id } | EventKind::SemSignal { sem_id } => {
                    view.sem_id = Some(sem_id.get())
                }
                EventKind::DisplayStatus => {}
            }
            view
        })
        .collect()
}

impl StateDocument {
    /// Document for a bare state. Previous-event time needs the state's
    /// trace, which covers the whole run up to `now`.
    pub fn from_state(state: &MachineState) -> Self {
        let views = |pids: &mut dyn Iterator<Item = &Pid>| -> Vec<ProcessView> {
            pids.map(|pid| ProcessView::from(&state.pcb_table[pid]))
                .collect()
        };
        let cpu = state.cpu.map(|pid| {
            let pcb = &state.pcb_table[&pid];
            CpuView {
                process: pcb.into(),
                remaining_quantum: pcb.remaining_quantum,
                level: pcb.dispatch_level,
            }
        });
        let semaphores = state
            .sem_queues
            .iter()
            .zip(state.sem_values)
            .enumerate()
            .map(|(i, (queue, value))| SemaphoreView {
                id: i as u8 + 1,
                value,
                waiters: views(&mut queue.iter()),
            })
            .collect();
        let prev_event_time = state
            .trace
            .iter()
            .rev()
            .find(|r| r.time < state.now && r.is_event())
            .map(|r| r.time);
        Self {
            now: state.now,
            config: state.config.clone(),
            free_memory: state.free_memory,
            total_memory: state.config.total_memory,
            cpu,
            job_queue: views(&mut state.job_queue.iter()),
            ready_l1: views(&mut state.ready_l1.iter()),
            ready_l2: views(&mut state.ready_l2.iter()),
            io_queue: state
                .io_queue
                .iter()
                .map(|e| IoView {
                    process: (&state.pcb_table[&e.pid]).into(),
                    completion_time: e.completion_time,
                })
                .collect(),
            semaphores,
            sem_values: state.sem_values.to_vec(),
            rejected: views(&mut state.rejected.iter()),
            finished: views(&mut state.finished.iter()),
            pending_events: pending(state.scenario(), state.event_cursor),
            next_event_time: state.next_event_time(),
            prev_event_time,
            digest: state.digest(),
        }
    }

    pub fn from_timeline(timeline: &Timeline) -> Self {
        Self::from_state(timeline.current())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::canned_by_name;

    #[test]
    fn document_at_131() {
        let mut tl =
            Timeline::new(Config::default(), canned_by_name("paper-demo").unwrap()).unwrap();
        tl.goto(131).unwrap();
        let doc = StateDocument::from_timeline(&tl);
        assert_eq!(doc.rejected.len(), 1);
        assert_eq!(doc.rejected[0].pid, Pid(5));
        assert_eq!(doc.cpu.as_ref().unwrap().process.pid, Pid(1));
        assert_eq!(doc.semaphores.len(), 5);
        assert_eq!(doc.pending_events[0].kind, 'A');
        assert_eq!(doc.pending_events[0].pid, Some(Pid(6)));
        let v = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["pending_events"][0]["kind"], "A");
        assert_eq!(v["cpu"]["pid"], 1);
    }

    #[test]
    fn fresh_document_is_empty() {
        let tl = Timeline::new(Config::default(), Scenario::empty()).unwrap();
        let doc = StateDocument::from_timeline(&tl);
        assert!(doc.cpu.is_none());
        assert!(doc.job_queue.is_empty() && doc.ready_l1.is_empty() && doc.ready_l2.is_empty());
        assert!(doc.io_queue.is_empty() && doc.finished.is_empty() && doc.rejected.is_empty());
        assert_eq!(doc.free_memory, 512);
    }
}
