//! State-transition log.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::process::{Level, Pid, SemId};
use crate::SimTime;

/// One state transition: who moved where, why, and when.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: SimTime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pid: Option<Pid>,
    #[serde(flatten)]
    pub event: TraceEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum TraceEvent {
    Arrived {
        runtime: u32,
        memory: u32,
    },
    Rejected {
        memory: u32,
        total_memory: u32,
        alert: bool,
    },
    AdmittedToReady {
        memory: u32,
        free_memory: u32,
    },
    Dispatched {
        level: Level,
        quantum: Option<u32>,
        remaining_runtime: u32,
    },
    RanTick {
        remaining_runtime: u32,
        remaining_quantum: Option<u32>,
    },
    QuantumExpired {
        level: Level,
        remaining_runtime: u32,
    },
    Promoted {
        from: Level,
        to: Level,
    },
    IoRequested {
        burst: u32,
        completion_time: SimTime,
    },
    IoCompleted,
    SemBlocked {
        sem_id: SemId,
    },
    SemAcquired {
        sem_id: SemId,
        value: u32,
    },
    SemSignaled {
        sem_id: SemId,
        value: u32,
        woke: Option<Pid>,
    },
    Terminated {
        free_memory: u32,
    },
    StatusDumped,
    /// An external event that could not be applied (e.g. I/O request with
    /// an idle CPU). No state changed.
    Warning {
        reason: String,
    },
}

impl TraceEvent {
    pub fn name(&self) -> &'static str {
        match self {
            TraceEvent::Arrived { .. } => "Arrived",
            TraceEvent::Rejected { .. } => "Rejected",
            TraceEvent::AdmittedToReady { .. } => "AdmittedToReady",
            TraceEvent::Dispatched { .. } => "Dispatched",
            TraceEvent::RanTick { .. } => "RanTick",
            TraceEvent::QuantumExpired { .. } => "QuantumExpired",
            TraceEvent::Promoted { .. } => "Promoted",
            TraceEvent::IoRequested { .. } => "IoRequested",
            TraceEvent::IoCompleted => "IoCompleted",
            TraceEvent::SemBlocked { .. } => "SemBlocked",
            TraceEvent::SemAcquired { .. } => "SemAcquired",
            TraceEvent::SemSignaled { .. } => "SemSignaled",
            TraceEvent::Terminated { .. } => "Terminated",
            TraceEvent::StatusDumped => "StatusDumped",
            TraceEvent::Warning { .. } => "Warning",
        }
    }

    /// Records produced by internal events (termination, quantum
    /// expiration, I/O completion).
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            TraceEvent::Terminated { .. }
                | TraceEvent::QuantumExpired { .. }
                | TraceEvent::Promoted { .. }
                | TraceEvent::IoCompleted
        )
    }

    /// Records produced directly by applying an external scenario event.
    pub fn is_external(&self) -> bool {
        matches!(
            self,
            TraceEvent::Arrived { .. }
                | TraceEvent::Rejected { .. }
                | TraceEvent::IoRequested { .. }
                | TraceEvent::SemBlocked { .. }
                | TraceEvent::SemAcquired { .. }
                | TraceEvent::SemSignaled { .. }
                | TraceEvent::StatusDumped
                | TraceEvent::Warning { .. }
        )
    }
}

impl TraceRecord {
    pub fn new(time: SimTime, pid: Option<Pid>, event: TraceEvent) -> Self {
        Self { time, pid, event }
    }

    /// Every record except the per-tick CPU accounting counts as an event
    /// for next/previous stepping.
    pub fn is_event(&self) -> bool {
        !matches!(self.event, TraceEvent::RanTick { .. })
    }
}

fn quantum(q: Option<u32>) -> String {
    q.map_or_else(|| "fcfs".to_string(), |q| q.to_string())
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} {}", self.time, self.event.name())?;
        if let Some(pid) = self.pid {
            write!(f, " pid={pid}")?;
        }
        match &self.event {
            TraceEvent::Arrived { runtime, memory } => {
                write!(f, " runtime={runtime} memory={memory}")
            }
            TraceEvent::Rejected {
                memory,
                total_memory,
                alert,
            } => write!(
                f,
                " memory={memory} total_memory={total_memory} alert={alert}"
            ),
            TraceEvent::AdmittedToReady {
                memory,
                free_memory,
            } => write!(f, " memory={memory} free_memory={free_memory}"),
            TraceEvent::Dispatched {
                level,
                quantum: q,
                remaining_runtime,
            } => write!(
                f,
                " level={level} quantum={} remaining_runtime={remaining_runtime}",
                quantum(*q)
            ),
            TraceEvent::RanTick {
                remaining_runtime,
                remaining_quantum,
            } => write!(
                f,
                " remaining_runtime={remaining_runtime} remaining_quantum={}",
                quantum(*remaining_quantum)
            ),
            TraceEvent::QuantumExpired {
                level,
                remaining_runtime,
            } => write!(f, " level={level} remaining_runtime={remaining_runtime}"),
            TraceEvent::Promoted { from, to } => write!(f, " from=L{from} to=L{to}"),
            TraceEvent::IoRequested {
                burst,
                completion_time,
            } => write!(f, " burst={burst} completion_time={completion_time}"),
            TraceEvent::IoCompleted | TraceEvent::StatusDumped => Ok(()),
            TraceEvent::SemBlocked { sem_id } => write!(f, " sem={sem_id}"),
            TraceEvent::SemAcquired { sem_id, value } => write!(f, " sem={sem_id} value={value}"),
            TraceEvent::SemSignaled { sem_id, value, .. } => {
                write!(f, " sem={sem_id} value={value}")
            }
            TraceEvent::Terminated { free_memory } => write!(f, " free_memory={free_memory}"),
            TraceEvent::Warning { reason } => write!(f, " reason=\"{reason}\""),
        }
    }
}
