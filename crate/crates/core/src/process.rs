//! Process identity and the per-process control block.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::SimTime;

/// Process id. Assigned 1, 2, 3, … in job-arrival order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pid(pub u32);

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Semaphore id in `1..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SemId(u8);

impl SemId {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = crate::config::SEMAPHORE_COUNT as u8;

    pub fn new(id: u8) -> Option<Self> {
        (Self::MIN..=Self::MAX).contains(&id).then_some(Self(id))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based slot in the semaphore tables.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl fmt::Display for SemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Ready-queue level. Level 1 always has priority over level 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Level {
    pub fn number(self) -> u8 {
        match self {
            Level::One => 1,
            Level::Two => 2,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.number().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "where", rename_all = "snake_case")]
pub enum Location {
    JobQueue,
    ReadyL1,
    ReadyL2,
    Cpu,
    IoWait { completion_time: SimTime },
    SemWait { sem_id: SemId },
    Finished,
    Rejected,
}

impl Location {
    /// Whether a process here holds main memory.
    pub fn is_resident(self) -> bool {
        matches!(
            self,
            Location::ReadyL1
                | Location::ReadyL2
                | Location::Cpu
                | Location::IoWait { .. }
                | Location::SemWait { .. }
        )
    }

    pub fn is_live(self) -> bool {
        !matches!(self, Location::Finished | Location::Rejected)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::JobQueue => f.write_str("job queue"),
            Location::ReadyL1 => f.write_str("ready L1"),
            Location::ReadyL2 => f.write_str("ready L2"),
            Location::Cpu => f.write_str("CPU"),
            Location::IoWait { completion_time } => write!(f, "I/O wait (until {completion_time})"),
            Location::SemWait { sem_id } => write!(f, "semaphore {sem_id} wait"),
            Location::Finished => f.write_str("finished"),
            Location::Rejected => f.write_str("rejected"),
        }
    }
}

/// Per-tick wait accumulators, one bucket per non-CPU location a live
/// process can occupy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaitTimes {
    pub job_queue: u32,
    pub ready: u32,
    pub io: u32,
    pub sem: u32,
}

impl WaitTimes {
    pub fn total(&self) -> u32 {
        self.job_queue + self.ready + self.io + self.sem
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProcessControlBlock {
    pub pid: Pid,
    pub arrival_time: SimTime,
    pub total_runtime: u32,
    pub remaining_runtime: u32,
    pub memory_required: u32,
    /// Quantum left in the current CPU burst. `None` while on the CPU means
    /// the level runs first-come, first-served. Only meaningful on the CPU.
    pub remaining_quantum: Option<u32>,
    /// Level the process was last dispatched from.
    pub dispatch_level: Option<Level>,
    pub location: Location,
    pub completion_time: Option<SimTime>,
    pub waits: WaitTimes,
}

impl ProcessControlBlock {
    pub fn new(pid: Pid, arrival_time: SimTime, runtime: u32, memory: u32) -> Self {
        Self {
            pid,
            arrival_time,
            total_runtime: runtime,
            remaining_runtime: runtime,
            memory_required: memory,
            remaining_quantum: None,
            dispatch_level: None,
            location: Location::JobQueue,
            completion_time: None,
            waits: WaitTimes::default(),
        }
    }

    pub fn cpu_time(&self) -> u32 {
        self.total_runtime - self.remaining_runtime
    }
}
