//! Deterministic simulator of a preemptive, multi-tasking operating system:
//! two-level feedback CPU scheduling, memory-gated job admission, I/O and
//! semaphore wait queues, with snapshot-and-replay time travel.
//!
//! ```
//! use mlfq_sim_core::{scenario, Config, Timeline};
//!
//! let scenario = scenario::parse("A 100 78 20").unwrap();
//! let mut timeline = Timeline::new(Config::default(), scenario).unwrap();
//! let stats = timeline.complete_run().unwrap();
//! assert_eq!(stats.per_process[0].turnaround, Some(78));
//! ```

pub mod config;
pub mod error;
pub mod metrics;
pub mod process;
pub mod render;
pub mod scenario;
mod scheduler;
pub mod state;
mod sync_io;
pub mod timeline;
pub mod trace;
pub mod view;

/// Simulated clock value in ticks.
pub type SimTime = u32;

pub use config::Config;
pub use error::{LineError, SimError};
pub use metrics::{ProcessStats, RunStats};
pub use process::{Level, Location, Pid, ProcessControlBlock, SemId};
pub use scenario::{EventKind, ExternalEvent, Scenario};
pub use state::{InternalEvent, InternalEventKind, MachineState};
pub use timeline::Timeline;
pub use trace::{TraceEvent, TraceRecord};
pub use view::StateDocument;
