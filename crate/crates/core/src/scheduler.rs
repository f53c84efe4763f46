//! Long-term job admission and short-term CPU scheduling over the two-level
//! feedback ready queue.

use std::collections::VecDeque;

use crate::error::{Result, SimError};
use crate::process::{Level, Location, ProcessControlBlock};
use crate::state::MachineState;
use crate::trace::TraceEvent;

impl MachineState {
    /// Handles a fresh arrival: jobs larger than total memory are rejected
    /// outright, everything else joins the job queue and triggers
    /// admission.
    pub fn reject_or_enqueue(&mut self, mut job: ProcessControlBlock) -> Result<()> {
        let pid = job.pid;
        if self.pcb_table.contains_key(&pid) {
            return Err(SimError::DuplicatePid(pid));
        }
        if job.memory_required > self.config.total_memory {
            job.location = Location::Rejected;
            let event = TraceEvent::Rejected {
                memory: job.memory_required,
                total_memory: self.config.total_memory,
                alert: self.config.alerts_enabled,
            };
            self.pcb_table.insert(pid, job);
            self.rejected.push(pid);
            self.record(Some(pid), event);
            return Ok(());
        }
        job.location = Location::JobQueue;
        self.pcb_table.insert(pid, job);
        self.job_queue.push_back(pid);
        self.admit_jobs();
        Ok(())
    }

    /// First fit over the job queue in FIFO order. Jobs that do not fit are
    /// skipped and keep their relative order.
    pub fn admit_jobs(&mut self) {
        if self.job_queue.is_empty() {
            return;
        }
        let waiting = std::mem::take(&mut self.job_queue);
        let mut still_waiting = VecDeque::with_capacity(waiting.len());
        for pid in waiting {
            let memory = self.pcb_table[&pid].memory_required;
            if memory > self.free_memory {
                still_waiting.push_back(pid);
                continue;
            }
            self.free_memory -= memory;
            self.pcb_mut(pid).location = Location::ReadyL1;
            self.ready_l1.push_back(pid);
            let event = TraceEvent::AdmittedToReady {
                memory,
                free_memory: self.free_memory,
            };
            self.record(Some(pid), event);
        }
        self.job_queue = still_waiting;
    }

    /// Puts the head of the highest non-empty ready level on an idle CPU.
    pub fn dispatch(&mut self) {
        if self.cpu.is_some() {
            return;
        }
        let (pid, level) = if let Some(pid) = self.ready_l1.pop_front() {
            (pid, Level::One)
        } else if let Some(pid) = self.ready_l2.pop_front() {
            (pid, Level::Two)
        } else {
            return;
        };
        let quantum = self.config.quantum_for(level);
        let pcb = self.pcb_mut(pid);
        pcb.location = Location::Cpu;
        pcb.remaining_quantum = quantum;
        pcb.dispatch_level = Some(level);
        let remaining_runtime = pcb.remaining_runtime;
        self.cpu = Some(pid);
        self.record(
            Some(pid),
            TraceEvent::Dispatched {
                level,
                quantum,
                remaining_runtime,
            },
        );
    }

    /// The CPU occupant used its whole quantum. Level-1 processes are
    /// promoted to level 2; level-2 processes go to the back of level 2.
    pub fn on_quantum_expiration(&mut self) {
        let Some(pid) = self.cpu.take() else { return };
        let pcb = self.pcb_mut(pid);
        let level = pcb.dispatch_level.unwrap_or(Level::One);
        pcb.location = Location::ReadyL2;
        pcb.remaining_quantum = None;
        let remaining_runtime = pcb.remaining_runtime;
        self.ready_l2.push_back(pid);
        self.record(
            Some(pid),
            TraceEvent::QuantumExpired {
                level,
                remaining_runtime,
            },
        );
        if level == Level::One {
            self.record(
                Some(pid),
                TraceEvent::Promoted {
                    from: Level::One,
                    to: Level::Two,
                },
            );
        }
    }

    /// The CPU occupant finished. Its memory is released and admission
    /// runs again.
    pub fn on_termination(&mut self) {
        let Some(pid) = self.cpu.take() else { return };
        let now = self.now;
        let pcb = self.pcb_mut(pid);
        pcb.location = Location::Finished;
        pcb.completion_time = Some(now);
        pcb.remaining_quantum = None;
        let memory = pcb.memory_required;
        self.free_memory += memory;
        self.finished.push(pid);
        self.record(
            Some(pid),
            TraceEvent::Terminated {
                free_memory: self.free_memory,
            },
        );
        self.admit_jobs();
    }
}
