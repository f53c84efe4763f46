//! I/O requests and counting-semaphore wait/signal.
//!
//! I/O has no device contention: every request completes exactly `burst`
//! ticks after it was made. Woken and I/O-completed processes always
//! re-enter ready level 1. A blocked process forfeits the rest of its
//! quantum.

use crate::process::{Location, Pid, SemId};
use crate::state::{IoEntry, MachineState};
use crate::trace::TraceEvent;

impl MachineState {
    /// Moves the CPU occupant to the I/O wait queue until `now + burst`.
    pub fn request_io(&mut self, burst: u32) {
        let Some(pid) = self.cpu.take() else {
            self.warn(format!("I/O request ({burst}) with an idle CPU ignored"));
            return;
        };
        let completion_time = self.now + burst;
        let pcb = self.pcb_mut(pid);
        pcb.location = Location::IoWait { completion_time };
        pcb.remaining_quantum = None;
        self.io_queue.push(IoEntry {
            pid,
            completion_time,
        });
        self.record(
            Some(pid),
            TraceEvent::IoRequested {
                burst,
                completion_time,
            },
        );
    }

    pub fn complete_io(&mut self, pid: Pid) {
        let Some(pos) = self.io_queue.iter().position(|e| e.pid == pid) else {
            return;
        };
        self.io_queue.remove(pos);
        self.pcb_mut(pid).location = Location::ReadyL1;
        self.ready_l1.push_back(pid);
        self.record(Some(pid), TraceEvent::IoCompleted);
    }

    /// Wait by the CPU occupant. An available semaphore is acquired at no
    /// CPU cost and the occupant keeps the CPU and its quantum.
    pub fn sem_wait(&mut self, sem_id: SemId) {
        let Some(pid) = self.cpu else {
            self.warn(format!(
                "wait on semaphore {sem_id} with an idle CPU ignored"
            ));
            return;
        };
        let slot = sem_id.index();
        if self.sem_values[slot] > 0 {
            self.sem_values[slot] -= 1;
            let value = self.sem_values[slot];
            self.record(Some(pid), TraceEvent::SemAcquired { sem_id, value });
            return;
        }
        self.cpu = None;
        let pcb = self.pcb_mut(pid);
        pcb.location = Location::SemWait { sem_id };
        pcb.remaining_quantum = None;
        self.sem_queues[slot].push_back(pid);
        self.record(Some(pid), TraceEvent::SemBlocked { sem_id });
    }

    /// Wakes the longest waiter if there is one, otherwise increments.
    pub fn sem_signal(&mut self, sem_id: SemId) {
        let slot = sem_id.index();
        let woke = self.sem_queues[slot].pop_front();
        match woke {
            Some(pid) => {
                self.pcb_mut(pid).location = Location::ReadyL1;
                self.ready_l1.push_back(pid);
            }
            None => self.sem_values[slot] += 1,
        }
        let value = self.sem_values[slot];
        self.record(
            woke,
            TraceEvent::SemSignaled {
                sem_id,
                value,
                woke,
            },
        );
    }
}
