//! Plain-text rendering of a state as the queue panel set.

use std::fmt::Write as _;

use crate::process::Pid;
use crate::state::MachineState;

const INCOMING_SHOWN: usize = 5;

fn pids<'a>(iter: impl Iterator<Item = &'a Pid>) -> String {
    let list: Vec<String> = iter.map(|p| p.to_string()).collect();
    if list.is_empty() {
        "-".to_string()
    } else {
        list.join(" ")
    }
}

fn quantum_label(q: u32) -> String {
    if q == 0 {
        "FCFS".to_string()
    } else {
        format!("q={q}")
    }
}

/// Multi-line status dump: incoming events, rejected jobs, job queue,
/// ready levels, I/O and semaphore queues, memory, CPU, finished list.
pub fn state_panels(state: &MachineState) -> String {
    let mut out = String::new();
    let c = &state.config;
    let _ = writeln!(
        out,
        "time {}   memory {}/{} free",
        state.now, state.free_memory, c.total_memory
    );

    let scenario = state.scenario();
    let upcoming: Vec<String> = scenario
        .events
        .iter()
        .enumerate()
        .skip(state.event_cursor)
        .take(INCOMING_SHOWN)
        .map(|(i, e)| match scenario.pid_of(i) {
            Some(pid) => format!("{e} (job {pid})"),
            None => e.to_string(),
        })
        .collect();
    let remaining = scenario.events.len() - state.event_cursor.min(scenario.events.len());
    let more = remaining.saturating_sub(INCOMING_SHOWN);
    let _ = write!(
        out,
        "incoming:   {}",
        if upcoming.is_empty() {
            "-".to_string()
        } else {
            upcoming.join(", ")
        }
    );
    if more > 0 {
        let _ = write!(out, " (+{more} more)");
    }
    out.push('\n');

    let _ = writeln!(out, "rejected:   {}", pids(state.rejected.iter()));
    let _ = writeln!(out, "job queue:  {}", pids(state.job_queue.iter()));
    let _ = writeln!(
        out,
        "ready L1 ({}): {}",
        quantum_label(c.quantum_level1),
        pids(state.ready_l1.iter())
    );
    let _ = writeln!(
        out,
        "ready L2 ({}): {}",
        quantum_label(c.quantum_level2),
        pids(state.ready_l2.iter())
    );
    let io: Vec<String> = state
        .io_queue
        .iter()
        .map(|e| format!("{}@{}", e.pid, e.completion_time))
        .collect();
    let _ = writeln!(
        out,
        "I/O wait:   {}",
        if io.is_empty() {
            "-".to_string()
        } else {
            io.join(" ")
        }
    );
    for (i, queue) in state.sem_queues.iter().enumerate() {
        let _ = writeln!(
            out,
            "sem {} [{}]: {}",
            i + 1,
            state.sem_values[i],
            pids(queue.iter())
        );
    }
    match state.cpu {
        Some(pid) => {
            let p = &state.pcb_table[&pid];
            let q = p
                .remaining_quantum
                .map_or_else(|| "FCFS".to_string(), |q| q.to_string());
            let _ = writeln!(
                out,
                "CPU:        {pid} (remaining {}/{}, quantum {q})",
                p.remaining_runtime, p.total_runtime
            );
        }
        None => {
            let _ = writeln!(out, "CPU:        idle");
        }
    }
    let _ = writeln!(out, "finished:   {}", pids(state.finished.iter()));
    out
}
