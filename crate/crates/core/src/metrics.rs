//! Turnaround and wait-time statistics.
//!
//! Every tick of a process's lifetime is attributed to exactly one bucket:
//! tick `t` goes to wherever the process was at the end of tick `t - 1`.
//! Attribution is rebuilt from the location history in the trace, which
//! makes it independent of the per-tick accumulators the engine keeps in
//! each control block.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Result, SimError};
use crate::process::{Pid, ProcessControlBlock};
use crate::trace::{TraceEvent, TraceRecord};
use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bucket {
    JobQueue,
    Ready,
    Cpu,
    Io,
    Sem,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessStats {
    pub pid: Pid,
    pub arrival_time: SimTime,
    /// `None` when the process was still live at the end of the run.
    pub completion_time: Option<SimTime>,
    pub turnaround: Option<u32>,
    pub job_queue_wait: u32,
    pub ready_wait: u32,
    pub io_wait: u32,
    pub sem_wait: u32,
    pub cpu_time: u32,
}

impl ProcessStats {
    pub fn bucket_sum(&self) -> u32 {
        self.job_queue_wait + self.ready_wait + self.io_wait + self.sem_wait + self.cpu_time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Averages {
    pub turnaround: f64,
    pub job_queue_wait: f64,
    pub ready_wait: f64,
    pub io_wait: f64,
    pub sem_wait: f64,
    pub cpu_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    /// Finished and censored processes in pid order. Rejected jobs are
    /// only counted.
    pub per_process: Vec<ProcessStats>,
    /// Means over finished processes; absent when none finished.
    pub averages: Option<Averages>,
    pub finished: usize,
    pub rejected: usize,
    pub censored: usize,
    pub final_time: SimTime,
}

struct Cursor {
    bucket: Bucket,
    since: SimTime,
    stats: ProcessStats,
}

impl Cursor {
    fn move_to(&mut self, bucket: Bucket, at: SimTime) {
        let ticks = at - self.since;
        let s = &mut self.stats;
        match self.bucket {
            Bucket::JobQueue => s.job_queue_wait += ticks,
            Bucket::Ready => s.ready_wait += ticks,
            Bucket::Cpu => s.cpu_time += ticks,
            Bucket::Io => s.io_wait += ticks,
            Bucket::Sem => s.sem_wait += ticks,
            Bucket::Done => {}
        }
        self.bucket = bucket;
        self.since = at;
    }
}

/// Builds run statistics from a single run's trace.
pub fn compute(
    trace: &[TraceRecord],
    pcb_table: &BTreeMap<Pid, ProcessControlBlock>,
    final_time: SimTime,
) -> Result<RunStats> {
    let mut cursors: BTreeMap<Pid, Cursor> = BTreeMap::new();
    let mut rejected = 0;

    for record in trace {
        let next = match &record.event {
            TraceEvent::Arrived { .. } => {
                let pid = record.pid.ok_or_else(|| missing_pid(record))?;
                if !pcb_table.contains_key(&pid) {
                    return Err(SimError::InconsistentTrace(format!(
                        "pid {pid} arrived but has no control block"
                    )));
                }
                if cursors.contains_key(&pid) {
                    return Err(SimError::InconsistentTrace(format!(
                        "pid {pid} arrived twice"
                    )));
                }
                cursors.insert(
                    pid,
                    Cursor {
                        bucket: Bucket::JobQueue,
                        since: record.time,
                        stats: ProcessStats {
                            pid,
                            arrival_time: record.time,
                            completion_time: None,
                            turnaround: None,
                            job_queue_wait: 0,
                            ready_wait: 0,
                            io_wait: 0,
                            sem_wait: 0,
                            cpu_time: 0,
                        },
                    },
                );
                continue;
            }
            TraceEvent::Rejected { .. } => {
                let pid = record.pid.ok_or_else(|| missing_pid(record))?;
                cursors.remove(&pid).ok_or_else(|| unseen(pid))?;
                rejected += 1;
                continue;
            }
            TraceEvent::AdmittedToReady { .. } | TraceEvent::IoCompleted => Bucket::Ready,
            TraceEvent::QuantumExpired { .. } => Bucket::Ready,
            TraceEvent::SemSignaled { woke: Some(_), .. } => Bucket::Ready,
            TraceEvent::Dispatched { .. } => Bucket::Cpu,
            TraceEvent::IoRequested { .. } => Bucket::Io,
            TraceEvent::SemBlocked { .. } => Bucket::Sem,
            TraceEvent::Terminated { .. } => Bucket::Done,
            TraceEvent::SemSignaled { woke: None, .. }
            | TraceEvent::SemAcquired { .. }
            | TraceEvent::RanTick { .. }
            | TraceEvent::Promoted { .. }
            | TraceEvent::StatusDumped
            | TraceEvent::Warning { .. } => continue,
        };
        let pid = record.pid.ok_or_else(|| missing_pid(record))?;
        let cursor = cursors.get_mut(&pid).ok_or_else(|| unseen(pid))?;
        cursor.move_to(next, record.time);
        if next == Bucket::Done {
            cursor.stats.completion_time = Some(record.time);
            cursor.stats.turnaround = Some(record.time - cursor.stats.arrival_time);
        }
    }

    let mut per_process = Vec::with_capacity(cursors.len());
    let mut censored = 0;
    for (_, mut cursor) in cursors {
        if cursor.bucket != Bucket::Done {
            cursor.move_to(Bucket::Done, final_time);
            censored += 1;
        }
        per_process.push(cursor.stats);
    }

    let done: Vec<&ProcessStats> = per_process
        .iter()
        .filter(|p| p.completion_time.is_some())
        .collect();
    let averages = (!done.is_empty()).then(|| {
        let n = done.len() as f64;
        let mean =
            |f: fn(&ProcessStats) -> u32| done.iter().map(|p| f64::from(f(p))).sum::<f64>() / n;
        Averages {
            turnaround: mean(|p| p.turnaround.unwrap_or(0)),
            job_queue_wait: mean(|p| p.job_queue_wait),
            ready_wait: mean(|p| p.ready_wait),
            io_wait: mean(|p| p.io_wait),
            sem_wait: mean(|p| p.sem_wait),
            cpu_time: mean(|p| p.cpu_time),
        }
    });

    Ok(RunStats {
        finished: done.len(),
        per_process,
        averages,
        rejected,
        censored,
        final_time,
    })
}

fn missing_pid(record: &TraceRecord) -> SimError {
    SimError::InconsistentTrace(format!(
        "{} record at t={} carries no pid",
        record.event.name(),
        record.time
    ))
}

fn unseen(pid: Pid) -> SimError {
    SimError::InconsistentTrace(format!("pid {pid} referenced before arrival"))
}

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl fmt::Display for RunStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>8} {:>10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "pid", "arrival", "completion", "turnaround", "job_q", "ready", "io", "sem", "cpu"
        )?;
        for p in &self.per_process {
            writeln!(
                f,
                "{:>5} {:>8} {:>10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}",
                p.pid,
                p.arrival_time,
                opt(p.completion_time),
                opt(p.turnaround),
                p.job_queue_wait,
                p.ready_wait,
                p.io_wait,
                p.sem_wait,
                p.cpu_time
            )?;
        }
        writeln!(
            f,
            "final time: {}  finished: {}  rejected: {}  censored: {}",
            self.final_time, self.finished, self.rejected, self.censored
        )?;
        match &self.averages {
            Some(a) => write!(
                f,
                "average turnaround: {:.2}  job scheduling wait: {:.2}  ready wait: {:.2}  \
                 io wait: {:.2}  semaphore wait: {:.2}  cpu: {:.2}",
                a.turnaround, a.job_queue_wait, a.ready_wait, a.io_wait, a.sem_wait, a.cpu_time
            ),
            None => write!(f, "averages: n/a (no finished processes)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::scenario::{parse, Scenario};
    use crate::state::MachineState;

    fn finish(text: &str) -> RunStats {
        let mut s = MachineState::init(Config::default(), parse(text).unwrap()).unwrap();
        while !s.is_drained() {
            s.tick().unwrap();
        }
        compute(&s.trace, &s.pcb_table, s.now).unwrap()
    }

    #[test]
    fn single_job() {
        let stats = finish("A 100 78 20");
        let p = &stats.per_process[0];
        assert_eq!(p.completion_time, Some(178));
        assert_eq!(p.turnaround, Some(78));
        assert_eq!(p.cpu_time, 78);
        assert_eq!(
            (p.job_queue_wait, p.ready_wait, p.io_wait, p.sem_wait),
            (0, 0, 0, 0)
        );
        assert_eq!(stats.averages.as_ref().unwrap().turnaround, 78.0);
    }

    #[test]
    fn two_jobs_fcfs_hand_schedule() {
        let stats = finish("A 0 10 1\nA 0 10 1");
        let p2 = &stats.per_process[1];
        assert_eq!(p2.ready_wait, 10);
        assert_eq!(p2.turnaround, Some(20));
        assert_eq!(stats.averages.as_ref().unwrap().turnaround, 15.0);
    }

    #[test]
    fn empty_run() {
        let s = MachineState::init(Config::default(), Scenario::empty()).unwrap();
        let stats = compute(&s.trace, &s.pcb_table, 0).unwrap();
        assert_eq!((stats.finished, stats.rejected, stats.censored), (0, 0, 0));
        assert!(stats.averages.is_none());
        assert!(stats.per_process.is_empty());
    }

    #[test]
    fn rejected_jobs_only_counted() {
        let stats = finish("A 0 10 1\nA 1 10 600");
        assert_eq!(stats.rejected, 1);
        assert_eq!(stats.per_process.len(), 1);
    }

    #[test]
    fn censored_processes() {
        let c = Config {
            max_time: 50,
            ..Config::default()
        };
        let mut s = MachineState::init(c, parse("A 0 5 1\nA 0 100 1").unwrap()).unwrap();
        s.advance(50).unwrap();
        let stats = compute(&s.trace, &s.pcb_table, s.now).unwrap();
        assert_eq!(stats.censored, 1);
        assert_eq!(stats.finished, 1);
        let p2 = &stats.per_process[1];
        assert_eq!(p2.completion_time, None);
        assert_eq!(p2.turnaround, None);
        assert_eq!(p2.bucket_sum(), 50);
    }

    #[test]
    fn buckets_cover_io_and_semaphores() {
        let stats = finish("A 0 30 5\nA 0 30 5\nI 5 10\nW 12 2\nS 40 2");
        for p in &stats.per_process {
            assert_eq!(Some(p.bucket_sum()), p.turnaround, "pid {}", p.pid);
        }
        assert_eq!(stats.per_process[0].io_wait, 10);
        assert!(stats.per_process.iter().any(|p| p.sem_wait > 0));
    }

    #[test]
    fn trace_buckets_match_engine_accumulators() {
        let text = "A 0 30 5\nA 0 300 5\nA 3 40 600\nA 4 20 500\nI 5 10\nW 12 2\nS 40 2\nI 60 3";
        let mut s = MachineState::init(Config::default(), parse(text).unwrap()).unwrap();
        while !s.is_drained() {
            s.tick().unwrap();
        }
        let stats = compute(&s.trace, &s.pcb_table, s.now).unwrap();
        for p in &stats.per_process {
            let pcb = &s.pcb_table[&p.pid];
            assert_eq!(p.job_queue_wait, pcb.waits.job_queue);
            assert_eq!(p.ready_wait, pcb.waits.ready);
            assert_eq!(p.io_wait, pcb.waits.io);
            assert_eq!(p.sem_wait, pcb.waits.sem);
            assert_eq!(p.cpu_time, pcb.cpu_time());
        }
    }

    #[test]
    fn unknown_pid_is_inconsistent() {
        let trace = vec![TraceRecord::new(3, Some(Pid(9)), TraceEvent::IoCompleted)];
        let err = compute(&trace, &BTreeMap::new(), 3).unwrap_err();
        assert!(matches!(err, SimError::InconsistentTrace(_)));
    }
}
