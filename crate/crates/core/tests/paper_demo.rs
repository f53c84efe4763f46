//! Walkthrough milestones on the canned `paper-demo` workload.

use mlfq_sim_core::scenario::canned_by_name;
use mlfq_sim_core::{Config, Level, Location, Pid, SemId, Timeline, TraceEvent, TraceRecord};

fn demo() -> Timeline {
    Timeline::new(Config::default(), canned_by_name("paper-demo").unwrap()).unwrap()
}

fn at(trace: &[TraceRecord], t: u32) -> Vec<&TraceRecord> {
    trace.iter().filter(|r| r.time == t).collect()
}

#[test]
fn job_one_arrives_and_runs() {
    let mut tl = demo();
    let s = tl.goto(100).unwrap();
    assert_eq!(s.cpu, Some(Pid(1)));
    assert_eq!(s.free_memory, 492);
    let kinds: Vec<&str> = at(&s.trace, 100).iter().map(|r| r.event.name()).collect();
    assert_eq!(kinds, ["Arrived", "AdmittedToReady", "Dispatched"]);
    assert_eq!(s.pcb(Pid(1)).unwrap().remaining_quantum, Some(100));

    let s = tl.goto(101).unwrap();
    let p = s.pcb(Pid(1)).unwrap();
    assert_eq!((p.remaining_runtime, p.remaining_quantum), (77, Some(99)));
    // First RanTick for pid 1 is at 101, not 100.
    let first_run = s
        .trace
        .iter()
        .find(|r| matches!(r.event, TraceEvent::RanTick { .. }))
        .unwrap();
    assert_eq!(first_run.time, 101);

    assert_eq!(
        tl.goto(119).unwrap().pcb(Pid(1)).unwrap().remaining_runtime,
        59
    );
}

#[test]
fn arrivals_up_to_136() {
    let mut tl = demo();
    let s = tl.goto(120).unwrap();
    assert_eq!(s.ready_l1.front(), Some(&Pid(2)));
    assert!(at(&s.trace, 120).iter().any(|r| r.pid == Some(Pid(2))
        && r.event
            == TraceEvent::AdmittedToReady {
                memory: 60,
                free_memory: 432
            }));

    let s = tl.goto(130).unwrap();
    assert_eq!(s.ready_l1.len(), 3);

    let s = tl.goto(131).unwrap();
    assert_eq!(s.rejected, vec![Pid(5)]);
    assert!(at(&s.trace, 131).iter().any(|r| matches!(
        r.event,
        TraceEvent::Rejected {
            memory: 513,
            alert: true,
            ..
        }
    )));

    let s = tl.goto(136).unwrap();
    assert_eq!(
        s.job_queue.iter().copied().collect::<Vec<_>>(),
        vec![Pid(6)]
    );
    assert_eq!(s.pcb(Pid(6)).unwrap().location, Location::JobQueue);
}

#[test]
fn process_one_finishes_at_178() {
    let mut tl = demo();
    let s = tl.goto(177).unwrap();
    assert_eq!(s.pcb(Pid(1)).unwrap().remaining_runtime, 1);
    let s = tl.goto(178).unwrap();
    assert_eq!(s.finished, vec![Pid(1)]);
    assert_eq!(s.cpu, Some(Pid(2)));
    assert!(at(&s.trace, 178).iter().any(|r| r.pid == Some(Pid(2))
        && r.event
            == TraceEvent::Dispatched {
                level: Level::One,
                quantum: Some(100),
                remaining_runtime: 90
            }));
}

#[test]
fn job_six_waits_for_empty_memory() {
    let mut tl = demo();
    let s = tl.goto(373).unwrap();
    assert_eq!(s.cpu, Some(Pid(6)));
    assert_eq!(s.free_memory, 0);
}

#[test]
fn io_burst_at_780() {
    let mut tl = demo();
    let s = tl.goto(779).unwrap();
    assert_eq!(s.cpu, Some(Pid(13)));
    assert!(s.finished.len() >= 3 && s.ready_l1.len() >= 2 && s.job_queue.len() >= 3);
    let s = tl.goto(780).unwrap();
    assert_eq!(s.io_queue[0].pid, Pid(13));
    assert_eq!(
        s.pcb(Pid(13)).unwrap().location,
        Location::IoWait {
            completion_time: 840
        }
    );
    let s = tl.goto(840).unwrap();
    assert!(at(&s.trace, 840)
        .iter()
        .any(|r| r.pid == Some(Pid(13)) && r.event == TraceEvent::IoCompleted));
}

#[test]
fn process_26_promoted_at_1570() {
    let mut tl = demo();
    let s = tl.goto(1_569).unwrap();
    let p = s.pcb(Pid(26)).unwrap();
    assert_eq!((p.remaining_runtime, p.remaining_quantum), (2, Some(1)));
    let s = tl.goto(1_570).unwrap();
    assert_eq!(s.ready_l2.front(), Some(&Pid(26)));
    assert_eq!(s.pcb(Pid(26)).unwrap().remaining_runtime, 1);
    let promoted = s
        .trace
        .iter()
        .filter(|r| matches!(r.event, TraceEvent::QuantumExpired { .. }))
        .collect::<Vec<_>>();
    // The first and only expiry so far is pid 26's.
    assert_eq!(promoted.len(), 1);
    assert_eq!((promoted[0].time, promoted[0].pid), (1_570, Some(Pid(26))));
    // Level 1 is not empty, so 26 waits.
    assert!(!s.ready_l1.is_empty() || s.cpu != Some(Pid(26)));
}

#[test]
fn semaphores() {
    let mut tl = demo();
    let s = tl.goto(7_068).unwrap();
    assert_eq!(s.sem_values[4], 1);
    let first_sem = s
        .trace
        .iter()
        .find(|r| {
            matches!(
                r.event,
                TraceEvent::SemSignaled { .. }
                    | TraceEvent::SemAcquired { .. }
                    | TraceEvent::SemBlocked { .. }
            )
        })
        .unwrap();
    assert_eq!(first_sem.time, 7_068);

    let s = tl.goto(7_449).unwrap();
    assert_eq!(s.cpu, Some(Pid(57)));
    let s = tl.goto(7_450).unwrap();
    assert_eq!(s.sem_values[3], 0);
    assert_eq!(
        s.sem_queues[3].iter().copied().collect::<Vec<_>>(),
        vec![Pid(57)]
    );
    assert_eq!(
        s.pcb(Pid(57)).unwrap().location,
        Location::SemWait {
            sem_id: SemId::new(4).unwrap()
        }
    );
}

#[test]
fn complete_run_finishes_every_admitted_job() {
    let mut tl = demo();
    let stats = tl.complete_run().unwrap();
    assert_eq!((stats.finished, stats.censored, stats.rejected), (56, 0, 1));
    assert_eq!(stats.final_time, 7_640);
    for p in &stats.per_process {
        if let Some(t) = p.turnaround {
            assert_eq!(p.bucket_sum(), t);
        }
    }
}
