#![allow(dead_code)]

use mlfq_sim_core::scenario::{EventKind, ExternalEvent, Scenario};
use mlfq_sim_core::{Config, MachineState, SemId};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random scenario with up to `max_jobs` arrivals and `max_events` events
/// in total, mixing I/O, semaphore waits/signals and status dumps.
pub fn random_scenario(rng: &mut StdRng, max_jobs: usize, max_events: usize) -> Scenario {
    let n_events = rng.gen_range(1..=max_events);
    let mut times: Vec<u32> = (0..n_events).map(|_| rng.gen_range(0..1_500)).collect();
    times.sort_unstable();
    let mut jobs = 0;
    let events = times
        .into_iter()
        .map(|time| {
            let roll = rng.gen_range(0..100);
            let kind = if roll < 45 && jobs < max_jobs {
                jobs += 1;
                EventKind::Arrival {
                    runtime: rng.gen_range(1..=250),
                    memory: rng.gen_range(1..=560),
                }
            } else if roll < 65 {
                EventKind::IoRequest {
                    burst: rng.gen_range(1..=80),
                }
            } else if roll < 80 {
                EventKind::SemWait {
                    sem_id: SemId::new(rng.gen_range(1..=5)).unwrap(),
                }
            } else if roll < 97 {
                EventKind::SemSignal {
                    sem_id: SemId::new(rng.gen_range(1..=5)).unwrap(),
                }
            } else {
                EventKind::DisplayStatus
            };
            ExternalEvent::new(time, kind)
        })
        .collect();
    Scenario::new("random", events)
}

pub fn random_config(rng: &mut StdRng) -> Config {
    let quantum = |rng: &mut StdRng| {
        if rng.gen_bool(0.2) {
            0
        } else {
            rng.gen_range(1..=300)
        }
    };
    Config {
        quantum_level1: quantum(rng),
        quantum_level2: quantum(rng),
        total_memory: rng.gen_range(1..=512),
        semaphore_initial_values: std::array::from_fn(|_| rng.gen_range(0..=2)),
        max_time: 6_000,
        alerts_enabled: rng.gen_bool(0.5),
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Ticks until drained or `max_time`, calling `each` after every tick.
pub fn run_to_end(state: &mut MachineState, mut each: impl FnMut(&MachineState)) {
    while !state.is_drained() && state.now < state.config.max_time {
        state.tick().unwrap();
        each(state);
    }
}
