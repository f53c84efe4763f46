mod support;

use mlfq_sim_core::{MachineState, Timeline};
use rand::Rng;
use support::{random_config, random_scenario, rng};

fn sequential_digests(tl: &Timeline, until: u32) -> Vec<String> {
    let mut s = MachineState::init(tl.config().clone(), tl.scenario().clone()).unwrap();
    let mut out = vec![s.digest()];
    while s.now < until {
        s.tick().unwrap();
        out.push(s.digest());
    }
    out
}

#[test]
fn random_access_matches_sequential_run() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let config = random_config(&mut r);
        let scenario = random_scenario(&mut r, 20, 40);
        let horizon = 2_500;
        let reference = {
            let tl = Timeline::new(config.clone(), scenario.clone()).unwrap();
            sequential_digests(&tl, horizon)
        };
        for stride in [1, 7, 50, 250] {
            let mut tl = Timeline::with_stride(config.clone(), scenario.clone(), stride).unwrap();
            for _ in 0..30 {
                let t = r.gen_range(0..=horizon);
                let s = tl.goto(t).unwrap();
                assert_eq!(s.now, t);
                assert_eq!(
                    s.digest(),
                    reference[t as usize],
                    "seed {seed} stride {stride} t {t}"
                );
            }
        }
    }
}

#[test]
fn backward_travel_restores_trace() {
    let mut r = rng(77);
    let config = random_config(&mut r);
    let scenario = random_scenario(&mut r, 20, 40);
    let mut tl = Timeline::with_stride(config.clone(), scenario.clone(), 33).unwrap();
    let straight = {
        let mut s = MachineState::init(config, scenario).unwrap();
        s.advance(1_200).unwrap();
        s.trace
    };
    tl.goto(1_900).unwrap();
    let s = tl.goto(1_200).unwrap();
    assert_eq!(s.trace, straight);
}

#[test]
fn next_event_visits_every_event_time() {
    for seed in 0..30 {
        let mut r = rng(seed);
        let mut config = random_config(&mut r);
        config.max_time = 3_000;
        let scenario = random_scenario(&mut r, 20, 40);
        let mut full = Timeline::new(config.clone(), scenario.clone()).unwrap();
        full.complete_run().unwrap();
        let end = full.now();
        let mut expected: Vec<u32> = full
            .current()
            .trace
            .iter()
            .filter(|r| r.is_event() && r.time > 0)
            .map(|r| r.time)
            .collect();
        expected.dedup();

        let mut tl = Timeline::new(config, scenario).unwrap();
        let mut visited = vec![];
        while let Some(t) = tl.next_event().unwrap() {
            visited.push(t);
            if t >= end {
                break;
            }
        }
        // Every time the trace records something is a stop; extra stops
        // must be ticks where some event fired.
        for t in &expected {
            assert!(visited.contains(t), "seed {seed}: missed {t}");
        }
        for t in &visited {
            assert!(
                expected.contains(t) || *t == end,
                "seed {seed}: spurious stop {t}"
            );
        }
    }
}

#[test]
fn next_event_time_matches_brute_force() {
    for seed in 0..30 {
        let mut r = rng(500 + seed);
        let mut config = random_config(&mut r);
        config.max_time = 2_000;
        let scenario = random_scenario(&mut r, 15, 30);
        let mut s = MachineState::init(config, scenario).unwrap();
        for _ in 0..10 {
            let predicted = s.next_event_time();
            let mut probe = s.clone();
            let start = probe.trace.len();
            let mut actual = None;
            while probe.now < probe.config.max_time {
                probe.tick().unwrap();
                if probe.trace[start..].iter().any(|r| r.is_event()) {
                    actual = Some(probe.now);
                    break;
                }
            }
            match (predicted, actual) {
                (Some(p), Some(a)) => assert_eq!(p, a, "seed {seed} from t={}", s.now),
                (None, None) => {}
                // Capped at max_time with nothing left to record there.
                (Some(p), None) => assert_eq!(p, s.config.max_time, "seed {seed}"),
                (None, Some(a)) => panic!("seed {seed}: missed event at {a}"),
            }
            let Some(p) = predicted else { break };
            s.advance(p - s.now).unwrap();
        }
    }
}

#[test]
fn prev_after_next_returns_to_event() {
    let mut r = rng(9);
    let config = random_config(&mut r);
    let scenario = random_scenario(&mut r, 20, 40);
    let mut tl = Timeline::new(config, scenario).unwrap();
    let mut times = vec![];
    for _ in 0..15 {
        match tl.next_event().unwrap() {
            Some(t) => times.push(t),
            None => break,
        }
    }
    for w in times.windows(2).rev() {
        assert_eq!(tl.prev_event().unwrap(), Some(w[0]));
    }
    // Stepping forward by one then back again lands on the same event.
    let here = tl.now();
    tl.step(1).unwrap();
    assert_eq!(tl.prev_event().unwrap(), Some(here));
}

#[test]
fn step_clamps_to_bounds() {
    let mut r = rng(3);
    let mut config = random_config(&mut r);
    config.max_time = 2_000;
    let mut tl = Timeline::new(config, random_scenario(&mut r, 5, 10)).unwrap();
    assert!(tl.step(-5).unwrap());
    assert_eq!(tl.now(), 0);
    assert!(!tl.step(1_999).unwrap());
    assert!(tl.step(10).unwrap());
    assert_eq!(tl.now(), 2_000);
    assert!(tl.goto(2_001).is_err());
    assert_eq!(tl.now(), 2_000);
    let at_zero = tl.goto(0).unwrap().digest();
    tl.goto(1_000).unwrap();
    assert_eq!(tl.reset().digest(), at_zero);
}
