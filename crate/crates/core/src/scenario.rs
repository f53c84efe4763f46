//! External-event scenarios: the line-oriented text format, validation, and
//! the built-in scenario library.
//!
//! One event per line, whitespace separated, base-10 integers:
//!
//! ```text
//! A <time> <runtime> <memory>   job arrival
//! I <time> <burst>              I/O request by the CPU occupant
//! W <time> <sem_id>             semaphore wait by the CPU occupant
//! S <time> <sem_id>             semaphore signal
//! D <time>                      display simulator status
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Times must be
//! non-decreasing; same-time events keep file order. Job pids are assigned
//! 1, 2, 3, … in `A`-line order.

use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Config, DEFAULT_MAX_TIME};
use crate::error::LineError;
use crate::process::{Pid, SemId};
use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    #[serde(rename = "A")]
    Arrival { runtime: u32, memory: u32 },
    #[serde(rename = "I")]
    IoRequest { burst: u32 },
    #[serde(rename = "W")]
    SemWait { sem_id: SemId },
    #[serde(rename = "S")]
    SemSignal { sem_id: SemId },
    #[serde(rename = "D")]
    DisplayStatus,
}

impl EventKind {
    pub fn letter(&self) -> char {
        match self {
            EventKind::Arrival { .. } => 'A',
            EventKind::IoRequest { .. } => 'I',
            EventKind::SemWait { .. } => 'W',
            EventKind::SemSignal { .. } => 'S',
            EventKind::DisplayStatus => 'D',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExternalEvent {
    pub time: SimTime,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl ExternalEvent {
    pub fn new(time: SimTime, kind: EventKind) -> Self {
        Self { time, kind }
    }
}

impl fmt::Display for ExternalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.letter(), self.time)?;
        match self.kind {
            EventKind::Arrival { runtime, memory } => write!(f, " {runtime} {memory}"),
            EventKind::IoRequest { burst } => write!(f, " {burst}"),
            EventKind::SemWait { sem_id } | EventKind::SemSignal { sem_id } => {
                write!(f, " {sem_id}")
            }
            EventKind::DisplayStatus => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Canned,
    Uploaded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub events: Vec<ExternalEvent>,
    pub source: Source,
}

impl Scenario {
    pub fn new(name: impl Into<String>, events: Vec<ExternalEvent>) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            events,
            source: Source::Uploaded,
        }
    }

    pub fn empty() -> Self {
        Self::new("empty", Vec::new())
    }

    /// Arrival events paired with the pid each one will receive.
    pub fn jobs(&self) -> impl Iterator<Item = (Pid, &ExternalEvent)> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Arrival { .. }))
            .zip(1..)
            .map(|(e, n)| (Pid(n), e))
    }

    /// Pid the arrival at `index` receives, if that event is an arrival.
    pub fn pid_of(&self, index: usize) -> Option<Pid> {
        let event = self.events.get(index)?;
        if !matches!(event.kind, EventKind::Arrival { .. }) {
            return None;
        }
        let before = self.events[..index]
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Arrival { .. }))
            .count();
        Some(Pid(before as u32 + 1))
    }

    /// Canonical text form. Parsing it yields the same event list.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            let _ = writeln!(out, "{event}");
        }
        out
    }

    /// Checks the scenario against a configuration. Over-memory jobs are
    /// not an error here: they are rejected when they arrive.
    pub fn validate(&self, config: &Config) -> Result<(), Vec<LineError>> {
        let mut errors = Vec::new();
        let mut previous = 0;
        for (i, event) in self.events.iter().enumerate() {
            let n = i + 1;
            if event.time > config.max_time {
                errors.push(LineError::new(
                    0,
                    format!(
                        "event {n}: time {} exceeds maximum simulation time {}",
                        event.time, config.max_time
                    ),
                ));
            }
            if event.time < previous {
                errors.push(LineError::new(
                    0,
                    format!(
                        "event {n}: time {} is earlier than previous event time {previous}",
                        event.time
                    ),
                ));
            }
            previous = previous.max(event.time);
            match event.kind {
                EventKind::Arrival { runtime, memory } if runtime == 0 || memory == 0 => {
                    errors.push(LineError::new(
                        0,
                        format!("event {n}: runtime and memory must be positive"),
                    ));
                }
                EventKind::IoRequest { burst: 0 } => {
                    errors.push(LineError::new(
                        0,
                        format!("event {n}: burst must be positive"),
                    ));
                }
                _ => {}
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// Parses scenario text with the default 30,000-tick time bound.
pub fn parse(text: &str) -> Result<Scenario, Vec<LineError>> {
    parse_with_limit(text, DEFAULT_MAX_TIME)
}

/// Parses raw bytes. Invalid UTF-8 is reported against its line.
pub fn parse_bytes(bytes: &[u8], max_time: SimTime) -> Result<Scenario, Vec<LineError>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_with_limit(text, max_time),
        Err(e) => {
            let line = bytes[..e.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                + 1;
            Err(vec![LineError::new(line, "invalid UTF-8")])
        }
    }
}

pub fn parse_with_limit(text: &str, max_time: SimTime) -> Result<Scenario, Vec<LineError>> {
    let mut events = Vec::new();
    let mut errors = Vec::new();
    let mut previous: SimTime = 0;

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(line, max_time) {
            Ok(event) => {
                if event.time < previous {
                    errors.push(LineError::new(
                        line_no,
                        format!(
                            "time {} is earlier than previous event time {previous}",
                            event.time
                        ),
                    ));
                } else {
                    previous = event.time;
                }
                events.push(event);
            }
            Err(message) => errors.push(LineError::new(line_no, message)),
        }
    }

    if errors.is_empty() {
        Ok(Scenario::new("uploaded", events))
    } else {
        Err(errors)
    }
}

fn parse_line(line: &str, max_time: SimTime) -> Result<ExternalEvent, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let tag = fields[0];
    let names: &[&str] = match tag {
        "A" => &["time", "runtime", "memory"],
        "I" => &["time", "burst"],
        "W" | "S" => &["time", "sem_id"],
        "D" => &["time"],
        other => return Err(format!("unknown event tag '{other}'")),
    };
    let args = &fields[1..];
    if args.len() != names.len() {
        return Err(format!(
            "'{tag}' event takes {} field(s) ({}), found {}",
            names.len(),
            names.join(" "),
            args.len()
        ));
    }
    let values = args
        .iter()
        .zip(names)
        .map(|(raw, name)| parse_uint(raw, name))
        .collect::<Result<Vec<u32>, String>>()?;

    let time = values[0];
    if time > max_time {
        return Err(format!(
            "time {time} exceeds maximum simulation time {max_time}"
        ));
    }
    let positive = |value: u32, name: &str| {
        if value == 0 {
            Err(format!("{name} must be positive"))
        } else {
            Ok(value)
        }
    };
    let sem = |value: u32| {
        u8::try_from(value)
            .ok()
            .and_then(SemId::new)
            .ok_or_else(|| {
                format!(
                    "semaphore id {value} out of range (expected {}..{})",
                    SemId::MIN,
                    SemId::MAX
                )
            })
    };
    let kind = match tag {
        "A" => EventKind::Arrival {
            runtime: positive(values[1], "runtime")?,
            memory: positive(values[2], "memory")?,
        },
        "I" => EventKind::IoRequest {
            burst: positive(values[1], "burst")?,
        },
        "W" => EventKind::SemWait {
            sem_id: sem(values[1])?,
        },
        "S" => EventKind::SemSignal {
            sem_id: sem(values[1])?,
        },
        _ => EventKind::DisplayStatus,
    };
    Ok(ExternalEvent::new(time, kind))
}

fn parse_uint(raw: &str, name: &str) -> Result<u32, String> {
    if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{name} '{raw}' is not a non-negative integer"));
    }
    raw.parse::<u32>()
        .map_err(|_| format!("{name} '{raw}' is too large"))
}

struct CannedSource {
    name: &'static str,
    text: &'static str,
}

const CANNED: &[CannedSource] = &[
    CannedSource {
        name: "paper-demo",
        text: include_str!("../scenarios/paper-demo.txt"),
    },
    CannedSource {
        name: "fcfs-basic",
        text: include_str!("../scenarios/fcfs-basic.txt"),
    },
    CannedSource {
        name: "collision-demo",
        text: include_str!("../scenarios/collision-demo.txt"),
    },
    CannedSource {
        name: "semaphore-demo",
        text: include_str!("../scenarios/semaphore-demo.txt"),
    },
];

/// The first comment line of a scenario file, without the `#`.
fn description_of(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .find_map(|l| l.strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .unwrap_or_default()
}

fn named(name: &str, text: &str, source: Source) -> Result<Scenario, Vec<LineError>> {
    let mut scenario = parse(text)?;
    scenario.name = name.to_string();
    scenario.description = description_of(text);
    scenario.source = source;
    Ok(scenario)
}

/// The built-in scenario library.
pub fn canned() -> Vec<Scenario> {
    CANNED
        .iter()
        .map(|c| named(c.name, c.text, Source::Canned).expect("built-in scenario parses"))
        .collect()
}

pub fn canned_by_name(name: &str) -> Option<Scenario> {
    canned().into_iter().find(|s| s.name == name)
}

/// A scenario file that failed to parse: its name and diagnostics.
pub type BadFile = (String, Vec<LineError>);

/// Loads every `*.txt` file in `dir` as a canned scenario named after the
/// file stem, sorted by name.
pub fn load_dir(dir: &Path) -> std::io::Result<Vec<Result<Scenario, BadFile>>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = std::fs::read_to_string(&path)?;
        out.push(named(&name, &text, Source::Canned).map_err(|e| (name, e)));
    }
    Ok(out)
}

/// Built-in scenarios plus every `*.txt` in `dir`; files replace
/// built-ins with the same name.
pub fn catalog(dir: Option<&Path>) -> std::result::Result<Vec<Scenario>, String> {
    let mut all = canned();
    let Some(dir) = dir else { return Ok(all) };
    let loaded = load_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for entry in loaded {
        let s = entry.map_err(|(name, errs)| {
            errs.iter()
                .map(|e| format!("{name}: {e}"))
                .collect::<Vec<_>>()
                .join("\n")
        })?;
        all.retain(|c| c.name != s.name);
        all.push(s);
    }
    all.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(all)
}
