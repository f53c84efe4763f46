//! Python bindings. Structured results (state documents, statistics, trace
//! records) cross the boundary as JSON and come out as plain dicts and lists.

use mlfq_sim_core::render::state_panels;
use mlfq_sim_core::scenario::{self, Scenario};
use mlfq_sim_core::{Config, SimError, SimTime, StateDocument, Timeline};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py_err(e: SimError) -> PyErr {
    match e {
        SimError::Config(_)
        | SimError::Scenario(_)
        | SimError::OutOfRange { .. }
        | SimError::NonPositiveDuration => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn scenario_err(errs: Vec<mlfq_sim_core::LineError>) -> PyErr {
    to_py_err(SimError::Scenario(errs))
}

/// Serializes `value` and hands it to `json.loads`.
fn to_python<'py, T: Serialize + ?Sized>(
    py: Python<'py>,
    value: &T,
) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_python(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    let text: String = obj
        .py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn build_config(config: Option<&Bound<'_, PyAny>>) -> PyResult<Config> {
    match config {
        None => Ok(Config::default()),
        Some(obj) => Config::default()
            .with_overrides(&from_python(obj)?)
            .map_err(to_py_err),
    }
}

/// A scenario loaded into a time-travelling simulator.
///
/// Give either `scenario_name` (a canned scenario) or `scenario_text`
/// (scenario file contents); neither gives an empty scenario. `config` is a
/// dict overriding any of the default settings.
#[pyclass(module = "mlfq_sim")]
pub struct Simulation {
    timeline: Timeline,
}

#[pymethods]
impl Simulation {
    #[new]
    #[pyo3(signature = (scenario_name=None, scenario_text=None, config=None, stride=None))]
    fn new(
        scenario_name: Option<&str>,
        scenario_text: Option<&str>,
        config: Option<&Bound<'_, PyAny>>,
        stride: Option<SimTime>,
    ) -> PyResult<Self> {
        let config = build_config(config)?;
        let scenario = match (scenario_name, scenario_text) {
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err(
                    "give at most one of scenario_name and scenario_text",
                ))
            }
            (Some(name), None) => scenario::canned_by_name(name)
                .ok_or_else(|| PyValueError::new_err(format!("unknown scenario '{name}'")))?,
            (None, Some(text)) => {
                scenario::parse_with_limit(text, config.max_time).map_err(scenario_err)?
            }
            (None, None) => Scenario::empty(),
        };
        let timeline = match stride {
            Some(s) => Timeline::with_stride(config, scenario, s),
            None => Timeline::new(config, scenario),
        }
        .map_err(to_py_err)?;
        Ok(Self { timeline })
    }

    #[getter]
    fn now(&self) -> SimTime {
        self.timeline.now()
    }

    #[getter]
    fn config<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, self.timeline.config())
    }

    /// Jumps to absolute time `t` (forwards or backwards).
    fn goto(&mut self, t: i64) -> PyResult<SimTime> {
        let max = self.timeline.config().max_time;
        let t = SimTime::try_from(t)
            .ok()
            .filter(|t| *t <= max)
            .ok_or_else(|| PyValueError::new_err(format!("time {t} is outside 0..{max}")))?;
        self.timeline.goto(t).map_err(to_py_err)?;
        Ok(self.timeline.now())
    }

    /// Moves by `dt` (may be negative), clamped to the valid range.
    /// Returns True when clamping happened.
    fn step(&mut self, dt: i64) -> PyResult<bool> {
        self.timeline.step(dt).map_err(to_py_err)
    }

    /// Moves to the next event and returns its time, or None at the end.
    fn next_event(&mut self) -> PyResult<Option<SimTime>> {
        self.timeline.next_event().map_err(to_py_err)
    }

    fn prev_event(&mut self) -> PyResult<Option<SimTime>> {
        self.timeline.prev_event().map_err(to_py_err)
    }

    /// Runs to completion and returns the statistics.
    fn run<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let stats = self.timeline.complete_run().map_err(to_py_err)?;
        to_python(py, &stats)
    }

    fn reset(&mut self) {
        self.timeline.reset();
    }

    /// Full state document for the current time.
    fn state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &StateDocument::from_timeline(&self.timeline))
    }

    /// Statistics up to the current time; unfinished processes are censored.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &self.timeline.stats().map_err(to_py_err)?)
    }

    /// Trace records with `start <= time <= end` (defaults: 0 and now).
    #[pyo3(signature = (start=None, end=None))]
    fn trace<'py>(
        &self,
        py: Python<'py>,
        start: Option<SimTime>,
        end: Option<SimTime>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let start = start.unwrap_or(0);
        let end = end.unwrap_or(self.timeline.now());
        let trace = &self.timeline.current().trace;
        let lo = trace.partition_point(|r| r.time < start);
        let hi = trace.partition_point(|r| r.time <= end).max(lo);
        to_python(py, &trace[lo..hi])
    }

    /// Deterministic hash of the simulation state.
    fn digest(&self) -> String {
        self.timeline.current().digest()
    }

    /// The text status dump.
    fn panels(&self) -> String {
        state_panels(self.timeline.current())
    }

    fn __repr__(&self) -> String {
        format!(
            "Simulation(scenario={:?}, now={})",
            self.timeline.scenario().name,
            self.timeline.now()
        )
    }
}

/// Parses scenario text into a list of event dicts; raises ValueError
/// listing every bad line.
#[pyfunction]
fn parse_scenario<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = scenario::parse(text).map_err(scenario_err)?;
    to_python(py, &s.events)
}

/// Returns the list of "line N: message" diagnostics; empty when valid.
#[pyfunction]
fn validate_scenario(text: &str) -> Vec<String> {
    match scenario::parse(text) {
        Ok(_) => Vec::new(),
        Err(errs) => errs.iter().map(|e| e.to_string()).collect(),
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    description: String,
    text: String,
}

/// The built-in scenarios as dicts with name, description and text.
#[pyfunction]
fn canned_scenarios(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let entries: Vec<CatalogEntry> = scenario::canned()
        .into_iter()
        .map(|s| CatalogEntry {
            text: s.serialize(),
            name: s.name,
            description: s.description,
        })
        .collect();
    to_python(py, &entries)
}

#[pymodule]
fn mlfq_sim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Simulation>()?;
    m.add_function(wrap_pyfunction!(parse_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(validate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(canned_scenarios, m)?)?;
    Ok(())
}
