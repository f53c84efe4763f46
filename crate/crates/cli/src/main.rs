mod repl;
mod source;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlfq_sim_core::render::state_panels;
use mlfq_sim_core::{metrics, Config, MachineState, SimError, SimTime, StateDocument, TraceEvent};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "mlfq-sim",
    version,
    about = "Multi-level feedback queue OS simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to completion (or --until) and print statistics.
    Run {
        /// Scenario file, or the name of a canned scenario.
        scenario: String,
        #[command(flatten)]
        config: ConfigArgs,
        /// Stop at this time instead of running to completion.
        #[arg(long)]
        until: Option<SimTime>,
        /// Print every trace record.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Interactive stepping: t <time>, +dt, -dt, n, p, s, q.
    Step {
        scenario: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Parse and check a scenario file without running it.
    Validate {
        scenario: String,
        #[arg(long)]
        max_time: Option<SimTime>,
    },
    /// List the canned scenarios.
    Scenarios,
}

#[derive(Args)]
struct ConfigArgs {
    /// Level-1 quantum (0 = first-come, first-served).
    #[arg(long)]
    q1: Option<u32>,
    /// Level-2 quantum (0 = first-come, first-served).
    #[arg(long)]
    q2: Option<u32>,
    /// Total memory.
    #[arg(long)]
    memory: Option<u32>,
    /// Initial semaphore values, five comma-separated integers.
    #[arg(long, value_delimiter = ',', value_name = "V1,..,V5")]
    sems: Option<Vec<u32>>,
    #[arg(long)]
    max_time: Option<SimTime>,
}

impl ConfigArgs {
    fn build(&self) -> Result<Config, Failure> {
        let mut c = Config::default();
        if let Some(q) = self.q1 {
            c.quantum_level1 = q;
        }
        if let Some(q) = self.q2 {
            c.quantum_level2 = q;
        }
        if let Some(m) = self.memory {
            c.total_memory = m;
        }
        if let Some(s) = &self.sems {
            c.semaphore_initial_values = s
                .as_slice()
                .try_into()
                .map_err(|_| Failure::Input("--sems takes exactly five values".into()))?;
        }
        if let Some(t) = self.max_time {
            c.max_time = t;
        }
        c.validate().map_err(|e| Failure::Input(e.to_string()))?;
        Ok(c)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

pub(crate) enum Failure {
    Input(String),
    Runtime(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::Scenario(_) | SimError::OutOfRange { .. } => {
                Failure::Input(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            config,
            until,
            trace,
            format,
        } => cmd_run(&scenario, &config, until, trace, format),
        Command::Step { scenario, config } => cmd_step(&scenario, &config),
        Command::Validate { scenario, max_time } => cmd_validate(&scenario, max_time),
        Command::Scenarios => cmd_scenarios(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            for line in msg.lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct StatusDump {
    time: SimTime,
    state: StateDocument,
}

#[derive(Serialize)]
struct RunDocument<'a> {
    scenario: &'a str,
    config: &'a Config,
    final_time: SimTime,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [mlfq_sim_core::TraceRecord]>,
    status_dumps: Vec<StatusDump>,
    stats: metrics::RunStats,
}

fn cmd_run(
    name: &str,
    args: &ConfigArgs,
    until: Option<SimTime>,
    trace: bool,
    format: Format,
) -> Result<(), Failure> {
    let config = args.build()?;
    let scenario = source::load(name, config.max_time)?;
    let stop = match until {
        Some(t) if t > config.max_time => {
            return Err(Failure::Input(format!(
                "--until {t} exceeds maximum simulation time {}",
                config.max_time
            )))
        }
        Some(t) => t,
        None => config.max_time,
    };
    let scenario_name = scenario.name.clone();
    let mut state = MachineState::init(config.clone(), scenario)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut dumps = Vec::new();
    let mut printed = 0;

    loop {
        let fresh = &state.trace[printed..];
        for rec in fresh {
            if trace && format == Format::Text {
                writeln!(out, "{rec}")?;
            }
        }
        if fresh.iter().any(|r| r.event == TraceEvent::StatusDumped) {
            match format {
                Format::Text => write!(out, "{}", state_panels(&state))?,
                Format::Json => dumps.push(StatusDump {
                    time: state.now,
                    state: StateDocument::from_state(&state),
                }),
            }
        }
        printed = state.trace.len();
        if state.now >= stop || (until.is_none() && state.is_drained()) {
            break;
        }
        state.tick()?;
    }

    let stats = metrics::compute(&state.trace, &state.pcb_table, state.now)?;
    match format {
        Format::Text => writeln!(out, "{stats}")?,
        Format::Json => {
            let doc = RunDocument {
                scenario: &scenario_name,
                config: &config,
                final_time: state.now,
                trace: trace.then_some(state.trace.as_slice()),
                status_dumps: dumps,
                stats,
            };
            serde_json::to_writer_pretty(&mut out, &doc)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_step(name: &str, args: &ConfigArgs) -> Result<(), Failure> {
    let config = args.build()?;
    let scenario = source::load(name, config.max_time)?;
    let timeline = mlfq_sim_core::Timeline::new(config, scenario)?;
    let stdin = io::stdin();
    let stdout = io::stdout();
    repl::run(timeline, stdin.lock(), stdout.lock())
}

fn cmd_validate(name: &str, max_time: Option<SimTime>) -> Result<(), Failure> {
    let max_time = max_time.unwrap_or(Config::default().max_time);
    let scenario = source::load(name, max_time)?;
    println!("OK: {} events", scenario.events.len());
    Ok(())
}

fn cmd_scenarios() -> Result<(), Failure> {
    for s in source::catalog()? {
        println!("{:<16} {}", s.name, s.description);
    }
    Ok(())
}
