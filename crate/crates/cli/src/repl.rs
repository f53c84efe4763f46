use std::io::{BufRead, IsTerminal, Write};

use mlfq_sim_core::render::state_panels;
use mlfq_sim_core::{SimTime, Timeline};

use crate::Failure;

const HELP: &str = "commands: t <time> | +<dt> | -<dt> | n | p | s | q";

enum Cmd {
    Goto(i64),
    Step(i64),
    Next,
    Prev,
    Show,
    Help,
    Quit,
}

fn parse(line: &str) -> Result<Option<Cmd>, String> {
    let line = line.trim();
    let number = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| format!("'{}' is not an integer", s.trim()))
    };
    let cmd = match line {
        "" => return Ok(None),
        "n" => Cmd::Next,
        "p" => Cmd::Prev,
        "s" => Cmd::Show,
        "q" => Cmd::Quit,
        "h" | "help" | "?" => Cmd::Help,
        _ if line.starts_with('+') => Cmd::Step(number(&line[1..])?),
        _ if line.starts_with('-') => Cmd::Step(-number(&line[1..])?),
        _ => match line.strip_prefix("t ") {
            Some(rest) => Cmd::Goto(number(rest)?),
            None => return Err(format!("unknown command '{line}'")),
        },
    };
    Ok(Some(cmd))
}

/// Prints the non-tick trace records stamped with the current time.
fn show_events(out: &mut impl Write, tl: &Timeline) -> std::io::Result<()> {
    let now = tl.now();
    writeln!(out, "now {now}")?;
    let trace = &tl.current().trace;
    let start = trace.partition_point(|r| r.time < now);
    for r in trace[start..].iter().filter(|r| r.is_event()) {
        writeln!(out, "  {r}")?;
    }
    Ok(())
}

pub fn run(mut tl: Timeline, input: impl BufRead, mut out: impl Write) -> Result<(), Failure> {
    let interactive = std::io::stdin().is_terminal();
    let max = tl.config().max_time;
    writeln!(
        out,
        "{} loaded, {} events, max time {max}. {HELP}",
        tl.scenario().name,
        tl.scenario().events.len()
    )?;
    let prompt = |out: &mut dyn Write, now: SimTime| -> std::io::Result<()> {
        if interactive {
            write!(out, "[{now}]> ")?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(&mut out, tl.now())?;
    for line in input.lines() {
        let line = line?;
        match parse(&line) {
            Ok(None) => {}
            Ok(Some(Cmd::Quit)) => return Ok(()),
            Ok(Some(Cmd::Help)) => writeln!(out, "{HELP}")?,
            Ok(Some(Cmd::Show)) => write!(out, "{}", state_panels(tl.current()))?,
            Ok(Some(Cmd::Goto(t))) => {
                if t < 0 || t > max as i64 {
                    writeln!(out, "time {t} is outside 0..{max}")?;
                } else {
                    tl.goto(t as SimTime)?;
                    show_events(&mut out, &tl)?;
                }
            }
            Ok(Some(Cmd::Step(dt))) => {
                if tl.step(dt)? {
                    writeln!(out, "clamped to {}", tl.now())?;
                }
                show_events(&mut out, &tl)?;
            }
            Ok(Some(Cmd::Next)) => match tl.next_event()? {
                Some(_) => show_events(&mut out, &tl)?,
                None => writeln!(out, "no later event")?,
            },
            Ok(Some(Cmd::Prev)) => match tl.prev_event()? {
                Some(_) => show_events(&mut out, &tl)?,
                None => writeln!(out, "no earlier event")?,
            },
            Err(msg) => writeln!(out, "{msg}; {HELP}")?,
        }
        prompt(&mut out, tl.now())?;
    }
    Ok(())
}
