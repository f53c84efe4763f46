use std::path::Path;

use mlfq_sim_core::scenario::{self, Scenario};
use mlfq_sim_core::SimTime;

use crate::Failure;

pub const DIR_VAR: &str = "MLFQ_SIM_SCENARIO_DIR";

/// Built-in scenarios merged with the `MLFQ_SIM_SCENARIO_DIR` directory.
pub fn catalog() -> Result<Vec<Scenario>, Failure> {
    let dir = std::env::var_os(DIR_VAR);
    scenario::catalog(dir.as_deref().map(Path::new)).map_err(Failure::Input)
}

/// A path to a scenario file, or else the name of a canned scenario.
pub fn load(arg: &str, max_time: SimTime) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("{arg}: {e}")))?;
        let mut s = scenario::parse_bytes(&bytes, max_time)
            .map_err(|errs| Failure::Input(diagnostics(arg, &errs)))?;
        s.name = path
            .file_stem()
            .map_or_else(|| arg.to_string(), |n| n.to_string_lossy().into_owned());
        return Ok(s);
    }
    let s = catalog()?
        .into_iter()
        .find(|s| s.name == arg)
        .ok_or_else(|| Failure::Input(format!("{arg}: no such file or canned scenario")))?;
    let errs = match s.validate(&mlfq_sim_core::Config {
        max_time,
        ..Default::default()
    }) {
        Ok(()) => return Ok(s),
        Err(errs) => errs,
    };
    Err(Failure::Input(diagnostics(arg, &errs)))
}

fn diagnostics(name: &str, errs: &[mlfq_sim_core::LineError]) -> String {
    errs.iter()
        .map(|e| format!("{name}: {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
