//! Command workflows behind the `vclone` binary.
//!
//! Every command returns a [`Report`]; the binary prints it as a table or as
//! JSON and exits with [`Report::exit_code`].

mod commands;
mod format;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::Tolerances;
use crate::error::Error;
use crate::linalg::HermitianOperator;

pub use commands::{
    cmd_bounds, cmd_clonable, cmd_cost, cmd_demo, cmd_map, cmd_simulate, DemoOptions, MapMethod, Priors,
    SimulateOptions,
};
pub use format::{
    as_pure, matrix_from_json, matrix_to_json, state_to_spec, MatrixJson, QpdFile, StateSpec, StatesFile, PRESETS,
    QPD_SCHEMA, STATES_SCHEMA,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NO_GO: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;
pub const EXIT_CHECK: u8 = 5;

#[derive(Debug, Clone)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotClonable | Error::IdenticalStates(..) => EXIT_NO_GO,
            Error::Solver(_) => EXIT_SOLVER,
            _ => EXIT_PARSE,
        };
        let message = match &e {
            Error::NotClonable => {
                "no-go: the input states are linearly dependent, so no HPTP cloning map exists".to_string()
            }
            Error::IdenticalStates(i, j) => {
                format!("no-go: states {i} and {j} coincide, so the set is linearly dependent")
            }
            other => other.to_string(),
        };
        Self { code, message }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub inputs: Value,
    pub results: Value,
    pub certificates: Value,
    /// Seconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub seeds: Vec<u64>,
    pub checks: Vec<Check>,
    /// Set when the answer itself is a no-go (e.g. a dependent state set).
    pub no_go: bool,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self {
            command: command.into(),
            tool_version: TOOL_VERSION.into(),
            inputs,
            results: Value::Object(Default::default()),
            certificates: Value::Null,
            timings: BTreeMap::new(),
            seeds: Vec::new(),
            checks: Vec::new(),
            no_go: false,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut self.results {
            m.insert(key.into(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.results.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(Value::as_f64)
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        passed
    }

    /// Runs `f` and records its wall time under `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(stage.into()).or_default() += t.elapsed().as_secs_f64();
        out
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> u8 {
        if !self.all_passed() {
            EXIT_CHECK
        } else if self.no_go {
            EXIT_NO_GO
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable table; numbers carry 8 significant digits.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vclone {}  ({})", self.command, self.tool_version);
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        if !self.seeds.is_empty() {
            let _ = writeln!(out, "  seeds: {:?}", self.seeds);
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  [{tag}] {}: {}", c.name, c.detail);
        }
        let total = self.timings.values().fold(0.0, |a, b| a + b);
        let _ = writeln!(out, "  time {}s", sig8(total));
        out
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| x.is_number()) && a.len() <= 12 => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix.into(), format!("[{}]", items.join(", "))));
        }
        Value::Array(a) if a.iter().any(|x| x.is_array() || x.is_object()) || a.len() > 12 => {
            rows.push((prefix.into(), format!("({} entries, see --json)", a.len())));
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix.into(), items.join(", ")));
        }
        other => rows.push((prefix.into(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig8(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `x` with 8 significant digits.
pub fn sig8(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..8).contains(&mag) {
        format!("{:.*}", (7 - mag).max(0) as usize, x)
    } else {
        format!("{x:.7e}")
    }
}

pub fn operator_json(h: &HermitianOperator) -> MatrixJson {
    matrix_to_json(h.matrix())
}

/// Tolerances from the environment, with an explicit solver tolerance on top.
pub fn tolerances(tol: Option<f64>) -> Tolerances {
    let mut t = Tolerances::from_env();
    if let Some(v) = tol {
        t.sdp = v;
    }
    t
}

/// A states file, or a comma-separated list of presets such as `zero,plus`.
pub fn load_states(arg: &str) -> CliResult<Vec<StateSpec>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_PARSE, format!("{arg}: {e}")))?;
        let f = StatesFile::parse(&text).map_err(|e| CliError::new(EXIT_PARSE, format!("{arg}: {e}")))?;
        return Ok(f.states);
    }
    let specs: Vec<StateSpec> = arg.split(',').map(|s| StateSpec::Preset(s.trim().to_string())).collect();
    for (i, s) in specs.iter().enumerate() {
        s.resolve().map_err(|e| CliError::new(EXIT_PARSE, format!("'{arg}' is not a file; preset {i}: {e}")))?;
    }
    Ok(specs)
}

pub fn load_qpd(path: &str) -> CliResult<QpdFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_PARSE, format!("{path}: {e}")))?;
    QpdFile::parse(&text).map_err(|e| CliError::new(EXIT_PARSE, format!("{path}: {e}")))
}
