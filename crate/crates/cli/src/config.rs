//! Run configuration: a JSON document holding a sweep plan plus output and
//! threading settings, layered as preset < config file < command-line flags.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fundsim_core::experiments::{preset, SweepPlan};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    /// Inferred from the path extension when absent.
    pub format: Option<OutputFormat>,
}

/// Worker thread count: `"auto"` (hardware parallelism) or an explicit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Threads {
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

impl Threads {
    pub fn count(self) -> Option<usize> {
        match self {
            Threads::Auto => None,
            Threads::Fixed(n) => Some(n.get()),
        }
    }
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threads::Auto);
        }
        s.parse::<usize>()
            .ok()
            .and_then(NonZeroUsize::new)
            .map(Threads::Fixed)
            .ok_or_else(|| format!("threads must be \"auto\" or an integer >= 1 (got {s:?})"))
    }
}

impl TryFrom<Value> for Threads {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match v {
            Value::String(s) => s.parse(),
            Value::Number(n) => n
                .as_u64()
                .and_then(|n| NonZeroUsize::new(n as usize))
                .map(Threads::Fixed)
                .ok_or_else(|| format!("threads must be an integer >= 1 (got {n})")),
            other => Err(format!("threads must be \"auto\" or an integer (got {other})")),
        }
    }
}

impl From<Threads> for Value {
    fn from(t: Threads) -> Value {
        match t {
            Threads::Auto => Value::from("auto"),
            Threads::Fixed(n) => Value::from(n.get()),
        }
    }
}

/// `--bound` value: a cap above 1, or `none` / `inf` for unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundArg(pub Option<f64>);

impl FromStr for BoundArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "inf" | "unbounded" => Ok(BoundArg(None)),
            _ => s
                .parse::<f64>()
                .map(|b| BoundArg(Some(b)))
                .map_err(|_| format!("bound must be a number or \"none\" (got {s:?})")),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub x_min: Option<f64>,
    pub bound: Option<BoundArg>,
    pub n_funds: Option<usize>,
    pub n_replicates: Option<usize>,
    pub pool_size: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub threads: Option<Threads>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub plan: SweepPlan,
    pub output: OutputSpec,
    pub threads: Threads,
    pub log_level: Option<String>,
}

impl RunConfig {
    /// Output format, falling back to the path extension and then CSV.
    pub fn format(&self) -> OutputFormat {
        self.output.format.unwrap_or_else(|| {
            match self.output.path.as_deref().and_then(Path::extension) {
                Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
                _ => OutputFormat::Csv,
            }
        })
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn take<T: for<'de> Deserialize<'de>>(obj: &mut Map<String, Value>, key: &str) -> Result<Option<T>, CliError> {
    match obj.remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| invalid(format!("config field {key}: {e}"))),
    }
}

/// Builds the effective configuration from optional config-file text and
/// flag overrides, and validates the resulting plan.
pub fn resolve(config_text: Option<&str>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut file = match config_text {
        None => Map::new(),
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => map,
            Ok(_) => return Err(invalid("config must be a JSON object")),
            Err(e) => return Err(invalid(format!("config is not valid JSON: {e}"))),
        },
    };
    let file_preset: Option<String> = take(&mut file, "preset")?;
    let output: OutputSpec = take(&mut file, "output")?.unwrap_or_default();
    let threads: Threads = take(&mut file, "threads")?.unwrap_or_default();
    let log_level: Option<String> = take(&mut file, "log_level")?;

    let preset_name = overrides.preset.clone().or(file_preset);
    let base = match &preset_name {
        Some(name) => preset(name).map_err(|e| invalid(e.to_string()))?,
        None => SweepPlan::default(),
    };
    let Value::Object(mut merged) = serde_json::to_value(&base).expect("plans serialize") else {
        unreachable!("a plan serializes to an object");
    };
    merged.extend(file);
    let mut plan: SweepPlan =
        serde_json::from_value(Value::Object(merged)).map_err(|e| invalid(format!("config: {e}")))?;

    if let Some(seed) = overrides.seed {
        plan.master_seed = seed;
    }
    if let Some(alpha) = overrides.alpha {
        plan.world_alpha = alpha;
    }
    if let Some(x_min) = overrides.x_min {
        plan.x_min = x_min;
    }
    if let Some(BoundArg(bound)) = overrides.bound {
        plan.bounds = vec![bound];
    }
    if let Some(n) = overrides.n_funds {
        plan.n_funds = n;
    }
    if let Some(n) = overrides.n_replicates {
        plan.n_replicates = n;
    }
    if let Some(n) = overrides.pool_size {
        plan.pool_size = n;
    }
    plan.validate().map_err(|e| invalid(e.to_string()))?;

    let mut output = output;
    if let Some(path) = &overrides.out {
        output.path = Some(path.clone());
    }
    if let Some(format) = overrides.format {
        output.format = Some(format);
    }

    Ok(RunConfig {
        preset: preset_name,
        plan,
        output,
        threads: overrides.threads.unwrap_or(threads),
        log_level,
    })
}
