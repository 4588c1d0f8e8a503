//! Parameter handling: per-command defaults, JSON config files, and
//! `--set key=value` overrides, merged in that order (later wins).

use serde_json::{Map, Value};
use std::path::Path;

/// Errors carrying their process exit code: bad parameters exit 2,
/// resource caps exit 3, I/O problems exit 2.
#[derive(Debug)]
pub enum CliError {
    Params(String),
    SizeCap(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Params(_) | CliError::Io(_) => 2,
            CliError::SizeCap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Params(m) | CliError::SizeCap(m) | CliError::Io(m) => m,
        }
    }
}

impl From<goldstone::Error> for CliError {
    fn from(err: goldstone::Error) -> Self {
        match err {
            goldstone::Error::SizeCap { .. } => CliError::SizeCap(err.to_string()),
            other => CliError::Params(other.to_string()),
        }
    }
}

/// An inverse temperature as written in configs: a number, the string
/// `"inf"`, or a critical-temperature multiple like `"1.5xc"`.
#[derive(Debug, Clone, Copy)]
pub enum BetaSpec {
    Infinite,
    Value(f64),
    CriticalMultiple(f64),
}

impl BetaSpec {
    pub fn parse(value: &Value) -> Result<Self, CliError> {
        match value {
            Value::Number(n) => n
                .as_f64()
                .map(BetaSpec::Value)
                .ok_or_else(|| CliError::Params(format!("beta value {n} is not a float"))),
            Value::String(s) => {
                if s == "inf" {
                    Ok(BetaSpec::Infinite)
                } else if let Some(prefix) = s.strip_suffix("xc") {
                    prefix
                        .parse::<f64>()
                        .map(BetaSpec::CriticalMultiple)
                        .map_err(|_| {
                            CliError::Params(format!("cannot parse critical multiple {s:?}"))
                        })
                } else {
                    s.parse::<f64>()
                        .map(BetaSpec::Value)
                        .map_err(|_| CliError::Params(format!("cannot parse beta {s:?}")))
                }
            }
            other => Err(CliError::Params(format!(
                "beta must be a number, \"inf\", or \"<f>xc\", got {other}"
            ))),
        }
    }

    /// Resolve to a concrete inverse temperature; critical multiples need
    /// the level splitting they refer to.
    pub fn resolve(&self, epsilon: Option<f64>) -> Result<goldstone::Beta, CliError> {
        match *self {
            BetaSpec::Infinite => Ok(goldstone::Beta::Infinite),
            BetaSpec::Value(b) => Ok(goldstone::Beta::Finite(b)),
            BetaSpec::CriticalMultiple(m) => {
                let eps = epsilon.ok_or_else(|| {
                    CliError::Params(
                        "critical-temperature multiples like \"1.5xc\" need an epsilon".into(),
                    )
                })?;
                let beta_c = goldstone::bcs::critical_beta(eps)?;
                Ok(goldstone::Beta::Finite(m * beta_c))
            }
        }
    }
}

/// The merged key-value parameter map of one invocation.
#[derive(Debug, Clone)]
pub struct Params {
    map: Map<String, Value>,
}

impl Params {
    pub fn new(defaults: &[(&str, Value)]) -> Self {
        let mut map = Map::new();
        for (key, value) in defaults {
            map.insert((*key).to_string(), value.clone());
        }
        Params { map }
    }

    /// Layer a JSON config file (a single top-level object) over the
    /// defaults.
    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Params(format!("config {} is not JSON: {e}", path.display())))?;
        let Value::Object(obj) = value else {
            return Err(CliError::Params(format!(
                "config {} must hold a single JSON object",
                path.display()
            )));
        };
        for (key, value) in obj {
            self.map.insert(key, value);
        }
        Ok(())
    }

    /// Apply one `key=value` override; the value is parsed as JSON when
    /// possible and kept as a string otherwise (so `beta=inf` works
    /// unquoted).
    pub fn apply_set(&mut self, assignment: &str) -> Result<(), CliError> {
        let Some((key, raw)) = assignment.split_once('=') else {
            return Err(CliError::Params(format!(
                "--set expects key=value, got {assignment:?}"
            )));
        };
        let value = serde_json::from_str::<Value>(raw)
            .unwrap_or_else(|_| Value::String(raw.to_string()));
        self.map.insert(key.to_string(), value);
        Ok(())
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.map.insert("seed".into(), Value::from(seed));
    }

    /// The final merged map, for echoing into JSON output.
    pub fn as_value(&self) -> Value {
        Value::Object(self.map.clone())
    }

    fn get(&self, key: &str) -> Result<&Value, CliError> {
        self.map
            .get(key)
            .ok_or_else(|| CliError::Params(format!("missing required parameter {key:?}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.get(key)?
            .as_f64()
            .ok_or_else(|| CliError::Params(format!("parameter {key:?} must be a number")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.get(key)?
            .as_u64()
            .ok_or_else(|| CliError::Params(format!("parameter {key:?} must be a nonnegative integer")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        Ok(self.u64(key)? as usize)
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        self.get(key)?
            .as_bool()
            .ok_or_else(|| CliError::Params(format!("parameter {key:?} must be true or false")))
    }

    pub fn string(&self, key: &str) -> Result<String, CliError> {
        self.get(key)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| CliError::Params(format!("parameter {key:?} must be a string")))
    }

    /// A number or a list of numbers, normalized to a list.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        match self.get(key)? {
            Value::Number(n) => n
                .as_f64()
                .map(|x| vec![x])
                .ok_or_else(|| CliError::Params(format!("parameter {key:?} is not a float"))),
            Value::Array(items) => items
                .iter()
                .map(|item| {
                    item.as_f64().ok_or_else(|| {
                        CliError::Params(format!("parameter {key:?} holds a non-number entry"))
                    })
                })
                .collect(),
            other => Err(CliError::Params(format!(
                "parameter {key:?} must be a number or list of numbers, got {other}"
            ))),
        }
    }

    /// An integer or a list of integers, normalized to a list.
    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        match self.get(key)? {
            Value::Number(n) => n
                .as_u64()
                .map(|x| vec![x as usize])
                .ok_or_else(|| CliError::Params(format!("parameter {key:?} is not an integer"))),
            Value::Array(items) => items
                .iter()
                .map(|item| {
                    item.as_u64().map(|x| x as usize).ok_or_else(|| {
                        CliError::Params(format!("parameter {key:?} holds a non-integer entry"))
                    })
                })
                .collect(),
            other => Err(CliError::Params(format!(
                "parameter {key:?} must be an integer or list of integers, got {other}"
            ))),
        }
    }

    /// One inverse-temperature spec or a list of them.
    pub fn beta_specs(&self, key: &str) -> Result<Vec<BetaSpec>, CliError> {
        match self.get(key)? {
            Value::Array(items) => items.iter().map(BetaSpec::parse).collect(),
            single => Ok(vec![BetaSpec::parse(single)?]),
        }
    }

    pub fn beta_spec(&self, key: &str) -> Result<BetaSpec, CliError> {
        BetaSpec::parse(self.get(key)?)
    }
}
